use std::collections::{BTreeMap, BTreeSet};

use crate::error::{invalid, Result};
use crate::graph::{NodeId, UndirGraph};
use crate::instance::CaInstance;
use crate::lp::{sample_component, solve_lp_with, SolveOptions};
use crate::rng::Rng;
use crate::steiner::Component;

/// One line of the per-iteration log, in original node ids.
#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub sum_x: f64,
    pub component_terminals: Vec<NodeId>,
    pub component_cost: usize,
}

#[derive(Clone, Debug)]
pub struct RoundingResult {
    /// Chosen Steiner nodes, in the original instance's id space.
    pub steiner: BTreeSet<NodeId>,
    pub log: Vec<IterationRecord>,
}

/// Merge a sampled component into its sink terminal: component nodes become
/// one super-terminal, terminals that end up adjacent to it are absorbed
/// (their connection is already paid for by a merged Steiner node), and the
/// super-terminal's neighborhood is re-cliqued.
pub fn contract_component(inst: &CaInstance, comp: &Component) -> Result<CaInstance> {
    let n = inst.graph.node_count();
    for &t in &comp.terminals {
        if t >= n || !inst.terminals.contains(&t) {
            return Err(invalid(format!("component terminal {t} not in instance")));
        }
    }
    for &s in &comp.steiner {
        if s >= n || inst.terminals.contains(&s) {
            return Err(invalid(format!("component Steiner node {s} not in instance")));
        }
    }

    let mut merged = vec![false; n];
    for &u in comp.terminals.iter().chain(comp.steiner.iter()) {
        merged[u] = true;
    }
    let sink = comp.sink;

    // Absorb terminals that touch the merged blob, transitively.
    loop {
        let mut grew = false;
        for &t in &inst.terminals {
            if !merged[t] && inst.graph.neighbors(t).iter().any(|&v| merged[v]) {
                merged[t] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }

    // Survivors keep their relative order; the sink represents the blob.
    let mut keep: Vec<NodeId> = Vec::with_capacity(n);
    for u in 0..n {
        if !merged[u] || u == sink {
            keep.push(u);
        }
    }
    let new_id: BTreeMap<NodeId, usize> = keep.iter().copied().zip(0..).collect();
    let to_new = |u: NodeId| -> usize {
        if merged[u] {
            new_id[&sink]
        } else {
            new_id[&u]
        }
    };

    let labels = keep.iter().map(|&u| inst.graph.label(u).to_string()).collect();
    let mut graph = UndirGraph::with_labels(labels);
    for (u, v) in inst.graph.edges() {
        let (a, b) = (to_new(u), to_new(v));
        if a != b {
            graph.add_edge(a, b)?;
        }
    }
    // Re-clique the super-terminal's neighborhood (all Steiner now).
    let super_id = new_id[&sink];
    let around: Vec<usize> = graph.neighbors(super_id).to_vec();
    for i in 0..around.len() {
        for j in i + 1..around.len() {
            graph.add_edge(around[i], around[j])?;
        }
    }

    let terminals: BTreeSet<usize> = inst
        .terminals
        .iter()
        .filter(|&&t| !merged[t] || t == sink)
        .map(|&t| to_new(t))
        .collect();
    let back_map = inst
        .back_map
        .iter()
        .filter(|(&s, _)| !merged[s])
        .map(|(&s, &l)| (to_new(s), l))
        .collect();
    let origin = keep.iter().map(|&u| inst.origin[u]).collect();
    Ok(CaInstance {
        graph,
        terminals,
        back_map,
        origin,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RoundingOptions {
    pub lp: SolveOptions,
    /// Preferred root terminal, in original ids; used while it survives.
    pub root: Option<NodeId>,
}

/// The iterative randomized rounding loop: solve the relaxation, sample a
/// component proportionally to x, contract it into its sink, and repeat
/// until one terminal remains. Returns the union of sampled Steiner sets
/// in original ids plus the iteration log.
pub fn iterative_rounding(inst: &CaInstance, k: usize, seed: u64) -> Result<RoundingResult> {
    iterative_rounding_with(inst, k, seed, RoundingOptions::default())
}

pub fn iterative_rounding_with(
    inst: &CaInstance,
    k: usize,
    seed: u64,
    opts: RoundingOptions,
) -> Result<RoundingResult> {
    let mut rng = Rng::new(seed);
    let mut current = inst.clone();
    let mut chosen: BTreeSet<NodeId> = BTreeSet::new();
    let mut log = Vec::new();
    let mut iter = 0usize;
    while current.terminal_count() > 1 {
        iter += 1;
        // Honor the root override for as long as that terminal survives.
        let root_now = opts.root.and_then(|orig| {
            current
                .terminals
                .iter()
                .copied()
                .find(|&t| current.origin[t] == orig)
        });
        let lp = solve_lp_with(&current, k, root_now, opts.lp)?;
        let comp = sample_component(&lp, &mut rng)?.clone();
        for &s in &comp.steiner {
            chosen.insert(current.origin[s]);
        }
        log.push(IterationRecord {
            iter,
            objective: lp.objective,
            sum_x: lp.sum_x(),
            component_terminals: comp.terminals.iter().map(|&t| current.origin[t]).collect(),
            component_cost: comp.cost(),
        });
        let next = contract_component(&current, &comp)?;
        debug_assert!(next.terminal_count() < current.terminal_count());
        current = next;
    }
    Ok(RoundingResult {
        steiner: chosen,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_ca_instance;
    use crate::instances::{gen_path_family, gen_random_tree_instance, TerminalProfile};
    use crate::lp::solve_lp;
    use crate::steiner::{brute_force_opt, enumerate_components};
    use crate::graph::UndirGraph;

    fn two_terminal_instance() -> CaInstance {
        let mut g = UndirGraph::new(3);
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 2).unwrap();
        CaInstance::new(g, BTreeSet::from([0, 1]))
    }

    /// Contracted instances keep terminal independence and cliqued terminal
    /// neighborhoods; the two-terminals-per-Steiner bound is an input-only
    /// property and may lapse after merging.
    fn p1_p3_clean(inst: &CaInstance) -> bool {
        validate_ca_instance(inst).iter().all(|v| {
            matches!(
                v,
                crate::instance::CaViolation::SteinerSeesTooManyTerminals(_, _)
            )
        })
    }

    #[test]
    fn contracting_full_component_leaves_one_terminal() {
        let inst = two_terminal_instance();
        let comps = enumerate_components(&inst, 2).unwrap();
        let next = contract_component(&inst, &comps[0]).unwrap();
        assert_eq!(next.terminal_count(), 1);
        assert!(p1_p3_clean(&next));
    }

    #[test]
    fn contracting_pair_in_triple_keeps_two() {
        let inst = gen_path_family(3).unwrap();
        let comps = enumerate_components(&inst, 2).unwrap();
        // Pick a component covering the two terminals of Steiner node 0:
        // terminals 3 and 4 share Steiner 0, so cost 1.
        let comp = comps
            .iter()
            .find(|c| c.terminals == vec![3, 4])
            .expect("pair component exists");
        let next = contract_component(&inst, comp).unwrap();
        assert!(next.terminal_count() < inst.terminal_count());
        assert!(p1_p3_clean(&next));
    }

    #[test]
    fn contraction_errors_on_foreign_component() {
        let inst = two_terminal_instance();
        let foreign = Component {
            terminals: vec![0, 99],
            sink: 0,
            steiner: vec![],
            edges: vec![],
        };
        assert!(contract_component(&inst, &foreign).is_err());
    }

    #[test]
    fn random_contractions_preserve_instance_properties() {
        let mut rng = Rng::new(2718);
        for _ in 0..30 {
            let n = rng.next_range(2, 6);
            let inst =
                gen_random_tree_instance(n, rng.next_u64(), TerminalProfile::default()).unwrap();
            let mut current = inst;
            while current.terminal_count() > 1 {
                let lp = solve_lp(&current, 3, None).unwrap();
                let comp = sample_component(&lp, &mut rng).unwrap().clone();
                current = contract_component(&current, &comp).unwrap();
                assert!(
                    p1_p3_clean(&current),
                    "contraction broke terminal independence or cliqued neighborhoods"
                );
            }
        }
    }

    #[test]
    fn single_shared_steiner_solved_in_one_iteration() {
        let inst = two_terminal_instance();
        let out = iterative_rounding(&inst, 2, 7).unwrap();
        assert_eq!(out.steiner, BTreeSet::from([2]));
        assert_eq!(out.log.len(), 1);
    }

    #[test]
    fn rounding_output_is_feasible_and_at_least_opt() {
        let inst = gen_path_family(3).unwrap();
        let opt = brute_force_opt(&inst).unwrap().cost();
        for seed in 0..10u64 {
            let out = iterative_rounding(&inst, 3, seed).unwrap();
            assert!(inst.connects_terminals(&out.steiner), "seed {seed}");
            assert!(out.steiner.len() >= opt);
        }
    }

    #[test]
    fn rounding_deterministic_given_seed() {
        let inst = gen_path_family(4).unwrap();
        let a = iterative_rounding(&inst, 2, 123).unwrap();
        let b = iterative_rounding(&inst, 2, 123).unwrap();
        assert_eq!(a.steiner, b.steiner);
        assert_eq!(a.log.len(), b.log.len());
    }
}
