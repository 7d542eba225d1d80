use std::collections::BTreeSet;

use crate::error::{internal, invalid, Result};
use crate::graph::{prufer_decode, UndirGraph};
use crate::instance::{CaInstance, Link, LinkSet};
use crate::reductions::{verify_augmentation, AugmentationMode};
use crate::rng::Rng;

/// Terminal attachment probabilities for random tree instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerminalProfile {
    /// Probability a tree leaf gets 2 terminals (otherwise 1).
    pub leaf_two: f64,
    /// Probabilities an internal node gets 0 / 1 / 2 terminals.
    pub internal: [f64; 3],
}

impl Default for TerminalProfile {
    fn default() -> Self {
        TerminalProfile {
            leaf_two: 0.5,
            internal: [0.6, 0.3, 0.1],
        }
    }
}

impl TerminalProfile {
    /// Every Steiner node gets at least one terminal.
    pub fn leaf_adjacent() -> Self {
        TerminalProfile {
            leaf_two: 0.5,
            internal: [0.0, 0.7, 0.3],
        }
    }
}

/// Reproducible instance recipes; identical spec gives identical output.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    PathFamily { t: usize },
    FiveLayer,
    RandomTree { n_steiner: usize, seed: u64, profile: TerminalProfile },
    RandomLeafAdjacent { n_steiner: usize, seed: u64 },
    RandomBlockTap { n_nodes: usize, n_links: usize, seed: u64 },
    RandomOneNodeCap { n_nodes: usize, n_links: usize, seed: u64 },
    RandomCacap { n_cycles: usize, max_cycle_len: usize, n_links: usize, seed: u64 },
}

/// t Steiner nodes in a path, two private terminals each. The instance is
/// its own unique optimal tree.
pub fn gen_path_family(t: usize) -> Result<CaInstance> {
    if t < 2 {
        return Err(invalid("path family requires t >= 2"));
    }
    let mut labels: Vec<String> = (1..=t).map(|i| format!("s{i}")).collect();
    for i in 1..=t {
        labels.push(format!("r{i}a"));
        labels.push(format!("r{i}b"));
    }
    let mut g = UndirGraph::with_labels(labels);
    for i in 0..t - 1 {
        g.add_edge(i, i + 1)?;
    }
    let mut terminals = BTreeSet::new();
    for i in 0..t {
        let a = t + 2 * i;
        let b = t + 2 * i + 1;
        g.add_edge(i, a)?;
        g.add_edge(i, b)?;
        terminals.insert(a);
        terminals.insert(b);
    }
    Ok(CaInstance::new(g, terminals))
}

/// Path family sized for a target accuracy: t = ceil(2 / (3 eps)) + 1.
pub fn path_family_size_for_eps(eps: f64) -> Result<usize> {
    if eps <= 0.0 {
        return Err(invalid("eps must be positive"));
    }
    Ok((2.0 / (3.0 * eps)).ceil() as usize + 1)
}

/// The five-layer tree: a root of 9 subtrees, each a fan of 5 nodes with 4
/// children apiece, every bottom node carrying two terminals. 235 Steiner
/// nodes, 360 terminals. Node ids follow layer-major lexicographic index
/// order, so ascending id equals lexicographic leaf order.
pub fn gen_five_layer() -> CaInstance {
    let mut labels = vec!["r".to_string()];
    for i in 1..=9 {
        labels.push(format!("x{i}"));
    }
    for i in 1..=9 {
        for j in 1..=5 {
            labels.push(format!("y{i}.{j}"));
        }
    }
    for i in 1..=9 {
        for j in 1..=5 {
            for k in 1..=4 {
                labels.push(format!("z{i}.{j}.{k}"));
            }
        }
    }
    for i in 1..=9 {
        for j in 1..=5 {
            for k in 1..=4 {
                labels.push(format!("q{i}.{j}.{k}.a"));
                labels.push(format!("q{i}.{j}.{k}.b"));
            }
        }
    }
    let x = |i: usize| i; // i in 1..=9
    let y = |i: usize, j: usize| 10 + (i - 1) * 5 + (j - 1);
    let z = |i: usize, j: usize, k: usize| 55 + (i - 1) * 20 + (j - 1) * 4 + (k - 1);
    let q = |i: usize, j: usize, k: usize, c: usize| 235 + 2 * ((i - 1) * 20 + (j - 1) * 4 + (k - 1)) + c;

    let mut g = UndirGraph::with_labels(labels);
    let mut terminals = BTreeSet::new();
    for i in 1..=9 {
        g.add_edge(0, x(i)).unwrap();
        for j in 1..=5 {
            g.add_edge(x(i), y(i, j)).unwrap();
            for k in 1..=4 {
                g.add_edge(y(i, j), z(i, j, k)).unwrap();
                for c in 0..2 {
                    g.add_edge(z(i, j, k), q(i, j, k, c)).unwrap();
                    terminals.insert(q(i, j, k, c));
                }
            }
        }
    }
    debug_assert_eq!(g.node_count(), 235 + 360);
    CaInstance::new(g, terminals)
}

/// Random Steiner tree with terminals attached by profile. Every tree leaf
/// receives at least one terminal, so the whole tree is the unique optimum.
pub fn gen_random_tree_instance(
    n_steiner: usize,
    seed: u64,
    profile: TerminalProfile,
) -> Result<CaInstance> {
    if n_steiner == 0 {
        return Err(invalid("need at least one Steiner node"));
    }
    let mut rng = Rng::new(seed);
    let tree_edges = if n_steiner >= 2 {
        let seq: Vec<usize> = (0..n_steiner.saturating_sub(2))
            .map(|_| rng.next_below(n_steiner))
            .collect();
        prufer_decode(&seq, n_steiner)?
    } else {
        Vec::new()
    };
    let mut degree = vec![0usize; n_steiner];
    for &(u, v) in &tree_edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    // Decide terminal counts first so the node count is known up front.
    let mut t_count = vec![0usize; n_steiner];
    for s in 0..n_steiner {
        t_count[s] = if n_steiner == 1 {
            2
        } else if degree[s] == 1 {
            if rng.next_bool(profile.leaf_two) {
                2
            } else {
                1
            }
        } else {
            let roll = rng.next_f64();
            if roll < profile.internal[0] {
                0
            } else if roll < profile.internal[0] + profile.internal[1] {
                1
            } else {
                2
            }
        };
    }
    let total_terms: usize = t_count.iter().sum();
    let mut labels: Vec<String> = (0..n_steiner).map(|s| format!("s{s}")).collect();
    for t in 0..total_terms {
        labels.push(format!("r{t}"));
    }
    let mut g = UndirGraph::with_labels(labels);
    for (u, v) in tree_edges {
        g.add_edge(u, v)?;
    }
    let mut terminals = BTreeSet::new();
    let mut next = n_steiner;
    for s in 0..n_steiner {
        for _ in 0..t_count[s] {
            g.add_edge(s, next)?;
            terminals.insert(next);
            next += 1;
        }
    }
    Ok(CaInstance::new(g, terminals))
}

/// Random tree instance where every Steiner node is adjacent to a terminal.
pub fn gen_random_leaf_adjacent(n_steiner: usize, seed: u64) -> Result<CaInstance> {
    gen_random_tree_instance(n_steiner, seed, TerminalProfile::leaf_adjacent())
}

/// Random connected graph plus a feasible link set: start from the full
/// complement closure, then thin in random order while feasibility holds.
pub fn gen_random_one_node_cap(
    n_nodes: usize,
    n_links: usize,
    seed: u64,
) -> Result<(UndirGraph, LinkSet)> {
    if n_nodes < 3 {
        return Err(invalid("1-node augmentation instances need >= 3 nodes"));
    }
    for attempt in 0..32u64 {
        let mut rng = Rng::new(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let mut g = UndirGraph::new(n_nodes);
        if n_nodes >= 2 {
            let seq: Vec<usize> = (0..n_nodes.saturating_sub(2))
                .map(|_| rng.next_below(n_nodes))
                .collect();
            for (u, v) in prufer_decode(&seq, n_nodes)? {
                g.add_edge(u, v)?;
            }
        }
        for _ in 0..rng.next_below(n_nodes / 2 + 1) {
            let u = rng.next_below(n_nodes);
            let v = rng.next_below(n_nodes);
            if u != v {
                g.add_edge(u, v)?;
            }
        }
        if g.is_two_node_connected() {
            continue; // want a nontrivial augmentation problem
        }
        if let Some(links) = thin_links(&g, n_links, AugmentationMode::Node, &mut rng) {
            return Ok((g, links));
        }
    }
    Err(internal("failed to generate a feasible instance within retry budget"))
}

/// Random tree plus a feasible link set for tree augmentation.
pub fn gen_random_block_tap(
    n_nodes: usize,
    n_links: usize,
    seed: u64,
) -> Result<(UndirGraph, LinkSet)> {
    if n_nodes < 3 {
        return Err(invalid("tree augmentation instances need >= 3 nodes"));
    }
    for attempt in 0..32u64 {
        let mut rng = Rng::new(seed.wrapping_add(attempt.wrapping_mul(0x51ed_2701)));
        let seq: Vec<usize> = (0..n_nodes.saturating_sub(2))
            .map(|_| rng.next_below(n_nodes))
            .collect();
        let mut g = UndirGraph::new(n_nodes);
        for (u, v) in prufer_decode(&seq, n_nodes)? {
            g.add_edge(u, v)?;
        }
        if let Some(links) = thin_links(&g, n_links, AugmentationMode::Node, &mut rng) {
            return Ok((g, links));
        }
    }
    Err(internal("failed to generate a feasible instance within retry budget"))
}

/// Random cactus (cycles glued at articulation nodes) plus a feasible link
/// set for cactus augmentation.
pub fn gen_random_cacap(
    n_cycles: usize,
    max_cycle_len: usize,
    n_links: usize,
    seed: u64,
) -> Result<(UndirGraph, LinkSet)> {
    if n_cycles == 0 || max_cycle_len < 3 {
        return Err(invalid("need at least one cycle of length >= 3"));
    }
    for attempt in 0..32u64 {
        let mut rng = Rng::new(seed.wrapping_add(attempt.wrapping_mul(0xc2b2_ae35)));
        // First cycle length >= 4 so the complement closure can reach
        // 3-edge-connectivity even when it is the only cycle.
        let first_len = rng.next_range(4.max(3), max_cycle_len.max(4));
        let mut edges: Vec<(usize, usize)> = (0..first_len)
            .map(|i| (i, (i + 1) % first_len))
            .collect();
        let mut n = first_len;
        for _ in 1..n_cycles {
            let len = rng.next_range(3, max_cycle_len);
            let glue = rng.next_below(n);
            // New cycle: glue, n, n+1, ..., n+len-2, back to glue.
            let fresh: Vec<usize> = (n..n + len - 1).collect();
            let mut prev = glue;
            for &f in &fresh {
                edges.push((prev, f));
                prev = f;
            }
            edges.push((prev, glue));
            n += len - 1;
        }
        let g = UndirGraph::from_edges(n, edges)?;
        debug_assert!(g.is_cactus());
        if let Some(links) = thin_links(&g, n_links, AugmentationMode::Edge, &mut rng) {
            return Ok((g, links));
        }
    }
    Err(internal("failed to generate a feasible instance within retry budget"))
}

/// Start from all complement pairs (guaranteed feasible for the modes we
/// generate), then drop links in random order while the remainder stays
/// feasible, aiming for the requested count.
fn thin_links(
    g: &UndirGraph,
    target: usize,
    mode: AugmentationMode,
    rng: &mut Rng,
) -> Option<LinkSet> {
    let n = g.node_count();
    let mut candidates: Vec<Link> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    if !verify_augmentation(g, &candidates, mode) {
        return None;
    }
    rng.shuffle(&mut candidates);
    let mut kept = candidates;
    let mut i = 0;
    while i < kept.len() {
        if kept.len() <= target {
            break;
        }
        let mut trial = kept.clone();
        trial.remove(i);
        if verify_augmentation(g, &trial, mode) {
            kept = trial;
        } else {
            i += 1;
        }
    }
    if kept.len() <= target {
        Some(LinkSet::new(kept))
    } else {
        None
    }
}

/// Materialize a generator spec.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedInstance> {
    match spec {
        GeneratorSpec::PathFamily { t } => Ok(GeneratedInstance::Ca(gen_path_family(*t)?)),
        GeneratorSpec::FiveLayer => Ok(GeneratedInstance::Ca(gen_five_layer())),
        GeneratorSpec::RandomTree { n_steiner, seed, profile } => Ok(GeneratedInstance::Ca(
            gen_random_tree_instance(*n_steiner, *seed, *profile)?,
        )),
        GeneratorSpec::RandomLeafAdjacent { n_steiner, seed } => Ok(GeneratedInstance::Ca(
            gen_random_leaf_adjacent(*n_steiner, *seed)?,
        )),
        GeneratorSpec::RandomBlockTap { n_nodes, n_links, seed } => {
            let (g, links) = gen_random_block_tap(*n_nodes, *n_links, *seed)?;
            Ok(GeneratedInstance::BlockTap(g, links))
        }
        GeneratorSpec::RandomOneNodeCap { n_nodes, n_links, seed } => {
            let (g, links) = gen_random_one_node_cap(*n_nodes, *n_links, *seed)?;
            Ok(GeneratedInstance::OneNodeCap(g, links))
        }
        GeneratorSpec::RandomCacap { n_cycles, max_cycle_len, n_links, seed } => {
            let (g, links) = gen_random_cacap(*n_cycles, *max_cycle_len, *n_links, *seed)?;
            Ok(GeneratedInstance::Cacap(g, links))
        }
    }
}

#[derive(Clone, Debug)]
pub enum GeneratedInstance {
    Ca(CaInstance),
    BlockTap(UndirGraph, LinkSet),
    OneNodeCap(UndirGraph, LinkSet),
    Cacap(UndirGraph, LinkSet),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_ca_instance;

    #[test]
    fn path_family_shape() {
        let inst = gen_path_family(3).unwrap();
        assert_eq!(inst.steiner_count(), 3);
        assert_eq!(inst.terminal_count(), 6);
        assert!(validate_ca_instance(&inst).is_empty());
        assert!(inst.as_tree_solution().is_ok());
        assert!(gen_path_family(1).is_err());
    }

    #[test]
    fn eps_sizing_matches_stated_example() {
        assert_eq!(path_family_size_for_eps(0.1).unwrap(), 8);
    }

    #[test]
    fn five_layer_counts_and_degrees() {
        let inst = gen_five_layer();
        assert_eq!(inst.steiner_count(), 235);
        assert_eq!(inst.terminal_count(), 360);
        assert!(validate_ca_instance(&inst).is_empty());
        let g = &inst.graph;
        assert_eq!(g.degree(0), 9); // root fans out to the x layer
        for i in 1..=9 {
            assert_eq!(g.degree(i), 6); // x: parent + 5 children
        }
        for y in 10..55 {
            assert_eq!(g.degree(y), 5); // y: parent + 4 children
        }
        for z in 55..235 {
            assert_eq!(g.degree(z), 3); // z: parent + 2 terminals
        }
        assert_eq!(g.find_label("z2.2.2"), Some(55 + 20 + 4 + 1));
    }

    #[test]
    fn random_tree_instances_are_valid_and_bit_stable() {
        for seed in 0..20u64 {
            let a = gen_random_tree_instance(7, seed, TerminalProfile::default()).unwrap();
            let b = gen_random_tree_instance(7, seed, TerminalProfile::default()).unwrap();
            assert_eq!(a.graph, b.graph);
            assert_eq!(a.terminals, b.terminals);
            assert!(validate_ca_instance(&a).is_empty());
            // Tree-shaped with every Steiner leaf carrying a terminal.
            assert!(a.as_tree_solution().is_ok());
        }
    }

    #[test]
    fn random_tree_instances_are_their_own_optimum() {
        use crate::steiner::brute_force_opt;
        for seed in 0..15u64 {
            let n = 1 + (seed as usize % 6);
            let inst = gen_random_tree_instance(n, seed, TerminalProfile::default()).unwrap();
            assert_eq!(brute_force_opt(&inst).unwrap().cost(), n, "seed {seed}");
        }
    }

    #[test]
    fn single_steiner_random_instance_has_two_terminals() {
        let inst = gen_random_tree_instance(1, 9, TerminalProfile::default()).unwrap();
        assert_eq!(inst.terminal_count(), 2);
    }

    #[test]
    fn leaf_adjacent_instances_touch_every_steiner() {
        for seed in 0..20u64 {
            let inst = gen_random_leaf_adjacent(10, seed).unwrap();
            for s in inst.steiner_nodes() {
                let has_term = inst
                    .graph
                    .neighbors(s)
                    .iter()
                    .any(|v| inst.terminals.contains(v));
                assert!(has_term, "Steiner {s} has no adjacent terminal");
            }
        }
    }

    #[test]
    fn one_node_cap_instances_feasible() {
        for seed in 0..25u64 {
            let (g, links) = gen_random_one_node_cap(8, 8, seed).unwrap();
            assert!(links.len() <= 8);
            assert!(verify_augmentation(&g, links.links(), AugmentationMode::Node));
            assert!(!g.is_two_node_connected());
        }
    }

    #[test]
    fn cacap_instances_feasible() {
        for seed in 0..25u64 {
            let (g, links) = gen_random_cacap(2, 5, 8, seed).unwrap();
            assert!(g.is_cactus());
            assert!(links.len() <= 8);
            assert!(verify_augmentation(&g, links.links(), AugmentationMode::Edge));
        }
    }

    #[test]
    fn generators_bit_stable_via_spec() {
        let spec = GeneratorSpec::RandomOneNodeCap { n_nodes: 7, n_links: 6, seed: 3 };
        let (a, b) = (generate(&spec).unwrap(), generate(&spec).unwrap());
        match (a, b) {
            (GeneratedInstance::OneNodeCap(g1, l1), GeneratedInstance::OneNodeCap(g2, l2)) => {
                assert_eq!(g1, g2);
                assert_eq!(l1, l2);
            }
            _ => panic!("unexpected variants"),
        }
    }
}
