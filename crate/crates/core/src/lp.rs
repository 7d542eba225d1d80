use std::collections::BTreeSet;

use num_rational::BigRational;

use crate::error::{cap as cap_err, infeasible, internal, invalid, Result};
use crate::graph::NodeId;
use crate::instance::CaInstance;
use crate::maxflow::FlowNetwork;
use crate::rng::Rng;
use crate::simplex::{solve_min, LpNum};
use crate::steiner::{enumerate_components, Component};

pub const SEPARATION_TOL: f64 = 1e-7;
pub const CUT_ITERATION_CAP: usize = 10_000;
pub const EXACT_COMPONENT_CAP: usize = 200;

/// State of the directed-components cut-covering relaxation: one variable
/// per (terminal subset, sink) component, one covering constraint per
/// active terminal cut.
#[derive(Clone, Debug)]
pub struct DcrLp {
    pub components: Vec<Component>,
    pub root: NodeId,
    pub x: Vec<f64>,
    pub active_cuts: Vec<BTreeSet<NodeId>>,
    pub objective: f64,
}

impl DcrLp {
    pub fn sum_x(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// A terminal subset whose covering constraint the current x violates.
#[derive(Clone, Debug)]
pub struct CutViolation {
    pub cut: BTreeSet<NodeId>,
    pub lhs: f64,
    pub witness: NodeId,
}

/// Does component c cross cut U: sink outside U, some source inside U.
pub fn component_crosses(c: &Component, cut: &BTreeSet<NodeId>) -> bool {
    !cut.contains(&c.sink) && c.sources().any(|s| cut.contains(&s))
}

/// Exact covering mass on a cut.
pub fn cut_lhs(components: &[Component], x: &[f64], cut: &BTreeSet<NodeId>) -> f64 {
    components
        .iter()
        .zip(x)
        .filter(|(c, _)| component_crosses(c, cut))
        .map(|(_, &v)| v)
        .sum()
}

/// Max-flow separation: for each terminal t (ascending, skipping the root)
/// route one unit from t to the root through component nodes; a flow below
/// 1 - tol yields the residual-side cut as a violated constraint.
pub fn separate(
    components: &[Component],
    x: &[f64],
    root: NodeId,
    terminals: &BTreeSet<NodeId>,
    tol: f64,
) -> Option<CutViolation> {
    debug_assert_eq!(components.len(), x.len());
    let terms: Vec<NodeId> = terminals.iter().copied().collect();
    let t_index: std::collections::BTreeMap<NodeId, usize> =
        terms.iter().copied().zip(0..).collect();
    let base = terms.len();
    let infinite: f64 = x.iter().sum::<f64>() + 1.0;

    for &t in &terms {
        if t == root {
            continue;
        }
        let mut net = FlowNetwork::new(base + components.len());
        for (ci, c) in components.iter().enumerate() {
            let cnode = base + ci;
            for s in c.sources() {
                net.add_arc(t_index[&s], cnode, infinite);
            }
            net.add_arc(cnode, t_index[&c.sink], x[ci]);
        }
        let flow = net.max_flow(t_index[&t], t_index[&root]);
        if flow < 1.0 - tol {
            let reach = net.residual_reachable(t_index[&t]);
            let cut: BTreeSet<NodeId> = terms
                .iter()
                .enumerate()
                .filter(|(i, _)| reach[*i])
                .map(|(_, &u)| u)
                .collect();
            debug_assert!(!cut.contains(&root));
            debug_assert!(cut.contains(&t));
            let lhs = cut_lhs(components, x, &cut);
            return Some(CutViolation {
                cut,
                lhs,
                witness: t,
            });
        }
    }
    None
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_cuts: usize,
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..SolveOptions::default()
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: SEPARATION_TOL,
            max_cuts: CUT_ITERATION_CAP,
        }
    }
}

/// Cutting-plane solve: start from the singleton cuts, resolve the
/// restricted program with the dense simplex, and add violated cuts from
/// the flow oracle until none remain.
pub fn solve_lp(inst: &CaInstance, k: usize, root: Option<NodeId>) -> Result<DcrLp> {
    solve_lp_with(inst, k, root, SolveOptions::default())
}

pub fn solve_lp_with(
    inst: &CaInstance,
    k: usize,
    root: Option<NodeId>,
    opts: SolveOptions,
) -> Result<DcrLp> {
    let root = match root {
        Some(r) => {
            if !inst.terminals.contains(&r) {
                return Err(invalid(format!("root {r} is not a terminal")));
            }
            r
        }
        None => *inst
            .terminals
            .iter()
            .next()
            .ok_or_else(|| invalid("instance has no terminals"))?,
    };
    let components = enumerate_components(inst, k)?;
    solve_lp_over_components(components, &inst.terminals, root, opts)
}

/// Cutting-plane solve over an explicit column set.
pub fn solve_lp_over_components(
    components: Vec<Component>,
    terminals: &BTreeSet<NodeId>,
    root: NodeId,
    opts: SolveOptions,
) -> Result<DcrLp> {
    if terminals.len() > 1 {
        for &t in terminals {
            if !components.iter().any(|c| c.terminals.contains(&t)) {
                return Err(infeasible(format!("terminal {t} appears in no component")));
            }
        }
    }

    let mut cuts: Vec<BTreeSet<NodeId>> = terminals
        .iter()
        .filter(|&&t| t != root)
        .map(|&t| BTreeSet::from([t]))
        .collect();
    let costs: Vec<f64> = components.iter().map(|c| c.cost() as f64).collect();

    let mut last_obj = f64::NEG_INFINITY;
    loop {
        if cuts.len() > opts.max_cuts {
            return Err(cap_err(format!("cutting-plane loop exceeded {} cuts", opts.max_cuts)));
        }
        let a: Vec<Vec<f64>> = cuts
            .iter()
            .map(|cut| {
                components
                    .iter()
                    .map(|c| if component_crosses(c, cut) { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let b = vec![1.0; cuts.len()];
        let sol = solve_min::<f64>(&a, &b, &costs)
            .map_err(|e| infeasible(format!("restricted program failed: {e}")))?;
        // Adding cuts can only push the restricted optimum up.
        debug_assert!(sol.objective >= last_obj - 1e-6);
        last_obj = last_obj.max(sol.objective);

        match separate(&components, &sol.x, root, terminals, opts.tol) {
            None => {
                return Ok(DcrLp {
                    components,
                    root,
                    x: sol.x,
                    active_cuts: cuts,
                    objective: sol.objective,
                });
            }
            Some(violation) => {
                if cuts.contains(&violation.cut) {
                    return Err(internal(
                        "separation returned an already-active cut; numeric trouble",
                    ));
                }
                cuts.push(violation.cut);
            }
        }
    }
}

/// Exact-rational restricted solve over the final active cut set of a float
/// run, for bit-stable golden values on small component sets.
pub fn solve_lp_exact(inst: &CaInstance, k: usize, root: Option<NodeId>) -> Result<(DcrLp, BigRational)> {
    let lp = solve_lp(inst, k, root)?;
    if lp.components.len() > EXACT_COMPONENT_CAP {
        return Err(cap_err(format!(
            "exact mode limited to {EXACT_COMPONENT_CAP} components, got {}",
            lp.components.len()
        )));
    }
    let a: Vec<Vec<BigRational>> = lp
        .active_cuts
        .iter()
        .map(|cut| {
            lp.components
                .iter()
                .map(|c| {
                    if component_crosses(c, cut) {
                        <BigRational as LpNum>::one()
                    } else {
                        <BigRational as LpNum>::zero()
                    }
                })
                .collect()
        })
        .collect();
    let b: Vec<BigRational> = vec![<BigRational as LpNum>::one(); lp.active_cuts.len()];
    let c: Vec<BigRational> = lp
        .components
        .iter()
        .map(|c| <BigRational as LpNum>::from_usize(c.cost()))
        .collect();
    let sol = solve_min::<BigRational>(&a, &b, &c)?;
    Ok((lp, sol.objective))
}

/// Draw a component with probability x(C) / sum(x).
pub fn sample_component<'a>(lp: &'a DcrLp, rng: &mut Rng) -> Result<&'a Component> {
    let total = lp.sum_x();
    if total <= 0.0 {
        return Err(invalid("cannot sample from an all-zero solution"));
    }
    let mut target = rng.next_f64() * total;
    let mut last = None;
    for (c, &v) in lp.components.iter().zip(&lp.x) {
        if v <= 0.0 {
            continue;
        }
        last = Some(c);
        if target < v {
            return Ok(c);
        }
        target -= v;
    }
    last.ok_or_else(|| internal("positive mass but no positive component"))
}
