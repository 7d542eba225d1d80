use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{invalid, Result};
use crate::graph::{NodeId, UndirGraph};

/// An unordered candidate link, stored normalized (small id first).
pub type Link = (NodeId, NodeId);

pub fn norm_link(u: NodeId, v: NodeId) -> Link {
    (u.min(v), u.max(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkWeight {
    Zero,
    One,
}

/// A set of candidate links over a base graph, each in weight class {0, 1}.
/// Links may duplicate existing graph edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkSet {
    links: Vec<Link>,
    weights: Vec<LinkWeight>,
}

impl LinkSet {
    pub fn new(links: impl IntoIterator<Item = Link>) -> Self {
        let links: Vec<Link> = links.into_iter().map(|(u, v)| norm_link(u, v)).collect();
        let weights = vec![LinkWeight::One; links.len()];
        LinkSet { links, weights }
    }

    pub fn push(&mut self, link: Link, weight: LinkWeight) {
        self.links.push(norm_link(link.0, link.1));
        self.weights.push(weight);
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn weight(&self, i: usize) -> LinkWeight {
        self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Link, LinkWeight)> + '_ {
        self.links.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn ones(&self) -> impl Iterator<Item = Link> + '_ {
        self.iter()
            .filter(|(_, w)| *w == LinkWeight::One)
            .map(|(l, _)| l)
    }

    pub fn zeros(&self) -> impl Iterator<Item = Link> + '_ {
        self.iter()
            .filter(|(_, w)| *w == LinkWeight::Zero)
            .map(|(l, _)| l)
    }

    pub fn validate_against(&self, g: &UndirGraph) -> Result<()> {
        for &(u, v) in &self.links {
            if u >= g.node_count() || v >= g.node_count() {
                return Err(invalid(format!("link ({u},{v}) outside graph")));
            }
            if u == v {
                return Err(invalid(format!("degenerate link at node {u}")));
            }
        }
        Ok(())
    }
}

impl FromIterator<Link> for LinkSet {
    fn from_iter<T: IntoIterator<Item = Link>>(iter: T) -> Self {
        LinkSet::new(iter)
    }
}

/// A node Steiner tree instance with the structural properties produced by
/// the connectivity-augmentation reductions: terminals are pairwise
/// non-adjacent, each Steiner node sees at most two terminals, and every
/// terminal's neighborhood is a clique.
#[derive(Clone, Debug)]
pub struct CaInstance {
    pub graph: UndirGraph,
    pub terminals: BTreeSet<NodeId>,
    /// Steiner node -> original link it came from, when the instance was
    /// produced by a reduction. Synthetic instances leave it empty.
    pub back_map: BTreeMap<NodeId, Link>,
    /// Provenance of each node id in the instance this one was derived
    /// from by contraction; identity for freshly built instances.
    pub origin: Vec<NodeId>,
}

impl CaInstance {
    pub fn new(graph: UndirGraph, terminals: BTreeSet<NodeId>) -> Self {
        let n = graph.node_count();
        CaInstance {
            graph,
            terminals,
            back_map: BTreeMap::new(),
            origin: (0..n).collect(),
        }
    }

    pub fn is_terminal(&self, u: NodeId) -> bool {
        self.terminals.contains(&u)
    }

    pub fn steiner_nodes(&self) -> Vec<NodeId> {
        (0..self.graph.node_count())
            .filter(|u| !self.terminals.contains(u))
            .collect()
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals.len()
    }

    pub fn steiner_count(&self) -> usize {
        self.graph.node_count() - self.terminals.len()
    }

    /// Do the chosen Steiner nodes connect every terminal? Runs a BFS over
    /// the subgraph induced by terminals plus `chosen`.
    pub fn connects_terminals(&self, chosen: &BTreeSet<NodeId>) -> bool {
        let mut terminals = self.terminals.iter();
        let Some(&start) = terminals.next() else {
            return true;
        };
        let n = self.graph.node_count();
        let active = |u: NodeId| self.terminals.contains(&u) || chosen.contains(&u);
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in self.graph.neighbors(u) {
                if !seen[v] && active(v) {
                    seen[v] = true;
                    if self.terminals.contains(&v) {
                        reached += 1;
                    }
                    queue.push_back(v);
                }
            }
        }
        reached == self.terminals.len()
    }

    /// Interpret a tree-shaped instance as its own (unique) optimal solution.
    pub fn as_tree_solution(&self) -> Result<SteinerTree> {
        let g = &self.graph;
        if g.edge_count() != g.node_count().saturating_sub(1) || !g.is_connected() {
            return Err(invalid("instance graph is not a tree"));
        }
        Ok(SteinerTree {
            terminals: self.terminals.clone(),
            steiner: self.steiner_nodes().into_iter().collect(),
            edges: g.edges(),
        })
    }
}

/// One violation of the three structural properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaViolation {
    TerminalAdjacentTerminal(NodeId, NodeId),
    SteinerSeesTooManyTerminals(NodeId, usize),
    TerminalNeighborhoodNotClique(NodeId, NodeId, NodeId),
}

/// Report-style validation; an empty list means the instance is clean.
pub fn validate_ca_instance(inst: &CaInstance) -> Vec<CaViolation> {
    let mut out = Vec::new();
    let g = &inst.graph;
    for &t in &inst.terminals {
        for &v in g.neighbors(t) {
            if inst.terminals.contains(&v) && t < v {
                out.push(CaViolation::TerminalAdjacentTerminal(t, v));
            }
        }
    }
    for s in inst.steiner_nodes() {
        let count = g
            .neighbors(s)
            .iter()
            .filter(|v| inst.terminals.contains(v))
            .count();
        if count > 2 {
            out.push(CaViolation::SteinerSeesTooManyTerminals(s, count));
        }
    }
    for &t in &inst.terminals {
        let nb = g.neighbors(t);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if !g.has_edge(nb[i], nb[j]) {
                    out.push(CaViolation::TerminalNeighborhoodNotClique(t, nb[i], nb[j]));
                }
            }
        }
    }
    out
}

/// A feasible solution: tree spanning the terminals, cost = |steiner|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    pub terminals: BTreeSet<NodeId>,
    pub steiner: BTreeSet<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl SteinerTree {
    pub fn cost(&self) -> usize {
        self.steiner.len()
    }

    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.terminals.union(&self.steiner).copied().collect()
    }

    /// Adjacency map over the tree's own nodes.
    pub fn adjacency(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for n in self.nodes() {
            adj.insert(n, Vec::new());
        }
        for &(u, v) in &self.edges {
            adj.get_mut(&u).unwrap().push(v);
            adj.get_mut(&v).unwrap().push(u);
        }
        for nb in adj.values_mut() {
            nb.sort_unstable();
        }
        adj
    }

    /// Check tree shape and terminal coverage against an instance.
    pub fn validate(&self, inst: &CaInstance) -> Result<()> {
        if self.terminals != inst.terminals {
            return Err(invalid("solution terminal set differs from instance"));
        }
        let nodes = self.nodes();
        if self.edges.len() + 1 != nodes.len() {
            return Err(invalid("solution edge count is not |nodes| - 1"));
        }
        for &(u, v) in &self.edges {
            if !inst.graph.has_edge(u, v) {
                return Err(invalid(format!("solution edge ({u},{v}) missing from instance")));
            }
            if !nodes.contains(&u) || !nodes.contains(&v) {
                return Err(invalid("solution edge endpoint outside node set"));
            }
        }
        // Connectivity via union-find over the tree nodes.
        let index: BTreeMap<NodeId, usize> = nodes.iter().copied().zip(0..).collect();
        let mut dsu = Dsu::new(nodes.len());
        for &(u, v) in &self.edges {
            dsu.union(index[&u], index[&v]);
        }
        let mut roots: BTreeSet<usize> = BTreeSet::new();
        for i in 0..nodes.len() {
            roots.insert(dsu.find(i));
        }
        if roots.len() != 1 {
            return Err(invalid("solution is not connected"));
        }
        Ok(())
    }
}

/// Small union-find used across the crate.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_instance() -> CaInstance {
        // Two terminals sharing one Steiner node.
        let mut g = UndirGraph::new(3);
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 2).unwrap();
        CaInstance::new(g, BTreeSet::from([0, 1]))
    }

    #[test]
    fn clean_instance_validates_empty() {
        assert!(validate_ca_instance(&small_instance()).is_empty());
    }

    #[test]
    fn terminal_terminal_edge_reported() {
        let mut inst = small_instance();
        inst.graph.add_edge(0, 1).unwrap();
        let report = validate_ca_instance(&inst);
        assert!(report.contains(&CaViolation::TerminalAdjacentTerminal(0, 1)));
    }

    #[test]
    fn steiner_with_three_terminals_reported() {
        let mut g = UndirGraph::new(4);
        g.add_edge(0, 3).unwrap();
        g.add_edge(1, 3).unwrap();
        g.add_edge(2, 3).unwrap();
        let inst = CaInstance::new(g, BTreeSet::from([0, 1, 2]));
        let report = validate_ca_instance(&inst);
        assert!(report.contains(&CaViolation::SteinerSeesTooManyTerminals(3, 3)));
    }

    #[test]
    fn non_clique_neighborhood_reported() {
        // Terminal 0 adjacent to Steiner 1 and 2 which are not adjacent.
        let mut g = UndirGraph::new(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 2).unwrap();
        let inst = CaInstance::new(g, BTreeSet::from([0]));
        let report = validate_ca_instance(&inst);
        assert!(report.contains(&CaViolation::TerminalNeighborhoodNotClique(0, 1, 2)));
    }

    #[test]
    fn connects_terminals_requires_chosen_steiner() {
        let inst = small_instance();
        assert!(!inst.connects_terminals(&BTreeSet::new()));
        assert!(inst.connects_terminals(&BTreeSet::from([2])));
    }

    #[test]
    fn tree_solution_roundtrip() {
        let inst = small_instance();
        let sol = inst.as_tree_solution().unwrap();
        assert_eq!(sol.cost(), 1);
        sol.validate(&inst).unwrap();
    }
}
