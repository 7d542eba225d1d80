use std::collections::VecDeque;

use crate::error::{invalid, Result};

pub type NodeId = usize;

/// Simple undirected graph over dense integer node ids with opaque string
/// labels. No self-loops, no parallel edges; adjacency lists kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirGraph {
    labels: Vec<String>,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl UndirGraph {
    pub fn new(n: usize) -> Self {
        UndirGraph {
            labels: (0..n).map(|i| format!("n{i}")).collect(),
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        UndirGraph {
            labels,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut g = UndirGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u]
    }

    pub fn set_label(&mut self, u: NodeId, label: impl Into<String>) {
        self.labels[u] = label.into();
    }

    pub fn find_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Insert an edge; duplicates are ignored. Returns whether it was new.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(invalid(format!("edge ({u},{v}) outside node range 0..{n}")));
        }
        if u == v {
            return Err(invalid(format!("self-loop at node {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos_u) => {
                self.adj[u].insert(pos_u, v);
                let pos_v = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos_v, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Edges as normalized (u < v) pairs in sorted order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Connected components after deleting `removed` (if any).
    pub fn components_without(&self, removed: Option<NodeId>) -> Vec<Vec<NodeId>> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        if let Some(r) = removed {
            seen[r] = true;
        }
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Articulation points via iterative lowlink DFS.
    pub fn articulation_points(&self) -> Vec<NodeId> {
        let n = self.adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut parent = vec![usize::MAX; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0usize;

        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            let mut root_children = 0usize;
            // Stack of (node, next neighbor index).
            let mut stack = vec![(root, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
                if *idx < self.adj[u].len() {
                    let v = self.adj[u][*idx];
                    *idx += 1;
                    if disc[v] == usize::MAX {
                        parent[v] = u;
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((v, 0));
                    } else if v != parent[u] {
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if p != root && low[u] >= disc[p] {
                            is_cut[p] = true;
                        }
                    }
                }
            }
            if root_children >= 2 {
                is_cut[root] = true;
            }
        }
        (0..n).filter(|&u| is_cut[u]).collect()
    }

    /// Biconnected components as node sets. A bridge forms a 2-node block;
    /// an isolated node forms a 1-node block.
    pub fn blocks(&self) -> Vec<Vec<NodeId>> {
        let n = self.adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut parent = vec![usize::MAX; n];
        let mut timer = 0usize;
        let mut edge_stack: Vec<(NodeId, NodeId)> = Vec::new();
        let mut blocks = Vec::new();

        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            if self.adj[root].is_empty() {
                blocks.push(vec![root]);
                disc[root] = timer;
                timer += 1;
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
                if *idx < self.adj[u].len() {
                    let v = self.adj[u][*idx];
                    *idx += 1;
                    if disc[v] == usize::MAX {
                        edge_stack.push((u, v));
                        parent[v] = u;
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        stack.push((v, 0));
                    } else if v != parent[u] && disc[v] < disc[u] {
                        edge_stack.push((u, v));
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] >= disc[p] {
                            // Pop the block hanging below the (p, u) tree edge.
                            let mut members = Vec::new();
                            while let Some(&(a, b)) = edge_stack.last() {
                                edge_stack.pop();
                                members.push(a);
                                members.push(b);
                                if (a, b) == (p, u) {
                                    break;
                                }
                            }
                            members.sort_unstable();
                            members.dedup();
                            blocks.push(members);
                        }
                    }
                }
            }
        }
        blocks.sort();
        blocks
    }

    /// True iff the graph is connected and has no cut node. Graphs with
    /// fewer than 3 nodes are reported not 2-node-connected by convention.
    pub fn is_two_node_connected(&self) -> bool {
        self.node_count() >= 3 && self.is_connected() && self.articulation_points().is_empty()
    }

    /// True iff connected and every edge lies on exactly one simple cycle,
    /// i.e. every block is a cycle.
    pub fn is_cactus(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        for block in self.blocks() {
            if block.len() < 3 {
                if block.len() == 2 {
                    return false; // bridge: edge on no cycle
                }
                continue; // isolated node: no edges to violate
            }
            let internal_edges: usize = block
                .iter()
                .map(|&u| {
                    self.adj[u]
                        .iter()
                        .filter(|v| block.binary_search(v).is_ok())
                        .count()
                })
                .sum::<usize>()
                / 2;
            if internal_edges != block.len() {
                return false;
            }
        }
        true
    }
}

/// One node of a block-cut tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BcNode {
    /// A cut node of the original graph, carrying its original id.
    Cut(NodeId),
    /// A maximal 2-node-connected block, carrying its sorted member set.
    Block(Vec<NodeId>),
}

/// Block-cut tree of a connected graph, with the node map f_G from
/// original ids to block-cut node ids.
#[derive(Clone, Debug)]
pub struct BlockCutTree {
    pub nodes: Vec<BcNode>,
    pub tree: UndirGraph,
    /// f_G: cut nodes map to their Cut node, every other node to its
    /// unique block.
    pub node_map: Vec<NodeId>,
}

impl BlockCutTree {
    pub fn cut_nodes(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            BcNode::Cut(orig) => Some((i, *orig)),
            BcNode::Block(_) => None,
        })
    }

    pub fn is_leaf_block(&self, bc_id: NodeId) -> bool {
        matches!(self.nodes[bc_id], BcNode::Block(_)) && self.tree.degree(bc_id) <= 1
    }
}

/// Block-cut tree of a connected graph: one node per maximal 2-node-connected
/// block, one per cut node, with (c, B) adjacent iff c belongs to B.
pub fn block_cut_tree(g: &UndirGraph) -> Result<BlockCutTree> {
    if !g.is_connected() {
        return Err(invalid("block-cut tree requires a connected graph"));
    }
    let cuts = g.articulation_points();
    let mut is_cut = vec![false; g.node_count()];
    for &c in &cuts {
        is_cut[c] = true;
    }
    let blocks = g.blocks();

    let mut nodes = Vec::new();
    let mut node_map = vec![usize::MAX; g.node_count()];
    for &c in &cuts {
        node_map[c] = nodes.len();
        nodes.push(BcNode::Cut(c));
    }
    let mut edges = Vec::new();
    for block in &blocks {
        let block_id = nodes.len();
        nodes.push(BcNode::Block(block.clone()));
        for &u in block {
            if is_cut[u] {
                edges.push((node_map[u], block_id));
            } else {
                node_map[u] = block_id;
            }
        }
    }
    let n = nodes.len();
    let mut labels = Vec::with_capacity(n);
    for node in &nodes {
        match node {
            BcNode::Cut(c) => labels.push(format!("c{c}")),
            BcNode::Block(members) => labels.push(format!(
                "B{{{}}}",
                members
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )),
        }
    }
    let mut tree = UndirGraph::with_labels(labels);
    for (a, b) in edges {
        tree.add_edge(a, b)?;
    }
    if tree.node_count() > 0 && tree.edge_count() != tree.node_count() - 1 {
        return Err(crate::error::internal("block-cut graph is not a tree"));
    }
    Ok(BlockCutTree {
        nodes,
        tree,
        node_map,
    })
}

/// A tree: connected graph with |E| = |V| - 1, optionally rooted.
#[derive(Clone, Debug)]
pub struct Tree {
    graph: UndirGraph,
    root: Option<NodeId>,
    parent: Vec<Option<NodeId>>,
}

impl Tree {
    pub fn from_graph(graph: UndirGraph) -> Result<Self> {
        if graph.node_count() == 0 {
            return Err(invalid("empty tree"));
        }
        if graph.edge_count() != graph.node_count() - 1 || !graph.is_connected() {
            return Err(invalid("graph is not a tree"));
        }
        let n = graph.node_count();
        Ok(Tree {
            graph,
            root: None,
            parent: vec![None; n],
        })
    }

    pub fn graph(&self) -> &UndirGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn parent(&self, u: NodeId) -> Option<NodeId> {
        self.parent[u]
    }

    pub fn root_at(&mut self, root: NodeId) {
        let n = self.graph.node_count();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in self.graph.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        self.root = Some(root);
        self.parent = parent;
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.graph.node_count())
            .filter(|&u| self.graph.degree(u) == 1)
            .collect()
    }

    /// Edges incident to a leaf node.
    pub fn leaf_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.graph
            .edges()
            .into_iter()
            .filter(|&(u, v)| self.graph.degree(u) == 1 || self.graph.degree(v) == 1)
            .collect()
    }

    /// The unique u-v node sequence including both endpoints.
    pub fn path(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        tree_path(&self.graph, u, v)
    }
}

/// Unique path between u and v in a tree-shaped graph, endpoints included.
pub fn tree_path(g: &UndirGraph, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    if u >= n || v >= n {
        return Err(invalid(format!("path endpoint outside node range ({u},{v})")));
    }
    if u == v {
        return Ok(vec![u]);
    }
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &y in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if !seen[v] {
        return Err(invalid(format!("nodes {u} and {v} are not connected")));
    }
    let mut path = vec![v];
    let mut cur = v;
    while cur != u {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    Ok(path)
}

/// Decode a Pruefer sequence over nodes 0..n into the edge list of the
/// corresponding labeled tree. The empty sequence with n = 2 gives the
/// single edge (0, 1).
pub fn prufer_decode(seq: &[usize], n: usize) -> Result<Vec<(NodeId, NodeId)>> {
    if n < 2 {
        return Err(invalid("Pruefer decoding needs at least 2 nodes"));
    }
    if seq.len() != n - 2 {
        return Err(invalid("Pruefer sequence length must be n - 2"));
    }
    let mut degree = vec![1usize; n];
    for &s in seq {
        if s >= n {
            return Err(invalid("Pruefer symbol out of range"));
        }
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    // Min-leaf extraction with a moving pointer; standard O(n log n)-free trick.
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &s in seq {
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 && s < ptr {
            leaf = s;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
    Ok(edges)
}
