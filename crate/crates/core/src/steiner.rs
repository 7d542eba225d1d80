use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use crate::error::{cap, infeasible, internal, invalid, Result};
use crate::graph::NodeId;
use crate::instance::{validate_ca_instance, CaInstance, Dsu, SteinerTree};

pub const EXACT_TERMINAL_CAP: usize = 10;
pub const ENUMERATION_TERMINAL_CAP: usize = 12;
pub const BRUTE_FORCE_STEINER_CAP: usize = 20;

/// A directed component: a minimum node Steiner tree over a terminal subset
/// with a designated sink terminal. The column object of the covering LP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted terminal subset R'.
    pub terminals: Vec<NodeId>,
    pub sink: NodeId,
    /// Sorted Steiner node set used by the tree.
    pub steiner: Vec<NodeId>,
    /// Tree edges over terminals + steiner.
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Component {
    pub fn cost(&self) -> usize {
        self.steiner.len()
    }

    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        let sink = self.sink;
        self.terminals.iter().copied().filter(move |&t| t != sink)
    }
}

const INF: u32 = u32::MAX / 4;

/// Dreyfus-Wagner subset DP over the Steiner-induced subgraph. Node weights
/// ride on incoming arcs (every Steiner node entered costs 1); a query
/// terminal is dominated by the chosen set rather than entered, which keeps
/// non-query terminals out of every tree automatically.
struct SteinerDp<'a> {
    inst: &'a CaInstance,
    /// Query terminals in ascending order; bit i of a mask refers to terms[i].
    terms: Vec<NodeId>,
    /// Dense index of Steiner nodes.
    steiner: Vec<NodeId>,
    steiner_index: BTreeMap<NodeId, usize>,
    /// dist0[i][v]: edge distance in G[S] from v to the nearest neighbor of
    /// terminal i, so dp[1<<i][v] = dist0 + 1.
    dist0: Vec<Vec<u32>>,
    dp: Vec<Vec<u32>>,
    /// Backtrace choice per (mask, v): split submask or predecessor node.
    choice: Vec<Vec<Choice>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Choice {
    None,
    Split(u32),
    Pred(u32),
}

impl<'a> SteinerDp<'a> {
    fn new(inst: &'a CaInstance, terms: Vec<NodeId>, max_subset: usize) -> Result<Self> {
        let steiner = inst.steiner_nodes();
        let steiner_index: BTreeMap<NodeId, usize> =
            steiner.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let ns = steiner.len();
        let m = terms.len();

        // Multi-source BFS per terminal over the Steiner-induced subgraph.
        let mut dist0 = Vec::with_capacity(m);
        for &t in &terms {
            if !inst.terminals.contains(&t) {
                return Err(invalid(format!("node {t} is not a terminal")));
            }
            let mut dist = vec![INF; ns];
            let mut queue = VecDeque::new();
            for &v in inst.graph.neighbors(t) {
                if let Some(&vi) = steiner_index.get(&v) {
                    if dist[vi] == INF {
                        dist[vi] = 0;
                        queue.push_back(vi);
                    }
                }
            }
            while let Some(ui) = queue.pop_front() {
                for &w in inst.graph.neighbors(steiner[ui]) {
                    if let Some(&wi) = steiner_index.get(&w) {
                        if dist[wi] == INF {
                            dist[wi] = dist[ui] + 1;
                            queue.push_back(wi);
                        }
                    }
                }
            }
            dist0.push(dist);
        }

        let masks = 1usize << m;
        let mut dp: Vec<Vec<u32>> = vec![Vec::new(); masks];
        let mut choice = vec![Vec::new(); masks];
        for mask in 1..masks {
            let bits = mask.count_ones() as usize;
            if bits > max_subset {
                continue;
            }
            let mut row = vec![INF; ns];
            let mut ch = vec![Choice::None; ns];
            if bits == 1 {
                let i = mask.trailing_zeros() as usize;
                for v in 0..ns {
                    if dist0[i][v] < INF {
                        row[v] = dist0[i][v] + 1;
                    }
                }
            } else {
                // Junction at v: join two complementary sub-solutions.
                let mut sub = (mask - 1) & mask;
                while sub > 0 {
                    let rest = mask ^ sub;
                    if sub < rest {
                        // Each unordered split visited once.
                        let (a, b) = (&dp[sub], &dp[rest]);
                        if !a.is_empty() && !b.is_empty() {
                            for v in 0..ns {
                                if a[v] < INF && b[v] < INF {
                                    let cand = a[v] + b[v] - 1;
                                    if cand < row[v] {
                                        row[v] = cand;
                                        ch[v] = Choice::Split(sub as u32);
                                    }
                                }
                            }
                        }
                    }
                    sub = (sub - 1) & mask;
                }
                // Dijkstra pass: grow a unit-cost path toward v.
                let mut heap: BinaryHeap<std::cmp::Reverse<(u32, usize)>> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d < INF)
                    .map(|(v, &d)| std::cmp::Reverse((d, v)))
                    .collect();
                while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
                    if d > row[u] {
                        continue;
                    }
                    for &w in inst.graph.neighbors(steiner[u]) {
                        if let Some(&wi) = steiner_index.get(&w) {
                            if d + 1 < row[wi] {
                                row[wi] = d + 1;
                                ch[wi] = Choice::Pred(u as u32);
                                heap.push(std::cmp::Reverse((d + 1, wi)));
                            }
                        }
                    }
                }
            }
            dp[mask] = row;
            choice[mask] = ch;
        }

        Ok(SteinerDp {
            inst,
            terms,
            steiner,
            steiner_index,
            dist0,
            dp,
            choice,
        })
    }

    fn best(&self, mask: usize) -> Option<(u32, usize)> {
        let row = self.dp.get(mask)?;
        let mut best: Option<(u32, usize)> = None;
        for (v, &d) in row.iter().enumerate() {
            if d < INF && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        best
    }

    /// Backtrace into Steiner-graph edges plus per-terminal attachment nodes.
    fn extract(&self, mask: usize, v: usize) -> (BTreeSet<(usize, usize)>, Vec<(usize, usize)>) {
        let mut edges = BTreeSet::new();
        let mut attach = Vec::new();
        let mut stack = vec![(mask, v)];
        while let Some((mask, v)) = stack.pop() {
            if mask.count_ones() == 1 {
                // Walk the BFS distance gradient down to a dominator.
                let i = mask.trailing_zeros() as usize;
                let dist = &self.dist0[i];
                let mut cur = v;
                while dist[cur] > 0 {
                    let next = self
                        .inst
                        .graph
                        .neighbors(self.steiner[cur])
                        .iter()
                        .filter_map(|w| self.steiner_index.get(w).copied())
                        .find(|&w| dist[w] + 1 == dist[cur])
                        .expect("distance gradient has a predecessor");
                    edges.insert((cur.min(next), cur.max(next)));
                    cur = next;
                }
                attach.push((i, cur));
                continue;
            }
            match self.choice[mask][v] {
                Choice::Split(sub) => {
                    stack.push((sub as usize, v));
                    stack.push((mask ^ sub as usize, v));
                }
                Choice::Pred(u) => {
                    let u = u as usize;
                    edges.insert((u.min(v), u.max(v)));
                    stack.push((mask, u));
                }
                Choice::None => unreachable!("multi-bit mask without a recorded choice"),
            }
        }
        (edges, attach)
    }

    /// Assemble the component tree for a solved mask: spanning tree of the
    /// extracted Steiner subgraph, terminals attached at their dominators,
    /// then bare Steiner leaves pruned.
    fn build_tree(&self, mask: usize, v: usize) -> (Vec<NodeId>, Vec<(NodeId, NodeId)>) {
        let (sedges, attach) = self.extract(mask, v);
        let mut nodes: BTreeSet<usize> = BTreeSet::from([v]);
        for &(a, b) in &sedges {
            nodes.insert(a);
            nodes.insert(b);
        }
        for &(_, d) in &attach {
            nodes.insert(d);
        }
        let node_list: Vec<usize> = nodes.iter().copied().collect();
        let index: BTreeMap<usize, usize> = node_list.iter().copied().zip(0..).collect();
        let mut adj = vec![Vec::new(); node_list.len()];
        for &(a, b) in &sedges {
            adj[index[&a]].push(index[&b]);
            adj[index[&b]].push(index[&a]);
        }
        for nb in adj.iter_mut() {
            nb.sort_unstable();
        }
        // Spanning tree by BFS from the first node.
        let mut seen = vec![false; node_list.len()];
        let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); node_list.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    tree_adj[u].push(w);
                    tree_adj[w].push(u);
                    queue.push_back(w);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "extracted Steiner subgraph connected");

        // Terminal attachments, then prune Steiner leaves with no terminal.
        let mut term_at: Vec<Vec<usize>> = vec![Vec::new(); node_list.len()];
        for &(i, d) in &attach {
            term_at[index[&d]].push(i);
        }
        let mut alive = vec![true; node_list.len()];
        let mut degree: Vec<usize> = tree_adj.iter().map(|nb| nb.len()).collect();
        if node_list.len() > 1 {
            let mut prune: VecDeque<usize> = (0..node_list.len())
                .filter(|&u| degree[u] <= 1 && term_at[u].is_empty())
                .collect();
            while let Some(u) = prune.pop_front() {
                if !alive[u] || !term_at[u].is_empty() || degree[u] > 1 {
                    continue;
                }
                alive[u] = false;
                for &w in &tree_adj[u] {
                    if alive[w] {
                        degree[w] -= 1;
                        if degree[w] <= 1 && term_at[w].is_empty() {
                            prune.push_back(w);
                        }
                    }
                }
            }
        }

        let mut steiner_nodes = Vec::new();
        let mut edges = Vec::new();
        for (u, &si) in node_list.iter().enumerate() {
            if alive[u] {
                let s = self.steiner[si];
                steiner_nodes.push(s);
                for &i in &term_at[u] {
                    let t = self.terms[i];
                    edges.push((t.min(s), t.max(s)));
                }
            }
        }
        for (u, nbs) in tree_adj.iter().enumerate() {
            for &w in nbs {
                if u < w && alive[u] && alive[w] {
                    let (a, b) = (self.steiner[node_list[u]], self.steiner[node_list[w]]);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        (steiner_nodes, edges)
    }
}

/// Minimum node Steiner tree connecting the given terminals, using only
/// Steiner nodes as intermediates.
pub fn exact_steiner(inst: &CaInstance, terminals: &BTreeSet<NodeId>) -> Result<SteinerTree> {
    exact_steiner_with_cap(inst, terminals, EXACT_TERMINAL_CAP)
}

pub fn exact_steiner_with_cap(
    inst: &CaInstance,
    terminals: &BTreeSet<NodeId>,
    terminal_cap: usize,
) -> Result<SteinerTree> {
    if terminals.len() > terminal_cap {
        return Err(cap(format!(
            "exact solve limited to {terminal_cap} terminals, got {}",
            terminals.len()
        )));
    }
    let terms: Vec<NodeId> = terminals.iter().copied().collect();
    if terms.len() <= 1 {
        return Ok(SteinerTree {
            terminals: terminals.clone(),
            steiner: BTreeSet::new(),
            edges: Vec::new(),
        });
    }
    let m = terms.len();
    let dp = SteinerDp::new(inst, terms, m)?;
    let full = (1usize << m) - 1;
    let (_, v) = dp
        .best(full)
        .ok_or_else(|| infeasible("terminals cannot be connected"))?;
    let (steiner_nodes, edges) = dp.build_tree(full, v);
    Ok(SteinerTree {
        terminals: terminals.clone(),
        steiner: steiner_nodes.into_iter().collect(),
        edges,
    })
}

/// All directed components over terminal subsets of size 2..=k, one per
/// (subset, sink) pair, ordered by subset bitmask then sink id. Singleton
/// subsets are excluded: they cost 0 and no cut constraint needs them.
pub fn enumerate_components(inst: &CaInstance, k: usize) -> Result<Vec<Component>> {
    let terms: Vec<NodeId> = inst.terminals.iter().copied().collect();
    let m = terms.len();
    if m > ENUMERATION_TERMINAL_CAP {
        return Err(cap(format!(
            "component enumeration limited to {ENUMERATION_TERMINAL_CAP} terminals, got {m}"
        )));
    }
    if k < 2 {
        return Err(invalid("component size bound k must be at least 2"));
    }
    let k = k.min(m);
    let dp = SteinerDp::new(inst, terms.clone(), k)?;
    let mut out = Vec::new();
    for mask in 1usize..(1 << m) {
        let bits = mask.count_ones() as usize;
        if bits < 2 || bits > k {
            continue;
        }
        let Some((_, v)) = dp.best(mask) else {
            continue;
        };
        let (steiner_nodes, edges) = dp.build_tree(mask, v);
        let subset: Vec<NodeId> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| terms[i])
            .collect();
        for &sink in &subset {
            out.push(Component {
                terminals: subset.clone(),
                sink,
                steiner: steiner_nodes.clone(),
                edges: edges.clone(),
            });
        }
    }
    Ok(out)
}

/// Global optimum by enumerating Steiner subsets in increasing size.
pub fn brute_force_opt(inst: &CaInstance) -> Result<SteinerTree> {
    let steiner = inst.steiner_nodes();
    if steiner.len() > BRUTE_FORCE_STEINER_CAP {
        return Err(cap(format!(
            "brute force limited to {BRUTE_FORCE_STEINER_CAP} Steiner nodes, got {}",
            steiner.len()
        )));
    }
    if inst.terminals.len() <= 1 {
        return Ok(SteinerTree {
            terminals: inst.terminals.clone(),
            steiner: BTreeSet::new(),
            edges: Vec::new(),
        });
    }
    for size in 0..=steiner.len() {
        let mut chosen = Vec::with_capacity(size);
        if let Some(found) = search_subsets(inst, &steiner, size, 0, &mut chosen) {
            let tree = spanning_solution(inst, &found)?;
            if validate_ca_instance(inst).is_empty() {
                debug_assert!(2 * tree.cost() >= inst.terminal_count());
            }
            return Ok(tree);
        }
    }
    Err(infeasible(
        "terminals cannot be connected with any Steiner subset",
    ))
}

fn search_subsets(
    inst: &CaInstance,
    steiner: &[NodeId],
    size: usize,
    from: usize,
    chosen: &mut Vec<NodeId>,
) -> Option<BTreeSet<NodeId>> {
    if chosen.len() == size {
        let set: BTreeSet<NodeId> = chosen.iter().copied().collect();
        if inst.connects_terminals(&set) {
            return Some(set);
        }
        return None;
    }
    if steiner.len() - from < size - chosen.len() {
        return None;
    }
    for i in from..steiner.len() {
        chosen.push(steiner[i]);
        if let Some(found) = search_subsets(inst, steiner, size, i + 1, chosen) {
            chosen.pop();
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// BFS spanning tree over terminals plus the chosen Steiner set, trimmed to
/// the terminal-spanning core.
fn spanning_solution(inst: &CaInstance, chosen: &BTreeSet<NodeId>) -> Result<SteinerTree> {
    let nodes: Vec<NodeId> = inst
        .terminals
        .iter()
        .chain(chosen.iter())
        .copied()
        .collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().copied().zip(0..).collect();
    let start = *inst.terminals.iter().next().expect("nonempty terminals");
    let mut parent: Vec<Option<usize>> = vec![None; nodes.len()];
    let mut seen = vec![false; nodes.len()];
    seen[index[&start]] = true;
    let mut queue = VecDeque::from([index[&start]]);
    while let Some(u) = queue.pop_front() {
        for &w in inst.graph.neighbors(nodes[u]) {
            if let Some(&wi) = index.get(&w) {
                if !seen[wi] {
                    seen[wi] = true;
                    parent[wi] = Some(u);
                    queue.push_back(wi);
                }
            }
        }
    }
    for &t in &inst.terminals {
        if !seen[index[&t]] {
            return Err(internal(
                "claimed feasible Steiner set fails to span terminals",
            ));
        }
    }
    // Keep only nodes on root-to-terminal paths of the BFS tree.
    let mut keep = vec![false; nodes.len()];
    for &t in &inst.terminals {
        let mut cur = Some(index[&t]);
        while let Some(u) = cur {
            if keep[u] {
                break;
            }
            keep[u] = true;
            cur = parent[u];
        }
    }
    let mut edges = Vec::new();
    let mut used_steiner = BTreeSet::new();
    for u in 0..nodes.len() {
        if !keep[u] {
            continue;
        }
        if !inst.terminals.contains(&nodes[u]) {
            used_steiner.insert(nodes[u]);
        }
        if let Some(p) = parent[u] {
            edges.push((nodes[u].min(nodes[p]), nodes[u].max(nodes[p])));
        }
    }
    edges.sort_unstable();
    Ok(SteinerTree {
        terminals: inst.terminals.clone(),
        steiner: used_steiner,
        edges,
    })
}

/// Rooted tree over dense ids, used by the decomposition machinery.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub root: usize,
    pub children: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
}

impl RootedTree {
    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        self.children[u].is_empty()
    }

    /// Post-order traversal without recursion.
    pub fn post_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.node_count());
        let mut stack = vec![(self.root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
            } else {
                stack.push((u, true));
                for &c in self.children[u].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }
}

/// Injective map from internal nodes of a regular binary tree to leaves,
/// with f(u) a descendant of u and all u-to-f(u) paths pairwise edge
/// disjoint and internally node disjoint. Built by the spare-leaf recursion:
/// each internal node maps to its first subtree's spare leaf while the
/// second subtree's spare is passed up unconsumed.
pub fn leaf_map(t: &RootedTree) -> Result<BTreeMap<usize, usize>> {
    for u in 0..t.node_count() {
        let c = t.children[u].len();
        if c != 0 && c != 2 {
            return Err(invalid(format!(
                "leaf_map requires a regular binary tree; node {u} has {c} children"
            )));
        }
    }
    let mut map = BTreeMap::new();
    let mut spare: Vec<usize> = vec![usize::MAX; t.node_count()];
    for u in t.post_order() {
        if t.is_leaf(u) {
            spare[u] = u;
        } else {
            let (c1, c2) = (t.children[u][0], t.children[u][1]);
            map.insert(u, spare[c1]);
            spare[u] = spare[c2];
        }
    }
    Ok(map)
}

/// One piece of a restricted decomposition after contraction back into the
/// original tree.
#[derive(Clone, Debug)]
pub struct TreePiece {
    pub nodes: BTreeSet<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub terminals: BTreeSet<NodeId>,
    pub steiner_count: usize,
}

/// The m per-label restricted trees built from one optimal solution.
#[derive(Clone, Debug)]
pub struct RestrictedDecomposition {
    pub m: usize,
    pub per_label: Vec<Vec<TreePiece>>,
    pub costs: Vec<usize>,
    pub best: usize,
    /// Every non-root internal node served as an intermediate leaf exactly
    /// once across all labels (trivially true in the degenerate regime).
    pub intermediate_leaf_unique: bool,
}

impl RestrictedDecomposition {
    pub fn best_cost(&self) -> usize {
        self.costs[self.best]
    }

    /// Union of the label's pieces connects every terminal of `opt`.
    pub fn label_feasible(&self, label: usize, opt: &SteinerTree) -> bool {
        let nodes = opt.nodes();
        let node_list: Vec<NodeId> = nodes.iter().copied().collect();
        let index: BTreeMap<NodeId, usize> = node_list.iter().copied().zip(0..).collect();
        let mut dsu = Dsu::new(node_list.len());
        for piece in &self.per_label[label] {
            for &(a, b) in &piece.edges {
                dsu.union(index[&a], index[&b]);
            }
        }
        let mut terms = opt.terminals.iter();
        let Some(&first) = terms.next() else {
            return true;
        };
        let f = index[&first];
        terms.all(|t| dsu.same(f, index[t]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum QNode {
    Steiner(NodeId),
    Terminal(NodeId),
    AuxCopy(NodeId),
    DummyRoot,
    DummyTerminal,
}

impl QNode {
    fn original(self) -> Option<NodeId> {
        match self {
            QNode::Steiner(o) | QNode::Terminal(o) | QNode::AuxCopy(o) => Some(o),
            QNode::DummyRoot | QNode::DummyTerminal => None,
        }
    }

    fn is_leaf_kind(self) -> bool {
        matches!(self, QNode::Terminal(_) | QNode::DummyTerminal)
    }
}

/// Decompose an optimal tree (terminals as leaves) into m restricted trees,
/// one per layer label: a zero-weight root splits the edge at the smallest
/// terminal, Steiner nodes with 3+ children expand into zero-weight binary
/// chains, single-child nodes receive dummy terminals, internal nodes get
/// label depth mod m, and each label's components run from a labeled node
/// down to the next labeled layer, closed off by leaf-map paths.
pub fn k_restricted_decompose(opt: &SteinerTree, m: usize) -> Result<RestrictedDecomposition> {
    if m == 0 {
        return Err(invalid("label count m must be at least 1"));
    }
    let adj = opt.adjacency();
    for &t in &opt.terminals {
        if adj.get(&t).map(|nb| nb.len()) != Some(1) {
            return Err(invalid("decomposition requires terminals to be leaves"));
        }
    }
    let t_count = opt.terminals.len();
    if t_count < 2 {
        return Err(invalid("decomposition requires at least 2 terminals"));
    }

    let k = 1usize << m;
    if t_count <= k {
        // Degenerate regime: the whole tree is one valid component.
        let piece = TreePiece {
            nodes: opt.nodes(),
            edges: opt.edges.clone(),
            terminals: opt.terminals.clone(),
            steiner_count: opt.steiner.len(),
        };
        let per_label = vec![vec![piece]; m];
        let costs = vec![opt.steiner.len(); m];
        return Ok(RestrictedDecomposition {
            m,
            per_label,
            costs,
            best: 0,
            intermediate_leaf_unique: true,
        });
    }

    // --- Build the expanded rooted tree. ---
    let t_min = *opt.terminals.iter().next().expect("terminals nonempty");
    let neighbor = adj[&t_min][0];

    let mut kinds: Vec<QNode> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    fn new_node(kinds: &mut Vec<QNode>, children: &mut Vec<Vec<usize>>, k: QNode) -> usize {
        kinds.push(k);
        children.push(Vec::new());
        kinds.len() - 1
    }

    let root = new_node(&mut kinds, &mut children, QNode::DummyRoot);
    let mut id_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    for orig in [t_min, neighbor] {
        let kind = if opt.terminals.contains(&orig) {
            QNode::Terminal(orig)
        } else {
            QNode::Steiner(orig)
        };
        let q = new_node(&mut kinds, &mut children, kind);
        id_of.insert(orig, q);
        children[root].push(q);
    }
    let mut queue = VecDeque::from([t_min, neighbor]);
    let mut seen: BTreeSet<NodeId> = BTreeSet::from([t_min, neighbor]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[&u] {
            if seen.contains(&w) || (u == t_min && w == neighbor) || (u == neighbor && w == t_min) {
                continue;
            }
            seen.insert(w);
            let kind = if opt.terminals.contains(&w) {
                QNode::Terminal(w)
            } else {
                QNode::Steiner(w)
            };
            let q = new_node(&mut kinds, &mut children, kind);
            id_of.insert(w, q);
            children[id_of[&u]].push(q);
            queue.push_back(w);
        }
    }

    // Binary expansion of nodes with 3+ children into chains of copies.
    let mut work: VecDeque<usize> = (0..children.len()).collect();
    while let Some(u) = work.pop_front() {
        if children[u].len() <= 2 {
            continue;
        }
        let orig = kinds[u]
            .original()
            .expect("only original nodes can be overfull");
        let kids = std::mem::take(&mut children[u]);
        let copy = new_node(&mut kinds, &mut children, QNode::AuxCopy(orig));
        children[u] = vec![kids[0], copy];
        children[copy] = kids[1..].to_vec();
        work.push_back(copy);
    }
    // Dummy terminals under single-child internal nodes.
    for u in 0..children.len() {
        if children[u].len() == 1 && u != root {
            let d = new_node(&mut kinds, &mut children, QNode::DummyTerminal);
            children[u].push(d);
        }
    }

    let n = children.len();
    let mut parent = vec![None; n];
    for u in 0..n {
        for &c in &children[u] {
            parent[c] = Some(u);
        }
    }
    let qtree = RootedTree {
        root,
        children,
        parent,
    };
    for u in 0..n {
        let c = qtree.children[u].len();
        if c == 1 || c > 2 || (c == 0 && !kinds[u].is_leaf_kind()) {
            return Err(internal("expansion failed to produce a regular binary tree"));
        }
    }

    let mut depth = vec![0usize; n];
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &c in &qtree.children[u] {
            depth[c] = depth[u] + 1;
            order.push(c);
        }
    }
    let fmap = leaf_map(&qtree)?;

    // --- Components per label. ---
    let mut inter_leaf_count = vec![0usize; n];
    let mut per_label: Vec<Vec<TreePiece>> = Vec::with_capacity(m);
    let mut costs = Vec::with_capacity(m);
    for label in 0..m {
        let mut roots: Vec<usize> = vec![root];
        for u in 0..n {
            if u != root && !qtree.is_leaf(u) && depth[u] % m == label {
                roots.push(u);
            }
        }
        let mut pieces = Vec::new();
        for &cr in &roots {
            let mut q_nodes: BTreeSet<usize> = BTreeSet::from([cr]);
            let mut q_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
            let mut stack: Vec<usize> = Vec::new();
            for &c in &qtree.children[cr] {
                q_edges.insert((cr.min(c), cr.max(c)));
                stack.push(c);
            }
            while let Some(u) = stack.pop() {
                q_nodes.insert(u);
                let is_intermediate = !qtree.is_leaf(u) && depth[u] % m == label;
                if is_intermediate {
                    inter_leaf_count[u] += 1;
                    // Close the component off with the leaf-map path.
                    let target = fmap[&u];
                    let mut cur = target;
                    while cur != u {
                        let p = qtree.parent[cur].expect("leaf-map target below u");
                        q_nodes.insert(cur);
                        q_edges.insert((cur.min(p), cur.max(p)));
                        cur = p;
                    }
                    continue;
                }
                for &c in &qtree.children[u] {
                    q_edges.insert((u.min(c), u.max(c)));
                    stack.push(c);
                }
            }

            // Contract copies, drop dummies, restore the split edge.
            let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
            let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
            let had_root = q_nodes.contains(&root);
            for &q in &q_nodes {
                if let Some(o) = kinds[q].original() {
                    nodes.insert(o);
                }
            }
            for &(a, b) in &q_edges {
                if let (Some(oa), Some(ob)) = (kinds[a].original(), kinds[b].original()) {
                    if oa != ob {
                        edges.insert((oa.min(ob), oa.max(ob)));
                    }
                }
            }
            if had_root && nodes.contains(&t_min) && nodes.contains(&neighbor) {
                edges.insert((t_min.min(neighbor), t_min.max(neighbor)));
            }
            let terminals: BTreeSet<NodeId> = nodes
                .iter()
                .copied()
                .filter(|o| opt.terminals.contains(o))
                .collect();
            if terminals.len() > k {
                return Err(internal(format!(
                    "component exceeded {k} terminals in label {label}"
                )));
            }
            let steiner_count = nodes.len() - terminals.len();
            pieces.push(TreePiece {
                nodes,
                edges: edges.into_iter().collect(),
                terminals,
                steiner_count,
            });
        }
        costs.push(pieces.iter().map(|p| p.steiner_count).sum());
        per_label.push(pieces);
    }

    let unique = (0..n)
        .all(|u| u == root || qtree.is_leaf(u) || inter_leaf_count[u] == 1);
    let best = (0..m).min_by_key(|&j| costs[j]).expect("m >= 1");
    Ok(RestrictedDecomposition {
        m,
        per_label,
        costs,
        best,
        intermediate_leaf_unique: unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UndirGraph;
    use crate::instances::{gen_path_family, gen_random_tree_instance, TerminalProfile};
    use crate::rng::Rng;

    fn two_terminal_shared_steiner() -> CaInstance {
        let mut g = UndirGraph::new(3);
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 2).unwrap();
        CaInstance::new(g, BTreeSet::from([0, 1]))
    }

    #[test]
    fn shared_steiner_costs_one() {
        let inst = two_terminal_shared_steiner();
        let tree = exact_steiner(&inst, &inst.terminals).unwrap();
        assert_eq!(tree.cost(), 1);
        tree.validate(&inst).unwrap();
    }

    #[test]
    fn tree_instance_needs_every_steiner() {
        let inst = gen_path_family(4).unwrap();
        let tree = exact_steiner(&inst, &inst.terminals).unwrap();
        assert_eq!(tree.cost(), 4);
        tree.validate(&inst).unwrap();
    }

    #[test]
    fn disconnected_terminals_is_infeasible() {
        let mut g = UndirGraph::new(4);
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 3).unwrap();
        let inst = CaInstance::new(g, BTreeSet::from([0, 1]));
        assert!(matches!(
            exact_steiner(&inst, &inst.terminals),
            Err(crate::Error::Infeasible(_))
        ));
    }

    #[test]
    fn terminal_cap_is_enforced() {
        let inst = gen_path_family(12).unwrap();
        assert!(matches!(
            exact_steiner(&inst, &inst.terminals),
            Err(crate::Error::CapExceeded(_))
        ));
    }

    #[test]
    fn brute_force_agrees_with_dp_on_random_instances() {
        let mut rng = Rng::new(314);
        for trial in 0..100 {
            let n = rng.next_range(1, 5);
            let mut inst =
                gen_random_tree_instance(n, rng.next_u64(), TerminalProfile::default()).unwrap();
            // Densify with extra Steiner-Steiner edges to move off the pure
            // tree case while preserving instance validity.
            let steiner = inst.steiner_nodes();
            for _ in 0..rng.next_below(3) {
                let a = steiner[rng.next_below(steiner.len())];
                let b = steiner[rng.next_below(steiner.len())];
                if a != b {
                    inst.graph.add_edge(a, b).unwrap();
                }
            }
            if inst.terminal_count() > EXACT_TERMINAL_CAP {
                continue;
            }
            let brute = brute_force_opt(&inst).unwrap();
            let dp = exact_steiner(&inst, &inst.terminals).unwrap();
            assert_eq!(brute.cost(), dp.cost(), "trial {trial}");
            dp.validate(&inst).unwrap();
        }
    }

    #[test]
    fn brute_force_excludes_redundant_steiner() {
        let mut g = UndirGraph::new(4);
        for s in [2, 3] {
            g.add_edge(0, s).unwrap();
            g.add_edge(1, s).unwrap();
        }
        let inst = CaInstance::new(g, BTreeSet::from([0, 1]));
        assert_eq!(brute_force_opt(&inst).unwrap().cost(), 1);
    }

    #[test]
    fn brute_force_returns_tree_instance_itself() {
        let inst = gen_path_family(3).unwrap();
        let opt = brute_force_opt(&inst).unwrap();
        assert_eq!(opt.cost(), 3);
        assert_eq!(opt.edges, inst.graph.edges());
    }

    #[test]
    fn component_enumeration_counts() {
        let inst = two_terminal_shared_steiner();
        let comps = enumerate_components(&inst, 2).unwrap();
        // One connectable pair, two sinks; singletons excluded.
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.cost() == 1));

        let inst4 = gen_path_family(2).unwrap(); // 4 terminals on a 2-Steiner path
        let comps4 = enumerate_components(&inst4, 2).unwrap();
        assert!(comps4.len() <= 12);
        for c in &comps4 {
            assert_eq!(c.terminals.len(), 2);
            assert!(c.terminals.contains(&c.sink));
        }
    }

    #[test]
    fn component_costs_match_fresh_exact_solves() {
        let inst = gen_path_family(3).unwrap();
        for c in enumerate_components(&inst, 3).unwrap() {
            let terms: BTreeSet<NodeId> = c.terminals.iter().copied().collect();
            let fresh = exact_steiner(&inst, &terms).unwrap();
            assert_eq!(c.cost(), fresh.cost());
        }
    }

    fn random_regular_binary(n_internal: usize, rng: &mut Rng) -> RootedTree {
        // Grow by repeatedly splitting a random leaf into two children.
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut leaves = vec![0usize];
        for _ in 0..n_internal {
            let pick = rng.next_below(leaves.len());
            let leaf = leaves.swap_remove(pick);
            let a = children.len();
            children.push(Vec::new());
            let b = children.len();
            children.push(Vec::new());
            children[leaf] = vec![a, b];
            leaves.push(a);
            leaves.push(b);
        }
        let mut parent = vec![None; children.len()];
        for u in 0..children.len() {
            for &c in &children[u] {
                parent[c] = Some(u);
            }
        }
        RootedTree {
            root: 0,
            children,
            parent,
        }
    }

    fn path_nodes(t: &RootedTree, from: usize, to: usize) -> Vec<usize> {
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = t.parent[cur].unwrap();
            path.push(cur);
        }
        path
    }

    #[test]
    fn leaf_map_on_minimal_tree() {
        let mut rng = Rng::new(1);
        let t = random_regular_binary(1, &mut rng);
        let f = leaf_map(&t).unwrap();
        assert_eq!(f.len(), 1);
        assert!(t.is_leaf(f[&0]));
    }

    #[test]
    fn leaf_map_rejects_irregular() {
        let t = RootedTree {
            root: 0,
            children: vec![vec![1], vec![]],
            parent: vec![None, Some(0)],
        };
        assert!(leaf_map(&t).is_err());
    }

    #[test]
    fn leaf_map_disjointness_on_random_trees() {
        let mut rng = Rng::new(77);
        for _ in 0..50 {
            let internal = rng.next_range(1, 31); // up to 63 nodes
            let t = random_regular_binary(internal, &mut rng);
            let f = leaf_map(&t).unwrap();
            let images: BTreeSet<usize> = f.values().copied().collect();
            assert_eq!(images.len(), f.len(), "map not injective");
            for (&u, &l) in &f {
                assert!(t.is_leaf(l));
                assert!(path_nodes(&t, u, l).len() >= 2);
            }
            let keys: Vec<usize> = f.keys().copied().collect();
            for i in 0..keys.len() {
                for j in i + 1..keys.len() {
                    let p1 = path_nodes(&t, keys[i], f[&keys[i]]);
                    let p2 = path_nodes(&t, keys[j], f[&keys[j]]);
                    let e1: BTreeSet<(usize, usize)> = p1
                        .windows(2)
                        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                        .collect();
                    let e2: BTreeSet<(usize, usize)> = p2
                        .windows(2)
                        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                        .collect();
                    assert!(e1.is_disjoint(&e2), "shared edge between map paths");
                    let i1: BTreeSet<usize> = p1[1..p1.len() - 1].iter().copied().collect();
                    let i2: BTreeSet<usize> = p2[1..p2.len() - 1].iter().copied().collect();
                    assert!(
                        i1.intersection(&i2).next().is_none(),
                        "node internal to two map paths"
                    );
                }
            }
        }
    }

    #[test]
    fn decomposition_degenerate_when_terminals_fit() {
        let inst = gen_path_family(2).unwrap(); // 4 terminals
        let opt = inst.as_tree_solution().unwrap();
        let d = k_restricted_decompose(&opt, 2).unwrap(); // k = 4 >= 4
        for j in 0..2 {
            assert_eq!(d.per_label[j].len(), 1);
            assert_eq!(d.costs[j], opt.cost());
            assert!(d.label_feasible(j, &opt));
        }
    }

    #[test]
    fn decomposition_bounds_on_random_trees() {
        let mut rng = Rng::new(4242);
        for _ in 0..40 {
            let n = rng.next_range(2, 30);
            let inst =
                gen_random_tree_instance(n, rng.next_u64(), TerminalProfile::default()).unwrap();
            let opt = inst.as_tree_solution().unwrap();
            for m in 1..=3usize {
                let d = k_restricted_decompose(&opt, m).unwrap();
                assert!(d.intermediate_leaf_unique);
                let total: usize = d.costs.iter().sum();
                assert!(
                    total <= (m + 4) * opt.cost(),
                    "sum bound failed: n={n} m={m} total={total}"
                );
                // min_j cost(Q_j) <= (1 + 4/m) * OPT, in exact integer form.
                assert!(
                    d.best_cost() * m <= (m + 4) * opt.cost(),
                    "best bound failed: n={n} m={m} best={}",
                    d.best_cost()
                );
                for j in 0..m {
                    assert!(d.label_feasible(j, &opt), "label {j} infeasible");
                    for piece in &d.per_label[j] {
                        assert!(piece.terminals.len() <= 1 << m);
                    }
                }
            }
        }
    }
}
