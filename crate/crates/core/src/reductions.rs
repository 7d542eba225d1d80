use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{internal, invalid, Result};
use crate::graph::{block_cut_tree, tree_path, BcNode, BlockCutTree, NodeId, Tree, UndirGraph};
use crate::instance::{
    norm_link, validate_ca_instance, CaInstance, Dsu, Link, LinkSet, LinkWeight,
};

/// Which connectivity target a link set is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AugmentationMode {
    /// 2-node-connectivity of the simple graph union.
    Node,
    /// Cactus-augmentation feasibility: 3-edge-connectivity of the
    /// multigraph union (a cactus is 2-edge-connected already, and every
    /// pair of same-cycle edges must stop being a cut).
    Edge,
}

/// True iff `g` plus the chosen links meets the connectivity target.
pub fn verify_augmentation(g: &UndirGraph, links: &[Link], mode: AugmentationMode) -> bool {
    match mode {
        AugmentationMode::Node => {
            let mut union = g.clone();
            for &(u, v) in links {
                if u != v && union.add_edge(u, v).is_err() {
                    return false;
                }
            }
            union.is_two_node_connected()
        }
        AugmentationMode::Edge => {
            let mut edges = g.edges();
            edges.extend(links.iter().map(|&(u, v)| norm_link(u, v)));
            multigraph_three_edge_connected(g.node_count(), &edges)
        }
    }
}

/// 3-edge-connectivity of a multigraph by exhaustive pair deletion;
/// fine at desk scale.
fn multigraph_three_edge_connected(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    if n <= 1 {
        return true;
    }
    if edges.len() < 3 {
        return false;
    }
    let connected_without = |skip_a: usize, skip_b: usize| -> bool {
        let mut dsu = Dsu::new(n);
        let mut parts = n;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if i == skip_a || i == skip_b {
                continue;
            }
            if dsu.union(u, v) {
                parts -= 1;
            }
        }
        parts == 1
    };
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if !connected_without(i, j) {
                return false;
            }
        }
    }
    true
}

/// Smallest feasible sub-linkset size, by exhaustive subset search in
/// increasing cardinality. Ground-truth oracle for small link sets.
pub fn brute_force_min_links(
    g: &UndirGraph,
    links: &[Link],
    mode: AugmentationMode,
) -> Option<usize> {
    let m = links.len();
    assert!(m <= 20, "exhaustive link search capped at 20 links");
    for size in 0..=m {
        let mut chosen = Vec::with_capacity(size);
        if any_subset_feasible(g, links, mode, size, 0, &mut chosen) {
            return Some(size);
        }
    }
    None
}

fn any_subset_feasible(
    g: &UndirGraph,
    links: &[Link],
    mode: AugmentationMode,
    size: usize,
    from: usize,
    chosen: &mut Vec<Link>,
) -> bool {
    if chosen.len() == size {
        return verify_augmentation(g, chosen, mode);
    }
    for i in from..links.len() {
        chosen.push(links[i]);
        if any_subset_feasible(g, links, mode, size, i + 1, chosen) {
            chosen.pop();
            return true;
        }
        chosen.pop();
    }
    false
}

/// Everything a later stage needs to map CA-level answers back to the
/// original problem's links.
#[derive(Clone, Debug, Default)]
pub struct ReductionTrace {
    /// Original graph was already 2-node-connected; the instance is empty.
    pub trivial: bool,
    /// CA Steiner node -> original-problem link.
    pub back: BTreeMap<NodeId, Link>,
    /// Original-problem link -> CA Steiner node its image became, if any.
    /// Degenerate images (links that cannot affect feasibility) map to None.
    pub forward: BTreeMap<Link, Option<NodeId>>,
    /// Block-cut tree, for the 1-node augmentation pipeline.
    pub block_cut: Option<BlockCutTree>,
    /// The {0,1}-weighted link set over the intermediate tree.
    pub tap_links: Option<LinkSet>,
    /// Image link -> chosen representative original link (lexicographically
    /// smallest preimage) where the block-cut map is not injective.
    pub rep: BTreeMap<Link, Link>,
}

/// Output of reducing a 1-node connectivity augmentation instance to a
/// weighted tree augmentation instance over the block-cut tree.
#[derive(Clone, Debug)]
pub struct BlockTapStage {
    pub trivial: bool,
    pub tree: Tree,
    pub bct: BlockCutTree,
    /// Weight-1 image links followed by the weight-0 intra-block cut pairs.
    pub links: LinkSet,
    /// Image link -> representative original link.
    pub rep: BTreeMap<Link, Link>,
    /// Original link -> its image link on the tree, when non-degenerate.
    pub image: BTreeMap<Link, Option<Link>>,
}

/// Reduce a connected graph plus candidate links to the block-cut tree with
/// weight-1 image links and weight-0 links between cut nodes sharing a block.
pub fn one_node_cap_to_block_tap(g: &UndirGraph, links: &LinkSet) -> Result<BlockTapStage> {
    if !g.is_connected() {
        return Err(invalid("1-node augmentation requires a connected base graph"));
    }
    links.validate_against(g)?;
    let bct = block_cut_tree(g)?;
    let trivial = g.is_two_node_connected();
    let tree = Tree::from_graph(bct.tree.clone())?;

    let mut image: BTreeMap<Link, Option<Link>> = BTreeMap::new();
    let mut rep: BTreeMap<Link, Link> = BTreeMap::new();
    let mut zero_pairs: BTreeSet<Link> = BTreeSet::new();
    for node in &bct.nodes {
        if let BcNode::Block(members) = node {
            let cuts: Vec<NodeId> = members
                .iter()
                .copied()
                .filter(|&m| matches!(bct.nodes[bct.node_map[m]], BcNode::Cut(_)))
                .collect();
            for i in 0..cuts.len() {
                for j in i + 1..cuts.len() {
                    zero_pairs.insert(norm_link(bct.node_map[cuts[i]], bct.node_map[cuts[j]]));
                }
            }
        }
    }

    let tree_edges: BTreeSet<Link> = tree.graph().edges().into_iter().collect();
    let mut one_links: BTreeSet<Link> = BTreeSet::new();
    if !trivial {
        for (u, v) in links.links().iter().copied() {
            let img = norm_link(bct.node_map[u], bct.node_map[v]);
            // Images that land inside a block, on a tree edge, or on a
            // free weight-0 pair cannot change 2-node-connectivity of the
            // augmented tree; they are dropped and recorded as degenerate.
            let degenerate =
                img.0 == img.1 || tree_edges.contains(&img) || zero_pairs.contains(&img);
            if degenerate {
                image.insert((u, v), None);
                continue;
            }
            image.insert((u, v), Some(img));
            one_links.insert(img);
            let entry = rep.entry(img).or_insert((u, v));
            if (u, v) < *entry {
                *entry = (u, v);
            }
        }
    } else {
        for &l in links.links() {
            image.insert(l, None);
        }
    }

    let mut out_links = LinkSet::default();
    for l in &one_links {
        out_links.push(*l, LinkWeight::One);
    }
    for l in &zero_pairs {
        out_links.push(*l, LinkWeight::Zero);
    }

    Ok(BlockTapStage {
        trivial,
        tree,
        bct,
        links: out_links,
        rep,
        image,
    })
}

/// Reduce a tree with {0,1}-weighted links to a node Steiner instance via
/// the reduced incidence graph: terminals are the leaf edges, Steiner nodes
/// the weight-1 links, with adjacency from shared path edges plus bridging
/// through chains of weight-0 links.
pub fn block_tap_to_ca_steiner(tree: &Tree, links: &LinkSet) -> Result<(CaInstance, ReductionTrace)> {
    let tg = tree.graph();
    if tg.node_count() < 3 {
        return Err(invalid("tree augmentation needs at least 3 tree nodes"));
    }
    links.validate_against(tg)?;

    let leaf_edges: Vec<Link> = tree.leaf_edges();
    let edge_list: Vec<Link> = tg.edges();
    let edge_index: BTreeMap<Link, usize> = edge_list
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();

    // Path edge sets for every link, both weight classes.
    let all: Vec<(Link, LinkWeight)> = links.iter().collect();
    let mut path_edges: Vec<Vec<usize>> = Vec::with_capacity(all.len());
    for ((u, v), _) in &all {
        let path = tree_path(tg, *u, *v)?;
        let ids = path
            .windows(2)
            .map(|w| edge_index[&norm_link(w[0], w[1])])
            .collect();
        path_edges.push(ids);
    }

    // Links through each tree edge; any two of them become adjacent when
    // the shared edge node is short-cut.
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); edge_index.len()];
    for (li, ids) in path_edges.iter().enumerate() {
        for &e in ids {
            through[e].push(li);
        }
    }
    let mut link_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); all.len()];
    for bucket in &through {
        for i in 0..bucket.len() {
            for j in i + 1..bucket.len() {
                link_adj[bucket[i]].insert(bucket[j]);
                link_adj[bucket[j]].insert(bucket[i]);
            }
        }
    }

    // Node ids: terminals first (sorted leaf edges), then weight-1 links.
    let ones: Vec<usize> = (0..all.len())
        .filter(|&i| all[i].1 == LinkWeight::One)
        .collect();
    let mut labels: Vec<String> = Vec::new();
    for &(a, b) in &leaf_edges {
        labels.push(format!("e:{a}-{b}"));
    }
    for &li in &ones {
        let (a, b) = all[li].0;
        labels.push(format!("l:{a}-{b}"));
    }
    let terminal_count = leaf_edges.len();
    let steiner_id: BTreeMap<usize, NodeId> = ones
        .iter()
        .enumerate()
        .map(|(k, &li)| (li, terminal_count + k))
        .collect();
    let leaf_edge_id: BTreeMap<Link, NodeId> = leaf_edges
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();

    let mut graph = UndirGraph::with_labels(labels);
    for &li in &ones {
        let sid = steiner_id[&li];
        for &e in &path_edges[li] {
            if let Some(&tid) = leaf_edge_id.get(&edge_list[e]) {
                graph.add_edge(sid, tid)?;
            }
        }
        for &lj in &link_adj[li] {
            if all[lj].1 == LinkWeight::One && lj != li {
                graph.add_edge(sid, steiner_id[&lj])?;
            }
        }
        // Bridge through chains of weight-0 links.
        let mut seen: BTreeSet<usize> = BTreeSet::from([li]);
        let mut queue: VecDeque<usize> = link_adj[li]
            .iter()
            .copied()
            .filter(|&lj| all[lj].1 == LinkWeight::Zero)
            .collect();
        seen.extend(queue.iter().copied());
        while let Some(lz) = queue.pop_front() {
            for &lj in &link_adj[lz] {
                if seen.contains(&lj) {
                    continue;
                }
                seen.insert(lj);
                match all[lj].1 {
                    LinkWeight::One => {
                        graph.add_edge(sid, steiner_id[&lj])?;
                    }
                    LinkWeight::Zero => queue.push_back(lj),
                }
            }
        }
    }

    let terminals: BTreeSet<NodeId> = (0..terminal_count).collect();
    let mut inst = CaInstance::new(graph, terminals);
    let mut trace = ReductionTrace::default();
    for &li in &ones {
        let sid = steiner_id[&li];
        inst.back_map.insert(sid, all[li].0);
        trace.back.insert(sid, all[li].0);
        trace.forward.insert(all[li].0, Some(sid));
    }
    trace.tap_links = Some(links.clone());

    let violations = validate_ca_instance(&inst);
    if !violations.is_empty() {
        return Err(internal(format!(
            "incidence construction violated instance properties: {violations:?}"
        )));
    }
    Ok((inst, trace))
}

/// Full pipeline: connected graph + links -> weighted tree stage -> node
/// Steiner instance, with the trace composed back to original links.
pub fn reduce_one_node_cap(g: &UndirGraph, links: &LinkSet) -> Result<(CaInstance, ReductionTrace)> {
    let stage = one_node_cap_to_block_tap(g, links)?;
    if stage.trivial {
        let inst = CaInstance::new(UndirGraph::new(0), BTreeSet::new());
        let mut trace = ReductionTrace {
            trivial: true,
            ..Default::default()
        };
        trace.block_cut = Some(stage.bct);
        for &l in links.links() {
            trace.forward.insert(l, None);
        }
        return Ok((inst, trace));
    }
    let (mut inst, mut trace) = block_tap_to_ca_steiner(&stage.tree, &stage.links)?;
    // Compose: steiner -> image link -> representative original link.
    let mut back = BTreeMap::new();
    for (&sid, img) in &trace.back {
        let orig = stage
            .rep
            .get(img)
            .copied()
            .ok_or_else(|| internal("image link missing representative"))?;
        back.insert(sid, orig);
    }
    let mut forward = BTreeMap::new();
    for (&orig, img) in &stage.image {
        let sid = img.and_then(|img| trace.forward.get(&img).copied().flatten());
        forward.insert(orig, sid);
    }
    inst.back_map = back.clone();
    trace.back = back;
    trace.forward = forward;
    trace.rep = stage.rep;
    trace.block_cut = Some(stage.bct);
    trace.tap_links = Some(stage.links);
    Ok((inst, trace))
}

/// Reduce a pure tree augmentation instance (all links weight 1).
pub fn reduce_block_tap(tree_graph: &UndirGraph, links: &LinkSet) -> Result<(CaInstance, ReductionTrace)> {
    let tree = Tree::from_graph(tree_graph.clone())?;
    let weighted = LinkSet::new(links.links().iter().copied());
    block_tap_to_ca_steiner(&tree, &weighted)
}

/// Reduce a cactus augmentation instance: terminals are the degree-2 nodes,
/// Steiner nodes the links, with adjacency from link endpoints and from
/// crossing projections on shared cycles.
pub fn cacap_to_ca_steiner(cactus: &UndirGraph, links: &LinkSet) -> Result<(CaInstance, ReductionTrace)> {
    if !cactus.is_cactus() {
        return Err(invalid("cactus augmentation requires a cactus base graph"));
    }
    links.validate_against(cactus)?;
    let bct = block_cut_tree(cactus)?;

    // Cyclic order of every block that is a cycle.
    let mut cycle_order: Vec<Vec<NodeId>> = Vec::with_capacity(bct.nodes.len());
    let mut cycle_pos: Vec<BTreeMap<NodeId, usize>> = Vec::with_capacity(bct.nodes.len());
    for node in &bct.nodes {
        let mut order = Vec::new();
        if let BcNode::Block(members) = node {
            if members.len() >= 3 {
                let start = members[0];
                let in_block: BTreeSet<NodeId> = members.iter().copied().collect();
                order.push(start);
                let mut prev = start;
                let mut cur = *cactus
                    .neighbors(start)
                    .iter()
                    .find(|v| in_block.contains(v))
                    .expect("cycle block has internal neighbors");
                while cur != start {
                    order.push(cur);
                    let next = *cactus
                        .neighbors(cur)
                        .iter()
                        .find(|&&v| in_block.contains(&v) && v != prev)
                        .expect("cycle node has two internal neighbors");
                    prev = cur;
                    cur = next;
                }
            }
        }
        cycle_pos.push(order.iter().enumerate().map(|(i, &v)| (v, i)).collect());
        cycle_order.push(order);
    }

    // Projections: split each link at the cut nodes every path between its
    // endpoints must traverse (nodes of degree >= 4), one segment per cycle.
    let link_list: Vec<Link> = links.links().to_vec();
    let mut projections: Vec<Vec<(usize, NodeId, NodeId)>> = Vec::with_capacity(link_list.len());
    for &(u, v) in &link_list {
        let path = tree_path(&bct.tree, bct.node_map[u], bct.node_map[v])?;
        let mut segs = Vec::new();
        let mut entry = u;
        for (i, &bc) in path.iter().enumerate() {
            match &bct.nodes[bc] {
                BcNode::Block(_) => {
                    let exit = if i + 1 < path.len() {
                        match bct.nodes[path[i + 1]] {
                            BcNode::Cut(c) => c,
                            BcNode::Block(_) => {
                                return Err(internal("block-cut path alternation broken"))
                            }
                        }
                    } else {
                        v
                    };
                    segs.push((bc, entry, exit));
                    entry = exit;
                }
                BcNode::Cut(_) => {}
            }
        }
        projections.push(segs);
    }

    // Same-cycle interleaving: one arc between a's endpoints holds exactly
    // one endpoint of b.
    let interleaves = |block: usize, a: (NodeId, NodeId), b: (NodeId, NodeId)| -> bool {
        let order = &cycle_order[block];
        let pos = &cycle_pos[block];
        let len = order.len();
        debug_assert!(len >= 3);
        let (pa, qa) = (pos[&a.0], pos[&a.1]);
        let mut inside = 0;
        let mut i = (pa + 1) % len;
        while i != qa {
            if order[i] == b.0 || order[i] == b.1 {
                inside += 1;
            }
            i = (i + 1) % len;
        }
        inside == 1
    };
    // Projections sharing a split node cross outright, whatever their
    // cycles; chains of projections meet exactly this way at cut nodes.
    let crosses = |pa: &(usize, NodeId, NodeId), pb: &(usize, NodeId, NodeId)| -> bool {
        let (bi, a0, a1) = *pa;
        let (bj, b0, b1) = *pb;
        if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
            return true;
        }
        bi == bj && interleaves(bi, (a0, a1), (b0, b1))
    };

    // Terminals are the degree-2 nodes of the cactus.
    let term_nodes: Vec<NodeId> = (0..cactus.node_count())
        .filter(|&u| cactus.degree(u) == 2)
        .collect();
    let mut labels: Vec<String> = term_nodes
        .iter()
        .map(|&u| format!("r:{}", cactus.label(u)))
        .collect();
    for &(a, b) in &link_list {
        labels.push(format!("l:{a}-{b}"));
    }
    let term_id: BTreeMap<NodeId, NodeId> = term_nodes
        .iter()
        .enumerate()
        .map(|(i, &u)| (u, i))
        .collect();
    let base = term_nodes.len();

    let mut graph = UndirGraph::with_labels(labels);
    for (li, &(u, v)) in link_list.iter().enumerate() {
        for endpoint in [u, v] {
            if let Some(&tid) = term_id.get(&endpoint) {
                graph.add_edge(base + li, tid)?;
            }
        }
    }
    for i in 0..link_list.len() {
        for j in i + 1..link_list.len() {
            let crossing = projections[i]
                .iter()
                .any(|pa| projections[j].iter().any(|pb| crosses(pa, pb)));
            if crossing {
                graph.add_edge(base + i, base + j)?;
            }
        }
    }

    let terminals: BTreeSet<NodeId> = (0..base).collect();
    let mut inst = CaInstance::new(graph, terminals);
    let mut trace = ReductionTrace::default();
    for (li, &l) in link_list.iter().enumerate() {
        inst.back_map.insert(base + li, l);
        trace.back.insert(base + li, l);
        trace.forward.insert(l, Some(base + li));
    }
    let violations = validate_ca_instance(&inst);
    if !violations.is_empty() {
        return Err(internal(format!(
            "cactus reduction violated instance properties: {violations:?}"
        )));
    }
    Ok((inst, trace))
}

/// Map chosen Steiner nodes back to original links; cardinality is preserved.
pub fn lift_solution(steiner: &BTreeSet<NodeId>, trace: &ReductionTrace) -> Result<Vec<Link>> {
    let mut out = Vec::with_capacity(steiner.len());
    for &s in steiner {
        let link = trace
            .back
            .get(&s)
            .ok_or_else(|| invalid(format!("Steiner node {s} has no traced link")))?;
        out.push(*link);
    }
    out.sort_unstable();
    Ok(out)
}

/// Forward image of a link subset in the instance's Steiner id space.
pub fn forward_image(links: &[Link], trace: &ReductionTrace) -> BTreeSet<NodeId> {
    links
        .iter()
        .filter_map(|l| trace.forward.get(&norm_link(l.0, l.1)).copied().flatten())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> UndirGraph {
        UndirGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn cycle_graph(n: usize) -> UndirGraph {
        UndirGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn verify_node_mode_path_plus_closing_link() {
        let g = path_graph(3);
        assert!(verify_augmentation(&g, &[(0, 2)], AugmentationMode::Node));
        assert!(!verify_augmentation(&g, &[], AugmentationMode::Node));
    }

    #[test]
    fn verify_tree_without_links_fails_both_modes() {
        let g = path_graph(4);
        assert!(!verify_augmentation(&g, &[], AugmentationMode::Node));
        assert!(!verify_augmentation(&g, &[], AugmentationMode::Edge));
    }

    #[test]
    fn edge_mode_needs_every_cycle_pair_covered() {
        // C4 plus both diagonals is feasible; one diagonal leaves the two
        // untouched degree-2 corners behind a 2-edge cut.
        let g = cycle_graph(4);
        assert!(verify_augmentation(&g, &[(0, 2), (1, 3)], AugmentationMode::Edge));
        assert!(!verify_augmentation(&g, &[(0, 2)], AugmentationMode::Edge));
        assert!(!verify_augmentation(&g, &[], AugmentationMode::Edge));
    }

    #[test]
    fn one_node_cap_trivial_when_already_biconnected() {
        let stage = one_node_cap_to_block_tap(&cycle_graph(4), &LinkSet::new([(0, 2)])).unwrap();
        assert!(stage.trivial);
        assert!(stage.links.is_empty());
    }

    #[test]
    fn one_node_cap_path_example() {
        // Path a-b-c with link (a,c): tree B1-b-B2, one weight-1 link, no
        // weight-0 links.
        let stage = one_node_cap_to_block_tap(&path_graph(3), &LinkSet::new([(0, 2)])).unwrap();
        assert!(!stage.trivial);
        assert_eq!(stage.tree.node_count(), 3);
        assert_eq!(stage.links.ones().count(), 1);
        assert_eq!(stage.links.zeros().count(), 0);
        let img = stage.links.ones().next().unwrap();
        assert_eq!(stage.rep[&img], (0, 2));
    }

    #[test]
    fn zero_links_appear_between_cut_nodes_sharing_a_block() {
        // Triangle with two pendant edges at different corners: the block
        // {0,1,2} holds cut nodes 0 and 1.
        let g = UndirGraph::from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 4)]).unwrap();
        let stage = one_node_cap_to_block_tap(&g, &LinkSet::new([(3, 4)])).unwrap();
        assert_eq!(stage.links.zeros().count(), 1);
        assert_eq!(stage.links.ones().count(), 1);
    }

    #[test]
    fn block_tap_star_all_leaf_pairs() {
        // Star K_{1,3}: 3 leaf-edge terminals; the three leaf-pair links all
        // share the center's edges pairwise, so the Steiner side is a clique
        // and each Steiner node sees exactly 2 terminals.
        let star = UndirGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let tree = Tree::from_graph(star).unwrap();
        let links = LinkSet::new([(1, 2), (1, 3), (2, 3)]);
        let (inst, _) = block_tap_to_ca_steiner(&tree, &links).unwrap();
        assert_eq!(inst.terminal_count(), 3);
        assert_eq!(inst.steiner_count(), 3);
        for s in inst.steiner_nodes() {
            let t_adj = inst
                .graph
                .neighbors(s)
                .iter()
                .filter(|v| inst.terminals.contains(v))
                .count();
            assert_eq!(t_adj, 2);
            let s_adj = inst
                .graph
                .neighbors(s)
                .iter()
                .filter(|v| !inst.terminals.contains(v))
                .count();
            assert_eq!(s_adj, 2);
        }
    }

    #[test]
    fn block_tap_single_spanning_link() {
        let tree = Tree::from_graph(path_graph(4)).unwrap();
        let links = LinkSet::new([(0, 3)]);
        let (inst, _) = block_tap_to_ca_steiner(&tree, &links).unwrap();
        assert_eq!(inst.terminal_count(), 2);
        assert_eq!(inst.steiner_count(), 1);
        let s = inst.steiner_nodes()[0];
        assert_eq!(inst.graph.degree(s), 2);
    }

    #[test]
    fn cacap_crossing_diagonals() {
        let links = LinkSet::new([(0, 2), (1, 3)]);
        let (inst, _) = cacap_to_ca_steiner(&cycle_graph(4), &links).unwrap();
        assert_eq!(inst.terminal_count(), 4);
        assert_eq!(inst.steiner_count(), 2);
        let s = inst.steiner_nodes();
        assert!(inst.graph.has_edge(s[0], s[1]));
    }

    #[test]
    fn cacap_parallel_chords_do_not_cross() {
        // Links parallel to edges (0,1) and (2,3) of C4 sit on disjoint arcs.
        let links = LinkSet::new([(0, 1), (2, 3)]);
        let (inst, _) = cacap_to_ca_steiner(&cycle_graph(4), &links).unwrap();
        let s = inst.steiner_nodes();
        assert!(!inst.graph.has_edge(s[0], s[1]));
    }

    #[test]
    fn cacap_rejects_non_cactus() {
        let mut g = cycle_graph(4);
        g.add_edge(0, 2).unwrap();
        assert!(cacap_to_ca_steiner(&g, &LinkSet::new([(1, 3)])).is_err());
    }

    #[test]
    fn lift_preserves_cardinality_and_unknown_id_errors() {
        let (inst, trace) = reduce_one_node_cap(&path_graph(4), &LinkSet::new([(0, 3), (0, 2)])).unwrap();
        let all: BTreeSet<NodeId> = inst.back_map.keys().copied().collect();
        let lifted = lift_solution(&all, &trace).unwrap();
        assert_eq!(lifted.len(), all.len());
        assert!(lift_solution(&BTreeSet::from([999]), &trace).is_err());
        assert!(lift_solution(&BTreeSet::new(), &trace).unwrap().is_empty());
    }

    #[test]
    fn projections_sharing_a_cut_node_cross_across_cycles() {
        // Three glued cycles; links (1,3) and (3,6) meet at cut node 3 with
        // projections on different cycles and must still be adjacent, or
        // feasible solutions through that node stop being connected on the
        // Steiner side.
        let g = UndirGraph::from_edges(
            8,
            [
                (0, 1),
                (0, 3),
                (1, 2),
                (2, 3),
                (3, 4),
                (3, 5),
                (4, 5),
                (4, 6),
                (4, 7),
                (6, 7),
            ],
        )
        .unwrap();
        assert!(g.is_cactus());
        let links = LinkSet::new([(1, 3), (3, 6)]);
        let (inst, _) = cacap_to_ca_steiner(&g, &links).unwrap();
        let s = inst.steiner_nodes();
        assert_eq!(s.len(), 2);
        assert!(inst.graph.has_edge(s[0], s[1]));
    }

    #[test]
    fn crossing_relation_symmetric_and_shared_endpoint_on_cycle() {
        let n = 6;
        let g = cycle_graph(n);
        let links = LinkSet::new([(0, 2), (2, 4), (1, 4), (3, 5)]);
        let (inst, _) = cacap_to_ca_steiner(&g, &links).unwrap();
        let s = inst.steiner_nodes();
        // (0,2) and (2,4) share endpoint 2: must be adjacent.
        assert!(inst.graph.has_edge(s[0], s[1]));
        // Adjacency is symmetric by graph construction; spot-check pairs.
        for &a in &s {
            for &b in &s {
                assert_eq!(inst.graph.has_edge(a, b), inst.graph.has_edge(b, a));
            }
        }
    }
}
