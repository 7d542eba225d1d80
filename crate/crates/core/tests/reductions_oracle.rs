//! Exhaustive-subset oracles for the problem reductions: a link subset is
//! feasible for the source problem exactly when its image connects the
//! terminals of the reduced instance.

use std::collections::BTreeSet;

use augur_core::graph::{Tree, UndirGraph};
use augur_core::instance::{LinkSet, Link};
use augur_core::instances::{gen_random_cacap, gen_random_one_node_cap};
use augur_core::reductions::{
    block_tap_to_ca_steiner, cacap_to_ca_steiner, forward_image, lift_solution,
    one_node_cap_to_block_tap, reduce_one_node_cap, verify_augmentation, AugmentationMode,
};
use augur_core::rng::Rng;

fn subsets(links: &[Link]) -> impl Iterator<Item = Vec<Link>> + '_ {
    (0u32..(1 << links.len())).map(move |mask| {
        links
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &l)| l)
            .collect()
    })
}

#[test]
fn block_cut_stage_preserves_two_node_connectivity() {
    // 2NC(g + L') iff 2NC(tree + image(L') + zero links), all subsets.
    let mut rng = Rng::new(90);
    for trial in 0..40 {
        let n = rng.next_range(4, 9);
        let (g, links) = gen_random_one_node_cap(n, 6, rng.next_u64()).unwrap();
        let stage = one_node_cap_to_block_tap(&g, &links).unwrap();
        assert!(!stage.trivial);
        for subset in subsets(links.links()) {
            let feasible = verify_augmentation(&g, &subset, AugmentationMode::Node);
            let image: Vec<Link> = subset
                .iter()
                .filter_map(|l| stage.image.get(l).copied().flatten())
                .collect();
            let mut tree_links: Vec<Link> = stage.links.zeros().collect();
            tree_links.extend(image);
            let tree_feasible =
                verify_augmentation(stage.tree.graph(), &tree_links, AugmentationMode::Node);
            assert_eq!(feasible, tree_feasible, "trial {trial}, subset {subset:?}");
        }
    }
}

#[test]
fn incidence_stage_equates_tree_feasibility_with_terminal_connectivity() {
    // On the weighted tree stage: T + L' + L0 is 2-node-connected iff the
    // chosen Steiner nodes connect every terminal of the incidence instance.
    let mut rng = Rng::new(91);
    for trial in 0..40 {
        let n = rng.next_range(4, 9);
        let (g, links) = gen_random_one_node_cap(n, 6, rng.next_u64()).unwrap();
        let stage = one_node_cap_to_block_tap(&g, &links).unwrap();
        let (inst, trace) = block_tap_to_ca_steiner(&stage.tree, &stage.links).unwrap();
        let ones: Vec<Link> = stage.links.ones().collect();
        for subset in subsets(&ones) {
            let mut tree_links: Vec<Link> = stage.links.zeros().collect();
            tree_links.extend(subset.iter().copied());
            let feasible =
                verify_augmentation(stage.tree.graph(), &tree_links, AugmentationMode::Node);
            let image = forward_image(&subset, &trace);
            assert_eq!(
                feasible,
                inst.connects_terminals(&image),
                "trial {trial}, subset {subset:?}"
            );
        }
    }
}

#[test]
fn full_pipeline_equivalence_one_node_cap() {
    let mut rng = Rng::new(92);
    for trial in 0..30 {
        let n = rng.next_range(4, 10);
        let (g, links) = gen_random_one_node_cap(n, 7, rng.next_u64()).unwrap();
        let (inst, trace) = reduce_one_node_cap(&g, &links).unwrap();
        for subset in subsets(links.links()) {
            let feasible = verify_augmentation(&g, &subset, AugmentationMode::Node);
            let image = forward_image(&subset, &trace);
            let connected = trace.trivial || inst.connects_terminals(&image);
            assert_eq!(feasible, connected, "trial {trial}, subset {subset:?}");
        }
    }
}

#[test]
fn full_pipeline_equivalence_cactus() {
    let mut rng = Rng::new(93);
    for trial in 0..30 {
        let cycles = rng.next_range(1, 3);
        let (g, links) = gen_random_cacap(cycles, 6, 7, rng.next_u64()).unwrap();
        let (inst, trace) = cacap_to_ca_steiner(&g, &links).unwrap();
        for subset in subsets(links.links()) {
            let feasible = verify_augmentation(&g, &subset, AugmentationMode::Edge);
            let image = forward_image(&subset, &trace);
            assert_eq!(
                feasible,
                inst.connects_terminals(&image),
                "trial {trial}, subset {subset:?}"
            );
        }
    }
}

#[test]
fn lift_is_inverse_of_forward_on_chosen_sets() {
    let mut rng = Rng::new(94);
    for _ in 0..20 {
        let n = rng.next_range(4, 9);
        let (g, links) = gen_random_one_node_cap(n, 6, rng.next_u64()).unwrap();
        let (_, trace) = reduce_one_node_cap(&g, &links).unwrap();
        // Lift the full Steiner set; it must be feasible and size-preserving.
        let all: BTreeSet<usize> = trace.back.keys().copied().collect();
        let lifted = lift_solution(&all, &trace).unwrap();
        assert_eq!(lifted.len(), all.len());
        assert!(verify_augmentation(&g, &lifted, AugmentationMode::Node));
    }
}

#[test]
fn produced_instances_validate_clean() {
    let mut rng = Rng::new(95);
    for _ in 0..20 {
        let n = rng.next_range(4, 9);
        let (g, links) = gen_random_one_node_cap(n, 6, rng.next_u64()).unwrap();
        let (inst, _) = reduce_one_node_cap(&g, &links).unwrap();
        assert!(augur_core::instance::validate_ca_instance(&inst).is_empty());

        let (cg, clinks) = gen_random_cacap(2, 5, 6, rng.next_u64()).unwrap();
        let (cinst, _) = cacap_to_ca_steiner(&cg, &clinks).unwrap();
        assert!(augur_core::instance::validate_ca_instance(&cinst).is_empty());
    }
}

#[test]
fn hand_checked_star_block_tap() {
    // Star tree: pairwise leaf links each see two terminals and all cross.
    let star = UndirGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let tree = Tree::from_graph(star).unwrap();
    let links = LinkSet::new([(1, 2), (1, 3), (2, 3)]);
    let (inst, trace) = block_tap_to_ca_steiner(&tree, &links).unwrap();
    // Any single link joins 2 of 3 terminals: infeasible. Any two suffice.
    let all: Vec<Link> = links.links().to_vec();
    for subset in subsets(&all) {
        let image = forward_image(&subset, &trace);
        let expected = subset.len() >= 2;
        assert_eq!(inst.connects_terminals(&image), expected);
    }
}
