mod common;

use std::collections::{BTreeSet, HashMap};

use common::random_instance;
use fairmatch::graph::Graph;
use fairmatch::model::Side;
use fairmatch::structure::{
    decomposition_from_order, elimination_order, exact_elimination_order, feedback_edge_set, make_nice, order_width,
    tree_decomposition, treedepth_exact_small, treedepth_upper, twin_partition, Heuristic, NodeKind, TreeDecomposition,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(seed: u64, n: usize, p: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
        .collect()
}

/// Connected components of the vertex set `mask`.
fn split(adj: &[u32], mask: u32) -> Vec<u32> {
    let mut rest = mask;
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let grown = comp
                | (0..adj.len())
                    .filter(|&v| comp >> v & 1 == 1)
                    .fold(0, |m, v| m | adj[v])
                    & mask;
            if grown == comp {
                break;
            }
            comp = grown;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

/// `td` by the recursive definition: one more than the best root removal
/// on a connected graph, the maximum over components otherwise.
fn brute_treedepth(adj: &[u32], mask: u32, memo: &mut HashMap<u32, usize>) -> usize {
    if mask == 0 {
        return 0;
    }
    if let Some(&d) = memo.get(&mask) {
        return d;
    }
    let comps = split(adj, mask);
    let d = if comps.len() > 1 {
        comps.iter().map(|&c| brute_treedepth(adj, c, memo)).max().unwrap()
    } else {
        1 + (0..adj.len())
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| brute_treedepth(adj, mask & !(1 << v), memo))
            .min()
            .unwrap()
    };
    memo.insert(mask, d);
    d
}

/// Treewidth as the best elimination order over all permutations.
fn brute_treewidth(g: &Graph) -> usize {
    fn width_of(g: &Graph, order: &[usize]) -> usize {
        let mut adj: Vec<BTreeSet<usize>> = (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        let mut w = 0;
        for &v in order {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            w = w.max(nb.len());
            for &a in &nb {
                adj[a].remove(&v);
                for &b in &nb {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        w
    }
    fn rec(g: &Graph, order: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut usize) {
        if order.len() == g.n() {
            *best = (*best).min(width_of(g, order));
            return;
        }
        for v in 0..g.n() {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(g, order, used, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut best = usize::MAX;
    rec(g, &mut Vec::new(), &mut vec![false; g.n()], &mut best);
    if g.n() == 0 {
        0
    } else {
        best
    }
}

#[test]
fn treedepth_matches_definition() {
    for seed in 0..150 {
        let n = 1 + seed as usize % 8;
        let g = random_graph(seed, n, 0.2 + (seed % 5) as f64 * 0.15);
        let expected = brute_treedepth(&adjacency_masks(&g), (1u32 << n) - 1, &mut HashMap::new());
        assert_eq!(treedepth_exact_small(&g).unwrap(), expected, "seed {seed}");
        let up = treedepth_upper(&g);
        assert!(up.depth >= expected);
    }
}

#[test]
fn exact_treewidth_matches_permutations() {
    for seed in 0..60 {
        let n = 1 + seed as usize % 7;
        let g = random_graph(seed, n, 0.5);
        let order = exact_elimination_order(&g).unwrap();
        assert_eq!(order_width(&g, &order), brute_treewidth(&g), "seed {seed}");
        let td = decomposition_from_order(&g, &order);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), brute_treewidth(&g));
    }
}

#[test]
fn heuristic_decompositions_are_valid() {
    for seed in 0..100 {
        let g = random_graph(seed, 5 + seed as usize % 30, 0.15);
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let order = elimination_order(&g, h);
            let td = decomposition_from_order(&g, &order);
            td.validate(&g).unwrap();
            assert_eq!(td.width(), order_width(&g, &order));
        }
    }
}

#[test]
fn validator_rejects_broken_decompositions() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
    let good = TreeDecomposition {
        bags: vec![vec![0, 1], vec![1, 2]],
        tree_edges: vec![(0, 1)],
    };
    good.validate(&g).unwrap();
    let missing_edge = TreeDecomposition {
        bags: vec![vec![0, 1], vec![2]],
        tree_edges: vec![(0, 1)],
    };
    assert!(missing_edge.validate(&g).is_err());
    let missing_vertex = TreeDecomposition {
        bags: vec![vec![0, 1]],
        tree_edges: vec![],
    };
    assert!(missing_vertex.validate(&g).is_err());
    let disconnected = TreeDecomposition {
        bags: vec![vec![0, 1], vec![2], vec![1, 2]],
        tree_edges: vec![(0, 1), (1, 2)],
    };
    assert!(disconnected.validate(&g).is_err());
    let not_a_tree = TreeDecomposition {
        bags: vec![vec![0, 1], vec![1, 2]],
        tree_edges: vec![],
    };
    assert!(not_a_tree.validate(&g).is_err());
}

#[test]
fn pace_round_trip() {
    for seed in 0..50 {
        let inst = random_instance(seed, 6, 4, 2, 0.4, 1, false);
        let td = tree_decomposition(&inst);
        let text = td.to_pace(inst.num_vertices());
        let (back, n) = TreeDecomposition::from_pace(&text).unwrap();
        assert_eq!(n, inst.num_vertices());
        assert_eq!(back, td);
        back.validate(&inst.graph()).unwrap();
    }
    let bad = "s td 2 2 3\nb 1 1 2\nb 2 2 4\n1 2\n";
    assert!(TreeDecomposition::from_pace(bad).is_err());
    assert!(TreeDecomposition::from_pace("b 1 1\n").is_err());
}

#[test]
fn nice_decompositions_at_every_root() {
    for seed in 0..60 {
        let inst = random_instance(seed, 7, 4, 2, 0.4, 1, false);
        let g = inst.graph();
        let td = tree_decomposition(&inst);
        for root in 0..td.bags.len() {
            let ntd = make_nice(&td, root).unwrap();
            ntd.validate(&g).unwrap();
            assert_eq!(ntd.width(), td.width());
            let introduced = ntd
                .nodes
                .iter()
                .filter(|n| matches!(n.kind, NodeKind::Introduce(_)))
                .count();
            let forgotten = ntd
                .nodes
                .iter()
                .filter(|n| matches!(n.kind, NodeKind::Forget(_)))
                .count();
            let leaves = ntd.nodes.iter().filter(|n| n.kind == NodeKind::Leaf).count();
            assert_eq!(forgotten, g.n());
            assert_eq!(leaves, ntd.num_joins() + 1);
            assert!(introduced >= g.n());
        }
        assert!(make_nice(&td, td.bags.len()).is_err());
    }
}

#[test]
fn feedback_edges_leave_a_forest() {
    for seed in 0..100 {
        let inst = random_instance(seed, 8, 5, 2, 0.35, 1, false);
        let f = feedback_edge_set(&inst);
        let g = inst.graph();
        let c = g.num_components();
        assert_eq!(f.len() + g.n(), g.num_edges() + c);
        let kept = inst
            .edges()
            .iter()
            .filter(|e| !f.contains(e))
            .map(|&(u, v)| (u, inst.global_v(v)));
        assert!(Graph::from_edges(g.n(), kept).is_acyclic());
    }
}

#[test]
fn twin_classes_are_neighborhood_classes() {
    for seed in 0..100 {
        let mut inst = random_instance(seed, 6, 5, 2, 0.5, 1, true);
        let g = inst.graph();
        if (0..g.n()).any(|v| g.degree(v) == 0) {
            assert!(twin_partition(&inst).is_err());
            inst = random_instance(seed, 4, 3, 2, 1.0, 1, true);
        }
        let g = inst.graph();
        let part = twin_partition(&inst).unwrap();
        let nbhd = |side: Side, x: usize| -> BTreeSet<usize> {
            let global = if side == Side::U { x } else { inst.global_v(x) };
            g.neighbors(global).iter().copied().collect()
        };
        let mut reps = Vec::new();
        for class in &part.classes {
            let first = nbhd(class.side, class.members[0]);
            for &m in &class.members {
                assert_eq!(nbhd(class.side, m), first);
            }
            reps.push(first);
        }
        let distinct: BTreeSet<_> = reps.iter().cloned().collect();
        assert_eq!(distinct.len(), reps.len());
        assert_eq!(part.nd(), part.classes.len());
        assert_eq!(part.classes.iter().map(|c| c.members.len()).sum::<usize>(), g.n());
    }
}

proptest! {
    #[test]
    fn produced_decompositions_validate(seed in any::<u64>(), nu in 1usize..10, nv in 1usize..6, p in 0.1f64..0.9) {
        let inst = random_instance(seed, nu, nv, 2, p, 1, false);
        let td = tree_decomposition(&inst);
        prop_assert!(td.validate(&inst.graph()).is_ok());
        let ntd = make_nice(&td, seed as usize % td.bags.len()).unwrap();
        prop_assert!(ntd.validate(&inst.graph()).is_ok());
        prop_assert!(ntd.nodes[ntd.root()].bag.is_empty());
    }
}
