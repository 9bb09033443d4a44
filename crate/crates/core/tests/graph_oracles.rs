use std::collections::BTreeSet;

use proptest::prelude::*;

use pclh::graphs::Graph;
use pclh::perm::Perm;

/// Every orientation of every edge subset of `K_n`, kept when the underlying
/// undirected graph has no cycle. Cycle detection by union-find.
fn brute_force(n: usize) -> BTreeSet<String> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        let mut parent: Vec<usize> = (0..=n).collect();
        let find = |p: &Vec<usize>, mut x: usize| {
            while p[x] != x {
                x = p[x];
            }
            x
        };
        let mut forest = true;
        for &(a, b) in &edges {
            let (ra, rb) = (find(&parent, a), find(&parent, b));
            forest &= ra != rb;
            parent[ra] = rb;
        }
        if forest {
            out.insert(Graph::new(n, &edges).unwrap().to_string());
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for (n, count) in [(1, 1), (2, 3), (3, 19), (4, 201)] {
        let oracle = brute_force(n);
        assert_eq!(oracle.len(), count, "oracle n={n}");
        let listed: BTreeSet<String> = Graph::enumerate_acyclic(n, 6).unwrap().iter().map(Graph::to_string).collect();
        assert_eq!(listed, oracle, "n={n}");
    }
}

#[test]
fn enumeration_bound_is_enforced() {
    assert!(Graph::enumerate_acyclic(7, 6).is_err());
}

fn ten_graph() -> Graph {
    Graph::new(10, &[(1, 4), (2, 3), (4, 5), (5, 8), (6, 10), (8, 9)]).unwrap()
}

#[test]
fn ten_graph_cocomposition() {
    let (outer, inner) = ten_graph().cocompose(&[2, 4, 1, 3]).unwrap();
    let listed: Vec<String> = std::iter::once(&outer).chain(&inner).map(|g| format!("[{g}]")).collect();
    assert_eq!(listed.join(" "), "[4; 1->2, 1->2, 2->4, 2->4] [2;] [4; 2->3] [1;] [3; 1->2]");
}

#[test]
fn ten_graph_external_connectedness() {
    let g = ten_graph();
    for k in 1..=10 {
        let e: Vec<usize> = g.externally_connected(&[2, 4, 1, 3], k).unwrap().into_iter().collect();
        let expected: Vec<usize> = if k == 7 || k == 9 { vec![] } else { vec![1, 2, 4] };
        assert_eq!(e, expected, "vertex {k}");
    }
}

#[test]
fn relabeling_example() {
    let g: Graph = "5; 1->2, 1->3, 4->1, 5->4".parse().unwrap();
    let sigma = Perm::from_cycles(5, &[&[1, 2], &[3, 5, 4]]).unwrap();
    assert_eq!(g.permute(&sigma).unwrap().to_string(), "5; 2->1, 2->5, 3->2, 4->3");
}

#[test]
fn component_permutation_example() {
    let g: Graph = "5; 1->3, 2->4".parse().unwrap();
    let sigma = Perm::from_cycles(5, &[&[1, 4, 5], &[2, 3]]).unwrap();
    assert_eq!(g.tilde_sigma(&sigma).unwrap(), Perm::from_cycles(3, &[&[1, 3, 2]]).unwrap());
    assert_eq!(g.permute(&sigma).unwrap().components(), vec![vec![1], vec![2, 4], vec![3, 5]]);
}

#[test]
fn clasp_example() {
    let g: Graph = "7; 1->5, 3->4, 6->7".parse().unwrap();
    let parts = pclh::graphs::clasp_parts(5, 4, 3);
    let (outer, inner) = g.cocompose(&parts).unwrap();
    assert_eq!(outer.to_string(), "5; 1->4, 3->4, 4->5");
    assert_eq!(inner[3].to_string(), "3;");
    assert_eq!(g.rho(4, 3).unwrap().images(), vec![3, 1, 4, 2]);
}

fn acyclic_with_parts() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (1usize..=7).prop_flat_map(|n| {
        let edges = prop::collection::vec((1..=n, 1..=n, any::<bool>()), 0..n);
        let cuts = prop::collection::vec(any::<bool>(), n.saturating_sub(1));
        (Just(n), edges, cuts).prop_map(|(n, raw, cuts)| {
            let mut kept: Vec<(usize, usize)> = Vec::new();
            for (a, b, flip) in raw {
                if a == b {
                    continue;
                }
                let e = if flip { (b, a) } else { (a, b) };
                let mut trial = kept.clone();
                trial.push(e);
                if Graph::new(n, &trial).unwrap().is_acyclic() {
                    kept = trial;
                }
            }
            let mut parts = vec![1];
            for cut in cuts {
                if cut {
                    parts.push(1);
                } else {
                    *parts.last_mut().unwrap() += 1;
                }
            }
            (Graph::new(n, &kept).unwrap(), parts)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cocomposition_keeps_every_edge((g, parts) in acyclic_with_parts()) {
        let (outer, inner) = g.cocompose(&parts).unwrap();
        prop_assert_eq!(outer.n(), parts.len());
        let inner_edges: usize = inner.iter().map(|h| h.edges().len()).sum();
        prop_assert_eq!(outer.edges().len() + inner_edges, g.edges().len());
    }

    #[test]
    fn relabeling_preserves_component_sizes((g, _) in acyclic_with_parts(), seed in any::<u64>()) {
        let n = g.n();
        let all = Perm::all(n);
        let sigma = &all[(seed as usize) % all.len()];
        let h = g.permute(sigma).unwrap();
        let mut a: Vec<usize> = g.components().iter().map(Vec::len).collect();
        let mut b: Vec<usize> = h.components().iter().map(Vec::len).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        prop_assert_eq!(h.permute(&sigma.inverse()).unwrap(), g);
    }
}
