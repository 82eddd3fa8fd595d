#![allow(dead_code)]

use logdp::WeightedDualGraph;
use proptest::prelude::*;
use proptest::sample::Index;

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Graph from weights and an upper-triangle multiplicity list.
pub fn graph_from(weights: &[i64], mults: &[i64]) -> WeightedDualGraph {
    let n = weights.len();
    let names = ids(n);
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mults[k] > 0 {
                edges.push((names[i].clone(), names[j].clone(), mults[k]));
            }
            k += 1;
        }
    }
    WeightedDualGraph::new(names.into_iter().zip(weights.iter().copied()), edges).unwrap()
}

pub fn tree_from(weights: &[i64], parents: &[Index]) -> WeightedDualGraph {
    let edges: Vec<(usize, usize)> = parents
        .iter()
        .enumerate()
        .map(|(k, p)| (p.index(k + 1), k + 1))
        .collect();
    WeightedDualGraph::from_index_edges(weights, &edges)
}

/// Random labelled tree with weights in `lo..=hi`.
pub fn arb_tree(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = WeightedDualGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(lo..=hi, n),
            prop::collection::vec(any::<Index>(), n - 1),
        )
            .prop_map(|(w, p)| tree_from(&w, &p))
    })
}

/// Random multigraph, multiplicities mostly 0 or 1.
pub fn arb_graph(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = WeightedDualGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(lo..=hi, n),
            prop::collection::vec(
                prop_oneof![3 => Just(0i64), 2 => Just(1i64), 1 => Just(2i64)],
                n * (n - 1) / 2,
            ),
        )
            .prop_map(|(w, m)| graph_from(&w, &m))
    })
}

pub fn with_perm(
    g: impl Strategy<Value = WeightedDualGraph>,
) -> impl Strategy<Value = (WeightedDualGraph, Vec<usize>)> {
    g.prop_flat_map(|g| {
        let n = g.len();
        (Just(g), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    })
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Isomorphism by trying every bijection.
pub fn brute_isomorphic(a: &WeightedDualGraph, b: &WeightedDualGraph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    permutations(n).into_iter().any(|p| {
        (0..n).all(|i| a.weight(i) == b.weight(p[i]))
            && (0..n).all(|i| (i + 1..n).all(|j| a.multiplicity(i, j) == b.multiplicity(p[i], p[j])))
    })
}
