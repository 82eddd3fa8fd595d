//! Canonical keys for weighted multigraphs.
//!
//! Two graphs get equal keys iff there is a vertex bijection preserving
//! weights and edge multiplicities. Tree components are encoded by
//! weight-annotated rooted hashing from the centroid; components with a
//! cycle fall back to individualization-refinement with exhaustive
//! branching, which is affordable at the sizes used here.
//!
//! Every encoding is a prefix code over `i64`, so concatenating component
//! encodings stays injective.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::graph::WeightedDualGraph;

const TREE: i64 = 0;
const GENERAL: i64 = 1;

/// Opaque, totally ordered isomorphism invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<i64>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl std::fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn canonical_form(g: &WeightedDualGraph) -> CanonicalKey {
    let mut parts: Vec<Vec<i64>> = g
        .components()
        .into_iter()
        .map(|comp| {
            let sub = g.induced(&comp);
            if sub.is_tree() {
                tree_code(&sub)
            } else {
                general_code(&sub)
            }
        })
        .collect();
    parts.sort();
    let mut out = vec![parts.len() as i64];
    for p in parts {
        out.extend(p);
    }
    CanonicalKey(out)
}

pub fn isomorphic(a: &WeightedDualGraph, b: &WeightedDualGraph) -> bool {
    a.len() == b.len() && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}

fn adjacency(g: &WeightedDualGraph) -> Vec<Vec<(usize, i64)>> {
    let mut adj = vec![Vec::new(); g.len()];
    for (a, b, m) in g.edges() {
        adj[a].push((b, m));
        adj[b].push((a, m));
    }
    adj
}

fn centroids(adj: &[Vec<(usize, i64)>]) -> Vec<usize> {
    let n = adj.len();
    // iterative DFS order from vertex 0
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(u, _) in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if v != 0 {
            size[parent[v]] += size[v];
        }
    }
    let mut best = Vec::new();
    let mut best_load = usize::MAX;
    for v in 0..n {
        let mut load = n - size[v];
        for &(u, _) in &adj[v] {
            if u != 0 && parent[u] == v {
                load = load.max(size[u]);
            }
        }
        match load.cmp(&best_load) {
            Ordering::Less => {
                best_load = load;
                best = vec![v];
            }
            Ordering::Equal => best.push(v),
            Ordering::Greater => {}
        }
    }
    best
}

fn rooted_code(g: &WeightedDualGraph, adj: &[Vec<(usize, i64)>], v: usize, parent: usize) -> Vec<i64> {
    let mut children: Vec<(i64, Vec<i64>)> = adj[v]
        .iter()
        .filter(|&&(u, _)| u != parent)
        .map(|&(u, m)| (m, rooted_code(g, adj, u, v)))
        .collect();
    children.sort();
    let mut out = vec![g.weight(v), children.len() as i64];
    for (m, c) in children {
        out.push(m);
        out.extend(c);
    }
    out
}

fn tree_code(g: &WeightedDualGraph) -> Vec<i64> {
    let adj = adjacency(g);
    let best = centroids(&adj)
        .into_iter()
        .map(|c| rooted_code(g, &adj, c, usize::MAX))
        .min()
        .expect("nonempty tree has a centroid");
    let mut out = vec![TREE];
    out.extend(best);
    out
}

/// Replaces colors by the rank of each vertex's signature until stable.
fn refine(adj: &[Vec<(usize, i64)>], mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let sigs: Vec<(usize, Vec<(usize, i64)>)> = (0..adj.len())
            .map(|v| {
                let mut nb: Vec<(usize, i64)> = adj[v].iter().map(|&(u, m)| (colors[u], m)).collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&sigs);
        let before = distinct(&colors);
        let after = distinct(&next);
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items
        .iter()
        .map(|x| sorted.binary_search(x).expect("present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn encode_discrete(g: &WeightedDualGraph, colors: &[usize]) -> Vec<i64> {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| colors[v]);
    let mut out = Vec::with_capacity(2 + n + n * (n - 1) / 2);
    out.push(GENERAL);
    out.push(n as i64);
    out.extend(order.iter().map(|&v| g.weight(v)));
    for a in 0..n {
        for b in a + 1..n {
            out.push(g.multiplicity(order[a], order[b]));
        }
    }
    out
}

fn search(g: &WeightedDualGraph, adj: &[Vec<(usize, i64)>], colors: Vec<usize>, best: &mut Option<Vec<i64>>) {
    let colors = refine(adj, colors);
    let n = colors.len();
    if distinct(&colors) == n {
        let code = encode_discrete(g, &colors);
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    }
    // first color class with more than one member
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c] += 1;
    }
    let target = (0..n).find(|&c| counts[c] > 1).expect("non-discrete coloring");
    for v in (0..n).filter(|&v| colors[v] == target) {
        let split: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
        search(g, adj, rank(&split), best);
    }
}

fn general_code(g: &WeightedDualGraph) -> Vec<i64> {
    let adj = adjacency(g);
    let initial = rank(&g.weights());
    let mut best = None;
    search(g, &adj, initial, &mut best);
    best.expect("search visits at least one leaf")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(w: &[i64]) -> WeightedDualGraph {
        WeightedDualGraph::chain(w)
    }

    #[test]
    fn chain_reflections() {
        assert_eq!(
            canonical_form(&chain(&[-4, -2, -4])),
            canonical_form(&chain(&[-4, -2, -4]).permuted(&[2, 1, 0]))
        );
        assert_eq!(canonical_form(&chain(&[-2, -5])), canonical_form(&chain(&[-5, -2])));
        assert_ne!(canonical_form(&chain(&[-2, -5])), canonical_form(&chain(&[-2, -4])));
        assert_ne!(
            canonical_form(&chain(&[-2, -3, -4])),
            canonical_form(&chain(&[-3, -2, -4]))
        );
    }

    #[test]
    fn multiplicity_matters() {
        let a = WeightedDualGraph::from_index_edges(&[-1, -1], &[(0, 1)]);
        let b = WeightedDualGraph::from_parts(a.vertices().to_vec(), [((0, 1), 2)].into_iter().collect());
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn cycles_and_forests() {
        let tri = WeightedDualGraph::from_index_edges(&[-1, -2, -1], &[(0, 1), (1, 2), (0, 2)]);
        let tri2 = tri.permuted(&[1, 2, 0]);
        assert_eq!(canonical_form(&tri), canonical_form(&tri2));
        let path = WeightedDualGraph::from_index_edges(&[-1, -2, -1], &[(0, 1), (1, 2)]);
        assert_ne!(canonical_form(&tri), canonical_form(&path));
        // 6-cycle vs two triangles, equal degree sequences
        let hex = WeightedDualGraph::from_index_edges(&[-2; 6], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let two = WeightedDualGraph::from_index_edges(&[-2; 6], &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_ne!(canonical_form(&hex), canonical_form(&two));
        let forest = WeightedDualGraph::from_index_edges(&[-3, -2, -2], &[(1, 2)]);
        assert_eq!(canonical_form(&forest), canonical_form(&forest.permuted(&[2, 0, 1])));
    }

    #[test]
    fn bicentral_tree() {
        let g = chain(&[-2, -3, -3, -2]);
        assert_eq!(canonical_form(&g), canonical_form(&g.permuted(&[3, 2, 1, 0])));
        assert_ne!(canonical_form(&g), canonical_form(&chain(&[-3, -2, -3, -2])));
    }
}
