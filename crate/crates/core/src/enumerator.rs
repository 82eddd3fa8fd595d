//! Enumeration of index-three exceptional trees and the nine families.
//!
//! Candidate generation comes in two flavours. [`generate_trees`] is the
//! literal stream of every weighted tree in a weight box; it is exhaustive
//! and exponential in `n`, so it is only used for small sizes and as a
//! cross-check. [`enumerate_index3`] instead walks coefficient vectors:
//! for a contractible tree with weights at most -2 the discrepancies lie in
//! `[0, 1)`, vanish on a whole component or nowhere, and have denominator
//! three exactly when the index is three, so every survivor has all
//! `a_j in {1/3, 2/3}`. Given such a vector the adjunction equation at each
//! vertex pins its weight, which is then checked against the solver.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalKey};
use crate::discrepancy::solve_discrepancies;
use crate::graph::{Vertex, WeightedDualGraph};
use crate::{Discrepancies, Rational};

pub const DEFAULT_WEIGHT_MIN: i64 = -8;
pub const DEFAULT_MAX_N: usize = 10;

/// Unlabelled tree on `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl TreeShape {
    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// At most one vertex of degree three and none of higher degree.
    pub fn is_dynkin_like(&self) -> bool {
        is_dynkin_degrees(&self.degrees())
    }

    pub fn with_weights(&self, w: &[i64]) -> WeightedDualGraph {
        WeightedDualGraph::from_index_edges(w, &self.edges)
    }
}

fn is_dynkin_degrees(d: &[usize]) -> bool {
    d.iter().all(|&x| x <= 3) && d.iter().filter(|&&x| x == 3).count() <= 1
}

/// At most one branch vertex, of degree exactly three.
pub fn has_dynkin_shape(g: &WeightedDualGraph) -> bool {
    is_dynkin_degrees(&g.degrees())
}

/// All trees on `n` vertices up to isomorphism. Restricted mode keeps only
/// chains and three-armed forks.
pub fn tree_shapes(n: usize, permissive: bool) -> Vec<TreeShape> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![TreeShape { n: 1, edges: vec![] }];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for t in &level {
            for v in 0..t.n {
                let mut edges = t.edges.clone();
                edges.push((v, t.n));
                let cand = TreeShape { n: size, edges };
                if !permissive && !cand.is_dynkin_like() {
                    continue;
                }
                if seen.insert(canonical_form(&cand.with_weights(&vec![0; size]))) {
                    next.push(cand);
                }
            }
        }
        level = next;
    }
    level
}

/// Lazy stream of every weighted tree on `n` vertices with weights in
/// `[weight_min, -2]`, deduplicated up to isomorphism.
pub struct TreeStream {
    shapes: Vec<TreeShape>,
    shape: usize,
    digits: Vec<i64>,
    weight_min: i64,
    fresh: bool,
    seen: HashSet<CanonicalKey>,
}

impl Iterator for TreeStream {
    type Item = WeightedDualGraph;

    fn next(&mut self) -> Option<WeightedDualGraph> {
        loop {
            if self.shape >= self.shapes.len() {
                return None;
            }
            if self.fresh {
                self.fresh = false;
            } else if !self.advance() {
                self.shape += 1;
                self.digits.iter_mut().for_each(|d| *d = -2);
                self.fresh = true;
                continue;
            }
            let g = self.shapes[self.shape].with_weights(&self.digits);
            if self.seen.insert(canonical_form(&g)) {
                return Some(g);
            }
        }
    }
}

impl TreeStream {
    // odometer from -2 down to weight_min
    fn advance(&mut self) -> bool {
        for d in self.digits.iter_mut() {
            if *d > self.weight_min {
                *d -= 1;
                return true;
            }
            *d = -2;
        }
        false
    }
}

pub fn generate_trees(n: usize, weight_min: i64, permissive: bool) -> TreeStream {
    assert!(n >= 1, "tree size must be positive");
    assert!(weight_min <= -2, "weights range over [weight_min, -2]");
    TreeStream {
        shapes: tree_shapes(n, permissive),
        shape: 0,
        digits: vec![-2; n],
        weight_min,
        fresh: true,
        seen: HashSet::new(),
    }
}

fn is_index3(d: &Discrepancies) -> bool {
    d.log_terminal && d.cartier_index == 3
}

/// Index-three trees realised on one shape, via coefficient vectors.
fn index3_on_shape(shape: &TreeShape, weight_min: i64) -> Vec<WeightedDualGraph> {
    let n = shape.n;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &shape.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut out = Vec::new();
    'mask: for mask in 0u32..(1 << n) {
        // a_i = thirds[i] / 3
        let thirds: Vec<i64> = (0..n).map(|i| 1 + ((mask >> i) & 1) as i64).collect();
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // (thirds_i - 3) w_i = 6 - sum of neighbour thirds
            let s: i64 = adj[i].iter().map(|&j| thirds[j]).sum();
            let (num, den) = (s - 6, 3 - thirds[i]);
            if num % den != 0 {
                continue 'mask;
            }
            let w = num / den;
            if w > -2 || w < weight_min {
                continue 'mask;
            }
            weights.push(w);
        }
        let g = shape.with_weights(&weights);
        if let Ok(d) = solve_discrepancies(&g) {
            if is_index3(&d) {
                out.push(g);
            }
        }
    }
    out
}

fn merge(graphs: impl IntoIterator<Item = WeightedDualGraph>) -> Vec<WeightedDualGraph> {
    let mut by_key: BTreeMap<(usize, CanonicalKey), WeightedDualGraph> = BTreeMap::new();
    for g in graphs {
        by_key.entry((g.len(), canonical_form(&g))).or_insert(g);
    }
    by_key.into_values().collect()
}

/// Every log-terminal tree of Cartier index three with at most `max_n`
/// vertices and weights in `[weight_min, -2]`, sorted by size then key.
pub fn enumerate_index3(max_n: usize, weight_min: i64) -> Vec<WeightedDualGraph> {
    enumerate_index3_with(max_n, weight_min, false)
}

/// As [`enumerate_index3`]; `permissive` searches all tree shapes instead
/// of chains and forks only.
pub fn enumerate_index3_with(max_n: usize, weight_min: i64, permissive: bool) -> Vec<WeightedDualGraph> {
    let shapes: Vec<TreeShape> = (1..=max_n).flat_map(|n| tree_shapes(n, permissive)).collect();
    let found: Vec<WeightedDualGraph> = shapes
        .par_iter()
        .flat_map_iter(|s| index3_on_shape(s, weight_min))
        .collect();
    merge(found)
}

/// Filters the exhaustive tree stream through the solver. Exponential; for
/// cross-checking small sizes.
pub fn enumerate_index3_exhaustive(max_n: usize, weight_min: i64, permissive: bool) -> Vec<WeightedDualGraph> {
    let found: Vec<WeightedDualGraph> = (1..=max_n)
        .into_par_iter()
        .flat_map_iter(|n| {
            generate_trees(n, weight_min, permissive).filter(|g| solve_discrepancies(g).is_ok_and(|d| is_index3(&d)))
        })
        .collect();
    merge(found)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyLabel {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
}

impl FamilyLabel {
    pub const ALL: [FamilyLabel; 9] = [
        Self::I,
        Self::II,
        Self::III,
        Self::IV,
        Self::V,
        Self::VI,
        Self::VII,
        Self::VIII,
        Self::IX,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::V => "V",
            Self::VI => "VI",
            Self::VII => "VII",
            Self::VIII => "VIII",
            Self::IX => "IX",
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyShape {
    Chain,
    Fork,
}

/// Spine `prefix + repeat^k + suffix`; a fork carries one extra leaf on the
/// second-to-last spine vertex. `exceptional` lists explicit spines for
/// sizes below the generic minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightPattern {
    pub prefix: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<i64>,
    #[serde(default)]
    pub suffix: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_leaf: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exceptional: Vec<(usize, Vec<i64>)>,
}

impl WeightPattern {
    fn fixed_len(&self) -> usize {
        self.prefix.len() + self.suffix.len() + usize::from(self.branch_leaf.is_some())
    }

    /// Smallest size with an instance.
    pub fn min_n(&self) -> usize {
        self.exceptional
            .iter()
            .map(|(n, _)| *n)
            .chain(std::iter::once(self.fixed_len()))
            .min()
            .expect("nonempty")
    }

    pub fn spine(&self, n: usize) -> Option<Vec<i64>> {
        if let Some((_, s)) = self.exceptional.iter().find(|(m, _)| *m == n) {
            return Some(s.clone());
        }
        let fixed = self.fixed_len();
        if n < fixed || (self.repeat.is_none() && n != fixed) {
            return None;
        }
        let mut spine = self.prefix.clone();
        spine.extend(std::iter::repeat_n(self.repeat.unwrap_or(-2), n - fixed));
        spine.extend(&self.suffix);
        Some(spine)
    }

    /// The size-`n` member, spine ids `D1..Dm` and the extra leaf last.
    pub fn instance(&self, n: usize) -> Option<WeightedDualGraph> {
        let spine = self.spine(n)?;
        let chain = WeightedDualGraph::chain(&spine);
        match self.branch_leaf {
            None => Some(chain),
            Some(w) => {
                let m = spine.len();
                if m < 2 {
                    return None;
                }
                let mut vertices = chain.vertices().to_vec();
                vertices.push(Vertex {
                    id: format!("D{}", m + 1),
                    weight: w,
                });
                let mut edges: BTreeMap<(usize, usize), i64> = chain.edges().map(|(a, b, k)| ((a, b), k)).collect();
                edges.insert((m - 2, m), 1);
                Some(WeightedDualGraph::from_parts(vertices, edges))
            }
        }
    }

    /// Human-readable form, e.g. `-4, -2...-2, -4`.
    pub fn describe(&self) -> String {
        let join = |w: &[i64]| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut parts = Vec::new();
        if !self.prefix.is_empty() {
            parts.push(join(&self.prefix));
        }
        if let Some(r) = self.repeat {
            parts.push(format!("({r})*"));
        }
        if !self.suffix.is_empty() {
            parts.push(join(&self.suffix));
        }
        let mut s = parts.join(", ");
        if let Some(b) = self.branch_leaf {
            s.push_str(&format!(" + leaf {b} at second-to-last"));
        }
        s
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.min == self.max {
            write!(f, "n={}", self.min)
        } else {
            write!(f, "{}<=n<={}", self.min, self.max)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub label: FamilyLabel,
    pub shape: FamilyShape,
    pub pattern: WeightPattern,
    pub size_range: SizeRange,
}

impl FamilyRecord {
    pub fn instance(&self, n: usize) -> Option<WeightedDualGraph> {
        self.pattern.instance(n)
    }
}

/// Result of the positivity bound `n < 8 + sum a_j (-2 - D_j^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeBound {
    pub range: SizeRange,
    /// Right-hand side `8 + sum a_j (-2 - D_j^2)` at the largest admissible size.
    pub bound: Rational,
}

/// Largest size whose instance still has `(K_X̄)^2 > 0`.
pub fn apply_size_bound(family: &FamilyRecord) -> Option<SizeBound> {
    const CAP: usize = 64;
    let min = family.pattern.min_n();
    let mut best: Option<(usize, Rational)> = None;
    for n in min..=CAP {
        let Some(g) = family.instance(n) else {
            if family.pattern.repeat.is_none() {
                break;
            }
            continue;
        };
        let d = solve_discrepancies(&g).ok()?;
        if d.k_bar_squared <= Rational::from_integer(0) {
            break;
        }
        let bound = d.k_bar_squared + Rational::from_integer(n as i128);
        best = Some((n, bound));
    }
    best.map(|(max, bound)| SizeBound {
        range: SizeRange { min, max },
        bound,
    })
}

/// Matches `g` against the family patterns (at any size, bound or not).
pub fn classify_family_in(families: &[FamilyRecord], g: &WeightedDualGraph) -> Option<(FamilyLabel, usize)> {
    let key = canonical_form(g);
    let n = g.len();
    let mut hits = families
        .iter()
        .filter(|f| f.instance(n).is_some_and(|inst| canonical_form(&inst) == key));
    let first = hits.next()?;
    if hits.next().is_some() {
        return None;
    }
    Some((first.label, n))
}

pub fn classify_family(g: &WeightedDualGraph) -> Option<(FamilyLabel, usize)> {
    classify_family_in(&crate::refdata::load_reference().families, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights_sorted(g: &WeightedDualGraph) -> Vec<i64> {
        let mut w = g.weights();
        w.sort();
        w
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| tree_shapes(n, true).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
        // chains plus forks with three arms summing to n - 1
        assert_eq!(tree_shapes(4, false).len(), 2);
        assert_eq!(tree_shapes(7, false).len(), 1 + 3);
        assert!(tree_shapes(8, false).iter().all(|t| t.is_dynkin_like()));
    }

    #[test]
    fn stream_examples() {
        assert_eq!(generate_trees(1, -6, false).count(), 5);
        let two: Vec<Vec<i64>> = generate_trees(2, -3, false).map(|g| weights_sorted(&g)).collect();
        assert_eq!(two.len(), 3);
        for w in [vec![-2, -2], vec![-3, -2], vec![-3, -3]] {
            assert!(two.contains(&w));
        }
        assert_eq!(generate_trees(4, -2, false).count(), 2);
    }

    #[test]
    fn small_index3_sets() {
        let keys = |v: Vec<WeightedDualGraph>| v.iter().map(canonical_form).collect::<HashSet<_>>();
        let chains = |ws: &[&[i64]]| {
            ws.iter()
                .map(|w| canonical_form(&WeightedDualGraph::chain(w)))
                .collect::<HashSet<_>>()
        };
        assert_eq!(keys(enumerate_index3(1, -8)), chains(&[&[-3], &[-6]]));
        assert_eq!(
            keys(enumerate_index3(2, -8)),
            chains(&[&[-3], &[-6], &[-2, -5], &[-4, -4]])
        );
        assert_eq!(
            keys(enumerate_index3(3, -8)),
            chains(&[
                &[-3],
                &[-6],
                &[-2, -5],
                &[-4, -4],
                &[-2, -4, -2],
                &[-4, -2, -4],
                &[-2, -3, -4]
            ])
        );
    }

    #[test]
    fn guided_matches_exhaustive_small() {
        for n in 1..=3 {
            let a: Vec<_> = enumerate_index3_with(n, -12, true).iter().map(canonical_form).collect();
            let b: Vec<_> = enumerate_index3_exhaustive(n, -12, true)
                .iter()
                .map(canonical_form)
                .collect();
            assert_eq!(a, b, "n = {n}");
        }
    }

    #[test]
    fn pattern_instances() {
        let ix = WeightPattern {
            prefix: vec![-2, -3],
            repeat: Some(-2),
            suffix: vec![-2, -2],
            branch_leaf: Some(-2),
            exceptional: vec![(4, vec![-2, -3, -2])],
        };
        assert_eq!(ix.min_n(), 4);
        let g4 = ix.instance(4).unwrap();
        assert_eq!(g4.degrees(), vec![1, 3, 1, 1]);
        assert_eq!(g4.weight(1), -3);
        let g6 = ix.instance(6).unwrap();
        assert_eq!(g6.weights(), vec![-2, -3, -2, -2, -2, -2]);
        assert_eq!(g6.degree(3), 3);
        assert!(ix.instance(3).is_none());
        let fixed = WeightPattern {
            prefix: vec![-2, -5],
            repeat: None,
            suffix: vec![],
            branch_leaf: None,
            exceptional: vec![],
        };
        assert!(fixed.instance(2).is_some());
        assert!(fixed.instance(3).is_none());
    }
}
