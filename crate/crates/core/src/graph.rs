//! Weighted dual graphs and their intersection matrices.
//!
//! A vertex is an irreducible curve weighted by its self-intersection; an
//! edge records the intersection number of two distinct curves. Edges of
//! multiplicity above one and cycles are representable; blow-downs of
//! simple normal crossing configurations produce them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    #[serde(rename = "w")]
    pub weight: i64,
}

/// Weighted dual graph with an ordered vertex list.
///
/// Edges are stored by vertex index with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedDualGraph {
    vertices: Vec<Vertex>,
    edges: BTreeMap<(usize, usize), i64>,
}

/// Symmetric integer matrix of pairwise intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionMatrix(Matrix<Int>);

impl IntersectionMatrix {
    /// Panics if `m` is not symmetric.
    pub fn new(m: Matrix<Int>) -> Self {
        assert!(m.is_symmetric(), "intersection matrix must be symmetric");
        Self(m)
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        Self::new(Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Int::from).collect())
                .collect(),
        ))
    }

    pub fn matrix(&self) -> &Matrix<Int> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        i64::try_from(self.0[(i, j)]).expect("intersection number fits in i64")
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_negative_definite(&self) -> bool {
        self.0.is_negative_definite()
    }

    /// `|det M|`.
    pub fn discriminant(&self) -> Int {
        self.0.determinant().abs()
    }
}

pub fn is_negative_definite(m: &IntersectionMatrix) -> bool {
    m.is_negative_definite()
}

pub fn discriminant(m: &IntersectionMatrix) -> Int {
    m.discriminant()
}

pub fn intersection_matrix(g: &WeightedDualGraph) -> IntersectionMatrix {
    g.intersection_matrix()
}

impl WeightedDualGraph {
    /// Validating constructor over string ids.
    pub fn new<I, E>(vertices: I, edges: E) -> Result<Self>
    where
        I: IntoIterator<Item = (String, i64)>,
        E: IntoIterator<Item = (String, String, i64)>,
    {
        let vertices: Vec<Vertex> = vertices.into_iter().map(|(id, weight)| Vertex { id, weight }).collect();
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }
        let mut out = Self {
            vertices,
            edges: BTreeMap::new(),
        };
        for (a, b, mult) in edges {
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a));
            }
            if mult < 1 {
                return Err(Error::BadMultiplicity { a, b, mult });
            }
            if out.edges.insert((ia.min(ib), ia.max(ib)), mult).is_some() {
                return Err(Error::DuplicateEdge(a, b));
            }
        }
        Ok(out)
    }

    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Index-based constructor for internal callers that already hold a
    /// well-formed edge set.
    pub(crate) fn from_parts(vertices: Vec<Vertex>, edges: BTreeMap<(usize, usize), i64>) -> Self {
        debug_assert!(edges.iter().all(|(&(i, j), &m)| i < j && j < vertices.len() && m > 0));
        Self { vertices, edges }
    }

    /// Linear chain with ids `D1..Dn`.
    pub fn chain(weights: &[i64]) -> Self {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Vertex {
                id: format!("D{}", i + 1),
                weight: w,
            })
            .collect();
        let edges = (1..weights.len()).map(|i| ((i - 1, i), 1)).collect();
        Self { vertices, edges }
    }

    /// Builds a graph from index pairs with multiplicity one and default ids.
    pub fn from_index_edges(weights: &[i64], edges: &[(usize, usize)]) -> Self {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Vertex {
                id: format!("D{}", i + 1),
                weight: w,
            })
            .collect();
        let edges = edges.iter().map(|&(a, b)| ((a.min(b), a.max(b)), 1)).collect();
        Self::from_parts(vertices, edges)
    }

    /// Inverse of [`intersection_matrix`](Self::intersection_matrix).
    pub fn from_matrix(ids: &[String], m: &IntersectionMatrix) -> Self {
        assert_eq!(ids.len(), m.dim());
        let n = m.dim();
        let vertices = ids
            .iter()
            .enumerate()
            .map(|(i, id)| Vertex {
                id: id.clone(),
                weight: m.entry(i, i),
            })
            .collect();
        let mut edges = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let e = m.entry(i, j);
                assert!(e >= 0, "distinct curves meet non-negatively");
                if e > 0 {
                    edges.insert((i, j), e);
                }
            }
        }
        Self { vertices, edges }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn weights(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.weight).collect()
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.vertices[i].weight
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn ids(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.id.clone()).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Edges as `(i, j, multiplicity)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges.iter().map(|(&(i, j), &m)| (i, j, m))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> i64 {
        self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn neighbors(&self, i: usize) -> Vec<(usize, i64)> {
        self.edges()
            .filter_map(|(a, b, m)| {
                if a == i {
                    Some((b, m))
                } else if b == i {
                    Some((a, m))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges().filter(|&(a, b, _)| a == i || b == i).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.len()];
        for (a, b, _) in self.edges() {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn intersection_matrix(&self) -> IntersectionMatrix {
        let n = self.len();
        let mut m = Matrix::<Int>::zeros(n);
        for (i, v) in self.vertices.iter().enumerate() {
            m[(i, i)] = Int::from(v.weight);
        }
        for (i, j, mult) in self.edges() {
            m[(i, j)] = Int::from(mult);
            m[(j, i)] = Int::from(mult);
        }
        IntersectionMatrix::new(m)
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for (a, b, _) in self.edges() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.components().len() == 1
    }

    /// Connected and acyclic; multiplicities are not inspected.
    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.is_connected() && self.edge_count() + 1 == self.len()
    }

    /// Every component acyclic.
    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.len()
    }

    /// Connected, acyclic, and every multiplicity equal to one.
    pub fn is_snc_tree(&self) -> bool {
        self.is_tree() && self.edges().all(|(_, _, m)| m == 1)
    }

    /// Induced subgraph on `idx` in that order.
    pub fn induced(&self, idx: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let vertices = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        let edges = self
            .edges()
            .filter(|&(a, b, _)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|(a, b, m)| {
                let (x, y) = (pos[a], pos[b]);
                ((x.min(y), x.max(y)), m)
            })
            .collect();
        Self { vertices, edges }
    }

    /// Removes vertex `i` and its incident edges.
    pub fn without(&self, i: usize) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&k| k != i).collect();
        self.induced(&keep)
    }

    /// Appends a vertex joined to `attach` (if any) with multiplicity one.
    pub fn with_vertex(&self, id: &str, weight: i64, attach: Option<usize>) -> Result<Self> {
        if self.index_of(id).is_some() {
            return Err(Error::DuplicateVertex(id.to_string()));
        }
        let mut out = self.clone();
        out.vertices.push(Vertex {
            id: id.to_string(),
            weight,
        });
        if let Some(t) = attach {
            if t >= self.len() {
                return Err(Error::UnknownVertex(format!("#{t}")));
            }
            out.edges.insert((t, self.len()), 1);
        }
        Ok(out)
    }

    /// Reorders vertices so that new position `k` holds old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        self.induced(perm)
    }

    /// Same structure with ids replaced.
    pub fn renamed(&self, ids: Vec<String>) -> Self {
        assert_eq!(ids.len(), self.len());
        let vertices = ids
            .into_iter()
            .zip(&self.vertices)
            .map(|(id, v)| Vertex { id, weight: v.weight })
            .collect();
        Self {
            vertices,
            edges: self.edges.clone(),
        }
    }

    /// Graphviz rendering; node labels carry the self-intersection and
    /// edge labels appear only for multiplicities above one.
    pub fn to_dot(&self, name: &str, highlight: Option<usize>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph \"{}\" {{", escape(name));
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if Some(i) == highlight { ", shape=box" } else { "" };
            let _ = writeln!(s, "  \"{}\" [label=\"{}\"{}];", escape(&v.id), v.weight, shape);
        }
        for (a, b, m) in self.edges() {
            let label = if m > 1 {
                format!(" [label=\"{m}\"]")
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                "  \"{}\" -- \"{}\"{};",
                escape(self.id(a)),
                escape(self.id(b)),
                label
            );
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeJson {
    Weighted(String, String, i64),
    Simple(String, String),
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GraphJson {
    vertices: Vec<Vertex>,
    #[serde(default)]
    edges: Vec<EdgeJson>,
}

impl TryFrom<GraphJson> for WeightedDualGraph {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Self> {
        WeightedDualGraph::new(
            g.vertices.into_iter().map(|v| (v.id, v.weight)),
            g.edges.into_iter().map(|e| match e {
                EdgeJson::Weighted(a, b, m) => (a, b, m),
                EdgeJson::Simple(a, b) => (a, b, 1),
            }),
        )
    }
}

impl From<&WeightedDualGraph> for GraphJson {
    fn from(g: &WeightedDualGraph) -> Self {
        GraphJson {
            vertices: g.vertices.clone(),
            edges: g
                .edges()
                .map(|(a, b, m)| EdgeJson::Weighted(g.id(a).into(), g.id(b).into(), m))
                .collect(),
        }
    }
}

impl Serialize for WeightedDualGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedDualGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        WeightedDualGraph::try_from(raw).map_err(serde::de::Error::custom)
    }
}
