//! Blow-down calculus.
//!
//! Contracting a (-1)-curve `E` replaces every other curve `A` by its image,
//! whose pullback is `A + (A.E) E`. Intersection numbers therefore update as
//! `M'[i][j] = M[i][j] + M[i][e] M[j][e]`, diagonal included.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, CanonicalKey};
use crate::error::{Error, Result};
use crate::graph::{GraphJson, IntersectionMatrix, WeightedDualGraph};
use crate::linalg::Matrix;
use crate::Int;

/// A configuration `C + D`: the exceptional graph `D` plus an optional
/// marked (-1)-curve `C` meeting `D` at most once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedConfiguration {
    graph: WeightedDualGraph,
    marked: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attachment {
    None,
    Vertex(String),
}

impl MarkedConfiguration {
    /// Checked constructor: the marked vertex has weight -1 and at most one
    /// incident edge of multiplicity one, and the rest is a connected graph
    /// with all weights at most -2.
    pub fn new(graph: WeightedDualGraph, marked: Option<&str>) -> Result<Self> {
        let cfg = Self::unchecked(graph, marked)?;
        if let Some(c) = cfg.marked {
            let nb = cfg.graph.neighbors(c);
            if nb.len() > 1 || nb.iter().any(|&(_, m)| m != 1) {
                return Err(Error::InvalidConfiguration(format!(
                    "marked curve `{}` must meet D at most once, transversally",
                    cfg.graph.id(c)
                )));
            }
        }
        let d = cfg.d_part();
        if !d.is_connected() || d.is_empty() {
            return Err(Error::InvalidConfiguration("D must be nonempty and connected".into()));
        }
        if let Some(v) = d.vertices().iter().find(|v| v.weight > -2) {
            return Err(Error::InvalidConfiguration(format!(
                "D-vertex `{}` has weight {} > -2",
                v.id, v.weight
            )));
        }
        Ok(cfg)
    }

    /// Only checks that the marked vertex exists with weight -1.
    pub fn unchecked(graph: WeightedDualGraph, marked: Option<&str>) -> Result<Self> {
        let marked = match marked {
            None => None,
            Some(id) => {
                let i = graph.index_of(id).ok_or_else(|| Error::UnknownVertex(id.into()))?;
                if graph.weight(i) != -1 {
                    return Err(Error::InvalidConfiguration(format!(
                        "marked curve `{id}` has weight {} instead of -1",
                        graph.weight(i)
                    )));
                }
                Some(i)
            }
        };
        Ok(Self { graph, marked })
    }

    /// `d` with a fresh curve `C` of weight -1, attached to vertex `at` if given.
    pub fn with_curve(d: &WeightedDualGraph, at: Option<usize>) -> Result<Self> {
        let mut id = String::from("C");
        while d.index_of(&id).is_some() {
            id.push('\'');
        }
        let g = d.with_vertex(&id, -1, at)?;
        Self::new(g, Some(&id))
    }

    pub fn graph(&self) -> &WeightedDualGraph {
        &self.graph
    }

    pub fn marked(&self) -> Option<&str> {
        self.marked.map(|i| self.graph.id(i))
    }

    pub fn marked_index(&self) -> Option<usize> {
        self.marked
    }

    /// The graph with the marked curve removed.
    pub fn d_part(&self) -> WeightedDualGraph {
        match self.marked {
            Some(c) => self.graph.without(c),
            None => self.graph.clone(),
        }
    }

    pub fn attachment(&self) -> Attachment {
        match self.marked.and_then(|c| self.graph.neighbors(c).first().copied()) {
            Some((j, _)) => Attachment::Vertex(self.graph.id(j).to_string()),
            None => Attachment::None,
        }
    }

    /// Index of the attachment vertex within [`d_part`](Self::d_part).
    pub fn attachment_in_d(&self) -> Option<usize> {
        let c = self.marked?;
        let (j, _) = *self.graph.neighbors(c).first()?;
        Some(if j > c { j - 1 } else { j })
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_form(&self.graph)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ConfigJson {
    #[serde(flatten)]
    graph: GraphJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marked: Option<String>,
}

impl Serialize for MarkedConfiguration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigJson {
            graph: GraphJson::from(&self.graph),
            marked: self.marked().map(str::to_string),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedConfiguration {
    /// Deserialization applies only the light checks of
    /// [`MarkedConfiguration::unchecked`].
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ConfigJson::deserialize(d)?;
        let g = WeightedDualGraph::try_from(raw.graph).map_err(serde::de::Error::custom)?;
        MarkedConfiguration::unchecked(g, raw.marked.as_deref()).map_err(serde::de::Error::custom)
    }
}

/// Contracts the (-1)-vertex at index `v`.
pub fn blow_down(g: &WeightedDualGraph, v: usize) -> Result<WeightedDualGraph> {
    if v >= g.len() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    if g.weight(v) != -1 {
        return Err(Error::IllegalContraction {
            id: g.id(v).to_string(),
            weight: g.weight(v),
        });
    }
    let m = g.intersection_matrix();
    let m = m.matrix();
    let keep: Vec<usize> = (0..g.len()).filter(|&i| i != v).collect();
    let mut out = Matrix::<Int>::zeros(keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            out[(a, b)] = m[(i, j)] + m[(i, v)] * m[(j, v)];
        }
    }
    let ids: Vec<String> = keep.iter().map(|&i| g.id(i).to_string()).collect();
    Ok(WeightedDualGraph::from_matrix(&ids, &IntersectionMatrix::new(out)))
}

pub fn blow_down_id(g: &WeightedDualGraph, id: &str) -> Result<WeightedDualGraph> {
    let v = g.index_of(id).ok_or_else(|| Error::UnknownVertex(id.into()))?;
    blow_down(g, v)
}

/// Record of one contraction: the vertex and its intersection with each
/// surviving neighbour just before it was contracted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowDownStep {
    pub vertex: String,
    pub neighbors: Vec<(String, i64)>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeKind {
    Empty,
    SingleZeroCurve,
    Residual,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionOutcome {
    pub kind: OutcomeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<WeightedDualGraph>,
    pub trace: Vec<String>,
    pub snc_preserved: bool,
}

impl ContractionOutcome {
    pub fn steps(&self) -> usize {
        self.trace.len()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ContractionPolicy {
    /// Report residuals reached through a non-SNC state as `Invalid`.
    pub reject_non_snc: bool,
}

impl Default for ContractionPolicy {
    fn default() -> Self {
        Self { reject_non_snc: true }
    }
}

fn is_snc_forest(g: &WeightedDualGraph) -> bool {
    g.is_forest() && g.edges().all(|(_, _, m)| m == 1)
}

fn terminal(g: &WeightedDualGraph, snc: bool, policy: ContractionPolicy) -> (OutcomeKind, Option<WeightedDualGraph>) {
    if g.is_empty() {
        return (OutcomeKind::Empty, None);
    }
    if g.len() == 1 && g.weight(0) == 0 {
        return (OutcomeKind::SingleZeroCurve, None);
    }
    if g.weights().iter().all(|&w| w <= -2) && (snc || !policy.reject_non_snc) {
        return (OutcomeKind::Residual, Some(g.clone()));
    }
    (OutcomeKind::Invalid, None)
}

struct Search {
    policy: ContractionPolicy,
    visited: HashSet<(CanonicalKey, bool)>,
    outcomes: BTreeMap<(OutcomeKind, Option<CanonicalKey>), ContractionOutcome>,
    first_only: bool,
}

impl Search {
    fn go(&mut self, g: &WeightedDualGraph, forced: Option<usize>, trace: &mut Vec<String>, snc: bool) {
        if self.first_only && !self.outcomes.is_empty() {
            return;
        }
        let choices: Vec<usize> = match forced {
            Some(v) => vec![v],
            None => (0..g.len()).filter(|&i| g.weight(i) == -1).collect(),
        };
        if choices.is_empty() {
            let (kind, residual) = terminal(g, snc, self.policy);
            let key = (kind, residual.as_ref().map(canonical_form));
            self.outcomes.entry(key).or_insert_with(|| ContractionOutcome {
                kind,
                residual,
                trace: trace.clone(),
                snc_preserved: snc,
            });
            return;
        }
        for v in choices {
            let next = blow_down(g, v).expect("choices have weight -1");
            let snc_next = snc && is_snc_forest(&next);
            if !self.visited.insert((canonical_form(&next), snc_next)) {
                continue;
            }
            trace.push(g.id(v).to_string());
            self.go(&next, None, trace, snc_next);
            trace.pop();
        }
    }
}

fn run_search(cfg: &MarkedConfiguration, policy: ContractionPolicy, first_only: bool) -> Vec<ContractionOutcome> {
    let g = cfg.graph();
    let mut search = Search {
        policy,
        visited: HashSet::new(),
        outcomes: BTreeMap::new(),
        first_only,
    };
    search.go(g, cfg.marked_index(), &mut Vec::new(), is_snc_forest(g));
    search.outcomes.into_values().collect()
}

/// Every distinct terminal state over all maximal contraction sequences.
///
/// When a curve is marked it is contracted first. Outcomes are unique up to
/// kind and residual isomorphism class; each keeps the first trace found.
pub fn contract_all_sequences(cfg: &MarkedConfiguration) -> Vec<ContractionOutcome> {
    contract_all_sequences_with(cfg, ContractionPolicy::default())
}

pub fn contract_all_sequences_with(cfg: &MarkedConfiguration, policy: ContractionPolicy) -> Vec<ContractionOutcome> {
    run_search(cfg, policy, false)
}

/// A single maximal sequence, always picking the first (-1)-vertex.
pub fn contract_first_sequence(cfg: &MarkedConfiguration) -> ContractionOutcome {
    run_search(cfg, ContractionPolicy::default(), true)
        .into_iter()
        .next()
        .expect("search reaches a terminal state")
}

/// Replays `trace`, returning each step's neighbour data.
pub fn replay(cfg: &MarkedConfiguration, trace: &[String]) -> Result<(Vec<BlowDownStep>, WeightedDualGraph)> {
    let mut g = cfg.graph().clone();
    let mut steps = Vec::with_capacity(trace.len());
    for id in trace {
        let v = g.index_of(id).ok_or_else(|| Error::UnknownVertex(id.clone()))?;
        steps.push(BlowDownStep {
            vertex: id.clone(),
            neighbors: g
                .neighbors(v)
                .into_iter()
                .map(|(u, m)| (g.id(u).to_string(), m))
                .collect(),
        });
        g = blow_down(&g, v)?;
    }
    Ok((steps, g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeSummary {
    pub reaches_empty: bool,
    pub reaches_zero_curve: bool,
    /// SNC residual graphs, one per isomorphism class.
    pub residuals: Vec<WeightedDualGraph>,
    pub outcomes: Vec<ContractionOutcome>,
}

impl OutcomeSummary {
    pub fn find(&self, kind: OutcomeKind) -> Option<&ContractionOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }
}

pub fn outcome_kinds(cfg: &MarkedConfiguration) -> OutcomeSummary {
    let outcomes = contract_all_sequences(cfg);
    OutcomeSummary {
        reaches_empty: outcomes.iter().any(|o| o.kind == OutcomeKind::Empty),
        reaches_zero_curve: outcomes.iter().any(|o| o.kind == OutcomeKind::SingleZeroCurve),
        residuals: outcomes
            .iter()
            .filter(|o| o.kind == OutcomeKind::Residual && o.snc_preserved)
            .filter_map(|o| o.residual.clone())
            .collect(),
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(w: &[i64]) -> WeightedDualGraph {
        WeightedDualGraph::chain(w)
    }

    fn attached(d: &WeightedDualGraph, at: usize) -> MarkedConfiguration {
        MarkedConfiguration::with_curve(d, Some(at)).unwrap()
    }

    #[test]
    fn blow_down_chain_middle() {
        let g = chain(&[-2, -1, -2]);
        let h = blow_down(&g, 1).unwrap();
        assert_eq!(h.weights(), vec![-1, -1]);
        assert_eq!(h.multiplicity(0, 1), 1);
        assert_eq!(h.ids(), vec!["D1", "D3"]);
    }

    #[test]
    fn blow_down_isolated_and_errors() {
        let g = chain(&[-1]);
        assert!(blow_down(&g, 0).unwrap().is_empty());
        assert_eq!(
            blow_down(&chain(&[-2]), 0),
            Err(Error::IllegalContraction {
                id: "D1".into(),
                weight: -2
            })
        );
        assert!(blow_down_id(&g, "nope").is_err());
    }

    #[test]
    fn blow_down_star_makes_triangle() {
        let g = WeightedDualGraph::from_index_edges(&[-1, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)]);
        let h = blow_down(&g, 0).unwrap();
        assert_eq!(h.weights(), vec![-1, -1, -1]);
        assert_eq!(h.edge_count(), 3);
        assert!(!h.is_forest());
        let cfg = MarkedConfiguration::unchecked(g, None).unwrap();
        let out = contract_all_sequences(&cfg);
        assert!(out.iter().all(|o| !o.snc_preserved));
    }

    #[test]
    fn family_one_outcomes() {
        let d = chain(&[-3]);
        let s = outcome_kinds(&attached(&d, 0));
        assert_eq!(s.residuals.len(), 1);
        assert_eq!(s.residuals[0].weights(), vec![-2]);
        assert!(!s.reaches_zero_curve);
        let s = outcome_kinds(&MarkedConfiguration::with_curve(&d, None).unwrap());
        assert_eq!(s.residuals[0].weights(), vec![-3]);
    }

    #[test]
    fn vi5b_contracts_to_point() {
        let d = chain(&[-2, -3, -2, -2, -4]);
        let cfg = attached(&d, 2);
        let s = outcome_kinds(&cfg);
        assert!(s.reaches_empty);
        let e = s.find(OutcomeKind::Empty).unwrap();
        assert_eq!(e.trace, vec!["C", "D3", "D4", "D2", "D1", "D5"]);
        assert!(s.outcomes.iter().all(|o| o.trace[0] == "C"));
    }

    #[test]
    fn a3_middle_reaches_fibre() {
        let cfg = attached(&chain(&[-2, -2, -2]), 1);
        assert!(outcome_kinds(&cfg).reaches_zero_curve);
        let fib = MarkedConfiguration::unchecked(chain(&[-2, -1, -2]), None).unwrap();
        assert!(outcome_kinds(&fib).reaches_zero_curve);
        // an end attachment instead unwinds the whole chain
        let end = attached(&chain(&[-2, -2]), 0);
        assert!(outcome_kinds(&end).reaches_empty);
    }

    #[test]
    fn no_minus_one_is_residual() {
        let cfg = MarkedConfiguration::unchecked(chain(&[-2, -5]), None).unwrap();
        let out = contract_all_sequences(&cfg);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].kind, OutcomeKind::Residual);
        assert!(out[0].trace.is_empty());
    }

    #[test]
    fn positive_survivor_is_invalid() {
        // (-1)-(-1): contracting either leaves a 0-curve alone
        let z = MarkedConfiguration::unchecked(chain(&[-1, -1]), None).unwrap();
        assert_eq!(contract_all_sequences(&z)[0].kind, OutcomeKind::SingleZeroCurve);
        // -1 meeting a 0-curve and a -3: the 0-curve becomes 1 beside another
        let g = chain(&[0, -1, -3]);
        let cfg = MarkedConfiguration::unchecked(g, None).unwrap();
        let out = contract_all_sequences(&cfg);
        assert!(out.iter().all(|o| o.kind == OutcomeKind::Invalid));
    }

    #[test]
    fn checked_constructor() {
        let twice = WeightedDualGraph::from_index_edges(&[-2, -1, -2], &[(0, 1), (1, 2)]);
        assert!(MarkedConfiguration::new(twice.clone(), Some("D2")).is_err());
        assert!(MarkedConfiguration::unchecked(twice, Some("D2")).is_ok());
        assert!(MarkedConfiguration::new(chain(&[-1, -2]), Some("D2")).is_err());
        let cfg = attached(&chain(&[-2, -5]), 1);
        assert_eq!(cfg.attachment(), Attachment::Vertex("D2".into()));
        assert_eq!(cfg.attachment_in_d(), Some(1));
        assert_eq!(cfg.d_part(), chain(&[-2, -5]));
    }

    #[test]
    fn config_json() {
        let cfg = attached(&chain(&[-3]), 0);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(
            text,
            r#"{"vertices":[{"id":"D1","w":-3},{"id":"C","w":-1}],"edges":[["D1","C",1]],"marked":"C"}"#
        );
        let back: MarkedConfiguration = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
