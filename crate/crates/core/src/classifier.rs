//! Placements of `C` on each family member, contraction analysis, and
//! comparison against the reference table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonical_form, CanonicalKey};
use crate::contraction::{outcome_kinds, Attachment, MarkedConfiguration, OutcomeKind};
use crate::discrepancy::{is_log_terminal, solve_discrepancies};
use crate::enumerator::{apply_size_bound, has_dynkin_shape, FamilyLabel, FamilyRecord};
use crate::graph::WeightedDualGraph;
use crate::refdata::{load_reference, ReferenceTables};
use crate::Rational;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    Reference,
    Permissive,
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reference" => Ok(Self::Reference),
            "permissive" => Ok(Self::Permissive),
            _ => Err(format!("unknown oracle `{s}`")),
        }
    }
}

/// Stand-in for the external list of rank-one exceptional graphs `E`.
#[derive(Clone, Debug)]
pub struct RankOneOracle {
    pub mode: OracleMode,
    pub reference_set: BTreeSet<CanonicalKey>,
}

impl RankOneOracle {
    /// Accepts exactly the residuals reached from the reference configurations.
    pub fn reference() -> Self {
        Self::reference_from(load_reference())
    }

    pub fn reference_from(tables: &ReferenceTables) -> Self {
        let reference_set = tables
            .configurations
            .iter()
            .flat_map(|c| outcome_kinds(&c.configuration).residuals)
            .map(|e| canonical_form(&e))
            .collect();
        Self {
            mode: OracleMode::Reference,
            reference_set,
        }
    }

    /// Accepts any connected log-terminal SNC tree with weights at most -2.
    pub fn permissive() -> Self {
        Self {
            mode: OracleMode::Permissive,
            reference_set: BTreeSet::new(),
        }
    }

    pub fn from_mode(mode: OracleMode) -> Self {
        match mode {
            OracleMode::Reference => Self::reference(),
            OracleMode::Permissive => Self::permissive(),
        }
    }

    pub fn accepts(&self, e: &WeightedDualGraph) -> bool {
        match self.mode {
            OracleMode::Reference => self.reference_set.contains(&canonical_form(e)),
            OracleMode::Permissive => e.is_snc_tree() && e.weights().iter().all(|&w| w <= -2) && is_log_terminal(e),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TargetKind {
    SmoothPoint,
    SingularRankOne,
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SmoothPoint => "smooth point",
            Self::SingularRankOne => "rank-one singular",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationEntry {
    /// Reference label, `None` for candidates absent from the table.
    pub label: Option<String>,
    pub family: FamilyLabel,
    pub n: usize,
    pub variant: Option<String>,
    pub configuration: MarkedConfiguration,
    pub target_kind: TargetKind,
    pub residual_e: Option<WeightedDualGraph>,
    pub k_bar_squared: Rational,
    pub trace: Vec<String>,
}

impl ClassificationEntry {
    pub fn key(&self) -> CanonicalKey {
        self.configuration.canonical_key()
    }

    pub fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            let at = match self.configuration.attachment() {
                Attachment::None => "disjoint".to_string(),
                Attachment::Vertex(id) => format!("C on {id}"),
            };
            format!("{} (n={}) [{at}]", self.family, self.n)
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Classification {
    /// Candidates matching a reference row, sorted by canonical key.
    pub entries: Vec<ClassificationEntry>,
    /// Candidates absent from the table.
    pub extras: Vec<ClassificationEntry>,
}

impl Classification {
    pub fn all(&self) -> impl Iterator<Item = &ClassificationEntry> {
        self.entries.iter().chain(&self.extras)
    }
}

/// One disjoint placement plus one attached placement per automorphism
/// orbit of vertices of `d`.
pub fn enumerate_placements(d: &WeightedDualGraph) -> Vec<MarkedConfiguration> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let candidates = std::iter::once(None).chain((0..d.len()).map(Some));
    for at in candidates {
        let cfg = MarkedConfiguration::with_curve(d, at).expect("family members are valid D-parts");
        if seen.insert(cfg.canonical_key()) {
            out.push(cfg);
        }
    }
    out
}

/// Family members admitted by the positivity bound, up to `max_n`.
pub fn family_instances(families: &[FamilyRecord], max_n: usize) -> Vec<(FamilyLabel, usize, WeightedDualGraph)> {
    let mut out = Vec::new();
    for f in families {
        let Some(bound) = apply_size_bound(f) else { continue };
        for n in bound.range.min..=bound.range.max.min(max_n) {
            if let Some(g) = f.instance(n) {
                out.push((f.label, n, g));
            }
        }
    }
    out
}

fn analyse(
    label: FamilyLabel,
    n: usize,
    cfg: MarkedConfiguration,
    oracle: &RankOneOracle,
) -> Option<ClassificationEntry> {
    let d = cfg.d_part();
    let k_bar_squared = solve_discrepancies(&d).ok()?.k_bar_squared;
    if k_bar_squared <= Rational::from_integer(0) {
        return None;
    }
    let summary = outcome_kinds(&cfg);
    let (target_kind, residual_e, trace) = if let Some(o) = summary.find(OutcomeKind::Empty) {
        (TargetKind::SmoothPoint, None, o.trace.clone())
    } else {
        let o = summary.outcomes.iter().find(|o| {
            o.kind == OutcomeKind::Residual && o.snc_preserved && o.residual.as_ref().is_some_and(|e| oracle.accepts(e))
        })?;
        (TargetKind::SingularRankOne, o.residual.clone(), o.trace.clone())
    };
    Some(ClassificationEntry {
        label: None,
        family: label,
        n,
        variant: None,
        configuration: cfg,
        target_kind,
        residual_e,
        k_bar_squared,
        trace,
    })
}

pub fn classify(max_n: usize, oracle: &RankOneOracle) -> Classification {
    classify_with(load_reference(), max_n, oracle)
}

pub fn classify_with(tables: &ReferenceTables, max_n: usize, oracle: &RankOneOracle) -> Classification {
    let tasks: Vec<(FamilyLabel, usize, MarkedConfiguration)> = family_instances(&tables.families, max_n)
        .into_iter()
        .flat_map(|(l, n, d)| enumerate_placements(&d).into_iter().map(move |c| (l, n, c)))
        .collect();
    let mut found: Vec<ClassificationEntry> = tasks
        .into_par_iter()
        .filter_map(|(l, n, c)| analyse(l, n, c, oracle))
        .collect();
    found.sort_by_cached_key(|e| e.key());
    let by_key: BTreeMap<CanonicalKey, _> = tables
        .configurations
        .iter()
        .map(|r| (r.configuration.canonical_key(), r))
        .collect();
    let mut out = Classification::default();
    for mut e in found {
        match by_key.get(&e.key()) {
            Some(r) => {
                e.label = Some(r.label.clone());
                e.variant = r.variant.clone();
                out.entries.push(e);
            }
            None => out.extras.push(e),
        }
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FiberReport {
    pub configurations_checked: usize,
    pub violations: Vec<String>,
}

/// Every placement on every admissible family member must avoid
/// contracting to a single 0-curve.
pub fn verify_fiber_impossibility(max_n: usize) -> FiberReport {
    let instances = family_instances(&load_reference().families, max_n);
    let results: Vec<(usize, Vec<String>)> = instances
        .par_iter()
        .map(|(l, n, d)| {
            let placements = enumerate_placements(d);
            let bad = placements
                .iter()
                .filter(|c| outcome_kinds(c).reaches_zero_curve)
                .map(|c| format!("{l} (n={n}) {}", serde_json::to_string(c).unwrap()))
                .collect();
            (placements.len(), bad)
        })
        .collect();
    let mut report = FiberReport::default();
    for (k, bad) in results {
        report.configurations_checked += k;
        report.violations.extend(bad);
    }
    report
}

/// Same check on one configuration; used to show the detector can fire.
pub fn reaches_fiber(cfg: &MarkedConfiguration) -> bool {
    outcome_kinds(cfg).reaches_zero_curve
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiffReport {
    pub matched: Vec<String>,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    /// `(reference label, reported label)` for rows found under another name.
    pub label_mismatches: Vec<(String, String)>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.label_mismatches.is_empty()
    }
}

pub fn compare_reference(entries: &[ClassificationEntry]) -> DiffReport {
    compare_with(load_reference(), entries)
}

pub fn compare_with(tables: &ReferenceTables, entries: &[ClassificationEntry]) -> DiffReport {
    let mut by_key: BTreeMap<CanonicalKey, &str> = tables
        .configurations
        .iter()
        .map(|r| (r.configuration.canonical_key(), r.label.as_str()))
        .collect();
    let mut report = DiffReport::default();
    for e in entries {
        match by_key.remove(&e.key()) {
            Some(expected) => {
                if e.label.as_deref() == Some(expected) {
                    report.matched.push(expected.to_string());
                } else {
                    report.label_mismatches.push((expected.to_string(), e.display_label()));
                }
            }
            None => report.extra.push(e.display_label()),
        }
    }
    let order: BTreeMap<&str, usize> = tables
        .configurations
        .iter()
        .enumerate()
        .map(|(i, r)| (r.label.as_str(), i))
        .collect();
    let mut missing: Vec<&str> = by_key.into_values().collect();
    missing.sort_by_key(|l| order[l]);
    report.missing = missing.into_iter().map(str::to_string).collect();
    report.matched.sort_by_key(|l| order[l.as_str()]);
    report
}

/// Shape check on a D-part: at most one branch vertex of degree three.
pub fn d_part_is_dynkin(cfg: &MarkedConfiguration) -> bool {
    has_dynkin_shape(&cfg.d_part())
}
