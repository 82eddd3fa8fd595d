//! Embedded golden tables: the nine exceptional-graph families and the 29
//! configurations `C + D`.
//!
//! The data ships as `data/reference.json` in the graph JSON format, with
//! `label`, `family`, `n`, `variant` and `marked` as extension fields.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::contraction::MarkedConfiguration;
use crate::discrepancy::solve_discrepancies;
use crate::enumerator::{classify_family_in, FamilyLabel, FamilyRecord};
use crate::error::{Error, Result};
use crate::Rational;

pub const REFERENCE_JSON: &str = include_str!("../data/reference.json");

/// Per-family row counts of the configuration table.
pub const CONFIGURATION_COUNTS: [(FamilyLabel, usize); 9] = [
    (FamilyLabel::I, 2),
    (FamilyLabel::II, 2),
    (FamilyLabel::III, 1),
    (FamilyLabel::IV, 0),
    (FamilyLabel::V, 5),
    (FamilyLabel::VI, 7),
    (FamilyLabel::VII, 4),
    (FamilyLabel::VIII, 4),
    (FamilyLabel::IX, 4),
];

/// Labels whose configuration contracts to a smooth point.
pub const SMOOTH_LABELS: [&str; 3] = ["VI (n=5) (b)", "VI (n=6) (b)", "IX (n=5) (b)"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceConfiguration {
    pub label: String,
    pub family: FamilyLabel,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(flatten)]
    pub configuration: MarkedConfiguration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTables {
    pub version: u32,
    pub families: Vec<FamilyRecord>,
    pub configurations: Vec<ReferenceConfiguration>,
}

impl ReferenceTables {
    pub fn family(&self, label: FamilyLabel) -> &FamilyRecord {
        self.families
            .iter()
            .find(|f| f.label == label)
            .expect("validated tables hold every family")
    }

    pub fn configuration(&self, label: &str) -> Option<&ReferenceConfiguration> {
        self.configurations.iter().find(|c| c.label == label)
    }
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Reference(msg.into())
}

/// Parses and validates reference tables from JSON text.
pub fn parse_reference(text: &str) -> Result<ReferenceTables> {
    let tables: ReferenceTables = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    validate(&tables)?;
    Ok(tables)
}

fn validate(t: &ReferenceTables) -> Result<()> {
    if t.families.len() != 9 {
        return Err(corrupt(format!("expected 9 families, found {}", t.families.len())));
    }
    for label in FamilyLabel::ALL {
        if t.families.iter().filter(|f| f.label == label).count() != 1 {
            return Err(corrupt(format!("family {label} must appear exactly once")));
        }
    }
    for f in &t.families {
        for n in f.size_range.min..=f.size_range.max {
            let g = f
                .instance(n)
                .ok_or_else(|| corrupt(format!("family {} has no member of size {n}", f.label)))?;
            let d = solve_discrepancies(&g).map_err(|e| corrupt(format!("{} n={n}: {e}", f.label)))?;
            if !d.log_terminal || d.cartier_index != 3 || d.k_bar_squared <= Rational::from_integer(0) {
                return Err(corrupt(format!("{} n={n} is not an admissible index-3 graph", f.label)));
            }
        }
    }
    if t.configurations.len() != 29 {
        return Err(corrupt(format!(
            "expected 29 configurations, found {}",
            t.configurations.len()
        )));
    }
    let mut counts: BTreeMap<FamilyLabel, usize> = BTreeMap::new();
    for c in &t.configurations {
        let checked = MarkedConfiguration::new(c.configuration.graph().clone(), c.configuration.marked())
            .map_err(|e| corrupt(format!("{}: {e}", c.label)))?;
        let d = checked.d_part();
        let hit = classify_family_in(&t.families, &d);
        if hit != Some((c.family, c.n)) {
            return Err(corrupt(format!("{}: D-part classifies as {hit:?}", c.label)));
        }
        let family = t.families.iter().find(|f| f.label == c.family).unwrap();
        if !family.size_range.contains(c.n) {
            return Err(corrupt(format!("{}: size outside family range", c.label)));
        }
        let disc = solve_discrepancies(&d).map_err(|e| corrupt(format!("{}: {e}", c.label)))?;
        if disc.cartier_index != 3 || disc.k_bar_squared <= Rational::from_integer(0) {
            return Err(corrupt(format!("{}: D-part fails index or positivity", c.label)));
        }
        *counts.entry(c.family).or_default() += 1;
    }
    for (label, want) in CONFIGURATION_COUNTS {
        let got = counts.get(&label).copied().unwrap_or(0);
        if got != want {
            return Err(corrupt(format!(
                "family {label}: {got} configurations, expected {want}"
            )));
        }
    }
    let mut labels: Vec<&str> = t.configurations.iter().map(|c| c.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != t.configurations.len() {
        return Err(corrupt("duplicate configuration label"));
    }
    Ok(())
}

/// The embedded tables, parsed and validated once. Panics on corruption.
pub fn load_reference() -> &'static ReferenceTables {
    static TABLES: OnceLock<ReferenceTables> = OnceLock::new();
    TABLES.get_or_init(|| match parse_reference(REFERENCE_JSON) {
        Ok(t) => t,
        Err(e) => panic!("embedded reference data: {e}"),
    })
}
