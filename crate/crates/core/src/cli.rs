//! Command-line front end.
//!
//! Every subcommand writes to the supplied sink; JSON output goes through
//! [`serde_json::Value`] so object keys come out sorted.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::classifier::{classify, compare_reference, ClassificationEntry, OracleMode, RankOneOracle};
use crate::contraction::{
    contract_all_sequences, contract_first_sequence, replay, Attachment, ContractionOutcome, MarkedConfiguration,
};
use crate::discrepancy::solve_discrepancies;
use crate::enumerator::{
    apply_size_bound, classify_family, enumerate_index3_with, FamilyLabel, DEFAULT_MAX_N, DEFAULT_WEIGHT_MIN,
};
use crate::graph::WeightedDualGraph;
use crate::refdata::{load_reference, REFERENCE_JSON};
use crate::scalar::fmt_ratio;
use crate::{Discrepancies, Rational};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Json,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Reference,
    Permissive,
}

impl From<Oracle> for OracleMode {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Reference => OracleMode::Reference,
            Oracle::Permissive => OracleMode::Permissive,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "logdp",
    version,
    about = "Index-3 rank-2 log del Pezzo configurations, checked exactly"
)]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List connected index-3 exceptional graphs with positive K̄².
    Enumerate {
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_WEIGHT_MIN, allow_hyphen_values = true)]
        weight_min: i64,
        /// Admit tree shapes with several branch points or high degree.
        #[arg(long)]
        permissive: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Place a (-1)-curve on each family member and contract.
    Classify {
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Oracle::Reference)]
        oracle: Oracle,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Compare against the reference table; exit 2 on any difference.
        #[arg(long)]
        diff: bool,
    },
    /// Run blow-down sequences on a graph with an optional marked curve.
    Contract {
        /// Graph JSON file; stdin when absent or `-`.
        input: Option<PathBuf>,
        #[arg(long)]
        all_sequences: bool,
        /// Include per-step neighbour data.
        #[arg(long)]
        trace: bool,
    },
    /// Report the matrix, discrepancies and invariants of a graph.
    Check {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Dump the embedded reference tables.
    ExportReference {
        #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
        format: ExportFormat,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Diagnostics go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CommandConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let text = e.render().to_string();
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = out.write_all(text.as_bytes());
                0
            } else {
                let _ = err.write_all(text.as_bytes());
                1
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let result = pool.install(|| execute(&cfg.command)).and_then(|(text, code)| {
        emit(out, &text)?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, Failure> {
    let threads = match std::env::var("DP_THREADS") {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse::<usize>()
            .map_err(|_| invalid(format!("DP_THREADS must be a non-negative integer, got `{s}`")))?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(e.to_string()))
}

fn execute(cmd: &Command) -> Outcome {
    let text = match cmd {
        Command::Enumerate {
            max_n,
            weight_min,
            permissive,
            format,
        } => enumerate(*max_n, *weight_min, *permissive, *format)?,
        Command::Classify {
            max_n,
            oracle,
            format,
            diff,
        } => return classify_cmd(*max_n, *oracle, *format, *diff),
        Command::Contract {
            input,
            all_sequences,
            trace,
        } => contract(input.as_ref(), *all_sequences, *trace)?,
        Command::Check { input, format } => check(input.as_ref(), *format)?,
        Command::ExportReference { format } => export_reference(*format)?,
    };
    Ok((text, 0))
}

fn emit(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| invalid(e.to_string()))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn ratio(q: &Rational) -> Value {
    Value::String(fmt_ratio(q))
}

fn graph_value(g: &WeightedDualGraph) -> Value {
    serde_json::to_value(g).expect("graphs always serialize")
}

fn read_input<T: DeserializeOwned>(path: Option<&PathBuf>) -> std::result::Result<T, Failure> {
    let (name, text) = match path {
        Some(p) if p.as_os_str() != "-" => (
            p.display().to_string(),
            std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
        ),
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| invalid(format!("stdin: {e}")))?;
            ("<stdin>".to_string(), s)
        }
    };
    serde_json::from_str(&text).map_err(|e| {
        let what = if e.is_data() { "invalid graph" } else { "malformed JSON" };
        invalid(format!("{name}:{}:{}: {what}: {e}", e.line(), e.column()))
    })
}

fn discrepancy_value(d: &Discrepancies) -> Value {
    Value::Array(d.coeffs.iter().map(ratio).collect())
}

fn enumerate(max_n: usize, weight_min: i64, permissive: bool, format: Format) -> std::result::Result<String, Failure> {
    if max_n == 0 {
        return Err(invalid("--max-n must be at least 1"));
    }
    if weight_min > -2 {
        return Err(invalid("--weight-min must be at most -2"));
    }
    let rows: Vec<(Option<FamilyLabel>, WeightedDualGraph, Discrepancies)> =
        enumerate_index3_with(max_n, weight_min, permissive)
            .into_iter()
            .filter_map(|g| {
                let d = solve_discrepancies(&g).ok()?;
                (d.k_bar_squared > Rational::from_integer(0)).then(|| (classify_family(&g).map(|(l, _)| l), g, d))
            })
            .collect();
    Ok(match format {
        Format::Json => to_json(&Value::Array(
            rows.iter()
                .map(|(f, g, d)| {
                    json!({
                        "family": f.map(|l| l.as_str()),
                        "n": g.len(),
                        "graph": graph_value(g),
                        "discrepancies": discrepancy_value(d),
                        "index": d.cartier_index.to_string(),
                        "k_bar_squared": ratio(&d.k_bar_squared),
                    })
                })
                .collect(),
        )),
        Format::Table => enumerate_table(&rows),
        Format::Dot => rows
            .iter()
            .map(|(f, g, _)| {
                let name = match f {
                    Some(l) => format!("{l} (n={})", g.len()),
                    None => format!("unlabelled (n={})", g.len()),
                };
                g.to_dot(&name, None)
            })
            .collect(),
    })
}

fn enumerate_table(rows: &[(Option<FamilyLabel>, WeightedDualGraph, Discrepancies)]) -> String {
    let mut seen: BTreeMap<FamilyLabel, (usize, usize)> = BTreeMap::new();
    let mut unlabelled = 0usize;
    for (f, g, _) in rows {
        match f {
            Some(l) => {
                let e = seen.entry(*l).or_insert((g.len(), g.len()));
                e.0 = e.0.min(g.len());
                e.1 = e.1.max(g.len());
            }
            None => unlabelled += 1,
        }
    }
    let tables = load_reference();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:<6} {:<12} {:<10} pattern",
        "family", "shape", "sizes", "bound"
    );
    for (label, (lo, hi)) in &seen {
        let f = tables.family(*label);
        let shape = serde_json::to_value(f.shape).unwrap();
        let sizes = if lo == hi {
            format!("n={lo}")
        } else {
            format!("{lo}<=n<={hi}")
        };
        let bound = apply_size_bound(f).map(|b| fmt_ratio(&b.bound)).unwrap_or_default();
        let _ = writeln!(
            s,
            "{:<6} {:<6} {:<12} {:<10} {}",
            label.as_str(),
            shape.as_str().unwrap_or(""),
            sizes,
            bound,
            f.pattern.describe()
        );
    }
    let _ = writeln!(
        s,
        "{} families, {} graphs, {} outside the families",
        seen.len(),
        rows.len(),
        unlabelled
    );
    s
}

fn attachment_value(cfg: &MarkedConfiguration) -> Value {
    match cfg.attachment() {
        Attachment::None => Value::Null,
        Attachment::Vertex(id) => Value::String(id),
    }
}

fn entry_value(e: &ClassificationEntry) -> Value {
    let mut v = json!({
        "label": e.label,
        "family": e.family.as_str(),
        "n": e.n,
        "variant": e.variant,
        "graph": graph_value(e.configuration.graph()),
        "marked": e.configuration.marked(),
        "attachment": attachment_value(&e.configuration),
        "target_kind": serde_json::to_value(e.target_kind).unwrap(),
        "k_bar_squared": ratio(&e.k_bar_squared),
        "trace": e.trace,
    });
    if let Some(r) = &e.residual_e {
        v["residual_E"] = graph_value(r);
    }
    v
}

fn classify_cmd(max_n: usize, oracle: Oracle, format: Format, diff: bool) -> Outcome {
    if diff && format == Format::Dot {
        return Err(invalid("--diff cannot be combined with --format dot"));
    }
    let result = classify(max_n, &RankOneOracle::from_mode(oracle.into()));
    let mut entries: Vec<ClassificationEntry> = result.all().cloned().collect();
    entries.sort_by_cached_key(|e| e.key());
    if diff {
        let report = compare_reference(&entries);
        let total = load_reference().configurations.len();
        let text = match format {
            Format::Json => to_json(&json!({
                "matched": report.matched.len(),
                "total": total,
                "missing": report.missing,
                "extra": report.extra,
                "label_mismatches": report.label_mismatches,
            })),
            _ => {
                let mut s = format!("{}/{} matched\n", report.matched.len(), total);
                for m in &report.missing {
                    let _ = writeln!(s, "missing: {m}");
                }
                for x in &report.extra {
                    let _ = writeln!(s, "extra: {x}");
                }
                for (want, got) in &report.label_mismatches {
                    let _ = writeln!(s, "mismatch: {want} reported as {got}");
                }
                s
            }
        };
        return Ok((text, if report.is_clean() { 0 } else { 2 }));
    }
    let text = match format {
        Format::Json => to_json(&Value::Array(entries.iter().map(entry_value).collect())),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:<16} {:<10} {:<18} {:<6} residual",
                "label", "C meets", "target", "K̄²"
            );
            for e in &entries {
                let at = match e.configuration.attachment() {
                    Attachment::None => "-".to_string(),
                    Attachment::Vertex(id) => id,
                };
                let residual = e
                    .residual_e
                    .as_ref()
                    .map(|r| format!("{:?}", r.weights()))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "{:<16} {:<10} {:<18} {:<6} {}",
                    e.display_label(),
                    at,
                    e.target_kind.to_string(),
                    fmt_ratio(&e.k_bar_squared),
                    residual
                );
            }
            let _ = writeln!(s, "{} configurations ({} unlisted)", entries.len(), result.extras.len());
            s
        }
        Format::Dot => entries
            .iter()
            .map(|e| {
                e.configuration
                    .graph()
                    .to_dot(&e.display_label(), e.configuration.marked_index())
            })
            .collect(),
    };
    Ok((text, 0))
}

fn outcome_value(
    cfg: &MarkedConfiguration,
    o: &ContractionOutcome,
    with_steps: bool,
) -> std::result::Result<Value, Failure> {
    let mut v = json!({
        "kind": serde_json::to_value(o.kind).unwrap(),
        "trace": o.trace,
        "snc_preserved": o.snc_preserved,
    });
    if let Some(r) = &o.residual {
        v["residual"] = graph_value(r);
    }
    if with_steps {
        let (steps, _) = replay(cfg, &o.trace).map_err(|e| invalid(e.to_string()))?;
        v["steps"] = Value::Array(
            steps
                .iter()
                .map(|s| {
                    json!({
                        "vertex": s.vertex,
                        "neighbors": s.neighbors.iter().map(|(id, m)| json!([id, m])).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        );
    }
    Ok(v)
}

fn contract(input: Option<&PathBuf>, all: bool, with_steps: bool) -> std::result::Result<String, Failure> {
    let cfg: MarkedConfiguration = read_input(input)?;
    let outcomes = if all {
        contract_all_sequences(&cfg)
    } else {
        vec![contract_first_sequence(&cfg)]
    };
    let values = outcomes
        .iter()
        .map(|o| outcome_value(&cfg, o, with_steps))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(to_json(&Value::Array(values)))
}

fn check(input: Option<&PathBuf>, format: Format) -> std::result::Result<String, Failure> {
    if format == Format::Dot {
        let cfg: MarkedConfiguration = read_input(input)?;
        return Ok(cfg.graph().to_dot("input", cfg.marked_index()));
    }
    let g: WeightedDualGraph = read_input::<MarkedConfiguration>(input)?.graph().clone();
    let m = g.intersection_matrix();
    let nd = m.is_negative_definite();
    let d = solve_discrepancies(&g).ok();
    let family = classify_family(&g);
    if format == Format::Json {
        let mut v = json!({
            "weights": g.weights(),
            "matrix": m.rows(),
            "negative_definite": nd,
            "family": family.map(|(l, _)| l.as_str()),
        });
        if let Some(d) = &d {
            v["discrepancies"] = discrepancy_value(d);
            v["index"] = Value::String(d.cartier_index.to_string());
            v["log_terminal"] = Value::Bool(d.log_terminal);
            v["k_bar_squared"] = ratio(&d.k_bar_squared);
        }
        return Ok(to_json(&v));
    }
    let mut s = String::new();
    let _ = writeln!(s, "vertices: {}", g.ids().join(" "));
    let _ = writeln!(s, "weights: {}", join(&g.weights()));
    let _ = writeln!(s, "matrix:");
    for row in m.rows() {
        let _ = writeln!(
            s,
            "  [{}]",
            row.iter().map(|x| format!("{x:>3}")).collect::<Vec<_>>().join(" ")
        );
    }
    let _ = writeln!(s, "negative definite: {}", yes_no(nd));
    match &d {
        Some(d) => {
            let a: Vec<String> = g
                .ids()
                .iter()
                .zip(&d.coeffs)
                .map(|(id, q)| format!("{id}={}", fmt_ratio(q)))
                .collect();
            let _ = writeln!(s, "a: {}", a.join(" "));
            let _ = writeln!(s, "index: {}", d.cartier_index);
            let _ = writeln!(s, "log terminal: {}", yes_no(d.log_terminal));
            let _ = writeln!(s, "K̄²: {}", fmt_ratio(&d.k_bar_squared));
        }
        None => {
            let _ = writeln!(s, "discrepancies: undefined");
        }
    }
    if let Some((l, n)) = family {
        let _ = writeln!(s, "family: {l} (n={n})");
    }
    Ok(s)
}

fn join(xs: &[i64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn export_reference(format: ExportFormat) -> std::result::Result<String, Failure> {
    let tables = load_reference();
    Ok(match format {
        ExportFormat::Json => {
            let v: Value = serde_json::from_str(REFERENCE_JSON).expect("embedded data parses");
            to_json(&v)
        }
        ExportFormat::Dot => {
            let mut s = String::new();
            for f in &tables.families {
                for n in f.size_range.min..=f.size_range.max {
                    if let Some(g) = f.instance(n) {
                        s.push_str(&g.to_dot(&format!("{} (n={n})", f.label), None));
                    }
                }
            }
            for c in &tables.configurations {
                s.push_str(&c.configuration.graph().to_dot(&c.label, c.configuration.marked_index()));
            }
            s
        }
    })
}
