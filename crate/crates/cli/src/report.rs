//! Output records and their JSON, CSV and text renderings.
//!
//! Every command emits one [`OutputRecord`]:
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "command": "run",
//!   "config": { "predicate": "...", "k": 4, "shots": 10000, "seed": 42, ... },
//!   "result": { ... },
//!   "timing": { "compile_s": 0.0001, "sample_s": 0.004, "total_s": 0.0041 }
//! }
//! ```
//!
//! `timing` is always the last key so runs can be compared byte-for-byte on
//! everything before it.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use qfrac_core::{CiMethod, ComparisonReport, EstimateResult, ExactFraction, SimulationMode, SweepRow};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub result: ResultPayload,
    /// Wall-clock seconds per phase.
    pub timing: BTreeMap<String, f64>,
}

/// The effective settings of a command. Fields a command does not use are
/// omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits_list: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_method: Option<CiMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SimulationMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultPayload {
    Estimate(EstimateResult),
    Comparison(ComparisonReport),
    Sweep(Vec<SweepRow>),
    Count(CountResult),
    Plan(PlanResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountResult {
    pub solution_count: u64,
    pub inputs: u64,
    pub exact_f: ExactFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanResult {
    pub shots: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub statement: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

pub fn write_record(record: &OutputRecord, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, record)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(record, out)?,
        Format::Text => write_text(record, out)?,
    }
    Ok(())
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn estimate_fields(e: &EstimateResult) -> Vec<String> {
    vec![
        e.shots.to_string(),
        e.seed.to_string(),
        e.alpha.to_string(),
        e.ci_method.to_string(),
        e.ones.to_string(),
        e.f_hat.to_string(),
        e.ci_low.to_string(),
        e.ci_high.to_string(),
        opt(&e.exact_f),
        opt(&e.abs_error),
    ]
}

const ESTIMATE_HEADER: [&str; 10] = [
    "shots", "seed", "alpha", "ci_method", "ones", "f_hat", "ci_low", "ci_high", "exact_f", "abs_error",
];

fn write_csv(record: &OutputRecord, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let cfg = &record.config;
    let mode = cfg.mode.map(|m| m.as_str().to_string()).unwrap_or_default();
    match &record.result {
        ResultPayload::Estimate(e) => {
            let mut header = vec!["command", "predicate", "k", "mode"];
            header.extend(ESTIMATE_HEADER);
            w.write_record(&header)?;
            let mut row = vec![record.command.clone(), opt(&cfg.predicate), opt(&cfg.k), mode];
            row.extend(estimate_fields(e));
            w.write_record(&row)?;
        }
        ResultPayload::Comparison(c) => {
            let mut header = vec!["command", "path", "predicate", "k", "mode"];
            header.extend(ESTIMATE_HEADER);
            header.extend(["abs_difference", "ci_overlap"]);
            w.write_record(&header)?;
            for (path, e) in [("quantum", &c.quantum), ("classical", &c.classical)] {
                let mut row = vec![
                    record.command.clone(),
                    path.to_string(),
                    opt(&cfg.predicate),
                    opt(&cfg.k),
                    mode.clone(),
                ];
                row.extend(estimate_fields(e));
                row.extend([c.abs_difference.to_string(), c.ci_overlap.to_string()]);
                w.write_record(&row)?;
            }
        }
        ResultPayload::Sweep(rows) => {
            w.write_record([
                "k",
                "predicate",
                "shots",
                "seed",
                "ones",
                "f_hat",
                "ci_low",
                "ci_high",
                "exact_f",
                "abs_error",
                "hoeffding_bound",
                "wall_clock_s",
            ])?;
            for r in rows {
                let e = &r.estimate;
                w.write_record([
                    r.k.to_string(),
                    r.predicate.clone(),
                    e.shots.to_string(),
                    e.seed.to_string(),
                    e.ones.to_string(),
                    e.f_hat.to_string(),
                    e.ci_low.to_string(),
                    e.ci_high.to_string(),
                    r.exact_f.to_string(),
                    r.abs_error.to_string(),
                    r.hoeffding_bound.to_string(),
                    r.wall_clock_s.to_string(),
                ])?;
            }
        }
        ResultPayload::Count(c) => {
            w.write_record(["predicate", "k", "solution_count", "inputs", "exact_f"])?;
            w.write_record([
                opt(&cfg.predicate),
                opt(&cfg.k),
                c.solution_count.to_string(),
                c.inputs.to_string(),
                c.exact_f.to_string(),
            ])?;
        }
        ResultPayload::Plan(p) => {
            w.write_record(["epsilon", "delta", "shots"])?;
            w.write_record([p.epsilon.to_string(), p.delta.to_string(), p.shots.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_estimate_text(label: &str, e: &EstimateResult, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{label}: {} ones in {} shots, f_hat = {:.6}, {:.0}% {} interval [{:.6}, {:.6}] (seed {})",
        e.ones,
        e.shots,
        e.f_hat,
        100.0 * (1.0 - e.alpha),
        e.ci_method,
        e.ci_low,
        e.ci_high,
        e.seed
    )?;
    if let (Some(f), Some(err)) = (e.exact_f, e.abs_error) {
        writeln!(out, "{label}: exact f = {f}, |f_hat - f| = {err:.6}")?;
    }
    Ok(())
}

fn write_text(record: &OutputRecord, out: &mut dyn Write) -> Result<()> {
    let cfg = &record.config;
    if let (Some(p), Some(k)) = (&cfg.predicate, cfg.k) {
        writeln!(out, "predicate: {p}  (k = {k})")?;
    }
    match &record.result {
        ResultPayload::Estimate(e) => write_estimate_text("estimate", e, out)?,
        ResultPayload::Comparison(c) => {
            write_estimate_text("quantum", &c.quantum, out)?;
            write_estimate_text("classical", &c.classical, out)?;
            writeln!(
                out,
                "difference: {:.6}, intervals {}",
                c.abs_difference,
                if c.ci_overlap { "overlap" } else { "do not overlap" }
            )?;
        }
        ResultPayload::Sweep(rows) => {
            writeln!(out, "{:>3}  {:>10}  {:>8}  {:>10}  {:>10}  {:>10}", "k", "f_hat", "exact", "error", "bound", "seconds")?;
            for r in rows {
                writeln!(
                    out,
                    "{:>3}  {:>10.6}  {:>8}  {:>10.6}  {:>10.6}  {:>10.4}",
                    r.k, r.estimate.f_hat, r.exact_f, r.abs_error, r.hoeffding_bound, r.wall_clock_s
                )?;
            }
        }
        ResultPayload::Count(c) => {
            writeln!(out, "S = {}", c.solution_count)?;
            writeln!(out, "2^k = {}", c.inputs)?;
            writeln!(out, "f = {}", c.exact_f)?;
        }
        ResultPayload::Plan(p) => {
            writeln!(out, "P = {}", p.shots)?;
            writeln!(out, "{}", p.statement)?;
        }
    }
    Ok(())
}
