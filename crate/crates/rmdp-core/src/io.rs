//! Model files and report persistence.
//!
//! Models are single JSON documents with explicit `(x, a, w, ·)` tuples for
//! the evolution and cost tables, which keeps sparse admissibility readable.
//! Reports are persisted twice: the full JSON document and a flat CSV of the
//! per-trial records for external plotting.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distance::Metric;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::experiment::ExperimentReport;
use crate::model::MdpModel;

/// A model plus the optional true disturbance distribution stored with it.
#[derive(Debug, Clone)]
pub struct ModelDocument {
    pub model: MdpModel,
    pub true_dist: Option<Distribution>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    states: Vec<String>,
    actions: Vec<String>,
    admissible: Vec<Vec<usize>>,
    disturbances: Vec<String>,
    w_metric: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_metric: Option<Vec<Vec<f64>>>,
    transitions: Vec<(usize, usize, usize, usize)>,
    costs: Vec<(usize, usize, usize, f64)>,
    discount: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    true_dist: Option<Vec<f64>>,
}

/// Field-aware JSON front end: a missing or ill-typed field is reported by
/// name before the structural validation runs.
fn parse_model_json(text: &str) -> Result<ModelFile> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or(Error::ModelFile {
        field: "<root>",
        reason: "expected a JSON object".into(),
    })?;
    for field in [
        "states",
        "actions",
        "admissible",
        "disturbances",
        "w_metric",
        "transitions",
        "costs",
        "discount",
    ] {
        if !obj.contains_key(field) {
            return Err(Error::ModelFile {
                field,
                reason: "missing".into(),
            });
        }
    }
    serde_json::from_value(value).map_err(Error::from)
}

pub fn model_from_json(text: &str) -> Result<ModelDocument> {
    let file = parse_model_json(text)?;
    let w_metric = Metric::new(file.w_metric)?;
    let x_metric = file.x_metric.map(Metric::new).transpose()?;
    let model = MdpModel::from_tables(
        file.states,
        file.actions,
        file.admissible,
        file.disturbances,
        w_metric,
        x_metric,
        file.discount,
        &file.transitions,
        &file.costs,
    )?;
    let true_dist = file
        .true_dist
        .map(|mass| {
            if mass.len() != model.n_disturbances() {
                return Err(Error::ModelFile {
                    field: "true_dist",
                    reason: format!(
                        "length {} does not match |W| = {}",
                        mass.len(),
                        model.n_disturbances()
                    ),
                });
            }
            Distribution::new(mass)
        })
        .transpose()?;
    Ok(ModelDocument { model, true_dist })
}

pub fn model_to_json(doc: &ModelDocument) -> Result<String> {
    let model = &doc.model;
    let mut transitions = Vec::new();
    let mut costs = Vec::new();
    for x in 0..model.n_states() {
        for &a in model.admissible(x) {
            for w in 0..model.n_disturbances() {
                transitions.push((x, a, w, model.next_state(x, a, w)?));
                costs.push((x, a, w, model.stage_cost(x, a, w)?));
            }
        }
    }
    let file = ModelFile {
        states: model.state_labels().to_vec(),
        actions: model.action_labels().to_vec(),
        admissible: model.admissible_sets().to_vec(),
        disturbances: model.disturbance_labels().to_vec(),
        w_metric: model.w_metric().rows().to_vec(),
        x_metric: model.x_metric().map(|m| m.rows().to_vec()),
        transitions,
        costs,
        discount: model.discount(),
        true_dist: doc.true_dist.as_ref().map(|d| d.mass().to_vec()),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelDocument> {
    let text = fs::read_to_string(path)?;
    model_from_json(&text)
}

pub fn save_model(doc: &ModelDocument, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_json(doc)?)?;
    Ok(())
}

/// Fixed-width scientific formatting with 12 significant digits; keeps CLI
/// output and CSV files byte-stable across runs.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // normalize -0.0
    format!("{:.11e}", x + 0.0)
}

/// CSV rendering of the per-trial records. Wall times are the only
/// run-dependent column.
pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(
        "trial,N,epsilon,dist_mu_muhat,premise,coverage_ok,sup_gap_robust,sup_gap_oos,wall_ms\n",
    );
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.3}\n",
            r.trial,
            r.n,
            sig12(r.epsilon),
            sig12(r.dist_mu_muhat),
            u8::from(r.premise),
            u8::from(r.coverage_ok),
            sig12(r.sup_gap_robust),
            sig12(r.sup_gap_oos),
            r.wall_ms,
        ));
    }
    out
}

/// CSV body with the wall-time column removed; byte-identical across reruns
/// with the same seed.
pub fn report_to_csv_stable(report: &ExperimentReport) -> String {
    let csv = report_to_csv(report);
    csv.lines()
        .map(|line| {
            let cut = line.rfind(',').unwrap_or(line.len());
            format!("{}\n", &line[..cut])
        })
        .collect()
}

pub fn report_to_json(report: &ExperimentReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Writes `<prefix>.json` and `<prefix>.csv`.
pub fn save_report(report: &ExperimentReport, prefix: impl AsRef<Path>) -> Result<()> {
    let prefix = prefix.as_ref();
    let json_path = prefix.with_extension("json");
    let csv_path = prefix.with_extension("csv");
    fs::write(json_path, report_to_json(report)?)?;
    fs::write(csv_path, report_to_csv(report))?;
    Ok(())
}
