//! The experiment runner behind the CLI: `verify-family`, `sweep`,
//! `reconstruct` and `list-signals`.
//!
//! Results are computed first and written once, in order, at the end of the
//! run. Floats are written in shortest round-trip form, so identical configs
//! give identical bytes. `manifest.json` is written whenever a run completes,
//! including runs whose assertions fail or whose rows are flagged.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::bands::builtin_signals;
use crate::config::{Experiment, ExperimentConfig, Format};
use crate::engine::reconstruct;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::families::{verify_regularity, RegularityReport};
use crate::metrics::{sweep, SweepEntry};

pub const REGULARITY_CSV: &str = "regularity.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const RECONSTRUCT_JSON: &str = "reconstruct.json";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Slack allowed in the `l2_error ≤ amalgam_error` check.
const EMBEDDING_SLACK: f64 = 1e-10;

/// Exit status for a failed command: 2 for configuration problems, 1 for
/// numeric failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain { .. } => 2,
        _ => 1,
    }
}

/// Where and how to run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output.directory`.
    pub out: Option<PathBuf>,
    /// Overrides the default executor.
    pub exec: Option<Exec>,
}

/// A completed run. `success` decides between exit 0 and exit 1.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub success: bool,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

fn prepare(config: &ExperimentConfig, opts: &RunOptions) -> Result<Experiment> {
    let mut exp = config.resolve()?;
    if let Some(out) = &opts.out {
        exp.out_dir = out.clone();
    }
    if let Some(exec) = opts.exec {
        exp.setup.exec = exec;
    }
    Ok(exp)
}

pub fn cmd_verify_family(config: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome> {
    let exp = prepare(config, opts)?;
    let plan = &exp.regularity;
    let reports = verify_regularity(
        &exp.setup.family,
        &exp.alphas,
        plan.j_max,
        &plan.xi_grid,
        &plan.tolerances,
        exp.setup.exec,
    )?;

    let all = |f: fn(&RegularityReport) -> bool| reports.iter().all(f);
    let summary = json!({
        "family": exp.setup.family.kind().id(),
        "rows": reports.len(),
        "assertions": {
            "A2": all(|r| r.pass.a2),
            "A3": all(|r| r.pass.a3),
            "H2": all(|r| r.pass.h2),
            "H3": all(|r| r.pass.h3),
        },
        "certified": all(|r| r.certified),
        "max_h2_ratio": reports.iter().map(|r| r.h2_ratio).fold(f64::NEG_INFINITY, f64::max),
    });
    let success = all(|r| r.pass.all());

    let mut files = Vec::new();
    if exp.writes(Format::Csv) {
        files.push(write_file(
            &exp.out_dir,
            REGULARITY_CSV,
            &regularity_csv(&reports)?,
        )?);
    }
    finish(
        "verify-family",
        config,
        exp.out_dir,
        files,
        summary,
        success,
    )
}

pub fn cmd_sweep(config: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome> {
    let exp = prepare(config, opts)?;
    let entries = sweep(exp.signal, &exp.alphas, &exp.setup, &exp.x_grid, exp.j_cap)?;

    // trends are judged on rows inside double-precision range
    let ok: Vec<_> = entries
        .iter()
        .filter(|e| !e.precision_limited())
        .filter_map(|e| e.outcome.as_ref().ok())
        .collect();
    let decreasing =
        |f: fn(&crate::metrics::ErrorReport) -> f64| ok.windows(2).all(|w| f(w[1]) < f(w[0]));
    let ratios: Vec<f64> = ok
        .iter()
        .map(|r| r.bound_ratio)
        .filter(|r| *r > 0.0)
        .collect();
    let spread = if ratios.is_empty() {
        1.0
    } else {
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let failures: Vec<Value> = entries
        .iter()
        .filter_map(|e| match &e.outcome {
            Err(err) => Some(json!({
                "alpha": e.alpha,
                "flagged": e.precision_limited(),
                "error": err.to_string(),
            })),
            Ok(_) => None,
        })
        .collect();
    let summary = json!({
        "signal": exp.signal.id(),
        "family": exp.setup.family.kind().id(),
        "rows": entries.len(),
        "precision_limited_rows": entries.iter().filter(|e| e.precision_limited()).count(),
        "failed_rows": entries.iter().filter(|e| e.failed()).count(),
        "row_errors": failures,
        "assertions": {
            "l2_error_decreasing": decreasing(|r| r.l2_error),
            "amalgam_error_decreasing": decreasing(|r| r.amalgam_error),
            "sup_error_decreasing": decreasing(|r| r.sup_error),
            "embedding_l2_le_amalgam": ok.iter().all(|r| r.l2_error <= r.amalgam_error + EMBEDDING_SLACK),
            "bound_ratio_spread_below_10": spread < 10.0,
        },
        "bound_ratio_spread": spread,
    });
    let success = !entries.iter().any(SweepEntry::failed);

    let mut files = Vec::new();
    if exp.writes(Format::Csv) {
        files.push(write_file(
            &exp.out_dir,
            CONVERGENCE_CSV,
            &convergence_csv(&entries)?,
        )?);
    }
    finish("sweep", config, exp.out_dir, files, summary, success)
}

/// One evaluation point of a reconstruction; complex values as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointValue {
    pub x: f64,
    pub f: [f64; 2],
    pub j: [f64; 2],
    pub error: f64,
}

/// Evaluates f and J_α f at `eval_points` (the nodes when `None`) for the
/// single α of the config. Returns the outcome and the JSON array.
pub fn cmd_reconstruct(
    config: &ExperimentConfig,
    eval_points: Option<&[f64]>,
    opts: &RunOptions,
) -> Result<(Outcome, String)> {
    let exp = prepare(config, opts)?;
    let [alpha] = exp.alphas[..] else {
        return Err(Error::Config(format!(
            "reconstruct needs exactly one α, the sweep has {}",
            exp.alphas.len()
        )));
    };
    let mut xs = match eval_points {
        Some(p) => p.to_vec(),
        None => exp.setup.nodes.values().to_vec(),
    };
    if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::Config(format!(
            "evaluation point {bad} is not finite"
        )));
    }
    xs.sort_by(f64::total_cmp);

    let approx = reconstruct(exp.signal, alpha, &exp.setup)?;
    let points = exp
        .setup
        .exec
        .map(&xs, |&x| -> Result<PointValue> {
            let f = exp.signal.reference_at(x, &exp.setup.grid)?;
            let j = approx.evaluate_j(x);
            Ok(PointValue {
                x,
                f: [f.re, f.im],
                j: [j.re, j.im],
                error: (f - j).norm(),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let body = serde_json::to_string_pretty(&points).expect("points serialize") + "\n";

    let summary = json!({
        "signal": exp.signal.id(),
        "alpha": alpha,
        "points": points.len(),
        "condition_estimate": approx.condition_estimate(),
        "precision_limited": approx.precision_limited(),
        "max_node_residual": approx.max_residual(),
        "max_pointwise_error": points.iter().map(|p| p.error).fold(0.0, f64::max),
    });
    let mut files = Vec::new();
    if exp.writes(Format::Json) {
        files.push(write_file(&exp.out_dir, RECONSTRUCT_JSON, &body)?);
    }
    let outcome = finish("reconstruct", config, exp.out_dir, files, summary, true)?;
    Ok((outcome, body))
}

/// The builtin catalog, one signal per line.
pub fn list_signals() -> String {
    let mut out = String::from("id\tclasses\treal\tsupport_bands\n");
    for s in builtin_signals() {
        let tags: Vec<String> = s
            .class_tags()
            .iter()
            .map(|t| {
                serde_json::to_value(t)
                    .expect("tag")
                    .as_str()
                    .unwrap_or("")
                    .to_owned()
            })
            .collect();
        let support = match s.support_bands() {
            Some((lo, hi)) if lo > hi => "none".to_owned(),
            Some((lo, hi)) => format!("{lo}..={hi}"),
            None => "all".to_owned(),
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            s.id(),
            tags.join(","),
            s.is_real(),
            support
        ));
    }
    out
}

/// Shortest representation that parses back to the same f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

pub fn regularity_csv(reports: &[RegularityReport]) -> Result<String> {
    let xi_grid: Vec<f64> = reports
        .first()
        .map(|r| r.h3_profile.iter().map(|p| p.0).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = ["alpha", "delta_estimate", "m_alpha", "h2_ratio"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(
        xi_grid
            .iter()
            .map(|xi| format!("h3_ratio_at_{}", fmt_float(*xi))),
    );
    header.extend(
        ["pass_A2", "pass_A3", "pass_H2", "pass_H3"]
            .iter()
            .map(|s| s.to_string()),
    );

    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![
            fmt_float(r.alpha),
            fmt_float(r.delta_estimate),
            fmt_float(r.m_alpha),
            fmt_float(r.h2_ratio),
        ];
        row.extend(r.h3_profile.iter().map(|p| fmt_float(p.1)));
        row.extend(
            [r.pass.a2, r.pass.a3, r.pass.h2, r.pass.h3]
                .iter()
                .map(|b| b.to_string()),
        );
        rows.push(row);
    }
    render_csv(&rows)
}

pub const CONVERGENCE_COLUMNS: [&str; 10] = [
    "alpha",
    "l2_error",
    "amalgam_error",
    "sup_error",
    "rhs_bound",
    "bound_ratio",
    "condition_estimate",
    "tail_slack_f",
    "tail_slack_J",
    "precision_limited",
];

/// Failed rows keep α, the condition estimate when known and the flag, with
/// the error fields left empty.
pub fn convergence_csv(entries: &[SweepEntry]) -> Result<String> {
    let mut rows = vec![CONVERGENCE_COLUMNS.iter().map(|s| s.to_string()).collect()];
    for e in entries {
        let row = match &e.outcome {
            Ok(r) => vec![
                fmt_float(r.alpha),
                fmt_float(r.l2_error),
                fmt_float(r.amalgam_error),
                fmt_float(r.sup_error),
                fmt_float(r.rhs_bound),
                fmt_float(r.bound_ratio),
                fmt_float(r.condition_estimate),
                fmt_float(r.tail_slack_f),
                fmt_float(r.tail_slack_j),
                r.precision_limited.to_string(),
            ],
            Err(err) => {
                let mut row = vec![String::new(); CONVERGENCE_COLUMNS.len()];
                row[0] = fmt_float(e.alpha);
                row[6] = err.condition().map(fmt_float).unwrap_or_default();
                row[9] = e.precision_limited().to_string();
                row
            }
        };
        rows.push(row);
    }
    render_csv(&rows)
}

fn render_csv(rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(row)
            .map_err(|e| Error::contract(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::contract(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, body)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn finish(
    command: &str,
    config: &ExperimentConfig,
    out_dir: PathBuf,
    mut files: Vec<PathBuf>,
    summary: Value,
    success: bool,
) -> Result<Outcome> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let listed: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": timestamp,
        "config": config,
        "files": listed,
        "success": success,
        "summary": summary,
    });
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    files.push(write_file(&out_dir, MANIFEST_JSON, &body)?);
    Ok(Outcome {
        success,
        out_dir,
        files,
        summary,
    })
}
