//! Experiment configuration: one JSON document, unknown keys rejected.
//!
//! ```json
//! {
//!   "family": { "id": "gaussian" },
//!   "alpha_sweep": { "start": 0.75, "stop": 2.5, "count": 4, "spacing": "linear" },
//!   "nodes": { "N": 32, "d": 0.0, "seed": 0, "symmetric": true },
//!   "bands": { "M_max": 4, "J_cap": 6, "K": 256 },
//!   "signal": { "id": "gauss_pair" },
//!   "spatial": { "T_int": 16.0, "density": 20 },
//!   "tolerances": { "solver": 1e-7, "quadrature_panels": 4 },
//!   "output": { "directory": "results", "formats": ["csv", "json"] }
//! }
//! ```
//!
//! Every section except `family` may be omitted. [`ExperimentConfig`] keeps
//! exactly what was written, so echoing it reproduces the run; [`Experiment`]
//! is the validated form with all defaults filled in.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bands::TestSignal;
use crate::engine::Setup;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::families::{h3_grid, FamilyKind, InterpolatorFamily, RegularityTolerances};
use crate::nodes::{perturbed_nodes, KADEC_BOUND};
use crate::spectral::{FrequencyGrid, SpatialGrid, DEFAULT_PANELS, DEFAULT_POINTS_PER_BAND};

pub const DEFAULT_SWEEP_COUNT: usize = 6;
pub const DEFAULT_NODES: i64 = 32;
pub const DEFAULT_M_MAX: i64 = 4;
pub const DEFAULT_DENSITY: usize = 20;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-7;
pub const DEFAULT_J_MAX: i64 = 8;
pub const DEFAULT_XI_POINTS: usize = 17;
pub const DEFAULT_OUTPUT_DIR: &str = "results";
pub const MIN_POINTS_PER_BAND: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<NodesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<BandsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<SpatialSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub id: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_domain: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Either a generated range (`start`, `stop`, `count`, `spacing`) or an
/// explicit ascending list in `values`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesSection {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSection {
    #[serde(rename = "M_max", default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<i64>,
    #[serde(rename = "J_cap", default, skip_serializing_if = "Option::is_none")]
    pub j_cap: Option<i64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub points_per_band: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialSection {
    #[serde(rename = "T_int", default, skip_serializing_if = "Option::is_none")]
    pub t_int: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<f64>,
    /// Gauss-Legendre panels per band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_panels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySection {
    #[serde(rename = "J_max", default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_extent: Option<f64>,
    #[serde(rename = "C_cap", default, skip_serializing_if = "Option::is_none")]
    pub c_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h3_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_rel: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validate and fill in defaults.
    pub fn resolve(&self) -> Result<Experiment> {
        let family = match self.family.alpha_domain {
            Some([lo, hi]) => InterpolatorFamily::with_domain(self.family.id, lo, hi)?,
            None => InterpolatorFamily::new(self.family.id),
        };
        let alphas = self.alphas(&family)?;

        let nodes_cfg = self.nodes.clone().unwrap_or_default();
        let n = nodes_cfg.n.unwrap_or(DEFAULT_NODES);
        if n < 1 {
            return Err(Error::Config(format!(
                "nodes.N must be at least 1, got {n}"
            )));
        }
        let d = nodes_cfg.d.unwrap_or(0.0);
        if !(0.0..KADEC_BOUND).contains(&d) {
            return Err(Error::Config(format!(
                "nodes.d = {d} violates the Kadec bound: perturbations must satisfy 0 ≤ d < 1/4"
            )));
        }
        let nodes = perturbed_nodes(
            n,
            d,
            nodes_cfg.seed.unwrap_or(0),
            nodes_cfg.symmetric.unwrap_or(true),
        )?;

        let bands = self.bands.clone().unwrap_or_default();
        let m_max = bands.m_max.unwrap_or(DEFAULT_M_MAX);
        if m_max < 0 {
            return Err(Error::Config(format!(
                "bands.M_max must be ≥ 0, got {m_max}"
            )));
        }
        let j_cap = bands.j_cap.unwrap_or(m_max + 2);
        if j_cap < m_max {
            return Err(Error::Config(format!(
                "bands.J_cap = {j_cap} must be at least M_max = {m_max}"
            )));
        }
        let k = bands.points_per_band.unwrap_or(DEFAULT_POINTS_PER_BAND);
        if k < MIN_POINTS_PER_BAND {
            return Err(Error::Config(format!(
                "bands.K = {k} is below the minimum of {MIN_POINTS_PER_BAND} points per band"
            )));
        }

        let tolerances = self.tolerances.clone().unwrap_or_default();
        let panels = tolerances.quadrature_panels.unwrap_or(DEFAULT_PANELS);
        if panels == 0 || !k.is_multiple_of(panels) {
            return Err(Error::Config(format!(
                "tolerances.quadrature_panels = {panels} must divide K = {k}"
            )));
        }
        let grid = FrequencyGrid::gauss_legendre(k, panels).map_err(config_error)?;
        let tol = tolerances.solver.unwrap_or(DEFAULT_SOLVER_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!(
                "tolerances.solver must be positive, got {tol}"
            )));
        }

        let signal: TestSignal = match &self.signal {
            Some(s) => s.id.parse()?,
            None => TestSignal::GaussPair,
        };

        let spatial = self.spatial.clone().unwrap_or_default();
        let half = n as f64 / 2.0;
        let t_int = spatial.t_int.unwrap_or(half);
        if !(t_int > 0.0 && t_int <= half) {
            return Err(Error::Config(format!(
                "spatial.T_int = {t_int} must lie in (0, N/2] = (0, {half}]"
            )));
        }
        let density = spatial.density.unwrap_or(DEFAULT_DENSITY);
        let x_grid = SpatialGrid::uniform(t_int, density).map_err(config_error)?;

        let reg = self.regularity.clone().unwrap_or_default();
        let j_max = reg.j_max.unwrap_or(DEFAULT_J_MAX);
        if j_max < 1 {
            return Err(Error::Config(format!(
                "regularity.J_max must be ≥ 1, got {j_max}"
            )));
        }
        let xi_extent = reg.xi_extent.unwrap_or(FRAC_PI_2);
        if !(0.0..std::f64::consts::PI).contains(&xi_extent) {
            return Err(Error::Config(format!(
                "regularity.xi_extent = {xi_extent} must lie in [0, π)"
            )));
        }
        let defaults = RegularityTolerances::default();
        let regularity = RegularityPlan {
            j_max,
            xi_grid: h3_grid(reg.xi_points.unwrap_or(DEFAULT_XI_POINTS), xi_extent),
            tolerances: RegularityTolerances {
                c_cap: reg.c_cap.unwrap_or(defaults.c_cap),
                h3_threshold: reg.h3_threshold.unwrap_or(defaults.h3_threshold),
                tail_rel: reg.tail_rel.unwrap_or(defaults.tail_rel),
                ..defaults
            },
        };

        let output = self.output.clone().unwrap_or_default();
        let formats = output
            .formats
            .unwrap_or_else(|| vec![Format::Csv, Format::Json]);
        if formats.is_empty() {
            return Err(Error::Config("output.formats must not be empty".into()));
        }

        Ok(Experiment {
            setup: Setup {
                family,
                nodes,
                grid,
                m_max,
                tol,
                exec: Exec::default(),
            },
            alphas,
            signal,
            x_grid,
            j_cap,
            regularity,
            out_dir: output
                .directory
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            formats,
        })
    }

    fn alphas(&self, family: &InterpolatorFamily) -> Result<Vec<f64>> {
        let sweep = self.alpha_sweep.clone().unwrap_or_default();
        let alphas = if let Some(values) = sweep.values {
            if sweep.start.is_some() || sweep.stop.is_some() || sweep.count.is_some() {
                return Err(Error::Config(
                    "alpha_sweep: give either values or start/stop/count, not both".into(),
                ));
            }
            values
        } else {
            let (lo, hi) = family.alpha_domain();
            let start = sweep.start.unwrap_or(lo);
            let stop = sweep.stop.unwrap_or(hi);
            let count = sweep.count.unwrap_or(DEFAULT_SWEEP_COUNT);
            if count < 1 {
                return Err(Error::Config("alpha_sweep.count must be at least 1".into()));
            }
            spaced(start, stop, count, sweep.spacing.unwrap_or_default())?
        };
        if alphas.is_empty() {
            return Err(Error::Config(
                "alpha_sweep must contain at least one α".into(),
            ));
        }
        if !alphas.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Config(
                "alpha_sweep must be strictly ascending".into(),
            ));
        }
        for a in &alphas {
            family.check_alpha(*a).map_err(config_error)?;
        }
        Ok(alphas)
    }
}

fn spaced(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 1 {
        return Ok(vec![start]);
    }
    if !(start < stop) {
        return Err(Error::Config(format!(
            "alpha_sweep.start = {start} must be below stop = {stop}"
        )));
    }
    let steps = (count - 1) as f64;
    let mut values: Vec<f64> = match spacing {
        Spacing::Linear => (0..count)
            .map(|i| start + (stop - start) * i as f64 / steps)
            .collect(),
        Spacing::Log => {
            if start <= 0.0 {
                return Err(Error::Config("log spacing needs a positive start".into()));
            }
            let ratio = (stop / start).ln();
            (0..count)
                .map(|i| start * (ratio * i as f64 / steps).exp())
                .collect()
        }
    };
    // pin the endpoints so they stay inside the admissible domain
    values[0] = start;
    values[count - 1] = stop;
    Ok(values)
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityPlan {
    pub j_max: i64,
    pub xi_grid: Vec<f64>,
    pub tolerances: RegularityTolerances,
}

/// A validated configuration with every default resolved.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub setup: Setup,
    pub alphas: Vec<f64>,
    pub signal: TestSignal,
    pub x_grid: SpatialGrid,
    pub j_cap: i64,
    pub regularity: RegularityPlan,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Experiment {
    pub fn writes(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Experiment> {
        ExperimentConfig::from_json(text)?.resolve()
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let e = parse(r#"{"family": {"id": "gaussian"}}"#).unwrap();
        assert_eq!(e.alphas, vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(e.setup.nodes.len(), 65);
        assert_eq!((e.setup.m_max, e.j_cap), (4, 6));
        assert_eq!(e.setup.grid.points_per_band(), 256);
        assert_eq!(e.x_grid.extent(), 16.0);
        assert_eq!(e.signal, TestSignal::GaussPair);
        assert_eq!(e.regularity.xi_grid.len(), 17);
        assert!(e.writes(Format::Csv) && e.writes(Format::Json));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"family": {"id": "gaussian"}, "tolerance": {}}"#,
            r#"{"family": {"id": "gaussian"}, "tolerances": {"solvr": 1e-9}}"#,
            r#"{"family": {"id": "gaussian", "alpha": 1}}"#,
        ] {
            assert!(matches!(
                ExperimentConfig::from_json(text),
                Err(Error::Config(_))
            ));
        }
    }

    #[test]
    fn validation_rules() {
        let err = parse(r#"{"family": {"id": "gaussian"}, "nodes": {"d": 0.3}}"#).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("Kadec")));
        for text in [
            r#"{"family": {"id": "gaussian"}, "bands": {"K": 16}}"#,
            r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"count": 0}}"#,
            r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"values": [2.0, 1.0]}}"#,
            r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"values": [4.0]}}"#,
            r#"{"family": {"id": "gaussian"}, "signal": {"id": "square"}}"#,
            r#"{"family": {"id": "cauchy"}}"#,
            r#"{"family": {"id": "gaussian"}, "spatial": {"T_int": 40}}"#,
            r#"{"family": {"id": "gaussian"}, "bands": {"M_max": 4, "J_cap": 2}}"#,
            r#"{"family": {"id": "gaussian"}, "output": {"formats": []}}"#,
        ] {
            assert!(matches!(parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn sweep_spacing() {
        let e = parse(
            r#"{"family": {"id": "poisson"},
                "alpha_sweep": {"start": 1, "stop": 8, "count": 4, "spacing": "log"}}"#,
        )
        .unwrap();
        assert_eq!(e.alphas.len(), 4);
        for (a, b) in e.alphas.iter().zip([1.0, 2.0, 4.0, 8.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let single =
            parse(r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"start": 1.5, "count": 1}}"#)
                .unwrap();
        assert_eq!(single.alphas, vec![1.5]);
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"{
            "family": {"id": "gaussian", "alpha_domain": [0.5, 2.5]},
            "alpha_sweep": {"values": [0.75, 1.25, 1.75, 2.5]},
            "nodes": {"N": 32, "d": 0.1, "seed": 7, "symmetric": false},
            "bands": {"M_max": 4, "K": 256},
            "signal": {"id": "two_band"},
            "tolerances": {"solver": 1e-7}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
