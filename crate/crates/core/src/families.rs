//! Regular families of interpolators with closed-form spectra.
//!
//! | family   | φ_α(x)            | φ̂_α(ξ)              |
//! |----------|-------------------|---------------------|
//! | gaussian | e^{-x²/(4α)}      | √(2α) e^{-αξ²}      |
//! | poisson  | α / (x² + α²)     | √(π/2) e^{-α\|ξ\|}   |
//!
//! Both kernels are continuous and integrable with integrable, strictly
//! positive spectra (the L¹ ∩ C requirement is an analytic fact of these
//! formulas and is not machine-checked). Both spectra are even and decreasing
//! in |ξ|, so the infimum over the base band sits at ξ = ±π and the supremum
//! over band j at its inner edge |ξ| = (2|j| - 1)π.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Grid size used for numeric extremum searches on one band.
pub const EXTREMUM_GRID_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Gaussian,
    Poisson,
}

impl FamilyKind {
    pub fn id(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Poisson => "poisson",
        }
    }

    /// Admissible α range used when no override is given. The gaussian cap
    /// keeps the collocation solve inside double-precision range
    /// (condition number grows like e^{απ²}).
    pub fn default_domain(self) -> (f64, f64) {
        match self {
            FamilyKind::Gaussian => (0.5, 3.0),
            FamilyKind::Poisson => (0.5, 16.0),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(FamilyKind::Gaussian),
            "poisson" => Ok(FamilyKind::Poisson),
            other => Err(Error::Config(format!(
                "unknown family '{other}' (expected gaussian or poisson)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolatorFamily {
    kind: FamilyKind,
    alpha_domain: (f64, f64),
}

impl InterpolatorFamily {
    pub fn new(kind: FamilyKind) -> Self {
        Self {
            kind,
            alpha_domain: kind.default_domain(),
        }
    }

    pub fn gaussian() -> Self {
        Self::new(FamilyKind::Gaussian)
    }

    pub fn poisson() -> Self {
        Self::new(FamilyKind::Poisson)
    }

    pub fn with_domain(kind: FamilyKind, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!(
                "alpha domain [{lo}, {hi}] must be a nonempty interval in (0, ∞)"
            )));
        }
        Ok(Self {
            kind,
            alpha_domain: (lo, hi),
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn alpha_domain(&self) -> (f64, f64) {
        self.alpha_domain
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        let (lo, hi) = self.alpha_domain;
        if alpha >= lo && alpha <= hi {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "alpha",
                value: alpha,
                domain: format!("[{lo}, {hi}] for the {} family", self.kind),
            })
        }
    }

    /// φ_α(x), checked.
    pub fn phi_spatial(&self, alpha: f64, x: f64) -> Result<f64> {
        self.check_alpha(alpha)?;
        Ok(self.spatial(alpha, x))
    }

    /// φ̂_α(ξ), checked.
    pub fn phi_spectral(&self, alpha: f64, xi: f64) -> Result<f64> {
        self.check_alpha(alpha)?;
        Ok(self.spectral(alpha, xi))
    }

    /// m_α = inf_{|ξ|≤π} φ̂_α(ξ) = φ̂_α(π).
    pub fn m_alpha(&self, alpha: f64) -> Result<f64> {
        self.check_alpha(alpha)?;
        Ok(self.spectral(alpha, PI))
    }

    /// M_j(α) = sup_{|ξ|≤π} φ̂_α(ξ + 2πj) = φ̂_α((2|j| - 1)π), for j ≠ 0.
    pub fn big_m(&self, alpha: f64, j: i64) -> Result<f64> {
        if j == 0 {
            return Err(Error::contract("M_j is only defined for j ≠ 0"));
        }
        self.check_alpha(alpha)?;
        Ok(self.band_sup(alpha, j))
    }

    /// Upper bound on the one-sided tail `Σ_{k ≥ from} M_k(α)`, `from ≥ 1`.
    pub fn big_m_tail(&self, alpha: f64, from: i64) -> f64 {
        let from = from.max(1);
        let head = self.band_sup(alpha, from);
        // ratio of consecutive terms is at most q for every k ≥ from
        let q = match self.kind {
            FamilyKind::Gaussian => (-8.0 * alpha * PI * PI * from as f64).exp(),
            FamilyKind::Poisson => (-2.0 * alpha * PI).exp(),
        };
        head / (1.0 - q)
    }

    pub(crate) fn spatial(&self, alpha: f64, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => (-x * x / (4.0 * alpha)).exp(),
            FamilyKind::Poisson => alpha / (x * x + alpha * alpha),
        }
    }

    pub(crate) fn spectral(&self, alpha: f64, xi: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => (2.0 * alpha).sqrt() * (-alpha * xi * xi).exp(),
            FamilyKind::Poisson => FRAC_PI_2.sqrt() * (-alpha * xi.abs()).exp(),
        }
    }

    fn band_sup(&self, alpha: f64, j: i64) -> f64 {
        self.spectral(alpha, (2 * j.abs() - 1) as f64 * PI)
    }

    /// m_α / φ̂_α(ξ), the weight that drives convergence.
    pub(crate) fn h3_weight(&self, alpha: f64, xi: f64) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => (-alpha * (PI * PI - xi * xi)).exp(),
            FamilyKind::Poisson => (-alpha * (PI - xi.abs())).exp(),
        }
    }

    /// Uniform grid extremum of φ̂_α over [-π, π] + 2πj (endpoints included).
    fn grid_extremum(&self, alpha: f64, j: i64, take_max: bool) -> f64 {
        let n = EXTREMUM_GRID_POINTS;
        let values = (0..n).map(|i| {
            // written as a multiple of π so the band edges match (2|j| ∓ 1)π exactly
            let t = (2 * j - 1) as f64 + 2.0 * i as f64 / (n - 1) as f64;
            self.spectral(alpha, t * PI)
        });
        if take_max {
            values.fold(f64::NEG_INFINITY, f64::max)
        } else {
            values.fold(f64::INFINITY, f64::min)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityTolerances {
    /// Cap on Σ_{j≠0} M_j / m_α.
    pub c_cap: f64,
    /// Final-α ceiling on m_α / φ̂_α(ξ).
    pub h3_threshold: f64,
    /// Tail of Σ M_j beyond J_max, relative to the head sum.
    pub tail_rel: f64,
    /// Grid vs analytic extremum agreement needed to call a value certified.
    pub extremum_rel: f64,
}

impl Default for RegularityTolerances {
    fn default() -> Self {
        Self {
            c_cap: 2.5,
            h3_threshold: 1e-3,
            tail_rel: 1e-12,
            extremum_rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PassFlags {
    pub a2: bool,
    pub a3: bool,
    pub h2: bool,
    pub h3: bool,
}

impl PassFlags {
    pub fn all(&self) -> bool {
        self.a2 && self.a3 && self.h2 && self.h3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub alpha: f64,
    /// Grid infimum of φ̂_α over [-π, π]; the δ of the positivity axiom.
    pub delta_estimate: f64,
    pub m_alpha: f64,
    /// `(j, M_j)` for `1 ≤ |j| ≤ J_max`, ascending j.
    pub big_m: Vec<(i64, f64)>,
    /// Two-sided bound on `Σ_{|j|>J_max} M_j`.
    pub tail_bound: f64,
    pub h2_ratio: f64,
    /// `(ξ, m_α / φ̂_α(ξ))`.
    pub h3_profile: Vec<(f64, f64)>,
    /// Grid extrema agreed with the analytic locations.
    pub certified: bool,
    pub pass: PassFlags,
}

/// Numeric certificate of the interpolator axioms and the regular-family
/// hypotheses over an α sweep. Reports come back ordered by ascending α; the
/// monotonicity part of the H3 flag compares each row with its predecessor and
/// the threshold part applies to the last row.
pub fn verify_regularity(
    family: &InterpolatorFamily,
    alpha_sweep: &[f64],
    j_max: i64,
    xi_grid: &[f64],
    tol: &RegularityTolerances,
    exec: Exec,
) -> Result<Vec<RegularityReport>> {
    if alpha_sweep.is_empty() {
        return Err(Error::contract("alpha sweep must be nonempty"));
    }
    if j_max < 1 {
        return Err(Error::contract("J_max must be at least 1"));
    }
    if xi_grid.iter().any(|xi| xi.abs() >= PI) {
        return Err(Error::contract(
            "H3 grid points must lie strictly inside (-π, π)",
        ));
    }
    let mut alphas = alpha_sweep.to_vec();
    for a in &alphas {
        family.check_alpha(*a)?;
    }
    alphas.sort_by(f64::total_cmp);

    let mut reports = exec.map(&alphas, |&alpha| {
        single_report(family, alpha, j_max, xi_grid, tol)
    });

    let last = reports.len() - 1;
    for i in 0..reports.len() {
        let decreasing = i == 0
            || reports[i]
                .h3_profile
                .iter()
                .zip(&reports[i - 1].h3_profile)
                .all(|(now, before)| now.1 < before.1);
        let below = i != last
            || reports[i]
                .h3_profile
                .iter()
                .all(|(_, r)| *r < tol.h3_threshold);
        reports[i].pass.h3 = decreasing && below;
    }
    Ok(reports)
}

fn single_report(
    family: &InterpolatorFamily,
    alpha: f64,
    j_max: i64,
    xi_grid: &[f64],
    tol: &RegularityTolerances,
) -> RegularityReport {
    let agrees = |grid: f64, exact: f64| (grid - exact).abs() <= tol.extremum_rel * exact.abs();

    let m_alpha = family.spectral(alpha, PI);
    let delta_estimate = family.grid_extremum(alpha, 0, false);
    let mut certified = agrees(delta_estimate, m_alpha);

    let mut big_m = Vec::with_capacity(2 * j_max as usize);
    for j in (-j_max..=j_max).filter(|j| *j != 0) {
        let exact = family.band_sup(alpha, j);
        certified &= agrees(family.grid_extremum(alpha, j, true), exact);
        big_m.push((j, exact));
    }
    let head: f64 = big_m.iter().map(|(_, m)| m).sum();
    let tail_bound = 2.0 * family.big_m_tail(alpha, j_max + 1);
    let h2_ratio = (head + tail_bound) / m_alpha;

    let h3_profile = xi_grid
        .iter()
        .map(|&xi| (xi, m_alpha / family.spectral(alpha, xi)))
        .collect();

    RegularityReport {
        alpha,
        delta_estimate,
        m_alpha,
        big_m,
        tail_bound,
        h2_ratio,
        h3_profile,
        certified,
        pass: PassFlags {
            a2: delta_estimate > 0.0,
            a3: tail_bound.is_finite() && tail_bound < tol.tail_rel * head,
            h2: h2_ratio <= tol.c_cap,
            h3: false,
        },
    }
}

/// `points` equally spaced ξ values on [-extent, extent].
pub fn h3_grid(points: usize, extent: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n)
            .map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
