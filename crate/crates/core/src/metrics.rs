//! Error functionals of `f - J_α f`: L², amalgam and sup norms, the weighted
//! right-hand side `Σ_j ‖m_α φ̂_α(ξ)^{-1} f̂(ξ + 2πj)‖`, and sweeps over α.
//!
//! The node set is finite, so `J_α f` departs from the bi-infinite
//! approximant near and beyond the outermost nodes. All three error
//! functionals are therefore measured on the interior window. The sup norm is
//! a max over the interior grid `[-T, T]`. The spectral norms are taken of the
//! localized error `w·(f - J_α f)`, where `w = 1` on `[-T, T]` and falls to 0
//! over `[T, 3T/2]` with a C^∞ step. Its transform comes from spatial
//! Gauss-Legendre quadrature, and is then cut into bands `|j| ≤ J_cap`.
//! The unwindowed route through `j_spectrum_band` is kept as
//! [`global_error_spectrum`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bands::{band_slice, TestSignal};
use crate::engine::{reconstruct, Approximant, Setup, PRECISION_LIMIT};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral::{AmalgamSpectrum, BandSpectrum, FrequencyGrid, SpatialGrid, INV_SQRT_2PI};

const SPATIAL_POINTS_PER_PANEL: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub alpha: f64,
    pub l2_error: f64,
    pub amalgam_error: f64,
    pub sup_error: f64,
    pub rhs_bound: f64,
    pub bound_ratio: f64,
    pub condition_estimate: f64,
    /// Bound on f's spectrum beyond |j| = J_cap.
    pub tail_slack_f: f64,
    /// Bound on J_α f's spectral leakage beyond |j| = J_cap.
    pub tail_slack_j: f64,
    pub precision_limited: bool,
}

/// C^∞ step: 1 on |x| ≤ t, 0 on |x| ≥ t + width.
pub fn window(x: f64, interior: f64, width: f64) -> f64 {
    let s = (x.abs() - interior) / width;
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let psi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
        let a = psi(1.0 - s);
        a / (a + psi(s))
    }
}

fn check_interior(approx: &Approximant, x_grid: &SpatialGrid) -> Result<()> {
    let half = approx.nodes().half_width() as f64;
    if x_grid.extent() > half / 2.0 {
        return Err(Error::contract(format!(
            "interior window T = {} exceeds N/2 = {}",
            x_grid.extent(),
            half / 2.0
        )));
    }
    Ok(())
}

/// Error report for one approximant.
pub fn error_report(
    signal: TestSignal,
    approx: &Approximant,
    grid: &FrequencyGrid,
    x_grid: &SpatialGrid,
    j_cap: i64,
) -> Result<ErrorReport> {
    error_report_with(
        signal,
        approx,
        grid,
        x_grid,
        j_cap,
        crate::exec::Exec::default(),
    )
}

pub(crate) fn error_report_with(
    signal: TestSignal,
    approx: &Approximant,
    grid: &FrequencyGrid,
    x_grid: &SpatialGrid,
    j_cap: i64,
    exec: crate::exec::Exec,
) -> Result<ErrorReport> {
    check_interior(approx, x_grid)?;
    if j_cap < approx.m_max() {
        return Err(Error::contract("J_cap must be at least M_max"));
    }
    let alpha = approx.alpha();
    let family = approx.family();

    let sup_error = exec
        .map(x_grid.points(), |&x| -> Result<f64> {
            Ok((signal.reference_at(x, grid)? - approx.evaluate_j(x)).norm())
        })
        .into_iter()
        .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)))?;

    let error_bands = windowed_error_bands(signal, approx, grid, x_grid.extent(), j_cap, exec)?;
    let band_norms = error_bands
        .iter()
        .map(|b| grid.l2_norm(b.values()))
        .collect::<Result<Vec<_>>>()?;

    let tail_slack_f = signal.tail_bound(j_cap);
    let tail_slack_j: f64 = (2.0 * PI).sqrt()
        * approx
            .bands()
            .iter()
            .map(|b| {
                let m = b.band_index;
                b.l1_norm()
                    * (family.big_m_tail(alpha, j_cap - m + 1)
                        + family.big_m_tail(alpha, j_cap + m + 1))
            })
            .sum::<f64>();
    let slack = tail_slack_f + tail_slack_j;

    let amalgam_error = band_norms.iter().sum::<f64>() + slack;
    let l2_error = (band_norms.iter().map(|b| b * b).sum::<f64>() + slack * slack).sqrt();

    let mut rhs_bound = tail_slack_f;
    for j in -j_cap..=j_cap {
        let shift = 2.0 * PI * j as f64;
        let weighted = grid.integrate(|xi| {
            (family.h3_weight(alpha, xi) * signal.spectral(xi + shift).norm()).powi(2)
        });
        rhs_bound += weighted.sqrt();
    }
    let bound_ratio = if rhs_bound > 0.0 {
        amalgam_error / rhs_bound
    } else {
        0.0
    };

    Ok(ErrorReport {
        alpha,
        l2_error,
        amalgam_error,
        sup_error,
        rhs_bound,
        bound_ratio,
        condition_estimate: approx.condition_estimate(),
        tail_slack_f,
        tail_slack_j,
        precision_limited: approx.condition_estimate() > PRECISION_LIMIT,
    })
}

/// Bands `|j| ≤ J_cap` of the transform of `w·(f - J_α f)`, with `w` the
/// interior window of half-width `interior` and taper `interior / 2`.
pub fn windowed_error_bands(
    signal: TestSignal,
    approx: &Approximant,
    grid: &FrequencyGrid,
    interior: f64,
    j_cap: i64,
    exec: crate::exec::Exec,
) -> Result<Vec<BandSpectrum>> {
    let taper = interior / 2.0;
    let reach = interior + taper;
    // highest frequency in the integrand: J_α f content up to band M_max plus the band kernel
    let omega = 2.0 * PI * (approx.m_max() + j_cap + 1) as f64;
    let panel = (24.0 / omega).min(0.5);
    let panels = ((2.0 * reach / panel).ceil() as usize).max(1);
    let (xs, ws) = quadrature::composite(-reach, reach, panels, SPATIAL_POINTS_PER_PANEL);

    let localized = exec
        .map(&xs, |&x| -> Result<Complex64> {
            let e = signal.reference_at(x, grid)? - approx.evaluate_j(x);
            Ok(e * window(x, interior, taper))
        })
        .into_iter()
        .zip(&ws)
        .map(|(e, w)| e.map(|e| e * *w))
        .collect::<Result<Vec<_>>>()?;

    // e^{-ixξ_k}, shared by all bands
    let base: Vec<Vec<Complex64>> = exec.map(&xs, |&x| {
        grid.nodes()
            .iter()
            .map(|xi| Complex64::from_polar(1.0, -x * xi))
            .collect()
    });

    let bands = exec.map_range(-j_cap, j_cap, |j| {
        let shifted: Vec<Complex64> = xs
            .iter()
            .zip(&localized)
            .map(|(x, u)| u * crate::spectral::modulation(-j, *x))
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.points_per_band()];
        for (u, row) in shifted.iter().zip(&base) {
            for (v, e) in values.iter_mut().zip(row) {
                *v += u * e;
            }
        }
        for v in &mut values {
            *v *= INV_SQRT_2PI;
        }
        BandSpectrum::new(j, values)
    });
    bands.into_iter().collect()
}

/// Unwindowed error spectrum `f̂(ξ + 2πj) - Σ_m Î_α g_m(ξ + 2πj - 2πm)` for
/// `|j| ≤ J_cap`, with f's analytic tail. Includes the truncation artifacts of
/// the finite node set.
pub fn global_error_spectrum(
    signal: TestSignal,
    approx: &Approximant,
    grid: &FrequencyGrid,
    j_cap: i64,
) -> Result<AmalgamSpectrum> {
    let bands = (-j_cap..=j_cap)
        .map(|j| {
            let f = band_slice(signal, j, grid);
            let jf = approx.j_spectrum_band(j, grid);
            let diff = f
                .values()
                .iter()
                .zip(jf.values())
                .map(|(a, b)| a - b)
                .collect();
            BandSpectrum::new(j, diff)
        })
        .collect::<Result<Vec<_>>>()?;
    AmalgamSpectrum::new(bands, signal.tail_bound(j_cap))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub alpha: f64,
    pub outcome: std::result::Result<ErrorReport, Error>,
}

impl SweepEntry {
    /// Precision-limited rows (including factorization failures beyond the
    /// conditioning wall) are reported, not counted as failures.
    pub fn precision_limited(&self) -> bool {
        match &self.outcome {
            Ok(r) => r.precision_limited,
            Err(e) => e.condition().is_some_and(|c| c > PRECISION_LIMIT),
        }
    }

    pub fn failed(&self) -> bool {
        self.outcome.is_err() && !self.precision_limited()
    }
}

/// One report per α, ordered by α. Per-α failures are recorded in the entry
/// and the sweep carries on.
pub fn sweep(
    signal: TestSignal,
    alphas: &[f64],
    setup: &Setup,
    x_grid: &SpatialGrid,
    j_cap: i64,
) -> Result<Vec<SweepEntry>> {
    if alphas.is_empty() {
        return Err(Error::contract("alpha sweep must be nonempty"));
    }
    if !alphas.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::contract("alpha sweep must be strictly ascending"));
    }
    for a in alphas {
        setup.family.check_alpha(*a)?;
    }
    Ok(setup.exec.map(alphas, |&alpha| SweepEntry {
        alpha,
        outcome: reconstruct(signal, alpha, setup).and_then(|approx| {
            error_report_with(signal, &approx, &setup.grid, x_grid, j_cap, setup.exec)
        }),
    }))
}
