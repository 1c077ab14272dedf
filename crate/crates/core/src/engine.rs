//! Collocation solves for `a_{m,n}`, the band interpolants `I_α g_m` and the
//! modulated approximant `J_α f(x) = Σ_m e^{2πimx} I_α g_m(x)`.
//!
//! The collocation matrix `[φ_α(x_j - x_k)]` is real symmetric positive
//! definite (φ̂_α > 0), so one Cholesky factorization per (α, nodes) serves
//! every band; complex right-hand sides are solved as two real systems.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bands::{band_slice, sample_band_signal, TestSignal};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::families::InterpolatorFamily;
use crate::nodes::NodeSet;
use crate::spectral::{modulation, BandSpectrum, FrequencyGrid};

/// Solves whose condition estimate exceeds this are flagged precision-limited.
pub const PRECISION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    /// Spectral condition number λ_max / λ_min of the collocation matrix.
    pub condition: f64,
    /// max_n |Σ_k a_k φ(x_n - x_k) - s_n|
    pub residual: f64,
    pub precision_limited: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub alpha: f64,
    pub band_index: i64,
    /// a_{m,n} for n = -N..=N.
    pub values: Vec<Complex64>,
    pub diagnostics: SolveDiagnostics,
}

impl CoefficientSet {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|a| a.norm()).sum()
    }
}

/// Factored collocation matrix for one (family, α, node set).
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    alpha: f64,
    matrix: DMatrix<f64>,
    cholesky: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    condition: f64,
}

impl CollocationSystem {
    pub fn new(family: &InterpolatorFamily, alpha: f64, nodes: &NodeSet) -> Result<Self> {
        family.check_alpha(alpha)?;
        let x = nodes.values();
        let n = x.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| family.spatial(alpha, x[i] - x[j]));
        let condition = condition_estimate(&matrix);
        let cholesky =
            nalgebra::Cholesky::new(matrix.clone()).ok_or(Error::Conditioning { condition })?;
        Ok(Self {
            alpha,
            matrix,
            cholesky,
            condition,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Coefficients with `I_α g(x_n) = samples_n`.
    ///
    /// A residual above `tol·(1 + max|samples|)` is an accuracy error unless the
    /// system is precision-limited, in which case the coefficients are returned
    /// flagged.
    pub fn solve(
        &self,
        band_index: i64,
        samples: &[Complex64],
        tol: f64,
    ) -> Result<CoefficientSet> {
        let n = self.matrix.nrows();
        if samples.len() != n {
            return Err(Error::contract(format!(
                "{} samples for {n} nodes",
                samples.len()
            )));
        }
        let re = DVector::from_iterator(n, samples.iter().map(|s| s.re));
        let im = DVector::from_iterator(n, samples.iter().map(|s| s.im));
        let a_re = self.cholesky.solve(&re);
        let a_im = self.cholesky.solve(&im);

        let r_re = &self.matrix * &a_re - &re;
        let r_im = &self.matrix * &a_im - &im;
        let residual = r_re
            .iter()
            .zip(r_im.iter())
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max);
        let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let allowed = tol * (1.0 + scale);
        let precision_limited = self.condition > PRECISION_LIMIT;

        let values: Vec<Complex64> = a_re
            .iter()
            .zip(a_im.iter())
            .map(|(r, i)| Complex64::new(*r, *i))
            .collect();
        if values
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::Conditioning {
                condition: self.condition,
            });
        }
        if !(residual <= allowed) && !precision_limited {
            return Err(Error::Accuracy {
                residual,
                allowed,
                condition: self.condition,
            });
        }
        Ok(CoefficientSet {
            alpha: self.alpha,
            band_index,
            values,
            diagnostics: SolveDiagnostics {
                condition: self.condition,
                residual,
                precision_limited,
            },
        })
    }
}

/// λ_max / λ_min from a symmetric eigendecomposition (∞ if λ_min ≤ 0).
fn condition_estimate(matrix: &DMatrix<f64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(matrix.clone()).eigenvalues;
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// One-off solve of the collocation system `Σ_k a_k φ_α(x_j - x_k) = samples_j`.
pub fn solve_coefficients(
    family: &InterpolatorFamily,
    alpha: f64,
    nodes: &NodeSet,
    samples: &[Complex64],
    tol: f64,
) -> Result<CoefficientSet> {
    CollocationSystem::new(family, alpha, nodes)?.solve(0, samples, tol)
}

/// `Σ_n a_n φ_α(x - x_n)`, ascending n.
pub fn interpolant_spatial(
    coeffs: &CoefficientSet,
    family: &InterpolatorFamily,
    nodes: &NodeSet,
    x: f64,
) -> Complex64 {
    coeffs
        .values
        .iter()
        .zip(nodes.values())
        .map(|(a, xn)| a * family.spatial(coeffs.alpha, x - xn))
        .sum()
}

/// Exact transform of the finite sum: `φ̂_α(ξ) Σ_n a_n e^{-i x_n ξ}`.
pub fn interpolant_spectral(
    coeffs: &CoefficientSet,
    family: &InterpolatorFamily,
    nodes: &NodeSet,
    xi: f64,
) -> Complex64 {
    let phase_sum: Complex64 = coeffs
        .values
        .iter()
        .zip(nodes.values())
        .map(|(a, xn)| a * Complex64::from_polar(1.0, -xn * xi))
        .sum();
    phase_sum * family.spectral(coeffs.alpha, xi)
}

/// Everything fixed across an α sweep.
#[derive(Debug, Clone)]
pub struct Setup {
    pub family: InterpolatorFamily,
    pub nodes: NodeSet,
    pub grid: FrequencyGrid,
    pub m_max: i64,
    pub tol: f64,
    pub exec: Exec,
}

/// `J_α f` in coefficient form: one `CoefficientSet` per band, ascending m.
#[derive(Debug, Clone)]
pub struct Approximant {
    alpha: f64,
    family: InterpolatorFamily,
    nodes: NodeSet,
    bands: Vec<CoefficientSet>,
    m_max: i64,
    condition: f64,
}

impl Approximant {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> &InterpolatorFamily {
        &self.family
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn m_max(&self) -> i64 {
        self.m_max
    }

    pub fn bands(&self) -> &[CoefficientSet] {
        &self.bands
    }

    pub fn band(&self, m: i64) -> Option<&CoefficientSet> {
        if m.abs() > self.m_max {
            None
        } else {
            Some(&self.bands[(m + self.m_max) as usize])
        }
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn precision_limited(&self) -> bool {
        self.condition > PRECISION_LIMIT
    }

    pub fn max_residual(&self) -> f64 {
        self.bands
            .iter()
            .map(|b| b.diagnostics.residual)
            .fold(0.0, f64::max)
    }

    /// `J_α f(x) = Σ_m e^{2πimx} I_α g_m(x)`, ascending m.
    pub fn evaluate_j(&self, x: f64) -> Complex64 {
        let kernel: Vec<f64> = self
            .nodes
            .values()
            .iter()
            .map(|xn| self.family.spatial(self.alpha, x - xn))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for band in &self.bands {
            let local: Complex64 = band.values.iter().zip(&kernel).map(|(a, k)| a * k).sum();
            acc += modulation(band.band_index, x) * local;
        }
        acc
    }

    /// Band j of the spectrum of `J_α f` in baseband coordinates:
    /// `Σ_m Î_α g_m(ξ + 2πj - 2πm)`.
    pub fn j_spectrum_band(&self, j: i64, grid: &FrequencyGrid) -> BandSpectrum {
        let values = grid.sample(|xi| {
            self.bands
                .iter()
                .map(|b| {
                    let shifted = xi + 2.0 * PI * (j - b.band_index) as f64;
                    interpolant_spectral(b, &self.family, &self.nodes, shifted)
                })
                .sum()
        });
        BandSpectrum::new(j, values).expect("finite coefficients give a finite spectrum")
    }
}

/// Band-slice, sample and solve every band `|m| ≤ M_max` at one α.
pub fn reconstruct(signal: TestSignal, alpha: f64, setup: &Setup) -> Result<Approximant> {
    if setup.m_max < 0 {
        return Err(Error::contract("M_max must be ≥ 0"));
    }
    let system = CollocationSystem::new(&setup.family, alpha, &setup.nodes)?;
    let solved = setup.exec.map_range(-setup.m_max, setup.m_max, |m| {
        let band = band_slice(signal, m, &setup.grid);
        let samples = sample_band_signal(&band, &setup.grid, &setup.nodes)?;
        system
            .solve(m, &samples, setup.tol)
            .map_err(|e| e.in_band(m))
    });
    let bands = solved.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Approximant {
        alpha,
        family: setup.family,
        nodes: setup.nodes.clone(),
        bands,
        m_max: setup.m_max,
        condition: system.condition(),
    })
}
