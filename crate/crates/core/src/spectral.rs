//! Frequency grids, band-indexed spectra and the three spectral norms.
//!
//! Transform convention: `ĝ(ξ) = (2π)^{-1/2} ∫ g(x) e^{-ixξ} dx`, inverse with
//! the conjugate kernel and the same normalization. Spectra are stored in
//! baseband coordinates: band `m` holds `ξ ↦ f̂(ξ + 2πm)` for `ξ ∈ [-π, π]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

/// `(2π)^{-1/2}`
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub const DEFAULT_POINTS_PER_BAND: usize = 256;
pub const DEFAULT_PANELS: usize = 4;

/// Quadrature rule on the base band [-π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl FrequencyGrid {
    /// Composite Gauss-Legendre with `panels` equal panels on [-π, π].
    ///
    /// With an even panel count ξ = 0 is a panel boundary, so spectra with a
    /// kink at the band centre (the triangle) still integrate to full accuracy.
    /// The node set is exactly symmetric about 0.
    pub fn gauss_legendre(points_per_band: usize, panels: usize) -> Result<Self> {
        if panels == 0 || points_per_band == 0 || !points_per_band.is_multiple_of(panels) {
            return Err(Error::contract(format!(
                "points_per_band ({points_per_band}) must be a positive multiple of panels ({panels})"
            )));
        }
        let (mut nodes, mut weights) =
            quadrature::composite(-PI, PI, panels, points_per_band / panels);
        let k = nodes.len();
        for i in 0..k / 2 {
            nodes[k - 1 - i] = -nodes[i];
            weights[k - 1 - i] = weights[i];
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        Self::from_parts(nodes, weights)
    }

    /// Builds a grid from explicit abscissae and weights, checking the invariants.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::contract(
                "grid needs matching, nonempty nodes and weights",
            ));
        }
        if nodes.iter().any(|x| !(-PI..=PI).contains(x)) {
            return Err(Error::contract("grid nodes must lie in [-π, π]"));
        }
        if !nodes.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::contract("grid nodes must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::contract("grid weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if ((total - 2.0 * PI) / (2.0 * PI)).abs() > 1e-12 {
            return Err(Error::contract(format!(
                "grid weights sum to {total}, expected 2π"
            )));
        }
        Ok(Self { nodes, weights })
    }

    pub fn points_per_band(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Samples a function of the baseband frequency on the grid.
    pub fn sample<F: FnMut(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().copied().map(f).collect()
    }

    /// `∫_{-π}^{π} h(ξ) dξ` by the grid rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut h: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * h(*x))
            .sum()
    }

    /// Weighted L² norm of grid samples, `sqrt(Σ w_k |v_k|²)`.
    pub fn l2_norm(&self, values: &[Complex64]) -> Result<f64> {
        self.check_len(values.len())?;
        let s: f64 = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum();
        Ok(s.sqrt())
    }

    /// Baseband inversion `(2π)^{-1/2} Σ_k w_k v_k e^{ixξ_k}`.
    pub fn inverse_at(&self, values: &[Complex64], x: f64) -> Result<Complex64> {
        self.check_len(values.len())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for ((xi, w), v) in self.nodes.iter().zip(&self.weights).zip(values) {
            acc += v * Complex64::from_polar(*w, x * xi);
        }
        Ok(acc * INV_SQRT_2PI)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nodes.len() {
            return Err(Error::contract(format!(
                "spectrum has {len} samples but the grid has {}",
                self.nodes.len()
            )));
        }
        Ok(())
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_POINTS_PER_BAND, DEFAULT_PANELS)
            .expect("default grid is valid")
    }
}

/// Samples of one baseband piece `ĝ_m(ξ) = f̂(ξ + 2πm)` on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpectrum {
    band_index: i64,
    values: Vec<Complex64>,
}

impl BandSpectrum {
    pub fn new(band_index: i64, values: Vec<Complex64>) -> Result<Self> {
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::contract(format!(
                "band {band_index} has non-finite samples"
            )));
        }
        Ok(Self { band_index, values })
    }

    pub fn zeros(band_index: i64, grid: &FrequencyGrid) -> Self {
        Self {
            band_index,
            values: vec![Complex64::new(0.0, 0.0); grid.points_per_band()],
        }
    }

    pub fn band_index(&self) -> i64 {
        self.band_index
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
}

/// Band-indexed spectrum truncated to `|m| ≤ m_max`, with an accounted tail.
#[derive(Debug, Clone, PartialEq)]
pub struct AmalgamSpectrum {
    bands: Vec<BandSpectrum>,
    m_max: i64,
    tail_estimate: f64,
}

impl AmalgamSpectrum {
    /// `bands` may come in any order; indices must be exactly `-m_max..=m_max`.
    /// `tail_estimate` bounds `Σ_{|m|>m_max} ‖band_m‖` and must be supplied explicitly.
    pub fn new(mut bands: Vec<BandSpectrum>, tail_estimate: f64) -> Result<Self> {
        if !(tail_estimate >= 0.0) || !tail_estimate.is_finite() {
            return Err(Error::contract(
                "tail estimate must be finite and nonnegative",
            ));
        }
        if bands.is_empty() || bands.len().is_multiple_of(2) {
            return Err(Error::contract(
                "an amalgam spectrum needs an odd, nonzero number of bands",
            ));
        }
        bands.sort_by_key(|b| b.band_index);
        let m_max = (bands.len() as i64 - 1) / 2;
        for (i, b) in bands.iter().enumerate() {
            if b.band_index != i as i64 - m_max {
                return Err(Error::contract(format!(
                    "band indices must cover -{m_max}..={m_max} exactly once"
                )));
            }
        }
        Ok(Self {
            bands,
            m_max,
            tail_estimate,
        })
    }

    /// Single band at index 0 plus `m_max` zero bands on each side.
    pub fn from_band(band: BandSpectrum, m_max: i64, grid: &FrequencyGrid) -> Result<Self> {
        let idx = band.band_index;
        if idx.abs() > m_max {
            return Err(Error::contract("band index exceeds m_max"));
        }
        let mut bands: Vec<_> = (-m_max..=m_max)
            .filter(|m| *m != idx)
            .map(|m| BandSpectrum::zeros(m, grid))
            .collect();
        bands.push(band);
        Self::new(bands, 0.0)
    }

    pub fn bands(&self) -> &[BandSpectrum] {
        &self.bands
    }

    pub fn m_max(&self) -> i64 {
        self.m_max
    }

    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn band(&self, m: i64) -> Option<&BandSpectrum> {
        if m.abs() > self.m_max {
            None
        } else {
            Some(&self.bands[(m + self.m_max) as usize])
        }
    }
}

/// Evaluation abscissae on [-T, T].
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    extent: f64,
    points: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(extent: f64, points: Vec<f64>) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::contract("spatial extent must be positive"));
        }
        if points.is_empty()
            || !points.windows(2).all(|p| p[0] < p[1])
            || points.iter().any(|x| x.abs() > extent)
        {
            return Err(Error::contract(
                "spatial points must be nonempty, strictly increasing and inside [-T, T]",
            ));
        }
        Ok(Self { extent, points })
    }

    /// Uniform grid on [-T, T] with `density` points per unit length (endpoints included).
    pub fn uniform(extent: f64, density: usize) -> Result<Self> {
        if density == 0 {
            return Err(Error::contract("spatial density must be positive"));
        }
        let intervals = ((2.0 * extent * density as f64).round() as usize).max(1);
        let points = (0..=intervals)
            .map(|i| -extent + 2.0 * extent * i as f64 / intervals as f64)
            .collect();
        Self::new(extent, points)
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// `‖ĝ‖_{L²([-π,π])}` by the grid rule.
pub fn band_l2_norm(spectrum: &BandSpectrum, grid: &FrequencyGrid) -> Result<f64> {
    grid.l2_norm(&spectrum.values)
}

/// `Σ_{|m|≤M} ‖band_m‖ + tail`, summed in ascending band order.
pub fn amalgam_norm(spectrum: &AmalgamSpectrum, grid: &FrequencyGrid) -> Result<f64> {
    let mut total = 0.0;
    for band in &spectrum.bands {
        total += band_l2_norm(band, grid)?;
    }
    Ok(total + spectrum.tail_estimate)
}

/// `‖f‖_{L²(ℝ)} = ‖f̂‖_{L²(ℝ)}` from band norms. The tail enters squared,
/// since `Σ_{tail} ‖b‖² ≤ (Σ_{tail} ‖b‖)²`.
pub fn l2_norm_parseval(spectrum: &AmalgamSpectrum, grid: &FrequencyGrid) -> Result<f64> {
    let mut total = 0.0;
    for band in &spectrum.bands {
        total += band_l2_norm(band, grid)?.powi(2);
    }
    Ok((total + spectrum.tail_estimate.powi(2)).sqrt())
}

/// Inverse transform of the truncated spectrum at `x`:
/// `(2π)^{-1/2} Σ_m Σ_k w_k v_{m,k} e^{ix(ξ_k + 2πm)}`.
pub fn inverse_ft_at(
    spectrum: &AmalgamSpectrum,
    grid: &FrequencyGrid,
    x: f64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for band in &spectrum.bands {
        let base = grid.inverse_at(&band.values, x)?;
        acc += modulation(band.band_index, x) * base;
    }
    Ok(acc)
}

/// `e^{2πimx}`
pub fn modulation(m: i64, x: f64) -> Complex64 {
    // reduce m·x mod 1 first so large |x| keeps full phase accuracy
    let t = (m as f64 * x).rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * t)
}
