//! Test signals with closed-form spectra, band slicing and node sampling.
//!
//! Band slicing restricts f̂ to `[2πm - π, 2πm + π)` and shifts it to baseband,
//! `ĝ_m(ξ) = f̂(ξ + 2πm)`, so that `f(x) = Σ_m e^{2πimx} g_m(x)`. Bands are
//! half-open: a grid node sitting exactly at ξ = π belongs to band m + 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nodes::NodeSet;
use crate::spectral::{
    modulation, AmalgamSpectrum, BandSpectrum, FrequencyGrid, SpatialGrid, INV_SQRT_2PI,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    /// Rapidly decreasing together with all derivatives.
    Schwartz,
    /// f̂ supported in a compact set.
    CompactBand,
    /// |f̂(ξ)| = O(|ξ|^{-1-ε}).
    PolynomialDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestSignal {
    /// f(x) = e^{-x²/2}, f̂(ξ) = e^{-ξ²/2}.
    GaussPair,
    /// f̂(ξ) = max(0, 1 - |ξ|/π), a single band.
    TriBand,
    /// f(x) = e^{-|x|}, f̂(ξ) = √(2/π) / (1 + ξ²).
    CauchyDecay,
    /// C^∞ bumps in bands 0 and 1: f̂(ξ) = b(ξ) + ½ b(ξ - 2π).
    TwoBand,
    Zero,
}

impl TestSignal {
    pub const ALL: [TestSignal; 5] = [
        TestSignal::GaussPair,
        TestSignal::TriBand,
        TestSignal::CauchyDecay,
        TestSignal::TwoBand,
        TestSignal::Zero,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TestSignal::GaussPair => "gauss_pair",
            TestSignal::TriBand => "tri_band",
            TestSignal::CauchyDecay => "cauchy_decay",
            TestSignal::TwoBand => "two_band",
            TestSignal::Zero => "zero",
        }
    }

    pub fn class_tags(self) -> &'static [ClassTag] {
        match self {
            TestSignal::GaussPair => &[ClassTag::Schwartz],
            TestSignal::TriBand => &[ClassTag::CompactBand],
            TestSignal::CauchyDecay => &[ClassTag::PolynomialDecay],
            TestSignal::TwoBand => &[ClassTag::CompactBand],
            TestSignal::Zero => &[ClassTag::Schwartz, ClassTag::CompactBand],
        }
    }

    /// f is real valued (f̂(-ξ) = conj f̂(ξ)).
    pub fn is_real(self) -> bool {
        !matches!(self, TestSignal::TwoBand)
    }

    /// Inclusive band range outside of which f̂ vanishes, if compactly supported.
    pub fn support_bands(self) -> Option<(i64, i64)> {
        match self {
            TestSignal::TriBand => Some((0, 0)),
            TestSignal::TwoBand => Some((0, 1)),
            TestSignal::Zero => Some((0, -1)),
            _ => None,
        }
    }

    pub fn spectral(self, xi: f64) -> Complex64 {
        let re = match self {
            TestSignal::GaussPair => (-xi * xi / 2.0).exp(),
            TestSignal::TriBand => (1.0 - xi.abs() / PI).max(0.0),
            TestSignal::CauchyDecay => (2.0 / PI).sqrt() / (1.0 + xi * xi),
            TestSignal::TwoBand => bump(xi) + 0.5 * bump(xi - 2.0 * PI),
            TestSignal::Zero => 0.0,
        };
        Complex64::new(re, 0.0)
    }

    /// Closed-form f(x) where one is known.
    pub fn spatial(self, x: f64) -> Option<Complex64> {
        let re = match self {
            TestSignal::GaussPair => (-x * x / 2.0).exp(),
            TestSignal::TriBand => {
                // 2(1 - cos πx)/(πx²) · (2π)^{-1/2}, written without cancellation
                if x == 0.0 {
                    PI * INV_SQRT_2PI
                } else {
                    let s = (0.5 * PI * x).sin();
                    4.0 * INV_SQRT_2PI * s * s / (PI * x * x)
                }
            }
            TestSignal::CauchyDecay => (-x.abs()).exp(),
            TestSignal::TwoBand => return None,
            TestSignal::Zero => 0.0,
        };
        Some(Complex64::new(re, 0.0))
    }

    /// f(x) from the closed form, or by quadrature over the support bands.
    pub fn reference_at(self, x: f64, grid: &FrequencyGrid) -> Result<Complex64> {
        if let Some(v) = self.spatial(x) {
            return Ok(v);
        }
        let (lo, hi) = self
            .support_bands()
            .ok_or_else(|| Error::contract(format!("{self} has no spatial evaluator")))?;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in lo..=hi {
            let band = band_slice(self, m, grid);
            acc += modulation(m, x) * grid.inverse_at(band.values(), x)?;
        }
        Ok(acc)
    }

    /// Upper bound on `Σ_{|m|>m_max} ‖f̂(· + 2πm)‖_{L²([-π,π])}`.
    pub fn tail_bound(self, m_max: i64) -> f64 {
        let m_max = m_max.max(0);
        match self {
            TestSignal::GaussPair => {
                // band norm ≤ √(2π) sup, sup at the inner edge (2m-1)π
                let first = (-(((2 * m_max + 1) as f64) * PI).powi(2) / 2.0).exp();
                let q = (-4.0 * PI * PI * (m_max + 1) as f64).exp();
                2.0 * (2.0 * PI).sqrt() * first / (1.0 - q)
            }
            TestSignal::CauchyDecay => {
                const EXPLICIT: i64 = 64;
                let head: f64 = (m_max + 1..=m_max + EXPLICIT).map(cauchy_band_norm).sum();
                // beyond: band norm ≤ 2/((2m-1)π)², summed by the integral bound
                let k = (m_max + EXPLICIT) as f64;
                2.0 * head + 2.0 / (PI * PI * (2.0 * k - 1.0))
            }
            TestSignal::TriBand | TestSignal::Zero => 0.0,
            TestSignal::TwoBand => {
                if m_max >= 1 {
                    0.0
                } else {
                    0.5 * (2.0 * PI).sqrt()
                }
            }
        }
    }
}

impl fmt::Display for TestSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TestSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sig| sig.id() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|s| s.id()).collect();
                Error::Config(format!(
                    "unknown signal '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// exp(1 - 1/(1 - (ξ/π)²)) on (-π, π), zero elsewhere; peak 1 at ξ = 0.
fn bump(xi: f64) -> f64 {
    let t = xi / PI;
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Exact band-m L² norm of √(2/π)/(1+ξ²), m ≥ 1, via the antiderivative
/// ξ/(2(1+ξ²)) + atan(ξ)/2 of (1+ξ²)^{-2}.
fn cauchy_band_norm(m: i64) -> f64 {
    let a = (2 * m - 1) as f64 * PI;
    let b = (2 * m + 1) as f64 * PI;
    let rational = 0.5 * (b / (1.0 + b * b) - a / (1.0 + a * a));
    let angle = 0.5 * ((b - a) / (1.0 + a * b)).atan();
    ((2.0 / PI) * (rational + angle)).max(0.0).sqrt()
}

/// The catalog exposed by id.
pub fn builtin_signals() -> Vec<TestSignal> {
    TestSignal::ALL.to_vec()
}

/// Baseband piece `ĝ_m(ξ_k) = f̂(ξ_k + 2πm)` on the grid.
pub fn band_slice(signal: TestSignal, m: i64, grid: &FrequencyGrid) -> BandSpectrum {
    let shift = 2.0 * PI * m as f64;
    let values = grid.sample(|xi| {
        if xi >= PI {
            Complex64::new(0.0, 0.0)
        } else {
            signal.spectral(xi + shift)
        }
    });
    BandSpectrum::new(m, values).expect("closed-form spectra are finite")
}

/// All bands `|m| ≤ m_max` with the signal's analytic tail.
pub fn amalgam_spectrum(
    signal: TestSignal,
    grid: &FrequencyGrid,
    m_max: i64,
) -> Result<AmalgamSpectrum> {
    if m_max < 0 {
        return Err(Error::contract("M_max must be ≥ 0"));
    }
    let bands = (-m_max..=m_max)
        .map(|m| band_slice(signal, m, grid))
        .collect();
    AmalgamSpectrum::new(bands, signal.tail_bound(m_max))
}

/// `g_m(x_n)` by baseband quadrature inversion (no 2πm modulation).
pub fn sample_band_signal(
    band: &BandSpectrum,
    grid: &FrequencyGrid,
    nodes: &NodeSet,
) -> Result<Vec<Complex64>> {
    grid.check_len(band.values().len())?;
    if band.is_zero() {
        return Ok(vec![Complex64::new(0.0, 0.0); nodes.len()]);
    }
    nodes
        .values()
        .iter()
        .map(|&x| grid.inverse_at(band.values(), x))
        .collect()
}

/// `max_x |f(x) - Σ_{|m|≤M} e^{2πimx} g_m(x)|`: the discretization floor of
/// band slicing plus quadrature inversion.
pub fn reassemble_check(
    signal: TestSignal,
    grid: &FrequencyGrid,
    m_max: i64,
    x_grid: &SpatialGrid,
) -> Result<f64> {
    if signal.spatial(0.0).is_none() {
        return Err(Error::contract(format!(
            "reassemble_check needs a closed-form spatial side; {signal} has none"
        )));
    }
    let spectrum = amalgam_spectrum(signal, grid, m_max)?;
    let mut worst: f64 = 0.0;
    for &x in x_grid.points() {
        let exact = signal.spatial(x).expect("checked above");
        let rebuilt = crate::spectral::inverse_ft_at(&spectrum, grid, x)?;
        worst = worst.max((exact - rebuilt).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::uniform_nodes;
    use crate::spectral::{amalgam_norm, band_l2_norm, l2_norm_parseval};
    use statrs::function::erf::erf;

    fn trapezoid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (inner + 0.5 * (f(a) + f(b)))
    }

    /// Forward transform of a real even spatial function by trapezoid on [0, L].
    fn forward_even(f: impl Fn(f64) -> f64, xi: f64, len: f64, n: usize) -> f64 {
        2.0 * INV_SQRT_2PI * trapezoid(0.0, len, n, |x| f(x) * (x * xi).cos())
    }

    #[test]
    fn catalog_examples() {
        let ids: Vec<_> = builtin_signals().iter().map(|s| s.id()).collect();
        for id in ["gauss_pair", "tri_band", "cauchy_decay", "two_band", "zero"] {
            assert!(ids.contains(&id));
            assert_eq!(id.parse::<TestSignal>().unwrap().id(), id);
        }
        assert!("nope".parse::<TestSignal>().is_err());
        assert_eq!(TestSignal::GaussPair.spectral(0.0).re, 1.0);
        assert!((TestSignal::CauchyDecay.spectral(0.0).re - 0.797885).abs() < 1e-6);
        assert_eq!(TestSignal::TriBand.spectral(PI).re, 0.0);
        assert_eq!(TestSignal::TriBand.spectral(-PI).re, 0.0);
    }

    #[test]
    fn closed_forms_match_forward_quadrature() {
        // e^{-|x|}: kink at 0 sits on the trapezoid endpoint, decays past 40
        let c = forward_even(|x| (-x).exp(), 0.0, 45.0, 900_000);
        assert!((c - TestSignal::CauchyDecay.spectral(0.0).re).abs() < 1e-8);
        let c = forward_even(|x| (-x).exp(), 2.0, 45.0, 900_000);
        assert!((c - TestSignal::CauchyDecay.spectral(2.0).re).abs() < 1e-8);
        let g = forward_even(|x| (-x * x / 2.0).exp(), PI, 12.0, 20_000);
        assert!((g - (-PI * PI / 2.0).exp()).abs() < 1e-12);
        assert!(((-PI * PI / 2.0).exp() - 7.191_883_355_826_368e-3).abs() < 1e-17);
        // triangle spectrum inverted against the closed-form spatial side
        for x in [0.0, 0.3, 2.5] {
            let inv = 2.0
                * INV_SQRT_2PI
                * trapezoid(0.0, PI, 200_000, |xi| (1.0 - xi / PI) * (x * xi).cos());
            assert!((inv - TestSignal::TriBand.spatial(x).unwrap().re).abs() < 1e-9);
        }
    }

    #[test]
    fn slicing_examples() {
        let g = FrequencyGrid::default();
        assert!(band_slice(TestSignal::TriBand, 1, &g).is_zero());
        assert!(band_slice(TestSignal::TriBand, -3, &g).is_zero());
        // GL grids never hit ξ = 0 or ±π; check through a hand-built grid
        let edge =
            FrequencyGrid::from_parts(vec![-PI, 0.0, PI], vec![PI / 2.0, PI, PI / 2.0]).unwrap();
        let b0 = band_slice(TestSignal::GaussPair, 0, &edge);
        assert_eq!(b0.values()[1].re, 1.0);
        assert_eq!(b0.values()[2].re, 0.0, "ξ = π belongs to the next band");
        let b1 = band_slice(TestSignal::GaussPair, 1, &edge);
        assert!((b1.values()[0].re - (-PI * PI / 2.0).exp()).abs() < 1e-17);
    }

    #[test]
    fn conjugate_symmetry_for_real_signals() {
        let g = FrequencyGrid::default();
        let k = g.points_per_band();
        for sig in [
            TestSignal::GaussPair,
            TestSignal::TriBand,
            TestSignal::CauchyDecay,
        ] {
            for m in 0..=3 {
                let pos = band_slice(sig, m, &g);
                let neg = band_slice(sig, -m, &g);
                for i in 0..k {
                    let d = neg.values()[k - 1 - i] - pos.values()[i].conj();
                    assert!(d.norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn band_norms_partition_parseval() {
        let g = FrequencyGrid::default();
        let spec = amalgam_spectrum(TestSignal::CauchyDecay, &g, 6).unwrap();
        let direct: f64 = spec
            .bands()
            .iter()
            .map(|b| band_l2_norm(b, &g).unwrap().powi(2))
            .sum();
        // ∫_{-13π}^{13π} (2/π)/(1+ξ²)² dξ
        let f = |x: f64| x / (2.0 * (1.0 + x * x)) + x.atan() / 2.0;
        let exact = (2.0 / PI) * (f(13.0 * PI) - f(-13.0 * PI));
        assert!((direct - exact).abs() < 1e-12);
        let no_tail = AmalgamSpectrum::new(spec.bands().to_vec(), 0.0).unwrap();
        assert!((l2_norm_parseval(&no_tail, &g).unwrap().powi(2) - exact).abs() < 1e-12);
    }

    #[test]
    fn tail_bounds_dominate_sampled_bands() {
        let g = FrequencyGrid::default();
        for sig in TestSignal::ALL {
            for m_max in [0, 2, 4] {
                let explicit: f64 = (m_max + 1..m_max + 40)
                    .flat_map(|m| [m, -m])
                    .map(|m| band_l2_norm(&band_slice(sig, m, &g), &g).unwrap())
                    .sum();
                assert!(
                    explicit <= sig.tail_bound(m_max) * (1.0 + 1e-9) + 1e-300,
                    "{sig} m_max={m_max}: {explicit} > {}",
                    sig.tail_bound(m_max)
                );
            }
        }
        // cauchy: the explicit head is exact, so the bound is tight
        let explicit: f64 = (9..200_000).map(|m| 2.0 * cauchy_band_norm(m)).sum();
        let bound = TestSignal::CauchyDecay.tail_bound(8);
        assert!(bound >= explicit && (bound - explicit) / explicit < 1e-2);
    }

    #[test]
    fn membership_at_working_truncation() {
        let g = FrequencyGrid::default();
        for sig in [
            TestSignal::GaussPair,
            TestSignal::TriBand,
            TestSignal::TwoBand,
        ] {
            let spec = amalgam_spectrum(sig, &g, 8).unwrap();
            let total = amalgam_norm(&spec, &g).unwrap();
            assert!(total.is_finite());
            assert!(spec.tail_estimate() < 0.01 * total);
        }
        // e^{-|x|} has a 1/ξ² spectrum: its tail past |m| = 8 is just above 1%
        let frac = |m_max| {
            let spec = amalgam_spectrum(TestSignal::CauchyDecay, &g, m_max).unwrap();
            spec.tail_estimate() / amalgam_norm(&spec, &g).unwrap()
        };
        assert!(frac(8) > 0.0095 && frac(8) < 0.011, "{}", frac(8));
        assert!(frac(10) < 0.01);
    }

    #[test]
    fn sampling_examples() {
        let g = FrequencyGrid::default();
        let nodes = uniform_nodes(3).unwrap();
        let zero = sample_band_signal(&BandSpectrum::zeros(0, &g), &g, &nodes).unwrap();
        assert!(zero.iter().all(|v| v.norm() == 0.0));

        let b0 = band_slice(TestSignal::GaussPair, 0, &g);
        let at0 = sample_band_signal(&b0, &g, &uniform_nodes(0).unwrap()).unwrap()[0];
        let oracle = erf(PI / 2f64.sqrt());
        assert!((oracle - 0.99832).abs() < 1e-5);
        assert!((at0.re - oracle).abs() < 1e-13);
        assert!(at0.im.abs() < 1e-15);

        let one = BandSpectrum::new(0, vec![Complex64::new(1.0, 0.0); 256]).unwrap();
        let v = sample_band_signal(&one, &g, &uniform_nodes(0).unwrap()).unwrap()[0];
        assert!((v.re - (2.0 * PI).sqrt()).abs() < 1e-12);

        let wrong = BandSpectrum::new(0, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        assert!(sample_band_signal(&wrong, &g, &nodes).is_err());
    }

    #[test]
    fn sample_at_zero_is_scaled_integral() {
        let g = FrequencyGrid::default();
        let nodes = uniform_nodes(0).unwrap();
        for sig in [TestSignal::CauchyDecay, TestSignal::TwoBand] {
            for m in -1..=2 {
                let b = band_slice(sig, m, &g);
                let integral: Complex64 =
                    b.values().iter().zip(g.weights()).map(|(v, w)| v * w).sum();
                let s = sample_band_signal(&b, &g, &nodes).unwrap()[0];
                assert!((s - integral * INV_SQRT_2PI).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn reassembly_floor() {
        let g = FrequencyGrid::default();
        let xs = SpatialGrid::uniform(16.0, 20).unwrap();
        assert!(reassemble_check(TestSignal::TriBand, &g, 0, &xs).unwrap() <= 1e-8);
        assert!(reassemble_check(TestSignal::GaussPair, &g, 4, &xs).unwrap() <= 1e-6);
        assert_eq!(reassemble_check(TestSignal::Zero, &g, 2, &xs).unwrap(), 0.0);
        assert!(reassemble_check(TestSignal::TwoBand, &g, 2, &xs).is_err());
    }

    #[test]
    fn two_band_reference_is_consistent() {
        let g = FrequencyGrid::default();
        let fine = FrequencyGrid::gauss_legendre(1024, 8).unwrap();
        for x in [0.0, 0.37, -5.2, 13.0] {
            let a = TestSignal::TwoBand.reference_at(x, &g).unwrap();
            let b = TestSignal::TwoBand.reference_at(x, &fine).unwrap();
            assert!((a - b).norm() < 1e-10, "x={x}: {a} vs {b}");
        }
    }
}
