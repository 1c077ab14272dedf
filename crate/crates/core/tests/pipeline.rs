//! End-to-end checks of the reconstruction pipeline against independent routes.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use pw_amalgam::spectral::inverse_ft_at;
use pw_amalgam::{
    perturbed_nodes, reconstruct, uniform_nodes, AmalgamSpectrum, Exec, FrequencyGrid,
    InterpolatorFamily, Setup, TestSignal,
};

fn setup(n: i64, m_max: i64) -> Setup {
    Setup {
        family: InterpolatorFamily::gaussian(),
        nodes: uniform_nodes(n).unwrap(),
        grid: FrequencyGrid::default(),
        m_max,
        tol: 1e-9,
        exec: Exec::Sequential,
    }
}

#[test]
fn spatial_and_spectral_routes_agree() {
    // J_α f evaluated directly and through the inverse transform of its band spectrum
    let s = setup(8, 2);
    let approx = reconstruct(TestSignal::TwoBand, 1.0, &s).unwrap();
    let j_bands = 2 + 6;
    let bands = (-j_bands..=j_bands)
        .map(|j| approx.j_spectrum_band(j, &s.grid))
        .collect();
    let spectrum = AmalgamSpectrum::new(bands, 0.0).unwrap();
    for x in [-3.7, -1.0, 0.0, 0.4, 2.25, 6.0] {
        let direct = approx.evaluate_j(x);
        let via_spectrum = inverse_ft_at(&spectrum, &s.grid, x).unwrap();
        assert_abs_diff_eq!(direct.re, via_spectrum.re, epsilon = 1e-9);
        assert_abs_diff_eq!(direct.im, via_spectrum.im, epsilon = 1e-9);
    }
}

#[test]
fn larger_alpha_reconstructs_the_origin_better() {
    // with uniform nodes x = 0 is itself a node and only round-off is left
    let s = Setup {
        tol: 1e-7,
        nodes: perturbed_nodes(32, 0.2, 1, false).unwrap(),
        ..setup(32, 4)
    };
    assert!(s.nodes.values().iter().all(|x| *x != 0.0));
    let f0 = TestSignal::GaussPair.spatial(0.0).unwrap();
    let err = |alpha: f64| {
        (reconstruct(TestSignal::GaussPair, alpha, &s)
            .unwrap()
            .evaluate_j(0.0)
            - f0)
            .norm()
    };
    assert!(err(2.5) < err(0.75));
}

#[test]
fn reconstruction_is_executor_independent() {
    let seq = setup(16, 3);
    let par = Setup {
        exec: Exec::Parallel,
        ..seq.clone()
    };
    for signal in [TestSignal::CauchyDecay, TestSignal::TwoBand] {
        let a = reconstruct(signal, 1.25, &seq).unwrap();
        let b = reconstruct(signal, 1.25, &par).unwrap();
        assert_eq!(a.bands(), b.bands());
        assert_eq!(a.evaluate_j(0.3), b.evaluate_j(0.3));
    }
}

#[test]
fn interpolates_at_the_nodes() {
    let s = setup(16, 4);
    let approx = reconstruct(TestSignal::GaussPair, 1.0, &s).unwrap();
    for x in s.nodes.values() {
        let f = Complex64::new((-x * x / 2.0).exp(), 0.0);
        // J f matches f at the nodes up to the bands beyond M_max
        assert!((approx.evaluate_j(*x) - f).norm() < 1e-8);
    }
}
