//! Truncated complete interpolating sequences `{x_n : |n| ≤ N}`.
//!
//! Perturbed sequences satisfy `|x_n - n| ≤ d < 1/4` (Kadec), which makes the
//! bi-infinite sequence a complete interpolating sequence for L²([-π, π]).
//! Offsets come from ChaCha8 seeded with `seed_from_u64(seed)`, drawn in order
//! n = -N..=N (or n = 1..=N when symmetric, mirrored with x_{-n} = -x_n and
//! x_0 = 0); ChaCha output is platform independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Kadec bound; perturbations must stay strictly below it.
pub const KADEC_BOUND: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    half_width: usize,
    values: Vec<f64>,
    perturbation_bound: f64,
    symmetric: bool,
}

impl NodeSet {
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Node positions for n = -N..=N.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn perturbation_bound(&self) -> f64 {
        self.perturbation_bound
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Node index n of position i in `values()`.
    pub fn index_of(&self, i: usize) -> i64 {
        i as i64 - self.half_width as i64
    }
}

/// x_n = n for |n| ≤ N.
pub fn uniform_nodes(n: i64) -> Result<NodeSet> {
    if n < 0 {
        return Err(Error::contract(format!(
            "node half-width must be ≥ 0, got {n}"
        )));
    }
    Ok(NodeSet {
        half_width: n as usize,
        values: (-n..=n).map(|k| k as f64).collect(),
        perturbation_bound: 0.0,
        symmetric: true,
    })
}

/// x_n = n + δ_n with δ_n pseudorandom in [-d, d].
pub fn perturbed_nodes(n: i64, d: f64, seed: u64, symmetric: bool) -> Result<NodeSet> {
    if !(0.0..KADEC_BOUND).contains(&d) {
        return Err(Error::Domain {
            what: "perturbation bound d",
            value: d,
            domain: "[0, 1/4) (Kadec 1/4 bound for complete interpolating sequences)".into(),
        });
    }
    let mut nodes = uniform_nodes(n)?;
    if d == 0.0 {
        return Ok(nodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let place = |k: i64, rng: &mut ChaCha8Rng| -> f64 {
        let mut offset: f64 = rng.gen_range(-d..=d);
        let mut x = k as f64 + offset;
        // rounding of k + offset can overshoot d by an ulp
        while (x - k as f64).abs() > d {
            offset *= 0.5;
            x = k as f64 + offset;
        }
        x
    };
    let half = n as usize;
    if symmetric {
        for k in 1..=n {
            let x = place(k, &mut rng);
            nodes.values[half + k as usize] = x;
            nodes.values[half - k as usize] = -x;
        }
    } else {
        for (i, k) in (-n..=n).enumerate() {
            nodes.values[i] = place(k, &mut rng);
        }
    }
    nodes.perturbation_bound = d;
    nodes.symmetric = symmetric;
    Ok(nodes)
}
