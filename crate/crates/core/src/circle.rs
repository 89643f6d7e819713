//! Chords of the unit circle: a point `c = μ e^{iα} + (1 − μ) e^{iβ}` with
//! `0 < μ < ½` satisfies `|c| ≤ 1 − d² μ / 4`, `d = |e^{iα} − e^{iβ}|`.
//! This bound is what lets the circle-shift construction pull unimodular
//! witness values strictly inside the disk.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordInstance {
    alpha: f64,
    beta: f64,
    mu: f64,
}

impl ChordInstance {
    pub fn new(alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 0.5) {
            return Err(Error::invalid(format!("mu must lie in (0, 1/2), got {mu}")));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(ChordInstance { alpha, beta, mu })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `|e^{iα} − e^{iβ}|`.
    pub fn chord_length(&self) -> f64 {
        (Scalar::cis(self.alpha) - Scalar::cis(self.beta)).norm()
    }
}

pub fn chord_point(inst: &ChordInstance) -> Scalar {
    Scalar::cis(inst.alpha) * inst.mu + Scalar::cis(inst.beta) * (1.0 - inst.mu)
}

/// `1 − d² μ / 4`.
pub fn chord_bound(d: f64, mu: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&d) {
        return Err(Error::invalid(format!("chord length must lie in [0, 2], got {d}")));
    }
    if !(mu > 0.0 && mu < 0.5) {
        return Err(Error::invalid(format!("mu must lie in (0, 1/2), got {mu}")));
    }
    Ok(1.0 - d * d * mu / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordCheck {
    pub point: [f64; 2],
    pub chord_length: f64,
    pub modulus: f64,
    pub bound: f64,
    /// `| |c|² − (1 − d² μ (1 − μ)) |` with `d²` taken from `2 − 2 cos(α − β)`.
    pub identity_residual: f64,
    pub bound_satisfied: bool,
}

pub fn chord_identity_check(inst: &ChordInstance) -> ChordCheck {
    let c = chord_point(inst);
    // rounding can push |e^{iα} − e^{iβ}| a hair past 2 for antipodal angles
    let d = inst.chord_length().min(2.0);
    let bound = chord_bound(d, inst.mu).expect("instance invariants hold");
    let d_sq_cos = 2.0 - 2.0 * (inst.alpha - inst.beta).cos();
    let expected_sq = 1.0 - d_sq_cos * inst.mu * (1.0 - inst.mu);
    let modulus = c.norm();
    ChordCheck {
        point: [c.re, c.im],
        chord_length: d,
        modulus,
        bound,
        identity_residual: (c.norm_sqr() - expected_sq).abs(),
        bound_satisfied: modulus <= bound + 1e-12,
    }
}

/// Tolerance shared by the identity and the bound in [`lemma_sweep`].
pub const LEMMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSweep {
    pub samples: usize,
    pub seed: u64,
    pub max_identity_residual: f64,
    /// `max (|c| − bound)`; negative when every bound holds strictly.
    pub max_bound_excess: f64,
    pub failures: usize,
    /// Instance attaining `max_bound_excess`.
    pub worst: Option<ChordInstance>,
}

/// Checks the identity and the bound on `samples` random instances with
/// `α, β` uniform in `[−π, π)` and `μ` uniform in `(0, ½)`.
pub fn lemma_sweep(samples: usize, seed: u64) -> LemmaSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sweep = LemmaSweep {
        samples,
        seed,
        max_identity_residual: 0.0,
        max_bound_excess: f64::NEG_INFINITY,
        failures: 0,
        worst: None,
    };
    for _ in 0..samples {
        let alpha = rng.random_range(-PI..PI);
        let beta = rng.random_range(-PI..PI);
        let mu = loop {
            let mu = 0.5 * rng.random::<f64>();
            if mu > 0.0 {
                break mu;
            }
        };
        let inst = ChordInstance { alpha, beta, mu };
        let r = chord_identity_check(&inst);
        let excess = r.modulus - r.bound;
        if r.identity_residual > LEMMA_TOL || excess > LEMMA_TOL {
            sweep.failures += 1;
        }
        sweep.max_identity_residual = sweep.max_identity_residual.max(r.identity_residual);
        if excess > sweep.max_bound_excess {
            sweep.max_bound_excess = excess;
            sweep.worst = Some(inst);
        }
    }
    sweep
}
