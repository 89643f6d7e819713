//! Diameters of slices and of convex combinations of slices.
//!
//! In real `ℓ∞ⁿ` everything is exact. The closed slice
//! `{‖z‖∞ ≤ 1, ⟨f, z⟩ ≥ 1 − ε}` is a polytope whose coordinate extrema have
//! a closed form, the sup-norm diameter of a set is the largest coordinate
//! spread, and the spread of `Σ λᵢ Sᵢ` along a coordinate is `Σ λᵢ` of the
//! individual spreads.
//!
//! The Euclidean and `ℓ_p`-sum experiments maximize a norm (a convex
//! function) over a convex set, so they only produce estimates: sampled
//! extreme points refined by coordinate ascent with restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ConvexCombo, Functional, SpaceKind};

const RESTARTS: usize = 10;
const MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SlicePolytope {
    weights: Vec<f64>,
    epsilon: f64,
}

impl SlicePolytope {
    /// Closed slice of the real `ℓ∞ⁿ` ball; `f` must live on a real
    /// finite-discrete space.
    pub fn new(functional: &Functional, epsilon: f64) -> Result<Self> {
        let space = functional.space();
        let n = match space.kind {
            SpaceKind::FiniteDiscrete { n } => n,
            _ => {
                return Err(Error::invalid(format!(
                    "diameters are computed in finite-discrete spaces, got {space}"
                )))
            }
        };
        if !space.is_real() {
            return Err(Error::invalid("diameters are computed for real scalars only"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
        }
        let weights = (0..n)
            .map(|t| functional.coords().get(&t).map_or(0.0, |v| v.re))
            .collect();
        Ok(SlicePolytope { weights, epsilon })
    }

    pub fn from_weights(weights: Vec<f64>, epsilon: f64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights must be finite and non-empty"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(SlicePolytope { weights, epsilon })
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn ensure_feasible(&self) -> Result<()> {
        let norm: f64 = self.weights.iter().map(|w| w.abs()).sum();
        if norm < 1.0 - self.epsilon {
            return Err(Error::Infeasible(format!(
                "‖f‖₁ = {norm} < 1 − ε = {}",
                1.0 - self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

/// Exact optimum of `z_j` over the closed slice polytope. All other
/// coordinates are saturated at the signs of `f`, which leaves the largest
/// budget `R − (1 − ε)` for `z_j`.
pub fn coord_extremum(p: &SlicePolytope, j: usize, sense: Sense) -> Result<f64> {
    p.ensure_feasible()?;
    let fj = *p
        .weights
        .get(j)
        .ok_or_else(|| Error::invalid(format!("coordinate {j} out of range")))?;
    let rest: f64 = p
        .weights
        .iter()
        .enumerate()
        .filter(|&(t, _)| t != j)
        .map(|(_, w)| w.abs())
        .sum();
    // f_j z_j ≥ 1 − ε − rest
    let need = 1.0 - p.epsilon - rest;
    Ok(match sense {
        Sense::Max if fj < 0.0 => (need / fj).min(1.0),
        Sense::Max => 1.0,
        Sense::Min if fj > 0.0 => (need / fj).max(-1.0),
        Sense::Min => -1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterResult {
    pub value: f64,
    /// First coordinate attaining the diameter.
    pub coordinate: usize,
    pub spreads: Vec<f64>,
}

impl DiameterResult {
    fn from_spreads(spreads: Vec<f64>) -> Self {
        let (coordinate, value) = spreads
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, s)| if s > best.1 { (j, s) } else { best });
        DiameterResult {
            value,
            coordinate,
            spreads,
        }
    }
}

/// `sup z_j − inf z_j = min(2, b / |f_j|)` with budget `b = ‖f‖₁ − (1 − ε)`
/// (`2` where `f_j = 0`). Equal to the difference of the two
/// [`coord_extremum`] values, but without the cancellation.
fn spreads(p: &SlicePolytope) -> Result<Vec<f64>> {
    p.ensure_feasible()?;
    let norm: f64 = p.weights.iter().map(|w| w.abs()).sum();
    let budget = p.epsilon + (norm - 1.0);
    Ok(p.weights
        .iter()
        .map(|w| if *w == 0.0 { 2.0 } else { (budget / w.abs()).min(2.0) })
        .collect())
}

pub fn slice_diameter_linf(p: &SlicePolytope) -> Result<DiameterResult> {
    Ok(DiameterResult::from_spreads(spreads(p)?))
}

/// `diam Σ λᵢ Sᵢ = max_j Σ λᵢ (sup_{Sᵢ} z_j − inf_{Sᵢ} z_j)`.
pub fn combo_diameter_linf(combo: &ConvexCombo) -> Result<DiameterResult> {
    let mut total: Option<Vec<(f64, bool)>> = None;
    for term in combo.terms() {
        let p = SlicePolytope::new(term.slice.functional(), term.slice.epsilon())?;
        let s = spreads(&p)?;
        let acc = total.get_or_insert_with(|| vec![(0.0, true); s.len()]);
        for (a, v) in acc.iter_mut().zip(s) {
            a.0 += term.lambda * v;
            a.1 &= v == 2.0;
        }
    }
    // a coordinate free in every slice spans exactly 2, whatever Σ λᵢ rounds to
    let spreads = total
        .ok_or_else(|| Error::invalid("empty combination"))?
        .into_iter()
        .map(|(s, free)| if free { 2.0 } else { s })
        .collect();
    Ok(DiameterResult::from_spreads(spreads))
}

/// Diameter of a slice of the Euclidean ball: the cap's rim circle has
/// radius `√(1 − (1 − ε)²)`.
pub fn euclidean_slice_diameter(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let c = 1.0 - epsilon;
    Ok(2.0 * (1.0 - c * c).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OppositeSliceSup {
    /// Largest `‖½x₁ + ½x₂‖₂` found with `x₁ ∈ S(x*, ε)`, `x₂ ∈ S(−x*, ε)`.
    pub sup_estimate: f64,
    /// `diam S(x*, ε)`: `‖½x₁ + ½x₂‖ ≤ ½‖x₁ − x‖ + ½‖x₂ + x‖` for any `x ∈ S`.
    pub certified_upper_bound: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub evaluations: usize,
}

/// Extreme point `cos φ · a + sin φ · u` of a Euclidean cap around `a`.
#[derive(Debug, Clone)]
struct CapPoint {
    phi: f64,
    u: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Unit vector orthogonal to the unit vector `axis`, or zero in dimension one.
fn orthogonal_unit(v: &mut [f64], axis: &[f64]) {
    let proj = dot(v, axis);
    for (x, a) in v.iter_mut().zip(axis) {
        *x -= proj * a;
    }
    let r = norm2(v);
    if r > 1e-300 {
        v.iter_mut().for_each(|x| *x /= r);
    } else {
        v.iter_mut().for_each(|x| *x = 0.0);
    }
}

fn random_direction<R: Rng>(rng: &mut R, axis: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = axis.iter().map(|_| rng.sample(StandardNormal)).collect();
    orthogonal_unit(&mut v, axis);
    v
}

impl CapPoint {
    fn embed(&self, axis: &[f64], sign: f64) -> Vec<f64> {
        let (s, c) = self.phi.sin_cos();
        axis.iter()
            .zip(&self.u)
            .map(|(a, u)| sign * (c * a + s * u))
            .collect()
    }
}

/// Sampled maximization of the norm over `½ S(x*, ε) + ½ S(−x*, ε)` in `ℓ₂ⁿ`.
/// Requires `diam S(x*, ε) < 1`.
pub fn opposite_slice_combo_sup(
    direction: &[f64],
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<OppositeSliceSup> {
    let r = norm2(direction);
    if direction.is_empty() || !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("direction must be a nonzero finite vector"));
    }
    let diam = euclidean_slice_diameter(epsilon)?;
    if diam >= 1.0 {
        return Err(Error::invalid(format!(
            "needs diam S(x*, ε) < 1, got {diam} for ε = {epsilon}"
        )));
    }
    let axis: Vec<f64> = direction.iter().map(|x| x / r).collect();
    let phi_max = (1.0 - epsilon).acos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let value = |a: &CapPoint, b: &CapPoint| {
        let p = a.embed(&axis, 1.0);
        let q = b.embed(&axis, -1.0);
        0.5 * p.iter().zip(&q).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt()
    };
    let draw = |rng: &mut ChaCha8Rng| {
        // biased towards the rim, where the extreme points of the cap lie
        let phi = if rng.random::<f64>() < 0.3 {
            phi_max
        } else {
            phi_max * rng.random::<f64>().powf(0.25)
        };
        CapPoint {
            phi,
            u: random_direction(rng, &axis),
        }
    };

    let mut pool: Vec<(f64, CapPoint, CapPoint)> = (0..samples.max(RESTARTS))
        .map(|_| {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            (value(&a, &b), a, b)
        })
        .collect();
    let mut evaluations = pool.len();
    pool.sort_by(|x, y| y.0.total_cmp(&x.0));
    pool.truncate(RESTARTS);

    let mut best = pool[0].clone();
    for (mut v, mut a, mut b) in pool {
        let mut step = 0.25;
        while step > MIN_STEP {
            let mut improved = false;
            for which in 0..4 {
                for sign in [1.0, -1.0] {
                    let (mut a2, mut b2) = (a.clone(), b.clone());
                    match which {
                        0 => a2.phi = (a.phi + sign * step).clamp(0.0, phi_max),
                        1 => b2.phi = (b.phi + sign * step).clamp(0.0, phi_max),
                        2 => {
                            let g = random_direction(&mut rng, &axis);
                            a2.u.iter_mut().zip(&g).for_each(|(u, g)| *u += sign * step * g);
                            orthogonal_unit(&mut a2.u, &axis);
                        }
                        _ => {
                            let g = random_direction(&mut rng, &axis);
                            b2.u.iter_mut().zip(&g).for_each(|(u, g)| *u += sign * step * g);
                            orthogonal_unit(&mut b2.u, &axis);
                        }
                    }
                    let v2 = value(&a2, &b2);
                    evaluations += 1;
                    if v2 > v {
                        (v, a, b) = (v2, a2, b2);
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, a, b);
        }
    }

    Ok(OppositeSliceSup {
        sup_estimate: best.0,
        certified_upper_bound: diam,
        x1: best.1.embed(&axis, 1.0),
        x2: best.2.embed(&axis, -1.0),
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpShrinkage {
    pub p: f64,
    pub lambda: f64,
    pub epsilon: [f64; 2],
    /// Largest norm found on `λ S₁ + (1 − λ) S₂`; a lower bound on the sup.
    pub sup_estimate: f64,
    /// `1 − sup_estimate`.
    pub beta_estimate: f64,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    /// Step length at which the local ascent stopped.
    pub resolution: f64,
    pub evaluations: usize,
}

fn lp_norm(v: [f64; 2], p: f64) -> f64 {
    (v[0].abs().powf(p) + v[1].abs().powf(p)).powf(1.0 / p)
}

/// Point of the `ℓ_p` unit circle whose coordinate `axis` equals `a`.
fn lp_circle_point(a: f64, sign: f64, axis: usize, p: f64) -> [f64; 2] {
    let other = sign * (1.0 - a.abs().powf(p)).max(0.0).powf(1.0 / p);
    if axis == 0 {
        [a, other]
    } else {
        [other, a]
    }
}

/// Sampled maximization of the norm over `λ S(e₀*, ε₁) + (1 − λ) S(e₁*, ε₂)`
/// in `ℝ ⊕_p ℝ`. The extreme points of each closed slice are the arc of the
/// `ℓ_p` circle where the slicing coordinate is at least `1 − ε`.
pub fn lp_sum_combo_sup(
    p: f64,
    lambda: f64,
    epsilon: [f64; 2],
    samples: usize,
    seed: u64,
) -> Result<LpShrinkage> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must satisfy 1 < p < ∞, got {p}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if epsilon.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("epsilons must be positive"));
    }
    let lo = [(1.0 - epsilon[0]).max(-1.0), (1.0 - epsilon[1]).max(-1.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // state: (a, b, sign_a, sign_b)
    type State = (f64, f64, f64, f64);
    let points = |s: State| {
        (
            lp_circle_point(s.0, s.2, 0, p),
            lp_circle_point(s.1, s.3, 1, p),
        )
    };
    let value = |s: State| {
        let (x, y) = points(s);
        lp_norm(
            [
                lambda * x[0] + (1.0 - lambda) * y[0],
                lambda * x[1] + (1.0 - lambda) * y[1],
            ],
            p,
        )
    };
    let draw = |rng: &mut ChaCha8Rng, i: usize| {
        let u: f64 = rng.random();
        // the rim a = 1 − ε is drawn with positive probability
        if u < 0.2 {
            lo[i]
        } else {
            lo[i] + (1.0 - lo[i]) * (1.0 - u.powf(2.0))
        }
    };
    let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1.0 } else { -1.0 };

    let mut pool: Vec<(f64, State)> = (0..samples.max(RESTARTS))
        .map(|_| {
            let s = (draw(&mut rng, 0), draw(&mut rng, 1), sign(&mut rng), sign(&mut rng));
            (value(s), s)
        })
        .collect();
    let mut evaluations = pool.len();
    pool.sort_by(|x, y| y.0.total_cmp(&x.0));
    pool.truncate(RESTARTS);

    let mut best = pool[0];
    let mut resolution = f64::INFINITY;
    for (mut v, mut s) in pool {
        let mut step = 0.25 * (1.0 - lo[0].min(lo[1])).max(1e-3);
        while step > MIN_STEP {
            let mut improved = false;
            for delta in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let s2 = (
                    (s.0 + delta.0).clamp(lo[0], 1.0),
                    (s.1 + delta.1).clamp(lo[1], 1.0),
                    s.2,
                    s.3,
                );
                let v2 = value(s2);
                evaluations += 1;
                if v2 > v {
                    (v, s) = (v2, s2);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        resolution = resolution.min(step);
        if v > best.0 {
            best = (v, s);
        }
    }

    let (x1, x2) = points(best.1);
    Ok(LpShrinkage {
        p,
        lambda,
        epsilon,
        sup_estimate: best.0,
        beta_estimate: 1.0 - best.0,
        x1,
        x2,
        resolution,
        evaluations,
    })
}
