//! Points of a convex combination of slices that lie on the unit sphere.
//!
//! In `c₀` every finitely supported slice functional leaves a fresh
//! coordinate `m` untouched. Adding `e_m` to the norming point `xᵢ` of each
//! `fᵢ` keeps it in its slice with `‖xᵢ ± e_m‖ = 1`, and `Σ λᵢ (xᵢ + e_m)`
//! has norm one because `e_m*` evaluates it to `Σ λᵢ = 1`.
//!
//! In a discrete probability space (`L₁` of finitely many weighted cells),
//! slices are given by densities `gᵢ` with `|gᵢ| ≤ 1`. Normalized indicators
//! of pairwise disjoint cells where `|gᵢ| > 1 − εᵢ` lie in the slices, and
//! their convex combination still has `L₁` norm one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{slice_membership, ConvexCombo, Coord, Functional, Point, SpaceKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreshWitness {
    /// `Σ λᵢ (xᵢ + e_m)`.
    pub point: Point,
    pub fresh_index: usize,
    /// Norming points `xᵢ` of the slice functionals.
    pub slice_points: Vec<Point>,
    pub norm: f64,
    /// `‖xᵢ + e_m‖` and `‖xᵢ − e_m‖` for every `i`.
    pub plus_minus_norms: Vec<[f64; 2]>,
    /// Slice margins of `xᵢ + e_m`.
    pub slice_margins: Vec<f64>,
    /// `e_m*` applied to the witness point; a lower bound on its norm.
    pub certificate: f64,
}

pub fn fresh_coordinate_witness(combo: &ConvexCombo) -> Result<FreshWitness> {
    let space = combo.space();
    if space.kind != SpaceKind::C0 {
        return Err(Error::invalid(format!(
            "fresh-coordinate witnesses are built in c0, got {space}"
        )));
    }
    let m = combo
        .terms()
        .iter()
        .filter_map(|t| t.slice.functional().coords().keys().next_back().copied())
        .max()
        .map_or(0, |t| t + 1);
    let e_m = Functional::unit(space, Coord::Index(m))?.norming_point();

    let slice_points: Vec<Point> = combo
        .terms()
        .iter()
        .map(|t| t.slice.functional().norming_point())
        .collect();
    let mut shifted = Vec::with_capacity(combo.len());
    let mut plus_minus_norms = Vec::with_capacity(combo.len());
    let mut slice_margins = Vec::with_capacity(combo.len());
    for (term, x) in combo.terms().iter().zip(&slice_points) {
        let plus = Point::linear_combination(space, &[(1.0, x), (1.0, &e_m)])?;
        let minus = Point::linear_combination(space, &[(1.0, x), (-1.0, &e_m)])?;
        plus_minus_norms.push([plus.sup_norm(), minus.sup_norm()]);
        slice_margins.push(slice_membership(&term.slice, &plus)?.slice_margin);
        shifted.push(plus);
    }
    let terms: Vec<_> = combo.lambdas().zip(shifted.iter()).collect();
    let point = Point::linear_combination(space, &terms)?;
    let certificate = point.at(m).re;
    Ok(FreshWitness {
        norm: point.sup_norm(),
        point,
        fresh_index: m,
        slice_points,
        plus_minus_norms,
        slice_margins,
        certificate,
    })
}

/// Finitely many cells with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightedMeasureSpace {
    weights: Vec<f64>,
}

impl WeightedMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("measure space needs at least one cell"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("cell weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("cell weights must sum to 1, got {total}")));
        }
        Ok(WeightedMeasureSpace { weights })
    }

    /// `n` cells of weight `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        WeightedMeasureSpace::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `∫ |f| = Σ w_c |f(c)|`.
    pub fn l1_norm(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v.abs()).sum()
    }

    /// `∫ g f = Σ w_c g(c) f(c)`.
    pub fn pairing(&self, g: &[f64], f: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(g)
            .zip(f)
            .map(|((w, a), b)| w * a * b)
            .sum()
    }
}

impl TryFrom<Vec<f64>> for WeightedMeasureSpace {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        WeightedMeasureSpace::new(weights)
    }
}

impl From<WeightedMeasureSpace> for Vec<f64> {
    fn from(space: WeightedMeasureSpace) -> Self {
        space.weights
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointWitness {
    /// Chosen cell `Bᵢ` for each density.
    pub cells: Vec<usize>,
    /// `fᵢ = sign(gᵢ(Bᵢ)) m(Bᵢ)⁻¹ χ_{Bᵢ}`.
    pub densities: Vec<Vec<f64>>,
    /// `Σ λᵢ fᵢ`.
    pub combined: Vec<f64>,
    pub norms: Vec<f64>,
    pub combined_norm: f64,
    /// `⟨gᵢ, fᵢ⟩ − (1 − εᵢ)`.
    pub slice_margins: Vec<f64>,
}

/// Picks pairwise disjoint single cells `Bᵢ` with `|gᵢ(Bᵢ)| > 1 − εᵢ`.
/// Densities with the fewest qualifying cells choose first; each takes its
/// qualifying cell with the largest `|gᵢ|` (lowest index on ties).
pub fn l1_disjoint_witness(
    space: &WeightedMeasureSpace,
    g: &[Vec<f64>],
    eps: &[f64],
    lambda: &[f64],
) -> Result<DisjointWitness> {
    let k = g.len();
    if k == 0 {
        return Err(Error::invalid("need at least one density"));
    }
    if eps.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: eps.len() });
    }
    if lambda.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: lambda.len() });
    }
    if lambda.iter().any(|l| !(*l > 0.0)) || (lambda.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("lambdas must be positive and sum to 1"));
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::invalid("epsilons must be positive"));
    }
    for (i, gi) in g.iter().enumerate() {
        if gi.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: gi.len() });
        }
        if gi.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(Error::invalid(format!("density {i} must satisfy |g| ≤ 1")));
        }
    }

    let qualifying: Vec<Vec<usize>> = g
        .iter()
        .zip(eps)
        .map(|(gi, e)| (0..gi.len()).filter(|&c| gi[c].abs() > 1.0 - e).collect())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (qualifying[i].len(), i));

    let mut taken = vec![false; space.len()];
    let mut cells = vec![None; k];
    for &i in &order {
        let pick = qualifying[i]
            .iter()
            .copied()
            .filter(|&c| !taken[c])
            .fold(None::<usize>, |best, c| match best {
                Some(b) if g[i][b].abs() >= g[i][c].abs() => Some(b),
                _ => Some(c),
            });
        if let Some(c) = pick {
            taken[c] = true;
            cells[i] = Some(c);
        }
    }
    let deficient: Vec<usize> = (0..k).filter(|&i| cells[i].is_none()).collect();
    if !deficient.is_empty() {
        return Err(Error::NoDisjointCells { deficient });
    }
    let cells: Vec<usize> = cells.into_iter().map(|c| c.expect("checked")).collect();

    let n = space.len();
    let densities: Vec<Vec<f64>> = cells
        .iter()
        .zip(g)
        .map(|(&c, gi)| {
            let mut f = vec![0.0; n];
            f[c] = gi[c].signum() / space.weights()[c];
            f
        })
        .collect();
    let combined: Vec<f64> = (0..n)
        .map(|c| lambda.iter().zip(&densities).map(|(l, f)| l * f[c]).sum())
        .collect();
    let norms = densities.iter().map(|f| space.l1_norm(f)).collect();
    let slice_margins = densities
        .iter()
        .zip(g)
        .zip(eps)
        .map(|((f, gi), e)| space.pairing(gi, f) - (1.0 - e))
        .collect();
    Ok(DisjointWitness {
        cells,
        combined_norm: space.l1_norm(&combined),
        densities,
        combined,
        norms,
        slice_margins,
    })
}
