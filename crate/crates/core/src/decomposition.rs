//! Witness decomposition for convex combinations of slices of `B_{C(K)}`.
//!
//! Given `C = Σ λᵢ S(fᵢ, εᵢ)` and witnesses `zᵢ ∈ S(fᵢ, εᵢ)` with
//! `x = Σ λᵢ zᵢ`, [`compute_params`] fixes a box radius `δ` on the finite
//! coordinate set `E ⊇ ∪ supp fᵢ`, and [`decompose`] rewrites every `y` in the
//! box neighborhood of `x` as `y = Σ λᵢ z̄ᵢ` with `z̄ᵢ ∈ S(fᵢ, εᵢ)`.
//!
//! Each `t ∈ E` falls into one of three cases:
//!
//! * **I** some `|zᵢ(t)| < 1`: that witness absorbs the whole perturbation
//!   `w(t) = y(t) − x(t)`, scaled by `1/λᵢ`.
//! * **II** all `zᵢ(t)` equal and unimodular: every `z̄ᵢ(t) = y(t)`.
//! * **III** all unimodular but not all equal: the distinct values are
//!   ordered by argument and each group is moved along a chord towards its
//!   predecessor. The shifts telescope to zero and the chord bound of
//!   [`crate::circle`] leaves room for `w(t)` inside the disk.
//!
//! Off `E` every `z̄ᵢ` equals `y`. In the `c-omega` model `ω` is always in
//! `E`, and the clopen set `{s > N} ∪ {ω}` plays the role of its
//! neighborhood, with `N` past every listed index of the data.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::Check;
use crate::error::{CaseTag, Error, Result};
use crate::model::{
    combo_point, random_scalar, slice_membership, ConvexCombo, Coord, Point, Scalar, SpaceKind,
    TAU_EQ,
};

/// Fraction of each strict upper bound actually used for `η`, `ρ` and `δ`.
const SAFETY: f64 = 0.9;
const ETA_FACTOR: f64 = 0.99;

/// Ball tolerance for decomposed witnesses and neighborhood points.
pub const BALL_TOL: f64 = 1e-12;
/// Tolerance on `Σ λᵢ z̄ᵢ = y`.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseIIIPlan {
    /// Increasing principal arguments `θ₁ < … < θ_q` in `(−π, π]`.
    pub thetas: Vec<f64>,
    /// `A_p`: witness indices whose value at this coordinate has argument `θ_p`.
    pub groups: Vec<Vec<usize>>,
    /// `Λ_p = Σ_{i ∈ A_p} λᵢ`.
    #[serde(rename = "Lambdas")]
    pub group_weights: Vec<f64>,
    /// Unit representatives `e^{iθ_p}` (taken from the witness values).
    #[serde(skip)]
    pub anchors: Vec<Scalar>,
    /// `c_p = ρ (e^{iθ_{p−1}} − e^{iθ_p})` with `θ₀ = θ_q`.
    #[serde(serialize_with = "ser_scalars")]
    pub shifts: Vec<Scalar>,
}

fn ser_scalars<S: serde::Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| [c.re, c.im]))
}

impl CaseIIIPlan {
    pub fn q(&self) -> usize {
        self.groups.len()
    }

    /// `|Σ_p c_p|`, zero up to rounding.
    pub fn telescoping_residual(&self) -> f64 {
        self.shifts.iter().sum::<Scalar>().norm()
    }

    fn group_of(&self, i: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&i))
            .expect("groups partition the witnesses")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "case")]
pub enum CoordCase {
    /// The witness `i0` with the most room below modulus one takes the
    /// perturbation.
    #[serde(rename = "I")]
    One { i0: usize, room: f64 },
    #[serde(rename = "II")]
    Two,
    #[serde(rename = "III")]
    Three(CaseIIIPlan),
}

impl CoordCase {
    pub fn tag(&self) -> CaseTag {
        match self {
            CoordCase::One { .. } => CaseTag::CaseI,
            CoordCase::Two => CaseTag::CaseII,
            CoordCase::Three(_) => CaseTag::CaseIII,
        }
    }
}

/// Constants of the construction. Unconstrained minima (over an empty
/// case set) are `+∞` and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSet {
    /// `d = minᵢ Re fᵢ(zᵢ) − (1 − εᵢ)`.
    #[serde(rename = "d")]
    pub slack: f64,
    pub eta: f64,
    #[serde(rename = "E")]
    pub support: BTreeSet<Coord>,
    /// `L = maxᵢ 1/λᵢ`.
    #[serde(rename = "L")]
    pub max_inv_lambda: f64,
    #[serde(rename = "E_I")]
    pub case_one: BTreeSet<Coord>,
    #[serde(rename = "delta_I")]
    pub delta_one: f64,
    #[serde(rename = "E_III")]
    pub case_three: BTreeSet<Coord>,
    /// `D`: smallest squared gap between unequal witness values over `E_III`.
    #[serde(rename = "D")]
    pub min_gap_sq: Option<f64>,
    pub rho: Option<f64>,
    #[serde(rename = "delta_III")]
    pub delta_three: f64,
    pub delta: f64,
    #[serde(serialize_with = "ser_cases")]
    pub cases: BTreeMap<Coord, CoordCase>,
    /// `c-omega` only: `ω`'s neighborhood is `{s > N} ∪ {ω}`.
    pub omega_cutoff: Option<usize>,
}

fn ser_cases<S: serde::Serializer>(
    cases: &BTreeMap<Coord, CoordCase>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        coord: Coord,
        #[serde(flatten)]
        case: &'a CoordCase,
    }
    s.collect_seq(cases.iter().map(|(&coord, case)| Entry { coord, case }))
}

impl ParamSet {
    /// Same parameters with `δ` multiplied by `factor ∈ (0, 1]`.
    pub fn with_delta_scaled(&self, factor: f64) -> Result<ParamSet> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::invalid(format!("delta factor must lie in (0, 1], got {factor}")));
        }
        Ok(ParamSet {
            delta: self.delta * factor,
            ..self.clone()
        })
    }

    pub fn case_three_plans(&self) -> impl Iterator<Item = (Coord, &CaseIIIPlan)> {
        self.cases.iter().filter_map(|(&c, case)| match case {
            CoordCase::Three(plan) => Some((c, plan)),
            _ => None,
        })
    }
}

/// `d = minᵢ (Re fᵢ(zᵢ) − (1 − εᵢ))`; every witness must be a slice member.
pub fn slack(combo: &ConvexCombo, witnesses: &[Point]) -> Result<f64> {
    if witnesses.len() != combo.len() {
        return Err(Error::LengthMismatch {
            expected: combo.len(),
            got: witnesses.len(),
        });
    }
    let mut d = f64::INFINITY;
    for (i, (term, z)) in combo.terms().iter().zip(witnesses).enumerate() {
        let m = slice_membership(&term.slice, z)?;
        if !m.member {
            return Err(Error::NotInSlice {
                index: i,
                slice_margin: m.slice_margin,
                ball_margin: m.ball_margin,
            });
        }
        d = d.min(m.slice_margin);
    }
    Ok(d)
}

/// `E = ∪ supp fᵢ`, plus `ω` in the `c-omega` model.
pub fn support_set(combo: &ConvexCombo) -> BTreeSet<Coord> {
    let mut e: BTreeSet<Coord> = combo
        .terms()
        .iter()
        .flat_map(|t| t.slice.functional().support())
        .collect();
    if combo.space().is_c_omega() {
        e.insert(Coord::Omega);
    }
    e
}

fn principal_arg(v: Scalar) -> f64 {
    let a = v.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Classifies one coordinate from the witness values there.
fn classify(values: &[Scalar], lambdas: &[f64]) -> CoordCase {
    let inside = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() < 1.0 - TAU_EQ)
        .map(|(i, v)| (i, 1.0 - v.norm()))
        .fold(None::<(usize, f64)>, |best, (i, room)| match best {
            Some((_, r)) if r >= room => best,
            _ => Some((i, room)),
        });
    if let Some((i0, room)) = inside {
        return CoordCase::One { i0, room };
    }

    // all unimodular: group equal values, ordered by argument
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        principal_arg(values[a])
            .total_cmp(&principal_arg(values[b]))
            .then(a.cmp(&b))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - values[i]).norm() <= TAU_EQ => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    if groups.len() > 1 {
        let (first, last) = (groups[0][0], groups[groups.len() - 1][0]);
        if (values[first] - values[last]).norm() <= TAU_EQ {
            let tail = groups.pop().expect("non-empty");
            groups[0].extend(tail);
        }
    }
    if groups.len() == 1 {
        return CoordCase::Two;
    }

    let anchors: Vec<Scalar> = groups
        .iter()
        .map(|g| values[g[0]] / values[g[0]].norm())
        .collect();
    let thetas = anchors.iter().map(|&a| principal_arg(a)).collect();
    let group_weights = groups
        .iter()
        .map(|g| g.iter().map(|&i| lambdas[i]).sum())
        .collect();
    CoordCase::Three(CaseIIIPlan {
        thetas,
        groups,
        group_weights,
        anchors,
        shifts: Vec::new(),
    })
}

/// Smallest `|zᵢ − zⱼ|²` over witnesses in different groups.
fn min_gap_sq(values: &[Scalar], plan: &CaseIIIPlan) -> f64 {
    let mut best = f64::INFINITY;
    for (p, gp) in plan.groups.iter().enumerate() {
        for gq in &plan.groups[p + 1..] {
            for &i in gp {
                for &j in gq {
                    best = best.min((values[i] - values[j]).norm_sqr());
                }
            }
        }
    }
    best
}

fn witness_values(witnesses: &[Point], c: Coord) -> Vec<Scalar> {
    witnesses.iter().map(|z| z.value(c)).collect()
}

pub fn compute_params(combo: &ConvexCombo, witnesses: &[Point]) -> Result<ParamSet> {
    let d = slack(combo, witnesses)?;
    let space = combo.space();
    for z in witnesses {
        space.ensure_same(&z.space())?;
    }
    let lambdas: Vec<f64> = combo.lambdas().collect();
    let eta = ETA_FACTOR * (d / 3.0).min(1.0);
    let l = lambdas.iter().map(|&l| 1.0 / l).fold(0.0, f64::max);
    let support = support_set(combo);

    let mut cases = BTreeMap::new();
    let mut case_one = BTreeSet::new();
    let mut case_three = BTreeSet::new();
    let mut min_room = f64::INFINITY;
    let mut gap = f64::INFINITY;
    for &t in &support {
        let values = witness_values(witnesses, t);
        let case = classify(&values, &lambdas);
        match &case {
            CoordCase::One { room, .. } => {
                case_one.insert(t);
                min_room = min_room.min(*room);
            }
            CoordCase::Three(plan) => {
                case_three.insert(t);
                gap = gap.min(min_gap_sq(&values, plan));
            }
            CoordCase::Two => {}
        }
        cases.insert(t, case);
    }

    let delta_one = min_room / (1.0 + 3.0 * l);
    let (min_gap_sq, rho, delta_three) = if case_three.is_empty() {
        (None, None, f64::INFINITY)
    } else {
        let rho = SAFETY * (gap / 8.0).min(eta / (4.0 * l));
        (Some(gap), Some(rho), gap * rho / (4.0 * (1.0 + 3.0 * l)))
    };
    let delta = SAFETY * (eta / (6.0 * l)).min(delta_one).min(delta_three);

    if let Some(rho) = rho {
        for case in cases.values_mut() {
            if let CoordCase::Three(plan) = case {
                let q = plan.anchors.len();
                plan.shifts = (0..q)
                    .map(|p| (plan.anchors[(p + q - 1) % q] - plan.anchors[p]) * rho)
                    .collect();
            }
        }
    }

    let omega_cutoff = space.is_c_omega().then(|| {
        let support_end = combo
            .terms()
            .iter()
            .filter_map(|t| t.slice.functional().coords().keys().next_back().copied());
        let witness_end = witnesses.iter().filter_map(Point::transition_index);
        support_end.chain(witness_end).max().unwrap_or(0)
    });

    if !(delta > 0.0) {
        return Err(Error::invalid(format!("degenerate neighborhood radius {delta}")));
    }

    Ok(ParamSet {
        slack: d,
        eta,
        support,
        max_inv_lambda: l,
        case_one,
        delta_one,
        case_three,
        min_gap_sq,
        rho,
        delta_three,
        delta,
        cases,
        omega_cutoff,
    })
}

/// `{ y ∈ B : |y(t) − x(t)| < δ, t ∈ E }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxNeighborhood {
    pub center: Point,
    pub support: BTreeSet<Coord>,
    pub delta: f64,
    pub omega_cutoff: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborhoodMembership {
    pub member: bool,
    pub norm: f64,
    /// `max_{t ∈ E} |y(t) − x(t)|`.
    pub max_offset: f64,
}

impl BoxNeighborhood {
    pub fn membership(&self, y: &Point) -> Result<NeighborhoodMembership> {
        self.center.space().ensure_same(&y.space())?;
        let norm = y.sup_norm();
        let max_offset = self
            .support
            .iter()
            .map(|&t| (y.value(t) - self.center.value(t)).norm())
            .fold(0.0, f64::max);
        Ok(NeighborhoodMembership {
            member: norm <= 1.0 + BALL_TOL && max_offset < self.delta,
            norm,
            max_offset,
        })
    }

    pub fn contains(&self, y: &Point) -> bool {
        self.membership(y).map(|m| m.member).unwrap_or(false)
    }
}

pub fn weak_neighborhood(x: &Point, params: &ParamSet) -> BoxNeighborhood {
    let omega_cutoff = params
        .omega_cutoff
        .map(|n| n.max(x.transition_index().unwrap_or(0)));
    BoxNeighborhood {
        center: x.clone(),
        support: params.support.clone(),
        delta: params.delta,
        omega_cutoff,
    }
}

fn clamp_to_disk(v: Scalar) -> Scalar {
    let r = v.norm();
    if r > 1.0 {
        v / r
    } else {
        v
    }
}

/// Random member of `U`: every `t ∈ E` moves by at most `0.99 δ` (then
/// projected back into the unit disk, which never increases the offset);
/// coordinates off `E` are redrawn anywhere in the disk.
pub fn sample_in_neighborhood(u: &BoxNeighborhood, seed: u64) -> Point {
    if !(u.delta > 0.0) {
        return u.center.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = u.center.space();
    let field = space.field;
    let mut y = u.center.clone();
    for &t in &u.support {
        let v = u.center.value(t) + random_scalar(&mut rng, field, 0.99 * u.delta);
        y.set(t, clamp_to_disk(v));
    }
    let listed_end = u
        .center
        .transition_index()
        .into_iter()
        .chain(u.support.iter().filter_map(|c| match c {
            Coord::Index(t) => Some(*t),
            Coord::Omega => None,
        }))
        .chain(u.omega_cutoff)
        .max()
        .map_or(0, |t| t + 1);
    let free_end = match space.kind {
        SpaceKind::FiniteDiscrete { n } => n,
        SpaceKind::C0 | SpaceKind::COmega => listed_end + 2,
    };
    for t in 0..free_end {
        if !u.support.contains(&Coord::Index(t)) {
            y.set(Coord::Index(t), random_scalar(&mut rng, field, 1.0));
        }
    }
    y
}

fn construction_failure(coord: Coord, case: CaseTag, detail: String) -> Error {
    Error::ConstructionFailure {
        coord,
        case,
        detail,
    }
}

/// Builds `z̄₁, …, z̄ₖ` with `y = Σ λᵢ z̄ᵢ` and `z̄ᵢ ∈ S(fᵢ, εᵢ)`.
pub fn decompose(
    combo: &ConvexCombo,
    witnesses: &[Point],
    params: &ParamSet,
    y: &Point,
) -> Result<Vec<Point>> {
    let x = combo_point(combo, witnesses)?;
    let space = combo.space();
    let u = weak_neighborhood(&x, params);
    let m = u.membership(y)?;
    if !m.member {
        return Err(Error::OutsideNeighborhood(format!(
            "norm {} (limit 1), max offset on E {} (radius {})",
            m.norm, m.max_offset, u.delta
        )));
    }
    let lambdas: Vec<f64> = combo.lambdas().collect();
    let k = lambdas.len();

    // Off E every z̄ᵢ equals y. In c-omega the indices up to the cutoff are
    // listed explicitly, since the tail of z̄ᵢ is fixed by ω's case below.
    let base = if space.is_c_omega() {
        let cutoff = u
            .omega_cutoff
            .unwrap_or(0)
            .max(y.transition_index().unwrap_or(0));
        let coords: BTreeMap<usize, Scalar> = (0..=cutoff).map(|t| (t, y.at(t))).collect();
        Point::new(space, coords, y.tail())?
    } else {
        y.clone()
    };
    let mut zbars = vec![base; k];

    for &t in &params.support {
        let case = params.cases.get(&t).ok_or_else(|| {
            construction_failure(t, CaseTag::OffSupport, "coordinate was not classified".into())
        })?;
        let w = y.value(t) - x.value(t);
        let zs = witness_values(witnesses, t);
        let new_values: Vec<Scalar> = match case {
            CoordCase::One { i0, .. } => {
                let mut v = zs.clone();
                v[*i0] += w / lambdas[*i0];
                v
            }
            CoordCase::Two => vec![y.value(t); k],
            CoordCase::Three(plan) => {
                let q = plan.q() as f64;
                (0..k)
                    .map(|i| {
                        let p = plan.group_of(i);
                        let big = plan.group_weights[p];
                        zs[i] + plan.shifts[p] / big + w / (q * big)
                    })
                    .collect()
            }
        };
        for (i, (&v, &z)) in new_values.iter().zip(&zs).enumerate() {
            let limit = z.norm().max(1.0) + BALL_TOL;
            if v.norm() > limit {
                return Err(construction_failure(
                    t,
                    case.tag(),
                    format!("witness {i} has modulus {} > {limit}", v.norm()),
                ));
            }
            if (v - z).norm() > params.eta {
                return Err(construction_failure(
                    t,
                    case.tag(),
                    format!("witness {i} drifts {} > eta {}", (v - z).norm(), params.eta),
                ));
            }
            zbars[i].set(t, v);
        }
    }
    Ok(zbars)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub passed: bool,
    /// `d`, when the original witnesses are valid slice members.
    pub slack: Option<f64>,
    pub eta: Option<f64>,
    /// `d − 3η`: the margin every `z̄ᵢ` is guaranteed to keep.
    pub slice_floor: Option<f64>,
    pub reconstruction_residual: f64,
    pub ball_margins: Vec<f64>,
    pub slice_margins: Vec<f64>,
    pub drifts: Vec<f64>,
    pub checks: Vec<Check>,
}

impl DecompositionReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str, index: Option<usize>) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.name == name && c.index == index)
    }
}

/// Checks a decomposition from scratch: reconstruction, ball, slice
/// membership (with the guaranteed floor `d − 3η`) and drift on `E`.
pub fn verify_decomposition(
    combo: &ConvexCombo,
    witnesses: &[Point],
    y: &Point,
    zbars: &[Point],
) -> DecompositionReport {
    let k = combo.len();
    let mut checks = Vec::new();
    let shape_ok = witnesses.len() == k && zbars.len() == k;
    checks.push(
        Check::new("shape", shape_ok)
            .with_detail(format!("k = {k}, witnesses = {}, zbars = {}", witnesses.len(), zbars.len())),
    );
    if !shape_ok {
        return DecompositionReport {
            passed: false,
            slack: None,
            eta: None,
            slice_floor: None,
            reconstruction_residual: f64::INFINITY,
            ball_margins: Vec::new(),
            slice_margins: Vec::new(),
            drifts: Vec::new(),
            checks,
        };
    }

    let slack = match slack(combo, witnesses) {
        Ok(d) => {
            checks.push(Check::new("witnesses", true).with_value(d));
            Some(d)
        }
        Err(e) => {
            checks.push(Check::new("witnesses", false).with_detail(e.to_string()));
            None
        }
    };
    let eta = slack.map(|d| ETA_FACTOR * (d / 3.0).min(1.0));
    let slice_floor = slack.zip(eta).map(|(d, eta)| d - 3.0 * eta);

    let reconstruction_residual = match combo_point(combo, zbars) {
        Ok(p) if p.space() == y.space() => p.distance(y),
        _ => f64::INFINITY,
    };
    checks.push(Check::at_most(
        "reconstruction",
        reconstruction_residual,
        RECONSTRUCTION_TOL,
    ));

    let support = support_set(combo);
    let mut ball_margins = Vec::with_capacity(k);
    let mut slice_margins = Vec::with_capacity(k);
    let mut drifts = Vec::with_capacity(k);
    for (i, ((term, z), zbar)) in combo.terms().iter().zip(witnesses).zip(zbars).enumerate() {
        let norm = zbar.sup_norm();
        ball_margins.push(1.0 - norm);
        checks.push(Check::at_most("ball", norm, 1.0 + BALL_TOL).with_index(i));

        let margin = slice_membership(&term.slice, zbar)
            .map(|m| m.slice_margin)
            .unwrap_or(f64::NEG_INFINITY);
        slice_margins.push(margin);
        let floor = slice_floor.map(|f| f - 1e-9);
        let slice_ok = margin > 0.0 && floor.is_none_or(|f| margin >= f);
        let mut check = Check::new("slice", slice_ok).with_index(i).with_value(margin);
        check.threshold = floor.map(|f| f.max(0.0));
        checks.push(check);

        let drift = support
            .iter()
            .map(|&t| (zbar.value(t) - z.value(t)).norm())
            .fold(0.0, f64::max);
        drifts.push(drift);
        if let Some(eta) = eta {
            checks.push(Check::at_most("drift", drift, eta).with_index(i));
        }
    }

    DecompositionReport {
        passed: checks.iter().all(|c| c.passed),
        slack,
        eta,
        slice_floor,
        reconstruction_residual,
        ball_margins,
        slice_margins,
        drifts,
        checks,
    }
}

/// Checks every Case III plan against the witnesses: the shifts telescope,
/// and each shifted witness value `zᵢ(t) + c_p / Λ_p` keeps the modulus room
/// `D ρ / (4 Λ_p)` promised by the chord bound.
pub fn verify_case_three(witnesses: &[Point], params: &ParamSet) -> Vec<Check> {
    let (Some(gap), Some(rho)) = (params.min_gap_sq, params.rho) else {
        return Vec::new();
    };
    let mut checks = Vec::new();
    for (t, plan) in params.case_three_plans() {
        checks.push(
            Check::at_most("telescoping", plan.telescoping_residual(), 1e-12)
                .with_detail(format!("coordinate {t}")),
        );
        let mut worst = f64::NEG_INFINITY;
        for (p, group) in plan.groups.iter().enumerate() {
            let weight = plan.group_weights[p];
            let bound = 1.0 - gap * rho / (4.0 * weight);
            for &i in group {
                let Some(z) = witnesses.get(i) else {
                    worst = f64::INFINITY;
                    continue;
                };
                let shifted = z.value(t) + plan.shifts[p] / weight;
                worst = worst.max(shifted.norm() - bound);
            }
        }
        checks.push(
            Check::at_most("modulus-chain", worst, 1e-12).with_detail(format!("coordinate {t}")),
        );
    }
    checks
}
