//! Finitely represented points and functionals of `C(K)` for the three
//! scattered compacta we model: a finite discrete set, `ℕ` (the space `c₀`)
//! and `[0, ω]` (convergent sequences, stored as eventually constant).
//!
//! A [`Point`] lists finitely many coordinates. Every coordinate that is not
//! listed is `0` in the discrete and `c₀` models, and equal to the tail value
//! in the `c-omega` model; the tail is also the value at `ω`. A
//! [`Functional`] is an element of `ℓ₁(K)` with finite support, plus an
//! optional atom at `ω`. The pairing is `Σ f(t) z(t)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Tolerance on `‖f‖₁ = 1` for slice functionals.
pub const TAU_NORM: f64 = 1e-12;
/// Tolerance on `‖z‖ ≤ 1` for slice membership.
pub const TAU_BALL: f64 = 1e-9;
/// Tolerance for the unimodularity and equality tests used to classify
/// coordinates.
pub const TAU_EQ: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SpaceKind {
    #[serde(rename = "finite-discrete")]
    FiniteDiscrete { n: usize },
    #[serde(rename = "c0")]
    C0,
    #[serde(rename = "c-omega")]
    COmega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceModel {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub field: Field,
}

impl SpaceModel {
    pub fn finite(n: usize, field: Field) -> Self {
        SpaceModel {
            kind: SpaceKind::FiniteDiscrete { n },
            field,
        }
    }

    pub fn c0(field: Field) -> Self {
        SpaceModel {
            kind: SpaceKind::C0,
            field,
        }
    }

    pub fn c_omega(field: Field) -> Self {
        SpaceModel {
            kind: SpaceKind::COmega,
            field,
        }
    }

    pub fn is_c_omega(&self) -> bool {
        self.kind == SpaceKind::COmega
    }

    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    pub fn validate(&self) -> Result<()> {
        if let SpaceKind::FiniteDiscrete { n } = self.kind {
            if n == 0 {
                return Err(Error::invalid("finite-discrete space needs n >= 1"));
            }
        }
        Ok(())
    }

    fn check_index(&self, t: usize) -> Result<()> {
        match self.kind {
            SpaceKind::FiniteDiscrete { n } if t >= n => Err(Error::invalid(format!(
                "coordinate {t} out of range for finite-discrete n = {n}"
            ))),
            _ => Ok(()),
        }
    }

    fn check_scalar(&self, v: Scalar) -> Result<()> {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::invalid("non-finite scalar"));
        }
        if self.is_real() && v.im != 0.0 {
            return Err(Error::invalid(format!(
                "complex value {v} in a real-scalar space"
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &SpaceModel) -> Result<()> {
        if self != other {
            return Err(Error::ModelMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = match self.field {
            Field::Real => "real",
            Field::Complex => "complex",
        };
        match self.kind {
            SpaceKind::FiniteDiscrete { n } => write!(f, "finite-discrete(n={n}, {field})"),
            SpaceKind::C0 => write!(f, "c0({field})"),
            SpaceKind::COmega => write!(f, "c-omega({field})"),
        }
    }
}

/// A point of `K`: an isolated index or the limit point `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Index(usize),
    Omega,
}

impl Serialize for Coord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coord::Index(t) => s.serialize_u64(*t as u64),
            Coord::Omega => s.serialize_str("omega"),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Index(t) => write!(f, "coordinate {t}"),
            Coord::Omega => f.write_str("coordinate ω"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    space: SpaceModel,
    coords: BTreeMap<usize, Scalar>,
    tail: Option<Scalar>,
}

impl Point {
    /// The zero point.
    pub fn zero(space: SpaceModel) -> Self {
        Point {
            space,
            coords: BTreeMap::new(),
            tail: space.is_c_omega().then(|| Scalar::new(0.0, 0.0)),
        }
    }

    pub fn new(
        space: SpaceModel,
        coords: BTreeMap<usize, Scalar>,
        tail: Option<Scalar>,
    ) -> Result<Self> {
        space.validate()?;
        for (&t, &v) in &coords {
            space.check_index(t)?;
            space.check_scalar(v)?;
        }
        match (space.is_c_omega(), tail) {
            (true, None) => return Err(Error::invalid("c-omega point needs a tail value")),
            (false, Some(_)) => {
                return Err(Error::invalid("tail is only allowed in the c-omega model"))
            }
            (true, Some(v)) => space.check_scalar(v)?,
            (false, None) => {}
        }
        Ok(Point {
            space,
            coords,
            tail,
        })
    }

    /// Real point with coordinates `values[0], values[1], ...`.
    pub fn from_real(space: SpaceModel, values: &[f64]) -> Result<Self> {
        let coords = values
            .iter()
            .enumerate()
            .map(|(t, &v)| (t, Scalar::new(v, 0.0)))
            .collect();
        let tail = space.is_c_omega().then(|| Scalar::new(0.0, 0.0));
        Point::new(space, coords, tail)
    }

    pub fn from_scalars(space: SpaceModel, values: &[Scalar], tail: Option<Scalar>) -> Result<Self> {
        let coords = values.iter().copied().enumerate().collect();
        Point::new(space, coords, tail)
    }

    pub fn space(&self) -> SpaceModel {
        self.space
    }

    pub fn coords(&self) -> &BTreeMap<usize, Scalar> {
        &self.coords
    }

    pub fn tail(&self) -> Option<Scalar> {
        self.tail
    }

    fn default_value(&self) -> Scalar {
        self.tail.unwrap_or(Scalar::new(0.0, 0.0))
    }

    pub fn at(&self, t: usize) -> Scalar {
        self.coords.get(&t).copied().unwrap_or_else(|| self.default_value())
    }

    pub fn value(&self, c: Coord) -> Scalar {
        match c {
            Coord::Index(t) => self.at(t),
            Coord::Omega => self.default_value(),
        }
    }

    /// Largest explicitly listed index. Beyond it the point is constant.
    pub fn transition_index(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    /// Sets a coordinate. The caller keeps the value inside the model
    /// (real scalars in a real space, index range for finite spaces).
    pub fn set(&mut self, c: Coord, v: Scalar) {
        match c {
            Coord::Index(t) => {
                self.coords.insert(t, v);
            }
            Coord::Omega => self.tail = Some(v),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords
            .values()
            .chain(self.tail.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: f64) -> Point {
        Point {
            space: self.space,
            coords: self.coords.iter().map(|(&t, &v)| (t, v * a)).collect(),
            tail: self.tail.map(|v| v * a),
        }
    }

    /// Coordinatewise `Σ aᵢ pᵢ`. All points must share a space.
    pub fn linear_combination(space: SpaceModel, terms: &[(f64, &Point)]) -> Result<Point> {
        let mut indices = BTreeSet::new();
        for (_, p) in terms {
            space.ensure_same(&p.space)?;
            indices.extend(p.coords.keys().copied());
        }
        let coords = indices
            .into_iter()
            .map(|t| (t, terms.iter().map(|(a, p)| p.at(t) * *a).sum()))
            .collect();
        let tail = space
            .is_c_omega()
            .then(|| terms.iter().map(|(a, p)| p.default_value() * *a).sum());
        Ok(Point {
            space,
            coords,
            tail,
        })
    }

    /// Largest coordinatewise gap, including the tail.
    pub fn distance(&self, other: &Point) -> f64 {
        let mut d: f64 = self
            .coords
            .keys()
            .chain(other.coords.keys())
            .map(|&t| (self.at(t) - other.at(t)).norm())
            .fold(0.0, f64::max);
        if self.space.is_c_omega() || other.space.is_c_omega() {
            d = d.max((self.default_value() - other.default_value()).norm());
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    space: SpaceModel,
    coords: BTreeMap<usize, Scalar>,
    omega_atom: Option<Scalar>,
}

impl Functional {
    pub fn new(
        space: SpaceModel,
        coords: BTreeMap<usize, Scalar>,
        omega_atom: Option<Scalar>,
    ) -> Result<Self> {
        space.validate()?;
        for (&t, &v) in &coords {
            space.check_index(t)?;
            space.check_scalar(v)?;
        }
        if let Some(v) = omega_atom {
            if !space.is_c_omega() {
                return Err(Error::invalid("omega atom is only allowed in the c-omega model"));
            }
            space.check_scalar(v)?;
        }
        Ok(Functional {
            space,
            coords,
            omega_atom,
        })
    }

    pub fn from_real(space: SpaceModel, values: &[f64]) -> Result<Self> {
        let coords = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(t, &v)| (t, Scalar::new(v, 0.0)))
            .collect();
        Functional::new(space, coords, None)
    }

    /// The coordinate functional `e_t*`.
    pub fn unit(space: SpaceModel, c: Coord) -> Result<Self> {
        let one = Scalar::new(1.0, 0.0);
        match c {
            Coord::Index(t) => Functional::new(space, BTreeMap::from([(t, one)]), None),
            Coord::Omega => Functional::new(space, BTreeMap::new(), Some(one)),
        }
    }

    pub fn space(&self) -> SpaceModel {
        self.space
    }

    pub fn coords(&self) -> &BTreeMap<usize, Scalar> {
        &self.coords
    }

    pub fn omega_atom(&self) -> Option<Scalar> {
        self.omega_atom
    }

    pub fn value(&self, c: Coord) -> Scalar {
        match c {
            Coord::Index(t) => self.coords.get(&t).copied().unwrap_or_default(),
            Coord::Omega => self.omega_atom.unwrap_or_default(),
        }
    }

    /// Coordinates carrying a nonzero weight.
    pub fn support(&self) -> impl Iterator<Item = Coord> + '_ {
        self.coords
            .iter()
            .filter(|(_, v)| v.norm() != 0.0)
            .map(|(&t, _)| Coord::Index(t))
            .chain(
                self.omega_atom
                    .filter(|v| v.norm() != 0.0)
                    .map(|_| Coord::Omega),
            )
    }

    pub fn l1_norm(&self) -> f64 {
        self.coords
            .values()
            .chain(self.omega_atom.iter())
            .map(|v| v.norm())
            .sum()
    }

    pub fn negated(&self) -> Functional {
        Functional {
            space: self.space,
            coords: self.coords.iter().map(|(&t, &v)| (t, -v)).collect(),
            omega_atom: self.omega_atom.map(|v| -v),
        }
    }

    /// The ball point `z` with `⟨f, z⟩ = ‖f‖₁`: conjugate signs of `f` on
    /// its support and `0` elsewhere (`c-omega`: the tail carries the sign
    /// of the `ω` atom).
    pub fn norming_point(&self) -> Point {
        let sign = |v: Scalar| {
            let r = v.norm();
            if r == 0.0 {
                Scalar::new(0.0, 0.0)
            } else {
                v.conj() / r
            }
        };
        let coords = self.coords.iter().map(|(&t, &v)| (t, sign(v))).collect();
        let tail = self
            .space
            .is_c_omega()
            .then(|| self.omega_atom.map(sign).unwrap_or_default());
        Point {
            space: self.space,
            coords,
            tail,
        }
    }
}

/// `⟨f, z⟩ = Σ_t f(t) z(t)` (plus `f(ω) z(ω)` in `c-omega`).
pub fn pairing(f: &Functional, z: &Point) -> Result<Scalar> {
    f.space.ensure_same(&z.space)?;
    let mut acc: Scalar = f.coords.iter().map(|(&t, &v)| v * z.at(t)).sum();
    if let Some(a) = f.omega_atom {
        acc += a * z.value(Coord::Omega);
    }
    Ok(acc)
}

pub fn sup_norm(z: &Point) -> f64 {
    z.sup_norm()
}

pub fn l1_norm(f: &Functional) -> f64 {
    f.l1_norm()
}

/// `S(f, ε) = { z ∈ B : Re f(z) > 1 − ε }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    functional: Functional,
    epsilon: f64,
}

impl Slice {
    pub fn new(functional: Functional, epsilon: f64) -> Result<Self> {
        let norm = functional.l1_norm();
        if (norm - 1.0).abs() > TAU_NORM {
            return Err(Error::invalid(format!(
                "slice functional must have l1-norm 1, got {norm}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("slice epsilon must be > 0, got {epsilon}")));
        }
        Ok(Slice {
            functional,
            epsilon,
        })
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn space(&self) -> SpaceModel {
        self.functional.space
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `1 − ‖z‖`; negative when outside the ball.
    pub ball_margin: f64,
    /// `Re f(z) − (1 − ε)`; membership needs this strictly positive.
    pub slice_margin: f64,
}

pub fn slice_membership(slice: &Slice, z: &Point) -> Result<Membership> {
    let value = pairing(&slice.functional, z)?.re;
    let norm = z.sup_norm();
    let slice_margin = value - (1.0 - slice.epsilon);
    let ball_margin = 1.0 - norm;
    Ok(Membership {
        member: norm <= 1.0 + TAU_BALL && slice_margin > 0.0,
        ball_margin,
        slice_margin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub lambda: f64,
    pub slice: Slice,
}

/// `Σ λᵢ S(fᵢ, εᵢ)` with `λᵢ > 0`, `Σ λᵢ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombo {
    terms: Vec<Term>,
}

impl ConvexCombo {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("convex combination needs at least one slice"))?;
        let space = first.slice.space();
        let mut total = 0.0;
        for (i, term) in terms.iter().enumerate() {
            space.ensure_same(&term.slice.space())?;
            if !(term.lambda > 0.0 && term.lambda.is_finite()) {
                return Err(Error::invalid(format!(
                    "lambda[{i}] must be positive, got {}",
                    term.lambda
                )));
            }
            total += term.lambda;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("lambdas must sum to 1, got {total}")));
        }
        Ok(ConvexCombo { terms })
    }

    pub fn single(slice: Slice) -> Self {
        ConvexCombo {
            terms: vec![Term { lambda: 1.0, slice }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn space(&self) -> SpaceModel {
        self.terms[0].slice.space()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.lambda)
    }

    /// Same combination with term `i` replaced.
    pub fn with_slice(&self, i: usize, slice: Slice) -> Result<ConvexCombo> {
        let mut terms = self.terms.clone();
        let term = terms
            .get_mut(i)
            .ok_or(Error::LengthMismatch { expected: self.len(), got: i + 1 })?;
        term.slice = slice;
        ConvexCombo::new(terms)
    }
}

/// `Σ λᵢ zᵢ`.
pub fn combo_point(combo: &ConvexCombo, witnesses: &[Point]) -> Result<Point> {
    if witnesses.len() != combo.len() {
        return Err(Error::LengthMismatch {
            expected: combo.len(),
            got: witnesses.len(),
        });
    }
    let terms: Vec<_> = combo.lambdas().zip(witnesses.iter()).collect();
    Point::linear_combination(combo.space(), &terms)
}

pub(crate) fn random_scalar<R: Rng>(rng: &mut R, field: Field, radius: f64) -> Scalar {
    match field {
        Field::Real => Scalar::new(rng.random_range(-radius..=radius), 0.0),
        Field::Complex => {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            Scalar::from_polar(r, phi)
        }
    }
}

pub(crate) fn random_unimodular<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    match field {
        Field::Real => Scalar::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        Field::Complex => {
            Scalar::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        }
    }
}

/// Uniformly random ball point listing `0..len` (and a random tail in
/// `c-omega`).
pub(crate) fn random_ball_point<R: Rng>(rng: &mut R, space: SpaceModel, len: usize) -> Point {
    let coords = (0..len)
        .map(|t| (t, random_scalar(rng, space.field, 1.0)))
        .collect();
    let tail = space
        .is_c_omega()
        .then(|| random_scalar(rng, space.field, 1.0));
    Point {
        space,
        coords,
        tail,
    }
}

/// Number of leading coordinates worth listing for random points near `f`.
pub(crate) fn listing_len(space: SpaceModel, support_end: usize) -> usize {
    match space.kind {
        SpaceKind::FiniteDiscrete { n } => n,
        SpaceKind::C0 | SpaceKind::COmega => support_end + 2,
    }
}

/// Draws a point of the slice by blending its norming point with a random
/// ball point. The blend weight stays below `0.4 ε`, so the slice margin is
/// at least `0.2 ε` whenever `ε ≤ 2.5`; beyond that the slice is the whole
/// ball.
pub fn random_slice_point(slice: &Slice, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = slice.functional();
    let space = f.space();
    let support_end = f.coords.keys().next_back().map_or(0, |t| t + 1);
    let ball = random_ball_point(&mut rng, space, listing_len(space, support_end));
    let anchor = f.norming_point();
    let s = (0.4 * slice.epsilon * rng.random::<f64>()).min(1.0);
    Point::linear_combination(space, &[(1.0 - s, &anchor), (s, &ball)])
        .expect("points share the slice's space")
}

// --- JSON representation ---------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Real(f64),
    Complex([f64; 2]),
}

impl RawScalar {
    fn encode(field: Field, v: Scalar) -> Self {
        match field {
            Field::Real => RawScalar::Real(v.re),
            Field::Complex => RawScalar::Complex([v.re, v.im]),
        }
    }

    fn decode(self) -> Scalar {
        match self {
            RawScalar::Real(re) => Scalar::new(re, 0.0),
            RawScalar::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    space: SpaceModel,
    #[serde(default)]
    coords: BTreeMap<usize, RawScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<RawScalar>,
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let field = self.space.field;
        RawPoint {
            space: self.space,
            coords: self
                .coords
                .iter()
                .map(|(&t, &v)| (t, RawScalar::encode(field, v)))
                .collect(),
            tail: self.tail.map(|v| RawScalar::encode(field, v)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPoint::deserialize(d)?;
        let coords = raw.coords.into_iter().map(|(t, v)| (t, v.decode())).collect();
        Point::new(raw.space, coords, raw.tail.map(RawScalar::decode))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawFunctional {
    space: SpaceModel,
    #[serde(default)]
    coords: BTreeMap<usize, RawScalar>,
    #[serde(default, alias = "tail", skip_serializing_if = "Option::is_none")]
    omega_atom: Option<RawScalar>,
}

impl Serialize for Functional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let field = self.space.field;
        RawFunctional {
            space: self.space,
            coords: self
                .coords
                .iter()
                .map(|(&t, &v)| (t, RawScalar::encode(field, v)))
                .collect(),
            omega_atom: self.omega_atom.map(|v| RawScalar::encode(field, v)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Functional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFunctional::deserialize(d)?;
        let coords = raw.coords.into_iter().map(|(t, v)| (t, v.decode())).collect();
        Functional::new(raw.space, coords, raw.omega_atom.map(RawScalar::decode))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSlice {
    functional: Functional,
    epsilon: f64,
}

impl Serialize for Slice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSlice {
            functional: self.functional.clone(),
            epsilon: self.epsilon,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSlice::deserialize(d)?;
        Slice::new(raw.functional, raw.epsilon).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    lambda: f64,
    epsilon: f64,
    functional: Functional,
}

impl Serialize for ConvexCombo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<RawTerm> = self
            .terms
            .iter()
            .map(|t| RawTerm {
                lambda: t.lambda,
                epsilon: t.slice.epsilon,
                functional: t.slice.functional.clone(),
            })
            .collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexCombo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<RawTerm>::deserialize(d)?;
        let terms = raw
            .into_iter()
            .map(|t| {
                Ok(Term {
                    lambda: t.lambda,
                    slice: Slice::new(t.functional, t.epsilon)?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        ConvexCombo::new(terms).map_err(serde::de::Error::custom)
    }
}
