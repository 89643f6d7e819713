//! Random decomposition instances and campaigns over them.
//!
//! [`generate_decompose_instance`] draws a convex combination of slices
//! together with witnesses whose coordinates on `E` are steered into the
//! three cases of the construction. A campaign then decomposes several
//! points of every instance's neighborhood and verifies each result.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::{
    compute_params, decompose, sample_in_neighborhood, verify_case_three, verify_decomposition,
    weak_neighborhood, DecompositionReport, ParamSet,
};
use crate::error::{Error, Result};
use crate::model::{
    combo_point, pairing, random_scalar, random_unimodular, ConvexCombo, Coord, Field, Functional,
    Point, Scalar, Slice, SpaceKind, SpaceModel, Term,
};

/// Decomposition input: `x = Σ λᵢ zᵢ` and optionally the point `y` to
/// decompose. Without `y`, `samples` points (default 1) are drawn from the
/// neighborhood of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeInstance {
    pub combo: ConvexCombo,
    pub witnesses: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    FiniteDiscrete,
    C0,
    COmega,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRanges {
    /// Largest `n` (finite models) or support window (sequence models).
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_fields")]
    pub fields: Vec<Field>,
    #[serde(default = "default_models")]
    pub models: Vec<ModelChoice>,
    /// Put at least one Case III coordinate into every instance with `k ≥ 2`.
    #[serde(default)]
    pub force_case_three: bool,
}

fn default_n_max() -> usize {
    12
}

fn default_k_min() -> usize {
    1
}

fn default_k_max() -> usize {
    5
}

fn default_fields() -> Vec<Field> {
    vec![Field::Real, Field::Complex]
}

fn default_models() -> Vec<ModelChoice> {
    vec![ModelChoice::FiniteDiscrete, ModelChoice::C0, ModelChoice::COmega]
}

impl Default for GeneratorRanges {
    fn default() -> Self {
        GeneratorRanges {
            n_max: default_n_max(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            fields: default_fields(),
            models: default_models(),
            force_case_three: false,
        }
    }
}

impl GeneratorRanges {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::invalid(format!(
                "need 1 <= k_min <= k_max, got {}..={}",
                self.k_min, self.k_max
            )));
        }
        if self.fields.is_empty() || self.models.is_empty() {
            return Err(Error::invalid("fields and models must be non-empty"));
        }
        Ok(())
    }
}

/// Independent seed for item `index` of a run seeded with `base`
/// (splitmix64 step).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, PartialEq)]
enum Category {
    One,
    Two,
    Three,
}

/// Random instance whose witnesses sit in their slices with margin at least
/// `0.05`. Deterministic in `seed`.
pub fn generate_decompose_instance(seed: u64, ranges: &GeneratorRanges) -> Result<DecomposeInstance> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(inst) = try_generate(&mut rng, ranges) {
            return Ok(inst);
        }
    }
}

fn pick<T: Copy, R: Rng>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

fn try_generate<R: Rng>(rng: &mut R, ranges: &GeneratorRanges) -> Option<DecomposeInstance> {
    let field = pick(rng, &ranges.fields);
    let n = rng.random_range(1..=ranges.n_max);
    let space = match pick(rng, &ranges.models) {
        ModelChoice::FiniteDiscrete => SpaceModel::finite(n, field),
        ModelChoice::C0 => SpaceModel::c0(field),
        ModelChoice::COmega => SpaceModel::c_omega(field),
    };
    let k = rng.random_range(ranges.k_min..=ranges.k_max);

    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let lambdas: Vec<f64> = weights.iter().map(|w| w / total).collect();

    let functionals: Vec<Functional> = (0..k)
        .map(|_| random_functional(rng, space, n))
        .collect();
    let mut support: BTreeSet<Coord> = functionals.iter().flat_map(|f| f.support()).collect();
    if space.is_c_omega() {
        support.insert(Coord::Omega);
    }

    let mut categories: BTreeMap<Coord, Category> = support
        .iter()
        .map(|&t| {
            let r = rng.random::<f64>();
            let c = if k >= 2 && r < 0.35 {
                Category::Three
            } else if r < 0.6 {
                Category::Two
            } else {
                Category::One
            };
            (t, c)
        })
        .collect();
    if ranges.force_case_three && k >= 2 && !categories.values().any(|c| *c == Category::Three) {
        let t = *support.iter().nth(rng.random_range(0..support.len()))?;
        categories.insert(t, Category::Three);
    }

    let listed = match space.kind {
        SpaceKind::FiniteDiscrete { n } => n,
        SpaceKind::C0 | SpaceKind::COmega => n + 2,
    };
    let mut coords: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); k];
    let mut tails: Vec<Option<Scalar>> = vec![None; k];
    for t in 0..listed {
        let values = match categories.get(&Coord::Index(t)) {
            Some(&c) => category_values(rng, c, field, k),
            None => (0..k).map(|_| random_scalar(rng, field, 1.0)).collect(),
        };
        for (i, v) in values.into_iter().enumerate() {
            coords[i].insert(t, v);
        }
    }
    if let Some(&c) = categories.get(&Coord::Omega) {
        for (i, v) in category_values(rng, c, field, k).into_iter().enumerate() {
            tails[i] = Some(v);
        }
    }
    let witnesses: Vec<Point> = coords
        .into_iter()
        .zip(tails)
        .map(|(c, tail)| Point::new(space, c, tail))
        .collect::<Result<_>>()
        .ok()?;

    let mut terms = Vec::with_capacity(k);
    for ((f, z), lambda) in functionals.into_iter().zip(&witnesses).zip(lambdas) {
        let value = pairing(&f, z).ok()?.re;
        if value < -0.3 {
            return None;
        }
        let margin = rng.random_range(0.06..0.5);
        let slice = Slice::new(f, 1.0 - value + margin).ok()?;
        terms.push(Term { lambda, slice });
    }
    let combo = ConvexCombo::new(terms).ok()?;
    compute_params(&combo, &witnesses).ok()?;
    Some(DecomposeInstance {
        combo,
        witnesses,
        y: None,
        samples: None,
    })
}

fn random_functional<R: Rng>(rng: &mut R, space: SpaceModel, n: usize) -> Functional {
    let size = rng.random_range(1..=n.min(4));
    let mut coords: BTreeMap<usize, Scalar> = sample(rng, n, size)
        .into_iter()
        .map(|t| (t, random_unimodular(rng, space.field) * rng.random_range(0.1..1.0)))
        .collect();
    let mut omega = (space.is_c_omega() && rng.random::<f64>() < 0.3)
        .then(|| random_unimodular(rng, space.field) * rng.random_range(0.1..1.0));
    let total: f64 = coords.values().chain(omega.iter()).map(|v| v.norm()).sum();
    coords.values_mut().for_each(|v| *v /= total);
    if let Some(v) = omega.as_mut() {
        *v /= total;
    }
    Functional::new(space, coords, omega).expect("finite values inside the model")
}

fn category_values<R: Rng>(rng: &mut R, c: Category, field: Field, k: usize) -> Vec<Scalar> {
    match c {
        Category::One => {
            let mut values: Vec<Scalar> = (0..k).map(|_| random_scalar(rng, field, 1.0)).collect();
            let j = rng.random_range(0..k);
            values[j] = random_scalar(rng, field, 0.9);
            values
        }
        Category::Two => vec![random_unimodular(rng, field); k],
        Category::Three => {
            let anchors: Vec<Scalar> = match field {
                Field::Real => vec![Scalar::new(1.0, 0.0), Scalar::new(-1.0, 0.0)],
                Field::Complex => {
                    let q = rng.random_range(2..=k.min(3));
                    let base = rng.random_range(-PI..PI);
                    let spacing = 2.0 * PI / q as f64;
                    (0..q)
                        .map(|p| {
                            let jitter = rng.random_range(-0.25..0.25) * spacing;
                            Scalar::from_polar(1.0, base + p as f64 * spacing + jitter)
                        })
                        .collect()
                }
            };
            let mut order: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            let mut values = vec![anchors[0]; k];
            for (slot, &i) in order.iter().enumerate() {
                values[i] = if slot < anchors.len() {
                    anchors[slot]
                } else {
                    pick(rng, &anchors)
                };
            }
            values
        }
    }
}

/// Which tampering [`tamper_case`] applies to the first witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TamperKind {
    /// `z̄₁ ← 1.1 z̄₁`; must fail `ball[0]`.
    Scale,
    /// `f₁ ← −e_m*` at a coordinate where `z̄₁(m) = 1`; must fail `slice[0]`.
    ReplaceFunctional,
}

impl TamperKind {
    pub fn expected_check(self) -> &'static str {
        match self {
            TamperKind::Scale => "ball",
            TamperKind::ReplaceFunctional => "slice",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamperCase {
    pub kind: TamperKind,
    /// Coordinate off `E` where `y` is pinned to `1`.
    pub pinned_index: usize,
    pub expected_check: &'static str,
    pub detected: bool,
    pub report: DecompositionReport,
}

/// Decomposes a point `y` of the neighborhood with `y(m) = 1` at a
/// coordinate `m ∉ E` (so every `z̄ᵢ` has norm one), tampers with the first
/// witness and re-verifies. Fails with [`Error::Infeasible`] when every
/// coordinate of a finite model lies in `E`.
pub fn tamper_case(
    inst: &DecomposeInstance,
    params: &ParamSet,
    kind: TamperKind,
    seed: u64,
) -> Result<TamperCase> {
    let combo = &inst.combo;
    let space = combo.space();
    let x = combo_point(combo, &inst.witnesses)?;
    let u = weak_neighborhood(&x, params);
    let mut y = sample_in_neighborhood(&u, seed);
    let m = match space.kind {
        SpaceKind::FiniteDiscrete { n } => (0..n)
            .find(|&t| !params.support.contains(&Coord::Index(t)))
            .ok_or_else(|| Error::Infeasible("every coordinate lies in E".into()))?,
        SpaceKind::C0 | SpaceKind::COmega => {
            let listed = y.coords().keys().next_back().copied().unwrap_or(0);
            listed.max(u.omega_cutoff.unwrap_or(0)) + 1
        }
    };
    y.set(Coord::Index(m), Scalar::new(1.0, 0.0));
    let mut zbars = decompose(combo, &inst.witnesses, params, &y)?;
    let report = match kind {
        TamperKind::Scale => {
            zbars[0] = zbars[0].scaled(1.1);
            verify_decomposition(combo, &inst.witnesses, &y, &zbars)
        }
        TamperKind::ReplaceFunctional => {
            let f = Functional::unit(space, Coord::Index(m))?.negated();
            let eps = combo.terms()[0].slice.epsilon();
            let tampered = combo.with_slice(0, Slice::new(f, eps)?)?;
            verify_decomposition(&tampered, &inst.witnesses, &y, &zbars)
        }
    };
    let expected_check = kind.expected_check();
    let detected = report
        .check(expected_check, Some(0))
        .is_some_and(|c| !c.passed);
    Ok(TamperCase {
        kind,
        pinned_index: m,
        expected_check,
        detected,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub instances: usize,
    #[serde(default = "default_samples")]
    pub samples_per_instance: usize,
    /// Overrides the scenario seed when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub ranges: GeneratorRanges,
    /// Test hook: tamper with one decomposition per instance.
    #[serde(default)]
    pub tamper: bool,
}

fn default_samples() -> usize {
    10
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            instances: 0,
            samples_per_instance: default_samples(),
            seed: None,
            ranges: GeneratorRanges::default(),
            tamper: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub space: SpaceModel,
    pub k: usize,
    pub case_three_coords: usize,
    pub decompositions: usize,
    pub passed: bool,
    pub min_slice_margin: f64,
    /// Smallest `margin − (d − 3η)`.
    pub min_floor_excess: f64,
    pub min_ball_margin: f64,
    pub max_reconstruction_residual: f64,
    /// Largest `drift / η`.
    pub max_drift_ratio: f64,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tamper: Option<TamperOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamperOutcome {
    pub kind: TamperKind,
    /// `None` when the instance has no coordinate off `E`.
    pub detected: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstMargins {
    pub min_slice_margin: f64,
    pub min_floor_excess: f64,
    pub min_ball_margin: f64,
    pub max_reconstruction_residual: f64,
    pub max_drift_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub index: usize,
    pub seed: u64,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamperSummary {
    pub injected: usize,
    pub detected: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub instances: usize,
    pub samples_per_instance: usize,
    pub decompositions: usize,
    pub passed_instances: usize,
    /// `None` for an empty campaign.
    pub pass_rate: Option<f64>,
    pub case_three_instances: usize,
    pub worst: Option<WorstMargins>,
    pub failures: Vec<FailureRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tamper: Option<TamperSummary>,
    /// Per-instance outcomes sorted by seed.
    #[serde(skip)]
    pub outcomes: Vec<InstanceOutcome>,
}

impl CampaignSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn push_report(out: &mut InstanceOutcome, j: usize, report: &DecompositionReport) {
    out.decompositions += 1;
    for &m in &report.slice_margins {
        out.min_slice_margin = out.min_slice_margin.min(m);
        if let Some(floor) = report.slice_floor {
            out.min_floor_excess = out.min_floor_excess.min(m - floor);
        }
    }
    for &m in &report.ball_margins {
        out.min_ball_margin = out.min_ball_margin.min(m);
    }
    out.max_reconstruction_residual = out
        .max_reconstruction_residual
        .max(report.reconstruction_residual);
    if let Some(eta) = report.eta {
        for &d in &report.drifts {
            out.max_drift_ratio = out.max_drift_ratio.max(d / eta);
        }
    }
    for c in report.failed() {
        let at = c.index.map(|i| format!("[{i}]")).unwrap_or_default();
        out.failures.push(format!("sample {j}: check {}{at} failed (value {:?})", c.name, c.value));
    }
}

/// Generator ranges for instance `index`: Case III is forced on every
/// even-indexed instance.
pub fn instance_ranges(config: &CampaignConfig, index: usize) -> GeneratorRanges {
    GeneratorRanges {
        force_case_three: config.ranges.force_case_three || index % 2 == 0,
        ..config.ranges.clone()
    }
}

/// Generates instance `index` of a campaign and checks every sampled
/// decomposition.
pub fn run_instance(config: &CampaignConfig, base_seed: u64, index: usize) -> InstanceOutcome {
    let seed = derive_seed(base_seed, index as u64);
    let ranges = instance_ranges(config, index);
    let mut out = InstanceOutcome {
        index,
        seed,
        space: SpaceModel::finite(1, Field::Real),
        k: 0,
        case_three_coords: 0,
        decompositions: 0,
        passed: false,
        min_slice_margin: f64::INFINITY,
        min_floor_excess: f64::INFINITY,
        min_ball_margin: f64::INFINITY,
        max_reconstruction_residual: 0.0,
        max_drift_ratio: 0.0,
        failures: Vec::new(),
        tamper: None,
    };
    let inst = match generate_decompose_instance(seed, &ranges) {
        Ok(inst) => inst,
        Err(e) => {
            out.failures.push(format!("generation: {e}"));
            return out;
        }
    };
    out.space = inst.combo.space();
    out.k = inst.combo.len();
    let params = match compute_params(&inst.combo, &inst.witnesses) {
        Ok(p) => p,
        Err(e) => {
            out.failures.push(format!("parameters: {e}"));
            return out;
        }
    };
    out.case_three_coords = params.case_three.len();
    for c in verify_case_three(&inst.witnesses, &params) {
        if !c.passed {
            out.failures.push(format!(
                "check {} failed at {} (value {:?})",
                c.name,
                c.detail.as_deref().unwrap_or("?"),
                c.value
            ));
        }
    }

    let x = match combo_point(&inst.combo, &inst.witnesses) {
        Ok(x) => x,
        Err(e) => {
            out.failures.push(format!("combination: {e}"));
            return out;
        }
    };
    let u = weak_neighborhood(&x, &params);
    for j in 0..config.samples_per_instance {
        let y = sample_in_neighborhood(&u, derive_seed(seed, j as u64));
        match decompose(&inst.combo, &inst.witnesses, &params, &y) {
            Ok(zbars) => {
                let report = verify_decomposition(&inst.combo, &inst.witnesses, &y, &zbars);
                push_report(&mut out, j, &report);
            }
            Err(e) => out.failures.push(format!("sample {j}: {e}")),
        }
    }

    if config.tamper {
        let kind = if index % 2 == 0 {
            TamperKind::Scale
        } else {
            TamperKind::ReplaceFunctional
        };
        let detected = match tamper_case(&inst, &params, kind, derive_seed(seed, u64::MAX)) {
            Ok(case) => {
                for c in case.report.failed() {
                    let at = c.index.map(|i| format!("[{i}]")).unwrap_or_default();
                    out.failures.push(format!("tampered ({kind:?}): check {}{at} failed", c.name));
                }
                Some(case.detected)
            }
            Err(Error::Infeasible(_)) => None,
            Err(e) => {
                out.failures.push(format!("tampered ({kind:?}): {e}"));
                None
            }
        };
        out.tamper = Some(TamperOutcome { kind, detected });
    }
    out.passed = out.failures.is_empty();
    out
}

/// Worker count from `SLICE_LAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SLICE_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

#[cfg(feature = "parallel")]
fn run_all(config: &CampaignConfig, seed: u64) -> Vec<InstanceOutcome> {
    use rayon::prelude::*;
    let work = || {
        (0..config.instances)
            .into_par_iter()
            .map(|i| run_instance(config, seed, i))
            .collect()
    };
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(work),
        None => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all(config: &CampaignConfig, seed: u64) -> Vec<InstanceOutcome> {
    (0..config.instances)
        .map(|i| run_instance(config, seed, i))
        .collect()
}

/// Runs a campaign. `seed` is used unless the config carries its own.
pub fn run_campaign(config: &CampaignConfig, seed: u64) -> Result<CampaignSummary> {
    config.ranges.validate()?;
    let seed = config.seed.unwrap_or(seed);
    let mut outcomes = run_all(config, seed);
    outcomes.sort_by_key(|o| (o.seed, o.index));

    let worst = outcomes
        .iter()
        .filter(|o| o.decompositions > 0)
        .fold(None::<WorstMargins>, |acc, o| {
            let w = acc.unwrap_or(WorstMargins {
                min_slice_margin: f64::INFINITY,
                min_floor_excess: f64::INFINITY,
                min_ball_margin: f64::INFINITY,
                max_reconstruction_residual: 0.0,
                max_drift_ratio: 0.0,
            });
            Some(WorstMargins {
                min_slice_margin: w.min_slice_margin.min(o.min_slice_margin),
                min_floor_excess: w.min_floor_excess.min(o.min_floor_excess),
                min_ball_margin: w.min_ball_margin.min(o.min_ball_margin),
                max_reconstruction_residual: w
                    .max_reconstruction_residual
                    .max(o.max_reconstruction_residual),
                max_drift_ratio: w.max_drift_ratio.max(o.max_drift_ratio),
            })
        });
    let failures: Vec<FailureRecord> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| FailureRecord {
            index: o.index,
            seed: o.seed,
            detail: o.failures.clone(),
        })
        .collect();
    let passed_instances = outcomes.iter().filter(|o| o.passed).count();
    let tamper = config.tamper.then(|| {
        let results: Vec<Option<bool>> = outcomes
            .iter()
            .filter_map(|o| o.tamper.as_ref().map(|t| t.detected))
            .collect();
        TamperSummary {
            injected: results.iter().filter(|d| d.is_some()).count(),
            detected: results.iter().filter(|d| **d == Some(true)).count(),
            skipped: results.iter().filter(|d| d.is_none()).count(),
        }
    });
    Ok(CampaignSummary {
        seed,
        instances: config.instances,
        samples_per_instance: config.samples_per_instance,
        decompositions: outcomes.iter().map(|o| o.decompositions).sum(),
        passed_instances,
        pass_rate: (!outcomes.is_empty())
            .then(|| passed_instances as f64 / outcomes.len() as f64),
        case_three_instances: outcomes.iter().filter(|o| o.case_three_coords > 0).count(),
        worst,
        failures,
        tamper,
        outcomes,
    })
}
