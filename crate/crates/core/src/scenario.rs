//! JSON scenarios and the reports produced from them.
//!
//! A scenario file is `{"kind": ..., "payload": {...}, "seed": N}`. Parse
//! and validation errors carry the JSON path and the line and column in the
//! original file. Errors raised while computing are reported as failed
//! checks instead, so every well-formed scenario produces a report.

use std::path::Path;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::campaign::{generate_decompose_instance, run_campaign, CampaignConfig, DecomposeInstance, GeneratorRanges};
use crate::check::Check;
use crate::circle::{chord_identity_check, lemma_sweep, ChordInstance, LEMMA_TOL};
use crate::decomposition::{
    compute_params, decompose, sample_in_neighborhood, verify_case_three, verify_decomposition,
    weak_neighborhood,
};
use crate::diameter::{combo_diameter_linf, lp_sum_combo_sup, opposite_slice_combo_sup};
use crate::error::{Error, Result};
use crate::model::{combo_point, ConvexCombo, Point};
use crate::sphere::{fresh_coordinate_witness, l1_disjoint_witness, WeightedMeasureSpace};

pub const TOOL: &str = "slice-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Decompose,
    Diameter,
    Shrinkage,
    Remark,
    SphereWitness,
    L1Witness,
    Lemma,
    Campaign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComboPayload {
    pub combo: ConvexCombo,
}

/// One `ε` for both slices, or one each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonPair {
    Same(f64),
    Each([f64; 2]),
}

impl EpsilonPair {
    pub fn pair(self) -> [f64; 2] {
        match self {
            EpsilonPair::Same(e) => [e, e],
            EpsilonPair::Each(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkagePayload {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_half")]
    pub lambda: f64,
    #[serde(default = "default_eps")]
    pub epsilon: EpsilonPair,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemarkPayload {
    /// Slice direction `x*`; defaults to `e₀` in `ℓ₂ⁿ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default = "default_eps_single")]
    pub epsilon: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct L1Payload {
    pub weights: WeightedMeasureSpace,
    pub g: Vec<Vec<f64>>,
    pub epsilon: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// A single instance (`alpha`, `beta`, `mu`) or a seeded random sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn default_p() -> f64 {
    2.0
}

fn default_half() -> f64 {
    0.5
}

fn default_eps() -> EpsilonPair {
    EpsilonPair::Same(0.1)
}

fn default_eps_single() -> f64 {
    0.1
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Decompose(DecomposeInstance),
    Diameter(ComboPayload),
    Shrinkage(ShrinkagePayload),
    Remark(RemarkPayload),
    SphereWitness(ComboPayload),
    L1Witness(L1Payload),
    Lemma(LemmaPayload),
    Campaign(CampaignConfig),
}

impl Job {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Job::Decompose(_) => ScenarioKind::Decompose,
            Job::Diameter(_) => ScenarioKind::Diameter,
            Job::Shrinkage(_) => ScenarioKind::Shrinkage,
            Job::Remark(_) => ScenarioKind::Remark,
            Job::SphereWitness(_) => ScenarioKind::SphereWitness,
            Job::L1Witness(_) => ScenarioKind::L1Witness,
            Job::Lemma(_) => ScenarioKind::Lemma,
            Job::Campaign(_) => ScenarioKind::Campaign,
        }
    }

    pub fn payload(&self) -> Value {
        let v = match self {
            Job::Decompose(p) => serde_json::to_value(p),
            Job::Diameter(p) | Job::SphereWitness(p) => serde_json::to_value(p),
            Job::Shrinkage(p) => serde_json::to_value(p),
            Job::Remark(p) => serde_json::to_value(p),
            Job::L1Witness(p) => serde_json::to_value(p),
            Job::Lemma(p) => serde_json::to_value(p),
            Job::Campaign(p) => serde_json::to_value(p),
        };
        v.expect("payloads serialize to JSON")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub job: Job,
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct ScenarioEcho {
    kind: ScenarioKind,
    payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        self.job.kind()
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(ScenarioEcho {
            kind: self.kind(),
            payload: self.job.payload(),
            seed: self.seed,
        })
        .expect("scenario serializes to JSON")
    }
}

impl Serialize for Scenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario<'a> {
    kind: ScenarioKind,
    #[serde(borrow)]
    payload: &'a RawValue,
    #[serde(default)]
    seed: Option<u64>,
}

/// 1-based `(line, column)` of byte `offset` in `text`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Deserializes `text` with the JSON path of any failure. `base` is the
/// byte offset of `text` inside `full`, used to report file positions.
fn parse_at<T: DeserializeOwned>(full: &str, text: &str, base: usize, prefix: &str) -> Result<T> {
    let locate = |inner: &serde_json::Error| {
        if inner.line() == 0 {
            return None;
        }
        let (l0, c0) = line_col(full, base);
        Some(if inner.line() == 1 {
            (l0, c0 + inner.column() - 1)
        } else {
            (l0 + inner.line() - 1, inner.column())
        })
    };
    let describe = |at: String, inner: &serde_json::Error| {
        let msg = strip_position(&inner.to_string());
        match locate(inner) {
            Some((line, col)) => Error::Parse(format!("{at}: {msg} (line {line}, column {col})")),
            None => Error::Parse(format!("{at}: {msg}")),
        }
    };
    let join = |path: String| match (prefix.is_empty(), path == ".") {
        (true, _) => path,
        (false, true) => prefix.to_string(),
        (false, false) => format!("{prefix}.{path}"),
    };

    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| describe(join(e.path().to_string()), e.inner()))?;
    de.end().map_err(|e| describe(join(".".into()), &e))?;
    Ok(value)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Parses a bare JSON document (instance, combo, config) with path and
/// position context on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    parse_at(text, text, 0, "")
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = parse_at_borrowed(text)?;
    let payload = raw.payload.get();
    let base = payload.as_ptr() as usize - text.as_ptr() as usize;
    let job = match raw.kind {
        ScenarioKind::Decompose => Job::Decompose(parse_at(text, payload, base, "payload")?),
        ScenarioKind::Diameter => Job::Diameter(parse_at(text, payload, base, "payload")?),
        ScenarioKind::Shrinkage => Job::Shrinkage(parse_at(text, payload, base, "payload")?),
        ScenarioKind::Remark => Job::Remark(parse_at(text, payload, base, "payload")?),
        ScenarioKind::SphereWitness => {
            Job::SphereWitness(parse_at(text, payload, base, "payload")?)
        }
        ScenarioKind::L1Witness => Job::L1Witness(parse_at(text, payload, base, "payload")?),
        ScenarioKind::Lemma => Job::Lemma(parse_at(text, payload, base, "payload")?),
        ScenarioKind::Campaign => Job::Campaign(parse_at(text, payload, base, "payload")?),
    };
    Ok(Scenario {
        job,
        seed: raw.seed,
    })
}

fn parse_at_borrowed(text: &str) -> Result<RawScenario<'_>> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: std::result::Result<RawScenario, _> = serde_path_to_error::deserialize(&mut de);
    let raw = raw.map_err(|e| {
        let inner = e.inner();
        Error::Parse(format!(
            "{}: {} (line {}, column {})",
            e.path(),
            strip_position(&inner.to_string()),
            inner.line(),
            inner.column()
        ))
    })?;
    de.end().map_err(|e| {
        Error::Parse(format!(
            "trailing characters (line {}, column {})",
            e.line(),
            e.column()
        ))
    })?;
    Ok(raw)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    parse_scenario(&read(path.as_ref())?)
}

/// Reads a file holding either a scenario of the given kind (its payload is
/// used) or the bare payload.
pub fn load_payload<T: DeserializeOwned>(path: impl AsRef<Path>, kind: ScenarioKind) -> Result<T> {
    let text = read(path.as_ref())?;
    if let Ok(raw) = serde_json::from_str::<RawScenario>(&text) {
        if raw.kind != kind {
            return Err(Error::Parse(format!(
                "expected a {kind:?} scenario, found {:?}",
                raw.kind
            )));
        }
        let payload = raw.payload.get();
        let base = payload.as_ptr() as usize - text.as_ptr() as usize;
        return parse_at(&text, payload, base, "payload");
    }
    parse_json(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub scenario: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_time_ms: f64,
}

struct Outcome {
    results: Value,
    checks: Vec<Check>,
    seed: Option<u64>,
}

impl Outcome {
    fn new(results: impl Serialize, checks: Vec<Check>) -> Self {
        Outcome {
            results: serde_json::to_value(results).expect("results serialize to JSON"),
            checks,
            seed: None,
        }
    }
}

/// Input errors abort the run; anything else becomes a failed check.
fn surface<T>(r: Result<T>, name: &str, checks: &mut Vec<Check>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            e @ (Error::InvalidInput(_)
            | Error::ModelMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::Parse(_)),
        ) => Err(e),
        Err(e) => {
            checks.push(Check::new(name, false).with_detail(e.to_string()));
            Ok(None)
        }
    }
}

pub fn run_scenario(path: impl AsRef<Path>) -> Result<Report> {
    run(&load_scenario(path)?, None)
}

/// Runs a scenario; `seed` overrides the scenario's own seed.
pub fn run(scenario: &Scenario, seed: Option<u64>) -> Result<Report> {
    let start = Instant::now();
    let seed = seed.or(scenario.seed).unwrap_or(0);
    let outcome = match &scenario.job {
        Job::Decompose(inst) => run_decompose(inst, seed)?,
        Job::Diameter(p) => run_diameter(p)?,
        Job::Shrinkage(p) => run_shrinkage(p, seed)?,
        Job::Remark(p) => run_remark(p, seed)?,
        Job::SphereWitness(p) => run_sphere_witness(p)?,
        Job::L1Witness(p) => run_l1_witness(p)?,
        Job::Lemma(p) => run_lemma(p, seed)?,
        Job::Campaign(c) => run_campaign_job(c, seed)?,
    };
    Ok(Report {
        tool: TOOL,
        version: VERSION,
        kind: scenario.kind(),
        seed: outcome.seed.unwrap_or(seed),
        scenario: scenario.to_value(),
        passed: outcome.checks.iter().all(|c| c.passed),
        results: outcome.results,
        checks: outcome.checks,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Serialize)]
struct DecompositionResult {
    y: Point,
    zbars: Vec<Point>,
    reconstruction_residual: f64,
    ball_margins: Vec<f64>,
    slice_margins: Vec<f64>,
    slice_floor: Option<f64>,
    drifts: Vec<f64>,
}

fn run_decompose(inst: &DecomposeInstance, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let Some(params) = surface(compute_params(&inst.combo, &inst.witnesses), "parameters", &mut checks)?
    else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.extend(verify_case_three(&inst.witnesses, &params));
    let x = combo_point(&inst.combo, &inst.witnesses)?;
    let u = weak_neighborhood(&x, &params);
    let ys: Vec<Point> = match &inst.y {
        Some(y) => vec![y.clone()],
        None => (0..inst.samples.unwrap_or(1))
            .map(|j| sample_in_neighborhood(&u, crate::campaign::derive_seed(seed, j as u64)))
            .collect(),
    };
    let mut results = Vec::with_capacity(ys.len());
    for (j, y) in ys.into_iter().enumerate() {
        let Some(zbars) = surface(decompose(&inst.combo, &inst.witnesses, &params, &y), "decompose", &mut checks)?
        else {
            continue;
        };
        let report = verify_decomposition(&inst.combo, &inst.witnesses, &y, &zbars);
        checks.extend(report.checks.iter().cloned().map(|mut c| {
            if inst.y.is_none() {
                c.detail = Some(match c.detail {
                    Some(d) => format!("sample {j}: {d}"),
                    None => format!("sample {j}"),
                });
            }
            c
        }));
        results.push(DecompositionResult {
            y,
            zbars,
            reconstruction_residual: report.reconstruction_residual,
            ball_margins: report.ball_margins,
            slice_margins: report.slice_margins,
            slice_floor: report.slice_floor,
            drifts: report.drifts,
        });
    }
    #[derive(Serialize)]
    struct Results<'a> {
        params: &'a crate::decomposition::ParamSet,
        center: Point,
        decompositions: Vec<DecompositionResult>,
    }
    Ok(Outcome::new(
        Results {
            params: &params,
            center: x,
            decompositions: results,
        },
        checks,
    ))
}

fn run_diameter(p: &ComboPayload) -> Result<Outcome> {
    let mut checks = Vec::new();
    let Some(d) = surface(combo_diameter_linf(&p.combo), "diameter", &mut checks)? else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.push(Check::new("range", (0.0..=2.0).contains(&d.value)).with_value(d.value));
    Ok(Outcome::new(d, checks))
}

fn run_shrinkage(p: &ShrinkagePayload, seed: u64) -> Result<Outcome> {
    let mut checks = Vec::new();
    let Some(r) = surface(
        lp_sum_combo_sup(p.p, p.lambda, p.epsilon.pair(), p.samples, seed),
        "shrinkage",
        &mut checks,
    )?
    else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.push(Check::at_most("inside-ball", r.sup_estimate, 1.0 + 1e-12));
    if p.lambda > 0.0 && p.lambda < 1.0 {
        let mut c = Check::new("strict-shrinkage", r.beta_estimate > 0.0).with_value(r.beta_estimate);
        c.threshold = Some(0.0);
        checks.push(c);
    }
    Ok(Outcome::new(r, checks))
}

fn run_remark(p: &RemarkPayload, seed: u64) -> Result<Outcome> {
    let direction = match (&p.direction, p.dimension) {
        (Some(d), None) => d.clone(),
        (Some(d), Some(n)) if d.len() == n => d.clone(),
        (Some(d), Some(n)) => return Err(Error::LengthMismatch { expected: n, got: d.len() }),
        (None, n) => {
            let mut d = vec![0.0; n.unwrap_or(2).max(1)];
            d[0] = 1.0;
            d
        }
    };
    let mut checks = Vec::new();
    let Some(r) = surface(
        opposite_slice_combo_sup(&direction, p.epsilon, p.samples, seed),
        "remark",
        &mut checks,
    )?
    else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.push(Check::at_most("below-certificate", r.sup_estimate, r.certified_upper_bound));
    let mut off = Check::new("off-sphere", r.certified_upper_bound < 1.0)
        .with_value(r.certified_upper_bound);
    off.threshold = Some(1.0);
    checks.push(off);
    Ok(Outcome::new(r, checks))
}

fn run_sphere_witness(p: &ComboPayload) -> Result<Outcome> {
    let mut checks = Vec::new();
    let Some(w) = surface(fresh_coordinate_witness(&p.combo), "witness", &mut checks)? else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.push(Check::at_most("sphere", (w.norm - 1.0).abs(), 1e-12).with_detail(format!("norm {}", w.norm)));
    checks.push(Check::at_least("certificate", w.certificate, 1.0 - 1e-12));
    for (i, (m, pm)) in w.slice_margins.iter().zip(&w.plus_minus_norms).enumerate() {
        checks.push(Check::new("slice", *m > 0.0).with_index(i).with_value(*m));
        let dev = (pm[0] - 1.0).abs().max((pm[1] - 1.0).abs());
        checks.push(Check::at_most("plus-minus", dev, 1e-12).with_index(i));
    }
    Ok(Outcome::new(w, checks))
}

fn run_l1_witness(p: &L1Payload) -> Result<Outcome> {
    let mut checks = Vec::new();
    let Some(w) = surface(
        l1_disjoint_witness(&p.weights, &p.g, &p.epsilon, &p.lambda),
        "cells",
        &mut checks,
    )?
    else {
        return Ok(Outcome::new(Value::Null, checks));
    };
    checks.push(Check::at_most("combined-norm", (w.combined_norm - 1.0).abs(), 1e-12));
    for (i, (norm, m)) in w.norms.iter().zip(&w.slice_margins).enumerate() {
        checks.push(Check::at_most("norm", (norm - 1.0).abs(), 1e-12).with_index(i));
        checks.push(Check::new("slice", *m > 0.0).with_index(i).with_value(*m));
    }
    Ok(Outcome::new(w, checks))
}

fn run_lemma(p: &LemmaPayload, seed: u64) -> Result<Outcome> {
    match (p.alpha, p.beta, p.mu, p.samples) {
        (Some(alpha), Some(beta), Some(mu), None) => {
            let inst = ChordInstance::new(alpha, beta, mu)?;
            let r = chord_identity_check(&inst);
            let checks = vec![
                Check::at_most("identity", r.identity_residual, LEMMA_TOL),
                Check::at_most("bound", r.modulus, r.bound + LEMMA_TOL),
            ];
            Ok(Outcome::new(r, checks))
        }
        (None, None, None, Some(samples)) => {
            let r = lemma_sweep(samples, seed);
            let checks = vec![
                Check::at_most("identity", r.max_identity_residual, LEMMA_TOL),
                Check::at_most("bound", r.max_bound_excess.max(0.0), LEMMA_TOL)
                    .with_detail(format!("{} failing samples", r.failures)),
            ];
            Ok(Outcome::new(r, checks))
        }
        _ => Err(Error::invalid(
            "lemma payload needs either alpha, beta and mu, or samples",
        )),
    }
}

fn run_campaign_job(config: &CampaignConfig, seed: u64) -> Result<Outcome> {
    let summary = run_campaign(config, seed)?;
    let mut checks: Vec<Check> = summary
        .failures
        .iter()
        .map(|f| {
            Check::new("instance", false)
                .with_index(f.index)
                .with_detail(format!("seed {}: {}", f.seed, f.detail.join("; ")))
        })
        .collect();
    if let Some(rate) = summary.pass_rate {
        checks.insert(0, Check::at_least("pass-rate", rate, 1.0));
    }
    let mut out = Outcome::new(&summary, checks);
    out.seed = Some(summary.seed);
    Ok(out)
}

/// A decompose scenario drawn by [`generate_decompose_instance`].
pub fn generate_instance(seed: u64, ranges: &GeneratorRanges) -> Result<Scenario> {
    Ok(Scenario {
        job: Job::Decompose(generate_decompose_instance(seed, ranges)?),
        seed: Some(seed),
    })
}
