//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slice_lab::campaign::{
    derive_seed, generate_decompose_instance, instance_ranges, run_campaign, tamper_case,
    CampaignConfig, GeneratorRanges, ModelChoice, TamperKind,
};
use slice_lab::circle::{chord_point, ChordInstance};
use slice_lab::decomposition::{
    compute_params, decompose, sample_in_neighborhood, weak_neighborhood, CoordCase,
};
use slice_lab::diameter::{
    combo_diameter_linf, coord_extremum, lp_sum_combo_sup, opposite_slice_combo_sup,
    slice_diameter_linf, SlicePolytope, Sense,
};
use slice_lab::model::{
    combo_point, slice_membership, ConvexCombo, Coord, Field, Functional, Point, Scalar, Slice,
    SpaceModel, Term,
};
use slice_lab::sphere::{fresh_coordinate_witness, l1_disjoint_witness, WeightedMeasureSpace};

const CAMPAIGN_SEED: u64 = 20_240_601;

type Outcome = (bool, String);

fn campaign_config() -> CampaignConfig {
    CampaignConfig {
        instances: 1000,
        samples_per_instance: 10,
        ..CampaignConfig::default()
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut worst_identity, mut worst_bound) = (0.0f64, f64::NEG_INFINITY);
    let mut failures = 0usize;
    for _ in 0..1_000_000 {
        let alpha = rng.random_range(-PI..PI);
        let beta = rng.random_range(-PI..PI);
        let mu = loop {
            let mu = 0.5 * rng.random::<f64>();
            if mu > 0.0 {
                break mu;
            }
        };
        let c = chord_point(&ChordInstance::new(alpha, beta, mu).unwrap());
        let d_sq = (Scalar::cis(alpha) - Scalar::cis(beta)).norm_sqr();
        let identity = (c.norm_sqr() - (1.0 - d_sq * mu * (1.0 - mu))).abs();
        let excess = c.norm() - (1.0 - d_sq * mu / 4.0);
        if identity > 1e-12 || excess > 1e-12 {
            failures += 1;
        }
        worst_identity = worst_identity.max(identity);
        worst_bound = worst_bound.max(excess);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        failures == 0 && secs < 5.0,
        format!(
            "10^6 samples, max identity residual {worst_identity:.2e}, max bound excess {worst_bound:.2e}, {failures} failures, {secs:.2} s (limit 5 s)"
        ),
    )
}

/// Checks postconditions (a)-(d) directly from coordinates.
fn postconditions(
    combo: &ConvexCombo,
    witnesses: &[Point],
    y: &Point,
    zbars: &[Point],
) -> Result<(), String> {
    let space = combo.space();
    let lambdas: Vec<f64> = combo.lambdas().collect();
    let mut coords: BTreeSet<Coord> = y.coords().keys().map(|&t| Coord::Index(t)).collect();
    for z in zbars.iter().chain(witnesses) {
        coords.extend(z.coords().keys().map(|&t| Coord::Index(t)));
    }
    if space.is_c_omega() {
        coords.insert(Coord::Omega);
    }
    let mut support: BTreeSet<Coord> = BTreeSet::new();
    for term in combo.terms() {
        let f = term.slice.functional();
        support.extend(f.coords().keys().map(|&t| Coord::Index(t)));
    }
    if space.is_c_omega() {
        support.insert(Coord::Omega);
    }

    let margin = |f: &Functional, eps: f64, z: &Point| {
        let mut v = Scalar::new(0.0, 0.0);
        for (&t, &w) in f.coords() {
            v += w * z.value(Coord::Index(t));
        }
        if let Some(w) = f.omega_atom() {
            v += w * z.value(Coord::Omega);
        }
        v.re - (1.0 - eps)
    };
    let d = combo
        .terms()
        .iter()
        .zip(witnesses)
        .map(|(t, z)| margin(t.slice.functional(), t.slice.epsilon(), z))
        .fold(f64::INFINITY, f64::min);
    let eta = 0.99 * (d / 3.0).min(1.0);

    let residual = coords
        .iter()
        .map(|&t| {
            let s: Scalar = lambdas.iter().zip(zbars).map(|(l, z)| z.value(t) * *l).sum();
            (s - y.value(t)).norm()
        })
        .fold(0.0, f64::max);
    if residual > 1e-9 {
        return Err(format!("(a) reconstruction residual {residual:e}"));
    }
    for (i, (term, (z, zbar))) in combo.terms().iter().zip(witnesses.iter().zip(zbars)).enumerate() {
        let norm = coords.iter().map(|&t| zbar.value(t).norm()).fold(0.0, f64::max);
        if norm > 1.0 + 1e-12 {
            return Err(format!("(b) ‖z̄{i}‖ = {norm}"));
        }
        let m = margin(term.slice.functional(), term.slice.epsilon(), zbar);
        if !(m > 0.0 && m >= d - 3.0 * eta - 1e-9) {
            return Err(format!("(c) slice margin {m} with d = {d}, η = {eta}"));
        }
        let drift = support
            .iter()
            .map(|&t| (zbar.value(t) - z.value(t)).norm())
            .fold(0.0, f64::max);
        if drift > eta {
            return Err(format!("(d) drift {drift} > η = {eta}"));
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let config = campaign_config();
    let start = Instant::now();
    let summary = run_campaign(&config, CAMPAIGN_SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();

    // independent re-check of every decomposition
    let mut independent_failures = Vec::new();
    for i in 0..config.instances {
        let seed = derive_seed(CAMPAIGN_SEED, i as u64);
        let inst = generate_decompose_instance(seed, &instance_ranges(&config, i)).unwrap();
        let params = compute_params(&inst.combo, &inst.witnesses).unwrap();
        let x = combo_point(&inst.combo, &inst.witnesses).unwrap();
        let u = weak_neighborhood(&x, &params);
        for j in 0..config.samples_per_instance {
            let y = sample_in_neighborhood(&u, derive_seed(seed, j as u64));
            let result = decompose(&inst.combo, &inst.witnesses, &params, &y)
                .map_err(|e| e.to_string())
                .and_then(|zbars| postconditions(&inst.combo, &inst.witnesses, &y, &zbars));
            if let Err(e) = result {
                independent_failures.push(format!("instance {i} (seed {seed}) sample {j}: {e}"));
            }
        }
    }
    let rate = summary.pass_rate.unwrap_or(0.0);
    let passed = rate == 1.0
        && summary.decompositions == 10_000
        && independent_failures.is_empty()
        && secs < 60.0;
    let worst = summary.worst.as_ref().unwrap();
    let mut detail = format!(
        "{} instances x {} points, pass rate {rate}, independent failures {}, worst slice margin {:.3e}, worst ball margin {:.1e}, max residual {:.1e}, max drift/η {:.3}, {secs:.1} s (limit 60 s)",
        summary.instances,
        summary.samples_per_instance,
        independent_failures.len(),
        worst.min_slice_margin,
        worst.min_ball_margin,
        worst.max_reconstruction_residual,
        worst.max_drift_ratio,
    );
    if let Some(first) = summary.failures.first() {
        detail.push_str(&format!("; first failure seed {}: {:?}", first.seed, first.detail));
    }
    if let Some(first) = independent_failures.first() {
        detail.push_str(&format!("; {first}"));
    }
    (passed, detail)
}

fn criterion_3() -> Outcome {
    let config = campaign_config();
    let mut instances = 0usize;
    let mut coords = 0usize;
    let mut worst_sum = 0.0f64;
    let mut worst_chain = f64::NEG_INFINITY;
    for i in 0..config.instances {
        let seed = derive_seed(CAMPAIGN_SEED, i as u64);
        let inst = generate_decompose_instance(seed, &instance_ranges(&config, i)).unwrap();
        let params = compute_params(&inst.combo, &inst.witnesses).unwrap();
        let lambdas: Vec<f64> = inst.combo.lambdas().collect();
        let mut any = false;
        for (&t, case) in &params.cases {
            let CoordCase::Three(plan) = case else { continue };
            any = true;
            coords += 1;
            let (gap, rho) = (params.min_gap_sq.unwrap(), params.rho.unwrap());
            let sum: Scalar = plan.shifts.iter().sum();
            worst_sum = worst_sum.max(sum.norm());
            for (p, group) in plan.groups.iter().enumerate() {
                let weight: f64 = group.iter().map(|&i| lambdas[i]).sum();
                for &i in group {
                    let shifted = inst.witnesses[i].value(t) + plan.shifts[p] / weight;
                    let excess = shifted.norm() - (1.0 - gap * rho / (4.0 * weight));
                    worst_chain = worst_chain.max(excess);
                }
            }
        }
        instances += usize::from(any);
    }
    (
        instances >= 100 && worst_sum <= 1e-12 && worst_chain <= 1e-12,
        format!(
            "{instances} instances with Case III ({coords} coordinates, need >= 100 instances), max |Σ c_p| {worst_sum:.1e}, max modulus-chain excess {worst_chain:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let random_weights = |rng: &mut ChaCha8Rng, n: usize| loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.25 { 0.0 } else { rng.random_range(-1.0..1.0) })
            .collect();
        let total: f64 = w.iter().map(|x| x.abs()).sum();
        if total > 1e-3 {
            break w.iter().map(|x| x / total).collect::<Vec<f64>>();
        }
    };
    while instances < 500 {
        let n = rng.random_range(1..=4);
        let k = rng.random_range(1..=3);
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut terms = Vec::new();
        let mut oracle_terms = Vec::new();
        for r in &raw {
            let w = random_weights(&mut rng, n);
            let eps = rng.random_range(0.01..2.2);
            let p = SlicePolytope::from_weights(w.clone(), eps).unwrap();
            for j in 0..n {
                for (sense, max) in [(Sense::Max, true), (Sense::Min, false)] {
                    let got = coord_extremum(&p, j, sense).unwrap();
                    worst = worst.max((got - common::vertex_extremum(&w, eps, j, max)).abs());
                }
            }
            let space = SpaceModel::finite(n, Field::Real);
            let f = Functional::from_real(space, &w).unwrap();
            terms.push(Term { lambda: r / total, slice: Slice::new(f, eps).unwrap() });
            oracle_terms.push((r / total, w, eps));
        }
        let Ok(combo) = ConvexCombo::new(terms) else { continue };
        let got = combo_diameter_linf(&combo).unwrap().value;
        worst = worst.max((got - common::minkowski_diameter(&oracle_terms)).abs());
        instances += 1;
    }

    let d02 = slice_diameter_linf(&SlicePolytope::from_weights(vec![0.5, 0.5], 0.1).unwrap())
        .unwrap()
        .value;
    let d2 = slice_diameter_linf(&SlicePolytope::from_weights(vec![1.0, 0.0], 0.1).unwrap())
        .unwrap()
        .value;
    (
        worst <= 1e-9 && d02 == 0.2 && d2 == 2.0,
        format!("{instances} instances, max deviation from vertex enumeration {worst:.1e}; values {d02:?} and {d2:?} (expected 0.2 and 2 exactly)"),
    )
}

fn criterion_5() -> Outcome {
    let r = opposite_slice_combo_sup(&[1.0, 0.0], 0.1, 20_000, 5).unwrap();
    let root = 0.19f64.sqrt();
    let bound_ok = (r.certified_upper_bound - 2.0 * root).abs() <= 1e-9;
    let sup_ok = r.sup_estimate >= root - 1e-3 && r.sup_estimate <= root + 1e-9;
    let s = lp_sum_combo_sup(2.0, 0.5, [0.1, 0.1], 20_000, 5).unwrap();
    let lp_ok = (s.sup_estimate - 0.944624).abs() <= 1e-3 && s.beta_estimate >= 0.054;
    (
        bound_ok && sup_ok && lp_ok && r.sup_estimate <= r.certified_upper_bound,
        format!(
            "opposite caps: bound {:.10} (2√0.19 = {:.10}), sup {:.10} (√0.19 = {root:.10}); ℓ₂ sum: sup {:.7} (target 0.944624 ± 1e-3), β {:.7}",
            r.certified_upper_bound,
            2.0 * root,
            r.sup_estimate,
            s.sup_estimate,
            s.beta_estimate
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_norm = 0.0f64;
    let mut non_members = 0usize;
    for _ in 0..200 {
        let field = if rng.random::<bool>() { Field::Real } else { Field::Complex };
        let space = SpaceModel::c0(field);
        let k = rng.random_range(1..=5);
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut terms = Vec::new();
        let mut acc = 0.0;
        for (i, r) in raw.iter().enumerate() {
            let size = rng.random_range(1..=4);
            let coords: Vec<(usize, Scalar)> = (0..size)
                .map(|_| {
                    let v = match field {
                        Field::Real => Scalar::new(rng.random_range(-1.0..1.0), 0.0),
                        Field::Complex => Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    };
                    (rng.random_range(0..8), v)
                })
                .collect();
            let coords: std::collections::BTreeMap<usize, Scalar> = coords.into_iter().collect();
            let norm: f64 = coords.values().map(|v| v.norm()).sum();
            let coords = coords.into_iter().map(|(t, v)| (t, v / norm)).collect();
            let f = Functional::new(space, coords, None).unwrap();
            let lambda = if i + 1 == k { 1.0 - acc } else { r / total };
            acc += lambda;
            terms.push(Term { lambda, slice: Slice::new(f, rng.random_range(0.01..1.0)).unwrap() });
        }
        let combo = ConvexCombo::new(terms).unwrap();
        let w = fresh_coordinate_witness(&combo).unwrap();
        let max_abs = w
            .point
            .coords()
            .values()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        worst_norm = worst_norm.max((max_abs - 1.0).abs());
        let e_m = Point::from_scalars(space, &{
            let mut v = vec![Scalar::new(0.0, 0.0); w.fresh_index + 1];
            v[w.fresh_index] = Scalar::new(1.0, 0.0);
            v
        }, None)
        .unwrap();
        for (term, x) in combo.terms().iter().zip(&w.slice_points) {
            let shifted = Point::linear_combination(space, &[(1.0, x), (1.0, &e_m)]).unwrap();
            if !slice_membership(&term.slice, &shifted).unwrap().member {
                non_members += 1;
            }
        }
    }

    let mut worst_l1 = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let k = rng.random_range(1..=n.min(4));
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let space = WeightedMeasureSpace::new(weights.clone()).unwrap();
        let g: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-0.6..0.6)).collect();
                for c in rand::seq::index::sample(&mut rng, n, k) {
                    v[c] = if rng.random::<bool>() { 1.0 } else { -0.97 };
                }
                v
            })
            .collect();
        let lraw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let ltotal: f64 = lraw.iter().sum();
        let mut lambda: Vec<f64> = lraw.iter().map(|l| l / ltotal).collect();
        let head: f64 = lambda[..k - 1].iter().sum();
        lambda[k - 1] = 1.0 - head;
        let w = l1_disjoint_witness(&space, &g, &vec![0.1; k], &lambda).unwrap();
        let norm: f64 = weights.iter().zip(&w.combined).map(|(m, v)| m * v.abs()).sum();
        worst_l1 = worst_l1.max((norm - 1.0).abs());
    }
    (
        worst_norm <= 1e-12 && non_members == 0 && worst_l1 <= 1e-12,
        format!(
            "200 c0 combos: max |‖witness‖ − 1| {worst_norm:.1e}, {non_members} shifted points outside their slice; 200 ℓ₁ witnesses: max |‖Σλᵢfᵢ‖₁ − 1| {worst_l1:.1e}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let ranges = GeneratorRanges {
        models: vec![ModelChoice::C0, ModelChoice::COmega],
        ..GeneratorRanges::default()
    };
    let mut detected = 0usize;
    let mut by_kind = [0usize; 2];
    let mut misses = Vec::new();
    for i in 0..100u64 {
        let seed = derive_seed(7, i);
        let inst = generate_decompose_instance(seed, &ranges).unwrap();
        let params = compute_params(&inst.combo, &inst.witnesses).unwrap();
        let kind = if i % 2 == 0 { TamperKind::Scale } else { TamperKind::ReplaceFunctional };
        match tamper_case(&inst, &params, kind, derive_seed(seed, 1)) {
            Ok(case) if case.detected => {
                detected += 1;
                by_kind[(i % 2) as usize] += 1;
            }
            Ok(case) => misses.push(format!("seed {seed}: {kind:?} not flagged by {}", case.expected_check)),
            Err(e) => misses.push(format!("seed {seed}: {e}")),
        }
    }
    (
        detected == 100,
        format!(
            "{detected}/100 tampered decompositions flagged by the expected check (scale → ball: {}, replaced functional → slice: {}){}",
            by_kind[0],
            by_kind[1],
            misses.first().map(|m| format!("; {m}")).unwrap_or_default()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("lemma suite", criterion_1),
        ("decomposition soundness", criterion_2),
        ("Case III exercise", criterion_3),
        ("diameter oracle equivalence", criterion_4),
        ("strict-shrinkage experiments", criterion_5),
        ("sphere-witness suite", criterion_6),
        ("negative path", criterion_7),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| (false, "panicked".to_string()));
        println!(
            "[{}] criterion {}: {name}: {detail}",
            if passed { "PASS" } else { "FAIL" },
            n + 1
        );
        failed += usize::from(!passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
