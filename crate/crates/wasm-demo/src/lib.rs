//! Browser bindings for three slice-lab experiments. Every export returns a
//! JSON string; failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use slice_lab::circle::{chord_identity_check, ChordInstance};
use slice_lab::decomposition::{
    compute_params, decompose, sample_in_neighborhood, weak_neighborhood, CoordCase,
};
use slice_lab::diameter::lp_sum_combo_sup;
use slice_lab::model::{
    combo_point, ConvexCombo, Coord, Field, Functional, Point, Scalar, Slice, SpaceModel, Term,
};
use wasm_bindgen::prelude::*;

fn pair(z: Scalar) -> [f64; 2] {
    [z.re, z.im]
}

fn to_json(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Chord point `μ e^{iα} + (1 − μ) e^{iβ}` with its modulus and bound.
pub fn chord_json(alpha: f64, beta: f64, mu: f64) -> Result<Value, String> {
    let inst = ChordInstance::new(alpha, beta, mu).map_err(|e| e.to_string())?;
    serde_json::to_value(chord_identity_check(&inst)).map_err(|e| e.to_string())
}

/// Decomposition in the one-dimensional complex space with `f = e₀*`:
/// witnesses sit on the unit circle at `thetas`, all with equal weight. A
/// non-finite `y` is replaced by a random member of the neighborhood.
pub fn disk_json(thetas: &[f64], epsilon: f64, y: [f64; 2], seed: u64) -> Result<Value, String> {
    let err = |e: slice_lab::Error| e.to_string();
    if thetas.is_empty() || thetas.len() > 6 {
        return Err("choose between 1 and 6 witnesses".into());
    }
    let space = SpaceModel::finite(1, Field::Complex);
    let f = Functional::new(space, BTreeMap::from([(0, Scalar::new(1.0, 0.0))]), None).map_err(err)?;
    let k = thetas.len();
    let terms = (0..k)
        .map(|_| Ok(Term { lambda: 1.0 / k as f64, slice: Slice::new(f.clone(), epsilon)? }))
        .collect::<slice_lab::Result<Vec<_>>>()
        .map_err(err)?;
    let combo = ConvexCombo::new(terms).map_err(err)?;
    let witnesses = thetas
        .iter()
        .map(|&t| Point::from_scalars(space, &[Scalar::from_polar(1.0, t)], None))
        .collect::<slice_lab::Result<Vec<_>>>()
        .map_err(err)?;
    let params = compute_params(&combo, &witnesses).map_err(err)?;
    let x = combo_point(&combo, &witnesses).map_err(err)?;
    let u = weak_neighborhood(&x, &params);
    let y = if y.iter().all(|v| v.is_finite()) {
        Point::from_scalars(space, &[Scalar::new(y[0], y[1])], None).map_err(err)?
    } else {
        sample_in_neighborhood(&u, seed)
    };
    let at = |p: &Point| pair(p.value(Coord::Index(0)));
    let membership = u.membership(&y).map_err(err)?;

    let case = params.cases.get(&Coord::Index(0));
    // Case III: each group of witnesses is pushed into the disk of radius
    // 1 − Dρ/(4Λ_p) around −c_p/Λ_p.
    let disks: Vec<Value> = match case {
        Some(CoordCase::Three(plan)) => plan
            .shifts
            .iter()
            .zip(&plan.group_weights)
            .map(|(c, w)| {
                let r = 1.0 - params.min_gap_sq.unwrap_or(0.0) * params.rho.unwrap_or(0.0) / (4.0 * w);
                json!({ "center": pair(-c / *w), "radius": r })
            })
            .collect(),
        _ => Vec::new(),
    };
    let zbars = if membership.member {
        let z = decompose(&combo, &witnesses, &params, &y).map_err(err)?;
        Some(z.iter().map(at).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(json!({
        "witnesses": witnesses.iter().map(at).collect::<Vec<_>>(),
        "x": at(&x),
        "y": at(&y),
        "delta": params.delta,
        "eta": params.eta,
        "slack": params.slack,
        "case": case.map(|c| format!("{:?}", c.tag())),
        "member": membership.member,
        "offset": membership.max_offset,
        "disks": disks,
        "zbars": zbars,
    }))
}

/// `ℓ_p` shrinkage for `λ S(e₀*, ε) + (1 − λ) S(e₁*, ε)` plus the curve of
/// sup estimates over `λ ∈ [0, 1]`.
pub fn shrinkage_json(p: f64, lambda: f64, eps: f64, samples: usize, seed: u64) -> Result<Value, String> {
    let err = |e: slice_lab::Error| e.to_string();
    if samples == 0 || samples > 200_000 {
        return Err("samples must lie in 1..=200000".into());
    }
    let r = lp_sum_combo_sup(p, lambda, [eps, eps], samples, seed).map_err(err)?;
    let steps = 40;
    let curve = (0..=steps)
        .map(|i| {
            let l = i as f64 / steps as f64;
            lp_sum_combo_sup(p, l, [eps, eps], (samples / 10).max(200), seed).map(|c| [l, c.sup_estimate])
        })
        .collect::<slice_lab::Result<Vec<_>>>()
        .map_err(err)?;
    let mut v = serde_json::to_value(&r).map_err(|e| e.to_string())?;
    v["curve"] = json!(curve);
    Ok(v)
}

#[wasm_bindgen]
pub fn chord(alpha: f64, beta: f64, mu: f64) -> String {
    to_json(chord_json(alpha, beta, mu))
}

#[wasm_bindgen]
pub fn decompose_disk(thetas: Vec<f64>, epsilon: f64, y_re: f64, y_im: f64, seed: u32) -> String {
    to_json(disk_json(&thetas, epsilon, [y_re, y_im], seed as u64))
}

#[wasm_bindgen]
pub fn shrinkage(p: f64, lambda: f64, eps: f64, samples: u32, seed: u32) -> String {
    to_json(shrinkage_json(p, lambda, eps, samples as usize, seed as u64))
}
