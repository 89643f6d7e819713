#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Vertices of `{‖z‖∞ ≤ 1, ⟨w, z⟩ ≥ 1 − ε}`: every choice of `n` tight
/// constraints among the `2n + 1` facets, solved and kept when feasible.
pub fn slice_vertices(w: &[f64], eps: f64) -> Vec<Vec<f64>> {
    let n = w.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * n + 1);
    for t in 0..n {
        let mut e = vec![0.0; n];
        e[t] = 1.0;
        rows.push((e.clone(), 1.0));
        e[t] = -1.0;
        rows.push((e, 1.0));
    }
    rows.push((w.iter().map(|x| -x).collect(), -(1.0 - eps)));

    let m = rows.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let a = DMatrix::from_fn(n, n, |r, c| rows[chosen[r]].0[c]);
        let b = DVector::from_fn(n, |r, _| rows[chosen[r]].1);
        let Some(z) = a.lu().solve(&b) else { continue };
        if z.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let feasible = rows
            .iter()
            .all(|(a, b)| a.iter().zip(z.iter()).map(|(x, y)| x * y).sum::<f64>() <= b + 1e-9);
        if feasible {
            out.push(z.iter().copied().collect());
        }
    }
    out
}

pub fn vertex_extremum(w: &[f64], eps: f64, j: usize, max: bool) -> f64 {
    let vs = slice_vertices(w, eps);
    assert!(!vs.is_empty(), "infeasible polytope {w:?}, ε = {eps}");
    let it = vs.iter().map(|v| v[j]);
    if max {
        it.fold(f64::NEG_INFINITY, f64::max)
    } else {
        it.fold(f64::INFINITY, f64::min)
    }
}

/// Sup-norm diameter of `Σ λᵢ Pᵢ` from all sums of vertices (the Minkowski
/// sum is the convex hull of those sums).
pub fn minkowski_diameter(terms: &[(f64, Vec<f64>, f64)]) -> f64 {
    let n = terms[0].1.len();
    let mut points: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for (lambda, w, eps) in terms {
        let vs = slice_vertices(w, *eps);
        let mut next = Vec::with_capacity(points.len() * vs.len());
        for p in &points {
            for v in &vs {
                next.push(p.iter().zip(v).map(|(a, b)| a + lambda * b).collect());
            }
        }
        points = next;
    }
    (0..n)
        .map(|j| {
            let hi = points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            let lo = points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Dense grid over the boundary arcs of the two caps of `ℝ ⊕_p ℝ`
/// (`z₀ ≥ 1 − ε₁` and `z₁ ≥ 1 − ε₂`), maximizing `‖λu + (1 − λ)v‖_p`.
pub fn lp_grid_sup(p: f64, lambda: f64, eps: [f64; 2], grid: usize) -> f64 {
    let arc = |e: f64| -> Vec<(f64, f64)> {
        let lo = (1.0 - e).max(-1.0);
        (0..=grid)
            .flat_map(|i| {
                let s = lo + (1.0 - lo) * i as f64 / grid as f64;
                let r = (1.0 - s.abs().powf(p)).max(0.0).powf(1.0 / p);
                [(s, r), (s, -r)]
            })
            .collect()
    };
    let a = arc(eps[0]);
    let b: Vec<(f64, f64)> = arc(eps[1]).into_iter().map(|(s, r)| (r, s)).collect();
    let mut best = 0.0f64;
    for u in &a {
        for v in &b {
            let x = lambda * u.0 + (1.0 - lambda) * v.0;
            let y = lambda * u.1 + (1.0 - lambda) * v.1;
            best = best.max((x.abs().powf(p) + y.abs().powf(p)).powf(1.0 / p));
        }
    }
    best
}
