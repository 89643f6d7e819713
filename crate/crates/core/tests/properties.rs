use std::collections::BTreeMap;

use proptest::prelude::*;
use slice_lab::campaign::{generate_decompose_instance, GeneratorRanges};
use slice_lab::decomposition::{
    compute_params, decompose, sample_in_neighborhood, verify_decomposition, weak_neighborhood,
};
use slice_lab::diameter::{
    combo_diameter_linf, euclidean_slice_diameter, opposite_slice_combo_sup, slice_diameter_linf,
    SlicePolytope,
};
use slice_lab::model::{
    combo_point, pairing, random_slice_point, slice_membership, ConvexCombo, Field, Functional,
    Point, Scalar, Slice, SpaceModel, Term,
};
use slice_lab::sphere::{l1_disjoint_witness, WeightedMeasureSpace};

fn complex4() -> SpaceModel {
    SpaceModel::finite(4, Field::Complex)
}

fn scalars(len: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Scalar::new(a, b)).collect())
}

fn ball_point(space: SpaceModel, len: usize) -> impl Strategy<Value = Point> {
    scalars(len).prop_map(move |v| {
        let clamped: Vec<Scalar> = v.into_iter().map(|z| if z.norm() > 1.0 { z / z.norm() } else { z }).collect();
        Point::from_scalars(space, &clamped, None).unwrap()
    })
}

/// Norm-one functional, possibly with zero weights.
fn unit_functional(space: SpaceModel, len: usize) -> impl Strategy<Value = Functional> {
    (scalars(len), prop::collection::vec(any::<bool>(), len)).prop_filter_map(
        "all weights zero",
        move |(v, keep)| {
            let v: Vec<Scalar> = v
                .into_iter()
                .zip(keep)
                .map(|(z, k)| if k { z } else { Scalar::new(0.0, 0.0) })
                .collect();
            let total: f64 = v.iter().map(|z| z.norm()).sum();
            (total > 1e-3).then(|| {
                let coords: BTreeMap<usize, Scalar> =
                    v.iter().enumerate().filter(|(_, z)| z.norm() > 0.0).map(|(t, z)| (t, z / total)).collect();
                Functional::new(space, coords, None).unwrap()
            })
        },
    )
}

fn real_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], n).prop_filter_map("zero", |w| {
        let total: f64 = w.iter().map(|x| x.abs()).sum();
        (total > 1e-3).then(|| w.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #[test]
    fn pairing_is_linear(
        f in unit_functional(complex4(), 4),
        z1 in ball_point(complex4(), 4),
        z2 in ball_point(complex4(), 4),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let combined = Point::linear_combination(complex4(), &[(a, &z1), (b, &z2)]).unwrap();
        let lhs = pairing(&f, &combined).unwrap();
        let rhs = pairing(&f, &z1).unwrap() * a + pairing(&f, &z2).unwrap() * b;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn holder_inequality(f in unit_functional(complex4(), 4), z in ball_point(complex4(), 4)) {
        let v = pairing(&f, &z).unwrap().norm();
        prop_assert!(v <= f.l1_norm() * z.sup_norm() + 1e-12);
    }

    #[test]
    fn combinations_stay_in_ball(
        f1 in unit_functional(complex4(), 4),
        f2 in unit_functional(complex4(), 4),
        lambda in 0.05f64..0.95,
        eps in 0.05f64..1.5,
        seed in any::<u64>(),
    ) {
        let combo = ConvexCombo::new(vec![
            Term { lambda, slice: Slice::new(f1, eps).unwrap() },
            Term { lambda: 1.0 - lambda, slice: Slice::new(f2, eps).unwrap() },
        ]).unwrap();
        let zs: Vec<Point> = combo.terms().iter().enumerate()
            .map(|(i, t)| random_slice_point(&t.slice, seed.wrapping_add(i as u64)))
            .collect();
        let x = combo_point(&combo, &zs).unwrap();
        prop_assert!(x.sup_norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn single_slice_diameter_consistency(w in real_weights(3), eps in 0.01f64..2.5) {
        let space = SpaceModel::finite(3, Field::Real);
        let f = Functional::from_real(space, &w).unwrap();
        let slice = Slice::new(f.clone(), eps).unwrap();
        let d1 = combo_diameter_linf(&ConvexCombo::single(slice)).unwrap();
        let d2 = slice_diameter_linf(&SlicePolytope::new(&f, eps).unwrap()).unwrap();
        prop_assert_eq!(d1.value, d2.value);
        prop_assert!((0.0..=2.0).contains(&d1.value));
    }

    #[test]
    fn diameter_is_monotone_in_epsilon(
        w1 in real_weights(4),
        w2 in real_weights(4),
        lambda in 0.05f64..0.95,
        e1 in 0.01f64..2.0,
        e2 in 0.01f64..2.0,
        grow in 0.0f64..1.0,
    ) {
        let space = SpaceModel::finite(4, Field::Real);
        let combo = |a: f64, b: f64| ConvexCombo::new(vec![
            Term { lambda, slice: Slice::new(Functional::from_real(space, &w1).unwrap(), a).unwrap() },
            Term { lambda: 1.0 - lambda, slice: Slice::new(Functional::from_real(space, &w2).unwrap(), b).unwrap() },
        ]).unwrap();
        let small = combo_diameter_linf(&combo(e1, e2)).unwrap().value;
        let large = combo_diameter_linf(&combo(e1 + grow, e2)).unwrap().value;
        prop_assert!(large >= small - 1e-15);
    }

    #[test]
    fn free_coordinate_gives_diameter_two(
        ws in prop::collection::vec(real_weights(3), 1..5),
        eps in prop::collection::vec(0.01f64..1.0, 5),
        raw in prop::collection::vec(0.1f64..1.0, 5),
    ) {
        // coordinate 3 carries no weight in any slice
        let space = SpaceModel::finite(4, Field::Real);
        let k = ws.len();
        let total: f64 = raw[..k].iter().sum();
        let mut terms = Vec::new();
        let mut acc = 0.0;
        for (i, w) in ws.iter().enumerate() {
            let lambda = if i + 1 == k { 1.0 - acc } else { raw[i] / total };
            acc += lambda;
            let mut w4 = w.clone();
            w4.push(0.0);
            terms.push(Term { lambda, slice: Slice::new(Functional::from_real(space, &w4).unwrap(), eps[i]).unwrap() });
        }
        let d = combo_diameter_linf(&ConvexCombo::new(terms).unwrap()).unwrap();
        prop_assert_eq!(d.value, 2.0);
    }

    #[test]
    fn euclidean_slices_never_reach_two(eps in 1e-6f64..0.999_999) {
        prop_assert!(euclidean_slice_diameter(eps).unwrap() < 2.0);
    }

    #[test]
    fn decomposition_survives_smaller_delta(seed in 0u64..5000, factor in 0.01f64..1.0, ys in any::<u64>()) {
        let inst = generate_decompose_instance(seed, &GeneratorRanges::default()).unwrap();
        let params = compute_params(&inst.combo, &inst.witnesses).unwrap().with_delta_scaled(factor).unwrap();
        let x = combo_point(&inst.combo, &inst.witnesses).unwrap();
        let y = sample_in_neighborhood(&weak_neighborhood(&x, &params), ys);
        let zbars = decompose(&inst.combo, &inst.witnesses, &params, &y).unwrap();
        let report = verify_decomposition(&inst.combo, &inst.witnesses, &y, &zbars);
        prop_assert!(report.passed, "{:?}", report.failed().collect::<Vec<_>>());
    }

    #[test]
    fn disjoint_cells_have_unit_norm(
        raw in prop::collection::vec(0.1f64..1.0, 3..10),
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let n = raw.len();
        prop_assume!(k <= n);
        let total: f64 = raw.iter().sum();
        let space = WeightedMeasureSpace::new(raw.iter().map(|w| w / total).collect()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // every density is near 1 in modulus on k random cells
        let g: Vec<Vec<f64>> = (0..k).map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
            for c in rand::seq::index::sample(&mut rng, n, k) {
                v[c] = if rng.random::<bool>() { 0.99 } else { -1.0 };
            }
            v
        }).collect();
        let lambda = vec![1.0 / k as f64; k];
        let w = l1_disjoint_witness(&space, &g, &vec![0.05; k], &lambda).unwrap();
        prop_assert!((w.combined_norm - 1.0).abs() < 1e-12);
        prop_assert!(w.slice_margins.iter().all(|m| *m > 0.0));
    }

    #[test]
    fn opposite_caps_stay_below_certificate(eps in 0.01f64..0.13, seed in any::<u64>()) {
        let r = opposite_slice_combo_sup(&[0.3, -1.0, 0.5], eps, 200, seed).unwrap();
        prop_assert!(r.sup_estimate >= 0.0);
        prop_assert!(r.sup_estimate <= r.certified_upper_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn random_slice_points_are_members(
        f in unit_functional(complex4(), 4),
        eps in 1e-3f64..2.0,
        seed in any::<u64>(),
    ) {
        let slice = Slice::new(f, eps).unwrap();
        let z = random_slice_point(&slice, seed);
        let m = slice_membership(&slice, &z).unwrap();
        prop_assert!(m.member, "{m:?}");
    }
}
