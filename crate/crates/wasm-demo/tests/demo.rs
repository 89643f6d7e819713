use slice_lab_wasm::{chord, chord_json, decompose_disk, disk_json, shrinkage_json};

#[test]
fn chord_respects_bound() {
    let v = chord_json(0.0, std::f64::consts::PI, 0.25).unwrap();
    assert_eq!(v["bound_satisfied"], true);
    assert!((v["modulus"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(chord(0.0, 1.0, 0.8).contains("error"));
}

#[test]
fn disk_decomposition_reconstructs_y() {
    let thetas = [-0.3, 0.0, 0.3];
    for seed in 0..20 {
        let v = disk_json(&thetas, 0.2, [f64::NAN, f64::NAN], seed).unwrap();
        assert_eq!(v["member"], true);
        assert_eq!(v["case"], "CaseIII");
        assert_eq!(v["disks"].as_array().unwrap().len(), 3);
        let zbars = v["zbars"].as_array().unwrap();
        let (mut re, mut im) = (0.0, 0.0);
        for z in zbars {
            let (a, b) = (z[0].as_f64().unwrap(), z[1].as_f64().unwrap());
            assert!(a.hypot(b) <= 1.0 + 1e-12);
            assert!(a > 0.8, "slice margin lost: {a}");
            re += a / 3.0;
            im += b / 3.0;
        }
        assert!((re - v["y"][0].as_f64().unwrap()).abs() < 1e-9);
        assert!((im - v["y"][1].as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn far_point_is_reported_outside() {
    let v = disk_json(&[0.0, 0.2], 0.1, [0.0, 0.0], 0).unwrap();
    assert_eq!(v["member"], false);
    assert!(v["zbars"].is_null());
    assert!(decompose_disk(vec![2.0], 0.1, 0.0, 0.0, 0).contains("error"));
}

#[test]
fn shrinkage_curve_matches_point_estimate() {
    let v = shrinkage_json(2.0, 0.5, 0.1, 5000, 1).unwrap();
    assert!((v["sup_estimate"].as_f64().unwrap() - 0.9446165).abs() < 1e-4);
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 41);
    assert!((curve[0][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(shrinkage_json(1.0, 0.5, 0.1, 100, 1).is_err());
}
