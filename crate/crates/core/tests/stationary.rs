mod common;

use proptest::prelude::*;

use statcurv::frames::{adapted_frame, stationary_frame_at};
use statcurv::harness::{generate, GeneratorRecipe};
use statcurv::linalg::{bilinear, Mat};
use statcurv::metric::{load_spec, metric_at};
use statcurv::stationary::{
    conformal_normalize, flip_matrix, killing_defect, riemannian_counterpart,
    verify_connection_relations, verify_curvature_relations, StationaryStructure,
};
use statcurv::Error;

fn random_lorentzian(entries: &[f64], t: &[f64]) -> Mat {
    // flip of a positive-definite matrix along t is Lorentzian with t timelike
    let a = Mat::from_fn(4, 4, |i, j| entries[i * 4 + j]);
    let pd = a.matmul(&a.transpose());
    let pd = Mat::from_fn(4, 4, |i, j| pd[(i, j)] + if i == j { 0.5 } else { 0.0 });
    flip_matrix(&pd, t)
}

proptest! {
    #[test]
    fn flip_is_an_involution(
        entries in prop::collection::vec(-1.0f64..1.0, 16),
        t in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        prop_assume!(t.iter().map(|x| x * x).sum::<f64>() > 0.1);
        let gl = random_lorentzian(&entries, &t);
        prop_assert!(bilinear(&gl, &t, &t) < 0.0);
        let g = flip_matrix(&gl, &t);
        prop_assert!(statcurv::linalg::jacobi_eigen(&g).values[0] > 0.0);
        prop_assert!((bilinear(&g, &t, &t) + bilinear(&gl, &t, &t)).abs() < 1e-9);
        let back = flip_matrix(&g, &t);
        prop_assert!(back.max_abs_diff(&gl) < 1e-9 * gl.max_abs().max(1.0));
    }
}

#[test]
fn s3_counterpart_is_the_round_metric() {
    let s = common::s3();
    for p in common::random_points(&s.lorentzian().chart, 50, 1) {
        let (st, ct) = (p[0].sin(), p[0].cos());
        let round = Mat::diag(&[1.0, st * st, ct * ct]);
        let symbolic = metric_at(s.riemannian(), &p).unwrap().g;
        let numeric = riemannian_counterpart(&s, &p).unwrap();
        assert!(symbolic.max_abs_diff(&round) < 1e-14);
        assert!(numeric.max_abs_diff(&round) < 1e-14);
    }
}

#[test]
fn generated_fields_are_killing() {
    for seed in 0..100 {
        let s = generate(&GeneratorRecipe::random(seed)).unwrap();
        for p in common::random_points(&s.lorentzian().chart, 3, seed) {
            assert!(killing_defect(&s, &p).unwrap() < 1e-10, "seed {seed}");
        }
    }
    let s = common::s3();
    assert_eq!(killing_defect(&s, &[0.4, 1.0, 2.0]).unwrap(), 0.0);
}

#[test]
fn non_killing_field_is_detected() {
    let spec = load_spec(
        br#"
[chart]
coordinates = ["t", "x", "y"]
intervals = [[0, 1], [0, 1], [0, 1]]
[metric]
g_0_0 = "-1"
g_1_1 = "1"
g_2_2 = "1"
[signature]
type = "lorentzian"
[killing]
T_0 = "exp(x)"
unit = false
"#,
    )
    .unwrap();
    let s = StationaryStructure::from_spec(spec).unwrap();
    let defect = killing_defect(&s, &[0.5, 0.5, 0.5]).unwrap();
    assert!((defect - 0.5f64.exp()).abs() < 1e-12);
}

#[test]
fn spacelike_field_is_rejected() {
    let spec = load_spec(
        br#"
[chart]
coordinates = ["t", "x", "y"]
intervals = [[0, 1], [0, 1], [0, 1]]
[metric]
g_0_0 = "-1"
g_1_1 = "1"
g_2_2 = "1"
[signature]
type = "lorentzian"
[killing]
T_1 = "1"
unit = false
"#,
    )
    .unwrap();
    let s = StationaryStructure::from_spec(spec).unwrap();
    let err = s.at(&[0.5, 0.5, 0.5]).unwrap_err();
    assert!(
        matches!(err, Error::AtPoint { ref source, .. } if matches!(**source, Error::NotTimelike { .. }))
    );
}

#[test]
fn normalization_makes_the_field_unit() {
    for seed in 0..30 {
        let mut recipe = GeneratorRecipe::random(seed);
        recipe.unit = false;
        let raw = generate(&recipe).unwrap();
        let unit = conformal_normalize(&raw).unwrap();
        assert!(unit.unit_flag());
        for p in common::random_points(&raw.lorentzian().chart, 5, seed) {
            assert!((unit.at(&p).unwrap().norm + 1.0).abs() < 1e-12);
            assert!(raw.at(&p).unwrap().norm < 0.0);
        }
    }
}

#[test]
fn connection_relations_hold() {
    let s = common::s3();
    for p in common::random_points(&s.lorentzian().chart, 30, 2) {
        let frame = adapted_frame(&s, &p).unwrap();
        assert!(verify_connection_relations(&s, &frame).unwrap().max() < 1e-9);
    }
    // also for Killing fields that are not unit length
    for seed in 0..40 {
        let mut recipe = GeneratorRecipe::random(seed);
        recipe.unit = seed % 2 == 0;
        let s = generate(&recipe).unwrap();
        for p in common::random_points(&s.lorentzian().chart, 5, seed) {
            let sp = s.at(&p).unwrap();
            let frame = stationary_frame_at(&sp).unwrap();
            let r = sp.connection_residuals(&frame);
            assert!(r.max() < 1e-7, "seed {seed}: {r:?}");
        }
    }
}

#[test]
fn curvature_relations_hold() {
    for seed in 0..40 {
        let mut recipe = GeneratorRecipe::random(seed);
        recipe.unit = seed % 2 == 1;
        let s = generate(&recipe).unwrap();
        for p in common::random_points(&s.lorentzian().chart, 5, seed) {
            let sp = s.at(&p).unwrap();
            let frame = stationary_frame_at(&sp).unwrap();
            let r = sp.curvature_residuals(&frame).unwrap();
            assert!(r.max() < 1e-6, "seed {seed}: {r:?}");
        }
    }
}

#[test]
fn s3_spatial_sectional_values() {
    let s = common::s3();
    for p in common::random_points(&s.lorentzian().chart, 20, 9) {
        let frame = adapted_frame(&s, &p).unwrap();
        assert!(verify_curvature_relations(&s, &frame).unwrap().max() < 1e-8);
        let sp = s.at(&p).unwrap();
        let (rm, rml) = sp.prop_frame_tensors(&frame).unwrap();
        assert!((rml.get(1, 2, 2, 1) - 7.0).abs() < 1e-8);
        assert!((rm.get(1, 2, 2, 1) - 1.0).abs() < 1e-8);
    }
}
