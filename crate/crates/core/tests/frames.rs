mod common;

use proptest::prelude::*;

use statcurv::frames::{
    adapted_frame, adapted_frame_at, orthonormal_completion, pairing_residual, squared_nabla_t_at,
};
use statcurv::harness::{generate, GeneratorRecipe};
use statcurv::linalg::{jacobi_eigen, Mat};
use statcurv::tolerance::Tolerances;
use statcurv::Error;

fn lorentz_eta(n: usize) -> Mat {
    Mat::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => -1.0,
        (i, j) if i == j => 1.0,
        _ => 0.0,
    })
}

#[test]
fn s3_adapted_frame() {
    let s = common::s3();
    let tol = Tolerances::default();
    for p in common::random_points(&s.lorentzian().chart, 50, 4) {
        let sp = s.at(&p).unwrap();
        let frame = adapted_frame_at(&sp, &tol).unwrap();
        assert_eq!(frame.pairs.len(), 1);
        assert!((frame.pairs[0].f + 1.0).abs() < 1e-8);
        assert!(frame.fixed.is_empty());
        assert!(frame.gram(&sp.lorentzian.g).max_abs_diff(&lorentz_eta(3)) < 1e-10);
        assert!(frame.gram(&sp.riemannian.g).max_abs_diff(&Mat::identity(3)) < 1e-10);
        let eig = squared_nabla_t_at(&sp, &tol).unwrap().eigenvalues;
        let expected = [-1.0, -1.0, 0.0];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-8, "{eig:?}");
        }
    }
}

#[test]
fn flat_torus_takes_the_parallel_fallback() {
    let s = common::flat_torus();
    let frame = adapted_frame(&s, &[1.0, 1.0, 1.0]).unwrap();
    assert!(frame.pairs.is_empty());
    assert_eq!(frame.fixed, vec![1, 2]);
}

#[test]
fn product_with_torus_has_fixed_directions_first() {
    let s = common::s3_t2();
    let frame = adapted_frame(&s, &[0.5, 1.0, 1.0, 1.0, 1.0]).unwrap();
    assert_eq!(frame.fixed, vec![1, 2]);
    assert_eq!(frame.pairs.len(), 1);
    assert_eq!((frame.pairs[0].first, frame.pairs[0].second), (3, 4));
    assert!((frame.pairs[0].f + 1.0).abs() < 1e-8);
}

#[test]
fn non_unit_field_is_rejected() {
    let mut recipe = GeneratorRecipe::random(5);
    recipe.unit = false;
    let s = generate(&recipe).unwrap();
    let p: Vec<f64> = s
        .lorentzian()
        .chart
        .interior_box()
        .iter()
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let err = adapted_frame(&s, &p).unwrap_err();
    assert!(
        matches!(err, Error::AtPoint { ref source, .. } if matches!(**source, Error::NotUnit { .. }))
    );
    assert!(orthonormal_completion(&s, &p).is_err());
}

#[test]
fn generated_structures_satisfy_the_pairing_structure() {
    let tol = Tolerances::default();
    for seed in 0..100 {
        let s = generate(&GeneratorRecipe::random(seed)).unwrap();
        let n = s.dim();
        for p in common::random_points(&s.lorentzian().chart, 5, seed) {
            let sp = s.at(&p).unwrap();
            let eig = squared_nabla_t_at(&sp, &tol).unwrap().eigenvalues;
            assert!(eig.iter().all(|&l| l <= 1e-9), "seed {seed}: {eig:?}");
            let frame = adapted_frame_at(&sp, &tol).unwrap();
            assert!(frame.pairs.len() <= (n - 1) / 2);
            assert!(frame.pairs.iter().all(|pr| pr.f < 0.0));
            assert_eq!(frame.fixed.len() + 2 * frame.pairs.len(), n - 1);
            assert!(pairing_residual(&sp, &frame) < 1e-7, "seed {seed}");
            assert!(frame.gram(&sp.lorentzian.g).max_abs_diff(&lorentz_eta(n)) < 1e-10);
            // the spectrum is −f² twice per pair and zero on the fixed directions
            let mut predicted: Vec<f64> = frame
                .pairs
                .iter()
                .flat_map(|pr| [-pr.f * pr.f, -pr.f * pr.f])
                .chain(std::iter::repeat_n(0.0, frame.fixed.len() + 1))
                .collect();
            predicted.sort_by(f64::total_cmp);
            for (a, b) in eig.iter().zip(&predicted) {
                assert!(
                    (a - b).abs() < 1e-8,
                    "seed {seed}: {eig:?} vs {predicted:?}"
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn jacobi_agrees_with_nalgebra(entries in prop::collection::vec(-2.0f64..2.0, 36)) {
        let m = Mat::from_fn(6, 6, |i, j| entries[i * 6 + j] + entries[j * 6 + i]);
        let ours = jacobi_eigen(&m);
        let theirs = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_fn(6, 6, |i, j| m[(i, j)]));
        let mut reference: Vec<f64> = theirs.eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.values.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        for k in 0..6 {
            let v = ours.vector(k);
            let mv = m.matvec(&v);
            for i in 0..6 {
                prop_assert!((mv[i] - ours.values[k] * v[i]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn s5_hopf_field_has_a_four_dimensional_eigenspace() {
    let s = common::s5();
    let tol = Tolerances::default();
    for p in common::random_points(&s.lorentzian().chart, 30, 8) {
        let sp = s.at(&p).unwrap();
        let eig = squared_nabla_t_at(&sp, &tol).unwrap().eigenvalues;
        for (a, b) in eig.iter().zip([-1.0, -1.0, -1.0, -1.0, 0.0]) {
            assert!((a - b).abs() < 1e-8, "{eig:?}");
        }
        let frame = adapted_frame_at(&sp, &tol).unwrap();
        assert!(frame.fixed.is_empty());
        assert_eq!(frame.pairs.len(), 2);
        assert!(frame.pairs.iter().all(|pr| (pr.f + 1.0).abs() < 1e-8));
        assert!(pairing_residual(&sp, &frame) < 1e-7);
    }
}
