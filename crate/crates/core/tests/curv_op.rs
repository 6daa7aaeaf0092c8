mod common;

use statcurv::curv_op::{
    assemble_operator, lorentzian_curvature_operator, lorentzian_operator_at,
    riemannian_curvature_operator, riemannian_operator_at, symmetrized_at, symmetrized_matrix,
    Flavor, Lambda2Basis,
};
use statcurv::expr::{parse_expression, Expr};
use statcurv::frames::{
    adapted_frame, adapted_frame_at, orthonormal_completion, stationary_frame_at, OrthonormalFrame,
};
use statcurv::harness::{generate, Family, GeneratorRecipe};
use statcurv::linalg::{jacobi_eigen, Mat};
use statcurv::metric::{load_spec, Chart, MetricSpec, Signature};
use statcurv::stationary::{StationaryPoint, StationaryStructure};
use statcurv::tolerance::Tolerances;
use statcurv::Error;

#[test]
fn s3_operators() {
    let s = common::s3();
    for p in common::random_points(&s.lorentzian().chart, 20, 1) {
        let frame = adapted_frame(&s, &p).unwrap();
        let r = riemannian_curvature_operator(&s, &frame).unwrap();
        let l = lorentzian_curvature_operator(&s, &frame).unwrap();
        let y = symmetrized_matrix(&s, &frame).unwrap();
        assert_eq!(r.flavor, Flavor::Riemannian);
        assert!(r.entries.max_abs_diff(&Mat::identity(3)) < 1e-8);
        assert!(l.entries.max_abs_diff(&Mat::diag(&[-1.0, -1.0, 7.0])) < 1e-8);
        assert!(y.entries.max_abs_diff(&Mat::identity(3)) < 1e-8);
        assert_eq!(y.f_values.len(), 1);
    }
}

#[test]
fn flat_torus_operators_vanish() {
    let s = common::flat_torus();
    let frame = adapted_frame(&s, &[1.0, 2.0, 3.0]).unwrap();
    for m in [
        riemannian_curvature_operator(&s, &frame).unwrap(),
        lorentzian_curvature_operator(&s, &frame).unwrap(),
        symmetrized_matrix(&s, &frame).unwrap(),
    ] {
        assert_eq!(m.entries.max_abs(), 0.0);
    }
}

/// Matrices (14)/(15) written out entry by entry from `Rm_L` components:
/// row `r`, column `c` holds `R(e_c, e_r)`, negated when neither element
/// contains `T`, plus `2f²` on `(T,i)` diagonals of paired `i`
/// and `−6f²` on the diagonal of the paired spatial plane.
fn literal_template(sp: &StationaryPoint, frame: &OrthonormalFrame) -> Mat {
    let rml = sp.riemann_l().frame_components(&frame.vectors).unwrap();
    let basis = Lambda2Basis::new(frame.dim());
    let n = basis.len();
    let paired = |i: usize| frame.pairs.iter().any(|p| p.first == i || p.second == i);
    let f2: f64 = frame.pairs.first().map_or(0.0, |p| p.f * p.f);
    Mat::from_fn(n, n, |r, c| {
        let (r1, r2) = basis.pairs[r];
        let (c1, c2) = basis.pairs[c];
        let sign = if c1 != 0 && r1 != 0 { -1.0 } else { 1.0 };
        let mut v = sign * rml.get(c1, c2, r1, r2);
        if r == c && r1 == 0 && paired(r2) {
            v += 2.0 * f2;
        }
        if r == c
            && r1 != 0
            && frame
                .pairs
                .iter()
                .any(|p| p.first.min(p.second) == r1.min(r2) && p.first.max(p.second) == r1.max(r2))
        {
            v -= 6.0 * f2;
        }
        v
    })
}

#[test]
fn literal_templates_in_three_and_four_dimensions() {
    let tol = Tolerances::default();
    let mut structures = vec![common::s3()];
    for seed in 0..10 {
        structures
            .push(generate(&GeneratorRecipe::new(seed, 3, Family::WarpedRotational)).unwrap());
        structures
            .push(generate(&GeneratorRecipe::new(seed, 4, Family::WarpedRotational)).unwrap());
        structures.push(
            generate(&GeneratorRecipe::new(
                seed,
                4,
                Family::ProductWithFlat { flat_dims: 1 },
            ))
            .unwrap(),
        );
    }
    for s in &structures {
        for p in common::random_points(&s.lorentzian().chart, 5, 3) {
            let sp = s.at(&p).unwrap();
            let frame = adapted_frame_at(&sp, &tol).unwrap();
            if s.dim() == 4 {
                assert_eq!(frame.fixed, vec![1]);
                assert_eq!((frame.pairs[0].first, frame.pairs[0].second), (2, 3));
            }
            let y = symmetrized_at(&sp, &frame, &tol).unwrap();
            let t = literal_template(&sp, &frame);
            assert!(y.entries.max_abs_diff(&t) < 1e-9, "{:?}", p);
            let r = riemannian_operator_at(&sp, &frame).unwrap();
            assert!(r.entries.max_abs_diff(&t) < 1e-7);
        }
    }
}

#[test]
fn parallel_field_gives_the_plain_symmetrization() {
    let spec = load_spec(
        br#"
[chart]
coordinates = ["t", "x", "y"]
intervals = [[0, 1], [0.1, 3], [0, 6]]
[metric]
g_0_0 = "-1"
g_1_1 = "1"
g_2_2 = "sin(x)^2"
[signature]
type = "lorentzian"
[killing]
T_0 = "1"
unit = true
"#,
    )
    .unwrap();
    let s = StationaryStructure::from_spec(spec).unwrap();
    let p = [0.5, 1.0, 2.0];
    let frame = adapted_frame(&s, &p).unwrap();
    assert!(frame.pairs.is_empty());
    let l = lorentzian_curvature_operator(&s, &frame).unwrap();
    let y = symmetrized_matrix(&s, &frame).unwrap();
    let basis = Lambda2Basis::new(3);
    let expected = Mat::from_fn(3, 3, |r, c| {
        let flip = basis.pairs[r].0 != 0 && basis.pairs[c].0 == 0;
        if flip {
            -l.entries[(r, c)]
        } else {
            l.entries[(r, c)]
        }
    });
    assert!(y.entries.max_abs_diff(&expected) < 1e-12);
    // a round unit 2-sphere factor: only the spatial plane curves
    assert!(y.entries.max_abs_diff(&Mat::diag(&[0.0, 0.0, 1.0])) < 1e-10);
}

#[test]
fn s5_and_product_operators() {
    let s = common::s5();
    for p in common::random_points(&s.lorentzian().chart, 10, 5) {
        let frame = adapted_frame(&s, &p).unwrap();
        let r = riemannian_curvature_operator(&s, &frame).unwrap();
        let y = symmetrized_matrix(&s, &frame).unwrap();
        assert!(r.entries.max_abs_diff(&Mat::identity(10)) < 1e-7);
        assert!(y.entries.max_abs_diff(&r.entries) < 1e-7);
    }
    let s = common::s3_t2();
    for p in common::random_points(&s.lorentzian().chart, 10, 6) {
        let frame = adapted_frame(&s, &p).unwrap();
        let r = riemannian_curvature_operator(&s, &frame).unwrap();
        let y = symmetrized_matrix(&s, &frame).unwrap();
        assert!(y.entries.max_abs_diff(&r.entries) < 1e-8);
    }
}

#[test]
fn round_four_sphere_operator_is_the_identity() {
    let coords: Vec<String> = ["a", "b", "u", "v"].iter().map(|s| s.to_string()).collect();
    let e = |text: &str| parse_expression(text, &coords).unwrap();
    let chart = Chart {
        coords: coords.clone(),
        intervals: vec![(0.0, 3.1), (0.0, 1.5), (0.0, 6.0), (0.0, 6.0)],
        margin: 0.01,
    };
    let diag = [
        e("1"),
        e("sin(a)^2"),
        e("sin(a)^2*cos(b)^2"),
        e("sin(a)^2*sin(b)^2"),
    ];
    let round = MetricSpec::new(chart, Signature::Riemannian, |i, j| {
        if i == j {
            diag[i].clone()
        } else {
            Expr::zero()
        }
    })
    .unwrap();
    let killing = vec![Expr::zero(), Expr::zero(), e("1"), e("1")];
    let s = StationaryStructure::from_riemannian(round, killing, false).unwrap();
    for p in common::random_points(&s.lorentzian().chart, 10, 2) {
        let sp = s.at(&p).unwrap();
        let frame = stationary_frame_at(&sp).unwrap();
        let r = riemannian_operator_at(&sp, &frame).unwrap();
        assert!(r.entries.max_abs_diff(&Mat::identity(6)) < 1e-8, "{p:?}");
    }
}

#[test]
fn spatial_permutation_conjugates_the_operator() {
    let s = generate(&GeneratorRecipe::new(2, 5, Family::WarpedRotational)).unwrap();
    let p: Vec<f64> = s
        .lorentzian()
        .chart
        .interior_box()
        .iter()
        .map(|(a, b)| 0.4 * a + 0.6 * b)
        .collect();
    let sp = s.at(&p).unwrap();
    let frame = adapted_frame_at(&sp, &Tolerances::default()).unwrap();
    let rm = sp.riemann_g().frame_components(&frame.vectors).unwrap();
    let eta = frame.gram(&sp.riemannian.g);
    let basis = Lambda2Basis::new(5);
    let m = assemble_operator(&rm, &eta, &basis).unwrap();
    // reverse the spatial-pair block (indices 4..10)
    let perm: Vec<usize> = (0..4).chain((4..10).rev()).collect();
    let permuted_basis = Lambda2Basis {
        n: 5,
        pairs: perm.iter().map(|&i| basis.pairs[i]).collect(),
    };
    let mp = assemble_operator(&rm, &eta, &permuted_basis).unwrap();
    assert!(mp.max_abs_diff(&m.permuted(&perm)) < 1e-14);
    let (a, b) = (jacobi_eigen(&m).values, jacobi_eigen(&mp).values);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
}

#[test]
fn riemannian_operator_is_symmetric_and_lorentzian_is_not() {
    let mut worst_asymmetry: f64 = 0.0;
    let mut lorentzian_asymmetry: f64 = 0.0;
    for seed in 0..30 {
        let s = generate(&GeneratorRecipe::random(seed)).unwrap();
        for p in common::random_points(&s.lorentzian().chart, 5, seed) {
            let sp = s.at(&p).unwrap();
            let frame = adapted_frame_at(&sp, &Tolerances::default()).unwrap();
            let r = riemannian_operator_at(&sp, &frame).unwrap();
            worst_asymmetry = worst_asymmetry.max(r.entries.asymmetry());
            let l = lorentzian_operator_at(&sp, &frame).unwrap();
            lorentzian_asymmetry = lorentzian_asymmetry.max(l.entries.asymmetry());
        }
    }
    assert!(worst_asymmetry < 1e-8);
    println!("largest Lorentzian operator asymmetry: {lorentzian_asymmetry:e}");
    assert!(lorentzian_asymmetry > 0.0);
}

#[test]
fn unadapted_frame_is_rejected() {
    let s = common::s3();
    let p = [0.6, 1.0, 1.0];
    let completion = orthonormal_completion(&s, &p).unwrap();
    let err = symmetrized_matrix(&s, &completion).unwrap_err();
    assert!(matches!(err, Error::FrameNotAdapted(_)));
}
