use proptest::prelude::*;

use statcurv::expr::{parse_expression, Expr, Func};

fn coords() -> Vec<String> {
    vec!["t".into(), "x".into(), "y".into()]
}

/// Expressions that are smooth and finite on the box `[-1, 1]^3`.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3.0f64..3.0).prop_map(|v| Expr::num((v * 100.0).round() / 100.0)),
        (0usize..3).prop_map(Expr::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            inner.clone().prop_map(|a| a.neg()),
            (inner.clone(), 0i32..4).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, &a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, &a)),
            // bounded argument keeps exp well scaled
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Exp, &Expr::call(Func::Sin, &a))),
            // strictly positive denominator and log argument
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| { a.div(&Expr::num(2.0).add(&Expr::call(Func::Sin, &b))) }),
            inner.clone().prop_map(|a| {
                Expr::call(Func::Log, &Expr::num(1.5).add(&Expr::call(Func::Cos, &a)))
            }),
            inner.prop_map(|a| Expr::call(Func::Sqrt, &Expr::num(1.0).add(&a.powi(2)))),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_is_a_fixed_point(e in smooth_expr()) {
        let c = coords();
        let text = e.to_text(&c);
        let back = parse_expression(&text, &c).unwrap();
        prop_assert_eq!(back.to_text(&c), text);
    }

    #[test]
    fn printed_form_evaluates_identically(e in smooth_expr(), p in point()) {
        let c = coords();
        let back = parse_expression(&e.to_text(&c), &c).unwrap();
        let (a, b) = (e.eval(&p, &c).unwrap(), back.eval(&p, &c).unwrap());
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn jet_value_matches_plain_evaluation(e in smooth_expr(), p in point()) {
        let c = coords();
        let v = e.eval(&p, &c).unwrap();
        let j = e.eval_jet(&p, &c).unwrap();
        prop_assert!(close(j.value(), v, 1e-12));
    }

    #[test]
    fn jet_derivatives_match_finite_differences(e in smooth_expr(), p in point()) {
        let c = coords();
        let j = e.eval_jet(&p, &c).unwrap();
        let f = |q: &[f64]| e.eval(q, &c).unwrap();
        let h = 1e-4;
        for i in 0..3 {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[i] += h;
            pm[i] -= h;
            let fd = (f(&pp) - f(&pm)) / (2.0 * h);
            let scale = j.gradient()[i].abs().max(j.value().abs()).max(1.0);
            prop_assert!((fd - j.gradient()[i]).abs() <= 1e-6 * scale,
                "d/d{} fd {} jet {}", i, fd, j.gradient()[i]);
            for k in 0..3 {
                let shift = |di: f64, dk: f64| {
                    let mut q = p.clone();
                    q[i] += di;
                    q[k] += dk;
                    f(&q)
                };
                let stencil = |hh: f64| {
                    (shift(hh, hh) - shift(hh, -hh) - shift(-hh, hh) + shift(-hh, -hh)) / (4.0 * hh * hh)
                };
                // Richardson extrapolation removes the O(h²) truncation term
                let fd2 = (4.0 * stencil(5e-4) - stencil(1e-3)) / 3.0;
                let scale = j.hessian(i, k).abs().max(j.value().abs()).max(1.0);
                prop_assert!((fd2 - j.hessian(i, k)).abs() <= 1e-4 * scale,
                    "d2/d{}d{} fd {} jet {}", i, k, fd2, j.hessian(i, k));
            }
        }
    }
}

#[test]
fn unknown_identifier_offset() {
    let err = parse_expression("sin(t) + z", &coords()).unwrap_err();
    assert_eq!(
        err,
        statcurv::ExprError::UnknownIdentifier {
            name: "z".into(),
            offset: 9
        }
    );
}
