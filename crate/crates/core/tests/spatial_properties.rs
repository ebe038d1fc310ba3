use fracseries::spatial_expr::{basis, sample_eq, sample_points, SpatialExpr};
use proptest::prelude::*;

/// Sums of products of up to three basis profiles.
fn expr(dim: usize) -> impl Strategy<Value = SpatialExpr> {
    let b = basis(dim);
    let nb = b.len();
    prop::collection::vec((prop::collection::vec(0..nb, 1..=3), -3.0..3.0f64), 1..=4).prop_map(
        move |terms| {
            terms
                .into_iter()
                .fold(SpatialExpr::zero(dim), |acc, (idx, c)| {
                    let prod = idx
                        .iter()
                        .fold(SpatialExpr::constant(dim, c), |p, &i| p.mul(&b[i]));
                    acc.add(&prod)
                })
        },
    )
}

fn dim_and_expr() -> impl Strategy<Value = (usize, SpatialExpr, SpatialExpr)> {
    (1..=3usize).prop_flat_map(|d| (Just(d), expr(d), expr(d)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn derivative_matches_central_difference((dim, e, _) in dim_and_expr()) {
        let h = 1e-5;
        for p in sample_points(dim, 20, 5) {
            for var in 0..dim {
                let mut lo = p.clone();
                let mut hi = p.clone();
                lo[var] -= h;
                hi[var] += h;
                let fd = (e.eval(&hi) - e.eval(&lo)) / (2.0 * h);
                let exact = e.diff(var, 1).eval(&p);
                prop_assert!(close(fd, exact, 1e-6), "{} vs {}", fd, exact);
            }
        }
    }

    #[test]
    fn diff_is_linear((dim, a, b) in dim_and_expr()) {
        let lhs = a.add(&b).diff(0, 1);
        let rhs = a.diff(0, 1).add(&b.diff(0, 1));
        for p in sample_points(dim, 16, 9) {
            prop_assert!(close(lhs.eval(&p), rhs.eval(&p), 1e-12));
        }
    }

    #[test]
    fn product_rule((dim, a, b) in dim_and_expr()) {
        let var = dim - 1;
        let lhs = a.mul(&b).diff(var, 1);
        let rhs = a.diff(var, 1).mul(&b).add(&a.mul(&b.diff(var, 1)));
        for p in sample_points(dim, 16, 13) {
            prop_assert!(close(lhs.eval(&p), rhs.eval(&p), 1e-12));
        }
    }

    #[test]
    fn structural_zero((_, e, _) in dim_and_expr()) {
        prop_assert!(e.add(&e.scale(-1.0)).is_zero());
        prop_assert!(e.sub(&e).is_zero());
    }

    #[test]
    fn multiplication_commutes_structurally((_, a, b) in dim_and_expr()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn render_parse_round_trip((dim, e, _) in dim_and_expr()) {
        let text = e.to_string();
        let back = SpatialExpr::parse_in(&text, dim).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
    }

    #[test]
    fn evaluation_matches_node_semantics(c in -2.0..2.0f64, k in 0.5..3.0f64) {
        let e = SpatialExpr::sin(1, 0, k).scale(c);
        for p in sample_points(1, 8, 17) {
            prop_assert_eq!(e.eval(&p), c * (k * p[0]).sin());
        }
    }
}

#[test]
fn trig_identities_hold_by_sampling_not_structure() {
    let double = SpatialExpr::parse("2*sin(x)*cos(x)").unwrap();
    let sin2 = SpatialExpr::parse("sin(2*x)").unwrap();
    assert_ne!(double, sin2);
    assert!(sample_eq(&double, &sin2, 1e-10));
    let pythag = SpatialExpr::parse("sin(x)^2 + cos(x)^2").unwrap();
    assert!(sample_eq(&pythag, &SpatialExpr::constant(1, 1.0), 1e-12));
}
