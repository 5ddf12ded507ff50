//! Series-engine identities and structural properties of the counting series.

use proptest::prelude::*;
use rug::{Integer, Rational};
use subcritical::families::{build_model, connected_and_all, counting_series, pointed_series, Family, Structure};
use subcritical::series::{BiSeries, Series};
use subcritical::systems::bits_for_digits;

const ORDER: usize = 8;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::from((n, d)))
}

/// Random series of order [`ORDER`]; `zero_constant` forces `f(0) = 0`.
fn arb_series(zero_constant: bool) -> impl Strategy<Value = Series> {
    prop::collection::vec(arb_rational(), ORDER + 1).prop_map(move |mut c| {
        if zero_constant {
            c[0] = Rational::new();
        }
        Series::from_rationals(c).unwrap()
    })
}

fn arb_bi() -> impl Strategy<Value = BiSeries> {
    prop::collection::vec(prop::collection::vec(arb_rational(), 0..=ORDER + 1), ORDER + 1).prop_map(|rows| {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(n, mut r)| {
                r.truncate(n + 1);
                r
            })
            .collect::<Vec<_>>();
        let mut rows = rows;
        rows[0].clear();
        BiSeries::from_rows(rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_inverts_log(f in arb_series(true)) {
        // exp(log 1/(1-f)) (1 - f) = 1
        let one = Series::one(ORDER);
        let e = f.log_inv().unwrap().exp().unwrap();
        prop_assert_eq!(&e * &(&one - &f), one);
    }

    #[test]
    fn exp_is_a_homomorphism(f in arb_series(true), g in arb_series(true)) {
        let lhs = (&f + &g).exp().unwrap();
        prop_assert_eq!(lhs, &f.exp().unwrap() * &g.exp().unwrap());
    }

    #[test]
    fn exp_ge_splits_exp(f in arb_series(true), k in 0usize..5) {
        let mut head = Series::zero(ORDER);
        let mut power = Series::one(ORDER);
        let mut fact = Rational::from(1);
        for r in 0..k {
            if r > 0 {
                fact *= r as u32;
            }
            head = &head + &power.scale(&Rational::from(fact.recip_ref()));
            power = &power * &f;
        }
        prop_assert_eq!(&head + &f.exp_ge(k).unwrap(), f.exp().unwrap());
    }

    #[test]
    fn derive_undoes_integrate(f in arb_series(false)) {
        let g = f.integrate();
        prop_assert_eq!(g.derive(), f.with_order(ORDER));
    }

    #[test]
    fn integrate_undoes_derive(f in arb_series(true)) {
        prop_assert_eq!(f.derive().integrate(), f);
    }

    #[test]
    fn log_derivative(f in arb_series(true)) {
        // (log 1/(1-f))' (1 - f) = f'
        let one = Series::one(ORDER);
        let l = f.log_inv().unwrap().derive();
        let lhs = &l * &(&one - &f).with_order(ORDER - 1);
        prop_assert_eq!(lhs, f.derive());
    }

    #[test]
    fn division_inverts_multiplication(f in arb_series(false), g in arb_series(false)) {
        prop_assume!(g.coeff(0).cmp0().is_ne());
        let q = f.checked_div(&g).unwrap();
        prop_assert_eq!(&q * &g, f);
    }

    #[test]
    fn compose_with_x_is_identity(f in arb_series(false)) {
        prop_assert_eq!(f.compose(&Series::x(ORDER)).unwrap(), f);
    }

    #[test]
    fn pointing_round_trip(f in arb_series(true)) {
        let x = Series::x(ORDER);
        let g = f.inverse_pointing().unwrap();
        prop_assert_eq!(&x * &g.derive().with_order(ORDER), f);
    }

    #[test]
    fn marker_substitution_commutes(f in arb_bi(), g in arb_bi(), u in arb_rational()) {
        let lhs = (&f * &g).exp().unwrap().at_marker(&u);
        let rhs = (&f.at_marker(&u) * &g.at_marker(&u)).exp().unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

fn all_models() -> Vec<(Family, Structure)> {
    Family::ALL.iter().flat_map(|&f| Structure::ALL.iter().map(move |&s| (f, s))).collect()
}

#[test]
fn counts_are_positive_integers() {
    let prec = bits_for_digits(30);
    for (f, s) in all_models() {
        let model = build_model(f, s, prec);
        let order = if f == Family::SeriesParallel { 10 } else { 14 };
        let counts = counting_series(&model, order).unwrap();
        for n in 0..=order {
            assert!(counts.totals[n] > 0, "{f} {s} n = {n}");
            let sum: Integer = counts.joint[n].iter().sum();
            assert_eq!(sum, counts.totals[n], "{f} {s} n = {n}");
            assert!(counts.joint[n].iter().all(|c| *c >= 0));
        }
        let pointed = pointed_series(&model, order).unwrap();
        for i in 0..3 {
            assert!(pointed.c_triples(i).iter().all(|c| *c >= 0));
            assert!(pointed.b_triples(i).iter().all(|c| *c >= 0));
        }
    }
}

#[test]
fn matchings_have_even_marker_degree() {
    let prec = bits_for_digits(30);
    for f in Family::ALL {
        let model = build_model(f, Structure::Matching, prec);
        let (c, g) = connected_and_all(&model, 10).unwrap();
        for series in [&c, &g] {
            for n in 0..=10 {
                for k in (1..=n).step_by(2) {
                    assert_eq!(series.marker_coeff(n, k), 0, "{f} n = {n} k = {k}");
                }
            }
        }
        // a maximal matching on n vertices has at most n/2 edges
        let counts = counting_series(&model, 10).unwrap();
        for (n, row) in counts.joint.iter().enumerate() {
            assert_eq!(row.len(), n / 2 + 1);
        }
    }
}

#[test]
fn mis_sizes_are_bounded() {
    let prec = bits_for_digits(30);
    for f in Family::ALL {
        let model = build_model(f, Structure::Mis, prec);
        let counts = counting_series(&model, 10).unwrap();
        for (n, row) in counts.joint.iter().enumerate() {
            assert_eq!(row.len(), n + 1);
            // the whole vertex set is maximal only in the empty graph
            assert_eq!(row[n], 1);
            if n > 0 {
                assert_eq!(row[0], 0);
            }
        }
    }
}

#[test]
fn forest_mis_small_counts() {
    let model = build_model(Family::Forest, Structure::Mis, bits_for_digits(30));
    let counts = counting_series(&model, 2).unwrap();
    let t: Vec<u32> = counts.totals.iter().map(|v| v.to_u32().unwrap()).collect();
    assert_eq!(t, vec![1, 1, 3]);
    let model = build_model(Family::Forest, Structure::Matching, bits_for_digits(30));
    assert_eq!(counting_series(&model, 2).unwrap().totals[2], 2);
}

#[test]
fn tree_pointed_examples() {
    let mis = pointed_series(&build_model(Family::Forest, Structure::Mis, bits_for_digits(30)), 3).unwrap();
    assert_eq!(mis.c_triples(1)[1], 0);
    assert_eq!(mis.c_triples(1)[2], 2);
    let mat = pointed_series(&build_model(Family::Forest, Structure::Matching, bits_for_digits(30)), 3).unwrap();
    assert_eq!(mat.c_triples(1)[2], 2);
}
