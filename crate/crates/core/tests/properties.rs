use borcherds::borcherds::{c_from_a_star, recursion_a_from_c};
use borcherds::plus_space::cohen_bracket;
use borcherds::quad_forms::{class_number_h, classes_level, reduce_gamma, BinaryQF};
use borcherds::series::{format_rational, parse_rational};
use borcherds::{Level, QSeries};
use proptest::prelude::*;
use rug::{Integer, Rational};

fn series(max_lead: i64) -> impl Strategy<Value = QSeries> {
    (-max_lead..=max_lead, prop::collection::vec((-20i64..20, 1i64..5), 1..10), 0i64..6).prop_map(
        |(lead, cs, slack)| {
            let n = cs.len() as i64;
            QSeries::from_coeffs(
                cs.into_iter().enumerate().map(|(i, (p, q))| (lead + i as i64, Rational::from((p, q)))),
                lead + n + slack,
            )
        },
    )
}

/// Unit-lead series, so the inverse exists.
fn invertible() -> impl Strategy<Value = QSeries> {
    (series(2), 1i64..4).prop_map(|(s, c)| {
        let lead = s.lead().min(s.prec() - 1);
        &s.truncate(s.prec()) + &QSeries::monomial(lead - 1, c, s.prec())
    })
}

fn sl2() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    prop::collection::vec(0u8..4, 0..8).prop_map(|word| {
        let (mut p, mut q, mut r, mut s) = (1i64, 0i64, 0i64, 1i64);
        for w in word {
            // T, T^-1, S, S^-1
            let (a, b, c, d) = match w {
                0 => (1, 1, 0, 1),
                1 => (1, -1, 0, 1),
                2 => (0, -1, 1, 0),
                _ => (0, 1, -1, 0),
            };
            (p, q, r, s) = (p * a + q * c, p * b + q * d, r * a + s * c, r * b + s * d);
        }
        (p, q, r, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn addition_group(a in series(3), b in series(3)) {
        prop_assert_eq!(&(&a + &b) - &b, a.truncate(a.prec().min(b.prec())));
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn multiplication_ring(a in series(2), b in series(2), c in series(2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn inverse_is_two_sided(a in invertible()) {
        let inv = a.inv().unwrap();
        let one = &a * &inv;
        prop_assert_eq!(one.clone(), QSeries::one(one.prec()));
    }

    #[test]
    fn exp_log_inverse(cs in prop::collection::vec((-9i64..10, 1i64..4), 1..12)) {
        let x = QSeries::from_coeffs(
            cs.iter().enumerate().map(|(i, &(p, q))| (i as i64 + 1, Rational::from((p, q)))),
            cs.len() as i64 + 3,
        );
        prop_assert_eq!(x.exp_series().unwrap().log_series().unwrap(), x.clone());
        let one_plus = &QSeries::one(x.prec()) + &x;
        prop_assert_eq!(one_plus.log_series().unwrap().exp_series().unwrap(), one_plus);
    }

    #[test]
    fn json_round_trip(a in series(5)) {
        prop_assert_eq!(QSeries::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..500) {
        let r = Rational::from((p, q));
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn u_operator_of_scaled_exponents(a in series(3), m in 1i64..5) {
        prop_assert_eq!(a.scale_exponents(m).u_operator(m), a);
    }

    #[test]
    fn bracket_symmetry(f in series(1), g in series(1), n in 0u32..4) {
        // [g, f]_n = (-1)^n [f, g]_n
        let (k1, k2) = (Rational::from((1, 2)), Rational::from(4));
        let fg = cohen_bracket(&f, &k1, &g, &k2, n);
        let gf = cohen_bracket(&g, &k2, &f, &k1, n);
        let sign = Rational::from(if n % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(gf, fg.scale(&sign));
    }

    #[test]
    fn reduction_is_a_class_invariant(idx in 0usize..40, m in sl2()) {
        let discs: Vec<i64> = (3..=120).filter(|d| d % 4 == 0 || d % 4 == 3).collect();
        let d = discs[idx % discs.len()];
        let forms = borcherds::quad_forms::reduced_forms(d).unwrap();
        let q = forms[idx % forms.len()];
        let moved = q.transform(m.0, m.1, m.2, m.3);
        prop_assert_eq!(moved.disc(), q.disc());
        prop_assert_eq!(reduce_gamma(&moved), q);
        prop_assert!(reduce_gamma(&moved).is_reduced());
    }

    #[test]
    fn recursion_round_trip(a in prop::collection::vec(-60i64..60, 1..20), delta in 1i64..4) {
        let delta = Integer::from(delta);
        let a: Vec<Integer> = a.into_iter().map(Integer::from).collect();
        let c = c_from_a_star(&delta, &a);
        prop_assert_eq!(recursion_a_from_c(&delta, &c).unwrap(), a);
    }
}

#[test]
fn class_weights_sum_to_hurwitz_number() {
    for d in (3..=200).filter(|d| d % 4 == 0 || d % 4 == 3) {
        let h = class_number_h(d).unwrap();
        for level in Level::ALL {
            let cl = classes_level(d, level.get()).unwrap();
            if !cl.is_empty() {
                assert_eq!(cl.total_weight(), h, "d={d} N={level}");
            }
        }
    }
}

#[test]
fn forms_rejected_outside_the_domain() {
    assert!(BinaryQF::new(1, 1, -1).is_err());
    assert!(class_number_h(5).is_err());
}
