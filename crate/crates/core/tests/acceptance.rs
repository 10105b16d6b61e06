//! Acceptance checks, one line per criterion. Runs with `harness = false` so
//! the lines are printed on every `cargo test`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use borcherds::borcherds::{
    c_from_a_star, delta_and_pole, product_side, recursion_a_from_c, recursion_c_from_a, verify_theorem,
};
use borcherds::cm::{cm_product_side, hauptmodul_eval, CMPoint};
use borcherds::fixtures::FixtureSet;
use borcherds::hauptmodul::{faber_series, hauptmodul_expand, hecke_t};
use borcherds::plus_space::{build_fd, build_gd, duality_check, hecke_half_integral, valid_fd_index, valid_gd_index};
use borcherds::quad_forms::{class_number_h, classes_level};
use borcherds::series::parse_rational;
use borcherds::{Level, QSeries};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::{Complex, Float, Integer, Rational};

type Outcome = Result<String, String>;

fn lv(n: u32) -> Level {
    Level::new(n).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hurwitz() -> Outcome {
    let expected = [(3, "1/3"), (4, "1/2"), (7, "1"), (8, "1"), (11, "1"), (12, "4/3"), (15, "2")];
    for (d, h) in expected {
        let got = class_number_h(d).map_err(|e| e.to_string())?;
        ensure(got == parse_rational(h).unwrap(), format!("H({d}) = {got}, expected {h}"))?;
    }
    Ok("H(3), H(4), H(7), H(8), H(11), H(12), H(15) exact".into())
}

fn hauptmodul_two() -> Outcome {
    let t = hauptmodul_expand(lv(2), 6);
    let got: Vec<Rational> = (1..=5).map(|e| t.coeff(e)).collect();
    let want = [4372i64, 96256, 1240002, 10698752, 74428120];
    ensure(got.iter().zip(want).all(|(a, b)| *a == b), format!("got {got:?}"))?;
    Ok("4372, 96256, 1240002, 10698752, 74428120".into())
}

fn cm_value() -> Outcome {
    let tau = CMPoint::new(2, -2, 4).unwrap().tau(128);
    let z = hauptmodul_eval(lv(2), &tau, 128).map_err(|e| e.to_string())?;
    let err = Float::with_val(53, Complex::with_val(128, &z + 104u32).abs_ref()).to_f64();
    ensure(err < 1e-20, format!("|t((1+i)/2) + 104| = {err:e}"))?;
    Ok(format!("|t((1+i)/2) + 104| = {err:.1e}"))
}

fn appendix() -> Outcome {
    let fixtures = FixtureSet::embedded();
    let mut coeffs = 0;
    for t in &fixtures.fd_tables {
        let f = build_fd(lv(t.level), t.d, t.through + 1).map_err(|e| e.to_string())?;
        for e in -t.d..=t.through {
            let want = t.coeffs.iter().find(|(x, _)| *x == e).map_or(0, |(_, c)| *c);
            ensure(f.coeff(e) == want, format!("N={} f_{} q^{e}: {} vs {want}", t.level, t.d, f.coeff(e)))?;
            coeffs += 1;
        }
    }
    Ok(format!("{} tables, {coeffs} coefficients", fixtures.fd_tables.len()))
}

fn duality() -> Outcome {
    let mut pairs = 0;
    for level in Level::ALL {
        let r = duality_check(level, 25, 100).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("N={level}: {:?}", r.violations.first()))?;
        pairs += r.pairs_checked;
    }
    Ok(format!("{pairs} pairs over N = 1, 2, 3, 5, 6"))
}

fn theorem() -> Outcome {
    let fixtures = FixtureSet::embedded();
    for t in &fixtures.fd_tables {
        let c = verify_theorem(lv(t.level), t.d, 30, false).map_err(|e| e.to_string())?;
        ensure(c.status.matched, format!("N={} d={}: first mismatch {:?}", t.level, t.d, c.status.first_mismatch))?;
    }
    let p = product_side(lv(2), 4, 3).map_err(|e| e.to_string())?;
    ensure(
        p == QSeries::from_integers([(-1, 1), (0, 104), (1, 4372), (2, 96256)], 3),
        format!("(2, 4) series {p:?}"),
    )?;
    Ok(format!("{} pairs to 30 terms; (2, 4) gives q^-1 (1 + 104q + 4372q^2 + 96256q^3 + ...)", fixtures.fd_tables.len()))
}

fn cm_products() -> Outcome {
    let mut worst = 0.0f64;
    for (n, d) in [(2, 4), (3, 3), (1, 3)] {
        let exact = product_side(lv(n), d, 30).map_err(|e| e.to_string())?;
        let num = cm_product_side(lv(n), d, 30, 192).map_err(|e| e.to_string())?;
        ensure(num.series == exact, format!("N={n} d={d}: rounded series differs"))?;
        ensure(num.residual < 1e-10, format!("N={n} d={d}: residual {:e}", num.residual))?;
        worst = worst.max(num.residual);
    }
    Ok(format!("(2,4), (3,3), (1,3) at 192 bits, max residual {worst:.1e}"))
}

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

fn recursion() -> Outcome {
    let two = Integer::from(2);
    let a = recursion_a_from_c(&two, &ints(&[104, 4372, 96256])).map_err(|e| e.to_string())?;
    ensure(a == ints(&[-52, 544, -8244]), format!("A* = {a:?}"))?;
    for (n, d) in [(2, 4), (3, 3), (6, 23)] {
        let (delta, _) = delta_and_pole(d).unwrap();
        let c = recursion_c_from_a(lv(n), d, 20).map_err(|e| e.to_string())?;
        let a = recursion_a_from_c(&delta, &c).map_err(|e| e.to_string())?;
        ensure(c_from_a_star(&delta, &a) == c, format!("N={n} d={d}: round trip failed"))?;
    }
    Ok("A* = -52, 544, -8244; c <-> A* identity for m <= 20".into())
}

fn replication() -> Outcome {
    for level in Level::ALL {
        for m in 1..=6 {
            ensure(faber_series(level, m, 40) == hecke_t(level, 1, m as u64, 40), format!("N={level} m={m}"))?;
        }
    }
    Ok("t_m = t|T(m), m <= 6, 40 terms, every level".into())
}

fn hecke_structure() -> Outcome {
    let mut cases = 0;
    for level in Level::ALL {
        for p in [2u32, 3] {
            if level.get() % p == 0 || !valid_gd_index(level, 1) {
                continue;
            }
            let p2 = (p * p) as i64;
            let g = build_gd(level, 1, 4 * p2).map_err(|e| e.to_string())?;
            let image = hecke_half_integral(&g, p);
            let polar: Vec<(i64, Rational)> = image.iter().filter(|(e, _)| *e < 0).map(|(e, c)| (e, c.clone())).collect();
            let want = vec![(-p2, Rational::from(p)), (-1, Rational::from(1))];
            ensure(polar == want, format!("N={level} p={p}: {polar:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("polar part q^-1 + p q^-p^2 in {cases} (N, p) cases"))
}

fn small_series() -> impl Strategy<Value = QSeries> {
    (-2i64..2, prop::collection::vec(-9i64..10, 1..8)).prop_map(|(lead, cs)| {
        QSeries::from_integers(cs.iter().enumerate().map(|(i, &c)| (lead + i as i64, c)), lead + 10)
    })
}

fn properties() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner
        .run(&(small_series(), small_series(), small_series()), |(a, b, c)| {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            Ok(())
        })
        .map_err(|e| format!("ring axioms: {e}"))?;
    runner
        .run(&prop::collection::vec(-5i64..6, 1..10), |cs| {
            let x = QSeries::from_integers(cs.iter().enumerate().map(|(i, &c)| (i as i64 + 1, c)), 12);
            prop_assert_eq!(x.exp_series().unwrap().log_series().unwrap(), x);
            Ok(())
        })
        .map_err(|e| format!("exp/log: {e}"))?;
    for level in Level::ALL {
        for d in (0..=24).filter(|&d| valid_fd_index(level, d)) {
            let f = build_fd(level, d, 40).map_err(|e| e.to_string())?;
            ensure(f.satisfies_plus_support(), format!("f_{d} at N={level} leaves the plus space"))?;
        }
        for big_d in (1..=12).filter(|&x| valid_gd_index(level, x)) {
            let g = build_gd(level, big_d, 40).map_err(|e| e.to_string())?;
            ensure(g.satisfies_plus_support(), format!("g_{big_d} at N={level} leaves the plus space"))?;
        }
    }
    for d in (3..=200).filter(|d| d % 4 == 0 || d % 4 == 3) {
        let h = class_number_h(d).unwrap();
        for level in Level::ALL {
            let cl = classes_level(d, level.get()).map_err(|e| e.to_string())?;
            ensure(cl.is_empty() || cl.total_weight() == h, format!("sum 1/w_Q != H({d}) at N={level}"))?;
        }
    }
    Ok("ring axioms, exp/log, plus support, sum 1/w_Q = H(d) for d <= 200".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 11] = [
        ("1 Hurwitz class numbers", hurwitz, Some(Duration::from_secs(1))),
        ("2 Hauptmodul N=2 coefficients", hauptmodul_two, Some(Duration::from_secs(1))),
        ("3 CM value t((1+i)/2) = -104", cm_value, Some(Duration::from_secs(1))),
        ("4 appendix reproduction", appendix, Some(Duration::from_secs(30))),
        ("5 duality A = -B", duality, None),
        ("6 product = trace", theorem, Some(Duration::from_secs(60))),
        ("7 CM-product oracle", cm_products, Some(Duration::from_secs(30))),
        ("8 recursion", recursion, None),
        ("9 replication", replication, None),
        ("10 Hecke structure of g_1", hecke_structure, None),
        ("11 property suite", properties, None),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<32} {elapsed:>10.2?}  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<32} {elapsed:>10.2?}  {detail}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
