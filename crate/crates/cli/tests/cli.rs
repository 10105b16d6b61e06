use borcherds::QSeries;
use borcherds_cli::{parse_coefficient_list, run, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("borcherds").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn hauptmodul_json_is_a_series() {
    let (code, out, _) = call(&["hauptmodul", "--level", "2", "--terms", "6", "--json"]);
    assert_eq!(code, EXIT_OK);
    let s = QSeries::from_json(out.trim()).unwrap();
    assert_eq!(s, QSeries::from_integers([(-1, 1), (1, 4372), (2, 96256), (3, 1240002), (4, 10698752), (5, 74428120)], 6));
}

#[test]
fn hauptmodul_text_is_aligned() {
    let (_, out, _) = call(&["hauptmodul", "--level", "3", "--terms", "3"]);
    assert!(out.starts_with("-1: 1/1\n 1: 783/1\n 2: 8672/1\n"), "{out}");
}

#[test]
fn faber_polynomial() {
    let v = json(&["faber", "--level", "1", "--n", "2", "--terms", "3", "--json"]);
    assert_eq!(v["polynomial"], serde_json::json!(["-393768", "0", "1"]));
}

#[test]
fn hecke_matches_faber() {
    let a = json(&["hecke", "--level", "5", "--m", "4", "--terms", "12", "--json"]);
    let b = json(&["faber", "--level", "5", "--n", "4", "--terms", "12", "--json"]);
    assert_eq!(a, b["series"]);
}

#[test]
fn class_number_and_forms() {
    let (code, out, _) = call(&["classnumber", "--disc", "12"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "H(12) = 4/3"));
    let v = json(&["forms", "--disc", "4", "--level", "2", "--json"]);
    assert_eq!(v["H"], "1/2");
    assert_eq!(v["classes"][0]["weight"], "1/2");
    assert_eq!(v["roots"][0], serde_json::json!({"a": 2, "b": 2, "d": 4}));
    let (code, _, err) = call(&["classnumber", "--disc", "5"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad discriminant"));
}

#[test]
fn fd_and_gd() {
    let f = json(&["fd", "--level", "2", "--disc", "4", "--terms", "5", "--json"]);
    assert_eq!(f["coeffs"][1], serde_json::json!([1, "-52/1"]));
    let g = json(&["gd", "--level", "2", "--disc", "4", "--terms", "5", "--json"]);
    assert_eq!(g["coeffs"][0], serde_json::json!([-4, "1/1"]));
    let (code, _, err) = call(&["fd", "--level", "2", "--disc", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not a square"));
}

#[test]
fn trace_value() {
    let (code, out, _) = call(&["trace", "--level", "2", "--disc", "4", "--m", "1"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "J_1(4) = -52"));
}

#[test]
fn product_with_cm_certificate() {
    let v = json(&["product", "--level", "2", "--disc", "4", "--terms", "10", "--with-cm", "--json"]);
    assert_eq!(v["status"]["matched"], true);
    assert_eq!(v["product_side"], v["cm_side"]);
    assert_eq!(v["product_side"], v["trace_side"]);
    assert_eq!(v["a_star"][0], serde_json::json!([1, "-52"]));
    assert!(v["cm_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn product_refuses_level_four() {
    let (code, _, err) = call(&["product", "--level", "4", "--disc", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("level 4 is refused"), "{err}");
}

#[test]
fn product_mismatch_outside_heegner_condition_exits_one() {
    let (code, out, _) = call(&["product", "--level", "6", "--disc", "12", "--terms", "6", "--with-cm"]);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("MISMATCH"));
}

#[test]
fn recursion_both_directions() {
    let (code, out, _) = call(&["recursion", "--level", "2", "--disc", "4", "--from-c", "104,4372,96256"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "A*(1) = -52\nA*(2) = 544\nA*(3) = -8244");
    let v = json(&["recursion", "--level", "2", "--disc", "4", "--upto", "3", "--json"]);
    assert_eq!(v["values"], serde_json::json!(["104", "4372", "96256"]));
    let (code, _, err) = call(&["recursion", "--level", "2", "--disc", "4", "--from-c", "105"]);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(err.contains("non-integral"));
    let (code, _, _) = call(&["recursion", "--level", "2", "--disc", "4", "--from-c", "1,x"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn cm_eval_output() {
    let v = json(&["cm-eval", "--level", "3", "--disc", "3", "--bits", "128", "--terms", "4", "--json"]);
    assert!(v["values"][0]["re"].as_str().unwrap().starts_with("-42.000000"));
    assert_eq!(v["series"]["coeffs"][0], serde_json::json!([-1, "1/1"]));
}

#[test]
fn verify_appendix_level_two() {
    let (code, out, _) = call(&["verify", "--suite", "appendix", "--level", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("f_4, f_7: all coefficients match"), "{out}");
}

#[test]
fn verify_with_corrupted_fixture_locates_the_difference() {
    let mut set = borcherds::fixtures::FixtureSet::embedded();
    set.fd_tables.iter_mut().find(|t| t.level == 3 && t.d == 8).unwrap().coeffs[2].1 += 7;
    let path = std::env::temp_dir().join(format!("borcherds-fixture-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(&set).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["verify", "--suite", "appendix", "--fixtures", p, "--json"]);
    let (code_other, _, _) = call(&["verify", "--suite", "classnumbers", "--fixtures", p]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, EXIT_MISMATCH);
    assert_eq!(code_other, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let failing: Vec<&Value> = v["suites"][0]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0]["detail"].as_str().unwrap().starts_with("f_8 q^"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&[]).0, EXIT_USAGE);
    assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
    assert_eq!(call(&["hauptmodul", "--level", "7"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn coefficient_lists() {
    assert_eq!(parse_coefficient_list(" 1, -2 ,3").unwrap(), vec![1, -2, 3]);
    assert!(parse_coefficient_list("").is_err());
    assert!(parse_coefficient_list("1,,2").is_err());
    assert!(parse_coefficient_list("+1").is_err());
}
