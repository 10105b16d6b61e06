//! Argument handling and output for the `borcherds` binary.

use std::io::Write;
use std::path::PathBuf;

use borcherds::borcherds::{delta_and_pole, recursion_a_from_c, recursion_c_from_a, trace_j, verify_theorem};
use borcherds::cm::{cm_product_side_adaptive, default_bits, CMPoint};
use borcherds::fixtures::FixtureSet;
use borcherds::hauptmodul::{faber_with_series, hauptmodul_expand, hecke_t};
use borcherds::plus_space::{build_fd, build_gd};
use borcherds::quad_forms::{class_number_h, classes_level};
use borcherds::series::{format_rational, parse_integer};
use borcherds::verify::{run_suite, verify_all, Options, Suite, SuiteReport};
use borcherds::{Error, Level, QSeries};
use clap::{Parser, Subcommand};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "borcherds", version, about = "Hauptmoduls, plus-space forms and Borcherds products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-expansion of the Hauptmodul of level N
    Hauptmodul {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 20)]
        terms: i64,
        #[arg(long)]
        json: bool,
    },
    /// Faber polynomial t_n = P_n(t) and its expansion
    Faber {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 20)]
        terms: i64,
        #[arg(long)]
        json: bool,
    },
    /// t_n | T(m)
    Hecke {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 20)]
        terms: i64,
        #[arg(long)]
        json: bool,
    },
    /// Hurwitz class number H(d)
    Classnumber {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        json: bool,
    },
    /// Level-N form classes of discriminant -d with weights and CM points
    Forms {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Weight 1/2 plus-space form f_d
    Fd {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 20)]
        terms: i64,
        #[arg(long)]
        json: bool,
    },
    /// Weight 3/2 plus-space form g_D
    Gd {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 20)]
        terms: i64,
        #[arg(long)]
        json: bool,
    },
    /// Trace J_m(d) of singular moduli
    Trace {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        json: bool,
    },
    /// Product and trace sides of the product identity, compared
    Product {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 30)]
        terms: u64,
        #[arg(long)]
        with_cm: bool,
        #[arg(long)]
        json: bool,
    },
    /// A*(m^2, d) from c(m), or c(m) from A*(m^2, d)
    Recursion {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 10)]
        upto: u64,
        /// Comma-separated c(1), c(2), ...
        #[arg(long, allow_hyphen_values = true)]
        from_c: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Numerical CM values and the rounded product series
    CmEval {
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, env = "BORCHERDS_CM_BITS")]
        bits: Option<u32>,
        #[arg(long, default_value_t = 10)]
        terms: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run verification suites
    Verify {
        /// appendix, duality, replication, theorem, recursion, classnumbers, cm or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, default_value_t = 6)]
        max_m: u64,
        /// Largest d for the duality suite
        #[arg(long, default_value_t = 100)]
        max: i64,
        #[arg(long)]
        terms: Option<u64>,
        /// Replacement fixture file
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `c1,c2,...` into integers. Whitespace around entries is allowed.
pub fn parse_coefficient_list(text: &str) -> Result<Vec<rug::Integer>, Error> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    text.split(',').map(|s| parse_integer(s.trim())).collect()
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::RoundingTooLarge { .. } | Error::NonIntegralResult { .. } | Error::LinearAlgebraFailure(_) => {
                Failure::Mismatch(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_MISMATCH,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Mismatch(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_MISMATCH
        }
    }
}

fn level(n: u32) -> Result<Level, Failure> {
    Ok(Level::new(n)?)
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> Outcome {
    writeln!(out, "{}", text.as_ref()).map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
    Ok(true)
}

fn emit_json(out: &mut dyn Write, value: serde_json::Value) -> Outcome {
    emit(out, value.to_string())
}

fn emit_series(out: &mut dyn Write, s: &QSeries, json: bool) -> Outcome {
    if json {
        emit(out, s.to_json())
    } else {
        emit(out, s.to_string())
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Hauptmodul { level: n, terms, json } => emit_series(out, &hauptmodul_expand(level(n)?, terms), json),
        Command::Faber { level: n, n: idx, terms, json } => {
            let (poly, series) = faber_with_series(level(n)?, idx, terms);
            if json {
                let coeffs: Vec<String> = poly.coeffs.iter().map(|c| c.to_string()).collect();
                emit_json(out, json!({"polynomial": coeffs, "series": series.to_json_value()}))
            } else {
                emit(out, format!("t_{idx} = {poly}\n{series}"))
            }
        }
        Command::Hecke { level: n, n: idx, m, terms, json } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be positive".into()));
            }
            emit_series(out, &hecke_t(level(n)?, idx, m, terms), json)
        }
        Command::Classnumber { disc, json } => {
            let h = format_rational(&class_number_h(disc)?);
            if json {
                emit_json(out, json!({"d": disc, "H": h}))
            } else {
                emit(out, format!("H({disc}) = {h}"))
            }
        }
        Command::Forms { disc, level: n, json } => {
            let cl = classes_level(disc, level(n)?.get())?;
            if json {
                let roots: Vec<_> = cl.classes.iter().map(|c| CMPoint::from_form(&c.form)).collect();
                emit_json(
                    out,
                    json!({"d": cl.d, "level": cl.level, "classes": cl.classes, "roots": roots, "H": format_rational(&cl.total_weight())}),
                )
            } else {
                let mut text = String::new();
                for c in &cl.classes {
                    let p = CMPoint::from_form(&c.form);
                    text += &format!(
                        "[{}, {}, {}]  weight {}  root ({}, {}, {})\n",
                        c.form.a,
                        c.form.b,
                        c.form.c,
                        format_rational(&c.weight),
                        p.a,
                        p.b,
                        p.d
                    );
                }
                text += &format!("total weight {}", format_rational(&cl.total_weight()));
                emit(out, text)
            }
        }
        Command::Fd { level: n, disc, terms, json } => emit_series(out, &build_fd(level(n)?, disc, terms)?.series, json),
        Command::Gd { level: n, disc, terms, json } => emit_series(out, &build_gd(level(n)?, disc, terms)?.series, json),
        Command::Trace { level: n, disc, m, json } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be positive".into()));
            }
            let j = trace_j(level(n)?, m, disc)?;
            if json {
                emit_json(out, json!({"level": n, "d": disc, "m": m, "J": j.to_string()}))
            } else {
                emit(out, format!("J_{m}({disc}) = {j}"))
            }
        }
        Command::Product { level: n, disc, terms, with_cm, json } => {
            let cert = verify_theorem(level(n)?, disc, terms, with_cm)?;
            if json {
                emit_json(out, serde_json::to_value(&cert).expect("certificate serializes"))?;
            } else {
                let mut text = format!(
                    "N={} d={} H(d)={} delta={} terms={}\nproduct side:\n{}\n",
                    cert.level, cert.d, cert.class_number, cert.delta, cert.terms, cert.product_side
                );
                if let (Some(r), Some(b)) = (cert.cm_residual, cert.cm_bits) {
                    text += &format!("cm side rounded with residual {r:.3e} at {b} bits\n");
                }
                text += &match cert.status.first_mismatch {
                    None => "status: match".to_string(),
                    Some(e) => format!("status: MISMATCH (first at q^{e})"),
                };
                emit(out, text)?;
            }
            Ok(cert.status.matched)
        }
        Command::Recursion { level: n, disc, upto, from_c, json } => {
            let lv = level(n)?;
            let (label, values) = match from_c {
                Some(text) => {
                    let c = parse_coefficient_list(&text)?;
                    let (delta, _) = delta_and_pole(disc)?;
                    ("A*", recursion_a_from_c(&delta, &c)?)
                }
                None => ("c", recursion_c_from_a(lv, disc, upto)?),
            };
            if json {
                let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
                emit_json(out, json!({"level": n, "d": disc, "kind": label, "values": v}))
            } else {
                let rows: Vec<String> = values.iter().enumerate().map(|(i, v)| format!("{label}({}) = {v}", i + 1)).collect();
                emit(out, rows.join("\n"))
            }
        }
        Command::CmEval { level: n, disc, bits, terms, json } => {
            let bits = bits.unwrap_or_else(default_bits);
            let p = cm_product_side_adaptive(level(n)?, disc, terms, bits)?;
            if json {
                let values: Vec<_> = p
                    .values
                    .iter()
                    .map(|v| {
                        json!({
                            "form": v.form,
                            "weight": format_rational(&v.weight),
                            "re": format!("{:.40}", v.value.real()),
                            "im": format!("{:.40}", v.value.imag()),
                        })
                    })
                    .collect();
                emit_json(
                    out,
                    json!({"values": values, "series": p.series.to_json_value(), "residual": p.residual, "bits": p.bits}),
                )
            } else {
                let mut text = String::new();
                for v in &p.values {
                    text += &format!(
                        "t([{}, {}, {}]) = {} + {} i  (weight {})\n",
                        v.form.a,
                        v.form.b,
                        v.form.c,
                        format!("{:.30}", v.value.real()),
                        format!("{:.10}", v.value.imag()),
                        format_rational(&v.weight)
                    );
                }
                text += &format!("rounded product (residual {:.3e}, {} bits):\n{}", p.residual, p.bits, p.series);
                emit(out, text)
            }
        }
        Command::Verify { suite, level: n, max_m, max, terms, fixtures, json } => {
            let mut opts = Options { max_m, duality_max_d: max, ..Options::default() };
            if let Some(n) = n {
                opts.level = Some(level(n)?);
            }
            if let Some(t) = terms {
                opts.theorem_terms = t;
            }
            if let Some(path) = fixtures {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                opts.fixtures = FixtureSet::from_json(&text)?;
            }
            let reports: Vec<SuiteReport> = if suite == "all" {
                verify_all(&opts)
            } else {
                vec![run_suite(suite.parse::<Suite>()?, &opts)]
            };
            let passed = reports.iter().all(SuiteReport::passed);
            if json {
                emit_json(out, json!({"passed": passed, "suites": reports}))?;
            } else {
                let text: String = reports.iter().map(|r| r.to_string()).collect();
                emit(out, text.trim_end())?;
            }
            Ok(passed)
        }
    }
}
