//! The `monoint` command line.
//!
//! Everything goes through [`run`], so the binary is a thin wrapper and the
//! integration tests drive commands in-process.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use monoint::construct::{construct, ConstructConfig};
use monoint::corner::{hull_check, CornerSpec};
use monoint::curve::{Curve, Integration, DEFAULT_QUAD_TOL};
use monoint::formats::{parse_curve_json, parse_jets_json, parse_number_list, samples_csv};
use monoint::hkernel::{h, KernelTable};
use monoint::region::{
    classify_with_tolerance, sample_strict_with_margin, FeasibleTriple, DEFAULT_MARGIN,
};
use monoint::stepfn::{extremal, make_two_step, random_increasing_step, StepParams};
use monoint::wn::{vn_member, witness, wn_member, EndpointTuple, VTuple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "monoint",
    version,
    about = "Iterated integrals of increasing functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify (a, b, c) against the feasibility inequalities.
    #[command(allow_negative_numbers = true)]
    Check {
        a: f64,
        b: f64,
        c: f64,
        /// Fail unless every inequality is strict.
        #[arg(long)]
        strict: bool,
        /// Slack below which an inequality counts as an equality.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Draw strictly feasible triples.
    Sample {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Build a smooth increasing curve with the given iterated integrals.
    #[command(allow_negative_numbers = true)]
    Construct {
        a: f64,
        b: f64,
        c: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// JSON file `{"left": [...], "right": [...]}` with endpoint derivatives.
        #[arg(long)]
        jets: Option<PathBuf>,
        /// Where to write the curve; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the report; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Evaluate a curve.
    Eval {
        #[arg(long)]
        curve: PathBuf,
        /// Comma separated abscissae.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long)]
        deriv: bool,
        /// Write `x,f,df` samples to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// `I^n f` at the right end of the domain.
    Integrate {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_QUAD_TOL / 10.0)]
        tol: f64,
    },
    /// Membership of (b0, …, bn) in W_n.
    #[command(allow_negative_numbers = true)]
    Wn {
        #[arg(long)]
        n: usize,
        values: Vec<f64>,
        /// Also build a witness curve and write it here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Membership of (a0, …, an; b0, …, bn) in V_n[c, d].
    #[command(allow_negative_numbers = true)]
    Vn {
        #[arg(long)]
        n: usize,
        #[arg(long, num_args = 2, value_names = ["C", "D"], default_values_t = [0.0, 1.0])]
        interval: Vec<f64>,
        values: Vec<f64>,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Necessity,
    Construct,
    Kernel,
    Corners,
    Region,
}

impl Suite {
    fn default_trials(self) -> usize {
        match self {
            Suite::Necessity => 10_000,
            Suite::Construct => 10,
            Suite::Kernel => 10_000,
            Suite::Corners => 1000,
            Suite::Region => 1000,
        }
    }
}

type CmdResult = Result<i32, String>;

/// Runs one command line. `args[0]` is the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILED
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Check {
            a,
            b,
            c,
            strict,
            tol,
        } => check(a, b, c, strict, tol, out),
        Command::Sample {
            count,
            seed,
            margin,
        } => {
            let triples: Vec<FeasibleTriple> = (0..count as u64)
                .map(|i| sample_strict_with_margin(seed.wrapping_add(i), margin))
                .collect();
            emit(
                out,
                &serde_json::to_string_pretty(&triples).map_err(str_err)?,
            )?;
            Ok(EXIT_OK)
        }
        Command::Construct {
            a,
            b,
            c,
            tol,
            jets,
            out: curve_path,
            report,
            csv,
            points,
        } => {
            let mut cfg = ConstructConfig {
                tol_target: tol,
                ..ConstructConfig::default()
            };
            if let Some(p) = jets {
                cfg.jets = parse_jets_json(&read(&p)?).map_err(str_err)?;
            }
            let target = FeasibleTriple::new(a, b, c).map_err(str_err)?;
            let r = construct(&target, &cfg).map_err(str_err)?;
            write_or_emit(curve_path.as_deref(), &r.curve.to_json_pretty(), out)?;
            write_or_emit(report.as_deref(), &r.report_json(), out)?;
            if let Some(p) = csv {
                write(&p, &samples_csv(&r.curve, points).map_err(str_err)?)?;
            }
            Ok(EXIT_OK)
        }
        Command::Eval {
            curve,
            at,
            deriv,
            csv,
            points,
        } => {
            let f = load_curve(&curve)?;
            if at.is_none() && csv.is_none() {
                return Err("eval needs --at or --csv".into());
            }
            if let Some(list) = at {
                let xs = parse_number_list(&list).map_err(str_err)?;
                let mut rows = Vec::with_capacity(xs.len());
                for x in xs {
                    let fx = f.eval(x).map_err(str_err)?;
                    rows.push(if deriv {
                        json!({"x": x, "f": fx, "df": f.deriv(x).map_err(str_err)?})
                    } else {
                        json!({"x": x, "f": fx})
                    });
                }
                emit(out, &serde_json::to_string_pretty(&rows).map_err(str_err)?)?;
            }
            if let Some(p) = csv {
                write(&p, &samples_csv(&f, points).map_err(str_err)?)?;
            }
            Ok(EXIT_OK)
        }
        Command::Integrate { curve, order, tol } => {
            let f = load_curve(&curve)?;
            let v = f.iterated_integral_at_1(order, tol).map_err(str_err)?;
            emit(out, &serde_json::to_string(&v).map_err(str_err)?)?;
            Ok(EXIT_OK)
        }
        Command::Wn {
            n,
            values,
            witness: path,
        } => {
            if values.len() != n + 1 {
                return Err(format!(
                    "--n {n} needs {} values, got {}",
                    n + 1,
                    values.len()
                ));
            }
            let t = EndpointTuple::new(values).map_err(str_err)?;
            let member = wn_member(&t).map_err(str_err)?;
            emit(out, &json!({"n": n, "member": member}).to_string())?;
            if let (true, Some(p)) = (member, path) {
                let w = witness(&t, None, &ConstructConfig::default()).map_err(str_err)?;
                write(&p, &w.curve.to_json_pretty())?;
            }
            Ok(if member { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Vn {
            n,
            interval,
            values,
        } => {
            if values.len() != 2 * (n + 1) {
                return Err(format!(
                    "--n {n} needs {} values, got {}",
                    2 * (n + 1),
                    values.len()
                ));
            }
            let (a, b) = values.split_at(n + 1);
            let v =
                VTuple::new(a.to_vec(), b.to_vec(), [interval[0], interval[1]]).map_err(str_err)?;
            let member = vn_member(&v).map_err(str_err)?;
            emit(out, &json!({"n": n, "member": member}).to_string())?;
            Ok(if member { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Verify {
            suite,
            trials,
            seed,
        } => {
            let summary = verify(suite, trials.unwrap_or(suite.default_trials()), seed);
            emit(
                out,
                &serde_json::to_string_pretty(&summary).map_err(str_err)?,
            )?;
            Ok(if summary.failed == 0 {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
    }
}

fn check(a: f64, b: f64, c: f64, strict: bool, tol: f64, out: &mut dyn Write) -> CmdResult {
    if !(tol >= 0.0) {
        return Err(format!("--tol must be non-negative, got {tol}"));
    }
    let t = FeasibleTriple::new(a, b, c).map_err(str_err)?;
    let report = classify_with_tolerance(&t, tol);
    emit(
        out,
        &serde_json::to_string_pretty(&report).map_err(str_err)?,
    )?;
    let ok = report.feasible && (!strict || report.row == Some(7));
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn str_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), String> {
    writeln!(out, "{text}").map_err(str_err)
}

fn read(p: &Path) -> Result<String, String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn write(p: &Path, text: &str) -> Result<(), String> {
    fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))
}

fn write_or_emit(p: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), String> {
    match p {
        Some(p) => write(p, text),
        None => emit(out, text),
    }
}

fn load_curve(p: &Path) -> Result<Curve, String> {
    parse_curve_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

/// Outcome of a verification suite.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    /// Largest error seen, where the suite measures one.
    pub max_error: f64,
    pub first_failure: Option<String>,
}

/// Runs `trials` independent seeded trials of a suite in parallel.
pub fn verify(suite: Suite, trials: usize, seed: u64) -> Summary {
    let outcomes: Vec<(usize, Result<f64, String>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let r = match suite {
                Suite::Necessity => necessity_trial(&mut rng),
                Suite::Construct => construct_trial(seed.wrapping_add(i as u64)),
                Suite::Kernel => kernel_trial(&mut rng),
                Suite::Corners => corner_trial(&mut rng),
                Suite::Region => region_trial(&mut rng),
            };
            (i, r)
        })
        .collect();
    let mut s = Summary {
        suite,
        trials,
        seed,
        passed: 0,
        failed: 0,
        max_error: 0.0,
        first_failure: None,
    };
    for (i, r) in outcomes {
        match r {
            Ok(e) => {
                s.passed += 1;
                s.max_error = s.max_error.max(e);
            }
            Err(msg) => {
                s.failed += 1;
                s.first_failure.get_or_insert(format!("trial {i}: {msg}"));
            }
        }
    }
    s
}

fn moments(f: &Curve) -> Result<FeasibleTriple, String> {
    let m = |n| {
        f.iterated_integral(1.0, n, Integration::Moments)
            .map_err(str_err)
    };
    FeasibleTriple::new(m(1)?, m(2)?, m(3)?).map_err(str_err)
}

fn necessity_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let f = random_increasing_step(rng, 16);
    let t = moments(&f)?;
    let r = classify_with_tolerance(&t, 1e-12);
    if !r.feasible {
        return Err(format!("{t:?} violates the region, slacks {:?}", r.slacks));
    }
    Ok(0.0)
}

fn construct_trial(seed: u64) -> Result<f64, String> {
    let t = sample_strict_with_margin(seed, DEFAULT_MARGIN);
    let r = construct(&t, &ConstructConfig::default()).map_err(str_err)?;
    if r.max_error() > 1e-7 {
        return Err(format!("{t:?}: error {:e}", r.max_error()));
    }
    if !(r.curve.min_deriv_on_grid(10_000) > 0.0) {
        return Err(format!("{t:?}: curve is not strictly increasing"));
    }
    Ok(r.max_error())
}

fn kernel_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let table = KernelTable::global();
    let x: f64 = rng.gen();
    let sym = (h(x) + h(1.0 - x) - 1.0).abs();
    let refl = (table.integral(x) - (x - 0.5 + table.integral(1.0 - x))).abs();
    if sym > 1e-14 || refl > 2e-13 {
        return Err(format!("x = {x}: symmetry {sym:e}, reflection {refl:e}"));
    }
    Ok(sym.max(refl))
}

fn corner_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let m1 = rng.gen_range(0.0..2.0);
    let m2 = m1 + rng.gen_range(1e-3..2.0);
    let g =
        CornerSpec::new(m1, m2, rng.gen(), rng.gen(), rng.gen_range(1e-4..0.2)).map_err(str_err)?;
    let table = KernelTable::global();
    let [lo, hi] = g.window();
    let edge = (g.value(lo, table) - g.polyline(lo))
        .abs()
        .max((g.value(hi, table) - g.polyline(hi)).abs());
    if edge > 1e-12 {
        return Err(format!("{g:?}: window edge mismatch {edge:e}"));
    }
    for i in 0..=64 {
        let x = lo + (hi - lo) * i as f64 / 64.0;
        let s = g.slope(x);
        if !(s >= m1 - 1e-12 && s <= m2 + 1e-12) {
            return Err(format!("{g:?}: slope {s} at {x} leaves [m1, m2]"));
        }
    }
    if !hull_check(&g, 64) {
        return Err(format!("{g:?}: hull check failed"));
    }
    Ok(edge)
}

fn region_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let a = rng.gen_range(0.05..0.95);
    let b = loop {
        let b = a * a / 2.0 + (a / 2.0 - a * a / 2.0) * rng.gen::<f64>();
        if b > a * a / 2.0 && b < a / 2.0 {
            break b;
        }
    };
    let e = extremal(a, b).map_err(str_err)?;
    let third = |u: f64, v: f64| -> Result<f64, String> {
        let f = make_two_step(&StepParams::new(u, v, a).map_err(str_err)?).map_err(str_err)?;
        f.iterated_integral_at_1(3, 1e-13).map_err(str_err)
    };
    let err = (third(e.u1, e.v1)? - e.l)
        .abs()
        .max((third(e.u2, e.v2)? - e.r).abs());
    if err > 1e-10 {
        return Err(format!("(a, b) = ({a}, {b}): boundary error {err:e}"));
    }
    Ok(err)
}
