//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! with the measured value next to its pinned tolerance, then asserts.

use std::time::{Duration, Instant};

use monoint::adaptive_gauss_legendre;
use monoint::construct::{
    build_rho, construct, delta_window, ConstructConfig, ConstructResult, SParams,
};
use monoint::corner::{hull_check, CornerSpec};
use monoint::curve::{Curve, Integration, Piece, PieceKind};
use monoint::hkernel::{h, KernelTable};
use monoint::jets::{sigma, tau, Jet, JetCapSpec, JetPair};
use monoint::region::{
    bounds_c, classify, classify_with_tolerance, row_pattern, sample_strict_with_margin,
    FeasibleTriple,
};
use monoint::stepfn::{extremal, make_two_step, random_increasing_step, StepParams};
use monoint::wn::{witness, wn_member, EndpointTuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, ok: bool, detail: String) {
    println!(
        "criterion {n} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

const C1_TOL: f64 = 1e-10;
const C1_BUDGET: f64 = 10.0;

#[test]
fn criterion_1_boundary_closed_forms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = rng.gen_range(0.05..0.95);
        let b = loop {
            let b = a * a / 2.0 + (a / 2.0 - a * a / 2.0) * rng.gen::<f64>();
            if b > a * a / 2.0 && b < a / 2.0 {
                break b;
            }
        };
        let e = extremal(a, b).unwrap();
        for (u, v, closed) in [(e.u1, e.v1, e.l), (e.u2, e.v2, e.r)] {
            let f = make_two_step(&StepParams::new(u, v, a).unwrap()).unwrap();
            let quad = f.iterated_integral_at_1(3, 1e-14).unwrap();
            worst = worst.max((quad - closed).abs());
        }
        let l = 2.0 * b * b / (3.0 * a);
        let r = (-a * a + 2.0 * a * b - 4.0 * b * b + 2.0 * b) / (6.0 * (1.0 - a));
        worst = worst.max((e.l - l).abs()).max((e.r - r).abs());
    }
    let t = secs(start.elapsed());
    report(
        1,
        "boundary closed forms",
        worst <= C1_TOL && t <= C1_BUDGET,
        format!("max error {worst:.2e} (tol {C1_TOL:e}), {t:.2} s (budget {C1_BUDGET} s)"),
    );
}

#[test]
fn criterion_2_table_rows() {
    let mut cases: Vec<(u8, FeasibleTriple)> = vec![
        (1, FeasibleTriple::new(0.0, 0.0, 0.0).unwrap()),
        (2, FeasibleTriple::new(1.0, 0.5, 1.0 / 6.0).unwrap()),
    ];
    for i in 0..5 {
        let a = 0.1 + 0.18 * i as f64;
        cases.push((
            3,
            FeasibleTriple::new(a, a * a / 2.0, a * a * a / 6.0).unwrap(),
        ));
        cases.push((4, FeasibleTriple::new(a, a / 2.0, a / 6.0).unwrap()));
        for j in 1..=4 {
            let b = a * a / 2.0 + (a / 2.0 - a * a / 2.0) * j as f64 / 5.0;
            let (l, r) = bounds_c(a, b).unwrap();
            cases.push((5, FeasibleTriple::new(a, b, l).unwrap()));
            cases.push((6, FeasibleTriple::new(a, b, r).unwrap()));
        }
    }
    let mismatches: Vec<String> = cases
        .iter()
        .filter_map(|(row, t)| {
            let rep = classify(t);
            let ok = rep.row == Some(*row) && Some(rep.equality_flags) == row_pattern(*row);
            (!ok).then(|| format!("{t:?}: row {:?}, flags {:?}", rep.row, rep.equality_flags))
        })
        .collect();
    report(
        2,
        "theorem table rows",
        mismatches.is_empty(),
        format!(
            "{} of {} exact triples match their row pattern (20 (a,b) grid values) {}",
            cases.len() - mismatches.len(),
            cases.len(),
            mismatches.first().cloned().unwrap_or_default()
        ),
    );
}

const C3_TOL: f64 = 1e-12;
const C3_BUDGET: f64 = 60.0;

fn exact_triple(f: &Curve) -> FeasibleTriple {
    let m = |n| f.iterated_integral(1.0, n, Integration::Moments).unwrap();
    FeasibleTriple::new(m(1), m(2), m(3)).unwrap()
}

fn constant_curve(k: f64) -> Curve {
    Curve::constant([0.0, 1.0], k).unwrap()
}

fn zero_one_step(u: f64) -> Curve {
    Curve::new(
        [0.0, 1.0],
        vec![
            Piece::new([0.0, u], PieceKind::Constant { value: 0.0 }),
            Piece::new([u, 1.0], PieceKind::Constant { value: 1.0 }),
        ],
    )
    .unwrap()
}

#[test]
fn criterion_3_necessity_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut violations, mut rounding) = (0usize, 0usize);
    let mut worst_slack = f64::INFINITY;
    for _ in 0..100_000 {
        let t = exact_triple(&random_increasing_step(&mut rng, 16));
        let rep = classify(&t);
        worst_slack = worst_slack.min(rep.boundary_distance);
        if !classify_with_tolerance(&t, C3_TOL).feasible {
            violations += 1;
        } else if !rep.feasible {
            rounding += 1;
        }
    }
    let mut wrong_rows = Vec::new();
    for i in 0..=100 {
        let k = i as f64 / 100.0;
        let want = match i {
            0 => 1,
            100 => 2,
            _ => 4,
        };
        let got = classify_with_tolerance(&exact_triple(&constant_curve(k)), C3_TOL).row;
        if got != Some(want) {
            wrong_rows.push(format!("constant {k}: row {got:?}"));
        }
        if (1..100).contains(&i) {
            let got = classify_with_tolerance(&exact_triple(&zero_one_step(k)), C3_TOL).row;
            if got != Some(3) {
                wrong_rows.push(format!("0/1 step at {k}: row {got:?}"));
            }
        }
    }
    let t = secs(start.elapsed());
    report(
        3,
        "necessity oracle",
        violations == 0 && wrong_rows.is_empty() && t <= C3_BUDGET,
        format!(
            "10^5 step functions, {violations} violations beyond {C3_TOL:e}, {rounding} within rounding, \
             smallest slack {worst_slack:.2e}; {} boundary families off-row; {t:.1} s (budget {C3_BUDGET} s)",
            wrong_rows.len()
        ),
    );
}

const C4_TOL: f64 = 1e-7;
const C4_CAP_TOL: f64 = 1e-15;
const C4_BUDGET: f64 = 600.0;

fn cap_error(r: &ConstructResult) -> f64 {
    let d = r.params.delta;
    let s = sigma(&JetCapSpec::new(Jet::left(vec![]), d).unwrap()).unwrap();
    let t = tau(&JetCapSpec::new(Jet::right(vec![]), d).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let x = d / 2.0 * i as f64 / 200.0;
        worst = worst.max((r.curve.eval(x).unwrap() - s.eval(x).unwrap()).abs());
        let y = 1.0 - x;
        worst = worst.max((r.curve.eval(y).unwrap() - t.eval(y).unwrap()).abs());
    }
    worst
}

#[test]
fn criterion_4_constructor_end_to_end() {
    let start = Instant::now();
    let cfg = ConstructConfig::default();
    let (mut failures, mut worst, mut worst_cap) = (Vec::new(), 0.0f64, 0.0f64);
    let mut min_slope = f64::INFINITY;
    for seed in 0..100 {
        let target = sample_strict_with_margin(seed, 0.05);
        match construct(&target, &cfg) {
            Ok(r) => {
                let want = target.to_array();
                for n in 1..=3 {
                    let got = r.curve.iterated_integral_at_1(n, 1e-12).unwrap();
                    worst = worst.max((got - want[n - 1]).abs());
                }
                min_slope = min_slope.min(r.curve.min_deriv_on_grid(10_000));
                worst_cap = worst_cap.max(cap_error(&r));
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let t = secs(start.elapsed());
    report(
        4,
        "constructor end to end",
        failures.is_empty() && worst <= C4_TOL && min_slope > 0.0 && worst_cap <= C4_CAP_TOL && t <= C4_BUDGET,
        format!(
            "{}/100 built, max integral error {worst:.2e} (tol {C4_TOL:e}), min slope {min_slope:.2e} (> 0), \
             end-cap deviation {worst_cap:.1e} (tol {C4_CAP_TOL:e}), {t:.1} s (budget {C4_BUDGET} s) {}",
            100 - failures.len(),
            failures.first().cloned().unwrap_or_default()
        ),
    );
}

fn random_sparams(rng: &mut ChaCha8Rng) -> SParams {
    loop {
        let a: f64 = rng.gen_range(0.1..0.9);
        let u: f64 = rng.gen_range(0.1..0.9);
        let lo = (u - (1.0 - a)).max(0.0);
        let v = lo + (a * u - lo) * rng.gen_range(0.1..0.9);
        let Ok(w) = delta_window(u, v, a) else {
            continue;
        };
        let p = SParams {
            delta: w.delta_uv * rng.gen_range(0.05..0.95),
            u,
            v,
            t: w.t1 + (w.t2 - w.t1) * rng.gen::<f64>(),
        };
        if p.in_s() {
            return p;
        }
    }
}

#[test]
fn criterion_5_perturbation_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let jets = JetPair::default();
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..50 {
        let p = random_sparams(&mut rng);
        let rho = build_rho(&p, &jets).unwrap();
        let step = make_two_step(&StepParams::new(p.u, p.v, p.t).unwrap()).unwrap();
        for i in 1..=64 {
            let x = i as f64 / 64.0;
            for n in 1..=3 {
                let a = rho.iterated_integral(x, n, Integration::Moments).unwrap();
                let b = step.iterated_integral(x, n, Integration::Moments).unwrap();
                worst_ratio = worst_ratio.max((a - b).abs() / (6.0 * p.delta));
            }
        }
    }
    let cfg = ConstructConfig::default();
    let mut bad_runs = 0;
    for seed in 1000..1020 {
        let r = construct(&sample_strict_with_margin(seed, 0.05), &cfg).unwrap();
        let t_ok = (r.params.t - r.target.a).abs() < 6.0 * r.params.delta;
        let v_star = r.target.a * r.params.u - r.target.a + 2.0 * r.target.b;
        let v_ok = (r.params.v - v_star).abs() < 2.0 * r.params.theta;
        if !(t_ok && v_ok && r.t_near_a && r.v_near_line) {
            bad_runs += 1;
        }
    }
    report(
        5,
        "perturbation bounds",
        worst_ratio < 1.0 && bad_runs == 0,
        format!(
            "max |I^n ρ - I^n f|/(6δ) = {worst_ratio:.3} (< 1) over 50 SParams x 64 points x n=1..3; \
             {bad_runs}/20 solver runs outside |t-a| < 6δ, |v-v*| < 2θ"
        ),
    );
}

const C6_H1_TOL: f64 = 1e-12;
const C6_SYM_TOL: f64 = 1e-14;
const C6_REFL_TOL: f64 = 2e-13;

#[test]
fn criterion_6_kernel_identities() {
    let table = KernelTable::global();
    let oracle = |s: f64| adaptive_gauss_legendre(&h, 0.0, s, 1e-15);
    let h1 = (table.integral(1.0) - 0.5)
        .abs()
        .max((oracle(1.0) - 0.5).abs());
    let mut sym: f64 = 0.0;
    for i in 0..10_000 {
        let x = (i as f64 + 0.5) / 10_000.0;
        sym = sym.max((h(x) + h(1.0 - x) - 1.0).abs());
    }
    let mut refl: f64 = 0.0;
    for i in 0..=200 {
        let s = i as f64 / 200.0;
        // identity on the independent quadrature, and the table against it
        refl = refl
            .max((oracle(1.0 - s) - (0.5 - s + oracle(s))).abs())
            .max((table.integral(1.0 - s) - (0.5 - s + table.integral(s))).abs())
            .max((table.integral(s) - oracle(s)).abs());
    }
    report(
        6,
        "kernel identities",
        h1 <= C6_H1_TOL && sym <= C6_SYM_TOL && refl <= C6_REFL_TOL,
        format!(
            "|H(1)-1/2| = {h1:.1e} (tol {C6_H1_TOL:e}), symmetry {sym:.1e} (tol {C6_SYM_TOL:e}), \
             reflection {refl:.1e} (tol {C6_REFL_TOL:e})"
        ),
    );
}

const C7_TOL: f64 = 1e-12;

#[test]
fn criterion_7_corner_suite() {
    let table = KernelTable::global();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut edge, mut trans, mut slope_out, mut hull_fail) = (0.0f64, 0.0f64, 0usize, 0usize);
    for _ in 0..1000 {
        let m1 = rng.gen_range(-2.0..2.0);
        let m2 = m1 + rng.gen_range(1e-3..3.0);
        let g = CornerSpec::new(
            m1,
            m2,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(1e-4..0.5),
        )
        .unwrap();
        let [lo, hi] = g.window();
        let inner = |x: f64| {
            g.c + g.m1 * (x - g.a)
                + 2.0 * g.delta * (g.m2 - g.m1) * table.integral((x - lo) / (2.0 * g.delta))
        };
        edge = edge
            .max((inner(lo) - g.polyline(lo)).abs())
            .max((inner(hi) - g.polyline(hi)).abs());
        for k in 1..=8 {
            let out = g.delta * k as f64 / 4.0;
            edge = edge
                .max((g.value(lo - out, table) - g.polyline(lo - out)).abs())
                .max((g.value(hi + out, table) - g.polyline(hi + out)).abs());
        }
        let (sx, sy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let moved = CornerSpec::new(m1, m2, g.a + sx, g.c + sy, g.delta).unwrap();
        for k in 0..=16 {
            let x = lo + (hi - lo) * k as f64 / 16.0;
            trans = trans.max((moved.value(x + sx, table) - sy - g.value(x, table)).abs());
            let s = g.slope(x);
            if !(s >= m1 && s <= m2) {
                slope_out += 1;
            }
        }
        if !hull_check(&g, 64) {
            hull_fail += 1;
        }
    }
    report(
        7,
        "corner suite",
        edge <= C7_TOL && trans <= C7_TOL && slope_out == 0 && hull_fail == 0,
        format!(
            "1000 corners: polyline agreement {edge:.1e}, translation {trans:.1e} (tol {C7_TOL:e}), \
             {slope_out} slopes outside [m1, m2], {hull_fail} hull failures"
        ),
    );
}

const C8_TOL: f64 = 1e-7;

#[test]
fn criterion_8_wn_and_witnesses() {
    let fixed: [(&[f64], bool); 8] = [
        (&[0.3, 0.7], true),
        (&[0.7, 0.3], false),
        (&[1.0, 3.0, 5.0], true),
        (&[1.0, 3.0, 4.5], false),
        (&[1.0 / 24.0, 1.0 / 6.0, 0.5, 1.0], true),
        (&[1.0 / 24.0, 1.0 / 6.0, 1.0, 1.0], false),
        (&[5.0], true),
        (&[0.0], false),
    ];
    let wrong = fixed
        .iter()
        .filter(|(b, want)| wn_member(&EndpointTuple::new(b.to_vec()).unwrap()).unwrap() != *want)
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let cfg = ConstructConfig::default();
    let (mut built, mut worst, mut failures) = (0usize, 0.0f64, Vec::new());
    while built + failures.len() < 50 {
        let t = sample_strict_with_margin(rng.gen(), 0.05);
        let d = rng.gen_range(0.5..2.0);
        let tuple = EndpointTuple::new(vec![t.c * d, t.b * d, t.a * d, d]).unwrap();
        if !wn_member(&tuple).unwrap() {
            continue;
        }
        match witness(&tuple, None, &cfg) {
            Ok(w) => {
                let b = tuple.values();
                for j in 0..=3 {
                    let got = w.curve.iterated_integral_at_1(j, 1e-12).unwrap();
                    worst = worst.max((got - b[3 - j]).abs());
                }
                if w.curve.min_deriv_on_grid(10_000).partial_cmp(&0.0)
                    != Some(std::cmp::Ordering::Greater)
                {
                    failures.push(format!("{b:?}: not increasing"));
                }
                built += 1;
            }
            Err(e) => failures.push(format!("{:?}: {e}", tuple.values())),
        }
    }
    report(
        8,
        "W_n membership and witnesses",
        wrong == 0 && failures.is_empty() && worst <= C8_TOL,
        format!(
            "{} of {} fixed verdicts correct; {built}/50 W_3 witnesses, max condition error {worst:.2e} (tol {C8_TOL:e}) {}",
            fixed.len() - wrong,
            fixed.len(),
            failures.first().cloned().unwrap_or_default()
        ),
    );
}
