//! Smooth increasing curves with prescribed `I ρ(1)`, `I² ρ(1)`, `I³ ρ(1)`.
//!
//! The two-step function `f_{u,v}` is replaced by a polyline `ψ` with steep
//! risers and nearly flat plateaus at heights `v/u` and `(t-v)/(1-u)`.
//! Its corners are rounded, its ends are capped by the jet curves, and the
//! three parameters `t`, `v`, `u` are found by nested bisection.

use serde::Serialize;

use crate::corner::{polyline_pieces, PolylinePlan};
use crate::curve::{Curve, Integration, DEFAULT_QUAD_TOL};
use crate::jets::{left_cap_pieces, right_cap_pieces, JetCapSpec, JetPair};
use crate::region::{classify, FeasibleTriple};
use crate::stepfn::{extremal, in_triangle, line_l_v, solve_u_on_line, third_integral_on_line};
use crate::{Error, Result};

/// A point `(δ, u, v, t)` of the parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SParams {
    pub delta: f64,
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

impl SParams {
    pub fn m1(&self) -> f64 {
        self.v / self.u
    }

    pub fn m2(&self) -> f64 {
        (self.t - self.v) / (1.0 - self.u)
    }

    /// Membership in the open set where `ψ` is well defined.
    pub fn in_s(&self) -> bool {
        let SParams { delta: d, u, .. } = *self;
        let (m1, m2) = (self.m1(), self.m2());
        d > 0.0
            && d < 1.0
            && 3.0 * d < u
            && u < 1.0 - 3.0 * d
            && 2.0 * d < m1
            && m1 + 2.0 * d < m2
            && m2 < 1.0 - 3.0 * d
    }
}

/// `δ(u, v)` and the `t`-bracket on which every `t` keeps `(δ, u, v, t)` in `S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaWindow {
    pub delta_uv: f64,
    pub t1: f64,
    pub t2: f64,
}

pub fn delta_window(u: f64, v: f64, a: f64) -> Result<DeltaWindow> {
    if !(u > 0.0 && u < 1.0) || !in_triangle(u, v, a, true) {
        return Err(Error::OutsideTriangle { u, v });
    }
    let m1 = v / u;
    let f = (a - m1) / (8.0 - 2.0 * u);
    let g = (1.0 - u - a + v) / (9.0 - 3.0 * u);
    let d = [
        f / 2.0,
        g / 2.0,
        1.0,
        u / 3.0,
        (1.0 - u) / 3.0,
        v / (2.0 * u),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let mid = |x: f64, y: f64| 0.5 * (x + y);
    let lo = mid(m1 + 2.0 * d, (a - 6.0 * d - v) / (1.0 - u));
    let hi = mid((a + 6.0 * d - v) / (1.0 - u), 1.0 - 3.0 * d);
    Ok(DeltaWindow {
        delta_uv: d,
        t1: v + (1.0 - u) * lo,
        t2: v + (1.0 - u) * hi,
    })
}

// Where y = m + δx meets the line of slope 1/δ through (x0, y0).
fn meet(m: f64, delta: f64, (x0, y0): (f64, f64)) -> (f64, f64) {
    let y = (m + delta * x0 - delta * delta * y0) / (1.0 - delta * delta);
    (x0 + delta * (y - y0), y)
}

/// The corner points `A..F` of `ψ`, with half-width `δ²/2`.
pub fn build_psi(p: &SParams) -> Result<PolylinePlan> {
    if !p.in_s() {
        return Err(Error::Inadmissible(format!("{p:?} is not in S")));
    }
    let d = p.delta;
    let (m1, m2, u) = (p.m1(), p.m2(), p.u);
    let pa = (d, d);
    let pf = (1.0 - d, 1.0 - d);
    let pb = meet(m1, d, pa);
    let pc = meet(m1, d, (u, 0.0));
    let pd = meet(m2, d, (u, 0.0));
    let pe = meet(m2, d, pf);
    let eta = d * d / 2.0;
    let d2 = d * d;
    // Offsets from 0, u and 1: near u or 1 the δ² gaps fall below an ulp of
    // the absolute coordinates, so the orderings are checked relative.
    let (cx, dx) = (d * pc.1, d * pd.1);
    let (ex, fx) = (-d + d * (pe.1 - pf.1), -d);
    let chains: [(&str, Vec<f64>); 3] = [
        (
            "a+η < b-η < b+δ² < 2δ",
            vec![pa.0 + eta, pb.0 - eta, pb.0 + d2, 2.0 * d],
        ),
        (
            "u < c-δ² < c+η < d-η < d+δ² < u+δ",
            vec![0.0, cx - d2, cx + eta, dx - eta, dx + d2, d],
        ),
        (
            "1-2δ < e-δ² < e+η < f-η",
            vec![-2.0 * d, ex - d2, ex + eta, fx - eta],
        ),
    ];
    for (name, xs) in &chains {
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Inadmissible(format!(
                "corner ordering {name} fails at {p:?}"
            )));
        }
    }
    Ok(PolylinePlan {
        points: vec![pa, pb, pc, pd, pe, pf],
        slope_in: 1.0,
        slope_out: 1.0,
        eta,
        domain: [d / 2.0, 1.0 - d / 2.0],
    })
}

/// `ρ`: left cap on `[0, δ/2]`, rounded `ψ`, right cap on `[1-δ/2, 1]`.
/// Both caps must have been built for `p.delta`.
pub fn build_rho_with_caps(p: &SParams, caps: &(JetCapSpec, JetCapSpec)) -> Result<Curve> {
    if caps.0.delta != p.delta || caps.1.delta != p.delta {
        return Err(Error::InvalidJet(format!(
            "caps were built for δ = {} and {}, not {}",
            caps.0.delta, caps.1.delta, p.delta
        )));
    }
    let plan = build_psi(p)?;
    let mut pieces = left_cap_pieces(&caps.0)?;
    pieces.extend(polyline_pieces(&plan)?);
    pieces.extend(right_cap_pieces(&caps.1)?);
    Curve::new([0.0, 1.0], pieces)
}

pub fn build_rho(p: &SParams, jets: &JetPair) -> Result<Curve> {
    build_rho_with_caps(p, &jets.caps(p.delta)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructConfig {
    pub tol_target: f64,
    pub quad_tol: f64,
    pub max_bisect: u32,
    pub epsilon_s: f64,
    pub jets: JetPair,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            tol_target: 1e-8,
            quad_tol: DEFAULT_QUAD_TOL,
            max_bisect: 200,
            epsilon_s: 0.25,
            jets: JetPair::default(),
        }
    }
}

/// Objective evaluations per level and halvings spent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Iterations {
    pub t_evals: u64,
    pub v_evals: u64,
    pub u_evals: u64,
    pub halvings: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstructParams {
    pub delta: f64,
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub theta: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: f64,
    pub s2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructResult {
    #[serde(skip)]
    pub curve: Curve,
    pub target: FeasibleTriple,
    pub achieved: FeasibleTriple,
    pub params: ConstructParams,
    pub iterations: Iterations,
    /// `|t - a| < 6δ`.
    pub t_near_a: bool,
    /// `|v - v*(u, 0)| < 2θ`.
    pub v_near_line: bool,
}

impl ConstructResult {
    pub fn max_error(&self) -> f64 {
        let (t, a) = (self.target.to_array(), self.achieved.to_array());
        (0..3).map(|i| (t[i] - a[i]).abs()).fold(0.0, f64::max)
    }

    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn bisect(
    level: &'static str,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: u32,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let f_lo = f(lo)?;
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    let f_hi = f(hi)?;
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure {
            level,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let lo_sign = f_lo.signum();
    let mut best = (f_lo.abs(), lo);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm.abs() < best.0 {
            best = (fm.abs(), mid);
        }
        if fm.abs() <= tol {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // bracket collapsed to adjacent floats; the final check decides
    Ok(best.1)
}

struct Solver<'a> {
    target: FeasibleTriple,
    cfg: &'a ConstructConfig,
    caps: (JetCapSpec, JetCapSpec),
    delta: f64,
    theta: f64,
    counts: Iterations,
}

impl Solver<'_> {
    fn moment(&self, u: f64, v: f64, t: f64, n: usize) -> Result<f64> {
        let p = SParams {
            delta: self.delta,
            u,
            v,
            t,
        };
        build_rho_with_caps(&p, &self.caps)?.iterated_integral(1.0, n, Integration::Moments)
    }

    fn solve_t(&mut self, u: f64, v: f64) -> Result<f64> {
        let w = delta_window(u, v, self.target.a)?;
        if !(self.delta < w.delta_uv) {
            return Err(Error::Inadmissible(format!(
                "δ = {} is not below δ(u, v) = {} at ({u}, {v})",
                self.delta, w.delta_uv
            )));
        }
        let (a, tol, max) = (
            self.target.a,
            self.cfg.tol_target * 1e-4,
            self.cfg.max_bisect,
        );
        bisect("t", w.t1, w.t2, tol, max, |t| {
            self.counts.t_evals += 1;
            Ok(self.moment(u, v, t, 1)? - a)
        })
    }

    fn solve_v(&mut self, u: f64) -> Result<(f64, f64)> {
        let FeasibleTriple { a, b, .. } = self.target;
        let lo = line_l_v(u, a, b) - self.theta;
        let hi = line_l_v(u, a, b) + self.theta;
        let (tol, max) = (self.cfg.tol_target * 1e-3, self.cfg.max_bisect);
        let v = bisect("v", lo, hi, tol, max, |v| {
            self.counts.v_evals += 1;
            let t = self.solve_t(u, v)?;
            Ok(self.moment(u, v, t, 2)? - b)
        })?;
        Ok((v, self.solve_t(u, v)?))
    }

    fn solve_u(&mut self, s1: f64, s2: f64) -> Result<(f64, f64, f64)> {
        let c = self.target.c;
        let (tol, max) = (self.cfg.tol_target * 1e-2, self.cfg.max_bisect);
        let u = bisect("u", s1, s2, tol, max, |u| {
            self.counts.u_evals += 1;
            let (v, t) = self.solve_v(u)?;
            Ok(self.moment(u, v, t, 3)? - c)
        })?;
        let (v, t) = self.solve_v(u)?;
        Ok((u, v, t))
    }
}

const MAX_HALVINGS: u32 = 20;
// limit for the halvings that only establish the initial θ, δ conditions
const SETUP_HALVINGS: u32 = 200;

/// A smooth increasing `ρ` on `[0,1]` with the required jets at both ends
/// and `(I ρ(1), I² ρ(1), I³ ρ(1))` within `cfg.tol_target` of `target`.
/// The target must be strictly feasible.
pub fn construct(target: &FeasibleTriple, cfg: &ConstructConfig) -> Result<ConstructResult> {
    let report = classify(target);
    if !report.feasible {
        return Err(Error::Infeasible(format!(
            "({}, {}, {}) violates the region inequalities",
            target.a, target.b, target.c
        )));
    }
    if report.row != Some(7) {
        return Err(Error::NotStrict {
            row: report.row.unwrap_or(0),
        });
    }
    if !(cfg.tol_target > 0.0 && cfg.quad_tol > 0.0 && cfg.epsilon_s > 0.0 && cfg.epsilon_s < 1.0) {
        return Err(Error::Domain(
            "tolerances must be positive and 0 < epsilon_s < 1".into(),
        ));
    }
    let FeasibleTriple { a, b, c } = *target;
    let ext = extremal(a, b)?;
    let u_star = solve_u_on_line(a, b, c)?;
    let eps = cfg.epsilon_s * (u_star - ext.u1).min(ext.u2 - u_star);
    let (s1, s2) = (u_star - eps, u_star + eps);
    let (r1, r2) = (0.5 * (ext.u1 + s1), 0.5 * (s2 + ext.u2));
    let gap = (c - third_integral_on_line(s1, a, b)).min(third_integral_on_line(s2, a, b) - c);
    let edge = r1.min(1.0 - r2);
    let delta0 = cfg.jets.delta0()?;

    let v_star = |x: f64, th: f64| line_l_v(x, a, b) + th;
    let inside = |th: f64| {
        [r1, r2].iter().all(|&x| {
            in_triangle(x, v_star(x, -th), a, true) && in_triangle(x, v_star(x, th), a, true)
        })
    };

    let mut theta = (c - ext.l).min(ext.r - c) * (1.0 - r2) * edge / 48.0;
    let mut setup = 0;
    while !(inside(theta) && 24.0 * theta / edge < gap) {
        theta /= 2.0;
        setup += 1;
        if setup > SETUP_HALVINGS {
            return Err(Error::RetryExhausted {
                halvings: setup,
                condition: "parallelogram inside T".into(),
            });
        }
    }

    let mut counts = Iterations::default();
    let mut last_failure = String::new();
    for halving in 0..=MAX_HALVINGS {
        counts.halvings = halving;
        let mut grid_min = f64::INFINITY;
        for i in 0..=32 {
            let x = r1 + (r2 - r1) * i as f64 / 32.0;
            for j in 0..=4 {
                let y = v_star(x, theta * (-1.0 + j as f64 / 2.0));
                grid_min = grid_min.min(delta_window(x, y, a)?.delta_uv);
            }
        }
        let mut delta = (0.5 * grid_min)
            .min(theta * (1.0 - r2) / (6.0 * (2.0 - r1)))
            .min(delta0);
        let mut setup = 0;
        while !(24.0 * (theta + delta) / edge < gap) {
            delta /= 2.0;
            setup += 1;
            if setup > SETUP_HALVINGS {
                return Err(Error::RetryExhausted {
                    halvings: setup,
                    condition: "24(θ+δ)/min(r1, 1-r2) < gap".into(),
                });
            }
        }
        let mut solver = Solver {
            target: *target,
            cfg,
            caps: cfg.jets.caps(delta)?,
            delta,
            theta,
            counts,
        };
        match solver.solve_u(s1, s2) {
            Ok((u, v, t)) => {
                counts = solver.counts;
                let p = SParams { delta, u, v, t };
                let curve = build_rho_with_caps(&p, &solver.caps)?;
                let qt = cfg.quad_tol / 10.0;
                let achieved = FeasibleTriple::new(
                    curve.iterated_integral_at_1(1, qt)?,
                    curve.iterated_integral_at_1(2, qt)?,
                    curve.iterated_integral_at_1(3, qt)?,
                )?;
                let result = ConstructResult {
                    curve,
                    target: *target,
                    achieved,
                    params: ConstructParams {
                        delta,
                        u,
                        v,
                        t,
                        theta,
                        r1,
                        r2,
                        s1,
                        s2,
                    },
                    iterations: counts,
                    t_near_a: (t - a).abs() < 6.0 * delta,
                    v_near_line: (v - v_star(u, 0.0)).abs() < 2.0 * theta,
                };
                if result.max_error() > cfg.tol_target {
                    return Err(Error::ToleranceNotMet {
                        target: target.to_array(),
                        achieved: achieved.to_array(),
                        tol: cfg.tol_target,
                    });
                }
                return Ok(result);
            }
            Err(
                e @ (Error::BracketFailure { .. }
                | Error::Inadmissible(_)
                | Error::OutsideTriangle { .. }),
            ) => {
                counts = solver.counts;
                last_failure = e.to_string();
                theta /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetryExhausted {
        halvings: MAX_HALVINGS,
        condition: last_failure,
    })
}
