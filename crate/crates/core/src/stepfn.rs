//! Two-step functions and the geometry of the triangle `T` and line `L`.
//!
//! `f_{uvt}` is `v/u` on `[0, u)` and `(t - v)/(1 - u)` on `[u, 1]`, so that
//! `I f(u) = v` and `I f(1) = t`. With `t = a` fixed, the increasing ones
//! are parameterized by the open triangle
//! `T = {(u, v) : (u - (1 - a))₊ < v < a u}`, and `I² f(1) = b` cuts out the
//! line `L : v = a u - a + 2b`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Piece, PieceKind};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

impl StepParams {
    pub fn new(u: f64, v: f64, t: f64) -> Result<Self> {
        if !(u > 0.0 && u < 1.0) || !v.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!(
                "step parameters need 0 < u < 1, got u = {u}"
            )));
        }
        Ok(StepParams { u, v, t })
    }

    pub fn m1(&self) -> f64 {
        self.v / self.u
    }

    pub fn m2(&self) -> f64 {
        (self.t - self.v) / (1.0 - self.u)
    }
}

pub fn make_two_step(p: &StepParams) -> Result<Curve> {
    let p = StepParams::new(p.u, p.v, p.t)?;
    Curve::new(
        [0.0, 1.0],
        vec![
            Piece::new([0.0, p.u], PieceKind::Constant { value: p.m1() }),
            Piece::new([p.u, 1.0], PieceKind::Constant { value: p.m2() }),
        ],
    )
}

pub fn in_triangle(u: f64, v: f64, a: f64, strict: bool) -> bool {
    let floor = (u - (1.0 - a)).max(0.0);
    let roof = a * u;
    if strict {
        floor < v && v < roof
    } else {
        floor <= v && v <= roof
    }
}

/// `v = a u - a + 2b`.
pub fn line_l_v(u: f64, a: f64, b: f64) -> f64 {
    a * u - a + 2.0 * b
}

/// Ends of `L ∩ T` and the extreme third integrals attained there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremalData {
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
    pub l: f64,
    pub r: f64,
}

pub fn extremal(a: f64, b: f64) -> Result<ExtremalData> {
    if !(a > 0.0 && a < 1.0) || !(b >= a * a / 2.0 && b < a / 2.0) {
        return Err(Error::Domain(format!(
            "extremal data need 0 < a < 1 and a²/2 ≤ b < a/2, got ({a}, {b})"
        )));
    }
    let u1 = 1.0 - 2.0 * b / a;
    let u2 = (1.0 - 2.0 * a + 2.0 * b) / (1.0 - a);
    let v2 = (2.0 * b - a * a) / (1.0 - a);
    let (l, r) = crate::region::bounds_c(a, b)?;
    Ok(ExtremalData {
        u1,
        v1: 0.0,
        u2,
        v2,
        l,
        r,
    })
}

/// `I³ f_{u, v}(1)` for `(u, v)` on `L`: `((a - 2b) u - a + 4b) / 6`.
pub fn third_integral_on_line(u: f64, a: f64, b: f64) -> f64 {
    ((a - 2.0 * b) * u - a + 4.0 * b) / 6.0
}

/// The `u` on `L` with [`third_integral_on_line`] equal to `c`.
pub fn solve_u_on_line(a: f64, b: f64, c: f64) -> Result<f64> {
    let slope = a - 2.0 * b;
    if !(slope > 0.0) {
        return Err(Error::Domain(format!(
            "line L is degenerate: a - 2b = {slope}"
        )));
    }
    Ok((6.0 * c + a - 4.0 * b) / slope)
}

/// A random increasing step function on `[0,1]` with values in `[0,1]`:
/// up to `max_steps` steps, sorted uniform jump locations and sorted
/// uniform values.
pub fn random_increasing_step<R: Rng>(rng: &mut R, max_steps: usize) -> Curve {
    let steps = rng.gen_range(1..=max_steps.max(1));
    let mut cuts: Vec<f64> = (0..steps - 1).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.retain(|&x| x > 0.0 && x < 1.0);
    let mut values: Vec<f64> = (0..=cuts.len()).map(|_| rng.gen::<f64>()).collect();
    values.sort_by(f64::total_cmp);
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(1.0);
    let pieces = edges
        .windows(2)
        .zip(values)
        .map(|(w, value)| Piece::new([w[0], w[1]], PieceKind::Constant { value }))
        .collect();
    Curve::new([0.0, 1.0], pieces).expect("sorted cuts partition [0,1]")
}
