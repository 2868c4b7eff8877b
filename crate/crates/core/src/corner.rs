//! Rounding of polyline corners with the kernel `H`.
//!
//! For `γ = (m1, m2, a, c, δ)` the two-line function
//! `F_γ(x) = c + m1 (x - a)` (left of `a`), `c + m2 (x - a)` (right) is
//! replaced on `(a-δ, a+δ)` by
//!
//! ```text
//! G_γ(x) = c + m1 (x - a) + 2δ (m2 - m1) H((x - a + δ) / 2δ)
//! ```
//!
//! whose derivative `m1 + (m2 - m1) h(·)` moves monotonically between the
//! two slopes.

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Piece, PieceKind};
use crate::hkernel::{dh, h, KernelTable};
use crate::poly::Poly;
use crate::quad::adaptive_checked;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerSpec {
    pub m1: f64,
    pub m2: f64,
    pub a: f64,
    pub c: f64,
    pub delta: f64,
}

impl CornerSpec {
    pub fn new(m1: f64, m2: f64, a: f64, c: f64, delta: f64) -> Result<Self> {
        let g = CornerSpec {
            m1,
            m2,
            a,
            c,
            delta,
        };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let finite = [self.m1, self.m2, self.a, self.c, self.delta]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidCurve(
                "corner parameters must be finite".into(),
            ));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidCurve(format!(
                "corner half-width must be positive, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn window(&self) -> [f64; 2] {
        [self.a - self.delta, self.a + self.delta]
    }

    /// The unrounded two-line function `F_γ`.
    pub fn polyline(&self, x: f64) -> f64 {
        if x <= self.a {
            self.c + self.m1 * (x - self.a)
        } else {
            self.c + self.m2 * (x - self.a)
        }
    }

    fn phase(&self, x: f64) -> f64 {
        (x - self.a + self.delta) / (2.0 * self.delta)
    }

    /// `G_γ(x)`, defined for every real `x`.
    pub fn value(&self, x: f64, table: &KernelTable) -> f64 {
        let [lo, hi] = self.window();
        if x <= lo {
            self.c + self.m1 * (x - self.a)
        } else if x >= hi {
            self.c + self.m2 * (x - self.a)
        } else {
            self.c
                + self.m1 * (x - self.a)
                + 2.0 * self.delta * (self.m2 - self.m1) * table.integral(self.phase(x))
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        let [lo, hi] = self.window();
        if x <= lo {
            self.m1
        } else if x >= hi {
            self.m2
        } else {
            self.m1 + (self.m2 - self.m1) * h(self.phase(x))
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        (self.m2 - self.m1) * dh(self.phase(x)) / (2.0 * self.delta)
    }

    /// The corner of `x ↦ 1 - G_γ(1 - x)`.
    pub fn reflect(&self) -> CornerSpec {
        CornerSpec {
            m1: self.m2,
            m2: self.m1,
            a: 1.0 - self.a,
            c: 1.0 - self.c,
            delta: self.delta,
        }
    }

    /// `∫_lo^hi G_γ(x) w(x) dx`. A fully covered window uses the kernel
    /// moments; a partially covered one falls back to quadrature at `tol`.
    pub(crate) fn weighted_integral(
        &self,
        lo: f64,
        hi: f64,
        w: &Poly,
        tol: Option<f64>,
        table: &KernelTable,
    ) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let [wl, wr] = self.window();
        let mut total = 0.0;

        let left_end = hi.min(wl);
        if left_end > lo {
            total += line_weighted(self.c, self.m1, self.a, lo, left_end, w);
        }
        let right_start = lo.max(wr);
        if hi > right_start {
            total += line_weighted(self.c, self.m2, self.a, right_start, hi, w);
        }

        let (p, q) = (lo.max(wl), hi.min(wr));
        if q > p {
            let full = p == wl && q == wr;
            total += match tol {
                None if full => self.window_by_moments(w, table),
                _ => {
                    let tol = tol.unwrap_or(FALLBACK_TOL);
                    let f = |x: f64| self.value(x, table) * w.eval(x);
                    adaptive_checked(&f, p, q, tol).ok_or_else(|| {
                        Error::InvalidCurve(format!("quadrature did not converge on [{p}, {q}]"))
                    })?
                }
            };
        }
        Ok(total)
    }

    fn window_by_moments(&self, w: &Poly, table: &KernelTable) -> f64 {
        let d = self.delta;
        // x = a - δ + 2δτ,  τ ∈ [0, 1]
        let q = w.compose_affine(2.0 * d, self.a - d);
        let linear = Poly::linear(self.c - d * self.m1, 2.0 * d * self.m1);
        let base = 2.0 * d * (&linear * &q).integral_from_zero(1.0);
        let bump: f64 = q
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, qj)| qj * table.integral_moment(j))
            .sum();
        base + 4.0 * d * d * (self.m2 - self.m1) * bump
    }
}

pub(crate) const FALLBACK_TOL: f64 = 1e-14;

/// `∫_lo^hi (c + m (x - a)) w(x) dx` in the local variable `y = x - lo`.
pub(crate) fn line_weighted(c: f64, m: f64, a: f64, lo: f64, hi: f64, w: &Poly) -> f64 {
    let line = Poly::linear(c + m * (lo - a), m);
    (&line * &w.compose_affine(1.0, lo)).integral_from_zero(hi - lo)
}

/// `G_γ` as a curve on its window `[a-δ, a+δ]`; a straight piece when the
/// slopes agree.
pub fn round_corner(g: &CornerSpec) -> Result<Curve> {
    g.validate()?;
    let [lo, hi] = g.window();
    let kind = if g.m1 == g.m2 {
        PieceKind::Polynomial {
            origin: g.a,
            coeffs: vec![g.c, g.m1],
        }
    } else {
        PieceKind::CornerBlend(*g)
    };
    Curve::new([lo, hi], vec![Piece::new([lo, hi], kind)])
}

/// Corner points of a polyline, rounded with one shared half-width `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylinePlan {
    pub points: Vec<(f64, f64)>,
    pub slope_in: f64,
    pub slope_out: f64,
    pub eta: f64,
    pub domain: [f64; 2],
}

impl PolylinePlan {
    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidPolyline(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidPolyline("no corner points".into()));
        }
        for (i, w) in self.points.windows(2).enumerate() {
            let (x0, x1) = (w[0].0, w[1].0);
            if !(x0 + 2.0 * self.eta < x1) && !(x0 < x1 && x0 + 2.0 * self.eta == x0) {
                return Err(Error::InvalidPolyline(format!(
                    "windows around points {i} (x = {x0}) and {} (x = {x1}) overlap",
                    i + 1
                )));
            }
        }
        let first = self.points[0].0;
        let last = self.points[self.points.len() - 1].0;
        if first - self.eta < self.domain[0] || last + self.eta > self.domain[1] {
            return Err(Error::InvalidPolyline(format!(
                "corner windows leave the domain [{}, {}]",
                self.domain[0], self.domain[1]
            )));
        }
        Ok(())
    }

    /// Slopes on the `n + 1` segments, outer ones included.
    pub fn slopes(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.points.len() + 1);
        s.push(self.slope_in);
        for w in self.points.windows(2) {
            s.push((w[1].1 - w[0].1) / (w[1].0 - w[0].0));
        }
        s.push(self.slope_out);
        s
    }

    /// The unrounded polyline.
    pub fn polyline(&self, x: f64) -> f64 {
        let slopes = self.slopes();
        let i = self.points.partition_point(|p| p.0 < x);
        let (px, py) = if i == 0 {
            self.points[0]
        } else {
            self.points[i - 1]
        };
        py + slopes[i] * (x - px)
    }
}

/// The `eta`-modification of the polyline: straight pieces outside the
/// windows `(x_i - eta, x_i + eta)`, [`round_corner`] pieces inside.
pub fn round_polyline(plan: &PolylinePlan) -> Result<Curve> {
    Curve::new(plan.domain, polyline_pieces(plan)?)
}

pub(crate) fn polyline_pieces(plan: &PolylinePlan) -> Result<Vec<Piece>> {
    plan.validate()?;
    let slopes = plan.slopes();
    let eta = plan.eta;
    let n = plan.points.len();
    let mut pieces = Vec::with_capacity(2 * n + 1);
    let mut cursor = plan.domain[0];
    for (i, &(x, y)) in plan.points.iter().enumerate() {
        let (lo, hi) = (x - eta, x + eta);
        // straight run up to this window, anchored at the previous corner
        let (ax, ay) = if i == 0 { (x, y) } else { plan.points[i - 1] };
        pieces.push(Piece::new(
            [cursor, lo],
            PieceKind::Polynomial {
                origin: ax,
                coeffs: vec![ay, slopes[i]],
            },
        ));
        let g = CornerSpec {
            m1: slopes[i],
            m2: slopes[i + 1],
            a: x,
            c: y,
            delta: eta,
        };
        let kind = if g.m1 == g.m2 {
            PieceKind::Polynomial {
                origin: x,
                coeffs: vec![y, g.m1],
            }
        } else {
            PieceKind::CornerBlend(g)
        };
        pieces.push(Piece::new([lo, hi], kind));
        cursor = hi;
    }
    let (lx, ly) = plan.points[n - 1];
    pieces.push(Piece::new(
        [cursor, plan.domain[1]],
        PieceKind::Polynomial {
            origin: lx,
            coeffs: vec![ly, plan.slope_out],
        },
    ));
    Ok(pieces)
}

/// Whether sampled points of `G_γ` stay in the triangle spanned by
/// `(a-δ, F(a-δ))`, `(a, c)`, `(a+δ, F(a+δ))`, with `1e-10` slack.
pub fn hull_check(g: &CornerSpec, samples: usize) -> bool {
    const SLACK: f64 = 1e-10;
    let table = KernelTable::global();
    let [lo, hi] = g.window();
    let (ylo, yhi) = (g.polyline(lo), g.polyline(hi));
    let samples = samples.max(3);
    (0..samples).all(|i| {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let y = g.value(x, table);
        let chord = ylo + (yhi - ylo) * (x - lo) / (hi - lo);
        let floor = g.polyline(x);
        let (bottom, top) = if chord < floor {
            (chord, floor)
        } else {
            (floor, chord)
        };
        y >= bottom - SLACK && y <= top + SLACK
    })
}
