//! Piecewise functions on a compact interval.
//!
//! A [`Curve`] is a sorted, contiguous list of [`Piece`]s times a scalar
//! `scale`. Polynomial and constant pieces integrate in closed form; corner
//! and jet-cap pieces go through Gauss–Legendre quadrature, or through the
//! cached kernel moments with [`Integration::Moments`].
//!
//! At a breakpoint the left piece owns the value.

use serde::{Deserialize, Serialize};

use crate::corner::CornerSpec;
use crate::hkernel::KernelTable;
use crate::jets::JetCapSpec;
use crate::poly::Poly;
use crate::{Error, Result};

pub const MAX_POLY_DEGREE: usize = 8;

/// Value agreement required at a stitch, relative to `max(1, |value|)`.
pub const STITCH_TOL: f64 = 1e-12;

/// Default absolute quadrature tolerance per piece.
pub const DEFAULT_QUAD_TOL: f64 = 1e-11;

const VERSION: &str = "curve/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PieceKind {
    Constant {
        value: f64,
    },
    /// `Σ coeffs[k] (x - origin)^k`
    Polynomial {
        origin: f64,
        coeffs: Vec<f64>,
    },
    CornerBlend(CornerSpec),
    JetCap(JetCapSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: [f64; 2],
    #[serde(flatten)]
    pub kind: PieceKind,
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
}

impl Piece {
    pub fn new(interval: [f64; 2], kind: PieceKind) -> Self {
        Piece { interval, kind }
    }

    /// Whether the piece integrates against polynomials in closed form
    /// without kernel data.
    pub fn closed_form(&self) -> bool {
        matches!(
            self.kind,
            PieceKind::Constant { .. } | PieceKind::Polynomial { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        let [x0, x1] = self.interval;
        if !(x0.is_finite() && x1.is_finite() && x0 <= x1) {
            return Err(Error::InvalidCurve(format!(
                "bad piece interval [{x0}, {x1}]"
            )));
        }
        match &self.kind {
            PieceKind::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidCurve("constant must be finite".into()))
            }
            PieceKind::Polynomial { origin, coeffs } => {
                if coeffs.is_empty() || coeffs.len() > MAX_POLY_DEGREE + 1 {
                    return Err(Error::InvalidCurve(format!(
                        "polynomial needs 1 to {} coefficients, got {}",
                        MAX_POLY_DEGREE + 1,
                        coeffs.len()
                    )));
                }
                if !origin.is_finite() || !coeffs.iter().all(|c| c.is_finite()) {
                    return Err(Error::InvalidCurve("polynomial data must be finite".into()));
                }
                Ok(())
            }
            PieceKind::CornerBlend(g) => g.validate(),
            PieceKind::JetCap(spec) => spec.validate(),
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: f64, table: &KernelTable) -> f64 {
        match &self.kind {
            PieceKind::Constant { value } => *value,
            PieceKind::Polynomial { origin, coeffs } => horner(coeffs, x - origin),
            PieceKind::CornerBlend(g) => g.value(x, table),
            PieceKind::JetCap(spec) => spec.value(x),
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        match &self.kind {
            PieceKind::Constant { .. } => 0.0,
            PieceKind::Polynomial { origin, coeffs } => {
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c)
                    .collect();
                horner(&d, x - origin)
            }
            PieceKind::CornerBlend(g) => g.slope(x),
            PieceKind::JetCap(spec) => spec.slope(x),
        }
    }

    /// `∫_lo^hi piece(x) w(x) dx` for `[lo, hi]` inside the piece.
    fn weighted(
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
        let local_w = || w.compose_affine(1.0, lo);
        match &self.kind {
            PieceKind::Constant { value } => Ok(value * local_w().integral_from_zero(hi - lo)),
            PieceKind::Polynomial { origin, coeffs } => {
                let p = Poly(coeffs.clone()).compose_affine(1.0, lo - origin);
                Ok((&p * &local_w()).integral_from_zero(hi - lo))
            }
            PieceKind::CornerBlend(g) => g.weighted_integral(lo, hi, w, tol, table),
            PieceKind::JetCap(spec) => spec.weighted_integral(lo, hi, w, tol, table),
        }
    }
}

/// How transcendental pieces are integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integration {
    /// Adaptive Gauss–Legendre to this absolute tolerance per piece.
    Quadrature { tol: f64 },
    /// Closed forms through the kernel moments; quadrature only on pieces
    /// that are partially covered by the integration range.
    Moments,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveDoc", into = "CurveDoc")]
pub struct Curve {
    domain: [f64; 2],
    pieces: Vec<Piece>,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    version: String,
    domain: [f64; 2],
    #[serde(default = "unit_scale")]
    scale: f64,
    pieces: Vec<Piece>,
}

fn unit_scale() -> f64 {
    1.0
}

impl TryFrom<CurveDoc> for Curve {
    type Error = Error;
    fn try_from(doc: CurveDoc) -> Result<Self> {
        if doc.version != VERSION {
            return Err(Error::InvalidCurve(format!(
                "unsupported version {:?}, expected {VERSION:?}",
                doc.version
            )));
        }
        if !doc.scale.is_finite() {
            return Err(Error::InvalidCurve("scale must be finite".into()));
        }
        Ok(Curve::new(doc.domain, doc.pieces)?.scaled(doc.scale))
    }
}

impl From<Curve> for CurveDoc {
    fn from(c: Curve) -> Self {
        CurveDoc {
            version: VERSION.into(),
            domain: c.domain,
            scale: c.scale,
            pieces: c.pieces,
        }
    }
}

impl Curve {
    /// Checks that the pieces partition `domain`; stitches may jump.
    pub fn new(domain: [f64; 2], pieces: Vec<Piece>) -> Result<Self> {
        let [lo, hi] = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidCurve(format!("bad domain [{lo}, {hi}]")));
        }
        let first = pieces
            .first()
            .ok_or_else(|| Error::InvalidCurve("a curve needs at least one piece".into()))?;
        for p in &pieces {
            p.validate()?;
        }
        if first.interval[0] != lo || pieces[pieces.len() - 1].interval[1] != hi {
            return Err(Error::InvalidCurve("pieces do not cover the domain".into()));
        }
        for (i, w) in pieces.windows(2).enumerate() {
            if w[0].interval[1] != w[1].interval[0] {
                return Err(Error::InvalidCurve(format!(
                    "pieces {i} and {} are not contiguous ({} vs {})",
                    i + 1,
                    w[0].interval[1],
                    w[1].interval[0]
                )));
            }
        }
        Ok(Curve {
            domain,
            pieces,
            scale: 1.0,
        })
    }

    /// As [`new`](Self::new), and additionally requires value agreement at
    /// every stitch.
    pub fn new_continuous(domain: [f64; 2], pieces: Vec<Piece>) -> Result<Self> {
        let c = Curve::new(domain, pieces)?;
        if let Some(x) = c.first_jump() {
            return Err(Error::InvalidCurve(format!("value jump at stitch x = {x}")));
        }
        Ok(c)
    }

    fn first_jump(&self) -> Option<f64> {
        let table = KernelTable::global();
        self.pieces.windows(2).find_map(|w| {
            let x = w[0].interval[1];
            let (l, r) = (w[0].value(x, table), w[1].value(x, table));
            ((l - r).abs() > STITCH_TOL * l.abs().max(1.0)).then_some(x)
        })
    }

    /// Whether adjacent pieces agree at every stitch.
    pub fn is_continuous(&self) -> bool {
        self.first_jump().is_none()
    }

    pub fn constant(domain: [f64; 2], value: f64) -> Result<Self> {
        Curve::new(
            domain,
            vec![Piece::new(domain, PieceKind::Constant { value })],
        )
    }

    pub fn identity(domain: [f64; 2]) -> Result<Self> {
        Curve::new(
            domain,
            vec![Piece::new(
                domain,
                PieceKind::Polynomial {
                    origin: 0.0,
                    coeffs: vec![0.0, 1.0],
                },
            )],
        )
    }

    pub fn domain(&self) -> [f64; 2] {
        self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same curve multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    fn check_inside(&self, x: f64) -> Result<()> {
        let [lo, hi] = self.domain;
        if x >= lo && x <= hi {
            Ok(())
        } else {
            Err(Error::Domain(format!("x = {x} is outside [{lo}, {hi}]")))
        }
    }

    /// Index of the piece owning `x`: the first whose right end is `≥ x`.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        self.check_inside(x)?;
        Ok(self
            .pieces
            .partition_point(|p| p.interval[1] < x)
            .min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.piece_index(x)?;
        Ok(self.scale * self.pieces[i].value(x, KernelTable::global()))
    }

    /// Derivative of the owning piece's formula; an error at a stitch where
    /// the value jumps.
    pub fn deriv(&self, x: f64) -> Result<f64> {
        let i = self.piece_index(x)?;
        let p = &self.pieces[i];
        if x == p.interval[1] {
            if let Some(next) = self.pieces.get(i + 1) {
                let table = KernelTable::global();
                let (l, r) = (p.value(x, table), next.value(x, table));
                if (l - r).abs() > STITCH_TOL * l.abs().max(1.0) {
                    return Err(Error::NonSmoothStitch { x });
                }
            }
        }
        Ok(self.scale * p.slope(x))
    }

    /// `∫_x0^x1 f(x) w(x) dx`.
    pub fn weighted_integral(&self, x0: f64, x1: f64, w: &Poly, mode: Integration) -> Result<f64> {
        self.check_inside(x0)?;
        self.check_inside(x1)?;
        if x0 > x1 {
            return Err(Error::Domain(format!("reversed range [{x0}, {x1}]")));
        }
        let tol = match mode {
            Integration::Quadrature { tol } if tol > 0.0 => Some(tol),
            Integration::Quadrature { tol } => {
                return Err(Error::Domain(format!(
                    "tolerance must be positive, got {tol}"
                )))
            }
            Integration::Moments => None,
        };
        let table = KernelTable::global();
        let mut total = 0.0;
        for p in &self.pieces {
            let lo = p.interval[0].max(x0);
            let hi = p.interval[1].min(x1);
            if hi > lo {
                total += p.weighted(lo, hi, w, tol, table)?;
            }
        }
        Ok(self.scale * total)
    }

    /// `∫_x0^x1 f`.
    pub fn integrate(&self, x0: f64, x1: f64, tol: f64) -> Result<f64> {
        self.weighted_integral(
            x0,
            x1,
            &Poly::constant(1.0),
            Integration::Quadrature { tol },
        )
    }

    /// `I^n f(x) = ∫_c^x f(t) (x - t)^{n-1} / (n-1)! dt`, with `I^0 f = f`.
    pub fn iterated_integral(&self, x: f64, n: usize, mode: Integration) -> Result<f64> {
        if n == 0 {
            return self.eval(x);
        }
        if n > MAX_ORDER {
            return Err(Error::UnsupportedOrder(n));
        }
        let w = Poly::falling_weight(n - 1).compose_affine(1.0, 1.0 - x);
        self.weighted_integral(self.domain[0], x, &w, mode)
    }

    /// `I^n f` at the right end of the domain, by quadrature at `tol`.
    pub fn iterated_integral_at_1(&self, n: usize, tol: f64) -> Result<f64> {
        self.iterated_integral(self.domain[1], n, Integration::Quadrature { tol })
    }

    /// Smallest derivative over `m` evenly spaced interior points; points at
    /// a jump are skipped.
    pub fn min_deriv_on_grid(&self, m: usize) -> f64 {
        let [lo, hi] = self.domain;
        (1..=m)
            .filter_map(|i| self.deriv(lo + (hi - lo) * i as f64 / (m + 1) as f64).ok())
            .fold(f64::INFINITY, f64::min)
    }

    /// `I f` as a curve; only for curves made of constant and polynomial
    /// pieces.
    pub fn antiderivative(&self) -> Result<Curve> {
        let mut acc = 0.0;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let (origin, coeffs) = match &p.kind {
                PieceKind::Constant { value } => (p.interval[0], vec![*value]),
                PieceKind::Polynomial { origin, coeffs } => (*origin, coeffs.clone()),
                _ => {
                    return Err(Error::InvalidCurve(
                        "antiderivative needs constant or polynomial pieces".into(),
                    ))
                }
            };
            let mut q = Poly(coeffs).scale(self.scale).antiderivative();
            let [x0, x1] = p.interval;
            let shift = acc - q.eval(x0 - origin);
            q.0[0] += shift;
            acc = q.eval(x1 - origin);
            pieces.push(Piece::new(
                p.interval,
                PieceKind::Polynomial {
                    origin,
                    coeffs: q.0,
                },
            ));
        }
        Curve::new(self.domain, pieces)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curves serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("curves serialize")
    }

    pub fn from_json(s: &str) -> Result<Curve> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Highest iterated-integral order accepted; the kernel moment table bounds
/// the weight degrees that can be integrated exactly.
pub const MAX_ORDER: usize = 24;
