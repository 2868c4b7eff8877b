//! Endpoint caps realizing finite derivative jets.
//!
//! A left jet `α = (α1, …, αm)` is realized near 0 by the Taylor polynomial
//! `u(x) = Σ αj x^j / j!` blended into the line `(x + δ)/4`:
//!
//! ```text
//! f_δ(x) = u(x) + h(4kx/δ) ((x + δ)/4 - u(x))
//! ```
//!
//! which is then bent onto the diagonal by the corner `(1/4, 1, δ/3, δ/3, δ/12)`.
//! The resulting `σ_δ` is the identity from `δ/2` on. Right jets are handled
//! by reflection, `τ_δ(x) = 1 - g_δ(1 - x)`.

use serde::{Deserialize, Serialize};

use crate::corner::{line_weighted, CornerSpec, FALLBACK_TOL};
use crate::curve::{Curve, Piece, PieceKind};
use crate::hkernel::{dh, h, KernelTable};
use crate::poly::Poly;
use crate::quad::adaptive_checked;
use crate::{Error, Result};

/// Longest jet accepted; beyond this the Taylor polynomial is numerically
/// meaningless on any useful window.
pub const MAX_JET_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    Right,
}

/// Derivatives of orders `1..=m` at one endpoint of `[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub endpoint: Endpoint,
    pub values: Vec<f64>,
}

impl Jet {
    pub fn left(values: Vec<f64>) -> Self {
        Jet {
            endpoint: Endpoint::Left,
            values,
        }
    }

    pub fn right(values: Vec<f64>) -> Self {
        Jet {
            endpoint: Endpoint::Right,
            values,
        }
    }

    /// Function value at the endpoint in normalized form.
    pub fn base_value(&self) -> f64 {
        match self.endpoint {
            Endpoint::Left => 0.0,
            Endpoint::Right => 1.0,
        }
    }

    /// The left jet whose cap reflects onto this one:
    /// `αj = (-1)^{j+1} βj` for a right jet, the values themselves otherwise.
    pub fn as_left(&self) -> Vec<f64> {
        match self.endpoint {
            Endpoint::Left => self.values.clone(),
            Endpoint::Right => self
                .values
                .iter()
                .enumerate()
                .map(|(i, &b)| if i % 2 == 0 { b } else { -b })
                .collect(),
        }
    }

    /// `u(x) = Σ αj x^j / j!` for the left form of the jet.
    pub fn taylor(&self) -> Poly {
        let mut coeffs = vec![0.0];
        let mut fact = 1.0;
        for (i, a) in self.as_left().into_iter().enumerate() {
            fact *= (i + 1) as f64;
            coeffs.push(a / fact);
        }
        Poly(coeffs)
    }

    /// All entries finite, at most [`MAX_JET_LEN`] of them, and the first
    /// nonzero one of the sign forced by monotonicity.
    pub fn is_valid(&self) -> bool {
        if self.values.len() > MAX_JET_LEN || !self.values.iter().all(|v| v.is_finite()) {
            return false;
        }
        match self.as_left().into_iter().find(|&a| a != 0.0) {
            None => true,
            Some(a) => a > 0.0,
        }
    }
}

pub fn validate_jet(j: &Jet) -> bool {
    j.is_valid()
}

/// Smallest `k ≥ 2` exceeding `Du(0)`, and a window `(0, δ0]` on which
/// `Du ≥ 0` and `u(x) < kx`, certified on a 10³-point grid and then halved.
pub fn choose_k_delta0(j: &Jet) -> Result<(u64, f64)> {
    if !j.is_valid() {
        return Err(Error::InvalidJet(format!(
            "{:?} jet {:?} has the wrong sign class",
            j.endpoint, j.values
        )));
    }
    let alpha = j.as_left();
    if alpha.iter().all(|&a| a == 0.0) {
        return Ok((2, 1.0));
    }
    let a1 = alpha.first().copied().unwrap_or(0.0);
    if a1 >= 2f64.powi(52) {
        return Err(Error::InvalidJet(format!(
            "first derivative {a1} is too large"
        )));
    }
    let k = (a1.floor() as u64 + 1).max(2);
    let u = j.taylor();
    let du = u.derivative();
    let kf = k as f64;
    let ok = |x: f64| du.eval(x) >= 0.0 && u.eval(x) < kf * x;

    let mut reach = good_prefix(&ok, 1.0);
    let mut delta0 = 0.5 * reach;
    // re-certify the halved window; shrink on any failure
    for _ in 0..200 {
        if scan(&ok, delta0).is_none() {
            return Ok((k, delta0));
        }
        reach = delta0;
        delta0 = 0.5 * reach;
    }
    Err(Error::InvalidJet(format!(
        "could not certify a window for jet {:?}",
        j.values
    )))
}

const GRID: usize = 1000;

/// First grid index in `1..=GRID` of `(0, d]` where `ok` fails.
fn scan(ok: &impl Fn(f64) -> bool, d: f64) -> Option<usize> {
    (1..=GRID).find(|&i| !ok(d * i as f64 / GRID as f64))
}

/// Largest `x ≤ d` (up to refinement) such that `ok` holds on the grid of
/// `(0, x]`, refining toward 0 when the very first grid point fails.
fn good_prefix(ok: &impl Fn(f64) -> bool, mut d: f64) -> f64 {
    for _ in 0..64 {
        match scan(ok, d) {
            None => return d,
            Some(1) => d /= GRID as f64,
            Some(i) => {
                let (mut lo, mut hi) =
                    (d * (i - 1) as f64 / GRID as f64, d * i as f64 / GRID as f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return lo;
            }
        }
    }
    d
}

/// A jet together with the cap half-width parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetCapSpec {
    pub delta: f64,
    pub k: u64,
    pub delta0: f64,
    pub jet: Jet,
}

impl JetCapSpec {
    /// Certifies the jet and checks `0 < delta ≤ delta0`.
    pub fn new(jet: Jet, delta: f64) -> Result<Self> {
        let (k, delta0) = choose_k_delta0(&jet)?;
        if !(delta > 0.0 && delta <= delta0) {
            return Err(Error::InvalidJet(format!(
                "cap width {delta} is outside the certified window (0, {delta0}]"
            )));
        }
        Ok(JetCapSpec {
            delta,
            k,
            delta0,
            jet,
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !self.jet.is_valid() {
            return Err(Error::InvalidJet(format!(
                "invalid jet {:?}",
                self.jet.values
            )));
        }
        if !(self.delta > 0.0
            && self.delta.is_finite()
            && self.delta0 > 0.0
            && self.delta0.is_finite())
        {
            return Err(Error::InvalidJet(
                "cap widths must be positive and finite".into(),
            ));
        }
        if self.k < 2 {
            return Err(Error::InvalidJet(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        Ok(())
    }

    fn lambda(&self) -> f64 {
        4.0 * self.k as f64 / self.delta
    }

    /// The interval carrying the jet formula: `[0, δ/5]` or `[1-δ/5, 1]`.
    pub fn interval(&self) -> [f64; 2] {
        match self.jet.endpoint {
            Endpoint::Left => [0.0, self.delta / 5.0],
            Endpoint::Right => [1.0 - self.delta / 5.0, 1.0],
        }
    }

    fn left_value(&self, u: &Poly, x: f64) -> f64 {
        let z = self.lambda() * x;
        let line = 0.25 * (x + self.delta);
        if z >= 1.0 {
            return line;
        }
        let ux = u.eval(x);
        ux + h(z) * (line - ux)
    }

    fn left_slope(&self, u: &Poly, x: f64) -> f64 {
        let lam = self.lambda();
        let z = lam * x;
        if z >= 1.0 {
            return 0.25;
        }
        let ux = u.eval(x);
        let dux = u.derivative().eval(x);
        let hz = h(z);
        dux * (1.0 - hz) + lam * dh(z) * (0.25 * (x + self.delta) - ux) + 0.25 * hz
    }

    pub fn value(&self, x: f64) -> f64 {
        let u = self.jet.taylor();
        match self.jet.endpoint {
            Endpoint::Left => self.left_value(&u, x),
            Endpoint::Right => 1.0 - self.left_value(&u, 1.0 - x),
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        let u = self.jet.taylor();
        match self.jet.endpoint {
            Endpoint::Left => self.left_slope(&u, x),
            Endpoint::Right => self.left_slope(&u, 1.0 - x),
        }
    }

    /// `∫_lo^hi f(x) w(x) dx` for the cap formula `f`.
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
        let u = self.jet.taylor();
        match self.jet.endpoint {
            Endpoint::Left => self.left_weighted(&u, lo, hi, w, tol, table),
            Endpoint::Right => {
                let plain = w.compose_affine(1.0, lo).integral_from_zero(hi - lo);
                let mirrored = w.compose_affine(-1.0, 1.0);
                Ok(plain - self.left_weighted(&u, 1.0 - hi, 1.0 - lo, &mirrored, tol, table)?)
            }
        }
    }

    fn left_weighted(
        &self,
        u: &Poly,
        lo: f64,
        hi: f64,
        w: &Poly,
        tol: Option<f64>,
        table: &KernelTable,
    ) -> Result<f64> {
        let lam = self.lambda();
        let s = 1.0 / lam;
        let mut total = 0.0;
        let tail = lo.max(s);
        if hi > tail {
            total += line_weighted(0.25 * self.delta, 0.25, 0.0, tail, hi, w);
        }
        let head = hi.min(s);
        if head > lo {
            total += match tol {
                None if lo <= 0.0 && hi >= s => {
                    let uw = (u * w).integral_from_zero(s);
                    let gap = &Poly::linear(0.25 * self.delta, 0.25) + &u.scale(-1.0);
                    let r = &gap * w;
                    let mut scale = s;
                    let mut blend = 0.0;
                    for (j, rj) in r.coeffs().iter().enumerate() {
                        blend += rj * table.moment(j) * scale;
                        scale *= s;
                    }
                    uw + blend
                }
                _ => {
                    let tol = tol.unwrap_or(FALLBACK_TOL);
                    let f = |x: f64| self.left_value(u, x) * w.eval(x);
                    adaptive_checked(&f, lo, head, tol).ok_or_else(|| {
                        Error::InvalidCurve(format!(
                            "quadrature did not converge on [{lo}, {head}]"
                        ))
                    })?
                }
            };
        }
        Ok(total)
    }
}

/// Jets at both ends of `[0,1]`. Serialized as `{"left": [...], "right": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JetLists", into = "JetLists")]
pub struct JetPair {
    pub left: Jet,
    pub right: Jet,
}

#[derive(Serialize, Deserialize)]
struct JetLists {
    #[serde(default)]
    left: Vec<f64>,
    #[serde(default)]
    right: Vec<f64>,
}

impl TryFrom<JetLists> for JetPair {
    type Error = Error;
    fn try_from(l: JetLists) -> Result<Self> {
        JetPair::new(l.left, l.right)
    }
}

impl From<JetPair> for JetLists {
    fn from(p: JetPair) -> Self {
        JetLists {
            left: p.left.values,
            right: p.right.values,
        }
    }
}

impl Default for JetPair {
    fn default() -> Self {
        JetPair::new(vec![], vec![]).expect("zero jets are valid")
    }
}

impl JetPair {
    pub fn new(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        let pair = JetPair {
            left: Jet::left(left),
            right: Jet::right(right),
        };
        for j in [&pair.left, &pair.right] {
            if !j.is_valid() {
                return Err(Error::InvalidJet(format!(
                    "{:?} jet {:?} has the wrong sign class",
                    j.endpoint, j.values
                )));
            }
        }
        Ok(pair)
    }

    /// Every derivative multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        JetPair::new(
            self.left.values.iter().map(|v| v * factor).collect(),
            self.right.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// The smaller of the two certified windows.
    pub fn delta0(&self) -> Result<f64> {
        Ok(choose_k_delta0(&self.left)?
            .1
            .min(choose_k_delta0(&self.right)?.1))
    }

    pub fn caps(&self, delta: f64) -> Result<(JetCapSpec, JetCapSpec)> {
        Ok((
            JetCapSpec::new(self.left.clone(), delta)?,
            JetCapSpec::new(self.right.clone(), delta)?,
        ))
    }
}

/// The corner `γ_δ = (1/4, 1, δ/3, δ/3, δ/12)` bending `(x + δ)/4` onto the
/// diagonal.
pub fn blend_corner(delta: f64) -> CornerSpec {
    CornerSpec {
        m1: 0.25,
        m2: 1.0,
        a: delta / 3.0,
        c: delta / 3.0,
        delta: delta / 12.0,
    }
}

fn require(spec: &JetCapSpec, side: Endpoint) -> Result<()> {
    spec.validate()?;
    if spec.jet.endpoint != side {
        return Err(Error::InvalidJet(format!(
            "expected a {side:?} jet, got a {:?} one",
            spec.jet.endpoint
        )));
    }
    Ok(())
}

/// Pieces of `σ_δ` on `[0, δ/2]`.
pub(crate) fn left_cap_pieces(spec: &JetCapSpec) -> Result<Vec<Piece>> {
    require(spec, Endpoint::Left)?;
    let d = spec.delta;
    Ok(vec![
        Piece::new([0.0, d / 5.0], PieceKind::JetCap(spec.clone())),
        Piece::new([d / 5.0, d / 2.0], PieceKind::CornerBlend(blend_corner(d))),
    ])
}

/// Pieces of `τ_δ` on `[1 - δ/2, 1]`.
pub(crate) fn right_cap_pieces(spec: &JetCapSpec) -> Result<Vec<Piece>> {
    require(spec, Endpoint::Right)?;
    let d = spec.delta;
    Ok(vec![
        Piece::new(
            [1.0 - d / 2.0, 1.0 - d / 5.0],
            PieceKind::CornerBlend(blend_corner(d).reflect()),
        ),
        Piece::new([1.0 - d / 5.0, 1.0], PieceKind::JetCap(spec.clone())),
    ])
}

fn identity(lo: f64, hi: f64) -> Piece {
    Piece::new(
        [lo, hi],
        PieceKind::Polynomial {
            origin: 0.0,
            coeffs: vec![0.0, 1.0],
        },
    )
}

/// `σ_δ` on `[0, δ]`: jet formula, blend corner, then the identity from `δ/2`.
pub fn sigma(spec: &JetCapSpec) -> Result<Curve> {
    let d = spec.delta;
    let mut pieces = left_cap_pieces(spec)?;
    pieces.push(identity(d / 2.0, d));
    Curve::new_continuous([0.0, d], pieces)
}

/// `τ_δ` on `[1-δ, 1]`: the identity up to `1 - δ/2`, then the reflected cap.
pub fn tau(spec: &JetCapSpec) -> Result<Curve> {
    let d = spec.delta;
    let mut pieces = vec![identity(1.0 - d, 1.0 - d / 2.0)];
    pieces.extend(right_cap_pieces(spec)?);
    Curve::new_continuous([1.0 - d, 1.0], pieces)
}
