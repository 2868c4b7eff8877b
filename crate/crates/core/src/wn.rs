//! Endpoint tuples of `n`-monotone functions.
//!
//! `W_n` collects `(b_0, …, b_n)` with `b_j = D^j f(1)` for some `f` with
//! `D^j f(0) = 0` and `D^n f` strictly increasing. `V_n[c, d]` is the
//! two-sided version on an arbitrary interval, reached from `W_n` by
//! subtracting the Taylor polynomial at `c` and rescaling.

use serde::{Deserialize, Serialize};

use crate::construct::{construct, ConstructConfig, ConstructResult};
use crate::curve::{Curve, Piece, PieceKind};
use crate::jets::{left_cap_pieces, right_cap_pieces, JetPair};
use crate::region::{bounds_c, FeasibleTriple};
use crate::{Error, Result};

/// Orders with a known closed-form description of `W_n`.
pub const MAX_N: usize = 3;

/// `(b_0, …, b_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EndpointTuple {
    b: Vec<f64>,
}

impl TryFrom<Vec<f64>> for EndpointTuple {
    type Error = Error;
    fn try_from(b: Vec<f64>) -> Result<Self> {
        EndpointTuple::new(b)
    }
}

impl From<EndpointTuple> for Vec<f64> {
    fn from(t: EndpointTuple) -> Self {
        t.b
    }
}

impl EndpointTuple {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Domain("an endpoint tuple needs at least b_0".into()));
        }
        if !b.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry in {b:?}")));
        }
        Ok(EndpointTuple { b })
    }

    pub fn n(&self) -> usize {
        self.b.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }
}

/// `(a_0, …, a_n; b_0, …, b_n)` on `[c, d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VTuple {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub interval: [f64; 2],
}

impl VTuple {
    pub fn new(a: Vec<f64>, b: Vec<f64>, interval: [f64; 2]) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Domain(format!(
                "a and b need the same nonzero length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let [c, d] = interval;
        if !(c < d) || !c.is_finite() || !d.is_finite() {
            return Err(Error::Domain(format!(
                "interval needs c < d, got [{c}, {d}]"
            )));
        }
        if !a.iter().chain(&b).all(|x| x.is_finite()) {
            return Err(Error::Domain("non-finite entry".into()));
        }
        Ok(VTuple { a, b, interval })
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }
}

pub fn wn_member(t: &EndpointTuple) -> Result<bool> {
    Ok(match *t.values() {
        [b0] => b0 > 0.0,
        [b0, b1] => 0.0 < b0 && b0 < b1,
        [b0, b1, b2] => 0.0 < 2.0 * b0 && 2.0 * b0 < b1 && b1 * b1 < 2.0 * b0 * b2,
        [a, b, c, d] => {
            0.0 < c
                && c < d
                && 2.0 * b * b < 3.0 * a * c
                && 6.0 * a * d + 4.0 * b * b + c * c < 6.0 * a * c + 2.0 * b * c + 2.0 * b * d
        }
        _ => return Err(Error::UnsupportedOrder(t.n())),
    })
}

/// `b_j - D^j p_a(1)` with `p_a(x) = Σ a_k x^k / k!`. The tuple must live on `[0, 1]`.
pub fn t_n(v: &VTuple) -> Result<EndpointTuple> {
    if v.interval != [0.0, 1.0] {
        return Err(Error::Domain(format!(
            "t_n needs the interval [0, 1], got {:?}",
            v.interval
        )));
    }
    let n = v.n();
    let b = (0..=n)
        .map(|j| {
            let mut fact = 1.0;
            let mut taylor = 0.0;
            for (i, k) in (j..=n).enumerate() {
                if i > 0 {
                    fact *= i as f64;
                }
                taylor += v.a[k] / fact;
            }
            v.b[j] - taylor
        })
        .collect();
    EndpointTuple::new(b)
}

/// `b_j (d - c)^{-j}`: the image of `W_n` in `W_n[c, d]`.
pub fn rescale_w(t: &EndpointTuple, c: f64, d: f64) -> Result<EndpointTuple> {
    if !(c < d) {
        return Err(Error::Domain(format!(
            "interval needs c < d, got [{c}, {d}]"
        )));
    }
    let w = d - c;
    EndpointTuple::new(
        t.values()
            .iter()
            .enumerate()
            .map(|(j, b)| b * w.powi(-(j as i32)))
            .collect(),
    )
}

pub fn vn_member(v: &VTuple) -> Result<bool> {
    if v.n() > MAX_N {
        return Err(Error::UnsupportedOrder(v.n()));
    }
    let w = v.interval[1] - v.interval[0];
    let scale = |xs: &[f64]| -> Vec<f64> {
        xs.iter()
            .enumerate()
            .map(|(j, x)| x * w.powi(j as i32))
            .collect()
    };
    let unit = VTuple::new(scale(&v.a), scale(&v.b), [0.0, 1.0])?;
    wn_member(&t_n(&unit)?)
}

/// A witness `g = D^n f` for a member of `W_n`.
#[derive(Clone, Debug)]
pub struct Witness {
    /// `g`, with `g(0) = 0`, `g(1) = b_n` and `I^j g(1) = b_{n-j}`.
    pub curve: Curve,
    /// Normalized targets handed to the constructor (empty for `n = 0`).
    pub targets: Vec<f64>,
    pub construct: Option<ConstructResult>,
}

fn mid(lo: f64, hi: f64) -> f64 {
    0.5 * (lo + hi)
}

/// Builds `g` by normalizing with `b_n`, constructing `ρ` for the first
/// `n` iterated integrals and scaling back. Free lower-order targets sit at
/// the midpoints of their admissible intervals. `jets` are jets of `g`;
/// by default `g'(0) = g'(1) = 1`.
pub fn witness(
    t: &EndpointTuple,
    jets: Option<&JetPair>,
    cfg: &ConstructConfig,
) -> Result<Witness> {
    if !wn_member(t)? {
        return Err(Error::Infeasible(format!(
            "{:?} is not in W_{}",
            t.values(),
            t.n()
        )));
    }
    let b = t.values();
    let n = t.n();
    let s = b[n];
    let jets = match jets {
        Some(j) => j.scaled(1.0 / s)?,
        None => JetPair::new(vec![1.0 / s], vec![1.0 / s])?,
    };
    let (curve, targets, result) = if n == 0 {
        let delta = 0.25f64.min(jets.delta0()?);
        let (l, r) = jets.caps(delta)?;
        let mut pieces = left_cap_pieces(&l)?;
        pieces.push(Piece::new(
            [delta / 2.0, 1.0 - delta / 2.0],
            PieceKind::Polynomial {
                origin: 0.0,
                coeffs: vec![0.0, 1.0],
            },
        ));
        pieces.extend(right_cap_pieces(&r)?);
        (Curve::new_continuous([0.0, 1.0], pieces)?, vec![], None)
    } else {
        let a = b[n - 1] / s;
        let bb = if n >= 2 {
            b[n - 2] / s
        } else {
            mid(a * a / 2.0, a / 2.0)
        };
        let c = if n >= 3 {
            b[n - 3] / s
        } else {
            let (l, r) = bounds_c(a, bb)?;
            mid(l, r)
        };
        let cfg = ConstructConfig {
            jets,
            ..cfg.clone()
        };
        let r = construct(&FeasibleTriple::new(a, bb, c)?, &cfg)?;
        (r.curve.clone(), vec![a, bb, c], Some(r))
    };
    let curve = curve.scaled(s);
    let tol = cfg.tol_target * s.abs().max(1.0);
    let qt = cfg.quad_tol / 10.0;
    for j in 0..=n {
        let got = curve.iterated_integral_at_1(j, qt)?;
        if (got - b[n - j]).abs() > tol {
            return Err(Error::ToleranceNotMet {
                target: [b[n - j], 0.0, 0.0],
                achieved: [got, 0.0, 0.0],
                tol,
            });
        }
    }
    Ok(Witness {
        curve,
        targets: targets[..n.min(3)].to_vec(),
        construct: result,
    })
}
