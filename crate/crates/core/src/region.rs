//! Which `(a, b, c) = (I f(1), I² f(1), I³ f(1))` are attainable by an
//! increasing `f: [0,1] → [0,1]`.
//!
//! The feasible set is cut out by
//!
//! ```text
//! (a) 0 ≤ a ≤ 1            (b) a²/2 ≤ b ≤ a/2
//! (c) 2b² ≤ 3ac            (d) 6(1-a)c ≤ -a² + 2ab - 4b² + 2b
//! (e) 0 ≤ c ≤ a/6
//! ```
//!
//! and splits into seven mutually exclusive equality cases. The two
//! quadratic inequalities are the system `2y² ≤ 3xz`,
//! `6x + 4y² + z² ≤ 6xz + 2yz + 2y` under `(x, y, z) = (c, b, a)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FeasibleTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Domain(format!("non-finite triple ({a}, {b}, {c})")));
        }
        Ok(FeasibleTriple { a, b, c })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BetaCheck {
    pub holds_c: bool,
    pub holds_d: bool,
    pub eq_c: bool,
    pub eq_d: bool,
}

fn beta_sides(x: f64, y: f64, z: f64) -> [(f64, f64); 2] {
    [
        (2.0 * y * y, 3.0 * x * z),
        (
            6.0 * x + 4.0 * y * y + z * z,
            6.0 * x * z + 2.0 * y * z + 2.0 * y,
        ),
    ]
}

/// `2y² ≤ 3xz` and `6x + 4y² + z² ≤ 6xz + 2yz + 2y`, compared exactly as
/// evaluated.
pub fn check_beta(x: f64, y: f64, z: f64) -> BetaCheck {
    let [(lc, rc), (ld, rd)] = beta_sides(x, y, z);
    BetaCheck {
        holds_c: lc <= rc,
        holds_d: ld <= rd,
        eq_c: lc == rc,
        eq_d: ld == rd,
    }
}

/// As [`check_beta`], with sides within `tol · max(1, |side|)` counted equal.
pub fn check_beta_tol(x: f64, y: f64, z: f64, tol: f64) -> BetaCheck {
    let [(lc, rc), (ld, rd)] = beta_sides(x, y, z);
    let near = |l: f64, r: f64| (l - r).abs() <= tol * l.abs().max(r.abs()).max(1.0);
    BetaCheck {
        holds_c: lc <= rc || near(lc, rc),
        holds_d: ld <= rd || near(ld, rd),
        eq_c: near(lc, rc),
        eq_d: near(ld, rd),
    }
}

/// The two solution families `(z/6, z/2, z)` and `(z³/6, z²/2, z)` of the
/// equality system, as `(x, y, z)`.
pub fn alpha_solutions(z: f64) -> ([f64; 3], [f64; 3]) {
    ([z / 6.0, z / 2.0, z], [z * z * z / 6.0, z * z / 2.0, z])
}

/// `l = 2b²/(3a)` and `r = (-a² + 2ab - 4b² + 2b) / (6(1-a))`.
///
/// The endpoints of the `b` range return the common value `a³/6`
/// (`b = a²/2`) or `a/6` (`b = a/2`) exactly, so that the boundary triples
/// built from those expressions classify as equalities.
pub fn bounds_c(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < 1.0) || !(b >= a * a / 2.0 && b <= a / 2.0) {
        return Err(Error::Domain(format!(
            "bounds need 0 < a < 1 and a²/2 ≤ b ≤ a/2, got ({a}, {b})"
        )));
    }
    if b == a * a / 2.0 {
        let v = a * a * a / 6.0;
        return Ok((v, v));
    }
    if b == a / 2.0 {
        let v = a / 6.0;
        return Ok((v, v));
    }
    let l = 2.0 * b * b / (3.0 * a);
    let r = (-a * a + 2.0 * a * b - 4.0 * b * b + 2.0 * b) / (6.0 * (1.0 - a));
    Ok((l, r))
}

/// Names of the eight inequalities, in the order of
/// [`RegionReport::equality_flags`].
pub const INEQUALITIES: [&str; 8] = [
    "0≤a",
    "a≤1",
    "a²/2≤b",
    "b≤a/2",
    "(c)",
    "(d)",
    "0≤c",
    "c≤a/6",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionReport {
    pub feasible: bool,
    pub strict: bool,
    /// Equality-case row 1..=7; `None` when infeasible.
    pub row: Option<u8>,
    pub equality_flags: [bool; 8],
    /// Signed slack of each inequality; negative means violated.
    pub slacks: [f64; 8],
    /// Smallest slack: distance-like margin to the nearest boundary.
    pub boundary_distance: f64,
}

fn slacks(t: &FeasibleTriple) -> [f64; 8] {
    let FeasibleTriple { a, b, c } = *t;
    let (sc, sd) = match bounds_c(a, b) {
        Ok((l, r)) => (c - l, r - c),
        Err(_) => (
            3.0 * a * c - 2.0 * b * b,
            (-a * a + 2.0 * a * b - 4.0 * b * b + 2.0 * b) - 6.0 * (1.0 - a) * c,
        ),
    };
    [
        a,
        1.0 - a,
        b - a * a / 2.0,
        a / 2.0 - b,
        sc,
        sd,
        c,
        a / 6.0 - c,
    ]
}

/// Exact classification: equality means the computed slack is zero.
pub fn classify(t: &FeasibleTriple) -> RegionReport {
    classify_with_tolerance(t, 0.0)
}

/// Slacks within `tol` of zero count as equalities, and down to `-tol` as
/// satisfied.
pub fn classify_with_tolerance(t: &FeasibleTriple, tol: f64) -> RegionReport {
    let s = slacks(t);
    let feasible = s.iter().all(|&v| v >= -tol);
    let equality_flags = s.map(|v| v.abs() <= tol);
    let row = feasible.then(|| {
        let f = &equality_flags;
        if f[0] {
            1
        } else if f[1] {
            2
        } else if f[2] {
            3
        } else if f[3] {
            4
        } else if f[4] {
            5
        } else if f[5] {
            6
        } else {
            7
        }
    });
    RegionReport {
        feasible,
        strict: feasible && !equality_flags.iter().any(|&f| f),
        row,
        equality_flags,
        slacks: s,
        boundary_distance: s.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Equality flags prescribed for each row, in [`INEQUALITIES`] order.
pub fn row_pattern(row: u8) -> Option<[bool; 8]> {
    let on = |idx: &[usize]| {
        let mut f = [false; 8];
        for &i in idx {
            f[i] = true;
        }
        f
    };
    Some(match row {
        1 => on(&[0, 2, 3, 4, 5, 6, 7]),
        2 => on(&[1, 2, 3, 4, 5, 7]),
        3 => on(&[2, 4, 5]),
        4 => on(&[3, 4, 5, 7]),
        5 => on(&[4]),
        6 => on(&[5]),
        7 => [false; 8],
        _ => return None,
    })
}

pub const DEFAULT_MARGIN: f64 = 0.05;

pub fn sample_strict(seed: u64) -> FeasibleTriple {
    sample_strict_with_margin(seed, DEFAULT_MARGIN)
}

/// Draws `a`, then `b`, then `c` uniformly from the middle `1 - 2·margin`
/// of each successive open interval. `margin` is clamped to `[0, 0.49]`.
pub fn sample_strict_with_margin(seed: u64, margin: f64) -> FeasibleTriple {
    let m = if margin.is_nan() {
        DEFAULT_MARGIN
    } else {
        margin.clamp(0.0, 0.49)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut within = |lo: f64, hi: f64| loop {
        let s: f64 = rng.gen_range(m..=1.0 - m);
        let v = lo + (hi - lo) * s;
        if v > lo && v < hi {
            return v;
        }
    };
    loop {
        let a = within(0.0, 1.0);
        let b = within(a * a / 2.0, a / 2.0);
        let Ok((l, r)) = bounds_c(a, b) else { continue };
        let c = within(l, r);
        let t = FeasibleTriple { a, b, c };
        if classify(&t).strict {
            return t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_examples() {
        let all = BetaCheck {
            holds_c: true,
            holds_d: true,
            eq_c: false,
            eq_d: false,
        };
        assert_eq!(check_beta(-2.0, 1.0, -1.0), all);
        assert_eq!(check_beta(1.0, 2.0, 3.0), all);
        let (first, _) = alpha_solutions(0.4);
        let e = check_beta(first[0], first[1], first[2]);
        assert!(e.eq_c && e.eq_d);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_solutions(0.0), ([0.0; 3], [0.0; 3]));
        let (p, q) = alpha_solutions(1.0);
        assert_eq!(p, q);
        assert_eq!(p, [1.0 / 6.0, 0.5, 1.0]);
        let (_, q) = alpha_solutions(0.4);
        assert!((q[0] - 0.010666666666666666).abs() < 1e-17);
        assert!((q[1] - 0.08).abs() < 1e-16);
    }

    #[test]
    fn table_examples() {
        let r = classify(&FeasibleTriple::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(r.row, Some(1));
        assert_eq!(r.equality_flags, row_pattern(1).unwrap());
        let r = classify(&FeasibleTriple::new(1.0, 0.5, 1.0 / 6.0).unwrap());
        assert_eq!(r.row, Some(2));
        assert_eq!(r.equality_flags, row_pattern(2).unwrap());
        let r = classify(&FeasibleTriple::new(0.55, 0.2, 0.0525).unwrap());
        assert!(r.feasible && r.strict);
        assert_eq!(r.row, Some(7));
    }

    #[test]
    fn rounded_decimal_needs_a_tolerance() {
        let t = FeasibleTriple::new(1.0, 0.5, 0.1666666667).unwrap();
        assert!(!classify(&t).feasible);
        assert_eq!(classify_with_tolerance(&t, 1e-9).row, Some(2));
    }

    #[test]
    fn bounds_examples() {
        let (l, r) = bounds_c(0.55, 0.2).unwrap();
        assert!((l - 0.048484848484848485).abs() < 1e-16);
        assert!((r - 0.058333333333333334).abs() < 1e-16);
        assert_eq!(bounds_c(0.3, 0.15).unwrap(), (0.3 / 6.0, 0.3 / 6.0));
        let a: f64 = 0.3;
        let (l, r) = bounds_c(a, a * a / 2.0).unwrap();
        assert_eq!(l, r);
        assert!((l - a.powi(3) / 6.0).abs() < 1e-17);
        assert!(bounds_c(1.0, 0.5).is_err());
        assert!(bounds_c(0.5, 0.3).is_err());
    }

    #[test]
    fn infeasible_has_no_row() {
        let r = classify(&FeasibleTriple::new(0.5, 0.3, 0.05).unwrap());
        assert!(!r.feasible && r.row.is_none());
        assert!(r.boundary_distance < 0.0);
    }

    #[test]
    fn sampling_is_deterministic_and_strict() {
        assert_eq!(sample_strict(42), sample_strict(42));
        assert_eq!(classify(&sample_strict(42)).row, Some(7));
        let t = sample_strict_with_margin(0, 0.25);
        let (l, r) = bounds_c(t.a, t.b).unwrap();
        assert!(t.c >= l + 0.25 * (r - l) - 1e-15 && t.c <= r - 0.25 * (r - l) + 1e-15);
    }
}
