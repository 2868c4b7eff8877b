//! Gauss–Legendre quadrature.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Fixed 16-point rule on `[a, b]`.
pub(crate) fn gl16_on<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = gl16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(mid + half * xi);
    }
    s * half
}

/// Adaptive bisection on the 16-point rule until the two-halves estimate
/// agrees with the whole to `tol` (absolute). Panels that hit the
/// refinement cap contribute their best estimate.
pub fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let mut converged = true;
    run(f, a, b, tol, &mut converged)
}

/// As [`adaptive_gauss_legendre`], but `None` when some panel reached the
/// refinement cap without meeting its share of `tol`.
pub(crate) fn adaptive_checked<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Option<f64> {
    let mut converged = true;
    let v = run(f, a, b, tol, &mut converged);
    (converged && v.is_finite()).then_some(v)
}

pub(crate) const REFINEMENT_CAP: u32 = 40;

fn run<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, converged: &mut bool) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gl16_on(f, a, b);
    recurse(f, a, b, whole, tol.max(1e-300), 0, converged)
}

fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl16_on(f, a, m);
    let right = gl16_on(f, m, b);
    let both = left + right;
    let err = (both - whole).abs();
    // below a few ulps of the magnitude there is nothing left to resolve
    let floor = 4.0 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol || err <= floor {
        return both;
    }
    if depth >= REFINEMENT_CAP || m <= a || m >= b {
        *converged = false;
        return both;
    }
    recurse(f, a, m, left, 0.5 * tol, depth + 1, converged)
        + recurse(f, m, b, right, 0.5 * tol, depth + 1, converged)
}
