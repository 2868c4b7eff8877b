//! The smoothing kernel `h` and its cumulative integral `H(s) = ∫₀^s h`.
//!
//! `h` is built from `f(x) = exp(-(1/x)·exp(-1/(1-x)))`:
//! `h(x) = (f(x) + 1 - f(1-x)) / 2` on `(0,1)`, extended by 0 to the left
//! and 1 to the right. It is C∞, flat at both ends, strictly increasing on
//! `(0,1)` and satisfies `h(x) + h(1-x) = 1`.

use std::sync::OnceLock;

use crate::quad::{gl16, gl16_on};

/// `ln q(x)` where `q(x) = (1/x)·exp(-1/(1-x))`, for `x ∈ (0,1)`.
fn ln_q(x: f64) -> f64 {
    -x.ln() - 1.0 / (1.0 - x)
}

/// `h` on `(0,1)` via `f(x) - expm1(-q(1-x))`, which keeps relative
/// accuracy near both ends.
fn h_interior(x: f64) -> f64 {
    let fx = (-ln_q(x).exp()).exp();
    let tail = -(-ln_q(1.0 - x).exp()).exp_m1();
    0.5 * (fx + tail)
}

/// Derivative of the base function `f`: `f·q·(1/x + 1/(1-x)²)`.
fn base_derivative(x: f64) -> f64 {
    let q = ln_q(x).exp();
    if q == 0.0 || q > 1e3 {
        // exp(-q) or q itself has underflowed past anything representable
        return 0.0;
    }
    let t = 1.0 - x;
    (-q).exp() * q * (1.0 / x + 1.0 / (t * t))
}

pub fn h(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        h_interior(x)
    }
}

pub fn dh(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        0.5 * (base_derivative(x) + base_derivative(1.0 - x))
    }
}

/// Number of moments `∫₀¹ t^j h(t) dt` kept in the table.
pub const MOMENT_COUNT: usize = 48;

/// Cached cumulative values of `H` on Chebyshev-spaced nodes of `[0, 1/2]`,
/// plus kernel moments. Values above 1/2 come from the reflection
/// `H(s) = s - 1/2 + H(1-s)`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    moments: Vec<f64>,
    accuracy: f64,
}

impl KernelTable {
    /// Chebyshev intervals across all of `[0,1]`.
    pub const INTERVALS: usize = 4096;

    pub fn build() -> Self {
        let n = Self::INTERVALS;
        let node = |i: usize| {
            if i == n / 2 {
                0.5
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos())
            }
        };
        let nodes: Vec<f64> = (0..=n / 2).map(node).collect();

        let mut cumulative = Vec::with_capacity(nodes.len());
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        cumulative.push(0.0);
        for w in nodes.windows(2) {
            // Kahan summation keeps the running total at ulp level
            let y = gl16_on(&h, w[0], w[1]) - carry;
            let s = sum + y;
            carry = (s - sum) - y;
            sum = s;
            cumulative.push(sum);
        }

        let (gx, gw) = gl16();
        let mut moments = vec![0.0; MOMENT_COUNT];
        for i in 0..n {
            let (lo, hi) = (node_full(i, n), node_full(i + 1, n));
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in gx.iter().zip(gw) {
                let t = mid + half * xi;
                let mut term = wi * half * h(t);
                for m in moments.iter_mut() {
                    *m += term;
                    term *= t;
                }
            }
        }
        moments[0] = 0.5;

        KernelTable {
            nodes,
            cumulative,
            moments,
            accuracy: 1e-13,
        }
    }

    /// The process-wide table, built on first use.
    pub fn global() -> &'static KernelTable {
        static TABLE: OnceLock<KernelTable> = OnceLock::new();
        TABLE.get_or_init(KernelTable::build)
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `H` at each node, aligned with [`nodes`](Self::nodes).
    pub fn values(&self) -> &[f64] {
        &self.cumulative
    }

    /// `H(s) = ∫₀^s h`, with `H = 0` below 0 and `H(s) = 1/2 + (s-1)` above 1.
    pub fn integral(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            0.5 + (s - 1.0)
        } else if s > 0.5 {
            s - 0.5 + self.lower_half(1.0 - s)
        } else {
            self.lower_half(s)
        }
    }

    fn lower_half(&self, s: f64) -> f64 {
        let n = Self::INTERVALS as f64;
        let guess = ((1.0 - 2.0 * s).clamp(-1.0, 1.0).acos() * n / std::f64::consts::PI) as usize;
        let last = self.nodes.len() - 1;
        let mut i = guess.min(last);
        while i > 0 && self.nodes[i] > s {
            i -= 1;
        }
        while i < last && self.nodes[i + 1] <= s {
            i += 1;
        }
        if self.nodes[i] == s {
            return self.cumulative[i];
        }
        self.cumulative[i] + gl16_on(&h, self.nodes[i], s)
    }

    /// `μ_j = ∫₀¹ t^j h(t) dt`.
    pub fn moment(&self, j: usize) -> f64 {
        self.moments[j]
    }

    /// `∫₀¹ τ^j H(τ) dτ = (1/2 - μ_{j+1}) / (j+1)`, by parts.
    pub fn integral_moment(&self, j: usize) -> f64 {
        (0.5 - self.moments[j + 1]) / (j as f64 + 1.0)
    }
}

fn node_full(i: usize, n: usize) -> f64 {
    if i == 0 {
        0.0
    } else if i == n {
        1.0
    } else if 2 * i == n {
        0.5
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos())
    }
}

/// `H(s)` against the given table.
pub fn h_integral(s: f64, table: &KernelTable) -> f64 {
    table.integral(s)
}
