//! Dense univariate polynomials in the monomial basis.

use std::ops::{Add, Mul};

/// Coefficients in increasing degree: `p(x) = Σ c[k] x^k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `c0 + c1 x`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend(
            self.0
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly(out)
    }

    /// `∫_0^h p(x) dx`
    pub fn integral_from_zero(&self, h: f64) -> f64 {
        self.antiderivative().eval(h)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// The polynomial `y ↦ p(alpha·y + beta)`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Poly {
        let n = self.0.len();
        if n == 0 {
            return Poly(vec![0.0]);
        }
        let mut acc = vec![0.0; n];
        acc[0] = self.0[n - 1];
        for (len, &c) in (1..).zip(self.0[..n - 1].iter().rev()) {
            // acc <- acc * (alpha y + beta) + c
            for k in (0..=len).rev() {
                let hi = if k > 0 { acc[k - 1] * alpha } else { 0.0 };
                let lo = if k < len { acc[k] * beta } else { 0.0 };
                acc[k] = hi + lo;
            }
            acc[0] += c;
        }
        Poly(acc)
    }

    /// `(1 - x)^m / m!`
    pub fn falling_weight(m: usize) -> Poly {
        let mut p = Poly::constant(1.0);
        for j in 1..=m {
            p = &p * &Poly::linear(1.0 / j as f64, -1.0 / j as f64);
        }
        p
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&0.0) + rhs.0.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly(vec![0.0]);
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_matches_direct_evaluation() {
        let p = Poly(vec![1.0, -2.0, 0.5, 3.0]);
        let q = p.compose_affine(0.3, -1.2);
        for &y in &[-1.0, 0.0, 0.4, 2.5] {
            assert!((q.eval(y) - p.eval(0.3 * y - 1.2)).abs() < 1e-12);
        }
    }

    #[test]
    fn falling_weight_values() {
        let w = Poly::falling_weight(2);
        assert!((w.eval(0.0) - 0.5).abs() < 1e-15);
        assert!((w.eval(0.4) - 0.18).abs() < 1e-15);
        assert_eq!(Poly::falling_weight(0).eval(0.7), 1.0);
    }

    #[test]
    fn antiderivative_integrates() {
        let p = Poly(vec![1.0, 2.0, 3.0]);
        assert!((p.integral_from_zero(2.0) - (2.0 + 4.0 + 8.0)).abs() < 1e-14);
        assert_eq!(p.derivative(), Poly(vec![2.0, 6.0]));
    }
}
