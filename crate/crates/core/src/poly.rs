//! Dense univariate polynomials in monomial form.
//!
//! Used for the piecewise-exact transmission solutions and the outer
//! expansion, where every field on a phase is a polynomial in `x`.

use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial `c[0] + c[1] x + c[2] x^2 + ...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value of the `k`-th derivative at `x`.
    pub fn eval_deriv(&self, x: f64, k: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(k)
            .rev()
            .fold(0.0, |acc, (j, &c)| {
                let falling: f64 = ((j - k + 1)..=j).map(|m| m as f64).product();
                acc * x + c * falling
            })
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at `x = 0`.
    pub fn antiderivative(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, &a)| a / (j as f64 + 1.0)),
        );
        Self::new(c)
    }

    /// `∫_a^b p(x) dx`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let big = self.antiderivative();
        big.eval(b) - big.eval(a)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(x) + c`.
    pub fn add_const(&self, c: f64) -> Self {
        self + &Poly::constant(c)
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    /// `q(t) = p(t + c)`, the same polynomial expanded about `c`.
    pub fn shift(&self, c: f64) -> Self {
        let lin = Poly::new(vec![c, 1.0]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &a| (&acc * &lin).add_const(a))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivatives() {
        // p = 1 - 2x + 3x^2
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.eval_deriv(2.0, 1), 10.0);
        assert_eq!(p.eval_deriv(2.0, 2), 6.0);
        assert_eq!(p.eval_deriv(2.0, 3), 0.0);
        assert_eq!(p.derivative().eval(2.0), 10.0);
    }

    #[test]
    fn integral_matches_antiderivative() {
        let p = Poly::new(vec![1.0, 1.0]);
        assert!((p.integral(0.0, 2.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn product_and_power() {
        let p = Poly::new(vec![1.0, 1.0]);
        assert_eq!(p.powi(2).coeffs(), &[1.0, 2.0, 1.0]);
        assert_eq!((&p * &Poly::zero()).coeffs(), &[] as &[f64]);
    }

    #[test]
    fn shift_re_expands() {
        let p = Poly::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        let q = p.shift(1.0);
        for x in [-0.3, 0.2, 0.9] {
            assert!((q.eval(x - 1.0) - p.eval(x)).abs() < 1e-15);
        }
    }
}
