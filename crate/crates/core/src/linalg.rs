//! Tridiagonal direct solvers.

use crate::error::{Error, Result};

/// Thomas algorithm for a tridiagonal system without pivoting.
///
/// `lower[i]` couples row `i+1` to column `i`, `upper[i]` couples row `i` to
/// column `i+1`. Intended for symmetric positive-definite or diagonally
/// dominant matrices; fails on a vanishing pivot.
pub fn solve_thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert!(lower.len() + 1 == n && upper.len() + 1 == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::LinearSolve("zero pivot in row 0".into()));
    }
    c[0] = if n > 1 { upper[0] / beta } else { 0.0 };
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i - 1] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::LinearSolve(format!("zero pivot in row {i}")));
        }
        if i + 1 < n {
            c[i] = upper[i] / beta;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// LU factorization of a general tridiagonal matrix with partial pivoting
/// (the LAPACK `gttrf` layout: `U` has two super-diagonals after row swaps).
#[derive(Clone, Debug)]
pub struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut dl = lower.to_vec();
        let mut d = diag.to_vec();
        let mut du = upper.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::LinearSolve(format!("singular tridiagonal matrix at row {i}")));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return Err(Error::LinearSolve(format!("singular tridiagonal matrix at row {}", n - 1)));
        }
        Ok(Self { dl, d, du, du2, swapped })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut b = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        b
    }
}

/// `y = A x` for a tridiagonal `A`.
pub fn tridiag_apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut y = diag[i] * x[i];
            if i > 0 {
                y += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y += upper[i] * x[i + 1];
            }
            y
        })
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(l: &[f64], d: &[f64], u: &[f64], x: &[f64], b: &[f64]) -> f64 {
        tridiag_apply(l, d, u, x)
            .iter()
            .zip(b)
            .map(|(y, b)| (y - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn thomas_solves_spd_system() {
        let n = 50;
        let l = vec![-1.0; n - 1];
        let d = vec![2.5; n];
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_thomas(&l, &d, &l, &b).unwrap();
        assert!(residual(&l, &d, &l, &x, &b) < 1e-13);
    }

    #[test]
    fn pivoting_lu_handles_zero_diagonal() {
        // Thomas would divide by the zero leading pivot.
        let l = vec![1.0, 1.0, 2.0];
        let d = vec![0.0, 1.0, -3.0, 1.0];
        let u = vec![2.0, 1.0, 1.0];
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let lu = TridiagLu::factor(&l, &d, &u).unwrap();
        let x = lu.solve(&b);
        assert!(residual(&l, &d, &u, &x, &b) < 1e-13);
    }

    #[test]
    fn pivoting_lu_on_indefinite_matrix() {
        let n = 200;
        let l: Vec<f64> = (0..n - 1).map(|i| 1.0 + 0.01 * i as f64).collect();
        let d: Vec<f64> = (0..n).map(|i| 3.0 * ((i as f64) * 0.37).cos()).collect();
        let b: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let x = TridiagLu::factor(&l, &d, &l).unwrap().solve(&b);
        let scale = 6.0 * x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(residual(&l, &d, &l, &x, &b) < 1e-13 * scale);
    }
}
