//! Stretched-coordinate profile problems.
//!
//! With `L = ψ̂''(S₀(ζ)) - ∂²_ζ`, the profiles satisfy
//!
//! * `S₀' = √(2ψ̂(S₀))`, `S₀(0) = 1/2`;
//! * `L S₁ = F₁`, `S₁(0) = 0`, `S₁(±∞) = ε̄:T̂^{(±)}/ψ̂''(well)`;
//! * `L S₂ = F₂`, `S₂(0) = 0`, `S₂ - ρ₂` decaying.
//!
//! `L` has the kernel `S₀'`, so each problem is solvable only if its
//! right-hand side is orthogonal to `S₀'`; that condition fixes the speed
//! coefficient carried by the `S₀'` term of the forcing. Two routes compute
//! the coefficients: closed-form integrals (primary) and the Lagrange
//! multiplier of the bordered discrete system (cross-check).
//!
//! Discretisation: uniform grid on `[-Z, Z]`, second-order central
//! differences, Dirichlet data for `w = S - ρ` at `±Z`.

use serde::Serialize;

use crate::cutoff::{step, Jet};
use crate::error::{Error, Result};
use crate::linalg::{dot, tridiag_apply, TridiagLu};
use crate::potential::DoubleWellPotential;
use crate::transmission::InterfaceData;

/// Tail tolerance for profile limits.
pub const TAIL_TOL: f64 = 1e-6;
/// Largest admissible orthogonality defect before a solve is refused.
pub const SOLVABILITY_TOL: f64 = 1e-6;
/// Upper end of the admissible `μ` range, `e⁻²`.
pub const MU_MAX: f64 = 0.135_335_283_236_612_7;
/// Upper end of the admissible `λ` range.
pub const LAMBDA_MAX: f64 = 1.0;

const RK4_SUBSTEPS: usize = 8;
const INVERSE_ITERATIONS: usize = 3;

/// Uniform, symmetric grid `ζᵢ = (i - m)h` on `[-Z, Z]` with `N = 2m + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileGrid {
    z: f64,
    h: f64,
    zeta: Vec<f64>,
}

impl ProfileGrid {
    pub fn new(z: f64, n: usize) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!("half-length Z must be positive, got {z}")));
        }
        if n < 5 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!("grid size must be odd and at least 5, got {n}")));
        }
        let m = (n - 1) / 2;
        let h = z / m as f64;
        let zeta = (0..n).map(|i| (i as f64 - m as f64) * h).collect();
        Ok(Self { z, h, zeta })
    }

    /// `Z = max(12/a, 30)`, `N = 4001`.
    pub fn default_for(psi: &DoubleWellPotential) -> Result<Self> {
        Self::with_size(psi, 4001)
    }

    pub fn with_size(psi: &DoubleWellPotential, n: usize) -> Result<Self> {
        let a = psi.decay_rate()?;
        Self::new((12.0 / a).max(30.0), n)
    }

    /// Same interval, half the spacing.
    pub fn refined(&self) -> Self {
        Self::new(self.z, 2 * self.len() - 1).expect("refinement of a valid grid")
    }

    pub fn half_length(&self) -> f64 {
        self.z
    }
    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }
    pub fn len(&self) -> usize {
        self.zeta.len()
    }
    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }
    /// Index of `ζ = 0`.
    pub fn center(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Composite trapezoid rule over the full grid.
    pub fn trapezoid(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        let n = f.len();
        self.h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
    }

    /// `∫ f g` by the trapezoid rule.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        let p: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
        self.trapezoid(&p)
    }

    /// Second-order central first derivative, one-sided at the ends.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let h = self.h;
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        d
    }
}

/// A sampled function of `ζ` with its first two derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub grid: ProfileGrid,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Limit (or linear asymptote value at `-Z`) as `ζ → -∞`.
    pub left_limit: f64,
    pub right_limit: f64,
    /// Expected exponential decay rate `a` of the boundary layer.
    pub decay_rate: f64,
}

impl Profile {
    pub fn zeta(&self) -> &[f64] {
        self.grid.zeta()
    }

    pub fn at_center(&self) -> f64 {
        self.values[self.grid.center()]
    }

    /// Largest deviation from the declared limits at `±Z`.
    pub fn tail_error(&self) -> f64 {
        let n = self.values.len();
        (self.values[0] - self.left_limit).abs().max((self.values[n - 1] - self.right_limit).abs())
    }

    pub fn check_tails(&self, tol: f64) -> Result<()> {
        let e = self.tail_error();
        if !(e <= tol) {
            return Err(Error::ProfileCheck(format!("tail deviates from its limit by {e:.3e} > {tol:.1e}")));
        }
        Ok(())
    }

    /// `(f, f', f'')` at `ζ` by four-point Lagrange interpolation of the
    /// nodal arrays; outside the grid, linear continuation from the end node.
    pub fn sample(&self, z: f64) -> Jet {
        let g = &self.grid;
        let n = g.len();
        if z <= g.zeta[0] || z >= g.zeta[n - 1] {
            let i = if z <= g.zeta[0] { 0 } else { n - 1 };
            let dz = z - g.zeta[i];
            return (self.values[i] + self.d1[i] * dz, self.d1[i], 0.0);
        }
        (interpolate(g, &self.values, z), interpolate(g, &self.d1, z), interpolate(g, &self.d2, z))
    }
}

/// Four-point Lagrange interpolation of nodal values `f` at `z`, clamped to
/// the end values outside the grid.
pub fn interpolate(grid: &ProfileGrid, f: &[f64], z: f64) -> f64 {
    let n = grid.len();
    let zl = grid.zeta[0];
    if z <= zl {
        return f[0];
    }
    if z >= grid.zeta[n - 1] {
        return f[n - 1];
    }
    let t = (z - zl) / grid.h;
    let j = (t.floor() as usize).clamp(1, n - 3) - 1;
    let x = t - j as f64;
    let w = [
        -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
        x * (x - 2.0) * (x - 3.0) / 2.0,
        -x * (x - 1.0) * (x - 3.0) / 2.0,
        x * (x - 1.0) * (x - 2.0) / 6.0,
    ];
    (0..4).map(|k| w[k] * f[j + k]).sum()
}

fn rk4_step(f: &impl Fn(f64) -> f64, y: f64, h: f64) -> f64 {
    let k1 = f(y);
    let k2 = f(y + 0.5 * h * k1);
    let k3 = f(y + 0.5 * h * k2);
    let k4 = f(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Leading profile `S₀` by classical RK4 from `ζ = 0` in both directions.
/// `S₀'` and `S₀''` are sampled exactly from the ODE.
pub fn solve_s0(psi: &DoubleWellPotential, grid: &ProfileGrid) -> Result<Profile> {
    let a = psi.decay_rate()?;
    if grid.half_length() < 12.0 / a - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "truncation Z = {} is below 12/a = {}",
            grid.half_length(),
            12.0 / a
        )));
    }
    let f = |s: f64| (2.0 * psi.value(s)).max(0.0).sqrt();
    let n = grid.len();
    let m = grid.center();
    let mut s = vec![0.0; n];
    s[m] = 0.5;
    let hs = grid.spacing() / RK4_SUBSTEPS as f64;
    for (dir, range) in [(1.0, (m + 1..n).collect::<Vec<_>>()), (-1.0, (0..m).rev().collect())] {
        let mut y = 0.5;
        for i in range {
            for _ in 0..RK4_SUBSTEPS {
                y = rk4_step(&f, y, dir * hs);
            }
            if !(y > -1e-14 && y < 1.0 + 1e-14) || !y.is_finite() {
                return Err(Error::StepFailure { zeta: grid.zeta()[i], reason: format!("S0 left (0, 1): {y}") });
            }
            s[i] = y;
        }
    }
    let d1: Vec<f64> = s.iter().map(|&v| f(v)).collect();
    let d2: Vec<f64> = s.iter().map(|&v| psi.d1(v)).collect();
    let p = Profile { grid: grid.clone(), values: s, d1, d2, left_limit: 0.0, right_limit: 1.0, decay_rate: a };
    p.check_tails(TAIL_TOL)?;
    Ok(p)
}

/// `S₀(ζ) = 1/(1 + e^{-√(2A)ζ})`, the exact profile of the quartic.
pub fn logistic_profile(amplitude: f64, z: f64) -> f64 {
    1.0 / (1.0 + (-(2.0 * amplitude).sqrt() * z).exp())
}

/// `I₀(ζ) = ∫_{-∞}^ζ S₀` and `C₊ = lim_{ζ→∞}(I₀(ζ) - ζ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub values: Vec<f64>,
    pub c_plus: f64,
}

/// Cumulative trapezoid with the endpoint derivative correction, started
/// from the exponential tail `S₀(-Z)/√ψ̂''(0)`.
pub fn s0_primitive(psi: &DoubleWellPotential, s0: &Profile) -> Primitive {
    let g = &s0.grid;
    let h = g.spacing();
    let n = g.len();
    let mut v = vec![0.0; n];
    v[0] = s0.values[0] / psi.psi_pp0().sqrt();
    let mut trap = 0.0;
    for i in 1..n {
        trap += 0.5 * h * (s0.values[i - 1] + s0.values[i]);
        v[i] = v[0] + trap - h * h / 12.0 * (s0.d1[i] - s0.d1[0]);
    }
    let c_plus = v[n - 1] - g.zeta()[n - 1] + (1.0 - s0.values[n - 1]) / psi.psi_pp1().sqrt();
    Primitive { values: v, c_plus }
}

/// Trapezoid moments of `S₀` used by the coefficient formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct S0Moments {
    /// `∫ S₀'`
    pub mass: f64,
    /// `∫ (S₀')²`, equal to `c₁`.
    pub c1: f64,
    /// `∫ ζ S₀'`
    pub m1: f64,
    /// `∫ ζ (S₀')²`
    pub m2: f64,
    /// `∫ S₀(1 - S₀)`, equal to `∫ S₀(ζ)S₀(-ζ)` for symmetric `ψ̂`.
    pub j: f64,
}

pub fn s0_moments(s0: &Profile) -> S0Moments {
    let g = &s0.grid;
    let z = g.zeta();
    let sq: Vec<f64> = s0.d1.iter().map(|d| d * d).collect();
    let zs: Vec<f64> = z.iter().zip(&s0.d1).map(|(z, d)| z * d).collect();
    let zsq: Vec<f64> = z.iter().zip(&sq).map(|(z, d)| z * d).collect();
    let j: Vec<f64> = s0.values.iter().map(|s| s * (1.0 - s)).collect();
    S0Moments { mass: g.trapezoid(&s0.d1), c1: g.trapezoid(&sq), m1: g.trapezoid(&zs), m2: g.trapezoid(&zsq), j: g.trapezoid(&j) }
}

/// Speed coefficients; `s12` multiplies `λ` and vanishes for symmetric `ψ̂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct KineticCoefficients {
    pub s00: f64,
    pub s01: f64,
    pub s10: f64,
    pub s11: f64,
    pub s12: f64,
}

impl KineticCoefficients {
    pub fn s0(&self, lambda: f64) -> f64 {
        self.s00 + lambda.sqrt() * self.s01
    }
    pub fn s1(&self, lambda: f64) -> f64 {
        self.s10 + lambda.sqrt() * self.s11 + lambda * self.s12
    }
    pub fn s(&self, mu: f64, lambda: f64) -> f64 {
        self.s0(lambda) + mu.sqrt() * self.s1(lambda)
    }
}

pub fn check_parameters(mu: f64, lambda: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= MU_MAX) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, e^-2]")));
    }
    if !(lambda > 0.0 && lambda <= LAMBDA_MAX) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, {LAMBDA_MAX}]")));
    }
    Ok(())
}

/// `s = s₀ + μ^{1/2} s₁`.
pub fn kinetic_relation(coeffs: &KineticCoefficients, mu: f64, lambda: f64) -> Result<f64> {
    check_parameters(mu, lambda)?;
    Ok(coeffs.s(mu, lambda))
}

/// `κ'(0) = -κ²/(d-1)` for a sphere in `d` dimensions.
pub fn sphere_kappa_prime(kappa: f64, dim: usize) -> f64 {
    -kappa * kappa / (dim as f64 - 1.0)
}

/// `(s00, s01)` with `s00 = -(c/c₁) ε̄:⟨T̂⟩` and `s01 = c κ`.
pub fn s0_closed_form(data: &InterfaceData, psi: &DoubleWellPotential, lambda: f64, c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) || !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("need c > 0 and lambda > 0, got c = {c}, lambda = {lambda}")));
    }
    let c1 = psi.c1()?;
    Ok((-(c / c1) * data.eps_t_mean, c * data.kappa))
}

/// Smooth boundary-layer asymptotes: `ρ₁` (constants) and `ρ₂` (affine in
/// `ζ`), switched on by `step(±ζ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryLayers {
    pub s1_minus: f64,
    pub s1_plus: f64,
    /// `ρ₂ ≈ c + mζ` as `ζ → -∞`.
    pub s2_minus: (f64, f64),
    pub s2_plus: (f64, f64),
}

impl BoundaryLayers {
    pub fn new(psi: &DoubleWellPotential, data: &InterfaceData, c_plus: f64, lambda: f64) -> Self {
        let (p0, p1) = (psi.psi_pp0(), psi.psi_pp1());
        let (s1m, s1p) = (data.eps_t_minus / p0, data.eps_t_plus / p1);
        let sl = lambda.sqrt();
        let m_minus = sl * data.sigma_hat_prime0;
        let m_plus = sl * (data.sigma_hat_prime0 + data.grad_term);
        let c_minus = data.eps_check_t_side(false) - 0.5 * psi.d3(0.0) * s1m * s1m;
        let c_plus_v = data.eps_check_t_side(true) - 0.5 * psi.d3(1.0) * s1p * s1p + sl * data.grad_term * c_plus;
        Self { s1_minus: s1m, s1_plus: s1p, s2_minus: (c_minus / p0, m_minus / p0), s2_plus: (c_plus_v / p1, m_plus / p1) }
    }

    fn switch(z: f64, a: f64, b: f64, plus: bool) -> Jet {
        let (v, d1, d2) = if plus {
            step(z)
        } else {
            let (v, d1, d2) = step(-z);
            (v, -d1, d2)
        };
        let p = a + b * z;
        (v * p, d1 * p + v * b, d2 * p + 2.0 * d1 * b)
    }

    pub fn rho1(&self, z: f64) -> Jet {
        let m = Self::switch(z, self.s1_minus, 0.0, false);
        let p = Self::switch(z, self.s1_plus, 0.0, true);
        (m.0 + p.0, m.1 + p.1, m.2 + p.2)
    }

    pub fn rho2(&self, z: f64) -> Jet {
        let m = Self::switch(z, self.s2_minus.0, self.s2_minus.1, false);
        let p = Self::switch(z, self.s2_plus.0, self.s2_plus.1, true);
        (m.0 + p.0, m.1 + p.1, m.2 + p.2)
    }
}

/// The discrete operator `L_h = diag(ψ̂''(S₀)) - D₂` on the interior nodes,
/// its factorisation, and its near-kernel eigenvector.
#[derive(Clone, Debug)]
pub struct ProfileOperator {
    grid: ProfileGrid,
    diag: Vec<f64>,
    off: Vec<f64>,
    lu: TridiagLu,
    kernel: Vec<f64>,
    kernel_eigenvalue: f64,
}

impl ProfileOperator {
    pub fn new(psi: &DoubleWellPotential, s0: &Profile) -> Result<Self> {
        let g = s0.grid.clone();
        let n = g.len();
        let h2 = g.spacing() * g.spacing();
        let diag: Vec<f64> = (1..n - 1).map(|i| psi.d2(s0.values[i]) + 2.0 / h2).collect();
        let off = vec![-1.0 / h2; n - 3];
        let lu = TridiagLu::factor(&off, &diag, &off)?;
        let mut v: Vec<f64> = s0.d1[1..n - 1].to_vec();
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            v = lu.solve(&v);
            normalize(&mut v);
        }
        let lv = tridiag_apply(&off, &diag, &off, &v);
        let kernel_eigenvalue = dot(&v, &lv);
        Ok(Self { grid: g, diag, off, lu, kernel: v, kernel_eigenvalue })
    }

    pub fn grid(&self) -> &ProfileGrid {
        &self.grid
    }

    /// Eigenvalue of `L_h` closest to zero.
    pub fn kernel_eigenvalue(&self) -> f64 {
        self.kernel_eigenvalue
    }

    /// Unit-norm discrete kernel direction on interior nodes.
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// `(L_h f)` on interior nodes; `f` is a full-grid vector whose end values
    /// act as Dirichlet data.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mut y = tridiag_apply(&self.off, &self.diag, &self.off, &f[1..n - 1]);
        let h2 = self.grid.spacing().powi(2);
        y[0] -= f[0] / h2;
        y[n - 3] -= f[n - 1] / h2;
        y
    }

    /// Plain solve `L_h x = r` on interior nodes.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.lu.solve(rhs)
    }

    /// Solve on the orthogonal complement of the kernel direction.
    pub fn solve_deflated(&self, rhs: &[f64]) -> Vec<f64> {
        let v = &self.kernel;
        let a = dot(rhs, v);
        let r: Vec<f64> = rhs.iter().zip(v).map(|(r, v)| r - a * v).collect();
        let mut x = self.lu.solve(&r);
        let b = dot(&x, v);
        for (x, v) in x.iter_mut().zip(v) {
            *x -= b * v;
        }
        x
    }
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

fn pad(interior: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(interior.len() + 2);
    v.push(0.0);
    v.extend_from_slice(interior);
    v.push(0.0);
    v
}

/// `F₁` without its speed term, plus the coefficient of `S₀'`:
/// `F₁ = ε̄:[T̂]S₀ + ε̄:T̂⁻ + (s₀/c - λ^{1/2}κ)S₀'`.
pub fn forcing_f1(s0: &Profile, data: &InterfaceData, s0_speed: f64, lambda: f64, c: f64) -> Vec<f64> {
    let k = s0_speed / c - lambda.sqrt() * data.kappa;
    s0.values.iter().zip(&s0.d1).map(|(s, d)| data.eps_t_jump * s + data.eps_t_minus + k * d).collect()
}

/// `F₂ = σ̌(0) + ε̄:[T̂]S₁ + (s₀/c - λ^{1/2}κ)S₁' - ½ψ̂'''(S₀)S₁²
///       + λ^{1/2}(σ̂'(0)ζ + g I₀) + (s₁/c - λκ'ζ)S₀'`.
#[allow(clippy::too_many_arguments)]
pub fn forcing_f2(
    psi: &DoubleWellPotential,
    s0: &Profile,
    i0: &Primitive,
    s1: &Profile,
    data: &InterfaceData,
    s0_speed: f64,
    s1_speed: f64,
    lambda: f64,
    c: f64,
) -> Vec<f64> {
    let sl = lambda.sqrt();
    let k0 = s0_speed / c - sl * data.kappa;
    let z = s0.zeta();
    (0..z.len())
        .map(|i| {
            let (a, a1) = (s1.values[i], s1.d1[i]);
            data.sigma_check0 + data.eps_t_jump * a + k0 * a1 - 0.5 * psi.d3(s0.values[i]) * a * a
                + sl * (data.sigma_hat_prime0 * z[i] + data.grad_term * i0.values[i])
                + (s1_speed / c - lambda * data.kappa_prime * z[i]) * s0.d1[i]
        })
        .collect()
}

/// Discrete `F_ρ = -L_h ρ` on the full grid (zero at the ends).
fn layer_forcing(op: &ProfileOperator, rho: &[f64]) -> Vec<f64> {
    pad(&op.apply(rho).iter().map(|v| -v).collect::<Vec<_>>())
}

/// Deflated solve of `L_h(S - ρ) = F - L_h ρ`, then the kernel shift fixing
/// `S(0) = 0`. Returns the profile values.
fn deflated_profile(op: &ProfileOperator, s0: &Profile, forcing: &[f64], rho: &[f64]) -> Vec<f64> {
    let n = op.grid.len();
    let frho = layer_forcing(op, rho);
    let rhs: Vec<f64> = (1..n - 1).map(|i| forcing[i] + frho[i]).collect();
    let w = pad(&op.solve_deflated(&rhs));
    let m = op.grid.center();
    let beta = -(w[m] + rho[m]) / s0.d1[m];
    (0..n).map(|i| w[i] + rho[i] + beta * s0.d1[i]).collect()
}

fn assemble(psi: &DoubleWellPotential, s0: &Profile, values: Vec<f64>, forcing: &[f64], left: f64, right: f64) -> Profile {
    let grid = s0.grid.clone();
    let d1 = grid.derivative(&values);
    let d2 = (0..values.len()).map(|i| psi.d2(s0.values[i]) * values[i] - forcing[i]).collect();
    Profile { grid, values, d1, d2, left_limit: left, right_limit: right, decay_rate: s0.decay_rate }
}

/// `|∫ F S₀'|` by the trapezoid rule.
pub fn orthogonality_defect(s0: &Profile, forcing: &[f64]) -> f64 {
    s0.grid.inner(forcing, &s0.d1).abs()
}

fn s1_with(
    op: &ProfileOperator,
    psi: &DoubleWellPotential,
    s0: &Profile,
    data: &InterfaceData,
    s0_speed: f64,
    lambda: f64,
    c: f64,
) -> Result<(Profile, Vec<f64>, f64)> {
    let layers = BoundaryLayers::new(psi, data, 0.0, lambda);
    let rho: Vec<f64> = s0.zeta().iter().map(|&z| layers.rho1(z).0).collect();
    let f1 = forcing_f1(s0, data, s0_speed, lambda, c);
    let defect = orthogonality_defect(s0, &f1);
    if !(defect <= SOLVABILITY_TOL) {
        return Err(Error::NotSolvable { defect, tolerance: SOLVABILITY_TOL });
    }
    let values = deflated_profile(op, s0, &f1, &rho);
    let p = assemble(psi, s0, values, &f1, layers.s1_minus, layers.s1_plus);
    p.check_tails(TAIL_TOL)?;
    Ok((p, rho, defect))
}

/// First-order profile `S₁` with `S₁(0) = 0`.
pub fn solve_s1(
    psi: &DoubleWellPotential,
    s0: &Profile,
    data: &InterfaceData,
    s0_speed: f64,
    lambda: f64,
    c: f64,
) -> Result<Profile> {
    let op = ProfileOperator::new(psi, s0)?;
    Ok(s1_with(&op, psi, s0, data, s0_speed, lambda, c)?.0)
}

/// `(s10, s11, s12)` from the closed-form integrals.
///
/// `s₁ = (c/c₁)[-σ̌(0) - ε̄:[T̂]∫S₁S₀' + (1/c₁)ε̄:⟨T̂⟩∫S₁'S₀' + ½∫ψ̂'''(S₀)S₁²S₀'
///        - λ^{1/2}(g J + σ̂'(0)M₁) + λκ'M₂]`
/// with `J = ∫S₀(1-S₀)`, `M₁ = ∫ζS₀'`, `M₂ = ∫ζ(S₀')²`.
pub fn s1_closed_form(
    psi: &DoubleWellPotential,
    s0: &Profile,
    s1: &Profile,
    data: &InterfaceData,
    c: f64,
) -> Result<(f64, f64, f64)> {
    let c1 = psi.c1()?;
    let g = &s0.grid;
    let mom = s0_moments(s0);
    let i_s1 = g.inner(&s1.values, &s0.d1);
    let i_ds1 = g.inner(&s1.d1, &s0.d1);
    let cubic: Vec<f64> =
        (0..g.len()).map(|i| psi.d3(s0.values[i]) * s1.values[i] * s1.values[i] * s0.d1[i]).collect();
    let i_cubic = g.trapezoid(&cubic);
    let k = c / c1;
    let s10 = k * (-data.sigma_check0 - data.eps_t_jump * i_s1 + data.eps_t_mean / c1 * i_ds1 + 0.5 * i_cubic);
    let s11 = -k * (data.grad_term * mom.j + data.sigma_hat_prime0 * mom.m1);
    let s12 = k * data.kappa_prime * mom.m2;
    Ok((s10, s11, s12))
}

fn s2_with(
    op: &ProfileOperator,
    psi: &DoubleWellPotential,
    s0: &Profile,
    i0: &Primitive,
    s1: &Profile,
    data: &InterfaceData,
    speeds: (f64, f64),
    lambda: f64,
    c: f64,
) -> Result<(Profile, Vec<f64>, f64)> {
    let layers = BoundaryLayers::new(psi, data, i0.c_plus, lambda);
    let rho: Vec<f64> = s0.zeta().iter().map(|&z| layers.rho2(z).0).collect();
    let f2 = forcing_f2(psi, s0, i0, s1, data, speeds.0, speeds.1, lambda, c);
    let frho = layer_forcing(op, &rho);
    let total: Vec<f64> = f2.iter().zip(&frho).map(|(a, b)| a + b).collect();
    let defect = orthogonality_defect(s0, &total);
    if !(defect <= SOLVABILITY_TOL) {
        return Err(Error::NotSolvable { defect, tolerance: SOLVABILITY_TOL });
    }
    let values = deflated_profile(op, s0, &f2, &rho);
    let n = values.len();
    let p = assemble(psi, s0, values, &f2, rho[0], rho[n - 1]);
    p.check_tails(TAIL_TOL)?;
    Ok((p, rho, defect))
}

/// Second-order profile `S₂` with `S₂(0) = 0`; `s1_speed` is the assembled
/// `s10 + λ^{1/2}s11 + λ s12`.
#[allow(clippy::too_many_arguments)]
pub fn solve_s2(
    psi: &DoubleWellPotential,
    s0: &Profile,
    s1: &Profile,
    data: &InterfaceData,
    s0_speed: f64,
    s1_speed: f64,
    lambda: f64,
    c: f64,
) -> Result<Profile> {
    let op = ProfileOperator::new(psi, s0)?;
    let i0 = s0_primitive(psi, s0);
    Ok(s2_with(&op, psi, s0, &i0, s1, data, (s0_speed, s1_speed), lambda, c)?.0)
}

/// Orthogonality defects of the two solves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolvabilityDefects {
    /// `|∫F₁S₀'|`
    pub f1: f64,
    /// `|∫(F₂ + F₃)S₀'|` with `F₃ = -L_h ρ₂`.
    pub f2: f64,
}

/// All profiles and coefficients for one interface-data instance.
#[derive(Clone, Debug)]
pub struct ProfileSet {
    pub s0: Profile,
    pub i0: Primitive,
    pub s1: Profile,
    pub s2: Profile,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    pub layers: BoundaryLayers,
    pub coeffs: KineticCoefficients,
    pub defects: SolvabilityDefects,
    pub moments: S0Moments,
    pub c1: f64,
    pub decay_rate: f64,
    pub lambda: f64,
    pub mobility: f64,
}

impl ProfileSet {
    pub fn solve(
        psi: &DoubleWellPotential,
        data: &InterfaceData,
        grid: &ProfileGrid,
        lambda: f64,
        c: f64,
    ) -> Result<Self> {
        data.check_consistency(1e-10)?;
        let s0 = solve_s0(psi, grid)?;
        let i0 = s0_primitive(psi, &s0);
        let op = ProfileOperator::new(psi, &s0)?;
        let (s00, s01) = s0_closed_form(data, psi, lambda, c)?;
        let s0_speed = s00 + lambda.sqrt() * s01;
        let (s1, rho1, d1) = s1_with(&op, psi, &s0, data, s0_speed, lambda, c)?;
        let (s10, s11, s12) = s1_closed_form(psi, &s0, &s1, data, c)?;
        let coeffs = KineticCoefficients { s00, s01, s10, s11, s12 };
        let (s2, rho2, d2) = s2_with(&op, psi, &s0, &i0, &s1, data, (s0_speed, coeffs.s1(lambda)), lambda, c)?;
        Ok(Self {
            moments: s0_moments(&s0),
            layers: BoundaryLayers::new(psi, data, i0.c_plus, lambda),
            s0,
            i0,
            s1,
            s2,
            rho1,
            rho2,
            coeffs,
            defects: SolvabilityDefects { f1: d1, f2: d2 },
            c1: psi.c1()?,
            decay_rate: psi.decay_rate()?,
            lambda,
            mobility: c,
        })
    }

    pub fn grid(&self) -> &ProfileGrid {
        &self.s0.grid
    }

    /// `max |S₂(ζ)|/(1 + |ζ|)`.
    pub fn s2_growth_constant(&self) -> f64 {
        self.s0.zeta().iter().zip(&self.s2.values).map(|(z, v)| v.abs() / (1.0 + z.abs())).fold(0.0, f64::max)
    }
}

/// `(s₀, s₁)` recovered as Lagrange multipliers of the bordered systems
///
/// `L_h w - (s/c) S₀' = G`, `w(0) = 0`,
///
/// eliminated through two solves with the (non-deflated) `L_h`. `s₁` is
/// the assembled first-order speed.
pub fn saddle_multipliers(
    psi: &DoubleWellPotential,
    data: &InterfaceData,
    grid: &ProfileGrid,
    lambda: f64,
    c: f64,
) -> Result<(f64, f64)> {
    let s0 = solve_s0(psi, grid)?;
    let i0 = s0_primitive(psi, &s0);
    let op = ProfileOperator::new(psi, &s0)?;
    let n = grid.len();
    let m = grid.center() - 1;
    let xk = op.solve(&s0.d1[1..n - 1]);
    let multiplier = |base: &[f64], rho: &[f64]| -> (f64, Vec<f64>) {
        let frho = layer_forcing(&op, rho);
        let g: Vec<f64> = (1..n - 1).map(|i| base[i] + frho[i]).collect();
        let xg = op.solve(&g);
        let k = -xg[m] / xk[m];
        let w: Vec<f64> = xg.iter().zip(&xk).map(|(a, b)| a + k * b).collect();
        let s: Vec<f64> = pad(&w).iter().zip(rho).map(|(w, r)| w + r).collect();
        (k * c, s)
    };

    let layers = BoundaryLayers::new(psi, data, i0.c_plus, lambda);
    let rho1: Vec<f64> = s0.zeta().iter().map(|&z| layers.rho1(z).0).collect();
    // With s₀ = 0 the forcing carries only the λ^{1/2}κ part of the S₀' term.
    let g1 = forcing_f1(&s0, data, 0.0, lambda, c);
    let (s0_speed, s1_values) = multiplier(&g1, &rho1);
    let s1 = assemble(psi, &s0, s1_values, &g1, layers.s1_minus, layers.s1_plus);

    let rho2: Vec<f64> = s0.zeta().iter().map(|&z| layers.rho2(z).0).collect();
    let g2 = forcing_f2(psi, &s0, &i0, &s1, data, s0_speed, 0.0, lambda, c);
    let (s1_speed, _) = multiplier(&g2, &rho2);
    Ok((s0_speed, s1_speed))
}

/// `(4 f(h/2) - f(h))/3`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Both coefficient routes, Richardson-extrapolated over `grid` and its
/// refinement: `((s₀, s₁) closed form, (s₀, s₁) multipliers)`.
pub fn cross_validate(
    psi: &DoubleWellPotential,
    data: &InterfaceData,
    grid: &ProfileGrid,
    lambda: f64,
    c: f64,
) -> Result<((f64, f64), (f64, f64))> {
    let fine = grid.refined();
    let closed = |g: &ProfileGrid| -> Result<(f64, f64)> {
        let set = ProfileSet::solve(psi, data, g, lambda, c)?;
        Ok((set.coeffs.s0(lambda), set.coeffs.s1(lambda)))
    };
    let (a0, a1) = closed(grid)?;
    let (b0, b1) = closed(&fine)?;
    let (p0, p1) = saddle_multipliers(psi, data, grid, lambda, c)?;
    let (q0, q1) = saddle_multipliers(psi, data, &fine, lambda, c)?;
    Ok(((richardson(a0, b0), richardson(a1, b1)), (richardson(p0, q0), richardson(p1, q1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_quartic;

    #[test]
    fn grid_is_symmetric_with_exact_center() {
        let g = ProfileGrid::new(30.0, 11).unwrap();
        assert_eq!(g.zeta()[g.center()], 0.0);
        for i in 0..g.len() {
            assert_eq!(g.zeta()[i], -g.zeta()[g.len() - 1 - i]);
        }
        assert!(ProfileGrid::new(30.0, 10).is_err());
    }

    #[test]
    fn s0_center_and_limits() {
        let psi = make_quartic(1.0).unwrap();
        let g = ProfileGrid::default_for(&psi).unwrap();
        let s0 = solve_s0(&psi, &g).unwrap();
        assert_eq!(s0.at_center(), 0.5);
        assert!(s0.tail_error() < 1e-12);
    }

    #[test]
    fn closed_form_s0_example() {
        let psi = make_quartic(1.0).unwrap();
        let mut d = InterfaceData::zero(&psi);
        d.eps_t_mean = 0.03;
        let (s00, s01) = s0_closed_form(&d, &psi, 0.01, 1.0).unwrap();
        assert!((s00 + 0.03 * 6.0 / 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(s01, 0.0);
        let d = InterfaceData::synthetic(&psi, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0);
        let (s00, s01) = s0_closed_form(&d, &psi, 0.01, 1.0).unwrap();
        assert!((s00 + 0.01f64.sqrt() * s01 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn kinetic_relation_arithmetic() {
        let k = KineticCoefficients { s00: -0.1272792, s10: 0.05, ..Default::default() };
        let s = kinetic_relation(&k, 0.01, 0.04).unwrap();
        assert!((s + 0.1222792).abs() < 1e-12);
        assert!(kinetic_relation(&k, 0.5, 0.04).is_err());
    }

    #[test]
    fn rho_jets_match_finite_differences() {
        let l = BoundaryLayers { s1_minus: 0.3, s1_plus: -0.2, s2_minus: (0.1, 0.05), s2_plus: (-0.4, 0.2) };
        let h = 1e-5;
        for &z in &[-1.7, -1.2, 1.3, 1.9] {
            let (_, d1, d2) = l.rho2(z);
            let fd1 = (l.rho2(z + h).0 - l.rho2(z - h).0) / (2.0 * h);
            let fd2 = (l.rho2(z + h).1 - l.rho2(z - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7 && (d2 - fd2).abs() < 1e-5, "z={z}");
        }
        assert_eq!(l.rho1(0.5).0, 0.0);
        assert_eq!(l.rho1(3.0).0, -0.2);
    }

    #[test]
    fn zero_data_gives_zero_corrections() {
        let psi = make_quartic(1.0).unwrap();
        let g = ProfileGrid::new(30.0, 1001).unwrap();
        let set = ProfileSet::solve(&psi, &InterfaceData::zero(&psi), &g, 0.04, 1.0).unwrap();
        assert!(set.s1.values.iter().all(|v| v.abs() < 1e-14));
        assert!(set.s2.values.iter().all(|v| v.abs() < 1e-14));
        assert_eq!((set.coeffs.s10, set.coeffs.s11), (0.0, 0.0));
    }

    #[test]
    fn unsolvable_input_is_rejected() {
        let psi = make_quartic(1.0).unwrap();
        let g = ProfileGrid::new(30.0, 1001).unwrap();
        let s0 = solve_s0(&psi, &g).unwrap();
        let d = InterfaceData::synthetic(&psi, 0.05, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(solve_s1(&psi, &s0, &d, 0.0, 0.04, 1.0), Err(Error::NotSolvable { .. })));
    }
}
