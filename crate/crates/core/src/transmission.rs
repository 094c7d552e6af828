//! Elastic transmission problems on a two-phase bar.
//!
//! The bar `[0, L]` carries phase `S = 0` on `x < γ` and `S = 1` on `x > γ`;
//! the normal `n = +e_x` points into the `S = 1` phase. With modulus `D`,
//! transformation strain `ε̄` and polynomial body force `b`, the solutions are
//! polynomials on each phase, so every interface trace is exact.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::potential::DoubleWellPotential;

/// Two-phase elastic bar.
#[derive(Clone, Debug, PartialEq)]
pub struct Bar1D {
    pub length: f64,
    /// Interface position `γ`.
    pub interface: f64,
    /// Modulus `D`.
    pub modulus: f64,
    /// Transformation strain `ε̄`.
    pub eps_bar: f64,
    /// Body force density `b(x)`.
    pub body_force: Poly,
    pub u0: f64,
    pub ul: f64,
}

impl Bar1D {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::InvalidParameter(format!("bar length must be positive, got {}", self.length)));
        }
        if !(self.interface > 0.0 && self.interface < self.length) {
            return Err(Error::InvalidParameter(format!(
                "interface {} must lie inside (0, {})",
                self.interface, self.length
            )));
        }
        if !(self.modulus > 0.0) {
            return Err(Error::InvalidParameter(format!("modulus must be positive, got {}", self.modulus)));
        }
        Ok(())
    }

    pub fn with_interface(&self, gamma: f64) -> Self {
        Self { interface: gamma, ..self.clone() }
    }

    /// Distance from the interface to the nearer bar end.
    pub fn clearance(&self) -> f64 {
        self.interface.min(self.length - self.interface)
    }
}

/// Displacement and stress, one polynomial per phase (index 0: `x < γ`).
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseSolution {
    pub gamma: f64,
    pub disp: [Poly; 2],
    pub stress: [Poly; 2],
}

impl PiecewiseSolution {
    pub fn side(&self, x: f64) -> usize {
        usize::from(x >= self.gamma)
    }

    pub fn displacement(&self, x: f64) -> f64 {
        self.disp[self.side(x)].eval(x)
    }

    /// `∂ₓu`.
    pub fn strain(&self, x: f64) -> f64 {
        self.disp[self.side(x)].eval_deriv(x, 1)
    }

    pub fn stress_at(&self, x: f64) -> f64 {
        self.stress[self.side(x)].eval(x)
    }

    /// Trace at `γ` from phase `side`.
    pub fn stress_trace(&self, side: usize) -> f64 {
        self.stress[side].eval(self.gamma)
    }

    pub fn strain_trace(&self, side: usize) -> f64 {
        self.disp[side].eval_deriv(self.gamma, 1)
    }

    pub fn disp_trace(&self, side: usize) -> f64 {
        self.disp[side].eval(self.gamma)
    }
}

/// Leading-order problem: `-∂ₓT̂ = b`, `T̂ = D(∂ₓû - ε̄Ŝ)`, `û(0) = U₀`,
/// `û(L) = U_L`, `[û] = [T̂] = 0` at `γ`.
pub fn solve_hat(bar: &Bar1D) -> Result<PiecewiseSolution> {
    bar.validate()?;
    let (l, g, d, e) = (bar.length, bar.interface, bar.modulus, bar.eps_bar);
    let big_b = bar.body_force.antiderivative();
    // T̂ = c - B(x); c from the total elongation.
    let c = (d * (bar.ul - bar.u0 - e * (l - g)) + big_b.integral(0.0, l)) / l;
    let stress = &Poly::constant(c) - &big_b;
    let a = stress.scale(1.0 / d).antiderivative().add_const(bar.u0);
    let right = &a + &Poly::new(vec![-e * g, e]);
    Ok(PiecewiseSolution { gamma: g, disp: [a, right], stress: [stress.clone(), stress] })
}

/// `S̃₁ = ε̄T̂/ψ̂''(Ŝ)` on each phase.
pub fn s_tilde1(bar: &Bar1D, hat: &PiecewiseSolution, psi: &DoubleWellPotential) -> [Poly; 2] {
    [
        hat.stress[0].scale(bar.eps_bar / psi.psi_pp0()),
        hat.stress[1].scale(bar.eps_bar / psi.psi_pp1()),
    ]
}

/// First-order problem: `-∂ₓŤ = 0`, `Ť = D(∂ₓǔ - ε̄S̃₁)`, homogeneous
/// Dirichlet data, `[ǔ] = [Ť] = 0` at `γ`.
pub fn solve_check(bar: &Bar1D, hat: &PiecewiseSolution, psi: &DoubleWellPotential) -> Result<PiecewiseSolution> {
    bar.validate()?;
    let (l, g, d, e) = (bar.length, bar.interface, bar.modulus, bar.eps_bar);
    let st = s_tilde1(bar, hat, psi);
    let src = [st[0].scale(e), st[1].scale(e)];
    let t_c = -d / l * (src[0].integral(0.0, g) + src[1].integral(g, l));
    let left = &Poly::new(vec![0.0, t_c / d]) + &src[0].antiderivative();
    let at_gamma = left.eval(g);
    // right(x) = ǔ(γ) + Ť(x-γ)/D + ∫_γ^x src
    let anti = src[1].antiderivative();
    let right = &(&Poly::new(vec![at_gamma - t_c * g / d, t_c / d]) + &anti).add_const(-anti.eval(g));
    let stress = Poly::constant(t_c);
    Ok(PiecewiseSolution { gamma: g, disp: [left, right.clone()], stress: [stress.clone(), stress] })
}

/// Scalar interface quantities consumed by the profile problems.
///
/// Stress contractions are with `ε̄`; `+` is the `S = 1` side. The 1D bar
/// produces `eps_t_jump = 0`, `u_star = ε̄`, `a_star = grad_term = 0`;
/// synthetic instances may set any of them.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceData {
    /// `ε̄:T̂⁺`
    pub eps_t_plus: f64,
    /// `ε̄:T̂⁻`
    pub eps_t_minus: f64,
    /// `ε̄:⟨T̂⟩`
    pub eps_t_mean: f64,
    /// `ε̄:[T̂]`
    pub eps_t_jump: f64,
    /// `σ̂(0)`
    pub sigma_hat0: f64,
    /// `σ̂'(0)`
    pub sigma_hat_prime0: f64,
    /// `σ̌(0)`
    pub sigma_check0: f64,
    /// `ε̄:⟨Ť⟩`
    pub eps_check_t_mean: f64,
    pub u_star: f64,
    pub a_star: f64,
    /// `ε̄:Dε(a*⊗n + ∇_Γu*)`
    pub grad_term: f64,
    /// Mean curvature `κ_Γ` with respect to `n`.
    pub kappa: f64,
    /// `κ'(0)`, derivative of the curvature along the normal.
    pub kappa_prime: f64,
    pub psi_pp_0: f64,
    pub psi_pp_1: f64,
}

impl InterfaceData {
    /// Stress-free, flat interface.
    pub fn zero(psi: &DoubleWellPotential) -> Self {
        Self::synthetic(psi, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Data from independent inputs, with the derived fields (`mean`, `jump`,
    /// `σ̌(0)`) filled in consistently.
    #[allow(clippy::too_many_arguments)]
    pub fn synthetic(
        psi: &DoubleWellPotential,
        eps_t_minus: f64,
        eps_t_plus: f64,
        eps_check_t_mean: f64,
        sigma_hat_prime0: f64,
        grad_term: f64,
        kappa: f64,
        kappa_prime: f64,
        u_star: f64,
    ) -> Self {
        let mut d = Self {
            eps_t_plus,
            eps_t_minus,
            eps_t_mean: 0.5 * (eps_t_plus + eps_t_minus),
            eps_t_jump: eps_t_plus - eps_t_minus,
            sigma_hat0: eps_t_minus,
            sigma_hat_prime0,
            sigma_check0: 0.0,
            eps_check_t_mean,
            u_star,
            a_star: 0.0,
            grad_term,
            kappa,
            kappa_prime,
            psi_pp_0: psi.psi_pp0(),
            psi_pp_1: psi.psi_pp1(),
        };
        d.sigma_check0 = d.lemma_sigma_check();
        d
    }

    /// `⟨ε̄:T̂/ψ̂''(Ŝ)⟩`.
    pub fn mean_eps_t_over_psi_pp(&self) -> f64 {
        0.5 * (self.eps_t_plus / self.psi_pp_1 + self.eps_t_minus / self.psi_pp_0)
    }

    /// `ε̄:⟨Ť⟩ - ε̄:[T̂] ⟨ε̄:T̂/ψ̂''(Ŝ)⟩`, the value `σ̌(0)` must take.
    pub fn lemma_sigma_check(&self) -> f64 {
        self.eps_check_t_mean - self.eps_t_jump * self.mean_eps_t_over_psi_pp()
    }

    /// `ε̄:Ť^{(±)} = σ̌(0) + ε̄:[T̂] ε̄:T̂^{(±)}/ψ̂''`.
    pub fn eps_check_t_side(&self, plus: bool) -> f64 {
        if plus {
            self.sigma_check0 + self.eps_t_jump * self.eps_t_plus / self.psi_pp_1
        } else {
            self.sigma_check0 + self.eps_t_jump * self.eps_t_minus / self.psi_pp_0
        }
    }

    /// Limits of `S₁` at `-∞` and `+∞`.
    pub fn s1_limits(&self) -> (f64, f64) {
        (self.eps_t_minus / self.psi_pp_0, self.eps_t_plus / self.psi_pp_1)
    }

    pub fn check_consistency(&self, tol: f64) -> Result<()> {
        let defect = (self.sigma_check0 - self.lemma_sigma_check()).abs();
        if defect > tol {
            return Err(Error::Inconsistent(format!("sigma_check0 violates the mean-stress identity by {defect:.3e}")));
        }
        let mean = 0.5 * (self.eps_t_plus + self.eps_t_minus);
        let jump = self.eps_t_plus - self.eps_t_minus;
        if (mean - self.eps_t_mean).abs() > tol || (jump - self.eps_t_jump).abs() > tol {
            return Err(Error::Inconsistent("stress mean/jump do not match the one-sided values".into()));
        }
        Ok(())
    }
}

/// Extract [`InterfaceData`] from the two bar solutions.
pub fn interface_data(
    bar: &Bar1D,
    hat: &PiecewiseSolution,
    check: &PiecewiseSolution,
    psi: &DoubleWellPotential,
    kappa: f64,
    kappa_prime: f64,
) -> Result<InterfaceData> {
    let e = bar.eps_bar;
    let g = bar.interface;
    let t_minus = hat.stress_trace(0);
    let t_plus = hat.stress_trace(1);
    let a_star = (hat.stress[1].eval_deriv(g, 1) - hat.stress[0].eval_deriv(g, 1)) / bar.modulus;
    // σ̂ = ε̄ D ∂ₓv̂; on ξ < 0, v̂ = û.
    let sigma_hat0 = e * bar.modulus * hat.strain_trace(0);
    let sigma_hat_prime0 = e * bar.modulus * hat.disp[0].eval_deriv(g, 2);
    // σ̌ = ε̄ D ∂ₓv̌; on ξ < 0, ∂ₓv̌ = ∂ₓǔ - u* S̃₁(γ⁻).
    let u_star = hat.strain_trace(1) - hat.strain_trace(0);
    let s1_minus = e * t_minus / psi.psi_pp0();
    let sigma_check0 = e * bar.modulus * (check.strain_trace(0) - u_star * s1_minus);
    let eps_check_t_mean = e * 0.5 * (check.stress_trace(0) + check.stress_trace(1));
    let data = InterfaceData {
        eps_t_plus: e * t_plus,
        eps_t_minus: e * t_minus,
        eps_t_mean: e * 0.5 * (t_plus + t_minus),
        eps_t_jump: e * (t_plus - t_minus),
        sigma_hat0,
        sigma_hat_prime0,
        sigma_check0,
        eps_check_t_mean,
        u_star,
        a_star,
        grad_term: e * bar.modulus * a_star,
        kappa,
        kappa_prime,
        psi_pp_0: psi.psi_pp0(),
        psi_pp_1: psi.psi_pp1(),
    };
    data.check_consistency(1e-8)?;
    Ok(data)
}

/// Convenience: both transmission solves and the interface data.
pub fn bar_interface_data(
    bar: &Bar1D,
    psi: &DoubleWellPotential,
) -> Result<(PiecewiseSolution, PiecewiseSolution, InterfaceData)> {
    let hat = solve_hat(bar)?;
    let check = solve_check(bar, &hat, psi)?;
    let data = interface_data(bar, &hat, &check, psi, 0.0, 0.0)?;
    Ok((hat, check, data))
}
