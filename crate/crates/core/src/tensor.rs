//! Symmetric 3×3 tensor algebra for interface jump conditions.
//!
//! Storage convention: a [`SymTensor3`] keeps the tensor components
//! `[xx, yy, zz, yz, xz, xy]` (true shear components, not engineering
//! strains). An [`ElasticityTensor`] is kept as a 6×6 matrix in Mandel form,
//! acting on `[xx, yy, zz, √2 yz, √2 xz, √2 xy]`. In Mandel form the double
//! contraction `α:β` is the Euclidean dot product, so `α:Dβ = m(α)·M m(β)`
//! and symmetry/positivity of `D` are those of `M`.

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3, Vector6};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymTensor3 {
    /// `[xx, yy, zz, yz, xz, xy]`
    pub c: [f64; 6],
}

impl SymTensor3 {
    pub fn new(xx: f64, yy: f64, zz: f64, yz: f64, xz: f64, xy: f64) -> Self {
        Self { c: [xx, yy, zz, yz, xz, xy] }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0)
    }

    /// Symmetric part of a 3×3 matrix.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let s = 0.5 * (m + m.transpose());
        Self::new(s[(0, 0)], s[(1, 1)], s[(2, 2)], s[(1, 2)], s[(0, 2)], s[(0, 1)])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [xx, yy, zz, yz, xz, xy] = self.c;
        Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz)
    }

    /// `ε(a⊗b) = ½(a⊗b + b⊗a)`.
    pub fn sym_outer(a: &Vec3, b: &Vec3) -> Self {
        Self::from_matrix(&(a * b.transpose()))
    }

    pub fn mandel(&self) -> Vector6<f64> {
        let [xx, yy, zz, yz, xz, xy] = self.c;
        Vector6::new(xx, yy, zz, SQRT2 * yz, SQRT2 * xz, SQRT2 * xy)
    }

    pub fn from_mandel(v: &Vector6<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3] / SQRT2, v[4] / SQRT2, v[5] / SQRT2)
    }

    /// Double contraction `α:β = Σ α_ij β_ij`.
    pub fn ddot(&self, other: &Self) -> f64 {
        self.mandel().dot(&other.mandel())
    }

    /// Matrix-vector product `α n`.
    pub fn apply(&self, n: &Vec3) -> Vec3 {
        self.to_matrix() * n
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(other.c) {
            *a += b;
        }
        Self { c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Symmetric positive-definite linear map `𝕊³ → 𝕊³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticityTensor {
    m: Matrix6<f64>,
}

impl ElasticityTensor {
    /// Isotropic medium `D ε = λ tr(ε) I + 2μ ε`.
    pub fn isotropic(lame_lambda: f64, lame_mu: f64) -> Result<Self> {
        let one = Vector6::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let m = one * one.transpose() * lame_lambda + Matrix6::identity() * (2.0 * lame_mu);
        Self::from_mandel(m)
    }

    /// Full anisotropic tensor from its Mandel matrix; validates symmetry and
    /// positive definiteness (smallest eigenvalue above 1e-10).
    pub fn from_mandel(m: Matrix6<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        if (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidParameter("elasticity matrix is not symmetric".into()));
        }
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if !(min > 1e-10) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(Self { m })
    }

    pub fn mandel_matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    pub fn apply(&self, eps: &SymTensor3) -> SymTensor3 {
        SymTensor3::from_mandel(&(self.m * eps.mandel()))
    }

    /// `α :_D β = α : Dβ`.
    pub fn inner(&self, a: &SymTensor3, b: &SymTensor3) -> f64 {
        a.mandel().dot(&(self.m * b.mandel()))
    }

    /// The matrix `B` with `B ω = (D ε(ω⊗n)) n`.
    pub fn acoustic(&self, n: &Vec3) -> Matrix3<f64> {
        let mut b = Matrix3::zeros();
        for k in 0..3 {
            let col = self.apply(&SymTensor3::sym_outer(&Vec3::ith(k, 1.0), n)).apply(n);
            b.set_column(k, &col);
        }
        b
    }
}

/// Interface jump data of the leading-order transmission problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpData3D {
    /// `u* = [∂ₙû]`
    pub u_star: Vec3,
    /// `[ε(∇û)] = Pₙ ε̄ = ε(u*⊗n)`
    pub strain_jump: SymTensor3,
    /// `[T̂] = -D Qₙ ε̄`
    pub stress_jump: SymTensor3,
}

fn check_unit(n: &Vec3) -> Result<()> {
    if (n.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("normal must be a unit vector, |n| = {}", n.norm())));
    }
    Ok(())
}

/// Solve `B ω = (D eps) n`; the returned `ω` spans `Pₙ eps = ε(ω⊗n)`.
fn normal_vector(d: &ElasticityTensor, n: &Vec3, eps: &SymTensor3) -> Result<Vec3> {
    check_unit(n)?;
    let rhs = d.apply(eps).apply(n);
    d.acoustic(n)
        .cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::LinearSolve("acoustic tensor is singular".into()))
}

/// `D`-orthogonal projection of `eps` onto `{ε(ω⊗n) : ω ∈ ℝ³}`.
pub fn project_normal(d: &ElasticityTensor, n: &Vec3, eps: &SymTensor3) -> Result<SymTensor3> {
    let w = normal_vector(d, n, eps)?;
    Ok(SymTensor3::sym_outer(&w, n))
}

/// Jump data for transformation strain `eps_bar` across a plane with normal `n`
/// pointing into the `S = 1` phase.
pub fn jump_data(d: &ElasticityTensor, n: &Vec3, eps_bar: &SymTensor3) -> Result<JumpData3D> {
    let u_star = normal_vector(d, n, eps_bar)?;
    let strain_jump = SymTensor3::sym_outer(&u_star, n);
    let stress_jump = d.apply(&eps_bar.sub(&strain_jump)).scale(-1.0);
    Ok(JumpData3D { u_star, strain_jump, stress_jump })
}

/// `n·[Ĉ]n = μ^{-1/2}[ψ̂] - ε̄:⟨T̂⟩`.
pub fn eshelby_normal_jump(
    t_plus: &SymTensor3,
    t_minus: &SymTensor3,
    eps_bar: &SymTensor3,
    psi_jump_over_sqrt_mu: f64,
) -> f64 {
    let mean = t_plus.add(t_minus).scale(0.5);
    psi_jump_over_sqrt_mu - eps_bar.ddot(&mean)
}

/// Eshelby tensor `Ĉ = ψ_μ I - (I + ∇u)ᵀ T`.
pub fn eshelby_tensor(psi_mu: f64, grad_u: &Matrix3<f64>, stress: &SymTensor3) -> Matrix3<f64> {
    Matrix3::identity() * psi_mu - (Matrix3::identity() + grad_u).transpose() * stress.to_matrix()
}

/// Linear elastic energy `W = ½ (ε - ε̄S) : D (ε - ε̄S)`.
pub fn elastic_energy(d: &ElasticityTensor, strain: &SymTensor3, eps_bar: &SymTensor3, s: f64) -> f64 {
    let e = strain.sub(&eps_bar.scale(s));
    0.5 * d.inner(&e, &e)
}
