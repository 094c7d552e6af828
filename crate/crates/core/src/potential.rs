//! Double-well potentials with wells at 0 and 1.
//!
//! Two families are provided:
//!
//! * the quartic `A s^2 (1-s)^2`, symmetric about `s = 1/2`;
//! * a tilted quartic `A [s^2 (1-s)^2 (1 + τ s) + β q(s)^6]` with
//!   `q(s) = (s-0.2)(0.8-s)/0.09` on `(0.2, 0.8)` and zero elsewhere. The tilt
//!   makes the well curvatures differ (`ψ''(0) = 2A`, `ψ''(1) = 2A(1+τ)`), the
//!   bump is `C^5` across its support ends. It exists to exercise code paths
//!   that must not assume symmetry.
//!
//! All derivatives up to order 5 are analytic. Each polynomial is stored
//! expanded about the nearer well (and the bump about its centre) so that
//! `ψ̂` keeps full relative accuracy as `s` approaches a well.

use crate::error::{Error, Result};
use crate::poly::Poly;

const BUMP_LO: f64 = 0.2;
const BUMP_HI: f64 = 0.8;
const BUMP_MID: f64 = 0.5 * (BUMP_LO + BUMP_HI);

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Quartic,
    Tilted { tilt: f64, bump: f64 },
}

/// A double-well potential `ψ̂` on `ℝ` with wells at 0 and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleWellPotential {
    amplitude: f64,
    kind: PotentialKind,
    /// Body expanded about `s = 0`.
    body0: Poly,
    /// Body expanded about `s = 1`.
    body1: Poly,
    /// Bump expanded about its centre.
    bump: Poly,
}

/// The quartic `A s^2 (1-s)^2`.
pub fn make_quartic(amplitude: f64) -> Result<DoubleWellPotential> {
    DoubleWellPotential::quartic(amplitude)
}

/// `a = min(√ψ̂''(0), √ψ̂''(1))`, the exponential decay rate of the profiles.
pub fn decay_rate(psi: &DoubleWellPotential) -> Result<f64> {
    psi.decay_rate()
}

/// `c₁ = ∫₀¹ √(2ψ̂)`.
pub fn c1_constant(psi: &DoubleWellPotential) -> Result<f64> {
    psi.c1()
}

impl DoubleWellPotential {
    pub fn quartic(amplitude: f64) -> Result<Self> {
        Self::build(amplitude, PotentialKind::Quartic)
    }

    /// Asymmetric test potential; requires `tilt > -1` and `bump >= 0`.
    pub fn tilted(amplitude: f64, tilt: f64, bump: f64) -> Result<Self> {
        if !(tilt > -1.0) || !tilt.is_finite() {
            return Err(Error::InvalidParameter(format!("tilt must exceed -1, got {tilt}")));
        }
        if !(bump >= 0.0) || !bump.is_finite() {
            return Err(Error::InvalidParameter(format!("bump must be non-negative, got {bump}")));
        }
        Self::build(amplitude, PotentialKind::Tilted { tilt, bump })
    }

    fn build(amplitude: f64, kind: PotentialKind) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        // s^2 (1-s)^2
        let quartic = Poly::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
        let (body, bump) = match kind {
            PotentialKind::Quartic => (quartic.scale(amplitude), Poly::zero()),
            PotentialKind::Tilted { tilt, bump } => {
                let body = (&quartic * &Poly::new(vec![1.0, tilt])).scale(amplitude);
                // q = 1 - t²/w² about the centre t = s - 1/2.
                let width2 = ((BUMP_HI - BUMP_LO) / 2.0).powi(2);
                let q = Poly::new(vec![1.0, 0.0, -1.0 / width2]);
                (body, q.powi(6).scale(amplitude * bump))
            }
        };
        // s = 1 is a double root; drop the round-off left in the low coefficients.
        let mut c1 = body.shift(1.0).coeffs().to_vec();
        c1.iter_mut().take(2).for_each(|c| *c = 0.0);
        let body1 = Poly::new(c1);
        Ok(Self { amplitude, kind, body0: body, body1, bump })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// `ψ̂^{(order)}(s)` for `order` in `0..=5`.
    pub fn eval(&self, s: f64, order: usize) -> f64 {
        assert!(order <= 5, "derivatives are provided up to order 5");
        let mut v = if s < 0.5 { self.body0.eval_deriv(s, order) } else { self.body1.eval_deriv(s - 1.0, order) };
        if s > BUMP_LO && s < BUMP_HI {
            v += self.bump.eval_deriv(s - BUMP_MID, order);
        }
        v
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(s, 0)
    }
    pub fn d1(&self, s: f64) -> f64 {
        self.eval(s, 1)
    }
    pub fn d2(&self, s: f64) -> f64 {
        self.eval(s, 2)
    }
    pub fn d3(&self, s: f64) -> f64 {
        self.eval(s, 3)
    }
    pub fn d4(&self, s: f64) -> f64 {
        self.eval(s, 4)
    }

    /// Whether `ψ̂(1/2 - r) = ψ̂(1/2 + r)` holds identically.
    pub fn symmetric(&self) -> bool {
        match self.kind {
            PotentialKind::Quartic => true,
            PotentialKind::Tilted { tilt, .. } => tilt == 0.0,
        }
    }

    pub fn psi_pp0(&self) -> f64 {
        self.d2(0.0)
    }

    pub fn psi_pp1(&self) -> f64 {
        self.d2(1.0)
    }

    pub fn decay_rate(&self) -> Result<f64> {
        let (p0, p1) = (self.psi_pp0(), self.psi_pp1());
        if p0 <= 0.0 || p1 <= 0.0 {
            return Err(Error::IllPosedPotential(format!(
                "well curvatures must be positive: psi''(0) = {p0}, psi''(1) = {p1}"
            )));
        }
        Ok(p0.sqrt().min(p1.sqrt()))
    }

    /// Upper bound of `ψ̂''` on `[-0.1, 1.1]`, sampled.
    pub fn max_curvature(&self) -> f64 {
        (0..=1200)
            .map(|i| self.d2(-0.1 + 1.2 * i as f64 / 1200.0))
            .fold(f64::MIN, f64::max)
    }

    /// `c₁ = ∫₀¹ √(2ψ̂)` by double-exponential quadrature, split at the bump
    /// support ends so each piece is smooth.
    pub fn c1(&self) -> Result<f64> {
        const TOL: f64 = 1e-10;
        let f = |s: f64| (2.0 * self.value(s)).max(0.0).sqrt();
        let cuts = [0.0, BUMP_LO, BUMP_HI, 1.0];
        let mut total = 0.0;
        let mut err = 0.0;
        for w in cuts.windows(2) {
            let out = quadrature::double_exponential::integrate(f, w[0], w[1], TOL / 3.0);
            total += out.integral;
            err += out.error_estimate;
        }
        if !(err <= TOL) {
            return Err(Error::Quadrature { achieved: err, tolerance: TOL });
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_values() {
        let p = make_quartic(1.0).unwrap();
        assert_eq!(p.eval(0.0, 0), 0.0);
        assert!((p.eval(0.5, 0) - 0.0625).abs() < 1e-15);
        assert!((p.eval(0.0, 2) - 2.0).abs() < 1e-15);
        assert!(p.symmetric());
    }

    #[test]
    fn rejects_bad_amplitude() {
        assert!(make_quartic(0.0).is_err());
        assert!(make_quartic(-1.0).is_err());
        assert!(DoubleWellPotential::tilted(1.0, -1.5, 0.0).is_err());
    }

    #[test]
    fn tilted_wells_and_curvatures() {
        let p = DoubleWellPotential::tilted(1.0, 0.5, 0.3).unwrap();
        for s in [0.0, 1.0] {
            assert!(p.value(s).abs() < 1e-12);
            assert!(p.d1(s).abs() < 1e-12);
        }
        assert!((p.psi_pp0() - 2.0).abs() < 1e-12);
        assert!((p.psi_pp1() - 3.0).abs() < 1e-12);
        assert!(!p.symmetric());
        assert!((p.decay_rate().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bump_is_c5_at_support_ends() {
        let p = DoubleWellPotential::tilted(1.0, 0.0, 1.0).unwrap();
        let q = make_quartic(1.0).unwrap();
        // Derivatives of the bump reach 1e8 near its ends; 1e-6 is round-off.
        for &s in &[BUMP_LO, BUMP_HI] {
            for k in 0..=5 {
                let inside = p.bump.eval_deriv(s - BUMP_MID, k);
                assert!(inside.abs() < 1e-6, "order {k} at {s}: {inside}");
            }
            assert!((p.value(s) - q.value(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn relative_accuracy_near_wells() {
        let p = make_quartic(1.0).unwrap();
        for e in [1e-6, 1e-10, 1e-14] {
            let exact = e * e * (1.0 - e) * (1.0 - e);
            assert!((p.value(e) - exact).abs() <= 1e-14 * exact);
            let t = (1.0 - e) - 1.0;
            let exact1 = t * t * (1.0 + t) * (1.0 + t);
            assert!((p.value(1.0 - e) - exact1).abs() <= 1e-14 * exact1);
        }
    }

    #[test]
    fn c1_quartic_closed_form() {
        let c1 = make_quartic(1.0).unwrap().c1().unwrap();
        assert!((c1 - 2f64.sqrt() / 6.0).abs() < 1e-12);
    }
}
