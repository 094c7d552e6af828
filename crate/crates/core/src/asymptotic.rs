//! Composite asymptotic solution on the two-phase bar and its residuals.
//!
//! The outer expansion holds on each phase as polynomials in `x`; the inner
//! expansion is built from the stretched profiles `S₀, S₁, S₂`; the two are
//! blended by `φ = blend(2aξ/(3B|ln μ|))` with `B = (μλ)^{1/2}` and
//! `ξ = x - γ`. Time derivatives are taken in the frame travelling with the
//! kinetic-relation speed: `∂ₜ ≈ -s ∂ₓ`.

use serde::Serialize;

use crate::cutoff::{blend, Jet};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::potential::DoubleWellPotential;
use crate::profiles::{check_parameters, interpolate, ProfileGrid, ProfileSet};
use crate::transmission::{s_tilde1, Bar1D, InterfaceData, PiecewiseSolution};

/// Outer expansion `u₂ = û + μ^{1/2}ǔ + μũ`,
/// `S₂ = Ŝ + μ^{1/2}S̃₁ + μS̃₂ + μ^{3/2}S̃₃`; index 0 is the `S = 0` phase.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterExpansion {
    pub gamma: f64,
    pub hat: PiecewiseSolution,
    pub check: PiecewiseSolution,
    pub s_tilde1: [Poly; 2],
    pub s_tilde2: [Poly; 2],
    pub s_tilde3: [Poly; 2],
    pub u_tilde: [Poly; 2],
    /// `T̃`, constant on each phase.
    pub t_tilde: [f64; 2],
    /// Travelling-frame speed used for `∂ₜS̃₁`.
    pub speed: f64,
}

fn jet(p: &Poly, x: f64) -> Jet {
    (p.eval(x), p.eval_deriv(x, 1), p.eval_deriv(x, 2))
}

fn side(gamma: f64, x: f64) -> usize {
    usize::from(x >= gamma)
}

/// `(ũ⁻, ũ⁺)`: interface traces of `ũ` from the first-order profile,
/// `ũ⁺ = λ^{1/2}u*∫₀^∞(S₁ - S₁(∞))`, `ũ⁻ = -λ^{1/2}u*∫_{-∞}^0(S₁ - S₁(-∞))`.
pub fn u_tilde_traces(profiles: &ProfileSet, u_star: f64, lambda: f64) -> (f64, f64) {
    let (k_minus, k_plus) = first_order_excess(profiles);
    let sl = lambda.sqrt();
    (-sl * u_star * k_minus, sl * u_star * k_plus)
}

/// `J₁(ζ) = ∫₀^ζ S₁`, cumulative trapezoid with endpoint correction.
fn cumulative_s1(profiles: &ProfileSet) -> Vec<f64> {
    let g = profiles.grid();
    let (s, d) = (&profiles.s1.values, &profiles.s1.d1);
    let h = g.spacing();
    let m = g.center();
    let n = g.len();
    let mut j = vec![0.0; n];
    let step = |a: usize, b: usize| 0.5 * h * (s[a] + s[b]) - h * h / 12.0 * (d[b] - d[a]);
    for i in m + 1..n {
        j[i] = j[i - 1] + step(i - 1, i);
    }
    for i in (0..m).rev() {
        j[i] = j[i + 1] - step(i, i + 1);
    }
    j
}

/// `(∫_{-∞}^0 (S₁ - S₁(-∞)), ∫₀^∞ (S₁ - S₁(∞)))` from the cumulative `J₁`.
fn first_order_excess(profiles: &ProfileSet) -> (f64, f64) {
    let j = cumulative_s1(profiles);
    let z = profiles.grid().half_length();
    let n = j.len();
    let (lm, lp) = (profiles.s1.left_limit, profiles.s1.right_limit);
    (-j[0] - lm * z, j[n - 1] - lp * z)
}

/// Outer expansion on the bar. `profiles` supplies the interface traces of
/// `ũ`; `speed_hint` is the travelling-frame speed.
#[allow(clippy::too_many_arguments)]
pub fn build_outer(
    bar: &Bar1D,
    hat: &PiecewiseSolution,
    check: &PiecewiseSolution,
    psi: &DoubleWellPotential,
    profiles: &ProfileSet,
    lambda: f64,
    c: f64,
    speed_hint: f64,
) -> Result<OuterExpansion> {
    bar.validate()?;
    let (g, l, d, e) = (bar.interface, bar.length, bar.modulus, bar.eps_bar);
    let wells = [0.0, 1.0];
    let s1 = s_tilde1(bar, hat, psi);
    let s2: [Poly; 2] = std::array::from_fn(|k| {
        let w = wells[k];
        let p2 = psi.d2(w);
        &check.stress[k].scale(e / p2) - &s1[k].powi(2).scale(psi.d3(w) / (2.0 * p2))
    });
    let u_star = hat.strain_trace(1) - hat.strain_trace(0);
    let (trace_minus, trace_plus) = u_tilde_traces(profiles, u_star, lambda);
    // ũ' = T̃/D + ε̄S̃₂ with ũ(0) = 0, ũ(γ⁻) = ũ⁻, ũ(γ⁺) = ũ⁺, ũ(L) = 0.
    let src0 = s2[0].scale(e).antiderivative();
    let t_left = d * (trace_minus - src0.eval(g)) / g;
    let u_left = &Poly::new(vec![0.0, t_left / d]) + &src0;
    let src1 = s2[1].scale(e).antiderivative();
    let t_right = -d * (trace_plus + src1.eval(l) - src1.eval(g)) / (l - g);
    let u_right = &Poly::new(vec![trace_plus - t_right * g / d - src1.eval(g), t_right / d]) + &src1;
    let t_tilde = [t_left, t_right];
    let sl = lambda.sqrt();
    let s3: [Poly; 2] = std::array::from_fn(|k| {
        let w = wells[k];
        let p2 = psi.d2(w);
        let num = &(&(&Poly::constant(e * t_tilde[k]) - &(&s1[k] * &s2[k]).scale(psi.d3(w)))
            - &s1[k].powi(3).scale(psi.d4(w) / 6.0))
            + &(&s1[k].derivative().scale(sl * speed_hint / c) + &s1[k].derivative().derivative().scale(lambda));
        num.scale(1.0 / p2)
    });
    Ok(OuterExpansion {
        gamma: g,
        hat: hat.clone(),
        check: check.clone(),
        s_tilde1: s1,
        s_tilde2: s2,
        s_tilde3: s3,
        u_tilde: [u_left, u_right],
        t_tilde,
        speed: speed_hint,
    })
}

impl OuterExpansion {
    /// `S₂^{(μ)}` and its first two derivatives.
    pub fn s_jet(&self, x: f64, mu: f64) -> Jet {
        let k = side(self.gamma, x);
        let r = mu.sqrt();
        let (a, b, c) = (jet(&self.s_tilde1[k], x), jet(&self.s_tilde2[k], x), jet(&self.s_tilde3[k], x));
        let base = if k == 1 { 1.0 } else { 0.0 };
        (
            base + r * a.0 + mu * b.0 + mu * r * c.0,
            r * a.1 + mu * b.1 + mu * r * c.1,
            r * a.2 + mu * b.2 + mu * r * c.2,
        )
    }

    /// `u₂^{(μ)}` and its first two derivatives.
    pub fn u_jet(&self, x: f64, mu: f64) -> Jet {
        let k = side(self.gamma, x);
        let r = mu.sqrt();
        let (a, b, c) = (jet(&self.hat.disp[k], x), jet(&self.check.disp[k], x), jet(&self.u_tilde[k], x));
        (a.0 + r * b.0 + mu * c.0, a.1 + r * b.1 + mu * c.1, a.2 + r * b.2 + mu * c.2)
    }
}

/// Location relative to the interface layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    Inner,
    Match,
    Outer,
}

/// Pointwise composite fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompositeSample {
    pub u: f64,
    pub u_x: f64,
    pub s: f64,
    pub s_x: f64,
    pub s_xx: f64,
    pub stress: f64,
    pub phi: f64,
}

/// Composite asymptotic field `(u, S, T)` for fixed `(μ, λ)`.
#[derive(Clone, Debug)]
pub struct CompositeField {
    pub outer: OuterExpansion,
    pub profiles: ProfileSet,
    pub data: InterfaceData,
    pub psi: DoubleWellPotential,
    pub mu: f64,
    pub lambda: f64,
    pub mobility: f64,
    pub modulus: f64,
    pub eps_bar: f64,
    /// `B = (μλ)^{1/2}`
    pub width: f64,
    /// Inner half-width `3B|ln μ|/(2a)`; the matching zone ends at twice it.
    pub inner_half_width: f64,
    /// Kinetic-relation speed `s₀ + μ^{1/2}s₁`.
    pub speed: f64,
    u_star: f64,
    v_hat: [Poly; 2],
    v_check: [Poly; 2],
    j1: Vec<f64>,
}

/// Inner half-width `3B|ln μ|/(2a)`, after checking that the matching zone
/// stays inside the bar.
pub fn check_geometry(psi: &DoubleWellPotential, bar: &Bar1D, mu: f64, lambda: f64) -> Result<f64> {
    check_parameters(mu, lambda)?;
    let half = 1.5 * (mu * lambda).sqrt() * mu.ln().abs() / psi.decay_rate()?;
    if 2.0 * half >= bar.clearance() {
        return Err(Error::RegionGeometry { zone: 2.0 * half, delta: bar.clearance() });
    }
    Ok(half)
}

/// Blend inner and outer expansions. Requires a symmetric potential (the
/// inner displacement `B u* I₀` then matches `û` without an offset) and a
/// matching zone that stays inside the bar.
pub fn build_composite(
    outer: &OuterExpansion,
    profiles: &ProfileSet,
    data: &InterfaceData,
    psi: &DoubleWellPotential,
    bar: &Bar1D,
    mu: f64,
    lambda: f64,
) -> Result<CompositeField> {
    check_parameters(mu, lambda)?;
    if !psi.symmetric() {
        return Err(Error::InvalidParameter("the composite expansion needs a symmetric potential".into()));
    }
    if (profiles.lambda - lambda).abs() > 1e-15 * lambda {
        return Err(Error::InvalidParameter("profiles were solved for a different lambda".into()));
    }
    let inner_half_width = check_geometry(psi, bar, mu, lambda)?;
    let width = (mu * lambda).sqrt();
    let zone = 2.0 * inner_half_width;
    if zone / width >= profiles.grid().half_length() {
        return Err(Error::InvalidParameter("matching zone exceeds the profile truncation".into()));
    }
    let g = outer.gamma;
    let u_star = data.u_star;
    let xi = Poly::new(vec![-g, 1.0]);
    let hat = &outer.hat.disp;
    let check = &outer.check.disp;
    let v_hat = [hat[0].clone(), &(&hat[1] - &xi.scale(u_star)) - &xi.powi(2).scale(0.5 * data.a_star)];
    let (s1m, s1p) = data.s1_limits();
    let v_check = [&check[0] - &xi.scale(u_star * s1m), &check[1] - &xi.scale(u_star * s1p)];
    Ok(CompositeField {
        outer: outer.clone(),
        profiles: profiles.clone(),
        data: data.clone(),
        psi: psi.clone(),
        mu,
        lambda,
        mobility: profiles.mobility,
        modulus: bar.modulus,
        eps_bar: bar.eps_bar,
        width,
        inner_half_width,
        speed: profiles.coeffs.s(mu, lambda),
        u_star,
        v_hat,
        v_check,
        j1: cumulative_s1(profiles),
    })
}

impl CompositeField {
    pub fn region(&self, x: f64) -> Region {
        let d = (x - self.outer.gamma).abs();
        if d < self.inner_half_width {
            Region::Inner
        } else if d <= 2.0 * self.inner_half_width {
            Region::Match
        } else {
            Region::Outer
        }
    }

    fn grid(&self) -> &ProfileGrid {
        self.profiles.grid()
    }

    /// `(S, S', S'')` and `(u, u', u'')` of the inner expansion, in `x`.
    fn inner(&self, x: f64) -> (Jet, Jet) {
        let p = &self.profiles;
        let psi = &self.psi;
        let d = &self.data;
        let g = self.grid();
        let (mu, lam, c) = (self.mu, self.lambda, self.mobility);
        let (r, b, sl) = (mu.sqrt(), self.width, lam.sqrt());
        let xi = x - self.outer.gamma;
        let z = xi / b;

        // S₀ from its interpolated value; derivatives from the ODE.
        let s0 = interpolate(g, &p.s0.values, z);
        let s0p = (2.0 * psi.value(s0)).max(0.0).sqrt();
        let s0pp = psi.d1(s0);
        let i0 = interpolate(g, &p.i0.values, z);
        let j1 = interpolate(g, &self.j1, z);
        let s1 = interpolate(g, &p.s1.values, z);
        let s1p = interpolate(g, &p.s1.d1, z);
        let s2 = interpolate(g, &p.s2.values, z);
        let s2p = interpolate(g, &p.s2.d1, z);

        let sp0 = p.coeffs.s0(lam);
        let sp1 = p.coeffs.s1(lam);
        let k0 = sp0 / c - sl * d.kappa;
        let f1 = d.eps_t_jump * s0 + d.eps_t_minus + k0 * s0p;
        let f2 = d.sigma_check0 + d.eps_t_jump * s1 + k0 * s1p - 0.5 * psi.d3(s0) * s1 * s1
            + sl * (d.sigma_hat_prime0 * z + d.grad_term * i0)
            + (sp1 / c - lam * d.kappa_prime * z) * s0p;
        let s1pp = psi.d2(s0) * s1 - f1;
        let s2pp = psi.d2(s0) * s2 - f2;

        let s_jet = (
            s0 + r * s1 + mu * s2,
            (s0p + r * s1p + mu * s2p) / b,
            (s0pp + r * s1pp + mu * s2pp) / (b * b),
        );
        let k = side(self.outer.gamma, x);
        let (vh, vc) = (jet(&self.v_hat[k], x), jet(&self.v_check[k], x));
        let us = self.u_star;
        let u_jet = (
            b * us * i0 + mu * sl * us * j1 + vh.0 + r * vc.0,
            us * s0 + r * us * s1 + vh.1 + r * vc.1,
            us * s0p / b + r * us * s1p / b + vh.2 + r * vc.2,
        );
        (s_jet, u_jet)
    }

    fn phi(&self, x: f64) -> Jet {
        let scale = 2.0 * self.psi.decay_rate().unwrap_or(1.0) / (3.0 * self.width * self.mu.ln().abs());
        let (v, d1, d2) = blend(scale * (x - self.outer.gamma));
        (v, d1 * scale, d2 * scale * scale)
    }

    pub fn sample(&self, x: f64) -> CompositeSample {
        let phi = self.phi(x);
        let so = self.outer.s_jet(x, self.mu);
        let uo = self.outer.u_jet(x, self.mu);
        let (s, u) = if phi.0 == 0.0 && phi.1 == 0.0 && phi.2 == 0.0 {
            (so, uo)
        } else {
            let (si, ui) = self.inner(x);
            let mix = |i: Jet, o: Jet| -> Jet {
                let dv = i.0 - o.0;
                let d1 = i.1 - o.1;
                (
                    phi.0 * i.0 + (1.0 - phi.0) * o.0,
                    phi.0 * i.1 + (1.0 - phi.0) * o.1 + phi.1 * dv,
                    phi.0 * i.2 + (1.0 - phi.0) * o.2 + 2.0 * phi.1 * d1 + phi.2 * dv,
                )
            };
            (mix(si, so), mix(ui, uo))
        };
        CompositeSample {
            u: u.0,
            u_x: u.1,
            s: s.0,
            s_x: s.1,
            s_xx: s.2,
            stress: self.modulus * (u.1 - self.eps_bar * s.0),
            phi: phi.0,
        }
    }

    /// Inner and outer order parameters at `x`, for the matching error.
    pub fn inner_outer_s(&self, x: f64) -> (f64, f64) {
        (self.inner(x).0 .0, self.outer.s_jet(x, self.mu).0)
    }

    /// `f₂ = -s S_x + (c/B)(-ε̄T + μ^{-1/2}ψ̂'(S) - μ^{1/2}λ S_xx)`.
    pub fn f2(&self, x: f64) -> f64 {
        let p = self.sample(x);
        let (mu, lam) = (self.mu, self.lambda);
        -self.speed * p.s_x
            + self.mobility / self.width
                * (-self.eps_bar * p.stress + self.psi.d1(p.s) / mu.sqrt() - mu.sqrt() * lam * p.s_xx)
    }

    /// `f₁ = -∂ₓT - b` with a centred difference of step `h`.
    pub fn f1(&self, x: f64, h: f64, body_force: &Poly) -> f64 {
        let tp = self.sample(x + h).stress;
        let tm = self.sample(x - h).stress;
        -(tp - tm) / (2.0 * h) - body_force.eval(x)
    }
}

/// Region-wise sup-norms of the residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub mu: f64,
    pub lambda: f64,
    pub f1_inner: f64,
    pub f1_outer: f64,
    pub f2_inner: f64,
    pub f2_outer: f64,
    pub f3: f64,
    pub f1_l1: f64,
    pub f2_l1: f64,
    /// `sup |S₁^{(μ)} - S₂^{(μ)}|` over the matching zone.
    pub match_error: f64,
    /// Largest relative change of the sup-norms between the two resolutions.
    pub resolution_gap: f64,
}

struct Sweep {
    f1_inner: f64,
    f1_outer: f64,
    f2_inner: f64,
    f2_outer: f64,
    f1_l1: f64,
    f2_l1: f64,
    match_error: f64,
}

fn trapezoid_nonuniform(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum()
}

fn sweep(field: &CompositeField, bar: &Bar1D, inner_pts_per_width: f64, outer_pts: usize) -> Sweep {
    let g = field.outer.gamma;
    let zone = 2.0 * field.inner_half_width;
    let hi = field.width / inner_pts_per_width;
    let ho = bar.length / outer_pts as f64;
    // Fine grid across the layer, coarse grid elsewhere.
    let mut xs: Vec<f64> = (0..outer_pts).map(|i| (i as f64 + 0.5) * ho).filter(|x| (x - g).abs() > zone).collect();
    let ni = (zone / hi).ceil() as i64;
    xs.extend((-ni..=ni).map(|i| g + i as f64 * hi));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut s = Sweep { f1_inner: 0.0, f1_outer: 0.0, f2_inner: 0.0, f2_outer: 0.0, f1_l1: 0.0, f2_l1: 0.0, match_error: 0.0 };
    let mut f1s = Vec::with_capacity(xs.len());
    let mut f2s = Vec::with_capacity(xs.len());
    for &x in &xs {
        let region = field.region(x);
        let h = if region == Region::Outer { ho } else { hi };
        let f1 = field.f1(x, h, &bar.body_force).abs();
        let f2 = field.f2(x).abs();
        f1s.push(f1);
        f2s.push(f2);
        match region {
            Region::Outer => {
                s.f1_outer = s.f1_outer.max(f1);
                s.f2_outer = s.f2_outer.max(f2);
            }
            r => {
                s.f1_inner = s.f1_inner.max(f1);
                s.f2_inner = s.f2_inner.max(f2);
                if r == Region::Match {
                    let (si, so) = field.inner_outer_s(x);
                    s.match_error = s.match_error.max((si - so).abs());
                }
            }
        }
    }
    s.f1_l1 = trapezoid_nonuniform(&xs, &f1s);
    s.f2_l1 = trapezoid_nonuniform(&xs, &f2s);
    s
}

/// Residual sup-norms, certified by a second pass at twice the resolution.
pub fn residuals(field: &CompositeField, bar: &Bar1D) -> Result<ResidualReport> {
    let a = sweep(field, bar, 32.0, 4000);
    let b = sweep(field, bar, 64.0, 8000);
    let pairs = [
        ("f1 inner", a.f1_inner, b.f1_inner),
        ("f1 outer", a.f1_outer, b.f1_outer),
        ("f2 inner", a.f2_inner, b.f2_inner),
        ("f2 outer", a.f2_outer, b.f2_outer),
    ];
    let mut gap: f64 = 0.0;
    for (name, x, y) in pairs {
        let rel = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
        if rel > 0.2 {
            return Err(Error::UnderResolved { quantity: name.into(), relative: 100.0 * rel });
        }
        gap = gap.max(rel);
    }
    let f3 = field.sample(0.0).s_x.abs().max(field.sample(bar.length).s_x.abs());
    Ok(ResidualReport {
        mu: field.mu,
        lambda: field.lambda,
        f1_inner: b.f1_inner,
        f1_outer: b.f1_outer,
        f2_inner: b.f2_inner,
        f2_outer: b.f2_outer,
        f3,
        f1_l1: b.f1_l1,
        f2_l1: b.f2_l1,
        match_error: b.match_error,
        resolution_gap: gap,
    })
}

/// Profiles, outer and composite expansions for a bar, in one call.
pub fn composite_for_bar(
    bar: &Bar1D,
    psi: &DoubleWellPotential,
    grid: &ProfileGrid,
    mu: f64,
    lambda: f64,
    c: f64,
) -> Result<CompositeField> {
    check_geometry(psi, bar, mu, lambda)?;
    let (hat, check, data) = crate::transmission::bar_interface_data(bar, psi)?;
    let profiles = ProfileSet::solve(psi, &data, grid, lambda, c)?;
    let speed = profiles.coeffs.s(mu, lambda);
    let outer = build_outer(bar, &hat, &check, psi, &profiles, lambda, c, speed)?;
    build_composite(&outer, &profiles, &data, psi, bar, mu, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_quartic;

    fn bar() -> Bar1D {
        Bar1D {
            length: 1.0,
            interface: 0.5,
            modulus: 16.0,
            eps_bar: 0.5,
            body_force: Poly::constant(0.1),
            u0: 0.0,
            ul: 0.26,
        }
    }

    #[test]
    fn interface_value_is_one_half() {
        let psi = make_quartic(1.0).unwrap();
        let grid = ProfileGrid::new(30.0, 2001).unwrap();
        let f = composite_for_bar(&bar(), &psi, &grid, 1e-3, 0.04, 1.0).unwrap();
        assert!((f.sample(0.5).s - 0.5).abs() < 1e-12);
        assert_eq!(f.region(0.5), Region::Inner);
        assert_eq!(f.region(0.05), Region::Outer);
        let x = 0.05;
        assert_eq!(f.sample(x).s, f.outer.s_jet(x, 1e-3).0);
    }

    #[test]
    fn outer_boundary_values_vanish() {
        let psi = make_quartic(1.0).unwrap();
        let grid = ProfileGrid::new(30.0, 2001).unwrap();
        let f = composite_for_bar(&bar(), &psi, &grid, 1e-3, 0.04, 1.0).unwrap();
        assert!(f.outer.u_tilde[0].eval(0.0).abs() < 1e-15);
        assert!(f.outer.u_tilde[1].eval(1.0).abs() < 1e-14);
    }

    #[test]
    fn matching_zone_must_fit() {
        let psi = make_quartic(1.0).unwrap();
        let grid = ProfileGrid::new(30.0, 2001).unwrap();
        let mut b = bar();
        b.interface = 0.02;
        let r = composite_for_bar(&b, &psi, &grid, 1e-2, 0.5, 1.0);
        assert!(matches!(r, Err(Error::RegionGeometry { .. })), "{:?}", r.err());
    }
}
