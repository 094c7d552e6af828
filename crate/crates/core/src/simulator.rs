//! Direct time integration of the coupled Allen-Cahn/elasticity model.
//!
//! `S` lives at cell centres, the displacement at nodes. Each step solves
//! the quasi-static elasticity problem exactly for the current `S`, then
//! advances
//!
//! `(I - Δt cλ^{1/2} Δ_h) Sⁿ⁺¹ = Sⁿ - Δt (c/B)(-ε̄Tⁿ + μ^{-1/2}ψ̂'(Sⁿ))`
//!
//! with homogeneous Neumann conditions. In radial mode `ε̄ = 0` and the
//! Laplacian is the finite-volume operator in `d = 2` or `3`.

use serde::Serialize;

use crate::asymptotic::composite_for_bar;
use crate::error::{Error, Result};
use crate::linalg::solve_thomas;
use crate::potential::DoubleWellPotential;
use crate::profiles::{check_parameters, interpolate, solve_s0, ProfileGrid, ProfileSet};
use crate::transmission::{bar_interface_data, Bar1D};

/// Safety factor of the automatic time step.
pub const DT_SAFETY: f64 = 0.2;
/// A step whose largest change in `S` exceeds this is halved.
pub const MAX_STEP_CHANGE: f64 = 0.1;
/// Tolerated excursion of `S` outside `[0, 1]`.
pub const OVERSHOOT_TOL: f64 = 1e-3;
const MAX_HALVINGS: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Planar1d,
    Radial2d,
    Radial3d,
}

impl Geometry {
    /// Spatial dimension of the radial modes; 1 for the bar.
    pub fn dim(self) -> usize {
        match self {
            Self::Planar1d => 1,
            Self::Radial2d => 2,
            Self::Radial3d => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub geometry: Geometry,
    /// Bar length, or outer radius in radial mode.
    pub domain: f64,
    /// Number of cells.
    pub cells: usize,
    pub mu: f64,
    pub lambda: f64,
    pub mobility: f64,
    pub psi: DoubleWellPotential,
    /// Planar mode only.
    pub bar: Option<Bar1D>,
    /// Initial radius, radial mode only.
    pub r0: Option<f64>,
    /// Time step; `None` selects the stability bound times [`DT_SAFETY`].
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Steps between recorded outputs.
    pub output_every: usize,
}

impl SimConfig {
    pub fn width(&self) -> f64 {
        (self.mu * self.lambda).sqrt()
    }

    pub fn spacing(&self) -> f64 {
        self.domain / self.cells as f64
    }

    /// Cell centres.
    pub fn centres(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.cells).map(|i| (i as f64 + 0.5) * h).collect()
    }

    pub fn validate(&self) -> Result<()> {
        check_parameters(self.mu, self.lambda)?;
        if !(self.mobility > 0.0) || !(self.domain > 0.0) || !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter("mobility, domain and end time must be positive".into()));
        }
        if self.cells < 8 || self.output_every == 0 {
            return Err(Error::InvalidParameter("need at least 8 cells and a positive output cadence".into()));
        }
        if self.spacing() > self.width() / 8.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "grid does not resolve the interface: dx = {:.3e} > B/8 = {:.3e}",
                self.spacing(),
                self.width() / 8.0
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
            }
        }
        match self.geometry {
            Geometry::Planar1d => {
                let bar = self.bar.as_ref().ok_or_else(|| Error::InvalidParameter("planar mode needs a bar".into()))?;
                bar.validate()?;
                if (bar.length - self.domain).abs() > 1e-12 * self.domain {
                    return Err(Error::InvalidParameter("domain must equal the bar length".into()));
                }
            }
            _ => {
                let r0 = self.r0.ok_or_else(|| Error::InvalidParameter("radial mode needs an initial radius".into()))?;
                if !(r0 > 0.0 && r0 < self.domain) {
                    return Err(Error::InvalidParameter(format!("initial radius {r0} outside the domain")));
                }
            }
        }
        Ok(())
    }

    fn elastic_stiffness(&self) -> f64 {
        self.bar.as_ref().filter(|_| self.geometry == Geometry::Planar1d).map_or(0.0, |b| b.eps_bar.powi(2) * b.modulus)
    }

    /// `Δt = 0.2 / ((c/B)(μ^{-1/2} max ψ̂'' + ε̄²D))`: the explicit terms of
    /// the scheme are then a contraction with margin.
    pub fn auto_dt(&self) -> f64 {
        let lip = self.mobility / self.width() * (self.psi.max_curvature() / self.mu.sqrt() + self.elastic_stiffness());
        DT_SAFETY / lip
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or_else(|| self.auto_dt())
    }

    /// Copy with `k` times as many cells and the time step scaled by `1/k²`.
    pub fn refined(&self, k: usize) -> Self {
        let mut c = self.clone();
        c.cells *= k;
        c.dt = Some(self.time_step() / (k * k) as f64);
        c.output_every *= k * k;
        c
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimState {
    pub t: f64,
    /// Order parameter at cell centres.
    pub s: Vec<f64>,
    /// Displacement at nodes (planar only).
    pub u: Vec<f64>,
    /// Stress at cell centres (planar only).
    pub stress: Vec<f64>,
    pub steps: usize,
    /// Recorded `(t, interface position)`.
    pub history: Vec<(f64, f64)>,
}

impl SimState {
    pub fn max_overshoot(&self) -> f64 {
        self.s.iter().map(|&s| (-s).max(s - 1.0).max(0.0)).fold(0.0, f64::max)
    }
}

/// Exact discrete equilibrium `-(T_j - T_{j-1})/Δx = b(x_j)` at interior
/// nodes with `u(0) = U₀`, `u(L) = U_L`. Returns `(u, T)`.
pub fn solve_elasticity(bar: &Bar1D, s: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    let h = bar.length / n as f64;
    let d = bar.modulus;
    // Tᵢ = T₀ - Δx Σ_{j≤i} b(x_j)
    let mut offset = vec![0.0; n];
    for i in 1..n {
        offset[i] = offset[i - 1] - h * bar.body_force.eval(i as f64 * h);
    }
    let free: f64 = (0..n).map(|i| bar.eps_bar * s[i] + offset[i] / d).sum();
    let t0 = d * ((bar.ul - bar.u0) / h - free) / n as f64;
    let stress: Vec<f64> = offset.iter().map(|o| t0 + o).collect();
    let mut u = vec![bar.u0; n + 1];
    for i in 0..n {
        u[i + 1] = u[i] + h * (stress[i] / d + bar.eps_bar * s[i]);
    }
    u[n] = bar.ul;
    (u, stress)
}

/// `max |-(T_j - T_{j-1})/Δx - b(x_j)|` over interior nodes.
pub fn elasticity_residual(bar: &Bar1D, stress: &[f64]) -> f64 {
    let h = bar.length / stress.len() as f64;
    (1..stress.len())
        .map(|j| (-(stress[j] - stress[j - 1]) / h - bar.body_force.eval(j as f64 * h)).abs())
        .fold(0.0, f64::max)
}

fn with_elasticity(config: &SimConfig, s: Vec<f64>, t: f64) -> SimState {
    let (u, stress) = match (&config.bar, config.geometry) {
        (Some(bar), Geometry::Planar1d) => solve_elasticity(bar, &s),
        _ => (Vec::new(), Vec::new()),
    };
    SimState { t, s, u, stress, steps: 0, history: Vec::new() }
}

/// State with `S` given at cell centres.
pub fn state_from(config: &SimConfig, s: Vec<f64>) -> Result<SimState> {
    config.validate()?;
    if s.len() != config.cells {
        return Err(Error::InvalidParameter(format!("expected {} values, got {}", config.cells, s.len())));
    }
    let mut st = with_elasticity(config, s, 0.0);
    record(&mut st, config);
    Ok(st)
}

/// Planar state seeded from the composite asymptotic field.
pub fn init_traveling(config: &SimConfig) -> Result<SimState> {
    config.validate()?;
    let bar = match (config.geometry, &config.bar) {
        (Geometry::Planar1d, Some(b)) => b,
        _ => return Err(Error::InvalidParameter("travelling initial data needs planar geometry".into())),
    };
    let grid = ProfileGrid::default_for(&config.psi)?;
    let field = composite_for_bar(bar, &config.psi, &grid, config.mu, config.lambda, config.mobility)?;
    let s = config.centres().iter().map(|&x| field.sample(x).s).collect();
    state_from(config, s)
}

/// Radial state `S(r) = S₀((R₀ - r)/B)`, the `S = 1` phase inside.
pub fn init_radial(config: &SimConfig) -> Result<SimState> {
    config.validate()?;
    let r0 = match (config.geometry, config.r0) {
        (Geometry::Planar1d, _) | (_, None) => {
            return Err(Error::InvalidParameter("radial initial data needs radial geometry".into()))
        }
        (_, Some(r)) => r,
    };
    let grid = ProfileGrid::default_for(&config.psi)?;
    let s0 = solve_s0(&config.psi, &grid)?;
    let b = config.width();
    let s = config.centres().iter().map(|&r| interpolate(&grid, &s0.values, (r0 - r) / b)).collect();
    state_from(config, s)
}

/// Face areas and cell volumes of the finite-volume mesh (unit factors).
fn mesh(config: &SimConfig) -> (Vec<f64>, Vec<f64>) {
    let n = config.cells;
    let h = config.spacing();
    let d = config.geometry.dim() as i32;
    let faces: Vec<f64> = (0..=n).map(|i| if d == 1 { 1.0 } else { (i as f64 * h).powi(d - 1) }).collect();
    let vols: Vec<f64> = (0..n)
        .map(|i| if d == 1 { h } else { (((i + 1) as f64 * h).powi(d) - (i as f64 * h).powi(d)) / d as f64 })
        .collect();
    (faces, vols)
}

/// `(c/B)(-ε̄T + μ^{-1/2}ψ̂'(S))`, the explicit part of the update.
fn explicit_rate(config: &SimConfig, st: &SimState) -> Vec<f64> {
    let k = config.mobility / config.width();
    let rm = config.mu.sqrt();
    let eps = config.bar.as_ref().filter(|_| config.geometry == Geometry::Planar1d).map_or(0.0, |b| b.eps_bar);
    st.s.iter()
        .enumerate()
        .map(|(i, &s)| {
            let drive = if eps != 0.0 { -eps * st.stress[i] } else { 0.0 };
            k * (drive + config.psi.d1(s) / rm)
        })
        .collect()
}

fn advance(config: &SimConfig, st: &SimState, dt: f64, depth: u32) -> Result<SimState> {
    let n = config.cells;
    let h = config.spacing();
    let (faces, vols) = mesh(config);
    // Implicit diffusion with coefficient cλ^{1/2}.
    let nu = dt * config.mobility * config.lambda.sqrt();
    let mut lower = vec![0.0; n - 1];
    let mut upper = vec![0.0; n - 1];
    let mut diag = vec![1.0; n];
    for i in 0..n - 1 {
        let w = faces[i + 1] / h;
        upper[i] = -nu * w / vols[i];
        lower[i] = -nu * w / vols[i + 1];
        diag[i] += nu * w / vols[i];
        diag[i + 1] += nu * w / vols[i + 1];
    }
    let rate = explicit_rate(config, st);
    let rhs: Vec<f64> = st.s.iter().zip(&rate).map(|(s, r)| s - dt * r).collect();
    let s = solve_thomas(&lower, &diag, &upper, &rhs)?;
    let change = s.iter().zip(&st.s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !change.is_finite() || change > MAX_STEP_CHANGE {
        if depth >= MAX_HALVINGS {
            return Err(Error::StepCollapse { t: st.t, dt });
        }
        let half = advance(config, st, 0.5 * dt, depth + 1)?;
        return advance(config, &half, 0.5 * dt, depth + 1);
    }
    let mut next = with_elasticity(config, s, st.t + dt);
    next.steps = st.steps;
    next.history = Vec::new();
    Ok(next)
}

/// One IMEX Euler step of length `config.time_step()`.
pub fn step(state: &SimState, config: &SimConfig) -> Result<SimState> {
    let mut next = advance(config, state, config.time_step(), 0)?;
    next.steps = state.steps + 1;
    next.history = state.history.clone();
    if next.steps % config.output_every == 0 {
        record(&mut next, config);
    }
    Ok(next)
}

fn record(st: &mut SimState, config: &SimConfig) {
    if let Ok(x) = locate_level(&config.centres(), &st.s, 0.5, false) {
        st.history.push((st.t, x));
    }
}

/// Advance until `t_end`, calling `observe` after every step.
pub fn run(config: &SimConfig, mut state: SimState, mut observe: impl FnMut(&SimState)) -> Result<SimState> {
    let dt = config.time_step();
    let steps = ((config.t_end - state.t) / dt - 1e-9).ceil().max(0.0) as usize;
    for _ in 0..steps {
        let mut next = advance(config, &state, dt, 0)?;
        next.steps = state.steps + 1;
        next.history = std::mem::take(&mut state.history);
        if next.steps % config.output_every == 0 {
            record(&mut next, config);
        }
        state = next;
        observe(&state);
    }
    Ok(state)
}

/// Unique crossing of `level` by linear (or, with `cubic`, four-point)
/// interpolation.
pub fn locate_level(x: &[f64], s: &[f64], level: f64, cubic: bool) -> Result<f64> {
    let mut found = None;
    for i in 0..s.len() - 1 {
        let (a, b) = (s[i] - level, s[i + 1] - level);
        if a == 0.0 || a * b < 0.0 {
            if found.is_some() {
                return Err(Error::Topology(format!("level {level} is crossed more than once")));
            }
            found = Some(i);
        }
    }
    let i = found.ok_or_else(|| Error::Topology(format!("level {level} is never crossed")))?;
    let t = (level - s[i]) / (s[i + 1] - s[i]);
    let linear = x[i] + t * (x[i + 1] - x[i]);
    if !cubic || i == 0 || i + 2 >= s.len() {
        return Ok(linear);
    }
    // Newton on the cubic through i-1..i+2 in the local coordinate.
    let h = x[i + 1] - x[i];
    let p = [s[i - 1] - level, s[i] - level, s[i + 1] - level, s[i + 2] - level];
    let nodes = [-1.0, 0.0, 1.0, 2.0];
    let eval = |r: f64| -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            let mut dw = 0.0;
            for k in 0..4 {
                if k == j {
                    continue;
                }
                let den = nodes[j] - nodes[k];
                dw = dw * (r - nodes[k]) / den + w / den;
                w *= (r - nodes[k]) / den;
            }
            v += p[j] * w;
            d += p[j] * dw;
        }
        (v, d)
    };
    let mut r = t;
    for _ in 0..20 {
        let (v, d) = eval(r);
        let dr = v / d;
        r -= dr;
        if dr.abs() < 1e-15 {
            break;
        }
    }
    if !(0.0..=1.0).contains(&r) {
        return Ok(linear);
    }
    Ok(x[i] + r * h)
}

/// Interface position and the rate of change of position (`dγ/dt` on the
/// bar, `dR/dt` in radial mode).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterfaceTrack {
    pub position: f64,
    /// Least-squares slope over the last five outputs; `None` before two.
    pub speed: Option<f64>,
}

pub fn track_interface(state: &SimState, config: &SimConfig) -> Result<InterfaceTrack> {
    let position = locate_level(&config.centres(), &state.s, 0.5, false)?;
    let tail = &state.history[state.history.len().saturating_sub(5)..];
    Ok(InterfaceTrack { position, speed: window_slope(tail) })
}

/// Least-squares slope of `(t, x)` pairs.
pub fn window_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - tm).powi(2)).sum();
    Some(num / den)
}

/// Width between the `S = 0.1` and `S = 0.9` crossings.
pub fn interface_width(state: &SimState, config: &SimConfig) -> Result<f64> {
    let x = config.centres();
    let a = locate_level(&x, &state.s, 0.1, false)?;
    let b = locate_level(&x, &state.s, 0.9, false)?;
    Ok((b - a).abs())
}

/// Parts of the discrete free energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyParts {
    pub elastic: f64,
    pub well: f64,
    pub gradient: f64,
    /// `-Σ Δx b(x_j) u_j`
    pub load: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.elastic + self.well + self.gradient + self.load
    }
}

/// `Σ V_i [W + μ^{-1/2}ψ̂(S_i)] + Σ_faces A Δx (μ^{1/2}λ/2)(ΔS/Δx)²`
/// minus the work of the body force. The scheme is a gradient flow of this
/// sum, so it is the energy that decreases step by step.
pub fn free_energy_parts(state: &SimState, config: &SimConfig) -> EnergyParts {
    let h = config.spacing();
    let (faces, vols) = mesh(config);
    let rm = config.mu.sqrt();
    let well = state.s.iter().zip(&vols).map(|(&s, v)| v * config.psi.value(s)).sum::<f64>() / rm;
    let gradient = 0.5 * rm * config.lambda
        * state.s.windows(2).enumerate().map(|(i, w)| faces[i + 1] * (w[1] - w[0]).powi(2) / h).sum::<f64>();
    let (elastic, load) = match (&config.bar, config.geometry) {
        (Some(bar), Geometry::Planar1d) => {
            let el = state.stress.iter().map(|t| 0.5 * t * t / bar.modulus * h).sum();
            let ld = -(1..config.cells).map(|j| h * bar.body_force.eval(j as f64 * h) * state.u[j]).sum::<f64>();
            (el, ld)
        }
        _ => (0.0, 0.0),
    };
    EnergyParts { elastic, well, gradient, load }
}

pub fn free_energy(state: &SimState, config: &SimConfig) -> f64 {
    free_energy_parts(state, config).total()
}

/// Measured against predicted interface speed at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeedReport {
    pub mu: f64,
    pub lambda: f64,
    pub cells: usize,
    pub dt: f64,
    pub t: f64,
    pub position: f64,
    pub s_ac: f64,
    pub s0: f64,
    pub s10: f64,
    pub s11: f64,
    /// `s₁₀ + λ^{1/2}s₁₁ + λs₁₂`
    pub s1: f64,
    /// `s_AC - s₀`
    pub error0: f64,
    /// `s_AC - s₀ - μ^{1/2}s₁`
    pub error1: f64,
}

/// Kinetic-relation coefficients for a sharp interface at the current
/// position of the bar.
pub fn instantaneous_coefficients(config: &SimConfig, gamma: f64) -> Result<ProfileSet> {
    let bar = config.bar.as_ref().ok_or_else(|| Error::InvalidParameter("needs a bar".into()))?;
    let moved = bar.with_interface(gamma);
    let (_, _, data) = bar_interface_data(&moved, &config.psi)?;
    let grid = ProfileGrid::default_for(&config.psi)?;
    ProfileSet::solve(&config.psi, &data, &grid, config.lambda, config.mobility)
}

/// Run the travelling setup to `t_end` and compare the measured speed with
/// the kinetic relation evaluated at the instantaneous interface position.
/// The speed is the centred five-point derivative of the (cubic-located)
/// interface position, with outputs spaced `output_every` steps apart.
pub fn measure_speed_vs_kinetics(config: &SimConfig) -> Result<SpeedReport> {
    let state = init_traveling(config)?;
    let dt = config.time_step();
    let x = config.centres();
    let stride = config.output_every;
    let end = ((config.t_end / dt).round() as usize).max(2 * stride);
    let samples: Vec<usize> = (0..5).map(|k| end - 2 * stride + k * stride).collect();
    let mut positions = Vec::with_capacity(5);
    let mut st = state;
    let mut k = 0;
    let mut err = None;
    for n in 1..=samples[4] {
        st = match advance(config, &st, dt, 0) {
            Ok(s) => s,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        if n == samples[k] {
            positions.push(locate_level(&x, &st.s, 0.5, true)?);
            k += 1;
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    let delta = stride as f64 * dt;
    let p = &positions;
    let s_ac = (p[0] - 8.0 * p[1] + 8.0 * p[3] - p[4]) / (12.0 * delta);
    let gamma = p[2];
    let set = instantaneous_coefficients(config, gamma)?;
    let s0 = set.coeffs.s0(config.lambda);
    let s1 = set.coeffs.s1(config.lambda);
    Ok(SpeedReport {
        mu: config.mu,
        lambda: config.lambda,
        cells: config.cells,
        dt,
        t: samples[2] as f64 * dt,
        position: gamma,
        s_ac,
        s0,
        s10: set.coeffs.s10,
        s11: set.coeffs.s11,
        s1,
        error0: s_ac - s0,
        error1: s_ac - s0 - config.mu.sqrt() * s1,
    })
}

/// Speed measurement extrapolated in the grid, with its certificate.
///
/// Runs at `(Δx, Δt)`, `(Δx/2, Δt/4)` and `(Δx/4, Δt/16)`; both leading
/// error terms then shrink by 4 per level, so `(4·fine - coarse)/3` removes
/// them. `change` is the difference between the extrapolations from the two
/// finer and the two coarser levels: the effect of halving `Δx` on the
/// reported `s_AC`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedSpeed {
    pub levels: Vec<SpeedReport>,
    pub s_ac: f64,
    pub s0: f64,
    pub s1: f64,
    pub error0: f64,
    pub error1: f64,
    pub change: f64,
    /// `change < 0.1 |s_AC - s₀|`
    pub certified: bool,
}

fn extrapolate(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

pub fn measure_speed_certified(config: &SimConfig) -> Result<CertifiedSpeed> {
    let levels = [1, 2, 4].iter().map(|&k| measure_speed_vs_kinetics(&config.refined(k))).collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&SpeedReport) -> f64| (extrapolate(f(&levels[0]), f(&levels[1])), extrapolate(f(&levels[1]), f(&levels[2])));
    let (coarse_sac, s_ac) = pick(|r| r.s_ac);
    let (_, s0) = pick(|r| r.s0);
    let (_, s1) = pick(|r| r.s1);
    let (_, error0) = pick(|r| r.error0);
    let (_, error1) = pick(|r| r.error1);
    let change = (s_ac - coarse_sac).abs();
    Ok(CertifiedSpeed { s_ac, s0, s1, error0, error1, change, certified: change < 0.1 * error0.abs(), levels })
}

/// `R(t)` history of a radial run together with the curvature-flow law
/// `R² = R₀² - 2(d-1)cλ^{1/2}t`.
#[derive(Clone, Debug, Serialize)]
pub struct RadialReport {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub predicted: Vec<f64>,
    /// `max |R² - R²_pred|/R₀²` over outputs with `R ≥ 5B`.
    pub max_relative_error: f64,
}

pub fn radial_shrinkage(config: &SimConfig) -> Result<RadialReport> {
    let state = init_radial(config)?;
    let r0 = config.r0.unwrap_or_default();
    let rate = 2.0 * (config.geometry.dim() as f64 - 1.0) * config.mobility * config.lambda.sqrt();
    let floor = 5.0 * config.width();
    let x = config.centres();
    let mut rep = RadialReport { times: Vec::new(), radii: Vec::new(), predicted: Vec::new(), max_relative_error: 0.0 };
    let push = |t: f64, r: f64, rep: &mut RadialReport| {
        let pred = (r0 * r0 - rate * t).max(0.0).sqrt();
        if r >= floor {
            rep.max_relative_error = rep.max_relative_error.max((r * r - pred * pred).abs() / (r0 * r0));
        }
        rep.times.push(t);
        rep.radii.push(r);
        rep.predicted.push(pred);
    };
    push(0.0, locate_level(&x, &state.s, 0.5, false)?, &mut rep);
    let mut stop = false;
    let mut failure = None;
    let _ = run(config, state, |st| {
        if stop || st.steps % config.output_every != 0 {
            return;
        }
        match locate_level(&x, &st.s, 0.5, false) {
            Ok(r) => {
                push(st.t, r, &mut rep);
                stop = r < floor;
            }
            Err(e) => {
                // The disc has vanished once S < 1/2 everywhere.
                if st.s.iter().any(|&s| s > 0.5) {
                    failure = Some(e);
                }
                stop = true;
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(rep)
}
