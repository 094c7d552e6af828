//! Parameter sweeps, log-log fits and the numerical-effort formulas.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{composite_for_bar, residuals};
use crate::error::{Error, Result};
use crate::potential::DoubleWellPotential;
use crate::profiles::{check_parameters, ProfileGrid};
use crate::simulator::{
    init_traveling, instantaneous_coefficients, interface_width, measure_speed_certified, radial_shrinkage, run,
    Geometry, SimConfig,
};
use crate::transmission::Bar1D;

/// Fewest points a log-log fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Speed,
    Residuals,
    Width,
    Radial,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Speed => "speed",
            Self::Residuals => "residuals",
            Self::Width => "width",
            Self::Radial => "radial",
        }
    }

    /// CSV value columns after `mu, lambda`.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Speed => &["s_ac", "s0", "s1", "error0", "error1", "change", "certified"],
            Self::Residuals => {
                &["f1_inn", "f1_out", "f2_inn", "f2_out", "f3", "match_error", "f1_l1", "f2_l1", "resolution_gap"]
            }
            Self::Width => &["width", "width_over_b"],
            Self::Radial => &["max_relative_error", "final_radius"],
        }
    }

    /// Columns whose magnitude is fitted against `μ` and `λ`.
    pub fn fitted(self) -> &'static [&'static str] {
        match self {
            Self::Speed => &["error0", "error1"],
            Self::Residuals => &["f1_inn", "f1_out", "f2_inn", "f2_out", "f3", "match_error"],
            Self::Width => &["width"],
            Self::Radial => &["max_relative_error"],
        }
    }
}

/// Physical setup shared by all points of a sweep.
#[derive(Clone, Debug)]
pub struct SweepPhysics {
    pub psi: DoubleWellPotential,
    pub bar: Bar1D,
    pub mobility: f64,
    /// Cells per interface width `B`; at least 8.
    pub points_per_width: f64,
    /// Planar end time (speed and width experiments).
    pub t_end: f64,
    pub radial_geometry: Geometry,
    pub radial_domain: f64,
    pub r0: f64,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub mus: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub experiment: Experiment,
    pub physics: SweepPhysics,
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mus.is_empty() || self.lambdas.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one mu and one lambda".into()));
        }
        if !(self.physics.points_per_width >= 8.0) {
            return Err(Error::InvalidParameter("points_per_width must be at least 8".into()));
        }
        let a = self.physics.psi.decay_rate()?;
        for &mu in &self.mus {
            for &lambda in &self.lambdas {
                check_parameters(mu, lambda)?;
                if self.experiment != Experiment::Radial {
                    let zone = 3.0 * (mu * lambda).sqrt() * mu.ln().abs() / a;
                    if zone >= self.physics.bar.clearance() {
                        return Err(Error::RegionGeometry { zone, delta: self.physics.bar.clearance() });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub lambda: f64,
    pub values: Vec<f64>,
    pub error: Option<String>,
}

/// Least-squares line in log-log coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `ln y`.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

/// `ln y = a + p ln μ + q ln λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoFactorFit {
    pub exponent_mu: f64,
    pub exponent_lambda: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedFit {
    pub column: String,
    /// `"mu"` or `"lambda"`: the varied parameter.
    pub against: String,
    /// Value of the parameter held fixed.
    pub fixed: f64,
    pub fit: FitResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub experiment: Experiment,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<NamedFit>,
    pub joint_fits: Vec<(String, TwoFactorFit)>,
    /// `error1` against `μ|ln μ|³` at each fixed `λ`, for information.
    pub log_corrected_fits: Vec<NamedFit>,
    /// Fits that were refused, with the reason.
    pub skipped: Vec<String>,
    /// All speed points passed the grid certificate (speed sweeps only).
    pub certified: Option<bool>,
}

impl SweepReport {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn fit(&self, column: &str, against: &str, fixed: f64) -> Option<&FitResult> {
        self.fits
            .iter()
            .find(|f| f.column == column && f.against == against && f.fixed == fixed)
            .map(|f| &f.fit)
    }

    pub fn joint_fit(&self, column: &str) -> Option<&TwoFactorFit> {
        self.joint_fits.iter().find(|(c, _)| c == column).map(|(_, f)| f)
    }

    /// CSV with header `mu,lambda,<columns>,error`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["mu".to_string(), "lambda".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("error".into());
        w.write_record(&header).map_err(io_error)?;
        for r in &self.rows {
            let mut rec = vec![r.mu.to_string(), r.lambda.to_string()];
            rec.extend(r.values.iter().map(|v| v.to_string()));
            rec.push(r.error.clone().unwrap_or_default());
            w.write_record(&rec).map_err(io_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Write `<experiment>.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(io_error)?;
        fs::write(dir.join(format!("{}.csv", self.experiment.name())), self.to_csv()?).map_err(io_error)?;
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(dir.join("summary.json"), json).map_err(io_error)
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Least-squares fit of `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("fit needs equally many x and y values".into()));
    }
    let points: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(&x, &y)| (x, y)).collect();
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()).copied().collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, got: usable.len() });
    }
    let n = usable.len() as f64;
    let lx: Vec<f64> = usable.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(FitResult { slope, intercept, residual, points })
}

/// Joint fit `ln y = a + p ln μ + q ln λ` over scattered points.
pub fn fit_two_factor(mus: &[f64], lambdas: &[f64], ys: &[f64]) -> Result<TwoFactorFit> {
    let pts: Vec<[f64; 3]> = mus
        .iter()
        .zip(lambdas)
        .zip(ys)
        .filter(|((m, l), y)| **m > 0.0 && **l > 0.0 && **y > 0.0 && y.is_finite())
        .map(|((m, l), y)| [m.ln(), l.ln(), y.ln()])
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, got: pts.len() });
    }
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for p in &pts {
        let row = Vector3::new(1.0, p[0], p[1]);
        a += row * row.transpose();
        b += row * p[2];
    }
    let sol = a
        .cholesky()
        .map(|c| c.solve(&b))
        .ok_or_else(|| Error::InvalidParameter("joint fit needs at least two distinct mu and lambda values".into()))?;
    let n = pts.len() as f64;
    let residual = (pts.iter().map(|p| (p[2] - sol[0] - sol[1] * p[0] - sol[2] * p[1]).powi(2)).sum::<f64>() / n).sqrt();
    Ok(TwoFactorFit { exponent_mu: sol[1], exponent_lambda: sol[2], intercept: sol[0], residual, points: pts.len() })
}

/// Planar simulation config for one `(μ, λ)` point of a sweep.
pub fn planar_config(physics: &SweepPhysics, mu: f64, lambda: f64) -> SimConfig {
    let b = (mu * lambda).sqrt();
    let l = physics.bar.length;
    SimConfig {
        geometry: Geometry::Planar1d,
        domain: l,
        cells: (physics.points_per_width * l / b).ceil() as usize,
        mu,
        lambda,
        mobility: physics.mobility,
        psi: physics.psi.clone(),
        bar: Some(physics.bar.clone()),
        r0: None,
        dt: None,
        t_end: physics.t_end,
        output_every: 1,
    }
}

/// Planar config whose outputs are spaced by about `B/5` of interface
/// travel at the predicted leading-order speed.
pub fn speed_config(physics: &SweepPhysics, mu: f64, lambda: f64) -> Result<SimConfig> {
    let mut c = planar_config(physics, mu, lambda);
    let set = instantaneous_coefficients(&c, physics.bar.interface)?;
    let v = set.coeffs.s0(lambda).abs().max(1e-3);
    let dt = c.time_step();
    c.output_every = ((0.2 * c.width() / v) / dt).ceil().max(1.0) as usize;
    Ok(c)
}

pub fn radial_config(physics: &SweepPhysics, mu: f64, lambda: f64) -> SimConfig {
    let b = (mu * lambda).sqrt();
    SimConfig {
        geometry: physics.radial_geometry,
        domain: physics.radial_domain,
        cells: (physics.points_per_width * physics.radial_domain / b).ceil() as usize,
        mu,
        lambda,
        mobility: physics.mobility,
        psi: physics.psi.clone(),
        bar: None,
        r0: Some(physics.r0),
        dt: None,
        t_end: physics.r0.powi(2) / (2.0 * physics.mobility * lambda.sqrt()),
        output_every: 20,
    }
}

fn evaluate(spec: &SweepSpec, mu: f64, lambda: f64) -> Result<Vec<f64>> {
    let ph = &spec.physics;
    match spec.experiment {
        Experiment::Speed => {
            let r = measure_speed_certified(&speed_config(ph, mu, lambda)?)?;
            Ok(vec![r.s_ac, r.s0, r.s1, r.error0, r.error1, r.change, f64::from(u8::from(r.certified))])
        }
        Experiment::Residuals => {
            let grid = ProfileGrid::default_for(&ph.psi)?;
            let field = composite_for_bar(&ph.bar, &ph.psi, &grid, mu, lambda, ph.mobility)?;
            let r = residuals(&field, &ph.bar)?;
            Ok(vec![
                r.f1_inner,
                r.f1_outer,
                r.f2_inner,
                r.f2_outer,
                r.f3,
                r.match_error,
                r.f1_l1,
                r.f2_l1,
                r.resolution_gap,
            ])
        }
        Experiment::Width => {
            let c = planar_config(ph, mu, lambda);
            let st = run(&c, init_traveling(&c)?, |_| {})?;
            let w = interface_width(&st, &c)?;
            Ok(vec![w, w / c.width()])
        }
        Experiment::Radial => {
            let c = radial_config(ph, mu, lambda);
            let r = radial_shrinkage(&c)?;
            Ok(vec![r.max_relative_error, r.radii.last().copied().unwrap_or(f64::NAN)])
        }
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

/// Run every `(μ, λ)` point, fit the scaling exponents and, with an output
/// directory, write the CSV table and `summary.json`. Failed points are
/// recorded in their row and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let points: Vec<(f64, f64)> =
        spec.mus.iter().flat_map(|&m| spec.lambdas.iter().map(move |&l| (m, l))).collect();
    let width = spec.experiment.columns().len();
    let work = || -> Vec<SweepRow> {
        points
            .par_iter()
            .map(|&(mu, lambda)| match evaluate(spec, mu, lambda) {
                Ok(values) => SweepRow { mu, lambda, values, error: None },
                Err(e) => SweepRow { mu, lambda, values: vec![f64::NAN; width], error: Some(e.to_string()) },
            })
            .collect()
    };
    let rows = match spec.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    };
    let report = assemble_report(spec.experiment, rows);
    if let Some(dir) = &spec.out_dir {
        report.write(dir)?;
    }
    Ok(report)
}

/// Fits and certificates for a finished table.
pub fn assemble_report(experiment: Experiment, mut rows: Vec<SweepRow>) -> SweepReport {
    rows.sort_by(|a, b| a.mu.total_cmp(&b.mu).then(a.lambda.total_cmp(&b.lambda)));
    let columns: Vec<String> = experiment.columns().iter().map(|s| s.to_string()).collect();
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let mut fits = Vec::new();
    let mut joint_fits = Vec::new();
    let mut log_corrected_fits = Vec::new();
    let mut skipped = Vec::new();
    let mus = distinct(rows.iter().map(|r| r.mu));
    let lambdas = distinct(rows.iter().map(|r| r.lambda));
    for &name in experiment.fitted() {
        let k = columns.iter().position(|c| c == name).expect("fitted column exists");
        let mut line = |against: &str, fixed: f64, pick: &dyn Fn(&SweepRow) -> Option<f64>| {
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                ok.iter().filter_map(|r| pick(r).map(|x| (x, r.values[k].abs()))).unzip();
            match fit_loglog(&xs, &ys) {
                Ok(fit) => fits.push(NamedFit { column: name.into(), against: against.into(), fixed, fit }),
                Err(e) => skipped.push(format!("{name} vs {against} at {fixed}: {e}")),
            }
        };
        for &l in &lambdas {
            line("mu", l, &|r| (r.lambda == l).then_some(r.mu));
        }
        if lambdas.len() > 1 {
            for &m in &mus {
                line("lambda", m, &|r| (r.mu == m).then_some(r.lambda));
            }
        }
        if mus.len() > 1 && lambdas.len() > 1 {
            let m: Vec<f64> = ok.iter().map(|r| r.mu).collect();
            let l: Vec<f64> = ok.iter().map(|r| r.lambda).collect();
            let y: Vec<f64> = ok.iter().map(|r| r.values[k].abs()).collect();
            match fit_two_factor(&m, &l, &y) {
                Ok(f) => joint_fits.push((name.to_string(), f)),
                Err(e) => skipped.push(format!("{name} joint fit: {e}")),
            }
        }
    }
    if experiment == Experiment::Speed {
        let k = columns.iter().position(|c| c == "error1").expect("speed table has error1");
        for &l in &lambdas {
            let (xs, ys): (Vec<f64>, Vec<f64>) = ok
                .iter()
                .filter(|r| r.lambda == l)
                .map(|r| (r.mu * r.mu.ln().abs().powi(3), r.values[k].abs()))
                .unzip();
            if let Ok(fit) = fit_loglog(&xs, &ys) {
                log_corrected_fits.push(NamedFit { column: "error1".into(), against: "mu_log3".into(), fixed: l, fit });
            }
        }
    }
    let certified = (experiment == Experiment::Speed).then(|| {
        let k = columns.iter().position(|c| c == "certified").expect("speed table has certified");
        !ok.is_empty() && ok.len() == rows.len() && ok.iter().all(|r| r.values[k] == 1.0)
    });
    SweepReport { experiment, columns, rows, fits, joint_fits, log_corrected_fits, skipped, certified }
}

/// Largest `(E, F, B)` and smallest `e_num` compatible with a target model
/// error `ℰ` when the interface energy is `λ^{1/2}c₁ = E c₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffortReport {
    /// `E = λ^{1/2} ≤ ℰ/(c‖κ‖)`
    pub e_max: f64,
    /// `F = μ^{1/2}`: `2ℰ/‖s₁₀‖`, or `ℰ^{1/2}` when `s₁₀ = 0`.
    pub f_max: f64,
    /// `B = EF`
    pub b_max: f64,
    /// `e_num = B^{-p}`
    pub e_num_min: f64,
    /// `s₁₀ = 0`: `B = O(ℰ^{3/2})`.
    pub degenerate: bool,
}

/// Numerical-effort bounds. With `s10_norm = 0` the first-order speed
/// correction vanishes, the model error is then governed by the `O(μ)`
/// remainder (taken with unit constant) and `F ≤ ℰ^{1/2}`.
pub fn effort_report(target_error: f64, curvature_norm: f64, s10_norm: f64, c: f64, p: f64) -> Result<EffortReport> {
    for (name, v) in [("target error", target_error), ("curvature norm", curvature_norm), ("mobility", c), ("p", p)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(s10_norm >= 0.0) || !s10_norm.is_finite() {
        return Err(Error::InvalidParameter(format!("s10 norm must be non-negative, got {s10_norm}")));
    }
    let e_max = target_error / (c * curvature_norm);
    let degenerate = s10_norm == 0.0;
    let f_max = if degenerate { target_error.sqrt() } else { 2.0 * target_error / s10_norm };
    let b_max = e_max * f_max;
    Ok(EffortReport { e_max, f_max, b_max, e_num_min: b_max.powf(-p), degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effort_example() {
        let r = effort_report(0.1, 1.0, 1.0, 1.0, 2.0).unwrap();
        assert!((r.b_max - 0.02).abs() < 1e-15);
        assert!((r.e_num_min - 2500.0).abs() < 1e-9);
        assert!(!r.degenerate);
        assert!(effort_report(0.0, 1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let xs = [1e-3, 2e-3, 4e-3, 8e-3];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let f = fit_loglog(&xs, &ys).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.residual < 1e-12);
        assert!(matches!(fit_loglog(&xs[..3], &ys[..3]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn two_factor_fit_recovers_exponents() {
        let mut m = Vec::new();
        let mut l = Vec::new();
        let mut y = Vec::new();
        for mu in [1e-3, 2e-3, 4e-3] {
            for la in [0.02, 0.04, 0.08] {
                m.push(mu);
                l.push(la);
                y.push(3.1 * (mu * la as f64).sqrt());
            }
        }
        let f = fit_two_factor(&m, &l, &y).unwrap();
        assert!((f.exponent_mu - 0.5).abs() < 1e-12 && (f.exponent_lambda - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_sorts_and_fits() {
        let rows: Vec<SweepRow> = [4e-3, 1e-3, 2e-3, 5e-4]
            .iter()
            .map(|&mu: &f64| SweepRow { mu, lambda: 0.04, values: vec![mu.sqrt(), 2.0 * mu.sqrt()], error: None })
            .collect();
        let r = assemble_report(Experiment::Width, rows);
        let f = r.fit("width", "mu", 0.04).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!(r.to_csv().unwrap().starts_with("mu,lambda,width,width_over_b,error\n"));
    }
}
