//! TOML run configuration. Every section and key is optional; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Experiment, SweepPhysics, SweepSpec};
use crate::poly::Poly;
use crate::potential::DoubleWellPotential;
use crate::profiles::ProfileGrid;
use crate::simulator::{Geometry, SimConfig};
use crate::transmission::Bar1D;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub potential: PotentialSection,
    pub model: ModelSection,
    pub bar: BarSection,
    pub profiles: ProfilesSection,
    pub sim: SimSection,
    pub sweep: SweepSection,
    pub effort: EffortSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKindSpec {
    Quartic,
    Tilted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: PotentialKindSpec,
    pub amplitude: f64,
    pub tilt: f64,
    pub bump: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { kind: PotentialKindSpec::Quartic, amplitude: 1.0, tilt: 0.0, bump: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub mu: f64,
    pub lambda: f64,
    pub mobility: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { mu: 1e-3, lambda: 0.04, mobility: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarSection {
    pub length: f64,
    pub interface: f64,
    pub modulus: f64,
    pub eps_bar: f64,
    /// Coefficients of the body force polynomial, constant term first.
    pub body_force: Vec<f64>,
    pub u0: f64,
    pub ul: f64,
}

impl Default for BarSection {
    fn default() -> Self {
        Self {
            length: 1.0,
            interface: 0.5,
            modulus: 16.0,
            eps_bar: 0.5,
            body_force: vec![0.1],
            u0: 0.0,
            ul: 0.25375,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilesSection {
    /// Truncation `Z`; defaults to `max(12/a, 30)`.
    pub half_length: Option<f64>,
    /// Odd number of grid points; defaults to 4001.
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub geometry: Geometry,
    /// Cells per interface width; ignored when `cells` is set.
    pub points_per_width: f64,
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub output_every: usize,
    /// Outer radius in radial mode.
    pub domain: f64,
    pub r0: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            geometry: Geometry::Planar1d,
            points_per_width: 8.0,
            cells: None,
            dt: None,
            t_end: 0.05,
            output_every: 100,
            domain: 1.0,
            r0: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub experiment: Experiment,
    pub mus: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { experiment: Experiment::Residuals, mus: vec![4e-3, 2e-3, 1e-3, 5e-4], lambdas: vec![0.04] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffortSection {
    pub target_error: f64,
    pub curvature_norm: f64,
    pub s10_norm: f64,
    pub p: f64,
}

impl Default for EffortSection {
    fn default() -> Self {
        Self { target_error: 0.1, curvature_norm: 1.0, s10_norm: 1.0, p: 2.0 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn potential(&self) -> Result<DoubleWellPotential> {
        let p = &self.potential;
        match p.kind {
            PotentialKindSpec::Quartic => DoubleWellPotential::quartic(p.amplitude),
            PotentialKindSpec::Tilted => DoubleWellPotential::tilted(p.amplitude, p.tilt, p.bump),
        }
    }

    pub fn bar(&self) -> Result<Bar1D> {
        let b = &self.bar;
        let bar = Bar1D {
            length: b.length,
            interface: b.interface,
            modulus: b.modulus,
            eps_bar: b.eps_bar,
            body_force: Poly::new(b.body_force.clone()),
            u0: b.u0,
            ul: b.ul,
        };
        bar.validate()?;
        Ok(bar)
    }

    pub fn grid(&self, psi: &DoubleWellPotential) -> Result<ProfileGrid> {
        let n = self.profiles.points.unwrap_or(4001);
        match self.profiles.half_length {
            Some(z) => ProfileGrid::new(z, n),
            None => ProfileGrid::with_size(psi, n),
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.sim;
        let m = &self.model;
        let planar = s.geometry == Geometry::Planar1d;
        let bar = if planar { Some(self.bar()?) } else { None };
        let domain = if planar { self.bar.length } else { s.domain };
        let b = (m.mu * m.lambda).sqrt();
        let cells = s.cells.unwrap_or((s.points_per_width * domain / b).ceil() as usize);
        let c = SimConfig {
            geometry: s.geometry,
            domain,
            cells,
            mu: m.mu,
            lambda: m.lambda,
            mobility: m.mobility,
            psi: self.potential()?,
            bar,
            r0: (!planar).then_some(s.r0),
            dt: s.dt,
            t_end: s.t_end,
            output_every: s.output_every,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn sweep_spec(&self, out_dir: Option<PathBuf>, jobs: Option<usize>) -> Result<SweepSpec> {
        let radial_geometry = match self.sim.geometry {
            Geometry::Planar1d => Geometry::Radial2d,
            g => g,
        };
        let spec = SweepSpec {
            mus: self.sweep.mus.clone(),
            lambdas: self.sweep.lambdas.clone(),
            experiment: self.sweep.experiment,
            physics: SweepPhysics {
                psi: self.potential()?,
                bar: self.bar()?,
                mobility: self.model.mobility,
                points_per_width: self.sim.points_per_width,
                t_end: self.sim.t_end,
                radial_geometry,
                radial_domain: self.sim.domain,
                r0: self.sim.r0,
            },
            out_dir,
            jobs,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::from_toml("").unwrap();
        assert_eq!(c, Config::default());
        assert!(c.sim_config().is_ok());
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(matches!(Config::from_toml("[model]\nmuu = 1e-3\n"), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml("[nonsense]\n"), Err(Error::Config(_))));
    }

    #[test]
    fn parses_sections() {
        let c = Config::from_toml(
            "[potential]\nkind = \"tilted\"\ntilt = 0.5\nbump = 0.3\n\
             [sim]\ngeometry = \"radial2d\"\nr0 = 0.3\n\
             [sweep]\nexperiment = \"width\"\nmus = [1e-3]\n",
        )
        .unwrap();
        assert!(!c.potential().unwrap().symmetric());
        assert_eq!(c.sim_config().unwrap().r0, Some(0.3));
        assert_eq!(c.sweep.experiment, Experiment::Width);
    }
}
