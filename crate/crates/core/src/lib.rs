//! Numerical laboratory for the Allen-Cahn phase-field model coupled to
//! linear elasticity.
//!
//! The interface speed of the diffuse model is expanded as
//! `s = s0 + μ^{1/2}(s10 + λ^{1/2} s11)`. The crate computes the coefficients
//! three ways: closed-form integrals over the stretched-coordinate profiles,
//! Lagrange multipliers of the discrete solvability problem, and direct time
//! integration of the PDE. It also assembles the composite asymptotic field
//! on a 1D bar and measures its residuals.
//!
//! Module map:
//!
//! * [`potential`]: double-well potentials, `a`, `c1`.
//! * [`tensor`]: symmetric-tensor algebra for interface jump data.
//! * [`transmission`]: the two elastic transmission problems on a bar.
//! * [`profiles`]: the ODE problems for `S0`, `S1`, `S2` and the kinetic
//!   coefficients.
//! * [`asymptotic`]: outer/inner expansions, blending, residuals.
//! * [`simulator`]: IMEX time stepping in planar and radial geometry.
//! * [`harness`]: sweeps, log-log fits and the numerical-effort formulas.
//! * [`config`]: the TOML run configuration.

pub mod asymptotic;
pub mod config;
pub mod cutoff;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod poly;
pub mod potential;
pub mod profiles;
pub mod simulator;
pub mod tensor;
pub mod transmission;

pub use asymptotic::{
    build_composite, build_outer, composite_for_bar, residuals, CompositeField, OuterExpansion, Region, ResidualReport,
};
pub use config::Config;
pub use error::{Error, Result};
pub use harness::{
    effort_report, fit_loglog, fit_two_factor, run_sweep, EffortReport, Experiment, FitResult, SweepPhysics, SweepReport,
    SweepSpec, TwoFactorFit,
};
pub use poly::Poly;
pub use potential::{c1_constant, decay_rate, make_quartic, DoubleWellPotential, PotentialKind};
pub use profiles::{
    kinetic_relation, s0_closed_form, s1_closed_form, solve_s0, solve_s1, solve_s2, KineticCoefficients, Profile,
    ProfileGrid, ProfileSet,
};
pub use simulator::{
    free_energy, init_radial, init_traveling, measure_speed_certified, measure_speed_vs_kinetics, step, track_interface,
    Geometry, SimConfig, SimState,
};
pub use tensor::{ElasticityTensor, JumpData3D, SymTensor3};
pub use transmission::{Bar1D, InterfaceData, PiecewiseSolution};
