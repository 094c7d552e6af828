//! Invariants as randomized properties.

use nalgebra::{Matrix6, Vector3};
use proptest::prelude::*;

use phasekin::asymptotic::{composite_for_bar, Region};
use phasekin::profiles::{logistic_profile, s0_moments};
use phasekin::simulator::{free_energy, run};
use phasekin::tensor::{eshelby_normal_jump, jump_data, project_normal, Vec3};
use phasekin::transmission::{bar_interface_data, solve_hat};
use phasekin::*;

fn unit(v: [f64; 3]) -> Option<Vec3> {
    let v = Vector3::from(v);
    (v.norm() > 1e-3).then(|| v / v.norm())
}

fn sym(v: [f64; 6]) -> SymTensor3 {
    SymTensor3::new(v[0], v[1], v[2], v[3], v[4], v[5])
}

fn anisotropic(entries: [f64; 21]) -> ElasticityTensor {
    let mut m = Matrix6::zeros();
    let mut k = 0;
    for i in 0..6 {
        for j in 0..=i {
            m[(i, j)] = entries[k];
            k += 1;
        }
    }
    ElasticityTensor::from_mandel(m * m.transpose() + Matrix6::identity()).unwrap()
}

fn elasticity() -> impl Strategy<Value = ElasticityTensor> {
    prop_oneof![
        (0.0..5.0f64, 0.2..5.0f64).prop_map(|(l, m)| ElasticityTensor::isotropic(l, m).unwrap()),
        prop::array::uniform21(-1.0..1.0f64).prop_map(anisotropic),
    ]
}

fn normal() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0..1.0f64).prop_filter_map("zero normal", unit)
}

fn scalar_fd(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (f(s + h) - f(s - h)) / (2.0 * h)
}

/// Decay rate `α` of a signed tail `y ≈ p(x) e^{-αx}` with `p` of the given
/// degree. The forcing decays at the homogeneous rate, so the boundary-layer
/// tails carry polynomial prefactors that may change sign; for each trial `α`
/// the prefactor is a least-squares fit and `α` minimizes the relative
/// residual. The scan covers `[a/2, 3a/2]`.
fn tail_rate(x: &[f64], y: &[f64], degree: usize, a: f64) -> f64 {
    let misfit = |alpha: f64| {
        let w: Vec<f64> = x.iter().zip(y).map(|(x, y)| y * (alpha * x).exp()).collect();
        let basis = nalgebra::DMatrix::from_fn(x.len(), degree + 1, |i, k| x[i].powi(k as i32));
        let rhs = nalgebra::DVector::from_column_slice(&w);
        let coef = basis.clone().svd(true, true).solve(&rhs, 1e-14).unwrap();
        (&basis * coef - &rhs).norm_squared() / rhs.norm_squared()
    };
    (0..=1000)
        .map(|k| a * (0.5 + k as f64 / 1000.0))
        .map(|alpha| (alpha, misfit(alpha)))
        .fold((a, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_differences_match_next_derivative(s in -0.5..1.5f64, amplitude in 0.25..4.0f64) {
        let psi = make_quartic(amplitude).unwrap();
        for k in 0..5 {
            let fd = scalar_fd(|x| psi.eval(x, k), s, 1e-5);
            let exact = psi.eval(s, k + 1);
            prop_assert!((fd - exact).abs() <= 1e-6, "order {k}: {fd} vs {exact}");
        }
    }

    #[test]
    fn finite_differences_match_next_derivative_with_bump(
        s in -0.5..1.5f64,
        amplitude in 0.25..4.0f64,
        tilt in -0.5..0.5f64,
        bump in 0.0..0.5f64,
    ) {
        // The bump's high derivatives are O(1e9); the tolerance is relative to
        // the sup of the derivative being approximated.
        let psi = DoubleWellPotential::tilted(amplitude, tilt, bump).unwrap();
        for k in 0..5 {
            let scale = (0..=400).map(|i| psi.eval(i as f64 / 400.0, k + 1).abs()).fold(1.0, f64::max);
            let fd = scalar_fd(|x| psi.eval(x, k), s, 1e-5);
            let exact = psi.eval(s, k + 1);
            prop_assert!((fd - exact).abs() <= 1e-6 * scale, "order {k}: {fd} vs {exact}");
        }
    }

    #[test]
    fn potential_wells_and_positivity(s in 0.001..0.999f64, amplitude in 0.1..10.0f64, tilt in -0.5..0.5f64, bump in 0.0..0.5f64) {
        let psi = DoubleWellPotential::tilted(amplitude, tilt, bump).unwrap();
        prop_assert_eq!(psi.value(0.0), 0.0);
        prop_assert!(psi.value(1.0).abs() <= 1e-14 * amplitude);
        prop_assert!(psi.d1(0.0).abs() <= 1e-14 * amplitude && psi.d1(1.0).abs() <= 1e-13 * amplitude);
        prop_assert!(psi.value(s) > 0.0);
        prop_assert!(psi.psi_pp0() > 0.0 && psi.psi_pp1() > 0.0);
        let q = make_quartic(amplitude).unwrap();
        prop_assert!((q.value(s) - q.value(1.0 - s)).abs() <= 1e-15 * amplitude);
    }

    #[test]
    fn self_adjoint_acoustic_tensor(d in elasticity(), n in normal(), w1 in prop::array::uniform3(-1.0..1.0f64), w2 in prop::array::uniform3(-1.0..1.0f64)) {
        let b = d.acoustic(&n);
        let (w1, w2) = (Vector3::from(w1), Vector3::from(w2));
        let lhs = (b * w1).dot(&w2);
        let rhs = (b * w2).dot(&w1);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn projection_is_d_orthogonal_and_idempotent(
        d in elasticity(),
        n in normal(),
        e in prop::array::uniform6(-1.0..1.0f64),
        w in prop::array::uniform3(-1.0..1.0f64),
    ) {
        let eps = sym(e);
        let p = project_normal(&d, &n, &eps).unwrap();
        let pp = project_normal(&d, &n, &p).unwrap();
        prop_assert!(pp.sub(&p).max_abs() <= 1e-10);
        let test = SymTensor3::sym_outer(&Vector3::from(w), &n);
        prop_assert!(d.inner(&eps.sub(&p), &test).abs() <= 1e-10);
    }

    #[test]
    fn stress_jump_has_no_traction(d in elasticity(), n in normal(), e in prop::array::uniform6(-1.0..1.0f64)) {
        let j = jump_data(&d, &n, &sym(e)).unwrap();
        prop_assert!(j.stress_jump.apply(&n).amax() <= 1e-10);
        let sj = SymTensor3::sym_outer(&j.u_star, &n);
        prop_assert!(sj.sub(&j.strain_jump).max_abs() <= 1e-14);
    }

    #[test]
    fn bar_equilibrium_and_transmission(
        gamma in 0.1..0.9f64,
        modulus in 0.5..20.0f64,
        eps_bar in -0.5..0.5f64,
        b0 in -1.0..1.0f64,
        b1 in -1.0..1.0f64,
        ul in -0.5..0.5f64,
    ) {
        let bar = Bar1D { length: 1.0, interface: gamma, modulus, eps_bar, body_force: Poly::new(vec![b0, b1]), u0: 0.0, ul };
        let hat = solve_hat(&bar).unwrap();
        let worst = (0..10_000)
            .map(|i| {
                let x = i as f64 / 9_999.0;
                let t = &hat.stress[hat.side(x)];
                (-t.eval_deriv(x, 1) - bar.body_force.eval(x)).abs()
            })
            .fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10);
        prop_assert!((hat.disp_trace(0) - hat.disp_trace(1)).abs() <= 1e-14);
        prop_assert!((hat.stress_trace(0) - hat.stress_trace(1)).abs() <= 1e-14);
        prop_assert!((hat.displacement(1.0) - ul).abs() <= 1e-14);
    }

    #[test]
    fn eshelby_consistency_on_embedded_bar(
        eps_bar in -0.5..0.5f64,
        b0 in -1.0..1.0f64,
        ul in -0.5..0.5f64,
    ) {
        let psi = make_quartic(1.0).unwrap();
        let bar = Bar1D { length: 1.0, interface: 0.4, modulus: 3.0, eps_bar, body_force: Poly::constant(b0), u0: 0.0, ul };
        let (hat, _, data) = bar_interface_data(&bar, &psi).unwrap();
        let axial = |v: f64| SymTensor3::new(v, 0.0, 0.0, 0.0, 0.0, 0.0);
        let jump = eshelby_normal_jump(&axial(hat.stress_trace(1)), &axial(hat.stress_trace(0)), &axial(eps_bar), 0.0);
        prop_assert!((jump + data.eps_t_mean).abs() <= 1e-12);
        data.check_consistency(1e-12).unwrap();
    }

    #[test]
    fn synthetic_data_satisfies_mean_stress_identity(
        tm in -0.1..0.1f64,
        tp in -0.1..0.1f64,
        check in -0.1..0.1f64,
        tilt in -0.5..0.5f64,
    ) {
        let psi = DoubleWellPotential::tilted(1.0, tilt, 0.2).unwrap();
        let d = InterfaceData::synthetic(&psi, tm, tp, check, 0.0, 0.0, 0.0, 0.0, 0.1);
        let expect = check - (tp - tm) * 0.5 * (tp / psi.psi_pp1() + tm / psi.psi_pp0());
        prop_assert!((d.sigma_check0 - expect).abs() <= 1e-15);
        prop_assert!((d.eps_check_t_side(true) - d.eps_check_t_side(false) - (tp - tm) * (tp / psi.psi_pp1() - tm / psi.psi_pp0())).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn s0_decay_bound(amplitude in 0.25..4.0f64) {
        let psi = make_quartic(amplitude).unwrap();
        // Z large enough that the e^{-aZ} tails sit below the mass tolerance.
        let a = psi.decay_rate().unwrap();
        let z = (32.0 / a).max(30.0);
        let n = 2 * ((z / 0.015) as usize / 2) + 1;
        let g = ProfileGrid::new(z, n).unwrap();
        let s0 = solve_s0(&psi, &g).unwrap();
        // Only where the deviation from the well is above round-off.
        let k = s0.zeta().iter().zip(&s0.values)
            .map(|(&z, &s)| if z < 0.0 { (s, z) } else { (1.0 - s, z) })
            .filter(|&(d, _)| d > 1e-12)
            .map(|(d, z)| d * (a * z.abs()).exp())
            .fold(0.0, f64::max);
        prop_assert!(k <= 2.0, "K = {k}");
        let m = s0_moments(&s0);
        prop_assert!((m.mass - 1.0).abs() <= 1e-10);
        let n = s0.values.len();
        for i in 0..n {
            prop_assert!((s0.values[i] + s0.values[n - 1 - i] - 1.0).abs() <= 1e-10);
            prop_assert!((s0.values[i] - logistic_profile(amplitude, s0.zeta()[i])).abs() <= 1e-8);
        }
    }

    #[test]
    fn boundary_layer_tails_decay_at_rate_a(
        tm in -0.1..0.1f64,
        tp in -0.1..0.1f64,
        check in -0.05..0.05f64,
        shp in -0.1..0.1f64,
    ) {
        prop_assume!(tm.abs() + tp.abs() > 0.02);
        let psi = make_quartic(1.0).unwrap();
        let grid = ProfileGrid::new(30.0, 4001).unwrap();
        let data = InterfaceData::synthetic(&psi, tm, tp, check, shp, 0.0, 0.0, 0.0, 0.2);
        let set = ProfileSet::solve(&psi, &data, &grid, 0.04, 1.0).unwrap();
        let a = psi.decay_rate().unwrap();
        let z = set.s0.zeta();
        let d1: Vec<f64> = set.s1.values.iter().zip(&set.rho1).map(|(s, r)| s - r).collect();
        let d2: Vec<f64> = set.s2.values.iter().zip(&set.rho2).map(|(s, r)| s - r).collect();
        for left in [true, false] {
            let idx: Vec<usize> = (0..z.len()).filter(|&i| (4.0..=16.0).contains(&z[i].abs()) && (z[i] < 0.0) == left).collect();
            let x: Vec<f64> = idx.iter().map(|&i| z[i].abs()).collect();
            let y1: Vec<f64> = idx.iter().map(|&i| d1[i]).collect();
            let y2: Vec<f64> = idx.iter().map(|&i| d2[i]).collect();
            let r1 = tail_rate(&x, &y1, 1, a);
            prop_assert!((r1 - a).abs() <= 0.1 * a, "S1 rate {r1}, a {a}");
            let r2 = tail_rate(&x, &y2, 2, a);
            prop_assert!((r2 - a).abs() <= 0.1 * a, "S2 rate {r2}, a {a}");
        }
    }

    #[test]
    fn cutoff_is_one_inside_and_zero_outside(mu_exp in 3.0..4.0f64) {
        let mu = 10f64.powf(-mu_exp);
        let psi = make_quartic(1.0).unwrap();
        let bar = Bar1D { length: 1.0, interface: 0.5, modulus: 16.0, eps_bar: 0.5, body_force: Poly::constant(0.1), u0: 0.0, ul: 0.25375 };
        let field = composite_for_bar(&bar, &psi, &ProfileGrid::new(30.0, 2001).unwrap(), mu, 0.04, 1.0).unwrap();
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            let phi = field.sample(x).phi;
            match field.region(x) {
                Region::Inner => prop_assert_eq!(phi, 1.0),
                Region::Outer => prop_assert_eq!(phi, 0.0),
                Region::Match => prop_assert!((0.0..=1.0).contains(&phi)),
            }
        }
        prop_assert!((field.sample(0.5).s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn planar_runs_dissipate_energy(
        eps_bar in -0.5..0.5f64,
        b0 in -0.2..0.2f64,
        ul in 0.1..0.4f64,
    ) {
        let bar = Bar1D { length: 1.0, interface: 0.5, modulus: 16.0, eps_bar, body_force: Poly::constant(b0), u0: 0.0, ul };
        let (mu, lambda) = (4e-3, 0.04);
        let config = SimConfig {
            geometry: Geometry::Planar1d,
            domain: 1.0,
            cells: (8.0 / (mu * lambda as f64).sqrt()).ceil() as usize,
            mu,
            lambda,
            mobility: 1.0,
            psi: make_quartic(1.0).unwrap(),
            bar: Some(bar),
            r0: None,
            dt: None,
            t_end: 0.0,
            output_every: 100,
        };
        let Ok(st) = init_traveling(&config) else { return Ok(()) };
        let config = SimConfig { t_end: 300.0 * config.time_step(), ..config };
        let e0 = free_energy(&st, &config);
        let mut prev = e0;
        let mut worst = f64::MIN;
        run(&config, st, |s| {
            let e = free_energy(s, &config);
            worst = worst.max(e - prev);
            prev = e;
        }).unwrap();
        prop_assert!(worst <= 1e-8 * e0.abs(), "increase {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn c1_scales_with_root_amplitude(i in 0usize..4) {
        let a = [0.25, 1.0, 4.0, 9.0][i];
        let base = c1_constant(&make_quartic(1.0).unwrap()).unwrap();
        let scaled = c1_constant(&make_quartic(a).unwrap()).unwrap();
        prop_assert!((scaled - a.sqrt() * base).abs() <= 1e-9);
    }

    #[test]
    fn symmetric_half_integrals_agree(amplitude in 0.1..10.0f64) {
        use quadrature::double_exponential::integrate;
        let psi = make_quartic(amplitude).unwrap();
        let f = |s: f64| (2.0 * psi.value(s)).sqrt();
        let lo = integrate(f, 0.0, 0.5, 1e-13).integral;
        let hi = integrate(f, 0.5, 1.0, 1e-13).integral;
        prop_assert!((lo - hi).abs() <= 1e-12 * amplitude.sqrt());
        prop_assert!((lo + hi - psi.c1().unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn sweep_csv_is_deterministic(jobs in 1usize..4) {
        let config = Config::from_toml("[sweep]\nmus = [4e-3, 2e-3, 1e-3, 5e-4]\n").unwrap();
        let a = run_sweep(&config.sweep_spec(None, Some(1)).unwrap()).unwrap().to_csv().unwrap();
        let b = run_sweep(&config.sweep_spec(None, Some(jobs)).unwrap()).unwrap().to_csv().unwrap();
        prop_assert_eq!(a, b);
    }
}
