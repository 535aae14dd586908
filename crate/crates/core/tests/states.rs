use kgcavity::bessel_im::AsymptoticPolicy;
use kgcavity::cavity_states::{
    mode_velocity, nonrel_phase_check, phi_static, psi_moving, schrodinger_moving, wall_position, Branch, ModeData, MovingState, PhysicalConfig,
};
use kgcavity::observables::{kg_inner_product, QuadratureSpec, Scheme};
use kgcavity::Exec;
use num_complex::Complex64;
use proptest::prelude::*;

fn moving(cfg: &PhysicalConfig, mode: ModeData) -> MovingState {
    MovingState::with_norm(cfg, mode, AsymptoticPolicy::converged().with_threshold(1.0), 1.0)
}

// |(∂²_t/c² − ∂²_x + m²c²/ħ²)Ψ| / (m²c²/ħ² |Ψ|) with second differences of step (c·ht, hx)
fn kg_residual(state: &MovingState, t: f64, x: f64, ht: f64, hx: f64) -> f64 {
    let cfg = state.config();
    let v = |t: f64, x: f64| psi_moving(state, t, x).unwrap().value;
    let c0 = v(t, x);
    let dtt = (v(t + ht, x) - 2.0 * c0 + v(t - ht, x)) / (ht * ht);
    let dxx = (v(t, x + hx) - 2.0 * c0 + v(t, x - hx)) / (hx * hx);
    let mu2 = (cfg.mass * cfg.c / cfg.hbar).powi(2);
    (dtt / (cfg.c * cfg.c) - dxx + c0 * mu2).norm() / (mu2 * c0.norm())
}

#[test]
fn kg_residual_converges_at_second_order() {
    let cfg = PhysicalConfig::default();
    for n in [1, 7] {
        let st = moving(&cfg, ModeData::particle(&cfg, n));
        let (t, x) = (1e-15, 0.37 * cfg.l0);
        let coarse = kg_residual(&st, t, x, 4e-23, 4e-13);
        let fine = kg_residual(&st, t, x, 2e-23, 2e-13);
        let ratio = coarse / fine;
        assert!(fine < 1e-4, "n={n}: residual {fine:e}");
        assert!((3.5..4.5).contains(&ratio), "n={n}: refinement ratio {ratio}");
    }
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let cfg = PhysicalConfig::default();
    let st = moving(&cfg, ModeData::particle(&cfg, 2));
    let (t, x) = (5e-16, 0.61 * cfg.l0);
    let s = psi_moving(&st, t, x).unwrap();
    let err = |h: f64, dt: bool| {
        let (a, b) = if dt { (psi_moving(&st, t + h, x), psi_moving(&st, t - h, x)) } else { (psi_moving(&st, t, x + h), psi_moving(&st, t, x - h)) };
        let fd = (a.unwrap().value - b.unwrap().value) / (2.0 * h);
        let exact = if dt { s.dt } else { s.dx };
        (fd - exact).norm() / exact.norm()
    };
    for dt in [true, false] {
        let h = if dt { 1e-22 } else { 4e-12 };
        let (e1, e2) = (err(h, dt), err(h / 2.0, dt));
        assert!(e2 < 1e-3, "dt={dt}: {e2:e}");
        assert!((3.5..4.5).contains(&(e1 / e2)), "dt={dt}: ratio {}", e1 / e2);
    }
}

#[test]
fn dirichlet_walls() {
    let cfg = PhysicalConfig::default();
    for n in [1, 3, 50] {
        for mode in [ModeData::particle(&cfg, n), ModeData::antiparticle(&cfg, n)] {
            let st = moving(&cfg, mode);
            for t in [0.0, 1e-15, 3e-13] {
                let l = wall_position(&cfg, t);
                assert_eq!(psi_moving(&st, t, 0.0).unwrap().value, Complex64::new(0.0, 0.0));
                assert_eq!(psi_moving(&st, t, l).unwrap().value, Complex64::new(0.0, 0.0));
            }
            assert_eq!(phi_static(&cfg, &mode, 1e-15, 0.0).unwrap().value.norm(), 0.0);
            assert_eq!(phi_static(&cfg, &mode, 1e-15, cfg.l0).unwrap().value.norm(), 0.0);
        }
    }
}

#[test]
fn normalisation_sign_follows_branch() {
    let cfg = PhysicalConfig::default().with_beta(1e-3);
    let intervals = 20_000;
    let quad = QuadratureSpec::new(2 * intervals + 1, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    for branch in [Branch::Particle, Branch::Antiparticle] {
        let mode = ModeData::new(&cfg, 1, branch).unwrap();
        let st = MovingState::new(&cfg, mode, AsymptoticPolicy::converged(), intervals).unwrap();
        let s: Vec<_> = quad.grid().iter().map(|&x| st.sample(0.0, x).unwrap()).collect();
        let norm = kg_inner_product(&s, &s, &quad, &cfg).unwrap();
        assert!((norm.re - branch.norm_sign()).abs() < 1e-9, "{branch:?}: {norm}");
        assert!(norm.im.abs() < 1e-12);
    }
}

#[test]
fn static_states_are_normalised() {
    let cfg = PhysicalConfig::default();
    let quad = QuadratureSpec::new(4001, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    for branch in [Branch::Particle, Branch::Antiparticle] {
        let mode = ModeData::new(&cfg, 4, branch).unwrap();
        let s: Vec<_> = quad.grid().iter().map(|&x| phi_static(&cfg, &mode, 2e-15, x).unwrap()).collect();
        let norm = kg_inner_product(&s, &s, &quad, &cfg).unwrap();
        assert!((norm.re - branch.norm_sign()).abs() < 1e-12, "{norm}");
    }
}

#[test]
fn schrodinger_overlap_at_small_beta() {
    let cfg = PhysicalConfig::default().with_beta(1e-3);
    let mode = ModeData::particle(&cfg, 1);
    let st = MovingState::new(&cfg, mode, AsymptoticPolicy::converged(), 20_000).unwrap();
    let t = 1e-15;
    let l = wall_position(&cfg, t);
    let quad = QuadratureSpec::new(20_001, Scheme::CompositeSimpson, 0.0, l).unwrap();
    let grid = quad.grid();
    let a: Vec<_> = grid.iter().map(|&x| st.sample(t, x).unwrap().value).collect();
    let b: Vec<_> = grid.iter().map(|&x| schrodinger_moving(&cfg, 1, t, x).unwrap().value).collect();
    let ab = quad.integrate(Exec::Sequential, |i| a[i].conj() * b[i]);
    let aa = quad.integrate(Exec::Sequential, |i| a[i].conj() * a[i]).re;
    let bb = quad.integrate(Exec::Sequential, |i| b[i].conj() * b[i]).re;
    let overlap = ab.norm() / (aa * bb).sqrt();
    assert!(overlap > 1.0 - 1e-4, "overlap {overlap}");
}

#[test]
fn bessel_phase_tracks_schrodinger_phase() {
    let cfg = PhysicalConfig::default();
    let mode = ModeData::particle(&cfg, 1);
    let p = AsymptoticPolicy::converged();
    assert!(nonrel_phase_check(&cfg, &mode, 0.0, 0.0, &p).unwrap() < 1e-9);
    let d = nonrel_phase_check(&cfg, &mode, 1e-15, 0.5 * cfg.l0, &p).unwrap();
    assert!(d < 0.05, "phase difference {d}");
}

#[test]
fn energies_and_velocities() {
    let cfg = PhysicalConfig::default();
    let mut last = 0.0;
    for n in [1, 2, 10, 100, 10_000, 1_000_000] {
        let m = ModeData::particle(&cfg, n);
        assert!(m.e >= cfg.rest_energy());
        let v = mode_velocity(&cfg, &m);
        assert!(v > last && v < cfg.c);
        last = v;
    }
    assert!(ModeData::new(&cfg, 0, Branch::Particle).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let c = PhysicalConfig::default();
    assert!(PhysicalConfig::new(c.mass, c.l0, 0.0, c.c, c.hbar).is_err());
    assert!(PhysicalConfig::new(c.mass, c.l0, 1.0, c.c, c.hbar).is_err());
    assert!(PhysicalConfig::new(-1.0, c.l0, 0.5, c.c, c.hbar).is_err());
    assert!(PhysicalConfig::new(c.mass, f64::NAN, 0.5, c.c, c.hbar).is_err());
    assert!(PhysicalConfig::new(c.mass, c.l0, 0.5, c.c, c.hbar).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wavenumber_closed_form(beta in 1e-4f64..0.9, n in 1u32..100_000) {
        let cfg = PhysicalConfig::default().with_beta(beta);
        let k = 2.0 * n as f64 * std::f64::consts::PI / ((1.0 + beta) / (1.0 - beta)).ln();
        prop_assert!((cfg.k_n(n) - k).abs() <= 1e-12 * k);
    }

    #[test]
    fn moving_states_vanish_at_walls(n in 1u32..60, t in 0.0f64..1e-12) {
        let cfg = PhysicalConfig::default();
        let st = moving(&cfg, ModeData::particle(&cfg, n));
        prop_assert_eq!(psi_moving(&st, t, wall_position(&cfg, t)).unwrap().value.norm(), 0.0);
    }
}
