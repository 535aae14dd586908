use kgcavity::bessel_im::AsymptoticPolicy;
use kgcavity::cavity_states::{phi_static, psi_moving, schrodinger_moving, wall_position, Branch, ModeData, MovingState, PhysicalConfig};
use kgcavity::observables::{
    continuity_residual, kg_current, kg_density, kg_inner_product, schrodinger_current, schrodinger_density, weak_momentum, CurrentProfile,
    ProfileLabel, QuadratureSpec, Scheme,
};
use kgcavity::Exec;
use num_complex::Complex64;
use proptest::prelude::*;

fn static_samples(cfg: &PhysicalConfig, mode: &ModeData, t: f64, quad: &QuadratureSpec) -> Vec<kgcavity::cavity_states::ComplexSample> {
    quad.grid().iter().map(|&x| phi_static(cfg, mode, t, x).unwrap()).collect()
}

#[test]
fn static_basis_is_orthonormal() {
    let cfg = PhysicalConfig::default();
    let quad = QuadratureSpec::new(2001, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    let modes: Vec<_> = [1, 2, 5, 17, 40]
        .into_iter()
        .flat_map(|n| [ModeData::particle(&cfg, n), ModeData::antiparticle(&cfg, n)])
        .collect();
    let samples: Vec<_> = modes.iter().map(|m| static_samples(&cfg, m, 3e-15, &quad)).collect();
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate() {
            let ip = kg_inner_product(&samples[i], &samples[j], &quad, &cfg).unwrap();
            let expected = if i == j { a.branch.norm_sign() } else { 0.0 };
            assert!((ip - expected).norm() < 1e-8, "({:?} {}, {:?} {}) = {ip}", a.branch, a.n, b.branch, b.n);
        }
    }
}

#[test]
fn scalar_product_is_sesquilinear_and_hermitian() {
    let cfg = PhysicalConfig::default();
    let quad = QuadratureSpec::new(1001, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    let st = MovingState::with_norm(&cfg, ModeData::particle(&cfg, 1), AsymptoticPolicy::converged(), 1e-11);
    let psi: Vec<_> = quad.grid().iter().map(|&x| st.sample(0.0, x).unwrap()).collect();
    let phi = static_samples(&cfg, &ModeData::particle(&cfg, 3), 0.0, &quad);
    let a = Complex64::new(0.3, -1.7);
    let scaled: Vec<_> = phi.iter().map(|s| s.scale(a)).collect();
    let base = kg_inner_product(&phi, &psi, &quad, &cfg).unwrap();
    let lhs = kg_inner_product(&scaled, &psi, &quad, &cfg).unwrap();
    assert!((lhs - a.conj() * base).norm() <= 1e-12 * lhs.norm().max(1e-300));
    let back = kg_inner_product(&psi, &phi, &quad, &cfg).unwrap();
    assert!((back - base.conj()).norm() <= 1e-12 * base.norm().max(1e-300));
}

#[test]
fn quadrature_orders() {
    let f = |x: f64| Complex64::new(x.exp(), (3.0 * x).sin());
    let exact = Complex64::new(1f64.exp() - 1.0, (1.0 - 3f64.cos()) / 3.0);
    for (scheme, expect) in [(Scheme::CompositeSimpson, 16.0), (Scheme::Trapezoid, 4.0)] {
        let err = |n: usize| {
            let q = QuadratureSpec::new(n + 1, scheme, 0.0, 1.0).unwrap();
            (q.integrate(Exec::Sequential, |i| f(q.point(i))) - exact).norm()
        };
        let ratio = err(32) / err(64);
        assert!((ratio / expect - 1.0).abs() < 0.05, "{scheme:?}: {ratio}");
        assert_eq!(2u32.pow(scheme.order()) as f64, expect);
    }
}

#[test]
fn continuity_residual_is_second_order() {
    let cfg = PhysicalConfig::default();
    let st = MovingState::with_norm(&cfg, ModeData::particle(&cfg, 1), AsymptoticPolicy::converged(), 1.0);
    let eval = |t: f64, x: f64| psi_moving(&st, t, x);
    let x0 = 0.4 * cfg.l0;
    let res = |h: f64, dt: f64| {
        let grid: Vec<f64> = (0..7).map(|i| x0 + i as f64 * h).collect();
        continuity_residual(eval, &cfg, 1e-13, &grid, dt).unwrap()
    };
    let coarse = res(4e-8, 2e-14);
    let fine = res(2e-8, 1e-14);
    assert!(fine < 1e-2, "{fine:e}");
    assert!((3.5..4.5).contains(&(coarse / fine)), "ratio {}", coarse / fine);
}

#[test]
fn static_closed_forms() {
    let cfg = PhysicalConfig::default();
    for branch in [Branch::Particle, Branch::Antiparticle] {
        let m = ModeData::new(&cfg, 3, branch).unwrap();
        for x in [0.1e-6, 0.25e-6, 0.9e-6] {
            let s = phi_static(&cfg, &m, 7e-16, x).unwrap();
            let sin = (3.0 * std::f64::consts::PI * x / cfg.l0).sin();
            let rho = branch.norm_sign() * 2.0 * sin * sin / cfg.l0;
            assert!((kg_density(&s, &cfg) - rho).abs() < 1e-12 * rho.abs());
            assert!(kg_current(&s, &cfg).abs() < 1e-12 * rho.abs() * cfg.c);
        }
    }
}

#[test]
fn nonrelativistic_current_at_mid_cavity() {
    let cfg = PhysicalConfig::default().with_beta(1e-3);
    let st = MovingState::new(&cfg, ModeData::particle(&cfg, 1), AsymptoticPolicy::converged(), 20_000).unwrap();
    for t in [0.0, 1e-15, 1e-13] {
        let l = wall_position(&cfg, t);
        let x = 0.5 * l;
        let closed = 2.0 * x * cfg.beta * cfg.c / (l * l);
        let kg = kg_current(&st.sample(t, x).unwrap(), &cfg);
        assert!((kg / closed - 1.0).abs() < 1e-3, "t={t:e}: {kg:e} vs {closed:e}");
        let sch = schrodinger_current(&schrodinger_moving(&cfg, 1, t, x).unwrap(), &cfg);
        assert!((sch / closed - 1.0).abs() < 1e-12);
    }
}

#[test]
fn weak_momentum_real_part() {
    let cfg = PhysicalConfig::default().with_beta(1e-3);
    let st = MovingState::new(&cfg, ModeData::particle(&cfg, 1), AsymptoticPolicy::converged(), 20_000).unwrap();
    let t = 1e-15;
    let l = wall_position(&cfg, t);
    for frac in [0.3, 0.5, 0.7] {
        let x = frac * l;
        let psi = schrodinger_moving(&cfg, 1, t, x).unwrap();
        let rho = schrodinger_density(&psi);
        let drho = 2.0 * (psi.value.conj() * psi.dx).re;
        let expected = cfg.mass * cfg.wall_speed() * x / l;
        let exact = weak_momentum(rho, schrodinger_current(&psi, &cfg), drho, &cfg).unwrap();
        assert!((exact.re / expected - 1.0).abs() < 1e-12);
        let kg = weak_momentum(rho, kg_current(&st.sample(t, x).unwrap(), &cfg), drho, &cfg).unwrap();
        assert!((kg.re / expected - 1.0).abs() < 1e-3, "x/L={frac}: {} vs {expected:e}", kg.re);
        assert_eq!(kg.im, exact.im);
    }
    let fast = PhysicalConfig::default().with_beta(0.3);
    assert!(weak_momentum(1.0, 1.0, 0.0, &fast).is_err());
    assert!(weak_momentum(0.0, 1.0, 0.0, &cfg).is_err());
}

#[test]
fn current_profiles() {
    let g = vec![0.0, 1.0, 2.0];
    let a = CurrentProfile::new(g.clone(), vec![1.0, 2.0, -3.0], 0.0, ProfileLabel::Static).unwrap();
    let b = CurrentProfile::new(g.clone(), vec![1.0, 1.0, 1.0], 0.0, ProfileLabel::Expanding).unwrap();
    let d = a.difference(&b).unwrap();
    assert_eq!(d.j, vec![0.0, 1.0, -4.0]);
    assert_eq!(d.label, ProfileLabel::Difference);
    assert_eq!(d.sup_norm(), 4.0);
    let other = CurrentProfile::new(vec![0.0, 1.0, 3.0], vec![0.0; 3], 0.0, ProfileLabel::Static).unwrap();
    assert!(a.difference(&other).is_err());
    assert!(CurrentProfile::new(vec![0.0, 0.0], vec![0.0; 2], 0.0, ProfileLabel::Static).is_err());
    assert!(CurrentProfile::new(g, vec![0.0, f64::NAN, 0.0], 0.0, ProfileLabel::Static).is_err());
}

#[test]
fn grid_mismatch_is_reported() {
    let cfg = PhysicalConfig::default();
    let q = QuadratureSpec::new(11, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    let q2 = QuadratureSpec::new(13, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
    let m = ModeData::particle(&cfg, 1);
    let a = static_samples(&cfg, &m, 0.0, &q);
    let b = static_samples(&cfg, &m, 0.0, &q2);
    assert!(kg_inner_product(&a, &b, &q, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermiticity_on_static_pairs(n in 1u32..60, m in 1u32..60, t in 0.0f64..1e-12) {
        let cfg = PhysicalConfig::default();
        let q = QuadratureSpec::new(601, Scheme::CompositeSimpson, 0.0, cfg.l0).unwrap();
        let a = static_samples(&cfg, &ModeData::particle(&cfg, n), t, &q);
        let b = static_samples(&cfg, &ModeData::antiparticle(&cfg, m), t, &q);
        let ab = kg_inner_product(&a, &b, &q, &cfg).unwrap();
        let ba = kg_inner_product(&b, &a, &q, &cfg).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn quadrature_is_exact_for_cubics(a in -5.0f64..5.0, b in -5.0f64..5.0, half in 1usize..40) {
        let q = QuadratureSpec::new(2 * half + 1, Scheme::CompositeSimpson, 0.0, 2.0).unwrap();
        let got = q.integrate(Exec::Sequential, |i| { let x = q.point(i); Complex64::new(a * x * x * x + b, 0.0) });
        let exact = 4.0 * a + 2.0 * b;
        prop_assert!((got.re - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }
}
