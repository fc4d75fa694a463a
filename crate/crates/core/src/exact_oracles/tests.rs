use super::*;
use crate::analytic_models::{fano_bms_population, SpinBosonParams};
use crate::bath_correlations::FermionLeads;
use crate::dcg_engine::{dcg_propagate, QuadratureConfig};

fn state(p00: f64, c: C64) -> DensityMatrix {
    DensityMatrix::new(
        ComplexMatrix::from_rows(&[
            vec![C64::new(p00, 0.0), c],
            vec![c.conj(), C64::new(1.0 - p00, 0.0)],
        ])
        .unwrap(),
    )
    .unwrap()
}

fn fig1() -> TwoSpinParams {
    TwoSpinParams::new(0.25, 1.0, 2.0, 0.5).unwrap()
}

#[test]
fn decoupled_spins_rotate_freely() {
    let p = TwoSpinParams::new(0.0, 1.3, 2.0, 0.5).unwrap();
    let rho = state(0.7, C64::new(0.2, -0.1));
    let rb = state(0.5, C64::new(0.0, 0.0));
    let t = 2.1;
    let out = two_spin_exact(&p, SpinCouplingSet::Heisenberg, &rho, &rb, t).unwrap();
    let expected = rho.get(0, 1) * C64::from_polar(1.0, -2.0 * 1.3 * t);
    assert!((out.get(0, 0).re - 0.7).abs() < 1e-12);
    assert!((out.get(0, 1) - expected).norm() < 1e-12);
}

#[test]
fn single_coupling_ignores_bath_frequency() {
    let rho = state(0.8, C64::new(0.1, 0.3));
    let rb = state(0.6, C64::new(0.2, 0.1));
    let at = |big: f64| {
        let p = TwoSpinParams::new(0.5, 1.0, big, 0.6).unwrap();
        two_spin_exact(&p, SpinCouplingSet::SingleSigmaZ, &rho, &rb, 3.7).unwrap()
    };
    let base = at(0.0);
    for big in [1.0, 7.0] {
        assert!(base.matrix().max_deviation(at(big).matrix()) < 1e-10);
    }
}

#[test]
fn heisenberg_recurrences() {
    let p = fig1();
    let rho = state(1.0, C64::new(0.0, 0.0));
    let rb = state(0.5, C64::new(0.0, 0.0));
    // flip-flop between |01> and |10> at detuning 2Δ and coupling 2λ
    let period = PI / (1.0f64 + 4.0 * 0.25 * 0.25).sqrt();
    for k in [1.0, 2.0, 5.0] {
        let out = two_spin_exact(&p, SpinCouplingSet::Heisenberg, &rho, &rb, k * period).unwrap();
        assert!((out.get(0, 0).re - 1.0).abs() < 1e-8);
    }
    let mid = two_spin_exact(&p, SpinCouplingSet::Heisenberg, &rho, &rb, 0.5 * period).unwrap();
    let amplitude = 4.0 * 0.0625 / (1.0 + 4.0 * 0.0625);
    assert!((mid.get(0, 0).re - (1.0 - 0.5 * amplitude)).abs() < 1e-10);
}

#[test]
fn two_spin_outputs_are_states() {
    let p = TwoSpinParams::new(0.7, 0.4, 1.9, 0.3).unwrap();
    let rho = state(0.35, C64::new(0.3, 0.2));
    let rb = state(0.3, C64::new(-0.2, 0.3));
    for set in [SpinCouplingSet::Heisenberg, SpinCouplingSet::SingleSigmaZ] {
        for k in 0..40 {
            let out = two_spin_exact(&p, set, &rho, &rb, 0.5 * k as f64).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(out.min_eigenvalue() > -1e-10);
        }
    }
    assert!(two_spin_exact(&p, SpinCouplingSet::Heisenberg, &rho, &rb, -1.0).is_err());
}

#[test]
fn dephasing_exponent_properties() {
    let bath = BosonicBath::ohmic(1.0).unwrap();
    let lambda = 0.1f64.sqrt();
    assert_eq!(dephasing_gamma(0.0, &bath, lambda).unwrap(), 0.0);
    let mut prev = 0.0;
    for k in 1..=40 {
        let g = dephasing_gamma(0.25 * k as f64, &bath, lambda).unwrap();
        assert!(g >= prev - 1e-12);
        prev = g;
    }
    // short times: Γ ≈ (λ² t²/π) ∫ G coth
    let t = 1e-3;
    let second_moment = integrate_adaptive_scalar(
        |w| if w > 0.0 { bath.g0() * w * (-w).exp() * (1.0 + 2.0 * bath.occupation(w)) } else { 2.0 },
        0.0,
        60.0,
        &[],
        AdaptiveOptions::default(),
    )
    .value[0];
    let short = lambda * lambda * t * t / PI * second_moment;
    assert!((dephasing_gamma(t, &bath, lambda).unwrap() / short - 1.0).abs() < 1e-5);
    let sub = BosonicBath::new(1.0, 0.5, 1.0, 2.0).unwrap();
    assert!(dephasing_gamma(3.0, &sub, lambda).unwrap().is_finite());
}

#[test]
fn dephasing_exponent_matches_engine() {
    let bath = BosonicBath::ohmic(1.0).unwrap();
    let params = SpinBosonParams::new(1.0, bath, 0.1f64.sqrt(), SpinBosonCoupling::Dephasing).unwrap();
    let sys = params.system().unwrap();
    let half = 0.5f64;
    let rho0 = state(half, C64::new(half, 0.0));
    let grid = [0.3, 1.0, 4.0, 10.0];
    let out = dcg_propagate(&sys, &params.bath_model(), 2, &rho0, &grid, &QuadratureConfig::default()).unwrap();
    for (t, r) in grid.iter().zip(&out) {
        let decay = (-dephasing_gamma(*t, &bath, params.lambda).unwrap()).exp();
        assert!((r.get(0, 1) / rho0.get(0, 1) - decay).norm() < 1e-6, "t = {t}");
        assert!((r.get(0, 0).re - half).abs() < 1e-9);
    }
}

#[test]
fn cubic_roots() {
    let r = CubicRoots::solve(C64::new(-6.0, 0.0), C64::new(11.0, 0.0), C64::new(-6.0, 0.0));
    let mut re: Vec<f64> = r.z.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(!r.degenerate);
    let triple = CubicRoots::solve(C64::new(-3.0, 0.0), C64::new(3.0, 0.0), C64::new(-1.0, 0.0));
    assert!(triple.degenerate);
    let c = [C64::new(1.0, 2.0), C64::new(-0.5, 3.0), C64::new(2.0, -1.0)];
    let r = CubicRoots::solve(c[0], c[1], c[2]);
    assert!(r.relative_residual() < 1e-9);
    let zero = CubicRoots::solve(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    assert!(zero.z.iter().all(|z| z.norm() < 1e-300) && zero.degenerate);
}

fn fano(delta_l: f64, delta_r: f64, eps_r: f64) -> FanoParams {
    let leads = FermionLeads::new(1.0, 1.0, delta_l, delta_r, 0.0, eps_r).unwrap();
    FanoParams::new(1.0, leads, 0.1f64.sqrt()).unwrap()
}

#[test]
fn fano_poles_decay() {
    for (dl, dr) in [(2.0, 1.0), (1e3, 1e3), (0.1, 5.0), (0.01, 0.02)] {
        let r = fano_poles(&fano(dl, dr, 0.0));
        assert!(r.relative_residual() < 1e-9);
        assert!(r.z.iter().all(|z| z.re < 0.0), "{:?}", r.z);
    }
}

#[test]
fn fano_occupation_limits() {
    let p = fano(2.0, 1.0, 0.0);
    for n0 in [0.0, 0.4, 1.0] {
        assert!((fano_exact_occupation(0.0, &p, n0).unwrap() - n0).abs() < 1e-7);
    }
    for k in 0..=30 {
        let n = fano_exact_occupation(k as f64, &p, 1.0).unwrap();
        assert!((-1e-6..=1.0 + 1e-6).contains(&n), "{n}");
    }
    let late = fano_exact_occupation(150.0, &p, 1.0).unwrap();
    let later = fano_exact_occupation(200.0, &p, 0.0).unwrap();
    assert!((late - later).abs() < 1e-6);
    assert!(fano_exact_occupation(-1.0, &p, 0.5).is_err());
}

#[test]
fn fano_occupation_is_symmetric_in_roots() {
    let p = fano(2.0, 1.0, 0.0);
    let z = fano_poles(&p).z;
    let a = occupation_from_roots(1.7, &p, 0.6, &z).unwrap();
    let b = occupation_from_roots(1.7, &p, 0.6, &[z[2], z[0], z[1]]).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn fano_flatband_is_markovian() {
    let p = fano(1e3, 1e3, 0.0);
    for k in 0..=10 {
        let t = 2.0 * k as f64;
        let exact = fano_exact_occupation(t, &p, 1.0).unwrap();
        let bms = fano_bms_population(t, &p, 1.0).unwrap();
        assert!((exact - bms).abs() < 1e-3, "t = {t}: {exact} vs {bms}");
    }
}

#[test]
fn eom_steady_states() {
    for beta in [0.1, 1.0, 30.0] {
        let (x, y, z) = spin_boson_eom_steady(SpinBosonCoupling::Dephasing, beta, 1.0, 0.3).unwrap();
        assert_eq!((x, y, z), (0.0, 0.0, 0.3));
    }
    let (_, _, z) = spin_boson_eom_steady(SpinBosonCoupling::Dissipative, 1.0, 1.0, 0.0).unwrap();
    assert!((z - 0.5f64.tanh()).abs() < 1e-15 && (z - 0.462117).abs() < 1e-6);
    let (_, _, z) = spin_boson_eom_steady(SpinBosonCoupling::Dissipative, f64::INFINITY, 1.0, 0.0).unwrap();
    assert_eq!(z, 1.0);
    for beta in [0.2, 1.0, 5.0] {
        let (_, _, z) = spin_boson_eom_steady(SpinBosonCoupling::Dissipative, beta, 1.0, -1.0).unwrap();
        let gibbs = 1.0 / (1.0 + (-beta).exp());
        assert!((z - (2.0 * gibbs - 1.0)).abs() < 1e-14);
    }
    assert!(spin_boson_eom_steady(SpinBosonCoupling::Dissipative, 0.0, 1.0, 0.0).is_err());
}
