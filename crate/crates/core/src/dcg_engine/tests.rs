use super::*;
use crate::bath_correlations::{BosonicBath, FermionLeads, SpinCouplingSet, TwoSpinBath};
use crate::quantum_core::{matrix_exponential, partial_trace_bath, pauli_x, pauli_y, pauli_z, I};

fn heisenberg_sys(omega: f64, lambda: f64) -> SystemSpec {
    SystemSpec::new(
        pauli_z().scale_real(omega),
        vec![
            Coupling::new(pauli_x(), 0),
            Coupling::new(pauli_y(), 1),
            Coupling::new(pauli_z(), 2),
        ],
        lambda,
    )
    .unwrap()
}

fn spin_bath(big_omega: f64, rho: f64, set: SpinCouplingSet) -> BathModel {
    BathModel::TwoSpin(TwoSpinBath::new(big_omega, rho, set).unwrap())
}

fn fano_sys(eps_d: f64) -> SystemSpec {
    let a1 = ComplexMatrix::basis_op(2, 0, 1).scale_real(-1.0);
    let a2 = ComplexMatrix::basis_op(2, 1, 0).scale_real(-1.0);
    SystemSpec::new(
        ComplexMatrix::basis_op(2, 1, 1).scale_real(eps_d),
        vec![Coupling::new(a1, 0), Coupling::new(a2, 1)],
        0.1f64.sqrt(),
    )
    .unwrap()
}

fn fano_bath() -> BathModel {
    BathModel::Fermion(FermionLeads::new(1.0, 1.0, 2.0, 1.0, 0.0, 0.0).unwrap())
}

fn dissipative_sys() -> SystemSpec {
    let h = (&ComplexMatrix::identity(2) - &pauli_z()).scale_real(0.5);
    SystemSpec::new(h, vec![Coupling::new(pauli_x(), 0)], 0.1f64.sqrt()).unwrap()
}

fn fast_off() -> QuadratureConfig {
    QuadratureConfig {
        stationary_fast_path: false,
        ..QuadratureConfig::default()
    }
}

/// Taylor coefficients in λ of the exact interaction-picture reduced state
/// of a system coupled to one bath spin, by a contour integral over
/// complex λ.
fn spin_taylor_terms(
    sys: &SystemSpec,
    hb: &ComplexMatrix,
    bath_ops: &[ComplexMatrix],
    rho_b: &ComplexMatrix,
    rho_s: &ComplexMatrix,
    tau: f64,
) -> Vec<ComplexMatrix> {
    let n_pts = 48;
    let radius = 1.0;
    let ids = ComplexMatrix::identity(2);
    let h0 = &sys.hamiltonian().kron(&ids) + &ComplexMatrix::identity(2).kron(hb);
    let mut v = ComplexMatrix::zeros(4, 4);
    for c in sys.couplings() {
        let mut b = ComplexMatrix::zeros(2, 2);
        for &(k, i) in c.bath.terms() {
            let op = if i.conjugated {
                bath_ops[i.op_index].adjoint()
            } else {
                bath_ops[i.op_index].clone()
            };
            b += &op.scale(k);
        }
        v += &c.system.kron(&b);
    }
    let rho0 = rho_s.kron(rho_b);
    let us = matrix_exponential(&sys.hamiltonian().scale(I * tau)).unwrap();
    let mut out = vec![ComplexMatrix::zeros(2, 2); 5];
    for k in 0..n_pts {
        let lam = C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n_pts as f64);
        let h = &h0 + &v.scale(lam);
        let fwd = matrix_exponential(&h.scale(-I * tau)).unwrap();
        let bwd = matrix_exponential(&h.scale(I * tau)).unwrap();
        let full = fwd.mul_unchecked(&rho0).mul_unchecked(&bwd);
        let red = partial_trace_bath(&full, 2, 2).unwrap();
        let red = us.mul_unchecked(&red).mul_unchecked(&us.adjoint());
        for (n, o) in out.iter_mut().enumerate() {
            *o += &red.scale(lam.powi(-(n as i32)) / n_pts as f64);
        }
    }
    out
}

#[test]
fn interaction_picture_examples() {
    let omega = 0.7;
    for t in [0.0, 0.3, 2.1] {
        let a = interaction_picture_op(&pauli_z().scale_real(omega), &pauli_x(), t).unwrap();
        let expect = &pauli_x().scale_real((2.0 * omega * t).cos())
            - &pauli_y().scale_real((2.0 * omega * t).sin());
        assert!(a.max_deviation(&expect) < 1e-14);

        let eps = 1.3;
        let h = (&ComplexMatrix::identity(2) - &pauli_z()).scale_real(eps / 2.0);
        let a = interaction_picture_op(&h, &pauli_x(), t).unwrap();
        let expect = &pauli_x().scale_real((eps * t).cos()) + &pauli_y().scale_real((eps * t).sin());
        assert!(a.max_deviation(&expect) < 1e-14);

        let a = interaction_picture_op(&pauli_z(), &pauli_z(), t).unwrap();
        assert!(a.max_deviation(&pauli_z()) < 1e-15);
    }
    let bad = ComplexMatrix::basis_op(2, 0, 1);
    assert!(interaction_picture_op(&bad, &pauli_x(), 1.0).is_err());
}

#[test]
fn heaviside_identity_vanishes() {
    assert_eq!(heaviside_identity_check([4.0, 3.0, 2.0, 1.0]), 0.0);
    assert_eq!(heaviside_identity_check([1.0, 2.0, 3.0, 4.0]), 0.0);
    assert_eq!(heaviside_identity_check([1.0, 1.0, 1.0, 1.0]), 0.0);
    // all 24 orderings, with ties
    let vals = [[0.1, 0.5, 0.9, 1.3], [0.2, 0.2, 0.7, 0.9], [0.4, 0.4, 0.4, 0.1]];
    for v in vals {
        for p in 0..24usize {
            let mut idx: Vec<usize> = (0..4).collect();
            let mut k = p;
            let mut t = [0.0; 4];
            for (slot, tt) in t.iter_mut().enumerate() {
                let f = (1..4 - slot).product::<usize>().max(1);
                let j = k / f;
                k %= f;
                *tt = v[idx.remove(j)];
            }
            assert_eq!(heaviside_identity_check(t), 0.0);
        }
    }
}

#[test]
fn rejects_bad_arguments() {
    let sys = dissipative_sys();
    let bath = BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap());
    let q = QuadratureConfig::default();
    assert!(matches!(compute_t(5, 1.0, &sys, &bath, &q), Err(DcgError::UnsupportedOrder(5))));
    assert!(matches!(compute_t(0, 1.0, &sys, &bath, &q), Err(DcgError::UnsupportedOrder(0))));
    assert!(matches!(compute_t(2, 0.0, &sys, &bath, &q), Err(DcgError::Domain(_))));
    assert!(matches!(compute_t(2, -1.0, &sys, &bath, &q), Err(DcgError::Domain(_))));
    let t1 = compute_t(1, 1.0, &sys, &bath, &q).unwrap();
    assert!(matches!(extract_l(2, 1.0, &[t1]), Err(DcgError::Argument(_))));
    let wrong = SystemSpec::new(sys.hamiltonian().clone(), vec![Coupling::new(pauli_x(), 3)], 0.1).unwrap();
    assert!(matches!(compute_t(2, 1.0, &wrong, &bath, &q), Err(DcgError::Index(_))));
    let bad_q = QuadratureConfig { nodes_4d: 3, ..q };
    assert!(compute_t(2, 1.0, &sys, &bath, &bad_q).is_err());
    assert!(SystemSpec::new(pauli_z(), vec![], 0.1).is_err());
    assert!(SystemSpec::new(ComplexMatrix::basis_op(2, 0, 1), vec![Coupling::new(pauli_x(), 0)], 0.1).is_err());
}

#[test]
fn first_order_vanishes_for_gaussian_and_fermionic_baths() {
    let q = QuadratureConfig::default();
    let bath = BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap());
    let t1 = compute_t(1, 2.0, &dissipative_sys(), &bath, &q).unwrap();
    assert_eq!(t1.norm(), 0.0);
    let t3 = compute_t(3, 2.0, &fano_sys(1.0), &fano_bath(), &q).unwrap();
    assert_eq!(t3.norm(), 0.0);
    // vanishing first order: L_2 = T_2 / τ
    let ts = compute_t_list(2, 2.0, &dissipative_sys(), &bath, &q).unwrap();
    let ls = extract_l(2, 2.0, &ts).unwrap();
    assert!(ls[1].sub(&ts[1].scale(0.5)).norm() < 1e-15);
}

#[test]
fn heisenberg_first_order_is_a_commutator() {
    let rho = 0.8;
    let q = QuadratureConfig::default();
    let sys = heisenberg_sys(1.0, 0.25);
    let bath = spin_bath(2.0, rho, SpinCouplingSet::Heisenberg);
    let tau = 1.7;
    let t1 = compute_t(1, tau, &sys, &bath, &q).unwrap();
    let l1 = extract_l(1, tau, &[t1]).unwrap().remove(0);
    let expect = Superoperator::commutator_generator(&pauli_z().scale_real(2.0 * rho - 1.0));
    assert!(l1.sub(&expect).norm() < 1e-12);
}

#[test]
fn terms_match_exact_taylor_coefficients_for_spin_bath() {
    // Heisenberg coupling with a coherent bath state, orders 1 to 4.
    let sys = heisenberg_sys(1.0, 0.3);
    let spin = TwoSpinBath::new(2.0, 0.6, SpinCouplingSet::Heisenberg)
        .unwrap()
        .with_coherence(C64::new(0.25, -0.2))
        .unwrap();
    let bath = BathModel::TwoSpin(spin.clone());
    let q = QuadratureConfig::default();
    let tau = 0.8;
    let rho_s = ComplexMatrix::from_rows(&[
        vec![C64::new(0.7, 0.0), C64::new(0.1, 0.3)],
        vec![C64::new(0.1, -0.3), C64::new(0.3, 0.0)],
    ])
    .unwrap();
    let oracle = spin_taylor_terms(&sys, &spin.hamiltonian(), &spin.operators(), &spin.initial_state(), &rho_s, tau);
    assert!(oracle[0].max_deviation(&rho_s) < 1e-13);
    let ts = compute_t_list(4, tau, &sys, &bath, &q).unwrap();
    for n in 1..=4 {
        let got = ts[n - 1].apply(&rho_s).unwrap();
        let err = got.max_deviation(&oracle[n]);
        assert!(err < 1e-10, "order {n}: {err:e}");
    }
}

#[test]
fn terms_match_exact_taylor_coefficients_sigma_x_sigma_z() {
    let sys = SystemSpec::new(pauli_z(), vec![Coupling::new(pauli_x(), 0)], 0.5).unwrap();
    let spin = TwoSpinBath::new(3.0, 1.0, SpinCouplingSet::SingleSigmaZ).unwrap();
    let bath = BathModel::TwoSpin(spin.clone());
    let q = QuadratureConfig::default();
    let rho_s = ComplexMatrix::from_rows(&[
        vec![C64::new(0.4, 0.0), C64::new(0.2, 0.1)],
        vec![C64::new(0.2, -0.1), C64::new(0.6, 0.0)],
    ])
    .unwrap();
    for tau in [0.3, 2.5] {
        let oracle = spin_taylor_terms(&sys, &spin.hamiltonian(), &spin.operators(), &spin.initial_state(), &rho_s, tau);
        let ts = compute_t_list(4, tau, &sys, &bath, &q).unwrap();
        for n in 1..=4 {
            let err = ts[n - 1].apply(&rho_s).unwrap().max_deviation(&oracle[n]);
            assert!(err < 1e-9, "tau {tau} order {n}: {err:e}");
        }
    }
}

#[test]
fn stationary_path_agrees_with_simplex_path() {
    let fast = QuadratureConfig::default();
    let slow = fast_off();
    let cases: Vec<(SystemSpec, BathModel)> = vec![
        (fano_sys(1.0), fano_bath()),
        (dissipative_sys(), BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap())),
        (heisenberg_sys(1.0, 0.25), spin_bath(2.0, 0.3, SpinCouplingSet::Heisenberg)),
    ];
    for (sys, bath) in &cases {
        for tau in [0.5, 3.0, 9.0] {
            let a = compute_t(2, tau, sys, bath, &fast).unwrap();
            let b = compute_t(2, tau, sys, bath, &slow).unwrap();
            let err = a.sub(&b).norm();
            assert!(err < 1e-8 * (1.0 + a.norm()), "tau {tau}: {err:e}");
        }
    }
}

#[test]
fn short_time_scaling() {
    let sys = fano_sys(1.0);
    let bath = fano_bath();
    let q = QuadratureConfig::default();
    for (n, tol) in [(2usize, 0.05), (4, 0.1)] {
        let a = compute_t(n, 1e-3, &sys, &bath, &q).unwrap().norm();
        let b = compute_t(n, 2e-3, &sys, &bath, &q).unwrap().norm();
        let ratio = b / a;
        let expect = 2f64.powi(n as i32);
        assert!((ratio / expect - 1.0).abs() < tol, "order {n}: ratio {ratio}");
    }
}

#[test]
fn generators_preserve_trace_and_hermiticity() {
    let q = QuadratureConfig::default();
    let cases: Vec<(SystemSpec, BathModel)> = vec![
        (fano_sys(1.0), fano_bath()),
        (dissipative_sys(), BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap())),
        (heisenberg_sys(1.0, 0.25), spin_bath(2.0, 0.3, SpinCouplingSet::Heisenberg)),
    ];
    for (sys, bath) in &cases {
        let g = GrainedGenerator::build(sys, bath, 4, 1.2, &q).unwrap();
        assert!(g.assembled().trace_defect() < 1e-9);
        assert!(g.assembled().hermiticity_defect() < 1e-9);
        assert_eq!(g.order(), 4);
        assert_eq!(g.components().len(), 4);
    }
}

#[test]
fn pure_dephasing_fourth_order_is_half_square() {
    let sys = SystemSpec::new(pauli_z().scale_real(0.5), vec![Coupling::new(pauli_z(), 0)], 0.3).unwrap();
    let bath = BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap());
    let q = QuadratureConfig::default();
    let tau = 0.5;
    let ts = compute_t_list(4, tau, &sys, &bath, &q).unwrap();
    let half_sq = ts[1].then_after(&ts[1]).scale(0.5);
    let dev = ts[3].sub(&half_sq).norm();
    assert!(dev <= 1e-6 * ts[1].norm().powi(2), "{dev:e}");
    let ls = extract_l(4, tau, &ts).unwrap();
    assert!(ls[3].norm() <= 1e-6 * ls[1].norm());
}

#[test]
fn propagation_returns_initial_state_at_zero_and_keeps_trace() {
    let sys = heisenberg_sys(1.0, 0.25);
    let bath = spin_bath(2.0, 0.5, SpinCouplingSet::Heisenberg);
    let rho0 = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
    let q = QuadratureConfig::default();
    let out = dcg_propagate(&sys, &bath, 2, &rho0, &[0.0, 0.5, 1.0], &q).unwrap();
    assert_eq!(out[0], rho0);
    for r in &out {
        assert!((r.matrix().trace() - ONE).norm() < 1e-9);
        assert!(r.matrix().hermiticity_defect() < 1e-9);
    }
    assert!(dcg_propagate(&sys, &bath, 2, &rho0, &[1.0, 0.5], &q).is_err());
    assert!(dcg_propagate(&sys, &bath, 2, &rho0, &[-1.0], &q).is_err());
}

#[test]
fn two_spin_population_closed_form() {
    let (lam, omega, big, rho_b) = (0.25, 1.0, 2.0, 0.5);
    let sys = heisenberg_sys(omega, lam);
    let bath = spin_bath(big, rho_b, SpinCouplingSet::Heisenberg);
    let rho0 = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
    let q = QuadratureConfig::default();
    let ts = [0.4, std::f64::consts::FRAC_PI_2, 2.3];
    let out = dcg_propagate(&sys, &bath, 2, &rho0, &ts, &q).unwrap();
    for (t, r) in ts.iter().zip(&out) {
        let dw = big - omega;
        let ex = (-4.0 * lam * lam * (t * dw).sin().powi(2) / (dw * dw)).exp();
        let expect = ex + (1.0 - ex) * rho_b;
        assert!((r.get(0, 0).re - expect).abs() < 1e-5, "t {t}: {} vs {expect}", r.get(0, 0).re);
    }
    assert!((out[1].get(0, 0).re - 0.889_400_391_9).abs() < 1e-5);
}

#[test]
fn markov_limit_for_fano_model() {
    let sys = fano_sys(1.0);
    let leads = FermionLeads::new(1.0, 1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
    let bath = BathModel::Fermion(leads);
    let l = bms_liouvillian(&sys, &bath).unwrap();
    assert!(l.trace_defect() < 1e-12);
    let rate = 0.1 * (leads.tunneling_rate(crate::bath_correlations::Lead::Left, 1.0)
        + leads.tunneling_rate(crate::bath_correlations::Lead::Right, 1.0));
    // d/dt ρ00 = −λ²Γ_L ρ00 + λ²Γ_R ρ11
    let m = l.matrix();
    assert!((m[(0, 0)].re + 0.1 * leads.tunneling_rate(crate::bath_correlations::Lead::Left, 1.0)).abs() < 1e-12);
    assert!((m[(0, 0)] - m[(0, 3)] + rate).norm() < 1e-12);
    let spin = spin_bath(1.0, 0.5, SpinCouplingSet::Heisenberg);
    assert!(matches!(bms_liouvillian(&heisenberg_sys(1.0, 0.1), &spin), Err(DcgError::UnsupportedBath(_))));
}

#[test]
fn markov_limit_is_approached_at_large_tau() {
    let sys = dissipative_sys();
    let bath = BathModel::Bosonic(BosonicBath::ohmic(1.0).unwrap());
    let q = QuadratureConfig::default();
    let bms = bms_liouvillian(&sys, &bath).unwrap();
    let lam2 = 0.1;
    let dist = |tau: f64| {
        let ts = compute_t_list(2, tau, &sys, &bath, &q).unwrap();
        let ls = extract_l(2, tau, &ts).unwrap();
        ls[1].scale(lam2).sub(&bms).norm()
    };
    let d2 = dist(100.0);
    let d3 = dist(1000.0);
    assert!(d3 < d2, "{d3:e} vs {d2:e}");
    assert!(d3 < 1e-3 * bms.norm(), "{d3:e}");
}
