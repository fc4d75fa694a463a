use dcg_core::analytic_models::{fano_m, spin_boson_m, FanoParams, SpinBosonCoupling, SpinBosonParams, TwoSpinParams};
use dcg_core::dcg_engine::compute_t;
use dcg_core::lindblad_check::dampening_matrix;
use dcg_core::{BosonicBath, FermionLeads, QuadratureConfig, SpinCouplingSet};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

const TAUS: [f64; 5] = [0.3, 1.0, 2.5, 6.0, 15.0];

#[test]
fn two_spin_dampening_entries() {
    let p = TwoSpinParams::new(0.25, 1.0, 2.0, 0.5).unwrap();
    let sys = p.system(SpinCouplingSet::Heisenberg).unwrap();
    let bath = p.bath(SpinCouplingSet::Heisenberg).unwrap();
    let q = QuadratureConfig::default();
    let delta = p.big_omega - p.omega;
    for tau in TAUS {
        let g = dampening_matrix(tau, &sys, &bath, &q).unwrap();
        let x = tau * delta;
        let s2 = (x.sin() / x).powi(2);
        let rho = p.rho_b00;
        let diag = 4.0 * tau * rho * (1.0 - rho);
        assert!(rel(g.get(0, 0, 0, 0).re, diag) < 1e-5, "tau {tau}");
        assert!(rel(g.get(0, 0, 1, 1).re, -diag) < 1e-5, "tau {tau}");
        assert!(rel(g.get(0, 1, 0, 1).re, 4.0 * tau * rho * s2) < 1e-5, "tau {tau}");
        assert!(rel(g.get(1, 0, 1, 0).re, 4.0 * tau * (1.0 - rho) * s2) < 1e-5, "tau {tau}");
    }
}

#[test]
fn spin_boson_rates() {
    let p = SpinBosonParams::new(1.0, BosonicBath::ohmic(1.0).unwrap(), 0.1f64.sqrt(), SpinBosonCoupling::Dissipative)
        .unwrap();
    let sys = p.system().unwrap();
    let q = QuadratureConfig::default();
    for tau in TAUS {
        let r = spin_boson_m(tau, &p).unwrap();
        let t2 = compute_t(2, tau, &sys, &p.bath_model(), &q).unwrap();
        assert!(rel(t2.matrix()[(0, 0)].re, r.m11.re) < 1e-5);
        assert!(rel(t2.matrix()[(0, 3)].re, r.m14.re) < 1e-5);
    }
}

#[test]
fn fano_rates() {
    let leads = FermionLeads::new(1.0, 1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
    let p = FanoParams::new(1.0, leads, 0.1f64.sqrt()).unwrap();
    let sys = p.system().unwrap();
    let q = QuadratureConfig::default();
    for tau in TAUS {
        let r = fano_m(tau, &p).unwrap();
        let t2 = compute_t(2, tau, &sys, &p.bath_model(), &q).unwrap();
        assert!(rel(t2.matrix()[(0, 0)].re, r.m11.re) < 1e-5);
        assert!(rel(t2.matrix()[(0, 3)].re, r.m14.re) < 1e-5);
    }
}
