use dcg_core::analytic_models::{FanoParams, SpinBosonCoupling, SpinBosonParams, TwoSpinParams};
use dcg_core::exact_oracles::two_spin_exact;
use dcg_core::{
    dcg_propagate, BathModel, BosonicBath, ComplexMatrix, DensityMatrix, FermionLeads,
    QuadratureConfig, SpinCouplingSet, SystemSpec, TwoSpinBath, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let psi: Vec<C64> = (0..4).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    // rank-two mixture of the columns
    let m = ComplexMatrix::from_fn(2, 2, |a, b| {
        psi[a] * psi[b].conj() + psi[a + 2] * psi[b + 2].conj()
    });
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

fn models() -> Vec<(SystemSpec, BathModel)> {
    let two = TwoSpinParams::new(0.25, 1.0, 2.0, 0.5).unwrap();
    let coherent = TwoSpinBath::new(2.0, 0.6, SpinCouplingSet::Heisenberg)
        .unwrap()
        .with_coherence(C64::new(0.3, 0.2))
        .unwrap();
    let sb = SpinBosonParams::new(1.0, BosonicBath::ohmic(1.0).unwrap(), 0.1f64.sqrt(), SpinBosonCoupling::Dissipative)
        .unwrap();
    let leads = FermionLeads::new(1.0, 1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
    let fano = FanoParams::new(1.0, leads, 0.1f64.sqrt()).unwrap();
    vec![
        (two.system(SpinCouplingSet::Heisenberg).unwrap(), two.bath(SpinCouplingSet::Heisenberg).unwrap()),
        (two.system(SpinCouplingSet::Heisenberg).unwrap(), BathModel::TwoSpin(coherent)),
        (sb.system().unwrap(), sb.bath_model()),
        (fano.system().unwrap(), fano.bath_model()),
    ]
}

#[test]
fn second_order_trajectories_stay_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid: Vec<f64> = (0..=10).map(|k| 2.0 * k as f64).collect();
    let q = QuadratureConfig::default();
    for (sys, bath) in models() {
        for _ in 0..4 {
            let rho0 = random_state(&mut rng);
            for rho in dcg_propagate(&sys, &bath, 2, &rho0, &grid, &q).unwrap() {
                assert!(rho.min_eigenvalue() >= -1e-8);
                assert!((rho.matrix().trace().re - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn exact_two_spin_with_coherent_bath_is_a_state() {
    let p = TwoSpinParams::new(0.25, 1.0, 2.0, 0.6).unwrap();
    let rb = DensityMatrix::new(
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.6, 0.0), C64::new(0.3, 0.2)],
            vec![C64::new(0.3, -0.2), C64::new(0.4, 0.0)],
        ])
        .unwrap(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let rho0 = random_state(&mut rng);
        for k in 0..=20 {
            let out = two_spin_exact(&p, SpinCouplingSet::Heisenberg, &rho0, &rb, k as f64).unwrap();
            assert!(out.min_eigenvalue() >= -1e-10);
        }
    }
}
