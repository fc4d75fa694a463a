//! Turns config parameters into core model objects.

use dcg_core::analytic_models::{FanoParams, SpinBosonCoupling, SpinBosonParams, TwoSpinParams};
use dcg_core::{
    BathModel, BosonicBath, ComplexMatrix, DensityMatrix, FermionLeads, SpinCouplingSet,
    SystemSpec, TwoSpinBath, C64,
};

use crate::config::{InitialState, ModelKind, ModelParams};

#[derive(Debug, Clone)]
pub enum BuiltModel {
    TwoSpin {
        params: TwoSpinParams,
        set: SpinCouplingSet,
        bath: TwoSpinBath,
    },
    SpinBoson(SpinBosonParams),
    Fano(FanoParams),
}

pub fn build(kind: ModelKind, params: &ModelParams) -> dcg_core::Result<BuiltModel> {
    let mismatch = || {
        dcg_core::DcgError::Argument(format!("parameters do not belong to model {}", kind.name()))
    };
    match (kind, *params) {
        (
            ModelKind::TwoSpinHeisenberg | ModelKind::TwoSpinSxSz,
            ModelParams::TwoSpin {
                lambda,
                omega,
                big_omega,
                rho_b00,
                rho_b01,
            },
        ) => {
            let set = if kind == ModelKind::TwoSpinHeisenberg {
                SpinCouplingSet::Heisenberg
            } else {
                SpinCouplingSet::SingleSigmaZ
            };
            let params = TwoSpinParams::new(lambda, omega, big_omega, rho_b00)?;
            let bath = TwoSpinBath::new(big_omega, rho_b00, set)?.with_coherence(rho_b01)?;
            Ok(BuiltModel::TwoSpin { params, set, bath })
        }
        (
            ModelKind::SpinBosonDephasing | ModelKind::SpinBosonDissipative,
            ModelParams::SpinBoson {
                lambda,
                eps_d,
                g0,
                s,
                omega_c,
                beta,
            },
        ) => {
            let coupling = if kind == ModelKind::SpinBosonDephasing {
                SpinBosonCoupling::Dephasing
            } else {
                SpinBosonCoupling::Dissipative
            };
            let bath = BosonicBath::new(g0, s, omega_c, beta)?;
            Ok(BuiltModel::SpinBoson(SpinBosonParams::new(eps_d, bath, lambda, coupling)?))
        }
        (
            ModelKind::FanoAnderson,
            ModelParams::Fano {
                lambda,
                eps_d,
                gamma_l0,
                gamma_r0,
                delta_l,
                delta_r,
                eps_l,
                eps_r,
            },
        ) => {
            let leads = FermionLeads::new(gamma_l0, gamma_r0, delta_l, delta_r, eps_l, eps_r)?;
            Ok(BuiltModel::Fano(FanoParams::new(eps_d, leads, lambda)?))
        }
        _ => Err(mismatch()),
    }
}

impl BuiltModel {
    pub fn system(&self) -> dcg_core::Result<SystemSpec> {
        match self {
            BuiltModel::TwoSpin { params, set, .. } => params.system(*set),
            BuiltModel::SpinBoson(p) => p.system(),
            BuiltModel::Fano(p) => p.system(),
        }
    }

    pub fn bath(&self) -> BathModel {
        match self {
            BuiltModel::TwoSpin { bath, .. } => BathModel::TwoSpin(bath.clone()),
            BuiltModel::SpinBoson(p) => p.bath_model(),
            BuiltModel::Fano(p) => p.bath_model(),
        }
    }

    /// The initial system state; ground and excited refer to `H_S`.
    pub fn initial_state(&self, spec: InitialState) -> dcg_core::Result<DensityMatrix> {
        let h = self.system()?.hamiltonian().clone();
        let (ground, excited) = if h[(0, 0)].re <= h[(1, 1)].re { (0, 1) } else { (1, 0) };
        let basis = |k: usize| {
            let mut p = [0.0; 2];
            p[k] = 1.0;
            DensityMatrix::diagonal(&p)
        };
        match spec {
            InitialState::Ground => basis(ground),
            InitialState::Excited => basis(excited),
            InitialState::PlusState => {
                let s = 0.5f64.sqrt();
                DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)])
            }
            InitialState::Custom { rho00, rho01 } => DensityMatrix::new(ComplexMatrix::from_rows(&[
                vec![C64::new(rho00, 0.0), rho01],
                vec![rho01.conj(), C64::new(1.0 - rho00, 0.0)],
            ])?),
        }
    }
}
