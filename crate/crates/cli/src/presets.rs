//! Scenarios with the parameters of the published figures.

use std::path::PathBuf;
use std::str::FromStr;

use dcg_core::C64;

use crate::config::{InitialState, Method, ModelKind, ModelParams, Scenario, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fano,
    Dephasing,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fano, Preset::Dephasing];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fano => "fano",
            Preset::Dephasing => "dephasing",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Fig1 => "Heisenberg two-spin model, DCG2 against the exact solution",
            Preset::Fig2 => "sigma_x sigma_z two-spin model, DCG1 to DCG4 against the exact solution",
            Preset::Fig3 => "dissipative spin-boson model, DCG2, DCG4 and BMS relaxation",
            Preset::Fano => "Fano-Anderson dot at infinite bias, DCG2, DCG4 and BMS against the exact solution",
            Preset::Dephasing => "pure-dephasing spin-boson model, DCG2 against the exact decay",
        }
    }

    pub fn scenario(self) -> Scenario {
        // a pure state with both populations and coherences
        let tilted = InitialState::Custom {
            rho00: 0.8,
            rho01: C64::new(0.4, 0.0),
        };
        let sqrt_tenth = 0.1f64.sqrt();
        let (model, methods, params, grid, rho0) = match self {
            Preset::Fig1 => (
                ModelKind::TwoSpinHeisenberg,
                vec![Method::Dcg(2), Method::Exact],
                ModelParams::TwoSpin {
                    lambda: 0.25,
                    omega: 1.0,
                    big_omega: 2.0,
                    rho_b00: 0.5,
                    rho_b01: C64::new(0.0, 0.0),
                },
                TimeGrid { t_max: 20.0, n_points: 401 },
                tilted,
            ),
            Preset::Fig2 => (
                ModelKind::TwoSpinSxSz,
                vec![Method::Dcg(1), Method::Dcg(2), Method::Dcg(3), Method::Dcg(4), Method::Exact],
                ModelParams::TwoSpin {
                    lambda: 0.5,
                    omega: 1.0,
                    big_omega: 1.0,
                    rho_b00: 1.0,
                    rho_b01: C64::new(0.0, 0.0),
                },
                TimeGrid { t_max: 3.0, n_points: 61 },
                tilted,
            ),
            Preset::Fig3 => (
                ModelKind::SpinBosonDissipative,
                vec![Method::Dcg(2), Method::Dcg(4), Method::Bms],
                ModelParams::SpinBoson {
                    lambda: sqrt_tenth,
                    eps_d: 1.0,
                    g0: 1.0,
                    s: 1.0,
                    omega_c: 1.0,
                    beta: 1.0,
                },
                TimeGrid { t_max: 1000.0, n_points: 201 },
                InitialState::Excited,
            ),
            Preset::Fano => (
                ModelKind::FanoAnderson,
                vec![Method::Dcg(2), Method::Dcg(4), Method::Bms, Method::Exact],
                ModelParams::Fano {
                    lambda: sqrt_tenth,
                    eps_d: 1.0,
                    gamma_l0: 1.0,
                    gamma_r0: 1.0,
                    delta_l: 2.0,
                    delta_r: 1.0,
                    eps_l: 0.0,
                    eps_r: 0.0,
                },
                TimeGrid { t_max: 20.0, n_points: 201 },
                InitialState::Ground,
            ),
            Preset::Dephasing => (
                ModelKind::SpinBosonDephasing,
                vec![Method::Dcg(2), Method::Exact],
                ModelParams::SpinBoson {
                    lambda: sqrt_tenth,
                    eps_d: 1.0,
                    g0: 1.0,
                    s: 1.0,
                    omega_c: 1.0,
                    beta: 1.0,
                },
                TimeGrid { t_max: 10.0, n_points: 101 },
                InitialState::PlusState,
            ),
        };
        Scenario {
            name: self.name().to_string(),
            model,
            methods,
            params,
            grid,
            rho0,
            output: PathBuf::from("out").join(self.name()),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
            format!("unknown preset '{s}' (expected one of {})", names.join(", "))
        })
    }
}
