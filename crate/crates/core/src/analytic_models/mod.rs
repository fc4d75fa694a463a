//! Closed-form coefficients and solutions of the worked examples: two
//! coupled spins, the spin-boson model and the Fano–Anderson dot.

mod fano;
mod spin_boson;

pub use fano::{fano_bms_population, fano_dcg_population, fano_m, fano_p, FanoParams};
pub use spin_boson::{
    spin_boson_m, spin_boson_p, spin_boson_population, SpinBosonCoupling, SpinBosonParams,
};

use crate::bath_correlations::{BathModel, SpinCouplingSet, TwoSpinBath};
use crate::dcg_engine::{Coupling, SystemSpec};
use crate::error::{domain, Result};
use crate::quantum_core::{pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix, C64};

/// Coefficients of the population block of `T_2^τ` (per `λ²`) and `T_4^τ`
/// (per `λ⁴`), ordered as `(ρ_00, ρ_11)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficients {
    pub tau: f64,
    pub m11: C64,
    pub m14: C64,
    pub m41: C64,
    pub m44: C64,
    pub p11: C64,
    pub p14: C64,
}

impl RateCoefficients {
    fn second_order(tau: f64, m11: C64, m14: C64) -> Self {
        Self {
            tau,
            m11,
            m14,
            m41: -m11,
            m44: -m14,
            p11: C64::new(0.0, 0.0),
            p14: C64::new(0.0, 0.0),
        }
    }

    /// Fourth-order coefficients minus the counterterm `½ (T_2 T_2)`.
    pub fn net_fourth_order(&self) -> (C64, C64) {
        let n11 = self.p11 - 0.5 * (self.m11 * self.m11 + self.m14 * self.m41);
        let n14 = self.p14 - 0.5 * (self.m11 * self.m14 + self.m14 * self.m44);
        (n11, n14)
    }

    /// `(p̃_11, p̃_14)` of the generator `λ² L_2 + λ⁴ L_4`, times `τ`.
    pub fn tilde(&self, lambda: f64, order: usize) -> (f64, f64) {
        let l2 = lambda * lambda;
        let mut a = l2 * self.m11.re;
        let mut b = l2 * self.m14.re;
        if order >= 4 {
            let (n11, n14) = self.net_fourth_order();
            a += l2 * l2 * n11.re;
            b += l2 * l2 * n14.re;
        }
        (a, b)
    }
}

/// Solves `dρ_00/ds = a ρ_00 + b (1 − ρ_00)` from `ρ_00(0) = rho0` up to `s`.
pub(crate) fn two_level_population(a: f64, b: f64, rho0: f64, s: f64) -> f64 {
    let x = a - b;
    let decay = (x * s).exp();
    // (e^{xs} − 1)/x without cancellation
    let growth = if (x * s).abs() < 1e-12 { s } else { (x * s).exp_m1() / x };
    rho0 * decay + b * growth
}

/// Two spins with Heisenberg coupling: `H_S = ω σ^z`, `H_B = Ω σ^z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinParams {
    pub lambda: f64,
    pub omega: f64,
    pub big_omega: f64,
    pub rho_b00: f64,
}

impl TwoSpinParams {
    pub fn new(lambda: f64, omega: f64, big_omega: f64, rho_b00: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_b00) {
            return domain(format!("bath population must lie in [0, 1], got {rho_b00}"));
        }
        if !(lambda.is_finite() && omega.is_finite() && big_omega.is_finite()) {
            return domain("two-spin parameters must be finite");
        }
        Ok(Self {
            lambda,
            omega,
            big_omega,
            rho_b00,
        })
    }

    /// System side of the model for the generic engine.
    pub fn system(&self, set: SpinCouplingSet) -> Result<SystemSpec> {
        let couplings = match set {
            SpinCouplingSet::Heisenberg => vec![
                Coupling::new(pauli_x(), 0),
                Coupling::new(pauli_y(), 1),
                Coupling::new(pauli_z(), 2),
            ],
            SpinCouplingSet::SingleSigmaZ => vec![Coupling::new(pauli_x(), 0)],
        };
        SystemSpec::new(pauli_z().scale_real(self.omega), couplings, self.lambda.abs())
    }

    pub fn bath(&self, set: SpinCouplingSet) -> Result<BathModel> {
        Ok(BathModel::TwoSpin(TwoSpinBath::new(self.big_omega, self.rho_b00, set)?))
    }
}

/// `sin(x)/x`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(1 − sinc x)/x`.
fn sinc_gap(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x / 6.0 - x * x * x / 120.0
    } else {
        (1.0 - x.sin() / x) / x
    }
}

/// DCG2 solution of the Heisenberg two-spin model at `τ = t`, in the
/// interaction picture.
pub fn two_spin_dcg2(params: &TwoSpinParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if rho0.dim() != 2 {
        return Err(crate::error::DcgError::Dimension("two-spin state must be 2x2".into()));
    }
    let TwoSpinParams {
        lambda: l,
        omega,
        big_omega,
        rho_b00: rb,
    } = *params;
    let delta = big_omega - omega;
    let l2 = l * l;
    // sin²(tΔ)/Δ² = t² sinc²(tΔ)
    let s2 = (t * sinc(t * delta)).powi(2);
    let keep = (-4.0 * l2 * s2).exp();
    let p00 = keep * rho0.get(0, 0).re + (1.0 - keep) * rb;

    let decay = -8.0 * l2 * t * t * rb * (1.0 - rb) - 2.0 * l2 * s2;
    // 2λ²(1 − sinc 2tΔ)/Δ = 4λ² t (1 − sinc x)/x with x = 2tΔ
    let shift = 4.0 * l2 * t * sinc_gap(2.0 * t * delta) + 2.0 * l * (1.0 - 2.0 * rb);
    let c01 = C64::new(decay, t * shift).exp() * rho0.get(0, 1);
    let m = ComplexMatrix::from_rows(&[
        vec![C64::new(p00, 0.0), c01],
        vec![c01.conj(), C64::new(1.0 - p00, 0.0)],
    ])?;
    DensityMatrix::new(m)
}
