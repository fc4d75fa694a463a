//! Spin-boson coefficients: `H_S = (ε_d/2)(1 − σ^z)`, coupling `A ⊗ Σ_k (h_k b_k + h.c.)`.

use std::f64::consts::PI;

use super::{sinc, two_level_population, RateCoefficients};
use crate::bath_correlations::{BathModel, BosonicBath};
use crate::dcg_engine::{Coupling, SystemSpec};
use crate::error::{domain, DcgError, Result};
use crate::quadrature::{cumulative_integral, integrate_adaptive, AdaptiveOptions};
use crate::quantum_core::{pauli_x, pauli_z, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinBosonCoupling {
    /// `A = σ^z`
    Dephasing,
    /// `A = σ^x`
    Dissipative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBosonParams {
    pub eps_d: f64,
    pub bath: BosonicBath,
    pub lambda: f64,
    pub coupling: SpinBosonCoupling,
}

impl SpinBosonParams {
    pub fn new(eps_d: f64, bath: BosonicBath, lambda: f64, coupling: SpinBosonCoupling) -> Result<Self> {
        if !(eps_d > 0.0 && eps_d.is_finite()) {
            return domain(format!("level splitting must be positive, got {eps_d}"));
        }
        if !lambda.is_finite() {
            return domain("coupling strength must be finite");
        }
        Ok(Self {
            eps_d,
            bath,
            lambda,
            coupling,
        })
    }

    pub fn system(&self) -> Result<SystemSpec> {
        let h = (&ComplexMatrix::identity(2) - &pauli_z()).scale_real(0.5 * self.eps_d);
        let a = match self.coupling {
            SpinBosonCoupling::Dephasing => pauli_z(),
            SpinBosonCoupling::Dissipative => pauli_x(),
        };
        SystemSpec::new(h, vec![Coupling::new(a, 0)], self.lambda.abs())
    }

    pub fn bath_model(&self) -> BathModel {
        BathModel::Bosonic(self.bath)
    }

    /// `1/(1 + e^{−βε_d})`.
    pub fn gibbs_population(&self) -> f64 {
        1.0 / (1.0 + (-self.bath.beta() * self.eps_d).exp())
    }

    fn require_dissipative(&self) -> Result<()> {
        match self.coupling {
            SpinBosonCoupling::Dissipative => Ok(()),
            SpinBosonCoupling::Dephasing => Err(DcgError::Argument(
                "population coefficients need the dissipative coupling".into(),
            )),
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("coarse-graining time must be positive, got {tau}"));
    }
    Ok(())
}

/// Band-filter integrals `∓(τ²/2π) ∫ J(ω) sinc²[(ω ∓ ε_d)τ/2] dω`.
pub fn spin_boson_m(tau: f64, params: &SpinBosonParams) -> Result<RateCoefficients> {
    check_tau(tau)?;
    params.require_dissipative()?;
    let bath = &params.bath;
    let eps = params.eps_d;
    let beta = bath.beta();
    let s = bath.exponent();
    let w_max = (40.0 / beta).max(20.0 * bath.omega_c()).max(eps.abs() + 60.0 / tau);
    let window = 0.5e-8;

    let segments = ((w_max * tau / PI).ceil() as usize).clamp(1, 20_000);
    let mut cuts: Vec<f64> = (1..segments).map(|k| w_max * k as f64 / segments as f64).collect();
    cuts.push(eps);
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 400_000,
    };
    let half = 0.5 * tau;
    // [window, w_max] and its mirror, as one vector integral
    let r = integrate_adaptive(
        |w, out| {
            let jp = bath.spectral_function(w).unwrap_or(0.0);
            let jm = bath.spectral_function(-w).unwrap_or(0.0);
            out[0] = jp * sinc((w - eps) * half).powi(2) + jm * sinc((-w - eps) * half).powi(2);
            out[1] = jp * sinc((w + eps) * half).powi(2) + jm * sinc((-w + eps) * half).powi(2);
        },
        2,
        window,
        w_max,
        &cuts,
        opts,
    )
    .into_checked("spin-boson band-filter integral")?;
    // J(ω) ≈ (G0/β)|ω|^{S−1} inside the excluded window
    let inner = 2.0 * bath.g0() / beta * window.powf(s) / s * sinc(eps * half).powi(2);
    let pref = tau * tau / (2.0 * PI);
    let m11 = -pref * (r[0] + inner);
    let m14 = pref * (r[1] + inner);
    Ok(RateCoefficients::second_order(tau, C64::new(m11, 0.0), C64::new(m14, 0.0)))
}

/// Target grid spacing of the time-domain reduction.
const GRID_STEP: f64 = 0.01;

/// Time-domain pieces for phase sign `σ`: `(m, A + B + C)` where `m` is the
/// double integral of `c(s) e^{iσε s}` over the square.
fn reduced_terms(bath: &BosonicBath, eps: f64, tau: f64, sigma: f64) -> (C64, C64) {
    let n = ((tau / GRID_STEP).ceil() as usize).max(64);
    let h = tau / n as f64;
    let xs: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let c: Vec<C64> = xs.iter().map(|&x| bath.correlation(x)).collect();
    let rot = |x: f64, k: f64| C64::from_polar(1.0, k * sigma * eps * x);
    // f(s) = c(s) e^{iσεs}, g(s) = c(s) e^{−iσεs}, c(−s) = c(s)*
    let f_pos: Vec<C64> = xs.iter().zip(&c).map(|(&x, &cx)| cx * rot(x, 1.0)).collect();
    let f_neg: Vec<C64> = f_pos.iter().map(|v| v.conj()).collect();
    let g_pos: Vec<C64> = xs.iter().zip(&c).map(|(&x, &cx)| cx * rot(x, -1.0)).collect();

    let phi = cumulative_integral(&f_pos, h);
    let phi_neg: Vec<C64> = cumulative_integral(&f_neg, h).into_iter().map(|v| -v).collect();
    // F(x) = Φ(τ − x) − Φ(−x): the free time integrated out
    let big_f: Vec<C64> = (0..=n).map(|j| phi[n - j] - phi_neg[j]).collect();
    let f1 = cumulative_integral(&big_f, h);
    let phi2 = cumulative_integral(&phi, h);
    let psi = cumulative_integral(&g_pos, h);

    let total = |y: Vec<C64>| cumulative_integral(&y, h)[n];
    let a = total((0..=n).map(|j| big_f[j] * phi2[j]).collect());
    let b = total((0..=n).map(|j| psi[n - j] * f1[j]).collect());
    let k = cumulative_integral(&(0..=n).map(|j| rot(xs[j], 2.0) * f1[j]).collect::<Vec<_>>(), h);
    let cc = total(
        (0..=n)
            .map(|j| {
                let hu = rot(tau - xs[j], -2.0) * (k[n] - k[n - j]) - k[j];
                g_pos[j] * hu
            })
            .collect(),
    );
    (f1[n], a + b + cc)
}

/// Fourth-order population coefficients from the Wick-factorised
/// four-time integrals, reduced exactly to nested one-dimensional running
/// integrals on a uniform grid. The `m` entries come from the same grid.
pub fn spin_boson_p(tau: f64, params: &SpinBosonParams) -> Result<RateCoefficients> {
    check_tau(tau)?;
    params.require_dissipative()?;
    let (m_minus, s_minus) = reduced_terms(&params.bath, params.eps_d, tau, -1.0);
    let (m_plus, s_plus) = reduced_terms(&params.bath, params.eps_d, tau, 1.0);
    let mut r = RateCoefficients::second_order(tau, C64::new(-m_minus.re, 0.0), C64::new(m_plus.re, 0.0));
    r.p11 = C64::new(2.0 * s_minus.re, 0.0);
    r.p14 = C64::new(-2.0 * s_plus.re, 0.0);
    if !(r.p11.re.is_finite() && r.p14.re.is_finite()) {
        return Err(DcgError::Numerical("spin-boson fourth-order coefficients are not finite".into()));
    }
    Ok(r)
}

/// `ρ_00^τ(τ)` of DCG2 or DCG4.
pub fn spin_boson_population(order: usize, tau: f64, params: &SpinBosonParams, rho00: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho00) {
        return domain(format!("initial population must lie in [0, 1], got {rho00}"));
    }
    let r = match order {
        2 => spin_boson_m(tau, params)?,
        4 => spin_boson_p(tau, params)?,
        _ => return Err(DcgError::UnsupportedOrder(order)),
    };
    let (a, b) = r.tilde(params.lambda, order);
    Ok(two_level_population(a, b, rho00, 1.0))
}
