//! Reference solutions: brute-force two-spin evolution, the pure-dephasing
//! decay exponent, the residue solution of the Fano–Anderson dot and the
//! equation-of-motion steady states of the spin-boson model.

use std::f64::consts::PI;

use crate::analytic_models::{FanoParams, SpinBosonCoupling, TwoSpinParams};
use crate::bath_correlations::{BosonicBath, Lead, SpinCouplingSet};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_adaptive, integrate_adaptive_scalar, AdaptiveOptions};
use crate::quantum_core::{
    matrix_exponential, partial_trace_bath, pauli_x, pauli_y, pauli_z, ComplexMatrix,
    DensityMatrix, C64,
};

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be finite and non-negative, got {t}"))
    }
}

/// `Tr_B{e^{−iHt} (ρ_S ⊗ ρ_B) e^{iHt}}` for the full two-spin Hamiltonian,
/// in the Schrödinger picture.
pub fn two_spin_exact(
    params: &TwoSpinParams,
    set: SpinCouplingSet,
    rho_s0: &DensityMatrix,
    rho_b0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    if rho_s0.dim() != 2 || rho_b0.dim() != 2 {
        return Err(crate::DcgError::Dimension("two-spin states must be 2x2".into()));
    }
    let id = ComplexMatrix::identity(2);
    let mut h = pauli_z().scale_real(params.omega).kron(&id);
    h = add(&h, &id.kron(&pauli_z().scale_real(params.big_omega)));
    let pairs = match set {
        SpinCouplingSet::Heisenberg => vec![
            (pauli_x(), pauli_x()),
            (pauli_y(), pauli_y()),
            (pauli_z(), pauli_z()),
        ],
        SpinCouplingSet::SingleSigmaZ => vec![(pauli_x(), pauli_z())],
    };
    for (a, b) in pairs {
        h = add(&h, &a.kron(&b).scale_real(params.lambda));
    }
    let u = matrix_exponential(&h.scale(C64::new(0.0, -t)))?;
    let full = rho_s0.matrix().kron(rho_b0.matrix());
    let evolved = u.matmul(&full)?.matmul(&u.adjoint())?;
    DensityMatrix::new(partial_trace_bath(&evolved, 2, 2)?.hermitian_part())
}

fn add(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |r, c| a[(r, c)] + b[(r, c)])
}

/// Decay exponent of the off-diagonal element under pure dephasing,
/// `Γ(t) = (8λ²/2π) ∫_0^∞ G(ω) sin²(ωt/2)/ω² coth(βω/2) dω`.
pub fn dephasing_gamma(t: f64, bath: &BosonicBath, lambda: f64) -> Result<f64> {
    check_time(t)?;
    let s = bath.exponent();
    if !(s > 0.0) {
        return domain(format!("the dephasing integral diverges for S = {s}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let w_max = bath.omega_c() * (80.0 + 4.0 * s);
    // ω = x^{1/S} absorbs the ω^{S−1} behaviour at the origin
    let m = 1.0 / s;
    let integrand = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let w = x.powf(m);
        // G(ω) dω = G0 e^{−ω/ωc} m ω dx
        let sin_sq = (0.5 * w * t).sin().powi(2);
        let coth = 1.0 + 2.0 * bath.occupation(w);
        bath.g0() * (-w / bath.omega_c()).exp() * m * coth * sin_sq / w
    };
    let x_max = w_max.powf(s);
    let periods = ((w_max * t) / (2.0 * PI)).ceil().clamp(1.0, 20000.0) as usize;
    let cuts: Vec<f64> = (1..periods)
        .map(|k| (w_max * k as f64 / periods as f64).powf(s))
        .collect();
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_intervals: 400_000,
    };
    let value = integrate_adaptive_scalar(integrand, 0.0, x_max, &cuts, opts)
        .into_checked("dephasing exponent")?[0];
    Ok(8.0 * lambda * lambda / (2.0 * PI) * value)
}

/// Roots of a monic complex cubic `z³ + c2 z² + c1 z + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub z: [C64; 3],
    pub degenerate: bool,
    coefficients: [C64; 3],
}

impl CubicRoots {
    /// Cardano's formula followed by two Newton steps per root.
    pub fn solve(c2: C64, c1: C64, c0: C64) -> Self {
        let coefficients = [c2, c1, c0];
        let p = c1 - c2 * c2 / 3.0;
        let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let (u_plus, u_minus) = (-q / 2.0 + disc, -q / 2.0 - disc);
        let base = if u_plus.norm() >= u_minus.norm() { u_plus } else { u_minus };
        let u = base.powf(1.0 / 3.0);
        let unity = [
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, 2.0 * PI / 3.0),
            C64::from_polar(1.0, -2.0 * PI / 3.0),
        ];
        let mut z = [C64::new(0.0, 0.0); 3];
        for (k, w) in unity.iter().enumerate() {
            let uk = u * w;
            let vk = if uk.norm() > 0.0 { -p / (3.0 * uk) } else { C64::new(0.0, 0.0) };
            z[k] = uk + vk - c2 / 3.0;
        }
        let poly = |x: C64| ((x + c2) * x + c1) * x + c0;
        let deriv = |x: C64| (3.0 * x + 2.0 * c2) * x + c1;
        for root in z.iter_mut() {
            for _ in 0..2 {
                let d = deriv(*root);
                if d.norm() > 0.0 {
                    *root -= poly(*root) / d;
                }
            }
        }
        let mut roots = Self {
            z,
            degenerate: false,
            coefficients,
        };
        let tol = 1e-8 * roots.scale();
        roots.degenerate = (0..3).any(|i| (i + 1..3).any(|j| (z[i] - z[j]).norm() < tol));
        roots
    }

    /// Natural size of the roots, `max(|c2|, |c1|^{1/2}, |c0|^{1/3})`.
    pub fn scale(&self) -> f64 {
        let [c2, c1, c0] = self.coefficients;
        c2.norm().max(c1.norm().sqrt()).max(c0.norm().cbrt()).max(f64::MIN_POSITIVE)
    }

    /// Largest `|p(z_i)|` relative to the size of the terms of `p`.
    pub fn relative_residual(&self) -> f64 {
        let [c2, c1, c0] = self.coefficients;
        self.z
            .iter()
            .map(|&x| {
                let value = ((x + c2) * x + c1) * x + c0;
                let size = x.norm().powi(3)
                    + c2.norm() * x.norm_sqr()
                    + c1.norm() * x.norm()
                    + c0.norm();
                value.norm() / size.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Poles of the dot propagator for Lorentzian leads.
pub fn fano_poles(params: &FanoParams) -> CubicRoots {
    let (a, b) = lead_shifts(params);
    let e = C64::new(0.0, params.eps_d);
    let leads = &params.leads;
    let half = 0.5 * params.lambda * params.lambda;
    let gl = half * leads.amplitude(Lead::Left) * leads.width(Lead::Left);
    let gr = half * leads.amplitude(Lead::Right) * leads.width(Lead::Right);
    CubicRoots::solve(
        e + a + b,
        e * a + e * b + a * b + gl + gr,
        e * a * b + gl * b + gr * a,
    )
}

/// `(δ_L + iε_L, δ_R + iε_R)`.
fn lead_shifts(params: &FanoParams) -> (C64, C64) {
    let l = &params.leads;
    (
        C64::new(l.width(Lead::Left), l.center(Lead::Left)),
        C64::new(l.width(Lead::Right), l.center(Lead::Right)),
    )
}

/// Dot occupation `n(t)` of the Fano–Anderson model at infinite bias from
/// the residue solution, with `n(0) = n0`.
pub fn fano_exact_occupation(t: f64, params: &FanoParams, n0: f64) -> Result<f64> {
    check_time(t)?;
    if !(0.0..=1.0).contains(&n0) {
        return domain(format!("initial occupation must lie in [0, 1], got {n0}"));
    }
    let roots = fano_poles(params);
    if !roots.degenerate {
        return occupation_from_roots(t, params, n0, &roots.z);
    }
    log::debug!("degenerate dot poles {:?}; averaging split roots", roots.z);
    let h = 1e-6 * roots.scale();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let mut z = roots.z;
        for (k, zk) in z.iter_mut().enumerate() {
            *zk += C64::from_polar(sign * h, 2.0 * PI * k as f64 / 3.0);
        }
        total += occupation_from_roots(t, params, n0, &z)?;
    }
    Ok(0.5 * total)
}

fn occupation_from_roots(t: f64, params: &FanoParams, n0: f64, z: &[C64; 3]) -> Result<f64> {
    let (a, b) = lead_shifts(params);
    let numer = |x: C64| (x + a) * (x + b);
    let weights: Vec<C64> = (0..3)
        .map(|i| {
            let others: C64 = (0..3).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
            numer(z[i]) * (z[i] * t).exp() / others
        })
        .collect();
    let coherent: C64 = weights.iter().sum();
    let kernel = |w: f64| -> C64 {
        let iw = C64::new(0.0, w);
        let poles: C64 = (0..3).map(|i| weights[i] / (z[i] + iw)).sum();
        let free = numer(-iw) * C64::from_polar(1.0, -w * t)
            / z.iter().map(|&zi| -iw - zi).product::<C64>();
        poles + free
    };
    let leads = &params.leads;
    let band = params
        .eps_d
        .abs()
        .max(leads.center(Lead::Left).abs() + leads.width(Lead::Left))
        .max(leads.center(Lead::Right).abs() + leads.width(Lead::Right));
    let w_max = band + 40.0 * leads.width(Lead::Left).max(leads.width(Lead::Right));
    let mut cuts: Vec<f64> = z.iter().map(|zi| -zi.im).collect();
    cuts.push(leads.center(Lead::Left));
    cuts.push(params.eps_d);
    for zi in z {
        let width = zi.re.abs().max(1e-3);
        cuts.extend([-zi.im - 10.0 * width, -zi.im + 10.0 * width]);
    }
    cuts.retain(|c| c.abs() < w_max);
    let opts = AdaptiveOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_intervals: 400_000,
    };
    // infinite bias: only the left lead is occupied
    let value = integrate_adaptive(
        |w, out| out[0] = leads.tunneling_rate(Lead::Left, w) * kernel(w).norm_sqr(),
        1,
        -w_max,
        w_max,
        &cuts,
        opts,
    )
    .into_checked("Fano-Anderson frequency integral")?[0];
    let n = coherent.norm_sqr() * n0 + params.lambda * params.lambda / (2.0 * PI) * value;
    if !n.is_finite() {
        return Err(crate::DcgError::Numerical(format!("occupation at t = {t} is not finite")));
    }
    Ok(n)
}

/// Steady-state `(⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩)` of the factorised equations of
/// motion of the spin-boson model.
pub fn spin_boson_eom_steady(
    coupling: SpinBosonCoupling,
    beta: f64,
    eps_d: f64,
    sigma_z0: f64,
) -> Result<(f64, f64, f64)> {
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    let z = match coupling {
        SpinBosonCoupling::Dephasing => sigma_z0,
        SpinBosonCoupling::Dissipative => {
            let boltzmann = (-beta * eps_d).exp();
            (1.0 - boltzmann) / (1.0 + boltzmann)
        }
    };
    Ok((0.0, 0.0, z))
}

#[cfg(test)]
mod tests;
