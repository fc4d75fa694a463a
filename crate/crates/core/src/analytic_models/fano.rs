//! Fano–Anderson dot between two leads at infinite bias:
//! `H_S = ε_d |1⟩⟨1|`, couplings `A_1 = −|0⟩⟨1|`, `A_2 = −|1⟩⟨0|`.

use super::{two_level_population, RateCoefficients};
use crate::bath_correlations::{BathModel, FermionLeads, Lead};
use crate::dcg_engine::{Coupling, SystemSpec};
use crate::error::{domain, DcgError, Result};
use crate::quantum_core::{matrix_exponential, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoParams {
    pub eps_d: f64,
    pub leads: FermionLeads,
    pub lambda: f64,
}

impl FanoParams {
    pub fn new(eps_d: f64, leads: FermionLeads, lambda: f64) -> Result<Self> {
        if !eps_d.is_finite() || !lambda.is_finite() {
            return domain("dot energy and coupling must be finite");
        }
        Ok(Self { eps_d, leads, lambda })
    }

    pub fn system(&self) -> Result<SystemSpec> {
        let a1 = ComplexMatrix::basis_op(2, 0, 1).scale_real(-1.0);
        let a2 = ComplexMatrix::basis_op(2, 1, 0).scale_real(-1.0);
        SystemSpec::new(
            ComplexMatrix::basis_op(2, 1, 1).scale_real(self.eps_d),
            vec![Coupling::new(a1, 0), Coupling::new(a2, 1)],
            self.lambda.abs(),
        )
    }

    pub fn bath_model(&self) -> BathModel {
        BathModel::Fermion(self.leads)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("coarse-graining time must be positive, got {tau}"));
    }
    Ok(())
}

/// `τ² φ_2(aτ)` with `φ_2(z) = (e^z − 1 − z)/z²`, i.e. `∫_0^τ (τ − x) e^{ax} dx`.
fn ramp_integral(a: C64, tau: f64) -> C64 {
    let z = a * tau;
    let phi2 = if z.norm() < 1e-3 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    };
    tau * tau * phi2
}

/// Second-order coefficients in closed form.
pub fn fano_m(tau: f64, params: &FanoParams) -> Result<RateCoefficients> {
    check_tau(tau)?;
    let leads = &params.leads;
    let rate = |lead: Lead| {
        let (g, d, e) = (leads.amplitude(lead), leads.width(lead), leads.center(lead));
        g * d * ramp_integral(C64::new(-d, e - params.eps_d), tau).re
    };
    let m11 = -rate(Lead::Left);
    let m14 = rate(Lead::Right);
    Ok(RateCoefficients::second_order(tau, C64::new(m11, 0.0), C64::new(m14, 0.0)))
}

/// `∫_{τ > s_1 > ... > s_n > 0} exp(Σ c_k s_k)`.
///
/// In gap variables this is the exponential divided difference over the
/// partial sums of `c`, read off the exponential of a bidiagonal matrix.
fn ordered_exponential(c: &[C64], tau: f64) -> Result<C64> {
    let n = c.len();
    let mut m = ComplexMatrix::zeros(n + 1, n + 1);
    let mut b = ZERO;
    for k in 0..=n {
        if k > 0 {
            b += c[k - 1];
            m[(k - 1, k)] = C64::new(tau, 0.0);
        }
        m[(k, k)] = b * tau;
    }
    Ok(matrix_exponential(&m)?[(0, n)])
}

/// Product of two lead correlators, `K e^{Σ_i k_i t_i}`, once the time
/// order (and hence every `|t_i − t_j|`) is fixed.
struct ExpTerm {
    pref: C64,
    coef: [C64; 4],
}

/// Multiplies in `C_a(t_i − t_j)`; `pos` ranks the times, latest first.
fn lead_factor(leads: &FermionLeads, lead: Lead, i: usize, j: usize, pos: &[usize; 4], term: &mut ExpTerm) {
    let (g, d, e) = (leads.amplitude(lead), leads.width(lead), leads.center(lead));
    term.pref *= 0.5 * g * d;
    // t_i > t_j when i comes first
    let sgn = if pos[i] < pos[j] { 1.0 } else { -1.0 };
    term.coef[i] += C64::new(-d * sgn, e);
    term.coef[j] += C64::new(d * sgn, -e);
}

/// Fourth-order coefficients. Each Wick term is a product of exponentials
/// in `|t_i − t_j|`; splitting the cube into its 24 time orders leaves
/// ordered exponential integrals, evaluated exactly.
pub fn fano_p(tau: f64, params: &FanoParams) -> Result<RateCoefficients> {
    let mut r = fano_m(tau, params)?;
    let leads = &params.leads;
    let eps = params.eps_d;
    let mut p11 = ZERO;
    let mut p14 = ZERO;
    for perm in permutations4() {
        // pos[i] is the rank of t_{i+1}, 0 for the latest
        let mut pos = [0usize; 4];
        for (rank, &i) in perm.iter().enumerate() {
            pos[i] = rank;
        }
        let after = |a: usize, b: usize| pos[a] < pos[b];
        // Θ(t3 − t2)Θ(t2 − t1) + Θ(t2 − t3)Θ(t3 − t4)
        let w = (after(2, 1) && after(1, 0)) as u8 + (after(1, 2) && after(2, 3)) as u8;
        if w == 0 {
            continue;
        }
        let integrate = |terms: &[(Lead, usize, usize, Lead, usize, usize)], phase: f64| -> Result<C64> {
            let mut sum = ZERO;
            for &(la, i1, j1, lb, i2, j2) in terms {
                let mut t = ExpTerm {
                    pref: ONE,
                    // e^{phase·iε(t1 − t2 + t3 − t4)}
                    coef: [
                        C64::new(0.0, phase * eps),
                        C64::new(0.0, -phase * eps),
                        C64::new(0.0, phase * eps),
                        C64::new(0.0, -phase * eps),
                    ],
                };
                lead_factor(leads, la, i1, j1, &pos, &mut t);
                lead_factor(leads, lb, i2, j2, &pos, &mut t);
                let c: Vec<C64> = perm.iter().map(|&i| t.coef[i]).collect();
                sum += t.pref * ordered_exponential(&c, tau)?;
            }
            Ok(sum * w as f64)
        };
        // C_L(t1−t2)C_L(t3−t4) + C_L(t1−t4)C_R(t3−t2)
        p11 += integrate(
            &[(Lead::Left, 0, 1, Lead::Left, 2, 3), (Lead::Left, 0, 3, Lead::Right, 2, 1)],
            -1.0,
        )?;
        // C_R(t2−t1)C_R(t4−t3) + C_R(t4−t1)C_L(t2−t3)
        p14 -= integrate(
            &[(Lead::Right, 1, 0, Lead::Right, 3, 2), (Lead::Right, 3, 0, Lead::Left, 1, 2)],
            1.0,
        )?;
    }
    if !(p11.norm().is_finite() && p14.norm().is_finite()) {
        return Err(DcgError::Numerical("Fano fourth-order coefficients are not finite".into()));
    }
    r.p11 = p11;
    r.p14 = p14;
    Ok(r)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// `ρ_00^τ(t)` from the `t/τ` interpolation of DCG2 or DCG4.
pub fn fano_dcg_population(order: usize, tau: f64, t: f64, params: &FanoParams, rho00: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if !(0.0..=1.0).contains(&rho00) {
        return domain(format!("initial population must lie in [0, 1], got {rho00}"));
    }
    let r = match order {
        2 => fano_m(tau, params)?,
        4 => fano_p(tau, params)?,
        _ => return Err(DcgError::UnsupportedOrder(order)),
    };
    let (a, b) = r.tilde(params.lambda, order);
    Ok(two_level_population(a, b, rho00, t / tau))
}

/// Born–Markov solution with rates `Γ_a(ε_d)`.
pub fn fano_bms_population(t: f64, params: &FanoParams, rho00: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    let gl = params.leads.tunneling_rate(Lead::Left, params.eps_d);
    let gr = params.leads.tunneling_rate(Lead::Right, params.eps_d);
    let sum = gl + gr;
    if sum <= 0.0 {
        return Err(DcgError::DegenerateRates("Γ_L(ε_d) + Γ_R(ε_d) vanishes".into()));
    }
    let decay = (-params.lambda * params.lambda * sum * t).exp();
    Ok(gr / sum * (1.0 - decay) + rho00 * decay)
}
