//! Multi-time bath correlation functions for the analytic bath models.
//!
//! `C_{i_1 ... i_n}(t_1, ..., t_n) = Tr_B{ B_{i_1}(t_1) ... B_{i_n}(t_n) ρ_B }`,
//! where an index flagged as conjugated stands for `B^†`.

mod table;
mod zeta;

use std::f64::consts::PI;

use crate::error::{domain, DcgError, Result};
use crate::quadrature::{integrate_adaptive, integrate_adaptive_scalar, AdaptiveOptions};
use crate::quantum_core::{pauli_x, pauli_y, pauli_z, ComplexMatrix, C64, ONE, ZERO};

pub use table::ChebyshevTable;
pub use zeta::hurwitz_zeta;

/// Which `σ_S ⊗ σ_B` products couple the two spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinCouplingSet {
    /// `σ^x σ^x + σ^y σ^y + σ^z σ^z`; bath operators `[σ^x, σ^y, σ^z]`.
    Heisenberg,
    /// A single bath operator `σ^z_B`.
    SingleSigmaZ,
}

/// A single bath spin with `H_B = Ω σ^z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpinBath {
    omega: f64,
    rho_b00: f64,
    rho_b01: C64,
    coupling_set: SpinCouplingSet,
}

impl TwoSpinBath {
    /// Diagonal initial bath state `diag(ρ_B00, 1 − ρ_B00)`.
    pub fn new(omega: f64, rho_b00: f64, coupling_set: SpinCouplingSet) -> Result<Self> {
        if !omega.is_finite() {
            return domain("bath spin frequency must be finite");
        }
        if !(0.0..=1.0).contains(&rho_b00) {
            return domain(format!("rho_B00 must lie in [0, 1], got {rho_b00}"));
        }
        Ok(Self {
            omega,
            rho_b00,
            rho_b01: ZERO,
            coupling_set,
        })
    }

    /// Adds an off-diagonal element `<0|ρ_B|1>` to the initial bath state.
    pub fn with_coherence(mut self, rho_b01: C64) -> Result<Self> {
        let bound = self.rho_b00 * (1.0 - self.rho_b00);
        if !(rho_b01.norm_sqr() <= bound + 1e-15) {
            return domain(format!(
                "bath coherence {rho_b01} makes the bath state indefinite"
            ));
        }
        self.rho_b01 = rho_b01;
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn rho_b00(&self) -> f64 {
        self.rho_b00
    }

    pub fn rho_b01(&self) -> C64 {
        self.rho_b01
    }

    pub fn coupling_set(&self) -> SpinCouplingSet {
        self.coupling_set
    }

    pub fn initial_state(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(self.rho_b00, 0.0),
                self.rho_b01,
                self.rho_b01.conj(),
                C64::new(1.0 - self.rho_b00, 0.0),
            ],
        )
        .expect("2x2")
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        pauli_z().scale_real(self.omega)
    }

    /// Bath coupling operators in index order.
    pub fn operators(&self) -> Vec<ComplexMatrix> {
        match self.coupling_set {
            SpinCouplingSet::Heisenberg => vec![pauli_x(), pauli_y(), pauli_z()],
            SpinCouplingSet::SingleSigmaZ => vec![pauli_z()],
        }
    }

    fn heisenberg_op(&self, i: CorrelationIndex, t: f64) -> ComplexMatrix {
        let ops = self.operators();
        let b = if i.conjugated {
            ops[i.op_index].adjoint()
        } else {
            ops[i.op_index].clone()
        };
        // H_B = Ω σ^z has energies (+Ω, −Ω)
        let e = [self.omega, -self.omega];
        ComplexMatrix::from_fn(2, 2, |a, c| {
            b[(a, c)] * C64::from_polar(1.0, (e[a] - e[c]) * t)
        })
    }

    fn correlate(&self, idx: &[CorrelationIndex], times: &[f64]) -> C64 {
        let mut m = ComplexMatrix::identity(2);
        for (&i, &t) in idx.iter().zip(times) {
            m = m.mul_unchecked(&self.heisenberg_op(i, t));
        }
        m.mul_unchecked(&self.initial_state()).trace()
    }
}

/// Thermal bosonic bath with spectral density `G(ω) = G_0 ω^S e^{−ω/ω_c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonicBath {
    g0: f64,
    s: f64,
    omega_c: f64,
    beta: f64,
}

impl BosonicBath {
    pub fn new(g0: f64, s: f64, omega_c: f64, beta: f64) -> Result<Self> {
        if !(g0 >= 0.0 && g0.is_finite()) {
            return domain(format!("G0 must be finite and non-negative, got {g0}"));
        }
        if !(s > 0.0 && s.is_finite()) {
            return domain(format!("spectral exponent S must be positive, got {s}"));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return domain(format!("cutoff must be positive, got {omega_c}"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("inverse temperature must be positive, got {beta}"));
        }
        Ok(Self {
            g0,
            s,
            omega_c,
            beta,
        })
    }

    /// Ohmic defaults: `G0 = 1, S = 1, ω_c = 1, β = 1`.
    pub fn ohmic(beta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, beta)
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `G(ω)` for `ω > 0`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return domain(format!("spectral density needs ω > 0, got {omega}"));
        }
        Ok(self.g(omega))
    }

    fn g(&self, omega: f64) -> f64 {
        self.g0 * omega.powf(self.s) * (-omega / self.omega_c).exp()
    }

    /// Bose occupation `n(ω) = 1/(e^{βω} − 1)`.
    pub fn occupation(&self, omega: f64) -> f64 {
        1.0 / (self.beta * omega).exp_m1()
    }

    /// Stationary correlation `C(t_1, t_2)` as a function of `x = t_1 − t_2`,
    /// from the Hurwitz zeta closed form.
    pub fn correlation(&self, x: f64) -> C64 {
        let sp = 1.0 + self.s;
        let pref = self.g0 * libm::tgamma(sp) / (2.0 * PI * self.beta.powf(sp));
        let base = 1.0 / (self.beta * self.omega_c);
        let a1 = C64::new(base, x / self.beta);
        let a2 = C64::new(1.0 + base, -x / self.beta);
        pref * (zeta::hurwitz_zeta_unchecked(sp, a1) + zeta::hurwitz_zeta_unchecked(sp, a2))
    }

    /// The same correlation from the frequency integral, cut at
    /// `ω_max = max(40/β, 20 ω_c)`. Used as an independent check.
    pub fn correlation_by_frequency_integral(&self, x: f64) -> Result<C64> {
        let w_max = (40.0 / self.beta).max(20.0 * self.omega_c);
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 100_000,
        };
        let r = integrate_adaptive(
            |w, out| {
                let g = self.g(w);
                let coth = 1.0 / (0.5 * self.beta * w).tanh();
                out[0] = g * coth * (w * x).cos();
                out[1] = -g * (w * x).sin();
            },
            2,
            0.0,
            w_max,
            &[],
            opts,
        )
        .into_checked("bosonic correlation")?;
        Ok(C64::new(r[0], r[1]) / (2.0 * PI))
    }

    /// Fourier transform `J(ν) = ∫ C(x) e^{−iνx} dx = G(|ν|)/|e^{βν} − 1|`.
    pub fn spectral_function(&self, nu: f64) -> Result<f64> {
        if nu == 0.0 {
            return if self.s > 1.0 {
                Ok(0.0)
            } else if self.s == 1.0 {
                Ok(self.g0 / self.beta)
            } else {
                domain("spectral function diverges at zero frequency for S < 1")
            };
        }
        Ok(self.g(nu.abs()) / (self.beta * nu).exp_m1().abs())
    }

    /// `(1/2π) P∫ J(ν)/(ω − ν) dν`.
    pub fn principal_part(&self, omega: f64) -> Result<f64> {
        let jw = self.spectral_function(omega)?;
        let w = omega.abs() + (60.0 * self.omega_c).max(60.0 / self.beta);
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 100_000,
        };
        let r = integrate_adaptive_scalar(
            |nu| {
                let j = self.spectral_function(nu).unwrap_or(0.0);
                (j - jw) / (omega - nu)
            },
            -w,
            w,
            &[0.0, omega],
            opts,
        )
        .into_checked("bosonic principal value")?;
        Ok((r[0] + jw * ((w + omega) / (w - omega)).ln()) / (2.0 * PI))
    }
}

/// Lead label of the fermionic reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lead {
    Left,
    Right,
}

/// Bias configuration of the fermionic leads. Only infinite bias
/// (left lead filled, right lead empty) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bias {
    #[default]
    Infinite,
}

/// Two fermionic leads with Lorentzian tunneling rates.
///
/// Operator 0 is `B_1 = Σ t c^†` (creation type), operator 1 is
/// `B_2 = B_1^†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionLeads {
    gamma_l0: f64,
    gamma_r0: f64,
    delta_l: f64,
    delta_r: f64,
    eps_l: f64,
    eps_r: f64,
    bias: Bias,
}

impl FermionLeads {
    pub fn new(
        gamma_l0: f64,
        gamma_r0: f64,
        delta_l: f64,
        delta_r: f64,
        eps_l: f64,
        eps_r: f64,
    ) -> Result<Self> {
        for (name, v) in [("Gamma_L0", gamma_l0), ("Gamma_R0", gamma_r0)] {
            if !(v >= 0.0 && v.is_finite()) {
                return domain(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        for (name, v) in [("delta_L", delta_l), ("delta_R", delta_r)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive, got {v}"));
            }
        }
        if !eps_l.is_finite() || !eps_r.is_finite() {
            return domain("lead energies must be finite");
        }
        Ok(Self {
            gamma_l0,
            gamma_r0,
            delta_l,
            delta_r,
            eps_l,
            eps_r,
            bias: Bias::Infinite,
        })
    }

    pub fn bias(&self) -> Bias {
        self.bias
    }

    pub fn amplitude(&self, lead: Lead) -> f64 {
        match lead {
            Lead::Left => self.gamma_l0,
            Lead::Right => self.gamma_r0,
        }
    }

    pub fn width(&self, lead: Lead) -> f64 {
        match lead {
            Lead::Left => self.delta_l,
            Lead::Right => self.delta_r,
        }
    }

    pub fn center(&self, lead: Lead) -> f64 {
        match lead {
            Lead::Left => self.eps_l,
            Lead::Right => self.eps_r,
        }
    }

    /// `Γ_a(ω) = Γ_a^0 δ_a² / ((ω − ε_a)² + δ_a²)`.
    pub fn tunneling_rate(&self, lead: Lead, omega: f64) -> f64 {
        let (g, d, e) = (self.amplitude(lead), self.width(lead), self.center(lead));
        g * d * d / ((omega - e).powi(2) + d * d)
    }

    /// `C_a(t) = (Γ_a^0 δ_a / 2) e^{−δ_a |t| + i ε_a t}`.
    pub fn lead_correlation(&self, lead: Lead, t: f64) -> C64 {
        let (g, d, e) = (self.amplitude(lead), self.width(lead), self.center(lead));
        0.5 * g * d * C64::new(-d * t.abs(), e * t).exp()
    }

    /// `(1/2π) P∫ Γ_a(ν)/(ω − ν) dν`.
    fn lead_principal_part(&self, lead: Lead, omega: f64) -> f64 {
        let (g, d, e) = (self.amplitude(lead), self.width(lead), self.center(lead));
        0.5 * g * d * (omega - e) / ((omega - e).powi(2) + d * d)
    }

    /// Contraction of primitive operators `p` at `t1` and `q` at `t2`.
    fn contraction(&self, p: usize, q: usize, t1: f64, t2: f64) -> C64 {
        match (p, q) {
            (0, 1) => self.lead_correlation(Lead::Left, t1 - t2),
            (1, 0) => self.lead_correlation(Lead::Right, t2 - t1),
            _ => ZERO,
        }
    }

    fn correlate(&self, prims: &[usize], t: &[f64]) -> C64 {
        match prims.len() {
            2 => self.contraction(prims[0], prims[1], t[0], t[1]),
            4 => {
                let balanced = prims.iter().filter(|&&p| p == 0).count() == 2;
                if !balanced {
                    log::debug!("fermionic pattern {prims:?} is not number conserving");
                    return ZERO;
                }
                let c = |i: usize, j: usize| self.contraction(prims[i], prims[j], t[i], t[j]);
                c(0, 1) * c(2, 3) - c(0, 2) * c(1, 3) + c(0, 3) * c(1, 2)
            }
            _ => ZERO,
        }
    }
}

/// One of the three analytic reservoirs.
#[derive(Debug, Clone, PartialEq)]
pub enum BathModel {
    TwoSpin(TwoSpinBath),
    Bosonic(BosonicBath),
    Fermion(FermionLeads),
}

/// Which bath operator enters a correlation function, and whether it is
/// taken as its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorrelationIndex {
    pub op_index: usize,
    pub conjugated: bool,
}

impl CorrelationIndex {
    pub const fn new(op_index: usize) -> Self {
        Self {
            op_index,
            conjugated: false,
        }
    }

    pub const fn conj(op_index: usize) -> Self {
        Self {
            op_index,
            conjugated: true,
        }
    }

    pub const fn adjoint(self) -> Self {
        Self {
            op_index: self.op_index,
            conjugated: !self.conjugated,
        }
    }
}

/// Linear combination of bath operators, `Σ_k c_k B_{i_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathOp {
    terms: Vec<(C64, CorrelationIndex)>,
}

impl BathOp {
    pub fn single(op_index: usize) -> Self {
        Self {
            terms: vec![(ONE, CorrelationIndex::new(op_index))],
        }
    }

    pub fn from_terms(terms: Vec<(C64, CorrelationIndex)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(C64, CorrelationIndex)] {
        &self.terms
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(c, i)| (c.conj(), i.adjoint()))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, i)| (c * s, i)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }
}

impl BathModel {
    /// Number of distinct bath coupling operators.
    pub fn op_count(&self) -> usize {
        match self {
            BathModel::TwoSpin(b) => b.operators().len(),
            BathModel::Bosonic(_) => 1,
            BathModel::Fermion(_) => 2,
        }
    }

    pub fn check_index(&self, i: CorrelationIndex) -> Result<()> {
        if i.op_index >= self.op_count() {
            return Err(DcgError::Index(format!(
                "bath operator {} requested but the bath has {}",
                i.op_index,
                self.op_count()
            )));
        }
        Ok(())
    }

    /// True when every correlation depends only on time differences.
    pub fn is_stationary(&self) -> bool {
        match self {
            BathModel::TwoSpin(b) => b.rho_b01 == ZERO,
            _ => true,
        }
    }

    /// True when all odd-order correlations vanish identically.
    pub fn odd_orders_vanish(&self) -> bool {
        !matches!(self, BathModel::TwoSpin(_))
    }

    /// General correlation function of order 1 to 4.
    pub fn corr(&self, idx: &[CorrelationIndex], times: &[f64]) -> Result<C64> {
        if idx.is_empty() || idx.len() > 4 {
            return Err(DcgError::UnsupportedOrder(idx.len()));
        }
        if idx.len() != times.len() {
            return Err(DcgError::Argument(
                "one time argument per operator is required".into(),
            ));
        }
        for &i in idx {
            self.check_index(i)?;
        }
        if times.iter().any(|t| !t.is_finite()) {
            return domain("correlation times must be finite");
        }
        Ok(self.corr_unchecked(idx, times, None))
    }

    pub fn corr1(&self, i: CorrelationIndex, t1: f64) -> Result<C64> {
        self.corr(&[i], &[t1])
    }

    pub fn corr2(&self, i: CorrelationIndex, j: CorrelationIndex, t1: f64, t2: f64) -> Result<C64> {
        self.corr(&[i, j], &[t1, t2])
    }

    pub fn corr3(&self, idx: [CorrelationIndex; 3], t: [f64; 3]) -> Result<C64> {
        self.corr(&idx, &t)
    }

    pub fn corr4(&self, idx: [CorrelationIndex; 4], t: [f64; 4]) -> Result<C64> {
        self.corr(&idx, &t)
    }

    /// Correlation of linear combinations, expanded multilinearly.
    pub fn correlate_ops(&self, ops: &[&BathOp], times: &[f64]) -> Result<C64> {
        let mut total = ZERO;
        let mut idx = vec![CorrelationIndex::new(0); ops.len()];
        let mut err = None;
        expand(ops, 0, ONE, &mut idx, &mut |c, idx| match self.corr(idx, times) {
            Ok(v) => total += c * v,
            Err(e) => err = Some(e),
        });
        match err {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }

    fn corr_unchecked(
        &self,
        idx: &[CorrelationIndex],
        t: &[f64],
        table: Option<&ChebyshevTable>,
    ) -> C64 {
        match self {
            BathModel::TwoSpin(b) => b.correlate(idx, t),
            BathModel::Bosonic(b) => {
                let c = |x: f64| match table {
                    Some(tab) if x >= 0.0 => tab.eval(x),
                    Some(tab) => tab.eval(-x).conj(),
                    None => b.correlation(x),
                };
                match idx.len() {
                    2 => c(t[0] - t[1]),
                    4 => {
                        c(t[1] - t[2]) * c(t[0] - t[3])
                            + c(t[0] - t[2]) * c(t[1] - t[3])
                            + c(t[0] - t[1]) * c(t[2] - t[3])
                    }
                    _ => ZERO,
                }
            }
            BathModel::Fermion(f) => {
                let mut prims = [0usize; 4];
                for (p, i) in prims.iter_mut().zip(idx) {
                    *p = if i.conjugated { 1 - i.op_index } else { i.op_index };
                }
                f.correlate(&prims[..idx.len()], t)
            }
        }
    }

    /// Stationary two-point function `c_{ij}(x) = C_{ij}(x, 0)`.
    pub fn two_point(&self, i: CorrelationIndex, j: CorrelationIndex, x: f64) -> Result<C64> {
        if !self.is_stationary() {
            return Err(DcgError::UnsupportedBath(
                "bath state does not commute with the bath Hamiltonian".into(),
            ));
        }
        self.corr2(i, j, x, 0.0)
    }

    /// `J_{ij}(ν) = ∫ c_{ij}(x) e^{−iνx} dx` for stationary continuum baths.
    pub fn spectral_function(&self, i: CorrelationIndex, j: CorrelationIndex, nu: f64) -> Result<C64> {
        self.check_index(i)?;
        self.check_index(j)?;
        match self {
            BathModel::TwoSpin(_) => Err(DcgError::UnsupportedBath(
                "a single bath spin has a discrete spectrum".into(),
            )),
            BathModel::Bosonic(b) => Ok(C64::new(b.spectral_function(nu)?, 0.0)),
            BathModel::Fermion(f) => Ok(C64::new(
                match fermion_pair(i, j) {
                    Some(Lead::Left) => f.tunneling_rate(Lead::Left, nu),
                    Some(Lead::Right) => f.tunneling_rate(Lead::Right, -nu),
                    None => 0.0,
                },
                0.0,
            )),
        }
    }

    /// `h_{ij}(ω) = (1/2π) P∫ J_{ij}(ν)/(ω − ν) dν`.
    pub fn principal_part(&self, i: CorrelationIndex, j: CorrelationIndex, omega: f64) -> Result<C64> {
        self.check_index(i)?;
        self.check_index(j)?;
        match self {
            BathModel::TwoSpin(_) => Err(DcgError::UnsupportedBath(
                "a single bath spin has a discrete spectrum".into(),
            )),
            BathModel::Bosonic(b) => Ok(C64::new(b.principal_part(omega)?, 0.0)),
            BathModel::Fermion(f) => Ok(C64::new(
                match fermion_pair(i, j) {
                    Some(Lead::Left) => f.lead_principal_part(Lead::Left, omega),
                    Some(Lead::Right) => -f.lead_principal_part(Lead::Right, -omega),
                    None => 0.0,
                },
                0.0,
            )),
        }
    }

    /// `∫_0^∞ c_{ij}(x) e^{iωx} dx`.
    pub fn one_sided_transform(&self, i: CorrelationIndex, j: CorrelationIndex, omega: f64) -> Result<C64> {
        let jv = self.spectral_function(i, j, -omega)?;
        let h = self.principal_part(i, j, -omega)?;
        Ok(0.5 * jv - C64::new(0.0, 1.0) * h)
    }

    /// `∫_0^∞ c_{ij}(−x) e^{iωx} dx`.
    pub fn one_sided_transform_reversed(
        &self,
        i: CorrelationIndex,
        j: CorrelationIndex,
        omega: f64,
    ) -> Result<C64> {
        let jv = self.spectral_function(i, j, omega)?;
        let h = self.principal_part(i, j, omega)?;
        Ok(0.5 * jv + C64::new(0.0, 1.0) * h)
    }

    /// Evaluation context for repeated calls with all time arguments in
    /// `[0, tau]`; the bosonic correlation is tabulated once.
    pub fn prepared(&self, tau: f64) -> PreparedBath<'_> {
        let table = match self {
            BathModel::Bosonic(b) => {
                let scale = b.correlation(0.0).norm().max(f64::MIN_POSITIVE);
                let f = |x: f64| b.correlation(x);
                Some(ChebyshevTable::build(&f, 0.0, tau.max(1e-12), 1e-15 * scale))
            }
            _ => None,
        };
        let spin = match self {
            BathModel::TwoSpin(b) => Some(SpinCache::new(b)),
            _ => None,
        };
        PreparedBath { bath: self, table, spin }
    }
}

fn fermion_pair(i: CorrelationIndex, j: CorrelationIndex) -> Option<Lead> {
    let p = |c: CorrelationIndex| if c.conjugated { 1 - c.op_index } else { c.op_index };
    match (p(i), p(j)) {
        (0, 1) => Some(Lead::Left),
        (1, 0) => Some(Lead::Right),
        _ => None,
    }
}

fn expand(
    ops: &[&BathOp],
    pos: usize,
    coef: C64,
    idx: &mut Vec<CorrelationIndex>,
    f: &mut dyn FnMut(C64, &[CorrelationIndex]),
) {
    if pos == ops.len() {
        f(coef, idx);
        return;
    }
    for &(c, i) in ops[pos].terms() {
        idx[pos] = i;
        expand(ops, pos + 1, coef * c, idx, f);
    }
}

/// A bath bound to a maximal time range, for hot quadrature loops.
#[derive(Debug, Clone)]
pub struct PreparedBath<'a> {
    bath: &'a BathModel,
    table: Option<ChebyshevTable>,
    spin: Option<SpinCache>,
}

/// Bath spin operators and state as fixed 2x2 arrays.
#[derive(Debug, Clone)]
struct SpinCache {
    // entry 2k holds B_k, entry 2k + 1 holds B_k^†
    ops: Vec<[C64; 4]>,
    omega: f64,
    rho: [C64; 4],
}

impl SpinCache {
    fn new(b: &TwoSpinBath) -> Self {
        let flat = |m: &ComplexMatrix| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
        let ops = b
            .operators()
            .iter()
            .flat_map(|m| [flat(m), flat(&m.adjoint())])
            .collect();
        Self {
            ops,
            omega: b.omega,
            rho: flat(&b.initial_state()),
        }
    }

    fn correlate(&self, idx: &[CorrelationIndex], t: &[f64]) -> C64 {
        let mut m = [ONE, ZERO, ZERO, ONE];
        for (&i, &tk) in idx.iter().zip(t) {
            let o = &self.ops[2 * i.op_index + i.conjugated as usize];
            // energies (+Ω, −Ω): only off-diagonal entries rotate
            let p = C64::from_polar(1.0, 2.0 * self.omega * tk);
            let (o01, o10) = (o[1] * p, o[2] * p.conj());
            m = [
                m[0] * o[0] + m[1] * o10,
                m[0] * o01 + m[1] * o[3],
                m[2] * o[0] + m[3] * o10,
                m[2] * o01 + m[3] * o[3],
            ];
        }
        let r = &self.rho;
        m[0] * r[0] + m[1] * r[2] + m[2] * r[1] + m[3] * r[3]
    }
}

impl PreparedBath<'_> {
    pub fn bath(&self) -> &BathModel {
        self.bath
    }

    /// Correlation without index validation; indices must be in range.
    pub fn corr(&self, idx: &[CorrelationIndex], t: &[f64]) -> C64 {
        if let Some(spin) = &self.spin {
            return spin.correlate(idx, t);
        }
        self.bath.corr_unchecked(idx, t, self.table.as_ref())
    }
}

/// `G(ω)` of a bosonic bath.
pub fn spectral_density(bath: &BosonicBath, omega: f64) -> Result<f64> {
    bath.spectral_density(omega)
}

/// `Γ_a(ω)` of the fermionic leads.
pub fn tunneling_rate(leads: &FermionLeads, lead: Lead, omega: f64) -> f64 {
    leads.tunneling_rate(lead, omega)
}
