//! The coarse-graining engine: perturbative propagators `T_n`, the
//! order-by-order Liouvillians `L_n`, propagation, and the Markov limit.

mod bms;
mod simplex;
mod stationary;

use crate::bath_correlations::{BathModel, BathOp, CorrelationIndex, PreparedBath};
use crate::error::{domain, DcgError, Result};
use crate::quantum_core::{
    hermitian_eigen, vectorize, devectorize, ComplexMatrix, DensityMatrix, Superoperator,
    Tolerances, C64, ONE, ZERO,
};

pub use bms::bms_liouvillian;

/// `t < MIN_TAU` is propagated with `tau = MIN_TAU`.
pub const MIN_TAU: f64 = 1e-6;

/// One term `A ⊗ B` of the interaction Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub system: ComplexMatrix,
    pub bath: BathOp,
}

impl Coupling {
    /// `A ⊗ B_index`.
    pub fn new(system: ComplexMatrix, bath_index: usize) -> Self {
        Self {
            system,
            bath: BathOp::single(bath_index),
        }
    }

    pub fn with_bath_op(system: ComplexMatrix, bath: BathOp) -> Self {
        Self { system, bath }
    }
}

/// System Hamiltonian, coupling list and coupling strength.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    hamiltonian: ComplexMatrix,
    couplings: Vec<Coupling>,
    lambda: f64,
}

impl SystemSpec {
    pub fn new(hamiltonian: ComplexMatrix, couplings: Vec<Coupling>, lambda: f64) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(DcgError::Dimension("system Hamiltonian must be square".into()));
        }
        if !hamiltonian.is_finite() || !hamiltonian.is_hermitian(1e-10) {
            return domain("system Hamiltonian must be finite and Hermitian");
        }
        if couplings.is_empty() {
            return Err(DcgError::Argument("at least one coupling is required".into()));
        }
        let d = hamiltonian.rows();
        for (k, c) in couplings.iter().enumerate() {
            if c.system.rows() != d || c.system.cols() != d {
                return Err(DcgError::Dimension(format!(
                    "coupling {k} is {}x{}, system dimension is {d}",
                    c.system.rows(),
                    c.system.cols()
                )));
            }
            if c.bath.terms().is_empty() {
                return Err(DcgError::Argument(format!("coupling {k} has an empty bath operator")));
            }
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return domain(format!("coupling strength must be finite and non-negative, got {lambda}"));
        }
        Ok(Self {
            hamiltonian,
            couplings,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), self.couplings.clone(), lambda)
    }

    /// Checks every bath index against the bath's operator count.
    pub fn check_bath(&self, bath: &BathModel) -> Result<()> {
        for c in &self.couplings {
            for &(_, i) in c.bath.terms() {
                bath.check_index(i)?;
            }
        }
        Ok(())
    }

    /// Rewrites `Σ A ⊗ B` (assumed Hermitian as a whole) with Hermitian
    /// system and bath operators: `Σ (X ⊗ P − Y ⊗ Q)` where
    /// `A = X + iY`, `B = P + iQ`. Zero system parts are dropped.
    pub fn hermitian_split(&self) -> Result<Self> {
        let mut out = Vec::new();
        let half = C64::new(0.5, 0.0);
        let minus_half_i = C64::new(0.0, -0.5);
        for c in &self.couplings {
            let a = &c.system;
            let x = a.hermitian_part();
            let y = (a - &a.adjoint()).scale(minus_half_i);
            let b = &c.bath;
            let p = b.scale(half).plus(&b.adjoint().scale(half));
            let q = b.scale(minus_half_i).plus(&b.adjoint().scale(-minus_half_i));
            if x.max_abs() > 0.0 {
                out.push(Coupling::with_bath_op(x, p));
            }
            if y.max_abs() > 0.0 {
                out.push(Coupling::with_bath_op(-&y, q));
            }
        }
        Self::new(self.hamiltonian.clone(), out, self.lambda)
    }

    /// True when every system coupling operator is Hermitian.
    pub fn has_hermitian_couplings(&self) -> bool {
        self.couplings.iter().all(|c| c.system.is_hermitian(1e-12))
    }
}

/// Quadrature settings for the time-ordered integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per axis and panel for one- and two-fold integrals.
    pub nodes_2d: usize,
    pub nodes_3d: usize,
    pub nodes_4d: usize,
    /// Absolute tolerance of the adaptive second-order path.
    pub tol: f64,
    /// Maximal panel width per dimension.
    pub panel_2d: f64,
    pub panel_3d: f64,
    pub panel_4d: f64,
    /// Reduce stationary second-order integrals to one dimension.
    pub stationary_fast_path: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_2d: 32,
            nodes_3d: 16,
            nodes_4d: 10,
            tol: 1e-10,
            panel_2d: 4.0,
            panel_3d: 2.0,
            panel_4d: 1.25,
            stationary_fast_path: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_2d < 4 || self.nodes_3d < 4 || self.nodes_4d < 4 {
            return Err(DcgError::Argument("quadrature needs at least 4 nodes per axis".into()));
        }
        if !(self.tol > 0.0) {
            return Err(DcgError::Argument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.panel_2d > 0.0 && self.panel_3d > 0.0 && self.panel_4d > 0.0) {
            return Err(DcgError::Argument("panel widths must be positive".into()));
        }
        Ok(())
    }

    fn nodes(&self, n: usize) -> usize {
        match n {
            1 | 2 => self.nodes_2d,
            3 => self.nodes_3d,
            _ => self.nodes_4d,
        }
    }

    fn panel(&self, n: usize) -> f64 {
        match n {
            1 | 2 => self.panel_2d,
            3 => self.panel_3d,
            _ => self.panel_4d,
        }
    }
}

/// `L^τ = Σ λⁿ L_n^τ` together with its components.
#[derive(Debug, Clone)]
pub struct GrainedGenerator {
    tau: f64,
    order: usize,
    components: Vec<Superoperator>,
    assembled: Superoperator,
}

impl GrainedGenerator {
    pub fn build(
        sys: &SystemSpec,
        bath: &BathModel,
        order: usize,
        tau: f64,
        q: &QuadratureConfig,
    ) -> Result<Self> {
        let ts = compute_t_list(order, tau, sys, bath, q)?;
        let components = extract_l(order, tau, &ts)?;
        Ok(Self::from_components(tau, components, sys.lambda()))
    }

    pub fn from_components(tau: f64, components: Vec<Superoperator>, lambda: f64) -> Self {
        let d = components[0].dim();
        let mut assembled = Superoperator::zeros(d);
        let mut power = 1.0;
        for l in &components {
            power *= lambda;
            assembled = assembled.add(&l.scale(power));
        }
        Self {
            tau,
            order: components.len(),
            components,
            assembled,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[Superoperator] {
        &self.components
    }

    pub fn assembled(&self) -> &Superoperator {
        &self.assembled
    }
}

/// `e^{iHt} A e^{−iHt}`.
pub fn interaction_picture_op(h: &ComplexMatrix, a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !h.is_hermitian(1e-10) {
        return domain("interaction picture needs a Hermitian Hamiltonian");
    }
    if a.rows() != h.rows() || a.cols() != h.cols() {
        return Err(DcgError::Dimension("operator and Hamiltonian dimensions differ".into()));
    }
    let (e, v) = hermitian_eigen(h)?;
    let d = h.rows();
    let ae = v.adjoint().matmul(a)?.matmul(&v)?;
    let rotated =
        ComplexMatrix::from_fn(d, d, |x, y| ae[(x, y)] * C64::from_polar(1.0, (e[x] - e[y]) * t));
    v.matmul(&rotated)?.matmul(&v.adjoint())
}

/// System operators in the Hamiltonian eigenbasis, with phase data.
pub(crate) struct Frame {
    pub d: usize,
    pub energies: Vec<f64>,
    pub basis: ComplexMatrix,
    pub ops: Vec<ComplexMatrix>,
}

impl Frame {
    pub fn new(sys: &SystemSpec) -> Result<Self> {
        let (energies, basis) = hermitian_eigen(sys.hamiltonian())?;
        let vd = basis.adjoint();
        let ops = sys
            .couplings()
            .iter()
            .map(|c| vd.mul_unchecked(&c.system).mul_unchecked(&basis))
            .collect();
        Ok(Self {
            d: sys.dim(),
            energies,
            basis,
            ops,
        })
    }

    /// Converts an eigenbasis superoperator back to the original basis.
    pub fn to_original(&self, s: Superoperator) -> Superoperator {
        s.in_basis(&self.basis.adjoint())
    }

    pub fn bohr(&self, x: usize, y: usize) -> f64 {
        self.energies[x] - self.energies[y]
    }
}

/// Correlation of coupling bath operators; `roles[k] = (coupling, adjoint)`.
pub(crate) fn coupling_corr(
    prep: &PreparedBath<'_>,
    sys: &SystemSpec,
    roles: &[(usize, bool)],
    times: &[f64],
) -> C64 {
    fn rec(
        prep: &PreparedBath<'_>,
        sys: &SystemSpec,
        roles: &[(usize, bool)],
        times: &[f64],
        pos: usize,
        coef: C64,
        idx: &mut [CorrelationIndex; 4],
    ) -> C64 {
        if pos == roles.len() {
            return coef * prep.corr(&idx[..roles.len()], times);
        }
        let (c, adj) = roles[pos];
        let mut sum = ZERO;
        for &(k, i) in sys.couplings()[c].bath.terms() {
            let (k, i) = if adj { (k.conj(), i.adjoint()) } else { (k, i) };
            idx[pos] = i;
            sum += rec(prep, sys, roles, times, pos + 1, coef * k, idx);
        }
        sum
    }
    let mut idx = [CorrelationIndex::new(0); 4];
    rec(prep, sys, roles, times, 0, ONE, &mut idx)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("coarse-graining time must be positive, got {tau}"));
    }
    Ok(())
}

/// The n-th order propagator term `T_n^τ` (without `λⁿ`).
pub fn compute_t(
    n: usize,
    tau: f64,
    sys: &SystemSpec,
    bath: &BathModel,
    q: &QuadratureConfig,
) -> Result<Superoperator> {
    if n == 0 || n > 4 {
        return Err(DcgError::UnsupportedOrder(n));
    }
    check_tau(tau)?;
    q.validate()?;
    sys.check_bath(bath)?;
    let frame = Frame::new(sys)?;
    let prep = bath.prepared(tau);
    term_in_frame(n, tau, sys, bath, &frame, &prep, q).map(|s| frame.to_original(s))
}

/// `T_1^τ, ..., T_n^τ` sharing one eigen-decomposition and bath table.
pub fn compute_t_list(
    n: usize,
    tau: f64,
    sys: &SystemSpec,
    bath: &BathModel,
    q: &QuadratureConfig,
) -> Result<Vec<Superoperator>> {
    if n == 0 || n > 4 {
        return Err(DcgError::UnsupportedOrder(n));
    }
    check_tau(tau)?;
    q.validate()?;
    sys.check_bath(bath)?;
    let frame = Frame::new(sys)?;
    let prep = bath.prepared(tau);
    (1..=n)
        .map(|k| term_in_frame(k, tau, sys, bath, &frame, &prep, q).map(|s| frame.to_original(s)))
        .collect()
}

fn term_in_frame(
    n: usize,
    tau: f64,
    sys: &SystemSpec,
    bath: &BathModel,
    frame: &Frame,
    prep: &PreparedBath<'_>,
    q: &QuadratureConfig,
) -> Result<Superoperator> {
    if n % 2 == 1 && bath.odd_orders_vanish() {
        return Ok(Superoperator::zeros(frame.d));
    }
    if n == 2 && q.stationary_fast_path && bath.is_stationary() {
        return stationary::second_order(tau, sys, frame, prep, q.tol);
    }
    Ok(simplex::term(n, tau, sys, frame, prep, q))
}

/// Solves the order-matching conditions for `L_1^τ, ..., L_n^τ`.
pub fn extract_l(n: usize, tau: f64, ts: &[Superoperator]) -> Result<Vec<Superoperator>> {
    if n == 0 || n > 4 {
        return Err(DcgError::UnsupportedOrder(n));
    }
    check_tau(tau)?;
    if ts.len() < n {
        return Err(DcgError::Argument(format!(
            "order {n} needs T_1..T_{n}, got {} terms",
            ts.len()
        )));
    }
    let m = |a: &Superoperator, b: &Superoperator| a.then_after(b);
    let t2 = tau * tau / 2.0;
    let t3 = tau * tau * tau / 6.0;
    let t4 = tau.powi(4) / 24.0;
    let inv = 1.0 / tau;
    let mut out: Vec<Superoperator> = Vec::with_capacity(n);
    let l1 = ts[0].scale(inv);
    out.push(l1.clone());
    if n >= 2 {
        let l2 = ts[1].sub(&m(&l1, &l1).scale(t2)).scale(inv);
        out.push(l2);
    }
    if n >= 3 {
        let (l1, l2) = (&out[0], &out[1]);
        let counter = m(l1, l2)
            .add(&m(l2, l1))
            .scale(t2)
            .add(&m(&m(l1, l1), l1).scale(t3));
        out.push(ts[2].sub(&counter).scale(inv));
    }
    if n >= 4 {
        let (l1, l2, l3) = (&out[0], &out[1], &out[2]);
        let l11 = m(l1, l1);
        let counter = m(l1, l3)
            .add(&m(l2, l2))
            .add(&m(l3, l1))
            .scale(t2)
            .add(&m(&l11, l2).add(&m(&m(l1, l2), l1)).add(&m(&m(l2, l1), l1)).scale(t3))
            .add(&m(&l11, &l11).scale(t4));
        out.push(ts[3].sub(&counter).scale(inv));
    }
    Ok(out)
}

/// `ρ̄(t) = e^{L^t t} ρ_0` on a grid, with `L^t` built at `τ = t`.
pub fn dcg_propagate(
    sys: &SystemSpec,
    bath: &BathModel,
    order: usize,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    q: &QuadratureConfig,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != sys.dim() {
        return Err(DcgError::Dimension("initial state and system dimension differ".into()));
    }
    if t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return domain("time grid must be finite and non-negative");
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(DcgError::Argument("time grid must be sorted".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(rho0.clone());
            }
            let g = GrainedGenerator::build(sys, bath, order, t.max(MIN_TAU), q)?;
            evolve(g.assembled(), rho0, t)
        })
        .collect()
}

/// `e^{L t} ρ_0` with a trace gate.
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let prop = l.exp(t)?;
    let v = vectorize(rho0.matrix());
    let n = v.len();
    let out: Vec<C64> = (0..n)
        .map(|i| (0..n).map(|j| prop.matrix()[(i, j)] * v[j]).sum())
        .collect();
    let m = devectorize(&out)?;
    finish_state(m)
}

pub(crate) fn finish_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_finite() {
        return Err(DcgError::Numerical("propagated state is not finite".into()));
    }
    let dev = (m.trace() - ONE).norm();
    if dev > 1e-6 {
        return Err(DcgError::Numerical(format!(
            "propagated state has trace deviation {dev:.3e}"
        )));
    }
    let herm = m.hermiticity_defect();
    if herm > 1e-6 {
        return Err(DcgError::Numerical(format!(
            "propagated state is not Hermitian (defect {herm:.3e})"
        )));
    }
    let tol = Tolerances {
        hermiticity: 1e-6,
        trace: 1e-6,
        ..Tolerances::default()
    };
    DensityMatrix::with_tolerances(m, &tol)
}

/// The five-term step-function combination that vanishes identically,
/// evaluated with `Θ(0) = 1/2`.
pub fn heaviside_identity_check(t: [f64; 4]) -> f64 {
    let th = |x: f64| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            0.0
        } else {
            0.5
        }
    };
    let [t1, t2, t3, t4] = t;
    th(t4 - t3) * th(t3 - t2) * th(t2 - t1) + th(t3 - t4) * th(t2 - t1)
        + th(t1 - t2) * th(t2 - t3) * th(t3 - t4)
        - th(t2 - t3) * th(t3 - t4)
        - th(t3 - t2) * th(t2 - t1)
}

#[cfg(test)]
mod tests;
