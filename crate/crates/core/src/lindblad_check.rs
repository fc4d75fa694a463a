//! Second-order dampening matrix and Lamb shifts, positivity certificates,
//! and the split of a generator into Hamiltonian and dissipator.
//!
//! Matrices over pairs `(a, b)` use the flat index `a·d + b`, so the jump
//! operator `L_ab = |a⟩⟨b|` sits at position `a·d + b`.

use crate::bath_correlations::BathModel;
use crate::dcg_engine::{coupling_corr, Frame, QuadratureConfig, SystemSpec};
use crate::error::{domain, DcgError, Result};
use crate::quadrature::{gauss_legendre_unit, PanelledSimplexRule};
use crate::quantum_core::{
    hermitian_eigen, ComplexMatrix, Superoperator, C64, I, ONE, ZERO,
};

/// Rate matrix `γ_{ab,cd}` of the second-order dissipator, per `λ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampeningMatrix {
    dim: usize,
    tau: f64,
    matrix: ComplexMatrix,
}

impl DampeningMatrix {
    /// Wraps a `d² x d²` matrix.
    pub fn new(matrix: ComplexMatrix, tau: f64) -> Result<Self> {
        let n = matrix.rows();
        let dim = (n as f64).sqrt().round() as usize;
        if !matrix.is_square() || dim * dim != n || dim == 0 {
            return Err(DcgError::Dimension("dampening matrix must be d² x d²".into()));
        }
        Ok(Self { dim, tau, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `γ_{ab,cd}`.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let n = self.dim;
        self.matrix[(a * n + b, c * n + d)]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            tau: self.tau,
            matrix: self.matrix.scale_real(s),
        }
    }
}

/// Effective Hamiltonian of order one (per `λ`) or two (per `λ²`).
#[derive(Debug, Clone, PartialEq)]
pub struct LambShift {
    pub order: usize,
    pub tau: f64,
    pub h_eff: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub min_eig: f64,
    pub is_psd: bool,
    pub gershgorin_pass: bool,
}

/// `L = −i[H, ·] + D_γ` with traceless `H` and `γ` free of identity
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParts {
    pub hamiltonian: ComplexMatrix,
    pub gamma: ComplexMatrix,
}

/// Nodes and weights of a panelled Gauss–Legendre rule on `[0, tau]`.
fn line_rule(tau: f64, q: &QuadratureConfig) -> (Vec<f64>, Vec<f64>) {
    let panels = ((tau / q.panel_2d).ceil() as usize).max(1);
    let h = tau / panels as f64;
    let (x, w) = gauss_legendre_unit(q.nodes_2d);
    let mut nodes = Vec::with_capacity(panels * x.len());
    let mut weights = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(h * (p as f64 + xi));
            weights.push(h * wi);
        }
    }
    (nodes, weights)
}

/// Coupling operators at time `t`, in the original basis.
fn rotated_ops(frame: &Frame, t: f64) -> Vec<ComplexMatrix> {
    let d = frame.d;
    let v = &frame.basis;
    let vd = v.adjoint();
    frame
        .ops
        .iter()
        .map(|a| {
            let r = ComplexMatrix::from_fn(d, d, |x, y| {
                a[(x, y)] * C64::from_polar(1.0, frame.bohr(x, y) * t)
            });
            v.mul_unchecked(&r).mul_unchecked(&vd)
        })
        .collect()
}

fn check_inputs(tau: f64, sys: &SystemSpec, bath: &BathModel, q: &QuadratureConfig) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("coarse-graining time must be positive, got {tau}"));
    }
    q.validate()?;
    sys.check_bath(bath)?;
    if !sys.has_hermitian_couplings() {
        return domain("couplings must be Hermitian; split them first");
    }
    Ok(())
}

/// `γ_{ab,cd} = (1/τ) Σ ∫∫ [C_{αβ}(t1,t2) − C_α(t1)C_β(t2)] ⟨a|A_β(t2)|b⟩ ⟨c|A_α(t1)|d⟩*`.
///
/// Both axes share one Gauss–Legendre rule, so the quadrature is itself a
/// Gram form and stays positive semidefinite.
pub fn dampening_matrix(
    tau: f64,
    sys: &SystemSpec,
    bath: &BathModel,
    q: &QuadratureConfig,
) -> Result<DampeningMatrix> {
    check_inputs(tau, sys, bath, q)?;
    let frame = Frame::new(sys)?;
    let prep = bath.prepared(tau);
    let d = frame.d;
    let d2 = d * d;
    let nc = frame.ops.len();
    let (t, w) = line_rule(tau, q);
    let n = t.len();
    let ops: Vec<Vec<ComplexMatrix>> = t.iter().map(|&ti| rotated_ops(&frame, ti)).collect();
    let first: Vec<Vec<C64>> = t
        .iter()
        .map(|&ti| {
            (0..nc)
                .map(|c| coupling_corr(&prep, sys, &[(c, true)], &[ti]))
                .collect()
        })
        .collect();

    let mut acc = vec![ZERO; d2 * d2];
    let mut z = vec![ZERO; d2];
    for al in 0..nc {
        for be in 0..nc {
            let first_be: Vec<C64> = (0..n)
                .map(|j| coupling_corr(&prep, sys, &[(be, false)], &[t[j]]))
                .collect();
            for j in 0..n {
                // z = Σ_i w_i G_ij conj(A_α(t_i))
                z.fill(ZERO);
                for i in 0..n {
                    let g = coupling_corr(&prep, sys, &[(al, true), (be, false)], &[t[i], t[j]])
                        - first[i][al] * first_be[j];
                    if g == ZERO {
                        continue;
                    }
                    let gw = g * w[i];
                    for (zk, a) in z.iter_mut().zip(ops[i][al].as_slice()) {
                        *zk += gw * a.conj();
                    }
                }
                let b = ops[j][be].as_slice();
                for r in 0..d2 {
                    let br = b[r] * w[j] / tau;
                    if br == ZERO {
                        continue;
                    }
                    let row = &mut acc[r * d2..(r + 1) * d2];
                    for (x, zc) in row.iter_mut().zip(&z) {
                        *x += br * zc;
                    }
                }
            }
        }
    }
    let m = ComplexMatrix::from_vec(d2, d2, acc)?;
    DampeningMatrix::new(m.hermitian_part(), tau)
}

/// First order `(1/τ) Σ ∫ C_α(t) A_α(t) dt` (per `λ`) or the
/// sign-weighted second-order double integral (per `λ²`).
pub fn lamb_shift(
    order: usize,
    tau: f64,
    sys: &SystemSpec,
    bath: &BathModel,
    q: &QuadratureConfig,
) -> Result<LambShift> {
    if order != 1 && order != 2 {
        return Err(DcgError::UnsupportedOrder(order));
    }
    check_inputs(tau, sys, bath, q)?;
    let frame = Frame::new(sys)?;
    let prep = bath.prepared(tau);
    let d = frame.d;
    let nc = frame.ops.len();
    let mut h = ComplexMatrix::zeros(d, d);
    if order == 1 {
        let (t, w) = line_rule(tau, q);
        for (&ti, &wi) in t.iter().zip(&w) {
            let ops = rotated_ops(&frame, ti);
            for (c, a) in ops.iter().enumerate() {
                let k = coupling_corr(&prep, sys, &[(c, false)], &[ti]);
                if k != ZERO {
                    h += &a.scale(k * wi / tau);
                }
            }
        }
    } else {
        // t1 > t2 and the mirrored half: sgn = +1 and −1
        let rule = PanelledSimplexRule::new(2, tau, q.nodes_2d, q.panel_2d);
        let coef = ONE / (2.0 * tau * I);
        rule.for_each(|u, wt| {
            let hi = rotated_ops(&frame, u[0]);
            let lo = rotated_ops(&frame, u[1]);
            for al in 0..nc {
                for be in 0..nc {
                    let fwd = coupling_corr(&prep, sys, &[(al, false), (be, false)], &[u[0], u[1]]);
                    let bwd = coupling_corr(&prep, sys, &[(al, false), (be, false)], &[u[1], u[0]]);
                    if fwd != ZERO {
                        h += &hi[al].mul_unchecked(&lo[be]).scale(coef * fwd * wt);
                    }
                    if bwd != ZERO {
                        h += &lo[al].mul_unchecked(&hi[be]).scale(-coef * bwd * wt);
                    }
                }
            }
        });
    }
    Ok(LambShift {
        order,
        tau,
        h_eff: h.hermitian_part(),
    })
}

/// Eigenvalue and Gershgorin tests of `γ ⪰ 0`, relative to its spectral norm.
pub fn certify_psd(gamma: &DampeningMatrix) -> Result<PsdReport> {
    let m = gamma.matrix();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if m.hermiticity_defect() > 1e-10 * scale.max(1.0) {
        return domain("dampening matrix is not Hermitian");
    }
    let (eig, _) = hermitian_eigen(&m.hermitian_part())?;
    let min_eig = eig.first().copied().unwrap_or(0.0);
    let norm = eig.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let thresh = -1e-10 * norm;
    let n = m.rows();
    let gershgorin_pass = (0..n).all(|r| {
        let off: f64 = (0..n).filter(|&c| c != r).map(|c| m[(r, c)].norm()).sum();
        m[(r, r)].re - off >= thresh
    });
    Ok(PsdReport {
        min_eig,
        is_psd: min_eig >= thresh,
        gershgorin_pass,
    })
}

/// `γ_{ab,cd} = M[a·d + c, b·d + e]`: sandwich coefficients from the
/// superoperator matrix, and back.
fn reshuffle(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    out[(a * d + b, c * d + e)] = m[(a * d + c, b * d + e)];
                }
            }
        }
    }
    out
}

/// `−i[H, ·] + Σ γ_{ab,cd} (L_ab ρ L_cd† − ½{L_cd† L_ab, ρ})`.
pub fn assemble(h: &ComplexMatrix, gamma: &ComplexMatrix) -> Result<Superoperator> {
    let d = h.rows();
    if !h.is_square() || gamma.rows() != d * d || gamma.cols() != d * d {
        return Err(DcgError::Dimension("H must be d x d and γ d² x d²".into()));
    }
    // Σ γ L_ab ρ L_cd† is the reshuffled γ
    let sandwich = reshuffle(gamma, d);
    // Σ γ_{ab,cd} L_cd† L_ab = Σ γ_{ab,cb} |d⟩⟨b| with a = c
    let mut k = ComplexMatrix::zeros(d, d);
    for a in 0..d {
        for x in 0..d {
            for y in 0..d {
                k[(x, y)] += gamma[(a * d + y, a * d + x)];
            }
        }
    }
    let id = ComplexMatrix::identity(d);
    let anti = Superoperator::sandwich(&k, &id).add(&Superoperator::sandwich(&id, &k));
    let l = Superoperator::commutator_generator(h)
        .add(&Superoperator::from_matrix(sandwich)?)
        .sub(&anti.scale(0.5));
    Ok(l)
}

/// Inverse of [`assemble`] in the gauge `Tr H = 0`, `γ e = 0` with `e`
/// the identity direction.
pub fn decompose_generator(l: &Superoperator) -> Result<GeneratorParts> {
    let d = l.dim();
    let scale = l.norm().max(1.0);
    let tr = l.trace_defect();
    let herm = l.hermiticity_defect();
    if tr > 1e-8 * scale || herm > 1e-8 * scale {
        return Err(DcgError::MalformedGenerator(format!(
            "trace defect {tr:.3e}, Hermiticity defect {herm:.3e}"
        )));
    }
    let d2 = d * d;
    let c = reshuffle(l.matrix(), d);
    let e: Vec<C64> = (0..d2)
        .map(|i| if i / d == i % d { C64::new(1.0 / (d as f64).sqrt(), 0.0) } else { ZERO })
        .collect();
    let ce: Vec<C64> = (0..d2).map(|i| (0..d2).map(|j| c[(i, j)] * e[j]).sum()).collect();
    let ece: C64 = (0..d2).map(|i| e[i].conj() * ce[i]).sum();
    // K = c_ee/(2d) 1 + (1/√d) Σ (P c e)_i F_i
    let sd = (d as f64).sqrt();
    let mut k = ComplexMatrix::identity(d).scale(ece / (2.0 * d as f64));
    for a in 0..d {
        for b in 0..d {
            let i = a * d + b;
            k[(a, b)] += (ce[i] - e[i] * ece) / sd;
        }
    }
    let mut h = (&k - &k.adjoint()).scale(C64::new(0.0, 0.5));
    let shift = h.trace() / d as f64;
    for a in 0..d {
        h[(a, a)] -= shift;
    }
    let h = h.hermitian_part();

    // γ = P c P
    let mut gamma = c;
    let ct: Vec<C64> = (0..d2).map(|j| (0..d2).map(|i| e[i].conj() * gamma[(i, j)]).sum()).collect();
    for i in 0..d2 {
        for j in 0..d2 {
            gamma[(i, j)] += -ce[i] * e[j].conj() - e[i] * ct[j] + e[i] * ece * e[j].conj();
        }
    }
    Ok(GeneratorParts {
        hamiltonian: h,
        gamma: gamma.hermitian_part(),
    })
}
