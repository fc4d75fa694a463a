//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Superoperators act on row-major vectorized matrices: the element
//! `<a|rho|b>` of a `d x d` matrix sits at index `a * d + b`. Under this
//! convention the map `rho -> L rho R` has the matrix `L ⊗ R^T`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{dimension, domain, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical gates used when validating states and generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-10,
            positivity_floor: -1e-8,
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return dimension("ragged rows");
        }
        Self::from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// `|a><b|` in dimension `n`.
    pub fn basis_op(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(a, b)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(C64::conj).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(&self.matmul(rhs)? - &rhs.matmul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// A validated density matrix: Hermitian, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return dimension("density matrix must be square");
        }
        if !matrix.is_finite() {
            return domain("density matrix has non-finite entries");
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol.hermiticity {
            return domain(format!("density matrix not Hermitian (defect {defect:.3e})"));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol.trace {
            return domain(format!("density matrix trace is {tr}, expected 1"));
        }
        Ok(Self { matrix })
    }

    /// Pure state `|psi><psi|` from an unnormalized vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return domain("state vector has zero or non-finite norm");
        }
        let n = psi.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(m)
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = populations.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(ComplexMatrix::diagonal(&entries))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.matrix[(a, b)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_hermitian(&self.matrix).expect("validated density matrix is Hermitian")
    }
}

/// `exp(a)` by scaling and squaring with a Taylor core.
pub fn matrix_exponential(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return dimension(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    if !a.is_finite() {
        return domain("matrix exponential of non-finite matrix");
    }
    let n = a.rows();
    let norm = a.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=40 {
        term = term.mul_unchecked(&scaled).scale_real(1.0 / k as f64);
        result += &term;
        if term.max_abs() <= f64::EPSILON * 1e-3 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul_unchecked(&result);
    }
    Ok(result)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors. Ties keep the original index order.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return dimension("eigen-decomposition needs a square matrix");
    }
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    if h.hermiticity_defect() > 1e-8 * scale.max(1.0) {
        return domain(format!(
            "matrix is not Hermitian (defect {:.3e})",
            h.hermiticity_defect()
        ));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (zeta * zeta + 1.0).sqrt())
                } else {
                    -1.0 / (-zeta + (zeta * zeta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotation G on the (p, q) plane; A <- G^† A G, V <- V G
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(h: &ComplexMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(h)?;
    Ok(values.first().copied().unwrap_or(0.0))
}

/// Traces out the bath factor of a `system ⊗ bath` operator.
pub fn partial_trace_bath(full: &ComplexMatrix, ds: usize, db: usize) -> Result<ComplexMatrix> {
    if !full.is_square() || full.rows() != ds * db {
        return dimension(format!(
            "operator of size {}x{} does not match {ds} x {db}",
            full.rows(),
            full.cols()
        ));
    }
    Ok(ComplexMatrix::from_fn(ds, ds, |a, b| {
        (0..db).map(|k| full[(a * db + k, b * db + k)]).sum()
    }))
}

/// Reduced state of a density matrix on `system ⊗ bath`.
pub fn reduce_to_system(full: &DensityMatrix, ds: usize, db: usize) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_bath(full.matrix(), ds, db)?)
}

pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    m.as_slice().to_vec()
}

pub fn devectorize(v: &[C64]) -> Result<ComplexMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return dimension(format!("vector length {} is not a perfect square", v.len()));
    }
    ComplexMatrix::from_vec(d, d, v.to_vec())
}

/// Linear map on `d x d` matrices, stored as a `d² x d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        let dim = (n as f64).sqrt().round() as usize;
        if !matrix.is_square() || dim * dim != n {
            return dimension("superoperator matrix must be d² x d²");
        }
        Ok(Self { dim, matrix })
    }

    /// The map `rho -> left · rho · right`.
    pub fn sandwich(left: &ComplexMatrix, right: &ComplexMatrix) -> Self {
        let dim = left.rows();
        Self {
            dim,
            matrix: left.kron(&right.transpose()),
        }
    }

    /// The map `rho -> -i [h, rho]`.
    pub fn commutator_generator(h: &ComplexMatrix) -> Self {
        let d = h.rows();
        let id = ComplexMatrix::identity(d);
        let m = &Self::sandwich(h, &id).matrix - &Self::sandwich(&id, h).matrix;
        Self {
            dim: d,
            matrix: m.scale(-I),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return dimension("state dimension does not match superoperator");
        }
        let v = vectorize(rho);
        let n = self.dim * self.dim;
        let out: Vec<C64> = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect();
        devectorize(&out)
    }

    pub fn compose(&self, after: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: after.matrix.mul_unchecked(&self.matrix),
        }
    }

    /// `self · rhs` as matrices (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        rhs.compose(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix - &rhs.matrix,
        }
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_frobenius()
    }

    /// Change of basis: returns the superoperator of `U^† (L (U rho U^†)) U`.
    pub fn in_basis(&self, u: &ComplexMatrix) -> Self {
        let to = Self::sandwich(&u.adjoint(), u);
        let from = Self::sandwich(u, &u.adjoint());
        Self {
            dim: self.dim,
            matrix: to.matrix.mul_unchecked(&self.matrix.mul_unchecked(&from.matrix)),
        }
    }

    /// Largest `|Tr(L E_ab)|` over the canonical basis.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let tr: C64 = (0..d).map(|a| self.matrix[(a * d + a, col)]).sum();
            worst = worst.max(tr.norm());
        }
        worst
    }

    /// Largest deviation from Hermiticity preservation, `L(X^†) = L(X)^†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let lhs = self.matrix[(a * d + b, c * d + e)];
                        let rhs = self.matrix[(b * d + a, e * d + c)].conj();
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn exp(&self, t: f64) -> Result<Self> {
        Ok(Self {
            dim: self.dim,
            matrix: matrix_exponential(&self.matrix.scale_real(t))?,
        })
    }
}
