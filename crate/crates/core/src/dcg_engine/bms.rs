//! Born–Markov–secular generator, the `τ → ∞` limit of `λ² L_2^τ`.

use super::{Frame, SystemSpec};
use crate::bath_correlations::{BathModel, CorrelationIndex};
use crate::error::{DcgError, Result};
use crate::quantum_core::{ComplexMatrix, Superoperator, C64, ZERO};

use super::simplex::accumulate;

/// Transform of the correlation between two coupling bath operators,
/// expanded over their terms.
fn pair_transform(
    sys: &SystemSpec,
    roles: [(usize, bool); 2],
    f: &dyn Fn(CorrelationIndex, CorrelationIndex) -> Result<C64>,
) -> Result<C64> {
    let terms = |(c, adj): (usize, bool)| -> Vec<(C64, CorrelationIndex)> {
        sys.couplings()[c]
            .bath
            .terms()
            .iter()
            .map(|&(k, i)| if adj { (k.conj(), i.adjoint()) } else { (k, i) })
            .collect()
    };
    let mut sum = ZERO;
    for (k1, i1) in terms(roles[0]) {
        for &(k2, i2) in &terms(roles[1]) {
            sum += k1 * k2 * f(i1, i2)?;
        }
    }
    Ok(sum)
}

/// `λ² L^∞` from the one-sided Fourier transforms of the stationary
/// two-point functions at the Bohr frequencies of `H_S`.
pub fn bms_liouvillian(sys: &SystemSpec, bath: &BathModel) -> Result<Superoperator> {
    if !bath.is_stationary() {
        return Err(DcgError::UnsupportedBath(
            "the Markov limit needs a stationary bath".into(),
        ));
    }
    if matches!(bath, BathModel::TwoSpin(_)) {
        return Err(DcgError::UnsupportedBath(
            "a single bath spin has no continuous spectrum".into(),
        ));
    }
    sys.check_bath(bath)?;
    let frame = Frame::new(sys)?;
    let d = frame.d;
    let d2 = d * d;
    let scale = 1.0 + frame.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-9 * scale;

    let mut freqs: Vec<f64> = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let w = frame.bohr(a, b);
            if !freqs.iter().any(|&f| same(f, w)) {
                freqs.push(w);
            }
        }
    }
    let component = |op: &ComplexMatrix, w: f64| {
        ComplexMatrix::from_fn(d, d, |a, b| if same(frame.bohr(a, b), w) { op[(a, b)] } else { ZERO })
    };
    let nc = frame.ops.len();
    let mut acc = vec![ZERO; d2 * d2];
    let id = ComplexMatrix::identity(d);
    for &w in &freqs {
        let plus: Vec<ComplexMatrix> = frame.ops.iter().map(|a| component(a, w)).collect();
        let minus: Vec<ComplexMatrix> = frame.ops.iter().map(|a| component(a, -w)).collect();
        for al in 0..nc {
            for be in 0..nc {
                let lp = plus[al].mul_unchecked(&minus[be]);
                if lp.max_abs() > 0.0 {
                    let g = pair_transform(sys, [(al, false), (be, false)], &|i, j| {
                        bath.one_sided_transform(i, j, w)
                    })?;
                    accumulate(&mut acc, lp.as_slice(), id.as_slice(), -g, d);
                }
                let rp = plus[al].adjoint().mul_unchecked(&minus[be].adjoint());
                if rp.max_abs() > 0.0 {
                    let g = pair_transform(sys, [(al, true), (be, true)], &|i, j| {
                        bath.one_sided_transform_reversed(i, j, w)
                    })?;
                    accumulate(&mut acc, id.as_slice(), rp.as_slice(), -g, d);
                }
                let l = &plus[be];
                let r = plus[al].adjoint();
                if l.max_abs() > 0.0 && r.max_abs() > 0.0 {
                    let j = pair_transform(sys, [(al, true), (be, false)], &|i, j| {
                        bath.spectral_function(i, j, w)
                    })?;
                    accumulate(&mut acc, l.as_slice(), r.as_slice(), j, d);
                }
            }
        }
    }
    let m = ComplexMatrix::from_vec(d2, d2, acc).expect("d² x d²");
    let l = frame.to_original(Superoperator::from_matrix(m).expect("square"));
    let lam2 = sys.lambda() * sys.lambda();
    Ok(l.scale(lam2))
}
