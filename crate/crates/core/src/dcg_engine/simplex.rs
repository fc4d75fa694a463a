//! `T_n` by quadrature over the ordered simplex `τ > u_1 > ... > u_n > 0`.
//!
//! Every point of the simplex is split into left and right operator times
//! by a bit mask: set bits go to the left of ρ in descending time order,
//! clear bits to the right in ascending time order. Summing all masks
//! covers the product of the left and right time-ordered domains, and
//! every coincidence `t_i = s_j` lies on a cell boundary.

use super::{coupling_corr, Frame, QuadratureConfig, SystemSpec};
use crate::bath_correlations::PreparedBath;
use crate::quadrature::PanelledSimplexRule;
use crate::quantum_core::{ComplexMatrix, Superoperator, C64, I, ONE, ZERO};

pub(super) fn term(
    n: usize,
    tau: f64,
    sys: &SystemSpec,
    frame: &Frame,
    prep: &PreparedBath<'_>,
    q: &QuadratureConfig,
) -> Superoperator {
    let d = frame.d;
    let d2 = d * d;
    let nc = frame.ops.len();
    let rule = PanelledSimplexRule::new(n, tau, q.nodes(n), q.panel(n));

    let mut acc = vec![ZERO; d2 * d2];
    // op[j * nc + c] and adj[j * nc + c] hold coupling c at time u_j
    let mut op = vec![vec![ZERO; d2]; n * nc];
    let mut adj = vec![vec![ZERO; d2]; n * nc];
    let mut phase = vec![ZERO; d];
    let mut left = vec![ZERO; d2];
    let mut right = vec![ZERO; d2];
    let mut tmp = vec![ZERO; d2];
    let tuples = nc.pow(n as u32);
    let mut roles = [(0usize, false); 4];
    let mut times = [0.0; 4];
    let mut digits = [0usize; 4];

    let masks: Vec<(u32, C64)> = (0..1u32 << n)
        .map(|mask| {
            let k = mask.count_ones() as i32;
            (mask, (-I).powi(k) * I.powi(n as i32 - k))
        })
        .collect();

    rule.for_each(|u, w| {
        for j in 0..n {
            for (x, p) in phase.iter_mut().enumerate() {
                *p = C64::from_polar(1.0, frame.energies[x] * u[j]);
            }
            for c in 0..nc {
                let a = &frame.ops[c];
                let o = &mut op[j * nc + c];
                for x in 0..d {
                    for y in 0..d {
                        o[x * d + y] = a[(x, y)] * phase[x] * phase[y].conj();
                    }
                }
                let o = op[j * nc + c].clone();
                let h = &mut adj[j * nc + c];
                for x in 0..d {
                    for y in 0..d {
                        h[x * d + y] = o[y * d + x].conj();
                    }
                }
            }
        }
        for &(mask, sign) in &masks {
            for t in 0..tuples {
                let mut rem = t;
                for dgt in digits.iter_mut().take(n) {
                    *dgt = rem % nc;
                    rem /= nc;
                }
                // correlator order: right operators by ascending time, then left
                let mut pos = 0;
                for j in (0..n).rev() {
                    if mask & (1 << j) == 0 {
                        roles[pos] = (digits[j], true);
                        times[pos] = u[j];
                        pos += 1;
                    }
                }
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        roles[pos] = (digits[j], false);
                        times[pos] = u[j];
                        pos += 1;
                    }
                }
                let corr = coupling_corr(prep, sys, &roles[..n], &times[..n]);
                if corr == ZERO {
                    continue;
                }
                set_identity(&mut left, d);
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        mul_assign(&mut left, &op[j * nc + digits[j]], &mut tmp, d);
                    }
                }
                set_identity(&mut right, d);
                for j in (0..n).rev() {
                    if mask & (1 << j) == 0 {
                        mul_assign(&mut right, &adj[j * nc + digits[j]], &mut tmp, d);
                    }
                }
                let coef = sign * corr * w;
                accumulate(&mut acc, &left, &right, coef, d);
            }
        }
    });

    let m = ComplexMatrix::from_vec(d2, d2, acc).expect("d² x d²");
    Superoperator::from_matrix(m).expect("square")
}

fn set_identity(m: &mut [C64], d: usize) {
    m.fill(ZERO);
    for x in 0..d {
        m[x * d + x] = ONE;
    }
}

fn mul_assign(m: &mut [C64], rhs: &[C64], tmp: &mut [C64], d: usize) {
    for x in 0..d {
        for y in 0..d {
            let mut s = ZERO;
            for z in 0..d {
                s += m[x * d + z] * rhs[z * d + y];
            }
            tmp[x * d + y] = s;
        }
    }
    m.copy_from_slice(tmp);
}

/// Adds `coef · (left ⊗ rightᵀ)` to the row-major `d² x d²` buffer.
pub(super) fn accumulate(acc: &mut [C64], left: &[C64], right: &[C64], coef: C64, d: usize) {
    let d2 = d * d;
    for a in 0..d {
        for c in 0..d {
            let l = left[a * d + c];
            if l == ZERO {
                continue;
            }
            let lc = coef * l;
            for b in 0..d {
                let row = (a * d + b) * d2 + c * d;
                for e in 0..d {
                    acc[row + e] += lc * right[e * d + b];
                }
            }
        }
    }
}
