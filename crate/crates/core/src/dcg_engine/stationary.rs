//! Second-order term for stationary baths, reduced to one-dimensional
//! integrals over the time difference.
//!
//! With `c(s)` the stationary two-point function, every contribution has
//! the form `∫_0^τ ds c(±s) e^{iωs} E(W, τ − s)` where
//! `E(W, x) = ∫_0^x e^{iWy} dy`.

use std::collections::HashMap;

use super::simplex::accumulate;
use super::{coupling_corr, Frame, SystemSpec};
use crate::bath_correlations::PreparedBath;
use crate::error::Result;
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::quantum_core::{ComplexMatrix, Superoperator, C64, I, ZERO};

/// `∫_0^x e^{iWy} dy`.
pub(crate) fn window(w: f64, x: f64) -> C64 {
    let z = w * x;
    if z.abs() < 1e-4 {
        x * C64::new(1.0 - z * z / 6.0, z / 2.0 - z * z * z / 24.0)
    } else {
        (C64::from_polar(1.0, z) - 1.0) / (I * w)
    }
}

#[derive(Clone, Copy)]
struct Kernel {
    roles: [(usize, bool); 2],
    reversed: bool,
}

enum Target {
    Left { a: usize, e: usize },
    Right { e: usize, b: usize },
    Sandwich { a: usize, c: usize, e: usize, b: usize },
}

struct Plan {
    kernels: Vec<Kernel>,
    requests: Vec<(usize, f64, f64)>,
    lookup: HashMap<(usize, u64, u64), usize>,
    parts: Vec<(usize, C64, Target)>,
}

impl Plan {
    fn request(&mut self, kernel: usize, omega: f64, w: f64) -> usize {
        // collapse rounding noise in Bohr frequencies
        let q = |x: f64| ((x * 1e12).round() / 1e12 + 0.0).to_bits();
        let key = (kernel, q(omega), q(w));
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        self.requests.push((kernel, omega, w));
        self.lookup.insert(key, self.requests.len() - 1);
        self.requests.len() - 1
    }
}

pub(super) fn second_order(
    tau: f64,
    sys: &SystemSpec,
    frame: &Frame,
    prep: &PreparedBath<'_>,
    tol: f64,
) -> Result<Superoperator> {
    let d = frame.d;
    let nc = frame.ops.len();
    let ops = &frame.ops;
    let adj: Vec<ComplexMatrix> = ops.iter().map(|a| a.adjoint()).collect();
    let bohr = |x: usize, y: usize| frame.bohr(x, y);

    let mut plan = Plan {
        kernels: Vec::new(),
        requests: Vec::new(),
        lookup: HashMap::new(),
        parts: Vec::new(),
    };
    for al in 0..nc {
        for be in 0..nc {
            let k_left = plan.kernels.len();
            plan.kernels.push(Kernel {
                roles: [(al, false), (be, false)],
                reversed: false,
            });
            let k_right = plan.kernels.len();
            plan.kernels.push(Kernel {
                roles: [(al, true), (be, true)],
                reversed: true,
            });
            let k_mid_fwd = plan.kernels.len();
            plan.kernels.push(Kernel {
                roles: [(al, true), (be, false)],
                reversed: false,
            });
            let k_mid_bwd = plan.kernels.len();
            plan.kernels.push(Kernel {
                roles: [(al, true), (be, false)],
                reversed: true,
            });

            for a in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let f = -ops[al][(a, c)] * ops[be][(c, e)];
                        if f != ZERO {
                            let r = plan.request(k_left, bohr(a, c), bohr(a, e));
                            plan.parts.push((r, f, Target::Left { a, e }));
                        }
                        let (e2, c2, b2) = (a, c, e);
                        let f = -adj[al][(e2, c2)] * adj[be][(c2, b2)];
                        if f != ZERO {
                            let r = plan.request(k_right, bohr(c2, b2), bohr(e2, b2));
                            plan.parts.push((r, f, Target::Right { e: e2, b: b2 }));
                        }
                    }
                }
            }
            for a in 0..d {
                for c in 0..d {
                    let l = ops[be][(a, c)];
                    if l == ZERO {
                        continue;
                    }
                    for e in 0..d {
                        for b in 0..d {
                            let r = adj[al][(e, b)];
                            if r == ZERO {
                                continue;
                            }
                            let f = l * r;
                            let w = bohr(a, c) + bohr(e, b);
                            let r1 = plan.request(k_mid_fwd, bohr(e, b), w);
                            plan.parts.push((r1, f, Target::Sandwich { a, c, e, b }));
                            let r2 = plan.request(k_mid_bwd, bohr(a, c), w);
                            plan.parts.push((r2, f, Target::Sandwich { a, c, e, b }));
                        }
                    }
                }
            }
        }
    }

    let values = integrate_requests(tau, sys, prep, &plan, tol)?;

    let d2 = d * d;
    let mut acc = vec![ZERO; d2 * d2];
    let mut left = vec![ZERO; d2];
    let mut right = vec![ZERO; d2];
    let unit = |m: &mut Vec<C64>| {
        m.fill(ZERO);
        for x in 0..d {
            m[x * d + x] = C64::new(1.0, 0.0);
        }
    };
    for (r, f, target) in &plan.parts {
        let coef = f * values[*r];
        match *target {
            Target::Left { a, e } => {
                left.fill(ZERO);
                left[a * d + e] = C64::new(1.0, 0.0);
                unit(&mut right);
            }
            Target::Right { e, b } => {
                unit(&mut left);
                right.fill(ZERO);
                right[e * d + b] = C64::new(1.0, 0.0);
            }
            Target::Sandwich { a, c, e, b } => {
                left.fill(ZERO);
                left[a * d + c] = C64::new(1.0, 0.0);
                right.fill(ZERO);
                right[e * d + b] = C64::new(1.0, 0.0);
            }
        }
        accumulate(&mut acc, &left, &right, coef, d);
    }
    let m = ComplexMatrix::from_vec(d2, d2, acc).expect("d² x d²");
    Ok(Superoperator::from_matrix(m).expect("square"))
}

fn integrate_requests(
    tau: f64,
    sys: &SystemSpec,
    prep: &PreparedBath<'_>,
    plan: &Plan,
    tol: f64,
) -> Result<Vec<C64>> {
    let nreq = plan.requests.len();
    if nreq == 0 {
        return Ok(Vec::new());
    }
    let max_freq = plan
        .requests
        .iter()
        .map(|&(_, o, w)| o.abs() + w.abs())
        .fold(1.0f64, f64::max);
    let segments = ((tau * max_freq / std::f64::consts::PI).ceil() as usize).clamp(1, 20_000);
    let mut cuts: Vec<f64> = (1..segments).map(|k| tau * k as f64 / segments as f64).collect();
    for k in -6..4 {
        let x = 2f64.powi(k);
        if x < tau {
            cuts.push(x);
        }
    }
    let mut kv = vec![ZERO; plan.kernels.len()];
    let opts = AdaptiveOptions {
        abs_tol: tol,
        rel_tol: 1e-12,
        max_intervals: 400_000,
    };
    let r = integrate_adaptive(
        |s, out| {
            for (v, k) in kv.iter_mut().zip(&plan.kernels) {
                let x = if k.reversed { -s } else { s };
                *v = coupling_corr(prep, sys, &k.roles, &[x, 0.0]);
            }
            for (i, &(k, omega, w)) in plan.requests.iter().enumerate() {
                let z = kv[k] * C64::from_polar(1.0, omega * s) * window(w, tau - s);
                out[2 * i] = z.re;
                out[2 * i + 1] = z.im;
            }
        },
        2 * nreq,
        0.0,
        tau,
        &cuts,
        opts,
    )
    .into_checked("stationary second-order term")?;
    Ok((0..nreq).map(|i| C64::new(r[2 * i], r[2 * i + 1])).collect())
}
