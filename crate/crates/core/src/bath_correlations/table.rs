//! Piecewise Chebyshev interpolation of smooth complex functions.

use crate::quantum_core::C64;

const NODES: usize = 24;
const MAX_DEPTH: usize = 40;

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    coeffs: [C64; NODES],
}

/// Adaptive piecewise Chebyshev table on `[a, b]`.
///
/// Panels are bisected until the trailing coefficients fall below the
/// absolute tolerance.
#[derive(Debug, Clone)]
pub struct ChebyshevTable {
    panels: Vec<Panel>,
    starts: Vec<f64>,
}

impl ChebyshevTable {
    pub fn build(f: &dyn Fn(f64) -> C64, a: f64, b: f64, abs_tol: f64) -> Self {
        let mut panels = Vec::new();
        let mut stack = vec![(a, b, 0usize)];
        while let Some((lo, hi, depth)) = stack.pop() {
            let coeffs = fit(f, lo, hi);
            let tail = coeffs[NODES - 4..]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if tail <= abs_tol || depth >= MAX_DEPTH {
                panels.push(Panel {
                    a: lo,
                    b: hi,
                    coeffs,
                });
            } else {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi, depth + 1));
                stack.push((lo, mid, depth + 1));
            }
        }
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let starts = panels.iter().map(|p| p.a).collect();
        Self { panels, starts }
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Evaluates the interpolant; arguments outside the range are clamped.
    pub fn eval(&self, x: f64) -> C64 {
        let i = match self.starts.binary_search_by(|s| s.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let p = &self.panels[i];
        let y = ((2.0 * x - p.a - p.b) / (p.b - p.a)).clamp(-1.0, 1.0);
        clenshaw(&p.coeffs, y)
    }
}

fn fit(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> [C64; NODES] {
    let n = NODES as f64;
    let mut values = [C64::new(0.0, 0.0); NODES];
    for (k, v) in values.iter_mut().enumerate() {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / n;
        *v = f(0.5 * (a + b) + 0.5 * (b - a) * theta.cos());
    }
    let mut coeffs = [C64::new(0.0, 0.0); NODES];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in values.iter().enumerate() {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / n;
            acc += v * (j as f64 * theta).cos();
        }
        *c = acc * (2.0 / n);
    }
    coeffs[0] *= 0.5;
    coeffs
}

fn clenshaw(c: &[C64; NODES], y: f64) -> C64 {
    let mut b1 = C64::new(0.0, 0.0);
    let mut b2 = C64::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * y) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * y - b2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let f = |x: f64| C64::new((3.0 * x).cos(), (-x * x).exp());
        let t = ChebyshevTable::build(&f, -5.0, 7.0, 1e-15);
        for i in 0..=1000 {
            let x = -5.0 + 12.0 * i as f64 / 1000.0;
            assert!((t.eval(x) - f(x)).norm() < 1e-13);
        }
        assert!(t.panel_count() > 1);
    }
}
