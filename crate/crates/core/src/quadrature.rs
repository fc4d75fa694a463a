//! Quadrature rules: Gauss–Legendre, panelled rules on ordered simplices,
//! adaptive Gauss–Kronrod and cumulative integration on uniform grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::error::{DcgError, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|&xi| 0.5 * (xi + 1.0)).collect(),
        w.iter().map(|&wi| 0.5 * wi).collect(),
    )
}

/// Integrates `f` over `[a, b]` with a single `n`-point Gauss–Legendre rule.
pub fn gauss_legendre_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Rule on the ordered unit simplex `1 > x_1 > x_2 > ... > x_g > 0`.
///
/// Built from a tensor Gauss–Legendre rule in collapsed coordinates
/// `x_k = v_1 v_2 ... v_k`, with Jacobian `v_1^{g-1} v_2^{g-2} ... v_{g-1}`.
#[derive(Debug, Clone)]
pub struct OrderedSimplexRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl OrderedSimplexRule {
    pub fn new(dim: usize, nodes: usize) -> Self {
        assert!(dim >= 1 && nodes >= 1);
        let (v, w) = gauss_legendre_unit(nodes);
        let count = nodes.pow(dim as u32);
        let mut points = Vec::with_capacity(count * dim);
        let mut weights = Vec::with_capacity(count);
        let mut idx = vec![0usize; dim];
        for _ in 0..count {
            let mut x = 1.0;
            let mut weight = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                x *= v[i];
                points.push(x);
                weight *= w[i] * v[i].powi((dim - 1 - k) as i32);
            }
            weights.push(weight);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < nodes {
                    break;
                }
                *slot = 0;
            }
        }
        Self {
            dim,
            points,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }
}

/// Composite rule on the ordered simplex `tau > u_1 > ... > u_n > 0`.
///
/// `[0, tau]` is split into equal panels. Each cell of the simplex is a
/// non-increasing sequence of panel indices; runs of equal indices form
/// smaller ordered simplices inside one panel, integrated with
/// [`OrderedSimplexRule`].
#[derive(Debug, Clone)]
pub struct PanelledSimplexRule {
    dim: usize,
    tau: f64,
    panels: usize,
    width: f64,
    rules: Vec<OrderedSimplexRule>,
}

impl PanelledSimplexRule {
    pub fn new(dim: usize, tau: f64, nodes: usize, max_panel_width: f64) -> Self {
        assert!(dim >= 1 && tau > 0.0 && max_panel_width > 0.0);
        let panels = ((tau / max_panel_width).ceil() as usize).max(1);
        let rules = (1..=dim).map(|g| OrderedSimplexRule::new(g, nodes)).collect();
        Self {
            dim,
            tau,
            panels,
            width: tau / panels as f64,
            rules,
        }
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Total number of quadrature points.
    pub fn len(&self) -> usize {
        let mut cells = 1usize;
        // number of non-increasing sequences of length dim over `panels` values
        for k in 0..self.dim {
            cells = cells * (self.panels + k) / (k + 1);
        }
        cells * self.rules[0].len().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Calls `f(u, w)` for every point; `u` is strictly decreasing.
    pub fn for_each(&self, mut f: impl FnMut(&[f64], f64)) {
        let mut seq = vec![0usize; self.dim];
        let mut groups: Vec<(usize, usize)> = Vec::with_capacity(self.dim);
        let mut u = vec![0.0; self.dim];
        self.cells(0, self.panels - 1, &mut seq, &mut |seq| {
            groups.clear();
            let mut start = 0;
            while start < seq.len() {
                let mut end = start + 1;
                while end < seq.len() && seq[end] == seq[start] {
                    end += 1;
                }
                groups.push((seq[start], end - start));
                start = end;
            }
            self.walk(&groups, 0, 0, 1.0, &mut u, &mut f);
        });
    }

    fn cells(&self, pos: usize, max: usize, seq: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        if pos == self.dim {
            emit(seq);
            return;
        }
        for p in (0..=max).rev() {
            seq[pos] = p;
            self.cells(pos + 1, p, seq, emit);
        }
    }

    fn walk(
        &self,
        groups: &[(usize, usize)],
        gi: usize,
        offset: usize,
        weight: f64,
        u: &mut [f64],
        f: &mut impl FnMut(&[f64], f64),
    ) {
        if gi == groups.len() {
            f(u, weight);
            return;
        }
        let (panel, g) = groups[gi];
        let rule = &self.rules[g - 1];
        let base = panel as f64 * self.width;
        let scale = self.width.powi(g as i32);
        for i in 0..rule.len() {
            for (k, &x) in rule.point(i).iter().enumerate() {
                u[offset + k] = base + self.width * x;
            }
            self.walk(groups, gi + 1, offset + g, weight * scale * rule.weight(i), u, f);
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_212_546,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 200_000,
        }
    }
}

/// Result of an adaptive integration; `value` has one entry per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl Integral {
    pub fn into_checked(self, what: &str) -> Result<Vec<f64>> {
        if self.converged && self.value.iter().all(|v| v.is_finite()) {
            Ok(self.value)
        } else {
            Err(DcgError::Numerical(format!(
                "{what}: adaptive quadrature did not converge (error estimate {:.3e} after {} intervals)",
                self.error, self.intervals
            )))
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_segment(
    f: &mut impl FnMut(f64, &mut [f64]),
    a: f64,
    b: f64,
    n: usize,
    buf: &mut [f64],
) -> Segment {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kron = vec![0.0; n];
    let mut gauss = vec![0.0; n];
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sgn in nodes {
            f(mid + sgn * half * x, buf);
            for c in 0..n {
                kron[c] += wk * buf[c];
                if j % 2 == 1 {
                    gauss[c] += WG[j / 2] * buf[c];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for c in 0..n {
        kron[c] *= half;
        gauss[c] *= half;
        error = error.max((kron[c] - gauss[c]).abs());
    }
    Segment {
        a,
        b,
        value: kron,
        error,
    }
}

/// Adaptive Gauss–Kronrod (G10/K21) integration of a vector-valued function.
///
/// `f(x, out)` writes `n` components into `out`. The interval is first split
/// at every breakpoint that lies strictly inside `(a, b)`.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64, &mut [f64]),
    n: usize,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Integral {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi && x.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut buf = vec![0.0; n];
    let mut heap = BinaryHeap::new();
    if hi > lo {
        for w in cuts.windows(2) {
            heap.push(kronrod_segment(&mut f, w[0], w[1], n, &mut buf));
        }
    }
    let totals = |heap: &BinaryHeap<Segment>| {
        let mut value = vec![0.0; n];
        let mut error = 0.0;
        for s in heap.iter() {
            for (v, sv) in value.iter_mut().zip(&s.value) {
                *v += sv;
            }
            error += s.error;
        }
        (value, error)
    };
    loop {
        let (value, error) = totals(&heap);
        let scale = value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = opts.abs_tol.max(opts.rel_tol * scale);
        let count = heap.len();
        if error <= target || count >= opts.max_intervals || !error.is_finite() {
            return Integral {
                value: value.into_iter().map(|v| sign * v).collect(),
                error,
                intervals: count,
                converged: error <= target,
            };
        }
        // refine a batch of the worst segments to limit the bookkeeping cost
        let batch = (count / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                heap.push(Segment {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            heap.push(kronrod_segment(&mut f, worst.a, mid, n, &mut buf));
            heap.push(kronrod_segment(&mut f, mid, worst.b, n, &mut buf));
        }
    }
}

/// Scalar convenience wrapper around [`integrate_adaptive`].
pub fn integrate_adaptive_scalar(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Integral {
    integrate_adaptive(|x, out| out[0] = f(x), 1, a, b, breakpoints, opts)
}

/// Running integral `Y_j = ∫_0^{x_j} y` of samples on a uniform grid.
///
/// Fourth-order accurate: interior intervals use the four-point
/// cubic-interpolation weights, end intervals the one-sided variants.
pub fn cumulative_integral<T>(y: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = y.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for j in 1..n {
            out[j] = out[j - 1] + (y[j - 1] + y[j]) * (0.5 * h);
        }
        return out;
    }
    let c = h / 24.0;
    for j in 0..n - 1 {
        let piece = if j == 0 {
            y[0] * 9.0 + y[1] * 19.0 - y[2] * 5.0 + y[3]
        } else if j == n - 2 {
            y[n - 4] - y[n - 3] * 5.0 + y[n - 2] * 19.0 + y[n - 1] * 9.0
        } else {
            (y[j] + y[j + 1]) * 13.0 - y[j - 1] - y[j + 2]
        };
        out[j + 1] = out[j] + piece * c;
    }
    out
}
