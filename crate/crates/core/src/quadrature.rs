//! Quadrature rules for the amplitude integrals.
//!
//! Time integrals use composite Gauss-Legendre on panels graded
//! geometrically toward the regularized light-cone poles. Mode integrals
//! over frequency use globally adaptive Gauss-Kronrod (7/15).

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and its derivative.
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Breakpoints on `[a, b]` clustered geometrically around each point in
/// `singular`, starting at distance `scale` and doubling outward.
pub fn graded_breakpoints(a: f64, b: f64, singular: &[f64], scale: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    let span = b - a;
    for &p in singular {
        if p >= a && p <= b {
            pts.push(p);
        }
        let mut h = scale;
        while h < 2.0 * span + scale {
            for q in [p - h, p + h] {
                if q > a && q < b {
                    pts.push(q);
                }
            }
            h *= 2.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    let min_width = 1e-12 * span.abs().max(1e-300);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last <= min_width => {}
            _ => out.push(p),
        }
    }
    if let Some(last) = out.last_mut() {
        *last = b;
    }
    out
}

/// A fixed composite Gauss-Legendre rule: node positions and weights on a
/// set of panels.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Spreads roughly `budget` nodes over the panels defined by
    /// `breakpoints`, with at least `min_order` nodes per panel.
    pub fn new(breakpoints: &[f64], budget: usize, min_order: usize) -> Self {
        let panels = breakpoints.len().saturating_sub(1);
        if panels == 0 {
            return Self { nodes: vec![], weights: vec![] };
        }
        let order = budget.div_ceil(panels).max(min_order);
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for pair in breakpoints.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Weights of the embedded 7-point Gauss rule at KRONROD_NODES[1, 3, 5, 7].
const GAUSS7_WEIGHTS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let center = f(mid);
    let mut kronrod = center * KRONROD_WEIGHTS[7];
    let mut gauss = center * GAUSS7_WEIGHTS[3];
    for j in 0..7 {
        let dx = half * KRONROD_NODES[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += pair * KRONROD_WEIGHTS[j];
        if j % 2 == 1 {
            gauss += pair * GAUSS7_WEIGHTS[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    (value, error)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl Eq for Segment {}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Settings for [`adaptive_kronrod`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-14, max_segments: 200_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive G7/K15 integration of `f` over the panels in
/// `breakpoints`. The segment with the largest error estimate is bisected
/// until the summed estimate meets the tolerance.
pub fn adaptive_kronrod<F: Fn(f64) -> Complex64>(f: F, breakpoints: &[f64], opts: Adaptive) -> QuadResult {
    let mut heap = BinaryHeap::new();
    for pair in breakpoints.windows(2) {
        let (value, error) = kronrod15(&f, pair[0], pair[1]);
        heap.push(Segment { a: pair[0], b: pair[1], value, error });
    }
    loop {
        let (total, err) = heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target || heap.len() >= opts.max_segments {
            // Sum in position order so the result does not depend on heap layout.
            let mut segs = heap.into_vec();
            segs.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = segs.iter().map(|s| s.value).sum();
            return QuadResult { value, error: err, segments: segs.len() };
        }
        // Bisect a batch of the worst segments before re-summing.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
                let (value, error) = kronrod15(&f, lo, hi);
                heap.push(Segment { a: lo, b: hi, value, error });
            }
        }
    }
}
