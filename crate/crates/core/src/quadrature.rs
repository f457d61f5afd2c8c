//! Gauss–Legendre and Gauss–Kronrod rules.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
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
        dp = if d != 0.0 { d } else { dp };
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
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Four-point Gauss–Legendre rule, exact for polynomials of degree ≤ 7.
pub const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
pub const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_85,
];

/// ∫_a^b f with the four-point rule.
pub fn gl4<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
        s += w * f(mid + half * x);
    }
    s * half
}

// QUADPACK G7/K15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// One G7/K15 panel: returns the Kronrod estimate and an error estimate,
/// `|K15 − G7|` rescaled as in QUADPACK.
pub fn kronrod15<T, F>(f: &F, a: f64, b: f64) -> (T, f64)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> + Magnitude,
    F: Fn(f64) -> T,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut vals = [(fc, fc); 7];
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (l, r) = (f(mid - dx), f(mid + dx));
        vals[j] = (l, r);
        let s = l + r;
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut spread = WGK[7] * (fc - mean).magnitude();
    for (j, (l, r)) in vals.iter().enumerate() {
        spread += WGK[j] * ((*l - mean).magnitude() + (*r - mean).magnitude());
    }
    let k = kron * half;
    let g = gauss * half;
    let mut err = (k - g).magnitude();
    let resasc = spread * half.abs();
    if resasc > 0.0 && err > 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    (k, err)
}

/// Globally adaptive G7/K15 integration over the given initial panels.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `max(rel_tol·|I|, abs_tol)` or `max_panels` is hit.
/// Returns `(integral, error_estimate, converged)`.
pub fn adaptive_kronrod<T, F>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
    zero: T,
) -> (T, f64, bool)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> + Magnitude,
    F: Fn(f64) -> T,
{
    use std::collections::BinaryHeap;

    struct Panel<T> {
        err: f64,
        a: f64,
        b: f64,
        value: T,
    }
    impl<T> PartialEq for Panel<T> {
        fn eq(&self, other: &Self) -> bool {
            self.err.total_cmp(&other.err).is_eq()
        }
    }
    impl<T> Eq for Panel<T> {}
    impl<T> PartialOrd for Panel<T> {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl<T> Ord for Panel<T> {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err.total_cmp(&other.err)
        }
    }

    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut total = zero;
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        let (v, e) = kronrod15(f, w[0], w[1]);
        total = total + v;
        err += e;
        heap.push(Panel {
            err: e,
            a: w[0],
            b: w[1],
            value: v,
        });
    }
    while err > (rel_tol * total.magnitude()).max(abs_tol) {
        if heap.len() >= max_panels {
            return (total, err, false);
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod15(f, worst.a, mid);
        let (v2, e2) = kronrod15(f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        err += e1 + e2 - worst.err;
        heap.push(Panel {
            err: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(Panel {
            err: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
    }
    // Re-sum to shed drift from the incremental updates.
    let mut resum = zero;
    let mut reerr = 0.0;
    for p in heap.iter() {
        resum = resum + p.value;
        reerr += p.err;
    }
    (resum, reerr, true)
}
