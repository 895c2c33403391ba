//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15) for
//! small vector-valued integrands, and Gauss–Legendre rules of any order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Absolute tolerance used for window integrals.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Upper bound on the number of live subintervals.
pub const DEFAULT_MAX_INTERVALS: usize = 1 << 14;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Number of equal pieces the range is split into before refinement.
    pub initial_pieces: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: DEFAULT_ABS_TOL,
            max_intervals: DEFAULT_MAX_INTERVALS,
            initial_pieces: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    /// Sum of per-interval |K15 - G7| estimates (max over components).
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<const N: usize, F>(f: &F, a: f64, b: f64) -> Piece<N>
where
    F: Fn(f64) -> [f64; N],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for n in 0..N {
        k[n] = WGK[7] * fc[n];
        g[n] = WG[3] * fc[n];
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        let (f1, f2) = (f(c - dx), f(c + dx));
        for n in 0..N {
            let s = f1[n] + f2[n];
            k[n] += WGK[i] * s;
            if i % 2 == 1 {
                g[n] += WG[i / 2] * s;
            }
        }
    }
    let mut error: f64 = 0.0;
    for n in 0..N {
        k[n] *= h;
        g[n] *= h;
        error = error.max((k[n] - g[n]).abs());
    }
    Piece { a, b, value: k, error }
}

/// Integrates the vector-valued `f` over `[a, b]`.
///
/// Intervals with the largest error estimate are bisected until the summed
/// estimate drops below `opts.abs_tol` or `opts.max_intervals` is reached.
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult<N>
where
    F: Fn(f64) -> [f64; N],
{
    if a == b {
        return QuadResult { value: [0.0; N], error: 0.0, intervals: 0, converged: true };
    }
    let pieces = opts.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap: BinaryHeap<Piece<N>> = (0..pieces)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + width };
            kronrod(&f, lo, hi)
        })
        .collect();

    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        let converged = total_err <= opts.abs_tol;
        if converged || heap.len() >= opts.max_intervals {
            let mut value = [0.0; N];
            // Sum in a fixed order so results do not depend on heap layout.
            let mut parts: Vec<Piece<N>> = heap.into_vec();
            parts.sort_by(|p, q| p.a.total_cmp(&q.a));
            for p in &parts {
                for n in 0..N {
                    value[n] += p.value[n];
                }
            }
            return QuadResult { value, error: total_err, intervals: parts.len(), converged };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult<1>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, opts)
}

/// Gauss–Legendre nodes and weights for `n` points on `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
