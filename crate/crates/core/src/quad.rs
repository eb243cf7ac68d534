//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals.
//!
//! Panels are bisected largest-error-first. The final sum is taken in left-endpoint
//! order so that a fixed panel decomposition always reduces identically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Zero + Send + Sync
{
    fn magnitude(self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    #[inline]
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    #[inline]
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Integral value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<V, T> {
    pub value: V,
    pub error: T,
}

impl<V, T: Real> Estimate<V, T> {
    pub fn exact(value: V) -> Self {
        Self { value, error: T::zero() }
    }
}

/// Tolerances and budget for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Quadrature<T> {
    pub fn new(abs_tol: T) -> Self {
        Self { abs_tol, rel_tol: T::zero(), max_intervals: 200_000 }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value)
    }
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-10))
    }
}

// Kronrod abscissae; odd indices are the 10-point Gauss–Legendre nodes.
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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Clone, Copy, Debug)]
struct Panel<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
    /// Error already at the round-off floor; bisecting further cannot help.
    settled: bool,
}

fn gk21<T, V, F>(f: &mut F, a: T, b: T) -> Panel<V, T>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let f_center = f(center);

    let mut fv1 = [V::zero(); 10];
    let mut fv2 = [V::zero(); 10];
    let mut res_gauss = V::zero();
    let mut res_kronrod = f_center * T::lit(WGK[10]);
    let mut res_abs = f_center.magnitude() * T::lit(WGK[10]);

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * T::lit(XGK[jtw]);
        let (v1, v2) = (f(center - dx), f(center + dx));
        fv1[jtw] = v1;
        fv2[jtw] = v2;
        res_gauss = res_gauss + (v1 + v2) * T::lit(WG[j]);
        res_kronrod = res_kronrod + (v1 + v2) * T::lit(WGK[jtw]);
        res_abs = res_abs + (v1.magnitude() + v2.magnitude()) * T::lit(WGK[jtw]);
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * T::lit(XGK[jtwm1]);
        let (v1, v2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = v1;
        fv2[jtwm1] = v2;
        res_kronrod = res_kronrod + (v1 + v2) * T::lit(WGK[jtwm1]);
        res_abs = res_abs + (v1.magnitude() + v2.magnitude()) * T::lit(WGK[jtwm1]);
    }

    let mean = res_kronrod * T::lit(0.5);
    let mut res_asc = (f_center - mean).magnitude() * T::lit(WGK[10]);
    for j in 0..10 {
        res_asc = res_asc + ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude()) * T::lit(WGK[j]);
    }

    let abs_half = half.abs();
    let raw = (res_kronrod - res_gauss).magnitude() * abs_half;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;

    let mut error = raw;
    if res_asc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * scale.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    let settled = error <= floor;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(floor);
    }

    Panel { a, b, value: res_kronrod * half, error, settled }
}

struct Keyed<T>(T, usize);

impl<T: Real> PartialEq for Keyed<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Keyed<T> {}
impl<T: Real> PartialOrd for Keyed<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Keyed<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            // lower index first on ties keeps the schedule deterministic
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, treating every interior break as a
/// panel boundary (kinks, jumps, support edges).
///
/// Breakpoints need not be sorted; duplicates are dropped. At least two distinct points
/// are required unless the interval is degenerate, in which case the integral is zero.
pub fn integrate<T, V, F>(mut f: F, breaks: &[T], q: &Quadrature<T>) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let mut pts: Vec<T> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    if pts.len() < 2 {
        return Ok(Estimate::exact(V::zero()));
    }

    let mut panels: Vec<Panel<V, T>> = pts.windows(2).map(|w| gk21(&mut f, w[0], w[1])).collect();
    let mut heap: BinaryHeap<Keyed<T>> = BinaryHeap::new();
    let mut total_val = V::zero();
    // error carried by panels already at the round-off floor vs. panels still refinable
    let mut floor_err = T::zero();
    let mut live_err = T::zero();
    for (i, p) in panels.iter().enumerate() {
        total_val = total_val + p.value;
        if p.settled {
            floor_err = floor_err + p.error;
        } else {
            live_err = live_err + p.error;
            heap.push(Keyed(p.error, i));
        }
    }
    // once the floor alone exceeds the target, refining stops paying off when the
    // refinable part drops below it
    let unfinished = |live: T, floor: T, val: V| {
        let target = q.target(val.magnitude());
        live + floor > target && live > floor.max(target - floor)
    };

    let min_width = (pts[pts.len() - 1] - pts[0]) * T::lit(1e-14);
    while unfinished(live_err, floor_err, total_val) {
        if panels.len() >= q.max_intervals {
            return Err(Error::NonConvergent {
                estimate: (live_err + floor_err).to_f64_lossy(),
                tolerance: q.target(total_val.magnitude()).to_f64_lossy(),
            });
        }
        let Some(Keyed(_, idx)) = heap.pop() else { break };
        let parent = panels[idx];
        let mid = (parent.a + parent.b) / T::lit(2.0);
        if parent.b - parent.a <= min_width {
            live_err = live_err - parent.error;
            floor_err = floor_err + parent.error;
            panels[idx].settled = true;
            continue;
        }
        let left = gk21(&mut f, parent.a, mid);
        let right = gk21(&mut f, mid, parent.b);
        live_err = live_err - parent.error;
        total_val = total_val - parent.value + left.value + right.value;
        panels[idx] = left;
        panels.push(right);
        for (p, i) in [(left, idx), (right, panels.len() - 1)] {
            if p.settled {
                floor_err = floor_err + p.error;
            } else {
                live_err = live_err + p.error;
                heap.push(Keyed(p.error, i));
            }
        }
    }

    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let mut value = V::zero();
    let mut error = T::zero();
    let (mut live, mut floor) = (T::zero(), T::zero());
    for p in &panels {
        value = value + p.value;
        error = error + p.error;
        if p.settled {
            floor = floor + p.error;
        } else {
            live = live + p.error;
        }
    }
    if unfinished(live, floor, value) {
        return Err(Error::NonConvergent {
            estimate: error.to_f64_lossy(),
            tolerance: q.target(value.magnitude()).to_f64_lossy(),
        });
    }
    Ok(Estimate { value, error })
}

/// Like [`integrate`] over `[a, b]`, but starts from `n_panels` equal panels merged with
/// the given interior breakpoints. Used for oscillatory integrands where a single
/// 21-point panel cannot see the oscillation.
pub fn integrate_panels<T, V, F>(
    f: F,
    a: T,
    b: T,
    n_panels: usize,
    interior: &[T],
    q: &Quadrature<T>,
) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let n = n_panels.max(1);
    let h = (b - a) / T::from_usize_lossy(n);
    let mut breaks: Vec<T> = (0..=n).map(|i| a + h * T::from_usize_lossy(i)).collect();
    breaks[n] = b;
    breaks.extend(interior.iter().copied().filter(|&x| x > a && x < b));
    integrate(f, &breaks, q)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((T::lit(x), T::lit(w)));
    }
    out.reverse();
    out
}
