//! Test-function families φ with their Fourier transforms.
//!
//! Transform convention throughout the crate: `φ̂(λ) = ∫ φ(x) e^{iλx} dx`.
//! Gaussian, indicator and B-spline transforms are closed form; the bump transform is a
//! trapezoid sum over its support (the same sum an FFT evaluates on its grid).

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Quadrature};
use crate::scalar::{cis, expm1_ratio, Real};
use crate::spectra::{panel_breaks, ClosedForm, Density, KernelForm, PdKernel, Regularization};

/// Real-valued test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum TestFunction<T> {
    /// `exp(-(x - center)² / (2 width²))`
    Gaussian { center: T, width: T },
    /// Characteristic function of `[a, b]`.
    Indicator { a: T, b: T },
    /// Cardinal B-spline of the given order (degree `order - 1`) with knots
    /// `origin + j·scale`, `j = 0..=order`; integral `scale`.
    BSpline { order: u32, scale: T, origin: T },
    /// `exp(-1 / (1 - u²))` for `|u| < 1`, `u = (x - center)/radius`.
    Bump { center: T, radius: T },
    Combination(Vec<(T, TestFunction<T>)>),
    Convolution(Box<TestFunction<T>>, Box<TestFunction<T>>),
    /// `order`-th derivative of a Gaussian or bump.
    Derivative { base: Box<TestFunction<T>>, order: u32 },
}

/// Declared support of a test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support<T> {
    Compact { lo: T, hi: T },
    /// Gaussian-type decay about `center` on the length scale `width`.
    RapidDecay { center: T, width: T },
}

/// Upper bound `|φ̂(λ)| ≤ envelope(λ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope<T> {
    Zero,
    /// `coeff / |λ|^order`
    Power { coeff: T, order: T },
    /// `amp · |λ|^power · exp(-width² λ² / 2)`
    Gauss { amp: T, width: T, power: T },
    Sum(Vec<Envelope<T>>),
    Product(Box<Envelope<T>>, Box<Envelope<T>>),
    /// Pointwise minimum of several valid bounds.
    Min(Vec<Envelope<T>>),
}

impl<T: Real> Envelope<T> {
    pub fn eval(&self, lambda: T) -> T {
        let l = lambda.abs();
        match self {
            Envelope::Zero => T::zero(),
            Envelope::Power { coeff, order } => *coeff / l.powf(*order),
            Envelope::Gauss { amp, width, power } => {
                *amp * l.powf(*power) * (-(*width * *width) * l * l / T::lit(2.0)).exp()
            }
            Envelope::Sum(parts) => parts.iter().map(|e| e.eval(lambda)).sum(),
            Envelope::Product(a, b) => a.eval(lambda) * b.eval(lambda),
            Envelope::Min(parts) => parts.iter().map(|e| e.eval(lambda)).fold(T::infinity(), T::min),
        }
    }

    /// Exponent `k` with `env(λ) ≤ env(L)·(L/λ)^k` for all `λ ≥ L`, capped at 8.
    pub fn decay_order(&self, at: T) -> T {
        let cap = T::lit(8.0);
        match self {
            Envelope::Zero => cap,
            Envelope::Power { order, .. } => order.min(cap),
            Envelope::Gauss { width, power, .. } => {
                let k = *width * *width * at * at - *power;
                k.max(T::zero()).min(cap)
            }
            Envelope::Sum(parts) => parts.iter().map(|e| e.decay_order(at)).fold(cap, T::min),
            Envelope::Product(a, b) => (a.decay_order(at) + b.decay_order(at)).min(cap),
            // the part attaining the minimum at `at` bounds everything beyond it
            Envelope::Min(parts) => parts
                .iter()
                .min_by(|a, b| a.eval(at).partial_cmp(&b.eval(at)).unwrap_or(std::cmp::Ordering::Equal))
                .map_or(cap, |e| e.decay_order(at)),
        }
    }

    /// Bound on `Σ_{j≥1} env(start + j·spacing)^p` from the decay order at `start`;
    /// infinite when the series is not certifiably summable.
    pub fn lattice_tail(&self, start: T, spacing: T, p: T) -> T {
        if *self == Envelope::Zero {
            return T::zero();
        }
        let start = start.abs().max(spacing);
        let e = self.eval(start).powf(p);
        let k = self.decay_order(start) * p;
        if k <= T::one() {
            return T::infinity();
        }
        let first = start + spacing;
        e * start.powf(k) * (first.powf(-k) + first.powf(T::one() - k) / (spacing * (k - T::one())))
    }

    fn scaled(self, c: T) -> Self {
        let c = c.abs();
        match self {
            Envelope::Zero => Envelope::Zero,
            Envelope::Power { coeff, order } => Envelope::Power { coeff: coeff * c, order },
            Envelope::Gauss { amp, width, power } => Envelope::Gauss { amp: amp * c, width, power },
            Envelope::Sum(parts) => Envelope::Sum(parts.into_iter().map(|e| e.scaled(c)).collect()),
            Envelope::Product(a, b) => Envelope::Product(Box::new(a.scaled(c)), b),
            Envelope::Min(parts) => Envelope::Min(parts.into_iter().map(|e| e.scaled(c)).collect()),
        }
    }

    fn times_power(self, m: T) -> Self {
        match self {
            Envelope::Zero => Envelope::Zero,
            Envelope::Power { coeff, order } => Envelope::Power { coeff, order: order - m },
            Envelope::Gauss { amp, width, power } => Envelope::Gauss { amp, width, power: power + m },
            Envelope::Sum(parts) => Envelope::Sum(parts.into_iter().map(|e| e.times_power(m)).collect()),
            Envelope::Product(a, b) => Envelope::Product(Box::new(a.times_power(m)), b),
            Envelope::Min(parts) => Envelope::Min(parts.into_iter().map(|e| e.times_power(m)).collect()),
        }
    }
}

/// `∫ exp(-1/(1-u²)) du` over `[-1, 1]`.
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        integrate(unit_bump::<f64>, &[-1.0, 0.0, 1.0], &Quadrature::new(1e-15).with_rel_tol(1e-14))
            .map(|e| e.value)
            .expect("bump mass quadrature")
    })
}

fn unit_bump<T: Real>(u: T) -> T {
    let t = T::one() - u * u;
    if t <= T::zero() {
        T::zero()
    } else {
        (-T::one() / t).exp()
    }
}

/// Numerator polynomials `Q_m` with `d^m/du^m exp(-1/(1-u²)) = Q_m(u) exp(-1/(1-u²)) / (1-u²)^{2m}`.
fn bump_derivative_poly(m: u32) -> Vec<f64> {
    let mut q = vec![1.0];
    for k in 0..m {
        let k = k as f64;
        // Q' (1-u²)² + 4k u (1-u²) Q - 2u Q
        let dq: Vec<f64> = q.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
        let mut next = vec![0.0; q.len() + 4];
        for (i, c) in dq.iter().enumerate() {
            next[i] += c;
            next[i + 2] -= 2.0 * c;
            next[i + 4] += c;
        }
        for (i, c) in q.iter().enumerate() {
            next[i + 1] += (4.0 * k - 2.0) * c;
            next[i + 3] -= 4.0 * k * c;
        }
        while next.len() > 1 && next.last() == Some(&0.0) {
            next.pop();
        }
        q = next;
    }
    q
}

fn unit_bump_derivative<T: Real>(m: u32, u: T, poly: &[f64]) -> T {
    let t = T::one() - u * u;
    if t <= T::zero() {
        return T::zero();
    }
    let e = (-T::one() / t).exp();
    if e == T::zero() {
        return T::zero();
    }
    let mut p = T::zero();
    for c in poly.iter().rev() {
        p = p * u + T::lit(*c);
    }
    p * e / t.powi(2 * m as i32)
}

/// `‖D^j b‖_{L¹}` for the unit bump `b`, `j < 12`; infinite beyond.
fn unit_bump_derivative_l1(j: u32) -> f64 {
    static NORMS: [OnceLock<f64>; 12] = [const { OnceLock::new() }; 12];
    let Some(cell) = NORMS.get(j as usize) else { return f64::INFINITY };
    *cell.get_or_init(|| {
        let poly = bump_derivative_poly(j);
        let breaks: Vec<f64> = (0..=64).map(|i| -1.0 + i as f64 / 32.0).collect();
        integrate(
            |u: f64| unit_bump_derivative(j, u, &poly).abs(),
            &breaks,
            &Quadrature::new(1e-12).with_rel_tol(1e-10),
        )
        .map(|e| e.value)
        .unwrap_or(f64::INFINITY)
    })
}

/// Probabilists' Hermite polynomial `He_m(u)`.
fn hermite_he<T: Real>(m: u32, u: T) -> T {
    let (mut h0, mut h1) = (T::one(), u);
    if m == 0 {
        return h0;
    }
    for k in 1..m {
        let h2 = u * h1 - T::from_usize_lossy(k as usize) * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Normalized cardinal B-spline on unit knots `0..=order`, evaluated at `t`.
fn cardinal_bspline<T: Real>(order: u32, t: T) -> T {
    let k = order as usize;
    if k == 0 || t < T::zero() || t >= T::from_usize_lossy(k) {
        return T::zero();
    }
    let mut b: Vec<T> = (0..k)
        .map(|j| {
            let j = T::from_usize_lossy(j);
            if t >= j && t < j + T::one() {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    for m in 2..=k {
        let mm = T::from_usize_lossy(m - 1);
        for j in 0..=(k - m) {
            let jj = T::from_usize_lossy(j);
            let mj = T::from_usize_lossy(j + m);
            b[j] = ((t - jj) * b[j] + (mj - t) * b[j + 1]) / mm;
        }
    }
    b[0]
}

impl<T: Real> TestFunction<T> {
    pub fn gaussian(center: T, width: T) -> Self {
        TestFunction::Gaussian { center, width }
    }

    /// `exp(-x²/2)`.
    pub fn standard_gaussian() -> Self {
        Self::gaussian(T::zero(), T::one())
    }

    pub fn indicator(a: T, b: T) -> Self {
        TestFunction::Indicator { a, b }
    }

    pub fn bspline(order: u32, scale: T) -> Self {
        TestFunction::BSpline { order, scale, origin: T::zero() }
    }

    pub fn bump(center: T, radius: T) -> Self {
        TestFunction::Bump { center, radius }
    }

    pub fn zero() -> Self {
        TestFunction::Combination(Vec::new())
    }

    pub fn scaled(self, c: T) -> Self {
        TestFunction::Combination(vec![(c, self)])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TestFunction::Combination(terms) => {
                terms.iter().all(|(c, f)| *c == T::zero() || f.is_zero())
            }
            TestFunction::Convolution(a, b) => a.is_zero() || b.is_zero(),
            TestFunction::Derivative { base, .. } => base.is_zero(),
            TestFunction::Indicator { a, b } => a >= b,
            _ => false,
        }
    }

    pub fn is_differentiable(&self) -> bool {
        match self {
            TestFunction::Gaussian { .. } | TestFunction::Bump { .. } => true,
            TestFunction::Indicator { .. } => self.is_zero(),
            TestFunction::BSpline { order, .. } => *order >= 2,
            TestFunction::Combination(terms) => terms.iter().all(|(_, f)| f.is_differentiable()),
            TestFunction::Convolution(a, b) => a.is_differentiable() || b.is_differentiable(),
            TestFunction::Derivative { base, .. } => base.is_differentiable(),
        }
    }

    pub fn support(&self) -> Support<T> {
        match self {
            TestFunction::Gaussian { center, width } => Support::RapidDecay { center: *center, width: width.abs() },
            TestFunction::Derivative { base, .. } => base.support(),
            _ => {
                let (lo, hi) = self.effective_interval(T::zero());
                Support::Compact { lo, hi }
            }
        }
    }

    pub fn is_compactly_supported(&self) -> bool {
        match self {
            TestFunction::Gaussian { .. } => false,
            TestFunction::Combination(terms) => terms.iter().all(|(_, f)| f.is_compactly_supported()),
            TestFunction::Convolution(a, b) => a.is_compactly_supported() && b.is_compactly_supported(),
            TestFunction::Derivative { base, .. } => base.is_compactly_supported(),
            _ => true,
        }
    }

    /// Interval outside which `|φ|` is below `eps` relative to its scale (exact support for
    /// compact families). `eps = 0` uses `1e-17`.
    pub fn effective_interval(&self, eps: T) -> (T, T) {
        let eps = if eps > T::zero() { eps } else { T::lit(1e-17) };
        match self {
            TestFunction::Gaussian { center, width } => {
                let r = width.abs() * (T::lit(2.0) * (T::one() / eps).ln()).sqrt() + width.abs();
                (*center - r, *center + r)
            }
            TestFunction::Indicator { a, b } => (*a, *b),
            TestFunction::BSpline { order, scale, origin } => {
                let end = *origin + *scale * T::from_usize_lossy(*order as usize);
                (origin.min(end), origin.max(end))
            }
            TestFunction::Bump { center, radius } => (*center - radius.abs(), *center + radius.abs()),
            TestFunction::Combination(terms) => {
                let live: Vec<_> = terms.iter().filter(|(c, f)| *c != T::zero() && !f.is_zero()).collect();
                if live.is_empty() {
                    return (T::zero(), T::zero());
                }
                live.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), (_, f)| {
                    let (a, b) = f.effective_interval(eps);
                    (lo.min(a), hi.max(b))
                })
            }
            TestFunction::Convolution(a, b) => {
                let (a0, a1) = a.effective_interval(eps);
                let (b0, b1) = b.effective_interval(eps);
                (a0 + b0, a1 + b1)
            }
            TestFunction::Derivative { base, order } => {
                let (lo, hi) = base.effective_interval(eps);
                if let TestFunction::Gaussian { width, .. } = base.as_ref() {
                    // polynomial prefactor pushes the tail out a little
                    let pad = width.abs() * T::from_usize_lossy(*order as usize).sqrt();
                    (lo - pad, hi + pad)
                } else {
                    (lo, hi)
                }
            }
        }
    }

    /// Points where φ or one of its low derivatives jumps; quadrature panel boundaries.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut out = match self {
            TestFunction::Gaussian { .. } => Vec::new(),
            TestFunction::Indicator { a, b } => vec![*a, *b],
            TestFunction::BSpline { order, scale, origin } => {
                (0..=*order).map(|j| *origin + *scale * T::from_usize_lossy(j as usize)).collect()
            }
            TestFunction::Bump { center, radius } => vec![*center - radius.abs(), *center, *center + radius.abs()],
            TestFunction::Combination(terms) => terms.iter().flat_map(|(_, f)| f.breakpoints()).collect(),
            TestFunction::Convolution(a, b) => {
                let (pa, pb) = (a.breakpoints(), b.breakpoints());
                let mut v = Vec::with_capacity(pa.len() * pb.len());
                for x in &pa {
                    for y in &pb {
                        v.push(*x + *y);
                    }
                }
                v
            }
            TestFunction::Derivative { base, .. } => base.breakpoints(),
        };
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        out.dedup();
        out
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            TestFunction::Gaussian { center, width } => {
                let u = (x - *center) / *width;
                (-u * u / T::lit(2.0)).exp()
            }
            TestFunction::Indicator { a, b } => {
                if x >= *a && x <= *b {
                    T::one()
                } else {
                    T::zero()
                }
            }
            TestFunction::BSpline { order, scale, origin } => cardinal_bspline(*order, (x - *origin) / *scale),
            TestFunction::Bump { center, radius } => unit_bump((x - *center) / *radius),
            TestFunction::Combination(terms) => terms.iter().map(|(c, f)| *c * f.eval(x)).sum(),
            TestFunction::Convolution(a, b) => {
                let (a0, a1) = a.effective_interval(T::zero());
                let (b0, b1) = b.effective_interval(T::zero());
                let lo = a0.max(x - b1);
                let hi = a1.min(x - b0);
                if lo >= hi {
                    return T::zero();
                }
                let mut breaks = vec![lo, hi];
                breaks.extend(a.breakpoints().into_iter().filter(|&p| p > lo && p < hi));
                breaks.extend(b.breakpoints().into_iter().map(|p| x - p).filter(|&p| p > lo && p < hi));
                integrate(|y: T| a.eval(y) * b.eval(x - y), &breaks, &Quadrature::new(T::lit(1e-13)))
                    .map(|e| e.value)
                    .unwrap_or_else(|_| T::nan())
            }
            TestFunction::Derivative { base, order } => match base.as_ref() {
                TestFunction::Gaussian { center, width } => {
                    let u = (x - *center) / *width;
                    let sign = if order % 2 == 0 { T::one() } else { -T::one() };
                    sign * hermite_he(*order, u) * (-u * u / T::lit(2.0)).exp() / width.powi(*order as i32)
                }
                TestFunction::Bump { center, radius } => {
                    let poly = bump_derivative_poly(*order);
                    unit_bump_derivative(*order, (x - *center) / *radius, &poly) / radius.powi(*order as i32)
                }
                other => {
                    let mut g = other.clone();
                    for _ in 0..*order {
                        match g.derivative() {
                            Ok(d) => g = d,
                            Err(_) => return T::nan(),
                        }
                    }
                    g.eval(x)
                }
            },
        }
    }

    /// `φ̂(λ) = ∫ φ(x) e^{iλx} dx`.
    pub fn fourier(&self, lambda: T) -> Complex<T> {
        match self {
            TestFunction::Gaussian { center, width } => {
                let w = width.abs();
                let amp = w * T::TAU().sqrt() * (-(w * w) * lambda * lambda / T::lit(2.0)).exp();
                cis(lambda * *center) * amp
            }
            TestFunction::Indicator { a, b } => {
                if a >= b {
                    return Complex::zero();
                }
                let len = *b - *a;
                cis(lambda * *a) * expm1_ratio(lambda * len) * len
            }
            TestFunction::BSpline { order, scale, origin } => {
                let e = expm1_ratio(lambda * *scale);
                cis(lambda * *origin) * e.powu(*order) * *scale
            }
            TestFunction::Bump { center, radius } => bump_fourier(*center, radius.abs(), lambda, 0),
            TestFunction::Combination(terms) => {
                terms.iter().fold(Complex::zero(), |acc, (c, f)| acc + f.fourier(lambda) * *c)
            }
            TestFunction::Convolution(a, b) => a.fourier(lambda) * b.fourier(lambda),
            TestFunction::Derivative { base, order } => {
                Complex::new(T::zero(), -lambda).powu(*order) * base.fourier(lambda)
            }
        }
    }

    /// Bump transform together with an error estimate from halving the trapezoid grid.
    /// Closed-form families report zero error.
    pub fn fourier_with_error(&self, lambda: T) -> (Complex<T>, T) {
        match self {
            TestFunction::Bump { center, radius } => {
                let fine = bump_fourier(*center, radius.abs(), lambda, 1);
                let coarse = bump_fourier(*center, radius.abs(), lambda, 0);
                (fine, (fine - coarse).norm())
            }
            _ => (self.fourier(lambda), T::zero()),
        }
    }

    /// Bound on `|φ̂(λ)|`, valid for every `λ ≠ 0`.
    pub fn fourier_envelope(&self) -> Envelope<T> {
        match self {
            TestFunction::Gaussian { width, .. } => {
                let w = width.abs();
                Envelope::Gauss { amp: w * T::TAU().sqrt(), width: w, power: T::zero() }
            }
            TestFunction::Indicator { .. } if self.is_zero() => Envelope::Zero,
            TestFunction::Indicator { .. } => Envelope::Power { coeff: T::lit(2.0), order: T::one() },
            TestFunction::BSpline { order, scale, .. } => {
                let h = scale.abs();
                let k = T::from_usize_lossy(*order as usize);
                Envelope::Power { coeff: h * (T::lit(2.0) / h).powf(k), order: k }
            }
            TestFunction::Bump { radius, .. } => bump_envelope(radius.abs(), 0),
            TestFunction::Combination(terms) => {
                let parts: Vec<_> = terms
                    .iter()
                    .filter(|(c, f)| *c != T::zero() && !f.is_zero())
                    .map(|(c, f)| f.fourier_envelope().scaled(*c))
                    .collect();
                if parts.is_empty() {
                    Envelope::Zero
                } else {
                    Envelope::Sum(parts)
                }
            }
            TestFunction::Convolution(a, b) => {
                Envelope::Product(Box::new(a.fourier_envelope()), Box::new(b.fourier_envelope()))
            }
            TestFunction::Derivative { base, order } => match base.as_ref() {
                TestFunction::Bump { radius, .. } => bump_envelope(radius.abs(), *order),
                other => other.fourier_envelope().times_power(T::from_usize_lossy(*order as usize)),
            },
        }
    }

    /// `∫ φ`.
    pub fn integral(&self) -> T {
        self.fourier(T::zero()).re
    }

    /// `‖φ‖_{L¹}`: exact for the basic families, a triangle-inequality bound for
    /// combinations and convolutions.
    pub fn l1_norm(&self) -> T {
        match self {
            TestFunction::Gaussian { width, .. } => width.abs() * T::TAU().sqrt(),
            TestFunction::Indicator { a, b } => (*b - *a).max(T::zero()),
            TestFunction::BSpline { scale, .. } => scale.abs(),
            TestFunction::Bump { radius, .. } => radius.abs() * T::lit(bump_mass()),
            TestFunction::Combination(terms) => terms.iter().map(|(c, f)| c.abs() * f.l1_norm()).sum(),
            TestFunction::Convolution(a, b) => a.l1_norm() * b.l1_norm(),
            TestFunction::Derivative { .. } => {
                let (lo, hi) = self.effective_interval(T::zero());
                let mut breaks = vec![lo, hi];
                breaks.extend(self.breakpoints());
                integrate(|x: T| self.eval(x).abs(), &breaks, &Quadrature::new(T::lit(1e-12)))
                    .map(|e| e.value)
                    .unwrap_or_else(|_| T::infinity())
            }
        }
    }

    /// `φ(· - t)`.
    pub fn translate(&self, t: T) -> Self {
        match self {
            TestFunction::Gaussian { center, width } => TestFunction::Gaussian { center: *center + t, width: *width },
            TestFunction::Indicator { a, b } => TestFunction::Indicator { a: *a + t, b: *b + t },
            TestFunction::BSpline { order, scale, origin } => {
                TestFunction::BSpline { order: *order, scale: *scale, origin: *origin + t }
            }
            TestFunction::Bump { center, radius } => TestFunction::Bump { center: *center + t, radius: *radius },
            TestFunction::Combination(terms) => {
                TestFunction::Combination(terms.iter().map(|(c, f)| (*c, f.translate(t))).collect())
            }
            TestFunction::Convolution(a, b) => TestFunction::Convolution(Box::new(a.translate(t)), b.clone()),
            TestFunction::Derivative { base, order } => {
                TestFunction::Derivative { base: Box::new(base.translate(t)), order: *order }
            }
        }
    }

    /// For piecewise-constant `φ`, pairs `(c_k, t_k)` with `φ̂(λ) = (iλ)⁻¹ Σ c_k e^{iλt_k}`.
    pub(crate) fn step_phases(&self) -> Option<Vec<(Complex<T>, T)>> {
        match self {
            TestFunction::Indicator { .. } if self.is_zero() => Some(Vec::new()),
            TestFunction::Indicator { a, b } => Some(vec![(Complex::new(T::one(), T::zero()), *b), (Complex::new(-T::one(), T::zero()), *a)]),
            TestFunction::Combination(terms) => {
                let mut out = Vec::new();
                for (c, f) in terms {
                    out.extend(f.step_phases()?.into_iter().map(|(w, t)| (w * *c, t)));
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// `Dφ = dφ/dx`, kept inside the closed family.
    pub fn derivative(&self) -> Result<Self> {
        match self {
            TestFunction::Gaussian { .. } | TestFunction::Bump { .. } => {
                Ok(TestFunction::Derivative { base: Box::new(self.clone()), order: 1 })
            }
            TestFunction::Indicator { .. } if self.is_zero() => Ok(Self::zero()),
            TestFunction::Indicator { .. } => Err(Error::NotDifferentiable("indicator function")),
            TestFunction::BSpline { order, scale, origin } => {
                if *order < 2 {
                    return Err(Error::NotDifferentiable("B-spline of order 1"));
                }
                let lower = |o: T| TestFunction::BSpline { order: order - 1, scale: *scale, origin: o };
                Ok(TestFunction::Combination(vec![
                    (T::one() / *scale, lower(*origin)),
                    (-T::one() / *scale, lower(*origin + *scale)),
                ]))
            }
            TestFunction::Combination(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (c, f) in terms {
                    if *c == T::zero() || f.is_zero() {
                        continue;
                    }
                    out.push((*c, f.derivative()?));
                }
                Ok(TestFunction::Combination(out))
            }
            TestFunction::Convolution(a, b) => {
                if self.is_zero() {
                    Ok(Self::zero())
                } else if a.is_differentiable() {
                    Ok(TestFunction::Convolution(Box::new(a.derivative()?), b.clone()))
                } else if b.is_differentiable() {
                    Ok(TestFunction::Convolution(a.clone(), Box::new(b.derivative()?)))
                } else {
                    Err(Error::NotDifferentiable("convolution of non-differentiable factors"))
                }
            }
            TestFunction::Derivative { base, order } => {
                Ok(TestFunction::Derivative { base: base.clone(), order: order + 1 })
            }
        }
    }

    /// `self ∗ other`; Gaussian pairs stay Gaussian, combinations distribute.
    pub fn convolve(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        match (self, other) {
            (
                TestFunction::Gaussian { center: c1, width: w1 },
                TestFunction::Gaussian { center: c2, width: w2 },
            ) => {
                let s = (*w1 * *w1 + *w2 * *w2).sqrt();
                let amp = T::TAU().sqrt() * w1.abs() * w2.abs() / s;
                TestFunction::Combination(vec![(amp, TestFunction::Gaussian { center: *c1 + *c2, width: s })])
            }
            (TestFunction::Combination(terms), _) => {
                TestFunction::Combination(terms.iter().map(|(c, f)| (*c, f.convolve(other))).collect())
            }
            (_, TestFunction::Combination(terms)) => {
                TestFunction::Combination(terms.iter().map(|(c, f)| (*c, self.convolve(f))).collect())
            }
            _ => TestFunction::Convolution(Box::new(self.clone()), Box::new(other.clone())),
        }
    }
}

impl<T: Real + FftNum> TestFunction<T> {
    /// Transform on the FFT grid `λ_k = 2πk/(n h)`, `k = -n/2..n/2`, by sampling the
    /// compact support with `n` points of spacing `h`.
    pub fn fft_transform(&self, n: usize) -> Result<Vec<(T, Complex<T>)>> {
        if !self.is_compactly_supported() {
            return Err(Error::InvalidArgument("fft_transform needs compact support".into()));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("fft_transform needs at least two samples".into()));
        }
        let (lo, hi) = self.effective_interval(T::zero());
        let h = (hi - lo) / T::from_usize_lossy(n);
        let mut buf: Vec<Complex<T>> = (0..n)
            .map(|j| Complex::new(self.eval(lo + h * T::from_usize_lossy(j)), T::zero()))
            .collect();
        // endpoint value is zero for the smooth families; trapezoid weights are uniform
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let step = T::TAU() / (T::from_usize_lossy(n) * h);
        let half = (n / 2) as i64;
        Ok((-half..half)
            .map(|k| {
                let idx = k.rem_euclid(n as i64) as usize;
                let lambda = step * T::from_i64(k).unwrap_or_else(T::zero);
                (lambda, buf[idx] * cis(lambda * lo) * h)
            })
            .collect())
    }
}

fn bump_envelope<T: Real>(radius: T, order: u32) -> Envelope<T> {
    // |λ|^m |b̂_r(λ)| ≤ ‖D^{m+p} b_r‖₁ / |λ|^p
    let power = |p: u32| {
        let j = order + p;
        let c = T::lit(unit_bump_derivative_l1(j)) * radius.powi(1 - j as i32);
        Envelope::Power { coeff: c, order: T::from_usize_lossy(p as usize) }
    };
    Envelope::Min(vec![power(3), power(6)])
}

fn bump_fourier<T: Real>(center: T, radius: T, lambda: T, refine: u32) -> Complex<T> {
    // trapezoid on a grid fine enough to put λ well below the Nyquist frequency
    let needed = (lambda.abs() * radius * T::lit(4.0)).to_f64_lossy().ceil().max(0.0) as usize;
    let n = needed.max(1024).next_power_of_two() << refine;
    let h = T::lit(2.0) * radius / T::from_usize_lossy(n);
    let lo = center - radius;
    let mut acc = Complex::zero();
    for j in 1..n {
        let x = lo + h * T::from_usize_lossy(j);
        let v = unit_bump((x - center) / radius);
        if v != T::zero() {
            acc = acc + cis(lambda * x) * v;
        }
    }
    acc * h
}

/// Unit-mass mollifier `φ_{n,x}(t) = n φ(n(t - x))` built on a bump of radius `base_radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier<T> {
    pub base_radius: T,
    pub n: u32,
    pub x: T,
}

impl<T: Real> Mollifier<T> {
    pub fn new(n: u32, x: T) -> Self {
        Self { base_radius: T::one(), n, x }
    }

    pub fn test_function(&self) -> TestFunction<T> {
        let n = T::from_usize_lossy(self.n.max(1) as usize);
        let r = self.base_radius / n;
        let amp = T::one() / (r * T::lit(bump_mass()));
        TestFunction::bump(self.x, r).scaled(amp)
    }
}

/// `(φ∗f)(x) = ∫ φ(y) f(x - y) dy`.
///
/// Continuous closed forms are integrated on the x-side; Bochner kernels use
/// `∫ e^{ixλ} φ̂(-λ) dμ(λ)`; series kernels sum their regularized atoms. A truncated
/// series is accepted only when the discarded lattice tail is certified below `tol`.
pub fn convolve_kernel<T: Real>(phi: &TestFunction<T>, kernel: &PdKernel<T>, x: T, tol: T) -> Result<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    if phi.is_zero() {
        return Ok(zero);
    }
    match kernel.form() {
        KernelForm::ClosedForm(c) => {
            let (lo, hi) = phi.effective_interval(tol * T::lit(1e-3));
            let osc = match *c {
                ClosedForm::Cos { frequency } => frequency.abs(),
                ClosedForm::Sinc { a } => a.abs(),
                _ => T::zero(),
            };
            let mut breaks = panel_breaks(lo, hi, osc)?;
            breaks.extend(phi.breakpoints());
            breaks.extend(c.kinks().into_iter().map(|k| x - k));
            let v = integrate(|y: T| phi.eval(y) * c.eval(x - y), &breaks, &Quadrature::new(tol).with_rel_tol(T::lit(1e-14)))?;
            Ok(Complex::new(v.value, T::zero()))
        }
        KernelForm::BochnerOf(mu) => {
            let env = phi.fourier_envelope();
            let one = Envelope::Power { coeff: T::one(), order: T::zero() };
            let (lo, hi) = phi.effective_interval(T::lit(1e-8));
            let osc = x.abs() + lo.abs().max(hi.abs());
            mu.integrate_against(
                |l: T| cis(l * x) * phi.fourier(-l),
                osc,
                |d: &Density<T>, l: T| (crate::rkhs::envelope_tail(d, &env, &one, l), zero),
                tol,
            )
            .map(|e| e.value)
        }
        KernelForm::RegularizedSeries { frequencies, regularization } => {
            if let Regularization::Truncate(n) = regularization {
                let spacing = frequencies
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(T::infinity(), T::min);
                if spacing.is_finite() {
                    let tail = T::lit(2.0) * phi.fourier_envelope().lattice_tail(T::from_usize_lossy(*n), spacing, T::one());
                    if !(tail <= tol) {
                        return Err(Error::NonConvergent { estimate: tail.to_f64_lossy(), tolerance: tol.to_f64_lossy() });
                    }
                }
            }
            Ok(frequencies
                .iter()
                .fold(zero, |acc, &l| acc + cis(l * x) * phi.fourier(-l) * regularization.weight(l)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn direct_fourier(phi: &TestFunction<f64>, lambda: f64) -> Complex<f64> {
        let (lo, hi) = phi.effective_interval(1e-18);
        let mut breaks = vec![lo, hi];
        breaks.extend(phi.breakpoints());
        let panels = ((hi - lo) * lambda.abs() / PI).ceil() as usize + 4;
        crate::quad::integrate_panels(
            |x: f64| cis(lambda * x) * phi.eval(x),
            lo,
            hi,
            panels,
            &breaks,
            &Quadrature::new(1e-13),
        )
        .unwrap()
        .value
    }

    #[test]
    fn gaussian_transform_closed_form() {
        let g = TestFunction::<f64>::standard_gaussian();
        for &l in &[0.0f64, 0.5, 1.0, 2.7] {
            let expect = (2.0 * PI).sqrt() * (-l * l / 2.0).exp();
            assert!((g.fourier(l) - Complex::new(expect, 0.0)).norm() < 1e-14);
            assert!((g.fourier(l) - direct_fourier(&g, l)).norm() < 1e-11);
        }
    }

    #[test]
    fn indicator_transform_and_limit() {
        let x = 1.5;
        let ind = TestFunction::indicator(0.0, x);
        let l = 0.8;
        let expect = (cis(l * x) - Complex::new(1.0, 0.0)) / Complex::new(0.0, l);
        assert!((ind.fourier(l) - expect).norm() < 1e-15);
        assert_eq!(ind.fourier(0.0), Complex::new(x, 0.0));
        assert!((ind.fourier(1e-9) - Complex::new(x, 0.0)).norm() < 1e-8);
        assert!((ind.fourier(3.3) - direct_fourier(&ind, 3.3)).norm() < 1e-11);
    }

    #[test]
    fn zero_function() {
        let z = TestFunction::<f64>::zero();
        assert!(z.is_zero());
        assert_eq!(z.fourier(2.0), Complex::zero());
        assert_eq!(z.eval(0.3), 0.0);
        assert_eq!(z.fourier_envelope(), Envelope::Zero);
    }

    #[test]
    fn bspline_values_and_transform() {
        // quadratic cardinal spline: 1/2 t², (-2t² + 6t - 3)/2, (3-t)²/2
        let b = TestFunction::<f64>::bspline(3, 1.0);
        assert!((b.eval(0.5) - 0.125).abs() < 1e-15);
        assert!((b.eval(1.5) - 0.75).abs() < 1e-15);
        assert!((b.eval(2.5) - 0.125).abs() < 1e-15);
        assert_eq!(b.eval(3.2), 0.0);
        for &l in &[0.0, 0.7, 4.0, 11.0] {
            assert!((b.fourier(l) - direct_fourier(&b, l)).norm() < 1e-11, "λ={l}");
        }
        let scaled = TestFunction::BSpline { order: 4, scale: 0.5, origin: -1.0 };
        assert!((scaled.fourier(2.3) - direct_fourier(&scaled, 2.3)).norm() < 1e-11);
    }

    #[test]
    fn bspline_derivative_matches_finite_differences() {
        let b = TestFunction::<f64>::BSpline { order: 3, scale: 0.7, origin: 0.2 };
        let d = b.derivative().unwrap();
        match &d {
            TestFunction::Combination(terms) => {
                assert_eq!(terms.len(), 2);
                assert!(terms.iter().all(|(_, f)| matches!(f, TestFunction::BSpline { order: 2, .. })));
            }
            _ => panic!("expected a B-spline difference"),
        }
        let h = 1e-6;
        for &x in &[0.3, 0.61, 1.0, 1.7, 2.05] {
            let fd = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
            assert!((d.eval(x) - fd).abs() < 1e-6, "x={x}");
        }
        assert!(matches!(
            TestFunction::<f64>::bspline(1, 1.0).derivative(),
            Err(Error::NotDifferentiable(_))
        ));
    }

    #[test]
    fn gaussian_derivative_in_family() {
        let g = TestFunction::<f64>::standard_gaussian();
        let d = g.derivative().unwrap();
        for &x in &[-1.3, 0.0, 0.4, 2.0] {
            assert!((d.eval(x) + x * (-x * x / 2.0).exp()).abs() < 1e-15);
        }
        let l = 2.0;
        let lhs = d.fourier(l) + Complex::new(0.0, l) * g.fourier(l);
        assert!(lhs.norm() < 1e-15);
        let d2 = d.derivative().unwrap();
        // (x² - 1) e^{-x²/2}
        assert!((d2.eval(1.5) - (1.25) * (-1.125f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = TestFunction::<f64>::bump(0.3, 0.8);
        let d1 = b.derivative().unwrap();
        let d2 = d1.derivative().unwrap();
        let h = 1e-5;
        for &x in &[-0.2, 0.1, 0.5, 0.9] {
            let fd1 = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
            let fd2 = (d1.eval(x + h) - d1.eval(x - h)) / (2.0 * h);
            assert!((d1.eval(x) - fd1).abs() < 1e-8, "x={x}");
            assert!((d2.eval(x) - fd2).abs() < 1e-6, "x={x}");
        }
        assert_eq!(d1.eval(1.2), 0.0);
        assert_eq!(bump_derivative_poly(1), vec![0.0, -2.0]);
    }

    #[test]
    fn indicator_is_not_differentiable() {
        let ind = TestFunction::<f64>::indicator(0.0, 1.0);
        assert!(matches!(ind.derivative(), Err(Error::NotDifferentiable(_))));
    }

    #[test]
    fn bump_transform_matches_oscillatory_quadrature() {
        let b = TestFunction::bump(0.25, 1.0);
        for i in 0..=40 {
            let l = -20.0 + i as f64;
            let diff = (b.fourier(l) - direct_fourier(&b, l)).norm();
            assert!(diff < 1e-8, "λ={l}: {diff:e}");
        }
        let (_, err) = b.fourier_with_error(7.0);
        assert!(err < 1e-12);
    }

    #[test]
    fn fft_grid_transform_agrees_with_quadrature() {
        let b = TestFunction::<f64>::bump(0.0, 1.0);
        let grid = b.fft_transform(512).unwrap();
        for (l, v) in grid.iter().filter(|(l, _)| l.abs() <= 20.0) {
            assert!((*v - direct_fourier(&b, *l)).norm() < 1e-8, "λ={l}");
        }
        assert!(TestFunction::<f64>::standard_gaussian().fft_transform(64).is_err());
    }

    #[test]
    fn envelopes_bound_transforms() {
        let fams = vec![
            TestFunction::<f64>::standard_gaussian(),
            TestFunction::indicator(0.0, 1.0),
            TestFunction::bspline(3, 1.0),
            TestFunction::bump(0.0, 1.0),
            TestFunction::bump(0.0, 0.1).derivative().unwrap(),
            TestFunction::standard_gaussian().derivative().unwrap(),
            TestFunction::bspline(2, 0.5).convolve(&TestFunction::indicator(0.0, 1.0)),
        ];
        for f in &fams {
            let env = f.fourier_envelope();
            for i in 1..200 {
                let l = 0.37 * i as f64;
                assert!(f.fourier(l).norm() <= env.eval(l) * (1.0 + 1e-9) + 1e-14, "{f:?} λ={l}");
            }
        }
    }

    #[test]
    fn mollifier_has_unit_mass() {
        for n in [1u32, 10, 100] {
            let m = Mollifier::new(n, 0.4).test_function();
            let (lo, hi) = m.effective_interval(0.0);
            let mass = integrate(|x: f64| m.eval(x), &[lo, 0.4, hi], &Quadrature::new(1e-15)).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-12, "n={n}: {mass}");
            assert!((m.l1_norm() - 1.0).abs() < 1e-12);
        }
        assert!((bump_mass() - 0.443_993_816_168_078_65).abs() < 1e-14);
    }

    #[test]
    fn gaussian_convolution_closed_form() {
        let a = TestFunction::<f64>::gaussian(0.5, 1.0);
        let b = TestFunction::gaussian(-0.2, 0.6);
        let c = a.convolve(&b);
        let generic = TestFunction::Convolution(Box::new(a.clone()), Box::new(b.clone()));
        for &x in &[-1.0, 0.3, 1.1] {
            assert!((c.eval(x) - generic.eval(x)).abs() < 1e-11);
        }
        for &l in &[0.0, 1.0, 2.5] {
            assert!((c.fourier(l) - a.fourier(l) * b.fourier(l)).norm() < 1e-14);
        }
    }

    #[test]
    fn translation_shifts_phase() {
        let fams = vec![
            TestFunction::<f64>::standard_gaussian(),
            TestFunction::indicator(0.0, 1.0),
            TestFunction::bspline(3, 1.0),
            TestFunction::bump(0.0, 1.0),
        ];
        for f in &fams {
            let t = 1.7;
            let g = f.translate(t);
            assert!((g.eval(0.9 + t) - f.eval(0.9)).abs() < 1e-15);
            let l = 2.2;
            assert!((g.fourier(l) - cis(l * t) * f.fourier(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let f = TestFunction::Combination(vec![(2.0, TestFunction::indicator(0.0, 1.0))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"combination","params":[[2.0,{"family":"indicator","params":{"a":0.0,"b":1.0}}]]}"#);
    }
}
