//! Elements `φ∗f` of the reproducing kernel Hilbert space of a positive definite `f`.
//!
//! Every norm is available two ways: the x-side double integral
//! `∫∫ φ(x) ψ(y) f(x-y) dx dy` and the frequency side `∫ φ̂ conj(ψ̂) dμ`.
//! Squared norms are returned throughout.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quad::{integrate, Estimate, Quadrature};
use crate::scalar::{cis, Real};
use crate::spectra::{gram_matrix, Density, KernelCatalogEntry, PdKernel, SpectralMeasure};
use crate::testfn::{Envelope, Mollifier, TestFunction};

/// The function `φ∗f`, kept as the pair `(φ, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RkhsElement<T> {
    pub phi: TestFunction<T>,
    pub kernel: PdKernel<T>,
}

impl<T: Real> RkhsElement<T> {
    pub fn new(phi: TestFunction<T>, kernel: PdKernel<T>) -> Self {
        Self { phi, kernel }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero()
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.kernel != other.kernel {
            return Err(Error::KernelMismatch);
        }
        let phi = TestFunction::Combination(vec![(T::one(), self.phi.clone()), (-T::one(), other.phi.clone())]);
        Ok(Self::new(phi, self.kernel.clone()))
    }

    /// `U_t(φ∗f) = φ(· - t)∗f`.
    pub fn translate(&self, t: T) -> Self {
        Self::new(self.phi.translate(t), self.kernel.clone())
    }
}

/// `U_t x`; see [`RkhsElement::translate`].
pub fn translate<T: Real>(x: &RkhsElement<T>, t: T) -> RkhsElement<T> {
    x.translate(t)
}

/// `φ∗x`, whose norm is at most `‖φ‖_{L¹} ‖x‖`.
pub fn convolve_element<T: Real>(phi: &TestFunction<T>, x: &RkhsElement<T>) -> RkhsElement<T> {
    RkhsElement::new(phi.convolve(&x.phi), x.kernel.clone())
}

/// Bound on `∫_{|λ|>L} a(λ) b(λ) ρ(λ) dλ` from envelopes `a, b`.
pub(crate) fn envelope_tail<T: Real>(d: &Density<T>, a: &Envelope<T>, b: &Envelope<T>, cutoff: T) -> T {
    let (ea, eb) = (a.eval(cutoff), b.eval(cutoff));
    if ea == T::zero() || eb == T::zero() {
        return T::zero();
    }
    let k = a.decay_order(cutoff) + b.decay_order(cutoff);
    ea * eb * cutoff.powf(k) * d.weighted_tail(cutoff, k)
}

/// Angular frequency at which `φ̂ conj(ψ̂)` oscillates, for panel sizing.
fn pairing_oscillation<T: Real>(phi: &TestFunction<T>, psi: &TestFunction<T>) -> T {
    let eps = T::lit(1e-8);
    let (a0, a1) = phi.effective_interval(eps);
    let (b0, b1) = psi.effective_interval(eps);
    let mid = ((a0 + a1) - (b0 + b1)).abs() / T::lit(2.0);
    mid + (a1 - a0 + b1 - b0) / T::lit(2.0)
}

/// `∫ φ̂ conj(ψ̂) dμ` with certified tails.
pub fn spectral_pairing<T: Real>(
    phi: &TestFunction<T>,
    psi: &TestFunction<T>,
    mu: &SpectralMeasure<T>,
    tol: T,
) -> Result<Estimate<Complex<T>, T>> {
    if phi.is_zero() || psi.is_zero() {
        return Ok(Estimate::exact(Complex::new(T::zero(), T::zero())));
    }
    let (ea, eb) = (phi.fourier_envelope(), psi.fourier_envelope());
    let phases = phi.step_phases().zip(psi.step_phases());
    mu.integrate_against(
        |l: T| phi.fourier(l) * psi.fourier(l).conj(),
        pairing_oscillation(phi, psi),
        |d: &Density<T>, l: T| {
            let crude = (envelope_tail(d, &ea, &eb, l), Complex::new(T::zero(), T::zero()));
            let Some((p, q)) = &phases else { return crude };
            // φ̂ conj(ψ̂) = λ⁻² Σ c conj(e) e^{iλ(t - s)}; ρ is even so only cosines survive
            let mut bound = T::zero();
            let mut est = Complex::new(T::zero(), T::zero());
            for (c, t) in p {
                for (e, s) in q {
                    let (b, v) = d.cosine_tail(l, *t - *s);
                    let w = *c * e.conj();
                    bound = bound + w.norm() * b;
                    est = est + w * v;
                }
            }
            if bound < crude.0 {
                (bound, est)
            } else {
                crude
            }
        },
        tol,
    )
}

fn require_partner<T: Real>(kernel: &PdKernel<T>, mu: &SpectralMeasure<T>) -> Result<()> {
    if kernel.spectral_measure()? == *mu {
        Ok(())
    } else {
        Err(Error::MeasureMismatch("measure is not the spectral measure of the element's kernel".into()))
    }
}

/// `‖φ∗f‖² = ∫ |φ̂|² dμ`.
pub fn norm_spectral<T: Real>(x: &RkhsElement<T>, mu: &SpectralMeasure<T>, tol: T) -> Result<T> {
    require_partner(&x.kernel, mu)?;
    spectral_pairing(&x.phi, &x.phi, mu, tol).map(|e| e.value.re.max(T::zero()))
}

/// `∫∫ φ(x) ψ(y) f(x-y) dx dy` for a continuous kernel, computed as
/// `∫ f(t) C(t) dt` with the cross-correlation `C(t) = ∫ φ(y+t) ψ(y) dy`.
fn double_integral<T: Real>(
    kernel: &PdKernel<T>,
    phi: &TestFunction<T>,
    psi: &TestFunction<T>,
    tol: T,
) -> Result<Complex<T>> {
    let (a0, a1) = phi.effective_interval(T::zero());
    let (b0, b1) = psi.effective_interval(T::zero());
    let (t_lo, t_hi) = (a0 - b1, a1 - b0);
    let (pa, pb) = (phi.breakpoints(), psi.breakpoints());
    let mut t_breaks: Vec<T> = kernel.kinks();
    for a in &pa {
        for b in &pb {
            t_breaks.push(*a - *b);
        }
    }
    t_breaks.retain(|t| *t > t_lo && *t < t_hi);
    let n_uniform = 16usize;
    let h = (t_hi - t_lo) / T::from_usize_lossy(n_uniform);
    t_breaks.extend((0..=n_uniform).map(|i| t_lo + h * T::from_usize_lossy(i)));

    let span = (t_hi - t_lo).max(T::one());
    let inner_q = Quadrature::new(tol / (T::lit(8.0) * span)).with_rel_tol(T::lit(1e-14));
    let kernel_tol = tol / (T::lit(8.0) * span * (a1 - a0).max(T::one()) * (b1 - b0).max(T::one()));
    let mut failure: Option<Error> = None;
    let outer = integrate(
        |t: T| -> Complex<T> {
            let lo = (a0 - t).max(b0);
            let hi = (a1 - t).min(b1);
            if lo >= hi || failure.is_some() {
                return Complex::new(T::zero(), T::zero());
            }
            let mut ys: Vec<T> = vec![lo, hi];
            ys.extend(pa.iter().map(|p| *p - t).filter(|y| *y > lo && *y < hi));
            ys.extend(pb.iter().copied().filter(|y| *y > lo && *y < hi));
            let c = match integrate(|y: T| phi.eval(y + t) * psi.eval(y), &ys, &inner_q) {
                Ok(e) => e.value,
                Err(e) => {
                    failure = Some(e);
                    return Complex::new(T::zero(), T::zero());
                }
            };
            if c == T::zero() {
                return Complex::new(T::zero(), T::zero());
            }
            match kernel.eval(t, kernel_tol) {
                Ok(v) => v * c,
                Err(e) => {
                    failure = Some(e);
                    Complex::new(T::zero(), T::zero())
                }
            }
        },
        &t_breaks,
        &Quadrature::new(tol / T::lit(2.0)).with_rel_tol(T::lit(1e-14)),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(outer.value),
    }
}

/// `⟨φ∗f, ψ∗f⟩`: the x-side double integral for continuous kernels, the frequency side
/// for tempered ones.
pub fn inner_product_double<T: Real>(x: &RkhsElement<T>, y: &RkhsElement<T>, tol: T) -> Result<Complex<T>> {
    if x.kernel != y.kernel {
        return Err(Error::KernelMismatch);
    }
    if x.is_zero() || y.is_zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    if x.kernel.is_continuous() {
        double_integral(&x.kernel, &x.phi, &y.phi, tol)
    } else {
        let mu = x.kernel.spectral_measure()?;
        spectral_pairing(&x.phi, &y.phi, &mu, tol).map(|e| e.value)
    }
}

/// `‖φ∗f‖²` from the double integral.
pub fn norm_double_integral<T: Real>(x: &RkhsElement<T>, tol: T) -> Result<T> {
    let v = inner_product_double(x, x, tol)?;
    if v.im.abs() > tol {
        return Err(Error::NonConvergent { estimate: v.im.abs().to_f64_lossy(), tolerance: tol.to_f64_lossy() });
    }
    Ok(v.re.max(T::zero()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub rel_err: T,
}

impl<T: Real> IdentityReport<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale == T::zero() { T::zero() } else { (lhs - rhs).abs() / scale };
        Self { lhs, rhs, rel_err }
    }
}

/// Both sides of `‖φ∗f‖²_{double} = ∫ |φ̂|² dμ`, each to `tol/2`.
pub fn verify_isometry<T: Real>(phi: &TestFunction<T>, pair: &KernelCatalogEntry<T>, tol: T) -> Result<IdentityReport<T>> {
    if !pair.kernel.is_continuous() {
        return Err(Error::TemperedKernel("the x-side of the isometry"));
    }
    let half = tol / T::lit(2.0);
    let x = RkhsElement::new(phi.clone(), pair.kernel.clone());
    let lhs = norm_double_integral(&x, half)?;
    let rhs = norm_spectral(&x, &pair.measure, half)?;
    Ok(IdentityReport::new(lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReproducingReport<T> {
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
    pub diff: T,
}

/// Mollifier scale used to stand in for `f(· - x0)` inside the double integral.
pub const REPRODUCING_SCALE: u32 = 1000;

/// `⟨f(· - x0), ψ∗f⟩ = (ψ∗f)(x0)`.
///
/// The left side pairs the mollified element `φ_{n,x0}∗f` (n = [`REPRODUCING_SCALE`])
/// with `ψ∗f` through the double integral; the right side is
/// [`convolve_kernel`](crate::testfn::convolve_kernel) at `x0`.
pub fn reproducing_check<T: Real>(kernel: &PdKernel<T>, x0: T, psi: &TestFunction<T>, tol: T) -> Result<ReproducingReport<T>> {
    if !kernel.is_continuous() {
        return Err(Error::TemperedKernel("the reproducing property"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    if psi.is_zero() {
        return Ok(ReproducingReport { lhs: zero, rhs: zero, diff: T::zero() });
    }
    let half = tol / T::lit(2.0);
    let m = Mollifier::new(REPRODUCING_SCALE, x0).test_function();
    let lhs = inner_product_double(&RkhsElement::new(m, kernel.clone()), &RkhsElement::new(psi.clone(), kernel.clone()), half)?;
    let rhs = crate::testfn::convolve_kernel(psi, kernel, x0, half)?;
    Ok(ReproducingReport { lhs, rhs, diff: (lhs - rhs).norm() })
}

/// `⟨f(· - x1), f(· - x2)⟩` via mollifier approximants at scale `n`, against `f(x1 - x2)`.
pub fn factorization_check<T: Real>(kernel: &PdKernel<T>, x1: T, x2: T, n: u32, tol: T) -> Result<ReproducingReport<T>> {
    let a = RkhsElement::new(Mollifier::new(n, x1).test_function(), kernel.clone());
    let b = RkhsElement::new(Mollifier::new(n, x2).test_function(), kernel.clone());
    let lhs = inner_product_double(&a, &b, tol / T::lit(2.0))?;
    let rhs = kernel.eval(x1 - x2, tol / T::lit(2.0))?;
    Ok(ReproducingReport { lhs, rhs, diff: (lhs - rhs).norm() })
}

/// `‖φ_{n,x0}∗f - f(· - x0)‖` in `H_f`, computed as `(∫ |φ̂_{n,x0}(λ) - e^{iλx0}|² dμ)^{1/2}`.
///
/// The constant term's tail beyond the cutoff is the exact tail mass of `μ`.
pub fn mollifier_distance<T: Real>(mu: &SpectralMeasure<T>, mollifier: &Mollifier<T>, tol: T) -> Result<T> {
    let phi = mollifier.test_function();
    let x0 = mollifier.x;
    let env = phi.fourier_envelope();
    let one = Envelope::Power { coeff: T::one(), order: T::zero() };
    let osc = pairing_oscillation(&phi, &phi) + x0.abs();
    let v = mu.integrate_against(
        |l: T| (phi.fourier(l) - cis(l * x0)).norm_sqr(),
        osc,
        |d: &Density<T>, l: T| {
            // |φ̂|² and the cross term are bounded by envelopes; the 1 integrates exactly
            let bound = envelope_tail(d, &env, &env, l) + T::lit(2.0) * envelope_tail(d, &env, &one, l);
            (bound, d.tail_mass(l))
        },
        tol,
    )?;
    Ok(v.value.max(T::zero()).sqrt())
}

/// `∫ (|φ̂|² + |(Dφ)^|²) dμ/(1+λ²)` against `∫ |φ̂|² dμ`.
pub fn sobolev_identity<T: Real>(phi: &TestFunction<T>, pair: &KernelCatalogEntry<T>, tol: T) -> Result<IdentityReport<T>> {
    if !phi.is_differentiable() {
        return Err(Error::NotDifferentiable("test function"));
    }
    if phi.is_zero() {
        return Ok(IdentityReport::new(T::zero(), T::zero()));
    }
    let dphi = phi.derivative()?;
    let mu = &pair.measure;
    let half = tol / T::lit(2.0);
    let (e0, e1) = (phi.fourier_envelope(), dphi.fourier_envelope());
    let osc = pairing_oscillation(phi, phi);
    let lhs = mu.integrate_against(
        |l: T| (phi.fourier(l).norm_sqr() + dphi.fourier(l).norm_sqr()) / (T::one() + l * l),
        osc,
        |d: &Density<T>, l: T| {
            let w = |e: &Envelope<T>| {
                let k = T::lit(2.0) * e.decay_order(l);
                e.eval(l).powi(2) * l.powf(k) * d.weighted_tail(l, k + T::lit(2.0))
            };
            (w(&e0) + w(&e1), T::zero())
        },
        half,
    )?;
    let rhs = spectral_pairing(phi, phi, mu, half)?;
    Ok(IdentityReport::new(lhs.value, rhs.value.re))
}

/// A finite system `(x_i, c_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config<T> {
    pub points: Vec<T>,
    pub coefficients: Vec<Complex<T>>,
}

/// Deterministic sampler of finite systems: for each size, `per_size` point sets drawn
/// from a Halton sequence in `[-radius, radius]`, each with Halton coefficients in the
/// unit square and with the ratio-maximizing coefficients `G⁻¹ ξ̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSampler<T> {
    pub radius: T,
    pub sizes: Vec<usize>,
    pub per_size: usize,
}

impl<T: Real> ConfigSampler<T> {
    pub fn new(radius: T) -> Self {
        Self { radius, sizes: vec![2, 4, 8], per_size: 32 }
    }
}

/// Radical inverse of `i` in base `b` (van der Corput).
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport<T> {
    pub a0_estimate: T,
    pub witness: Option<Config<T>>,
    pub evaluated: usize,
    /// Configurations skipped because `Σ c_i c̄_j f(x_i - x_j)` fell below tolerance.
    pub degenerate: usize,
}

/// Sampled lower bound for the smallest `A₀` with
/// `|Σ c_i conj(ξ(x_i))|² ≤ A₀ Σ c_i c̄_j f(x_i - x_j)`.
pub fn membership_bound<T, F>(kernel: &PdKernel<T>, xi: F, sampler: &ConfigSampler<T>, tol: T) -> Result<MembershipReport<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let mut report = MembershipReport { a0_estimate: T::zero(), witness: None, evaluated: 0, degenerate: 0 };
    let mut counter: u64 = 1;
    let halton = |base: u64, idx: u64| T::lit(2.0 * radical_inverse(idx, base) - 1.0);
    for &size in &sampler.sizes {
        for _ in 0..sampler.per_size {
            let points: Vec<T> = (0..size)
                .map(|_| {
                    counter += 1;
                    halton(2, counter) * sampler.radius
                })
                .collect();
            let coeffs: Vec<Complex<T>> = (0..size)
                .map(|j| {
                    let idx = counter * 8 + j as u64;
                    Complex::new(halton(3, idx), halton(5, idx))
                })
                .collect();
            let g = gram_matrix(kernel, &points, tol)?;
            let v: Vec<Complex<T>> = points.iter().map(|&x| xi(x)).collect();
            let mut candidates = vec![coeffs];
            // a = G⁻¹ v maximizes |a* v|² / a* G a; the coefficients are c = conj(a)
            if let Some(a) = g.solve_hpd(&v) {
                candidates.push(a.iter().map(|z| z.conj()).collect());
            }
            for c in candidates {
                match membership_ratio(&g, &v, &c, tol) {
                    Some(r) => {
                        report.evaluated += 1;
                        if r > report.a0_estimate || report.witness.is_none() {
                            report.a0_estimate = r;
                            report.witness = Some(Config { points: points.clone(), coefficients: c });
                        }
                    }
                    None => report.degenerate += 1,
                }
            }
        }
    }
    Ok(report)
}

fn membership_ratio<T: Real>(g: &ComplexMatrix<T>, v: &[Complex<T>], c: &[Complex<T>], tol: T) -> Option<T> {
    let n = c.len();
    let mut rhs = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            rhs = rhs + c[i] * c[j].conj() * g.get(i, j);
        }
    }
    if rhs.re <= tol {
        return None;
    }
    let lhs = c.iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |acc, (ci, vi)| acc + *ci * vi.conj());
    Some(lhs.norm_sqr() / rhs.re)
}

/// Estimates over increasing radii; `diverging` flags a strictly increasing sequence
/// whose last value exceeds the first tenfold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipScan<T> {
    pub radii: Vec<T>,
    pub estimates: Vec<T>,
    pub diverging: bool,
}

pub fn membership_scan<T, F>(kernel: &PdKernel<T>, xi: F, radii: &[T], tol: T) -> Result<MembershipScan<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let mut estimates = Vec::with_capacity(radii.len());
    for &r in radii {
        estimates.push(membership_bound(kernel, &xi, &ConfigSampler::new(r), tol)?.a0_estimate);
    }
    let increasing = estimates.windows(2).all(|w| w[1] > w[0]);
    let diverging = increasing
        && match (estimates.first(), estimates.last()) {
            (Some(&a), Some(&b)) => b > T::lit(10.0) * a,
            _ => false,
        };
    Ok(MembershipScan { radii: radii.to_vec(), estimates, diverging })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{catalog_entry, ClosedForm};
    use std::f64::consts::{E, PI};

    fn exp_kernel() -> PdKernel<f64> {
        PdKernel::closed(ClosedForm::Exponential { rate: 1.0 })
    }

    #[test]
    fn indicator_exponential_norm_both_ways() {
        let x = RkhsElement::new(TestFunction::indicator(0.0, 1.0), exp_kernel());
        let d = norm_double_integral(&x, 1e-11).unwrap();
        assert!((d - 2.0 / E).abs() < 1e-10, "{d}");
        let mu = exp_kernel().spectral_measure().unwrap();
        let s = norm_spectral(&x, &mu, 1e-10).unwrap();
        assert!((s - 2.0 / E).abs() < 1e-9, "{s}");
    }

    #[test]
    fn cosine_gaussian_norms() {
        let pair = catalog_entry::<f64>("cos").unwrap();
        let r = verify_isometry(&TestFunction::standard_gaussian(), &pair, 1e-11).unwrap();
        assert!((r.rhs - 2.0 * PI / E).abs() < 1e-12);
        assert!((r.lhs - 2.0 * PI / E).abs() < 1e-10);
        assert!(r.rel_err < 1e-8);
        let z = verify_isometry(&TestFunction::zero(), &pair, 1e-11).unwrap();
        assert_eq!((z.lhs, z.rhs, z.rel_err), (0.0, 0.0, 0.0));
    }

    #[test]
    fn measure_mismatch_is_reported() {
        let x = RkhsElement::new(TestFunction::standard_gaussian(), exp_kernel());
        let wrong = catalog_entry::<f64>("gaussian").unwrap().measure;
        assert!(matches!(norm_spectral(&x, &wrong, 1e-8), Err(Error::MeasureMismatch(_))));
    }

    #[test]
    fn kernel_mismatch_is_reported() {
        let x = RkhsElement::new(TestFunction::standard_gaussian(), exp_kernel());
        let y = RkhsElement::new(TestFunction::standard_gaussian(), PdKernel::closed(ClosedForm::Cos { frequency: 1.0 }));
        assert!(matches!(inner_product_double(&x, &y, 1e-8), Err(Error::KernelMismatch)));
    }

    #[test]
    fn reproducing_property() {
        let r = reproducing_check(&exp_kernel(), 0.5, &TestFunction::standard_gaussian(), 1e-10).unwrap();
        assert!(r.diff < 1e-6, "{r:?}");
        let cos = PdKernel::closed(ClosedForm::Cos { frequency: 1.0 });
        let r = reproducing_check(&cos, 0.0, &TestFunction::bump(0.0, 1.0), 1e-10).unwrap();
        assert!(r.diff < 1e-6, "{r:?}");
        let r = reproducing_check(&cos, 0.0, &TestFunction::zero(), 1e-10).unwrap();
        assert_eq!(r.diff, 0.0);
    }

    #[test]
    fn factorization_through_mollifiers() {
        let r = factorization_check(&exp_kernel(), 0.3, -0.4, 200, 1e-10).unwrap();
        assert!(r.diff < 1e-4, "{r:?}");
    }

    #[test]
    fn membership_of_translate_is_bounded_by_f0() {
        let k = exp_kernel();
        let rep = membership_bound(&k, |x: f64| Complex::new((-(x - 0.3).abs()).exp(), 0.0), &ConfigSampler::new(3.0), 1e-12)
            .unwrap();
        assert!(rep.a0_estimate <= 1.0 + 1e-6, "{}", rep.a0_estimate);
        assert!(rep.a0_estimate > 0.5);
        let zero = membership_bound(&k, |_x: f64| Complex::new(0.0, 0.0), &ConfigSampler::new(3.0), 1e-12).unwrap();
        assert_eq!(zero.a0_estimate, 0.0);
    }

    #[test]
    fn unbounded_xi_diverges() {
        let scan = membership_scan(&exp_kernel(), |x: f64| Complex::new(x, 0.0), &[1.0, 10.0, 100.0], 1e-12).unwrap();
        assert!(scan.diverging, "{scan:?}");
    }

    #[test]
    fn sobolev_cos_gaussian() {
        let pair = catalog_entry::<f64>("cos").unwrap();
        let r = sobolev_identity(&TestFunction::standard_gaussian(), &pair, 1e-12).unwrap();
        assert!((r.lhs - 2.0 * PI / E).abs() < 1e-12 && r.rel_err < 1e-12);
        assert!(matches!(
            sobolev_identity(&TestFunction::indicator(0.0, 1.0), &pair, 1e-10),
            Err(Error::NotDifferentiable(_))
        ));
    }

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }
}
