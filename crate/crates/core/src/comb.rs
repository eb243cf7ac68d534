//! The Dirac comb `μ = Σ δ_{ns}`, its formal series `f(x) = Σ e^{insx}` and the
//! periodic model of `H_f`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Estimate, Quadrature};
use crate::scalar::{cis, Real};
use crate::spectra::{panel_breaks, Atom, GrowthClass, PdKernel, Regularization, SpectralMeasure};
use crate::testfn::TestFunction;

/// Largest bandwidth the tail extension will reach before giving up.
const MAX_ATOMS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracComb<T> {
    pub spacing: T,
    /// Bandwidth `N`: atoms with `|λ| ≤ N` are summed explicitly.
    pub truncation: usize,
    pub regularization: Regularization,
}

impl<T: Real> Default for DiracComb<T> {
    fn default() -> Self {
        Self { spacing: T::one(), truncation: 64, regularization: Regularization::Fejer(64) }
    }
}

impl<T: Real> DiracComb<T> {
    pub fn new(spacing: T, truncation: usize, regularization: Regularization) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidArgument(format!("comb spacing must be positive, got {}", spacing.to_f64_lossy())));
        }
        Ok(Self { spacing, truncation, regularization })
    }

    /// Indices `n` with `|n s| ≤ band`.
    fn indices(&self, band: usize) -> std::ops::RangeInclusive<i64> {
        let m = (T::from_usize_lossy(band) / self.spacing).floor().to_f64_lossy() as i64;
        -m..=m
    }

    fn frequency(&self, n: i64) -> T {
        self.spacing * T::lit(n as f64)
    }

    /// The atoms with `|λ| ≤ N`, unit weights, tempered of order 1.
    pub fn measure(&self) -> Result<SpectralMeasure<T>> {
        let atoms = self.indices(self.truncation).map(|n| Atom { location: self.frequency(n), weight: T::one() }).collect();
        SpectralMeasure::with_growth(atoms, None, GrowthClass::TemperedOfOrder(1))
    }

    /// The regularized series kernel `Σ w(λ) e^{iλx}`.
    pub fn kernel(&self) -> PdKernel<T> {
        PdKernel::dirac_comb(self.spacing, self.regularization)
    }

    /// `Σ_{|λ|≤N} w(λ) e^{iλx}`.
    pub fn regularized_eval(&self, x: T) -> Complex<T> {
        self.indices(self.truncation)
            .map(|n| self.frequency(n))
            .fold(Complex::new(T::zero(), T::zero()), |acc, l| acc + cis(l * x) * self.regularization.weight(l))
    }

    /// `Σ_n 1/(1 + λ_n²)` with the remainder after `|n| > m` bounded by `2/(s² m)`.
    pub fn temperedness_sum(&self, tol: T) -> Estimate<T, T> {
        let s2 = self.spacing * self.spacing;
        let m = (T::lit(2.0) / (s2 * tol)).ceil().to_f64_lossy().min(1e8) as i64;
        let m = m.max(1);
        let mut sum = T::one();
        for n in (1..=m).rev() {
            let l = self.frequency(n);
            sum = sum + T::lit(2.0) / (T::one() + l * l);
        }
        Estimate { value: sum, error: T::lit(2.0) / (s2 * T::lit(m as f64)) }
    }
}

/// `h(x) = Σ c_n e^{-insx}`, with `Σ_{unlisted} |c_n|² ≤ tail_bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicFunction<T> {
    pub spacing: T,
    pub coefficients: Vec<(i64, Complex<T>)>,
    pub tail_bound: T,
}

impl<T: Real> PeriodicFunction<T> {
    pub fn new(coefficients: Vec<(i64, Complex<T>)>) -> Self {
        Self { spacing: T::one(), coefficients, tail_bound: T::zero() }
    }

    pub fn period(&self) -> T {
        T::TAU() / self.spacing
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        self.coefficients
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (n, c)| acc + *c * cis(-self.spacing * T::lit(*n as f64) * x))
    }

    /// `(1/P) ∫_{-P/2}^{P/2} |h|²` by quadrature.
    pub fn mean_square_quadrature(&self, tol: T) -> Result<T> {
        let p = self.period();
        let top = self.coefficients.iter().map(|(n, _)| n.unsigned_abs()).max().unwrap_or(0);
        let osc = T::lit(2.0 * top as f64) * self.spacing;
        let breaks = panel_breaks(-p / T::lit(2.0), p / T::lit(2.0), osc)?;
        let v = integrate(|x: T| self.eval(x).norm_sqr(), &breaks, &Quadrature::new(tol * p).with_rel_tol(T::lit(1e-15)))?;
        Ok(v.value / p)
    }
}

/// `Σ |c_n|²`, summed smallest first.
pub fn periodic_l2_norm<T: Real>(h: &PeriodicFunction<T>) -> T {
    let mut terms: Vec<T> = h.coefficients.iter().map(|(_, c)| c.norm_sqr()).collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    terms.into_iter().sum()
}

/// Smallest bandwidth `≥ N` whose discarded tail `Σ_{|λ|>band} |φ̂(λ)|²` is certified below `tol`.
fn certified_band<T: Real>(phi: &TestFunction<T>, comb: &DiracComb<T>, tol: T) -> Result<(usize, T)> {
    let env = phi.fourier_envelope();
    let mut band = comb.truncation.max(1);
    loop {
        let last = comb.frequency(*comb.indices(band).end());
        let tail = T::lit(2.0) * env.lattice_tail(last, comb.spacing, T::lit(2.0));
        if tail <= tol {
            return Ok((band, tail));
        }
        if band >= MAX_ATOMS {
            return Err(Error::TailNotCertified { bound: tail.to_f64_lossy(), tolerance: tol.to_f64_lossy() });
        }
        band *= 2;
    }
}

/// The coefficients `φ̂(ns)` of `φ∗f`, out to the bandwidth where the tail is certified.
pub fn comb_element<T: Real>(phi: &TestFunction<T>, comb: &DiracComb<T>, tol: T) -> Result<PeriodicFunction<T>> {
    let (band, tail) = certified_band(phi, comb, tol)?;
    let coefficients = comb.indices(band).map(|n| (n, phi.fourier(comb.frequency(n)))).collect();
    Ok(PeriodicFunction { spacing: comb.spacing, coefficients, tail_bound: tail })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CombIdentity<T> {
    pub xside: T,
    pub freqside: T,
    pub tail_bound: T,
    /// Bandwidth actually summed; larger than `N` when the tail at `N` was not certified.
    pub bandwidth: usize,
}

/// `A(t) = ∫ φ(y) φ(y - t) dy`.
fn autocorrelation<T: Real>(phi: &TestFunction<T>, t: T, tol: T) -> Result<T> {
    let (lo, hi) = phi.effective_interval(T::zero());
    let (a, b) = (lo.max(lo + t), hi.min(hi + t));
    if a >= b {
        return Ok(T::zero());
    }
    let mut breaks = vec![a, b];
    let bps = phi.breakpoints();
    breaks.extend(bps.iter().copied());
    breaks.extend(bps.iter().map(|p| *p + t));
    breaks.retain(|y| *y >= a && *y <= b);
    let v = integrate(|y: T| phi.eval(y) * phi.eval(y - t), &breaks, &Quadrature::new(tol).with_rel_tol(T::lit(1e-15)))?;
    Ok(v.value)
}

/// `Σ_n |φ̂(ns)|²` on the frequency side, against `(2π/s) Σ_m A(2πm/s)` by Poisson summation.
pub fn comb_norm_identity<T: Real>(phi: &TestFunction<T>, comb: &DiracComb<T>, tol: T) -> Result<CombIdentity<T>> {
    if phi.is_zero() {
        return Ok(CombIdentity { xside: T::zero(), freqside: T::zero(), tail_bound: T::zero(), bandwidth: comb.truncation });
    }
    let half = tol / T::lit(2.0);
    let (band, tail_bound) = certified_band(phi, comb, half)?;
    let mut terms: Vec<T> = comb.indices(band).map(|n| phi.fourier(comb.frequency(n)).norm_sqr()).collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let freqside: T = terms.into_iter().sum();

    let (lo, hi) = phi.effective_interval(T::zero());
    let width = hi - lo;
    let step = T::TAU() / comb.spacing;
    let m_max = (width / step).floor().to_f64_lossy() as i64;
    let per_term = half / T::lit(2.0 * m_max as f64 + 1.0) / step;
    let mut xside = autocorrelation(phi, T::zero(), per_term)?;
    for m in 1..=m_max {
        // A is even for real φ
        xside = xside + T::lit(2.0) * autocorrelation(phi, step * T::lit(m as f64), per_term)?;
    }
    Ok(CombIdentity { xside: xside * step, freqside, tail_bound, bandwidth: band })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn theta_oracle() -> f64 {
        // 2π Σ e^{-n²}, terms beyond |n| = 6 are below 1e-15
        TAU * (1.0 + 2.0 * (1..=6).map(|n: i32| (-(f64::from(n * n))).exp()).sum::<f64>())
    }

    #[test]
    fn gaussian_identity() {
        let comb = DiracComb::new(1.0f64, 16, Regularization::Truncate(16)).unwrap();
        let r = comb_norm_identity(&TestFunction::standard_gaussian(), &comb, 1e-10).unwrap();
        assert!((r.freqside - theta_oracle()).abs() < 1e-12, "{r:?}");
        assert!((r.xside - r.freqside).abs() < 1e-10, "{r:?}");
        assert!((theta_oracle() - 11.137808040326712).abs() < 1e-12);
    }

    #[test]
    fn bspline_identity_extends_band() {
        let comb = DiracComb::new(1.0f64, 16, Regularization::Truncate(16)).unwrap();
        let r = comb_norm_identity(&TestFunction::bspline(3, 1.0), &comb, 1e-10).unwrap();
        assert!(r.bandwidth > 16);
        assert!((r.xside - r.freqside).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn indicator_tail_is_not_certified() {
        let comb = DiracComb::default();
        let r = comb_norm_identity(&TestFunction::indicator(0.0, 1.0), &comb, 1e-10);
        assert!(matches!(r, Err(Error::TailNotCertified { .. })));
    }

    #[test]
    fn band_limited_phi_keeps_one_atom() {
        // wide Gaussian: φ̂(±1) = √(2π)·8·e^{-32} is negligible
        let phi = TestFunction::gaussian(0.0, 8.0);
        let comb = DiracComb::new(1.0f64, 4, Regularization::Truncate(4)).unwrap();
        let r = comb_norm_identity(&phi, &comb, 1e-10).unwrap();
        let f0 = phi.fourier(0.0).norm_sqr();
        assert!((r.freqside - f0).abs() < 1e-10 * f0);
    }

    #[test]
    fn zero_phi() {
        let r = comb_norm_identity(&TestFunction::zero(), &DiracComb::<f64>::default(), 1e-10).unwrap();
        assert_eq!((r.xside, r.freqside), (0.0, 0.0));
        let h = comb_element(&TestFunction::zero(), &DiracComb::<f64>::default(), 1e-10).unwrap();
        assert!(h.coefficients.iter().all(|(_, c)| c.norm() == 0.0));
    }

    #[test]
    fn parseval_examples() {
        let h = PeriodicFunction::new(vec![(3, Complex::new(1.0f64, 0.0))]);
        assert_eq!(periodic_l2_norm(&h), 1.0);
        assert!((h.mean_square_quadrature(1e-12).unwrap() - 1.0).abs() < 1e-12);
        let h = PeriodicFunction::new(vec![(0, Complex::new(1.0f64, 0.0)), (1, Complex::new(1.0, 0.0))]);
        assert_eq!(periodic_l2_norm(&h), 2.0);
        assert!((h.mean_square_quadrature(1e-12).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn element_coefficients() {
        let comb = DiracComb::new(1.0f64, 16, Regularization::Truncate(16)).unwrap();
        let h = comb_element(&TestFunction::standard_gaussian(), &comb, 1e-12).unwrap();
        for (n, c) in &h.coefficients {
            let expect = TAU.sqrt() * (-(*n as f64).powi(2) / 2.0).exp();
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14);
        }
        let r = comb_norm_identity(&TestFunction::standard_gaussian(), &comb, 1e-12).unwrap();
        assert!((periodic_l2_norm(&h) - r.freqside).abs() < 1e-13);
        assert!((h.mean_square_quadrature(1e-12).unwrap() - r.freqside).abs() < 1e-9);
    }

    #[test]
    fn indicator_coefficients() {
        let phi = TestFunction::indicator(0.0, 1.0);
        for n in [-3i64, -1, 1, 2, 5] {
            let l = n as f64;
            let expect = (Complex::new(0.0, l).exp() - 1.0) / Complex::new(0.0, l);
            assert!((phi.fourier(l) - expect).norm() < 1e-14);
        }
        assert!((phi.fourier(0.0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temperedness() {
        let comb = DiracComb::<f64>::default();
        let e = comb.temperedness_sum(1e-6);
        assert!((e.value - PI / PI.tanh()).abs() <= e.error);
    }

    #[test]
    fn fejer_and_dirichlet_bounds() {
        let x = 1.0;
        let bound = 1.0 / (x / 2.0_f64).sin().powi(2);
        let mut truncated = Vec::new();
        for n in [8usize, 64, 512, 4096] {
            let f = DiracComb::new(1.0f64, n, Regularization::Fejer(n)).unwrap().regularized_eval(x);
            assert!(f.re >= -1e-9 && f.re * (n as f64 + 1.0) <= bound + 1e-6);
            truncated.push(DiracComb::new(1.0f64, n, Regularization::Truncate(n)).unwrap().regularized_eval(x).re);
        }
        // Dirichlet kernel sin((N+½)x)/sin(x/2) keeps oscillating with amplitude 1/sin(x/2)
        let amp = 1.0 / (x / 2.0_f64).sin();
        assert!(truncated.iter().all(|v| v.abs() <= amp + 1e-9));
    }
}
