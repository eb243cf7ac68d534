//! Positive definite functions on the cyclic group `ℤ_N`.
//!
//! Haar measure is counting measure on `G` and `1/N` times counting measure on `Ĝ`:
//! `μ[k] = N⁻¹ Σ_g f[g] e^{-2πikg/N}` and `f[g] = Σ_k μ[k] e^{2πikg/N}`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{psd_check, ComplexMatrix};
use crate::scalar::Real;

/// Relative threshold below which a negative spectral coefficient counts as round-off.
/// Raised to `64 ε` for scalars coarser than `f64`.
pub const CLIP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicPdFunction<T> {
    pub values: Vec<Complex<T>>,
}

fn fft<T: Real + FftNum>(data: &[Complex<T>], inverse: bool) -> Vec<Complex<T>> {
    let mut buf = data.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
    plan.process(&mut buf);
    buf
}

impl<T: Real + FftNum> CyclicPdFunction<T> {
    pub fn new(values: Vec<Complex<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("ℤ_N needs N ≥ 1".into()));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    /// `f[g] = Σ_k μ[k] e^{2πikg/N}`.
    pub fn from_measure(mu: &[T]) -> Result<Self> {
        let m: Vec<Complex<T>> = mu.iter().map(|&v| Complex::new(v, T::zero())).collect();
        Self::new(fft(&m, true))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, g: i64) -> Complex<T> {
        let n = self.n() as i64;
        self.values[g.rem_euclid(n) as usize]
    }

    /// The circulant Gram matrix `G[i][j] = f[(i - j) mod N]`.
    pub fn circulant(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.n(), |i, j| self.at(i as i64 - j as i64))
    }

    fn scale(&self) -> T {
        self.values[0].norm().max(T::one())
    }

    /// Unclipped `μ[k]`.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let n = T::from_usize_lossy(self.n());
        fft(&self.values, false).into_iter().map(|v| v / n).collect()
    }
}

/// `μ[k] = N⁻¹ Σ_g f[g] conj(χ_k(g))`, with round-off negatives clipped to zero.
pub fn dual_measure<T: Real + FftNum>(f: &CyclicPdFunction<T>) -> Result<Vec<T>> {
    let spec = f.spectrum();
    let floor = T::lit(CLIP).max(T::epsilon() * T::lit(64.0)) * f.scale();
    let defect = spec.iter().map(|v| v.im.abs()).fold(T::zero(), T::max);
    if defect > floor {
        return Err(Error::NotHermitian { defect: defect.to_f64_lossy() });
    }
    let min = spec.iter().map(|v| v.re).fold(T::infinity(), T::min);
    if min < -floor {
        return Err(Error::NotPositiveDefinite { min_coefficient: min.to_f64_lossy() });
    }
    Ok(spec.into_iter().map(|v| v.re.max(T::zero())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactIsometry<T> {
    pub xside: T,
    pub freqside: T,
    pub rel_err: T,
}

/// `Σ_{g,h} φ[g] conj(φ[h]) f[g - h]` against `Σ_k |φ̂[k]|² μ[k]`, `φ̂[k] = Σ_g φ[g] e^{2πikg/N}`.
pub fn isometry_exact<T: Real + FftNum>(f: &CyclicPdFunction<T>, phi: &[Complex<T>]) -> Result<ExactIsometry<T>> {
    let n = f.n();
    if phi.len() != n {
        return Err(Error::InvalidArgument(format!("φ has length {}, group order is {n}", phi.len())));
    }
    let mu = dual_measure(f)?;
    let mut x = Complex::new(T::zero(), T::zero());
    for (g, pg) in phi.iter().enumerate() {
        for (h, ph) in phi.iter().enumerate() {
            x = x + *pg * ph.conj() * f.at(g as i64 - h as i64);
        }
    }
    let xside = x.re;
    let freqside: T = fft(phi, true).iter().zip(&mu).map(|(p, m)| p.norm_sqr() * *m).sum();
    let scale = xside.abs().max(freqside.abs());
    let rel_err = if scale == T::zero() { T::zero() } else { (xside - freqside).abs() / scale };
    Ok(ExactIsometry { xside, freqside, rel_err })
}

/// Circulant PSD test next to the sign test on the spectrum; `(psd, nonnegative)`.
pub fn psd_agreement<T: Real + FftNum>(f: &CyclicPdFunction<T>, rel_tol: T) -> Result<(bool, bool)> {
    let psd = psd_check(&f.circulant(), rel_tol)?.is_psd;
    let nonneg = match dual_measure(f) {
        Ok(_) => true,
        Err(Error::NotPositiveDefinite { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok((psd, nonneg))
}

/// `φ[g] ↦ φ[g - s]`.
pub fn cyclic_shift<T: Real>(phi: &[Complex<T>], s: i64) -> Vec<Complex<T>> {
    let n = phi.len() as i64;
    (0..n).map(|g| phi[(g - s).rem_euclid(n) as usize]).collect()
}

/// A seeded random case: a nonnegative measure on `ℤ_N` (uniform in `[0, 1)`, a quarter of
/// the entries zeroed) and a complex vector with entries uniform in the unit square.
pub fn random_case<T: Real + FftNum>(n: usize, seed: u64, index: u64) -> (Vec<T>, Vec<Complex<T>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mu = (0..n)
        .map(|_| {
            let v: f64 = rng.gen();
            if rng.gen_bool(0.25) {
                T::zero()
            } else {
                T::lit(v)
            }
        })
        .collect();
    let phi = (0..n).map(|_| Complex::new(T::lit(rng.gen::<f64>() - 0.5), T::lit(rng.gen::<f64>() - 0.5))).collect();
    (mu, phi)
}

/// A seeded Hermitian-symmetric vector `f[-g] = conj(f[g])`, not necessarily positive definite.
pub fn random_hermitian<T: Real + FftNum>(n: usize, seed: u64, index: u64) -> CyclicPdFunction<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut v = vec![Complex::new(T::zero(), T::zero()); n];
    v[0] = Complex::new(T::lit(rng.gen::<f64>() * 2.0), T::zero());
    for g in 1..n {
        let h = n - g;
        if h < g {
            v[g] = v[h].conj();
        } else if h == g {
            v[g] = Complex::new(T::lit(rng.gen::<f64>() - 0.5), T::zero());
        } else {
            v[g] = Complex::new(T::lit(rng.gen::<f64>() - 0.5), T::lit(rng.gen::<f64>() - 0.5));
        }
    }
    CyclicPdFunction { values: v }
}
