//! Stationary-increment Gaussian processes `X^{(μ)}` with
//! `E|X_x - X_y|² = r(x - y)`, `r(x) = ∫ |1 - e^{iλx}|² λ⁻² dμ(λ)`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{psd_check, psd_factor, ComplexMatrix};
use crate::rkhs::spectral_pairing;
use crate::scalar::{sinc, Real};
use crate::spectra::{Density, SpectralMeasure};
use crate::testfn::TestFunction;

/// Paths drawn per RNG stream.
pub const BLOCK: usize = 4096;

/// `r(x)`, symmetric in `x`, zero at the origin.
pub fn variance_r<T: Real>(measure: &SpectralMeasure<T>, x: T, tol: T) -> Result<T> {
    if x == T::zero() {
        return Ok(T::zero());
    }
    let half = x / T::lit(2.0);
    // |1 - e^{iλx}|²/λ² = x² sinc²(λx/2)
    let g = |l: T| {
        let s = sinc(l * half);
        x * x * s * s
    };
    let two = T::lit(2.0);
    let tail = |d: &Density<T>, l: T| -> (T, T) {
        // tail = 2W - 2C with W = ∫ ρ/λ², C = ∫ cos(λx) ρ/λ² over |λ| > L
        let w = d.weighted_tail(l, two);
        if matches!(d, Density::Gaussian { .. }) {
            // W is only an upper bound here
            return (two * w, two * w);
        }
        let (bound, c) = d.cosine_tail(l, x);
        (two * bound, two * w - two * c)
    };
    let v = measure.integrate_against(g, x.abs(), tail, tol)?;
    Ok(v.value.max(T::zero()))
}

/// `E(X_x X_y) = (r(x) + r(y) - r(x - y))/2`.
pub fn covariance<T: Real>(measure: &SpectralMeasure<T>, x: T, y: T, tol: T) -> Result<T> {
    if x == T::zero() || y == T::zero() {
        return Ok(T::zero());
    }
    let t = tol / T::lit(3.0);
    Ok((variance_r(measure, x, t)? + variance_r(measure, y, t)? - variance_r(measure, x - y, t)?) / T::lit(2.0))
}

/// `∫ min(1, λ⁻²) dμ < ∞`.
fn check_integrable<T: Real>(measure: &SpectralMeasure<T>) -> Result<()> {
    let Some(d) = measure.density() else { return Ok(()) };
    let far = d.weighted_tail(T::one(), T::lit(2.0));
    let near_ok = match *d {
        Density::Power { exponent, .. } => exponent > -T::one(),
        _ => true,
    };
    if far.is_finite() && near_ok {
        Ok(())
    } else {
        Err(Error::InvalidMeasure("∫ min(1, λ⁻²) dμ diverges".into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GpModel<T> {
    measure: SpectralMeasure<T>,
    grid: Vec<T>,
    pub seed: u64,
}

impl<T: Real> GpModel<T> {
    /// Non-symmetric measures are replaced by `(μ + μ∘(-·))/2` so covariances are real.
    pub fn new(measure: SpectralMeasure<T>, grid: Vec<T>, seed: u64) -> Result<Self> {
        if !grid.iter().any(|x| *x == T::zero()) {
            return Err(Error::InvalidArgument("the sample grid must contain 0".into()));
        }
        check_integrable(&measure)?;
        let measure = if measure.is_symmetric() {
            measure
        } else {
            log::warn!("symmetrizing a non-symmetric spectral measure");
            measure.mirrored()
        };
        Ok(Self { measure, grid, seed })
    }

    pub fn measure(&self) -> &SpectralMeasure<T> {
        &self.measure
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn covariance_matrix(&self, tol: T) -> Result<Vec<Vec<T>>> {
        let n = self.grid.len();
        let r: Vec<T> = self.grid.iter().map(|&x| variance_r(&self.measure, x, tol)).collect::<Result<_>>()?;
        let mut c = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = if i == j {
                    r[i]
                } else {
                    (r[i] + r[j] - variance_r(&self.measure, self.grid[i] - self.grid[j], tol)?) / T::lit(2.0)
                };
                c[i][j] = v;
                c[j][i] = v;
            }
        }
        Ok(c)
    }

    pub fn is_psd(&self, rel_tol: T, tol: T) -> Result<bool> {
        let c = self.covariance_matrix(tol)?;
        Ok(psd_check(&ComplexMatrix::from_real_rows(&c), rel_tol)?.is_psd)
    }
}

/// `n_paths × grid` samples, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Paths<T> {
    pub grid: Vec<T>,
    pub n_paths: usize,
    pub values: Vec<T>,
}

impl<T: Real> Paths<T> {
    pub fn row(&self, i: usize) -> &[T] {
        let m = self.grid.len();
        &self.values[i * m..(i + 1) * m]
    }

    /// CSV: grid header, then one row per path.
    pub fn to_csv(&self) -> String {
        let mut out = self.grid.iter().map(|x| format!("{:?}", x.to_f64_lossy())).collect::<Vec<_>>().join(",");
        out.push('\n');
        for i in 0..self.n_paths {
            out.push_str(&self.row(i).iter().map(|v| format!("{:?}", v.to_f64_lossy())).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Gaussian paths with the model covariance. Block `b` of [`BLOCK`] paths uses ChaCha8
/// stream `b` of the model seed, so output is independent of thread count.
pub fn sample_paths<T: Real>(model: &GpModel<T>, n_paths: usize, tol: T) -> Result<Paths<T>> {
    let m = model.grid.len();
    if n_paths == 0 {
        return Ok(Paths { grid: model.grid.clone(), n_paths: 0, values: Vec::new() });
    }
    let live: Vec<usize> = (0..m).filter(|&i| model.grid[i] != T::zero()).collect();
    let full = model.covariance_matrix(tol)?;
    let cov: Vec<Vec<T>> = live.iter().map(|&i| live.iter().map(|&j| full[i][j]).collect()).collect();
    let l = psd_factor(&cov)?;
    let k = live.len();
    let blocks: Vec<Vec<T>> = (0..n_paths.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(model.seed, b);
            let count = BLOCK.min(n_paths - b * BLOCK);
            let mut out = vec![T::zero(); count * m];
            let mut z = vec![T::zero(); k];
            for p in 0..count {
                for zi in z.iter_mut() {
                    let s: f64 = StandardNormal.sample(&mut rng);
                    *zi = T::lit(s);
                }
                for (a, &i) in live.iter().enumerate() {
                    out[p * m + i] = l[a].iter().zip(&z).map(|(x, y)| *x * *y).sum();
                }
            }
            out
        })
        .collect();
    Ok(Paths { grid: model.grid.clone(), n_paths, values: blocks.concat() })
}

/// Sample mean of a statistic with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub estimate: T,
    pub std_error: T,
    pub predicted: T,
}

impl<T: Real> McEstimate<T> {
    fn from_samples(xs: impl Iterator<Item = T>, predicted: T) -> Self {
        let (mut n, mut mean, mut m2) = (0usize, T::zero(), T::zero());
        for x in xs {
            n += 1;
            let d = x - mean;
            mean = mean + d / T::from_usize_lossy(n);
            m2 = m2 + d * (x - mean);
        }
        let nf = T::from_usize_lossy(n.max(2));
        let std_error = (m2 / (nf - T::one()) / nf).sqrt();
        Self { estimate: mean, std_error, predicted }
    }

    /// `|estimate - predicted|` in standard errors.
    pub fn z_score(&self) -> T {
        if self.std_error == T::zero() {
            if self.estimate == self.predicted {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            (self.estimate - self.predicted).abs() / self.std_error
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport<T> {
    /// `Var(X_x)` at each grid point.
    pub variance: Vec<McEstimate<T>>,
    /// `E(X_x X_y)` for consecutive grid points.
    pub cross: Vec<McEstimate<T>>,
    /// `E|X_x - X_y|²` for consecutive grid points.
    pub increment: Vec<McEstimate<T>>,
}

impl<T: Real> MonteCarloReport<T> {
    pub fn max_z_score(&self) -> T {
        self.variance.iter().chain(&self.cross).chain(&self.increment).map(|e| e.z_score()).fold(T::zero(), T::max)
    }
}

/// Compares sample moments of [`sample_paths`] against `r` and [`covariance`].
pub fn monte_carlo_check<T: Real>(model: &GpModel<T>, n_paths: usize, tol: T) -> Result<MonteCarloReport<T>> {
    let paths = sample_paths(model, n_paths, tol)?;
    let g = &model.grid;
    let mu = &model.measure;
    let mut variance = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let pred = variance_r(mu, g[i], tol)?;
        variance.push(McEstimate::from_samples((0..n_paths).map(|p| paths.row(p)[i].powi(2)), pred));
    }
    let mut cross = Vec::new();
    let mut increment = Vec::new();
    for i in 1..g.len() {
        let pred = covariance(mu, g[i - 1], g[i], tol)?;
        cross.push(McEstimate::from_samples((0..n_paths).map(|p| paths.row(p)[i - 1] * paths.row(p)[i]), pred));
        let pred = variance_r(mu, g[i] - g[i - 1], tol)?;
        increment.push(McEstimate::from_samples((0..n_paths).map(|p| (paths.row(p)[i] - paths.row(p)[i - 1]).powi(2)), pred));
    }
    Ok(MonteCarloReport { variance, cross, increment })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacteristicReport<T> {
    pub empirical: Complex<T>,
    pub predicted: T,
    /// `∫ |φ̂|² dμ`, the variance of the pairing `⟨φ, ·⟩`.
    pub variance: T,
    pub n_samples: usize,
}

/// `E e^{i⟨φ,·⟩}` against `exp(-½ ∫ |φ̂|² dμ)`, sampling `⟨φ,·⟩ ~ N(0, ∫ |φ̂|² dμ)` directly.
pub fn characteristic_functional_check<T: Real>(
    measure: &SpectralMeasure<T>,
    phi: &TestFunction<T>,
    n_samples: usize,
    seed: u64,
    tol: T,
) -> Result<CharacteristicReport<T>> {
    let variance = spectral_pairing(phi, phi, measure, tol)?.value.re.max(T::zero());
    let predicted = (-variance / T::lit(2.0)).exp();
    let sd = variance.sqrt().to_f64_lossy();
    let sums: Vec<(f64, f64)> = (0..n_samples.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(n_samples - b * BLOCK);
            (0..count).fold((0.0, 0.0), |(c, s), _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let t = sd * z;
                (c + t.cos(), s + t.sin())
            })
        })
        .collect();
    let (c, s) = sums.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_samples.max(1) as f64;
    let empirical = if n_samples == 0 { Complex::new(T::one(), T::zero()) } else { Complex::new(T::lit(c / n), T::lit(s / n)) };
    Ok(CharacteristicReport { empirical, predicted, variance, n_samples })
}
