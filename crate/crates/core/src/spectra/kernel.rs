use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::measure::{Atom, Density, GrowthClass, SpectralMeasure};
use crate::error::{Error, Result};
use crate::scalar::{cis, sinc, Real};

/// Named positive definite functions with a known spectral measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case")]
pub enum ClosedForm<T> {
    /// `cos(ω x)`
    Cos { frequency: T },
    /// `exp(-a |x|)`
    Exponential { rate: T },
    /// `exp(-x² / (2σ²))`
    Gaussian { sigma: T },
    /// `c`
    Constant { value: T },
    /// `sin(a x) / (a x)`
    Sinc { a: T },
}

impl<T: Real> ClosedForm<T> {
    pub fn eval(&self, x: T) -> T {
        match *self {
            ClosedForm::Cos { frequency } => (frequency * x).cos(),
            ClosedForm::Exponential { rate } => (-rate * x.abs()).exp(),
            ClosedForm::Gaussian { sigma } => {
                let u = x / sigma;
                (-u * u / T::lit(2.0)).exp()
            }
            ClosedForm::Constant { value } => value,
            ClosedForm::Sinc { a } => sinc(a * x),
        }
    }

    /// The measure `μ` with `f = μ̂`.
    pub fn spectral_measure(&self) -> Result<SpectralMeasure<T>> {
        let half = T::lit(0.5);
        match *self {
            ClosedForm::Cos { frequency } if frequency == T::zero() => SpectralMeasure::dirac(T::zero(), T::one()),
            ClosedForm::Cos { frequency } => SpectralMeasure::atoms_only(vec![
                Atom { location: -frequency.abs(), weight: half },
                Atom { location: frequency.abs(), weight: half },
            ]),
            ClosedForm::Exponential { rate } => {
                SpectralMeasure::from_density(Density::Cauchy { scale: rate, mass: T::one() })
            }
            ClosedForm::Gaussian { sigma } => {
                SpectralMeasure::from_density(Density::Gaussian { std: T::one() / sigma.abs(), mass: T::one() })
            }
            ClosedForm::Constant { value } => SpectralMeasure::dirac(T::zero(), value),
            ClosedForm::Sinc { a } => SpectralMeasure::from_density(Density::Box {
                half_width: a.abs(),
                height: T::one() / (T::lit(2.0) * a.abs()),
            }),
        }
    }

    /// Points where `f` is not smooth.
    pub fn kinks(&self) -> Vec<T> {
        match self {
            ClosedForm::Exponential { .. } => vec![T::zero()],
            _ => Vec::new(),
        }
    }

    /// Half-width of the window where the kernel carries its structure.
    pub fn effective_radius(&self) -> T {
        match *self {
            ClosedForm::Cos { frequency } if frequency != T::zero() => T::TAU() / frequency.abs(),
            ClosedForm::Exponential { rate } => T::lit(18.0) / rate,
            ClosedForm::Gaussian { sigma } => T::lit(6.0) * sigma.abs(),
            ClosedForm::Sinc { a } => T::lit(20.0) / a.abs(),
            _ => T::lit(10.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Cos { .. } => "cos",
            ClosedForm::Exponential { .. } => "exponential",
            ClosedForm::Gaussian { .. } => "gaussian",
            ClosedForm::Constant { .. } => "constant",
            ClosedForm::Sinc { .. } => "sinc",
        }
    }
}

/// How a formal series `Σ e^{iλx}` is made summable. `N` is a bandwidth in frequency units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum Regularization {
    /// Keep `|λ| ≤ N`.
    Truncate(usize),
    /// Weights `(1 - |λ|/(N+1))₊`.
    Fejer(usize),
}

impl Regularization {
    pub fn bandwidth(&self) -> usize {
        match *self {
            Regularization::Truncate(n) | Regularization::Fejer(n) => n,
        }
    }

    pub fn weight<T: Real>(&self, lambda: T) -> T {
        let l = lambda.abs();
        match *self {
            Regularization::Truncate(n) => {
                if l <= T::from_usize_lossy(n) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Regularization::Fejer(n) => (T::one() - l / T::from_usize_lossy(n + 1)).max(T::zero()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KernelForm<T> {
    ClosedForm(ClosedForm<T>),
    BochnerOf(SpectralMeasure<T>),
    RegularizedSeries { frequencies: Vec<T>, regularization: Regularization },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuityClass {
    Continuous,
    TemperedDistribution,
}

/// Positive definite function, or tempered distribution, on the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdKernel<T> {
    form: KernelForm<T>,
}

impl<T: Real> PdKernel<T> {
    pub fn closed(form: ClosedForm<T>) -> Self {
        Self { form: KernelForm::ClosedForm(form) }
    }

    pub fn bochner(measure: SpectralMeasure<T>) -> Self {
        Self { form: KernelForm::BochnerOf(measure) }
    }

    pub fn series(mut frequencies: Vec<T>, regularization: Regularization) -> Self {
        frequencies.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        frequencies.dedup();
        Self { form: KernelForm::RegularizedSeries { frequencies, regularization } }
    }

    /// `Σ_n e^{i n s x}` over the lattice `sℤ`, truncated to the regularization bandwidth.
    pub fn dirac_comb(spacing: T, regularization: Regularization) -> Self {
        let band = T::from_usize_lossy(regularization.bandwidth() + 1);
        let m = (band / spacing.abs()).floor().to_f64_lossy() as i64;
        let freqs = (-m..=m).map(|n| spacing.abs() * T::from_i64(n).unwrap_or_else(T::zero)).collect();
        Self::series(freqs, regularization)
    }

    pub fn form(&self) -> &KernelForm<T> {
        &self.form
    }

    pub fn continuity_class(&self) -> ContinuityClass {
        match &self.form {
            KernelForm::ClosedForm(_) => ContinuityClass::Continuous,
            KernelForm::BochnerOf(m) if m.is_finite() => ContinuityClass::Continuous,
            _ => ContinuityClass::TemperedDistribution,
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.continuity_class() == ContinuityClass::Continuous
    }

    /// `f(x)`; tempered kernels refuse.
    pub fn eval(&self, x: T, tol: T) -> Result<Complex<T>> {
        match &self.form {
            KernelForm::ClosedForm(c) => Ok(Complex::new(c.eval(x), T::zero())),
            KernelForm::BochnerOf(m) if m.is_finite() => m.bochner_eval(x, tol),
            _ => Err(Error::TemperedKernel("pointwise evaluation")),
        }
    }

    /// `Σ w(λ) e^{iλx}` for series kernels; the plain value for continuous kernels.
    pub fn regularized_eval(&self, x: T, tol: T) -> Result<Complex<T>> {
        match &self.form {
            KernelForm::RegularizedSeries { frequencies, regularization } => Ok(frequencies
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, &l| acc + cis(l * x) * regularization.weight(l))),
            _ => self.eval(x, tol),
        }
    }

    /// Spectral measure; for series kernels, the regularized atoms.
    pub fn spectral_measure(&self) -> Result<SpectralMeasure<T>> {
        match &self.form {
            KernelForm::ClosedForm(c) => c.spectral_measure(),
            KernelForm::BochnerOf(m) => Ok(m.clone()),
            KernelForm::RegularizedSeries { frequencies, regularization } => {
                let atoms = frequencies
                    .iter()
                    .map(|&l| Atom { location: l, weight: regularization.weight(l) })
                    .filter(|a| a.weight > T::zero())
                    .collect();
                SpectralMeasure::with_growth(atoms, None, GrowthClass::TemperedOfOrder(1))
            }
        }
    }

    pub fn kinks(&self) -> Vec<T> {
        match &self.form {
            KernelForm::ClosedForm(c) => c.kinks(),
            _ => Vec::new(),
        }
    }

    pub fn effective_radius(&self) -> T {
        match &self.form {
            KernelForm::ClosedForm(c) => c.effective_radius(),
            _ => T::lit(10.0),
        }
    }
}
