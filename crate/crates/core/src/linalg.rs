//! Dense complex matrices and the eigenvalue machinery behind PSD certification.
//!
//! Eigen-decompositions are delegated to `nalgebra` and always run in double precision;
//! the result is converted back to the working scalar.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Complex::new(T::one(), T::zero()) } else { Complex::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from the lower triangle and fills the upper triangle with the
    /// conjugate, so the result is Hermitian bit-for-bit.
    pub fn hermitian_from_lower(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v.conj();
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| Complex::new(rows[i][j], T::zero()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `max |G[i][j] - conj(G[j][i])|`.
    pub fn hermitian_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.n {
            for j in 0..=i {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    /// Largest off-diagonal modulus.
    pub fn max_off_diagonal(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    d = d.max(self.get(i, j).norm());
                }
            }
        }
        d
    }

    /// Quadratic form `c* G c`.
    pub fn quadratic_form(&self, c: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + c[i].conj() * self.get(i, j) * c[j];
            }
        }
        acc
    }

    fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let z = self.get(i, j);
            Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
        })
    }

    fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        if self.n == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = if self.is_real() {
            let m = DMatrix::from_fn(self.n, self.n, |i, j| {
                0.5 * (self.get(i, j).re + self.get(j, i).re).to_f64_lossy()
            });
            m.symmetric_eigenvalues().iter().copied().collect()
        } else {
            let m = self.to_nalgebra();
            let h = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
            h.symmetric_eigenvalues().iter().copied().collect()
        };
        ev.sort_by(|a, b| a.total_cmp(b));
        ev.into_iter().map(T::lit).collect()
    }

    /// Solves `G x = b` for Hermitian positive definite `G` by Cholesky.
    /// Returns `None` when the factorization breaks down.
    pub fn solve_hpd(&self, b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let chol = self.to_nalgebra().cholesky()?;
        // complex square roots never fail, so check the pivots explicitly
        if chol.l_dirty().diagonal().iter().any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re) {
            return None;
        }
        let rhs = DVector::from_iterator(
            self.n,
            b.iter().map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())),
        );
        let x = chol.solve(&rhs);
        Some(x.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect())
    }
}

/// Outcome of [`psd_check`](crate::spectra::psd_check).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport<T> {
    pub is_psd: bool,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
}

/// PSD test with threshold relative to the spectral radius.
pub fn psd_check<T: Real>(g: &ComplexMatrix<T>, rel_tol: T) -> Result<PsdReport<T>> {
    let scale = T::one().max(g.max_abs());
    let defect = g.hermitian_defect();
    if defect > rel_tol * scale {
        return Err(Error::NotHermitian { defect: defect.to_f64_lossy() });
    }
    let ev = g.hermitian_eigenvalues();
    let (min_eigenvalue, max_eigenvalue) = match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (T::zero(), T::zero()),
    };
    let is_psd = min_eigenvalue >= -rel_tol * T::one().max(max_eigenvalue);
    Ok(PsdReport { is_psd, min_eigenvalue, max_eigenvalue })
}

/// Symmetric square-root factor `L` with `C ≈ L Lᵀ`, from the eigen-decomposition of a
/// real symmetric PSD matrix.
///
/// Negative eigenvalues are clipped to zero; the decomposition fails when the clipped
/// mass exceeds `1e-8 · trace(C)`.
pub fn psd_factor<T: Real>(cov: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = cov.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (cov[i][j] + cov[j][i]).to_f64_lossy());
    let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
    let eig = m.symmetric_eigen();
    let clipped: f64 = eig.eigenvalues.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    if clipped > 1e-8 * trace.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::FactorizationFailure { clipped, trace });
    }
    let mut l = vec![vec![T::zero(); n]; n];
    for k in 0..n {
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        for (i, row) in l.iter_mut().enumerate() {
            row[k] = T::lit(eig.eigenvectors[(i, k)] * s);
        }
    }
    Ok(l)
}
