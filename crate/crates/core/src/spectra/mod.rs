//! Spectral measures, positive definite kernels and positive-definiteness tests.

mod catalog;
mod kernel;
mod measure;

pub use catalog::{
    builtin_catalog, catalog_entry, catalog_to_json, entry_from_json, entry_to_json, KernelCatalogEntry,
    CATALOG_NAMES, CATALOG_VERSION, FBM_HURST,
};
pub use kernel::{ClosedForm, ContinuityClass, KernelForm, PdKernel, Regularization};
pub use measure::{Atom, Density, GrowthClass, SpectralMeasure};
pub(crate) use measure::panel_breaks;

pub use crate::linalg::{psd_check, ComplexMatrix, PsdReport};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::scalar::Real;
use crate::testfn::TestFunction;

/// `G[i][j] = f(x_i - x_j)`, Hermitian by construction.
pub fn gram_matrix<T: Real>(kernel: &PdKernel<T>, points: &[T], tol: T) -> Result<ComplexMatrix<T>> {
    if !kernel.is_continuous() {
        return Err(Error::TemperedKernel("a Gram matrix"));
    }
    let n = points.len();
    let mut vals = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            vals.push(kernel.eval(points[i] - points[j], tol)?);
        }
    }
    let mut it = vals.into_iter();
    Ok(ComplexMatrix::hermitian_from_lower(n, |_, _| it.next().unwrap_or_default()))
}

/// Composite Gauss–Legendre grid: `panels` equal panels per smooth piece, `order` nodes each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadGrid {
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadGrid {
    fn default() -> Self {
        Self { panels: 8, order: 16 }
    }
}

fn composite_nodes<T: Real>(breaks: &[T], grid: QuadGrid, rule: &[(T, T)]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let m = grid.panels.max(1);
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / T::from_usize_lossy(m);
        for p in 0..m {
            let a = w[0] + h * T::from_usize_lossy(p);
            let half = h / T::lit(2.0);
            for &(x, wt) in rule {
                out.push((a + half + half * x, wt * half));
            }
        }
    }
    out
}

fn sorted_breaks<T: Real>(mut v: Vec<T>, lo: T, hi: T) -> Vec<T> {
    v.retain(|x| *x > lo && *x < hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v.dedup();
    v
}

fn quadrature_form_with<T: Real>(kernel: &PdKernel<T>, phi: &TestFunction<T>, grid: QuadGrid, tol: T) -> Result<Complex<T>> {
    let (lo, hi) = phi.effective_interval(T::zero());
    let width = hi - lo;
    let bps = phi.breakpoints();
    let rule = gauss_legendre::<T>(grid.order);

    // ∫∫ φ(x)φ(y) f(x-y) dx dy = ∫ f(t) A(t) dt with A(t) = ∫ φ(y+t) φ(y) dy
    let mut t_breaks: Vec<T> = kernel.kinks();
    t_breaks.push(T::zero());
    for a in &bps {
        for b in &bps {
            t_breaks.push(*a - *b);
        }
    }
    let t_breaks = sorted_breaks(t_breaks, -width, width);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (t, wt) in composite_nodes(&t_breaks, grid, &rule) {
        let y_lo = lo.max(lo - t);
        let y_hi = hi.min(hi - t);
        if y_lo >= y_hi {
            continue;
        }
        let mut y_breaks: Vec<T> = bps.clone();
        y_breaks.extend(bps.iter().map(|b| *b - t));
        let y_breaks = sorted_breaks(y_breaks, y_lo, y_hi);
        let a: T = composite_nodes(&y_breaks, grid, &rule).into_iter().map(|(y, w)| w * phi.eval(y + t) * phi.eval(y)).sum();
        acc = acc + kernel.eval(t, tol)? * (a * wt);
    }
    Ok(acc)
}

/// `∫∫ φ(x) φ(y) f(x - y) dx dy` on a fixed composite grid.
///
/// The rule is applied at `grid.order` and `2·grid.order` nodes per panel; disagreement
/// beyond `tol · max(1, |value|)` raises [`Error::GridTooCoarse`].
pub fn pd_quadrature_form<T: Real>(kernel: &PdKernel<T>, phi: &TestFunction<T>, grid: QuadGrid, tol: T) -> Result<T> {
    if !kernel.is_continuous() {
        return Err(Error::TemperedKernel("the x-side quadrature form"));
    }
    if phi.is_zero() {
        return Ok(T::zero());
    }
    let coarse = quadrature_form_with(kernel, phi, grid, tol)?;
    let fine = quadrature_form_with(kernel, phi, QuadGrid { panels: grid.panels, order: 2 * grid.order }, tol)?;
    if (fine - coarse).norm() > tol * T::one().max(fine.norm()) {
        return Err(Error::GridTooCoarse { coarse: coarse.re.to_f64_lossy(), fine: fine.re.to_f64_lossy() });
    }
    Ok(fine.re)
}
