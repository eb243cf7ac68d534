//! Self-similar Cantor measures, their Fourier transforms, and the spectrum `Λ₄`.
//!
//! Frequencies in `Λ₄` are integers in cycles: `e_λ(x) = e^{2πiλx}`, so
//! `⟨e_λ, e_λ'⟩_{L²(ν)} = ν̂(2π(λ' - λ))` with `ν̂(ξ) = ∫ e^{iξx} dν(x)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quad::Estimate;
use crate::scalar::{cis, Real};

/// Largest `|ξ|·diam/R^K` the first-order tail correction is trusted for.
pub const TAIL_CUTOFF: f64 = 1e-6;

/// Clique search is exact up to this many grid points.
pub const CLIQUE_LIMIT: usize = 200;

/// Word count above which [`ifs_integrate`] refuses to enumerate.
pub const MAX_WORDS: usize = 1 << 24;

/// The invariant probability measure of `x ↦ (x + d)/R`, `d ∈ digits`, with equal weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfsMeasure {
    pub scale: u32,
    pub digits: Vec<i64>,
    pub product_depth: u32,
}

impl IfsMeasure {
    pub fn new(scale: u32, mut digits: Vec<i64>, product_depth: u32) -> Result<Self> {
        digits.sort_unstable();
        digits.dedup();
        if scale < 2 || digits.is_empty() || product_depth == 0 {
            return Err(Error::InvalidArgument(format!(
                "IFS needs scale ≥ 2, digits and a positive depth (scale {scale}, {} digits, depth {product_depth})",
                digits.len()
            )));
        }
        Ok(Self { scale, digits, product_depth })
    }

    /// Scale 4, digits {0, 2}: supported on a Cantor set in `[0, 2/3]`.
    pub fn nu4() -> Self {
        Self { scale: 4, digits: vec![0, 2], product_depth: 60 }
    }

    /// Scale 3, digits {0, 2}: the middle-third Cantor measure on `[0, 1]`.
    pub fn nu3() -> Self {
        Self { scale: 3, digits: vec![0, 2], product_depth: 60 }
    }

    pub fn with_depth(mut self, k: u32) -> Self {
        self.product_depth = k;
        self
    }

    /// Convex hull of the attractor.
    pub fn hull<T: Real>(&self) -> (T, T) {
        let r1 = T::lit(f64::from(self.scale) - 1.0);
        let lo = T::lit(self.digits[0] as f64) / r1;
        let hi = T::lit(*self.digits.last().unwrap_or(&0) as f64) / r1;
        (lo, hi)
    }

    pub fn mean<T: Real>(&self) -> T {
        let avg = self.digits.iter().sum::<i64>() as f64 / self.digits.len() as f64;
        T::lit(avg / (f64::from(self.scale) - 1.0))
    }

    /// `m(η) = |D|⁻¹ Σ_d e^{iηd/R}`, so that `ν̂(ξ) = m(ξ) ν̂(ξ/R)`.
    pub fn mask<T: Real>(&self, eta: T) -> Complex<T> {
        if self.is_symbolic_zero(eta) {
            return Complex::new(T::zero(), T::zero());
        }
        let r = T::lit(f64::from(self.scale));
        let n = T::from_usize_lossy(self.digits.len());
        self.digits
            .iter()
            .map(|&d| cis(eta * T::lit(d as f64) / r))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
            / n
    }

    /// For two digits the mask vanishes exactly when `η(d₁ - d₀)/R ≡ π (mod 2π)`.
    fn is_symbolic_zero<T: Real>(&self, eta: T) -> bool {
        if self.digits.len() != 2 {
            return false;
        }
        let gap = (self.digits[1] - self.digits[0]) as f64;
        let turns = eta * T::lit(gap / f64::from(self.scale)) / T::PI();
        // turns must be an odd integer
        let half = (turns - T::one()) / T::lit(2.0);
        let slack = T::lit(4.0) * T::epsilon() * turns.abs().max(T::one());
        (half - half.round()).abs() <= slack
    }
}

/// `ν̂(ξ)` from the product `Π_{k<K} m(ξ/R^k)` and the first-order tail `1 + i·mean·ξ/R^K`.
pub fn nu_hat_with_error<T: Real>(m: &IfsMeasure, xi: T) -> Result<Estimate<Complex<T>, T>> {
    let r = T::lit(f64::from(m.scale));
    let (lo, hi) = m.hull::<T>();
    let radius = lo.abs().max(hi.abs());
    let cutoff = T::lit(TAIL_CUTOFF);
    let depth = m.product_depth as usize;
    let mut eta = xi;
    let mut prod = Complex::new(T::one(), T::zero());
    for _ in 0..depth {
        let f = m.mask(eta);
        if f == Complex::new(T::zero(), T::zero()) {
            return Ok(Estimate::exact(f));
        }
        prod = prod * f;
        eta = eta / r;
    }
    let y = eta.abs() * radius;
    if y > cutoff {
        let need = (xi.abs() * radius / cutoff).ln() / r.ln();
        return Err(Error::DepthInsufficient { required: need.ceil().to_f64_lossy() as usize, limit: depth });
    }
    let tail = Complex::new(T::one(), eta * m.mean::<T>());
    // |e^{iy} - 1 - iy| ≤ y²/2
    Ok(Estimate { value: prod * tail, error: y * y / T::lit(2.0) })
}

pub fn nu_hat<T: Real>(m: &IfsMeasure, xi: T) -> Result<Complex<T>> {
    nu_hat_with_error(m, xi).map(|e| e.value)
}

/// `{Σ_{j<J} b_j B^j : b_j ∈ generators}`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    pub base: u64,
    pub generators: Vec<u64>,
    pub max_terms: u32,
}

impl Spectrum {
    /// `Λ₄`: base 4, generators {0, 1}.
    pub fn lambda4(max_terms: u32) -> Self {
        Self { base: 4, generators: vec![0, 1], max_terms }
    }

    pub fn elements(&self) -> Result<Vec<u64>> {
        let count = (self.generators.len() as f64).powi(self.max_terms as i32);
        let top = (self.base as f64).powi(self.max_terms as i32) * *self.generators.iter().max().unwrap_or(&0) as f64;
        if count > (1u64 << 20) as f64 || top > 2f64.powi(53) {
            return Err(Error::InvalidArgument(format!("spectrum with {} terms is too large to list", self.max_terms)));
        }
        let mut out = vec![0u64];
        let mut power = 1u64;
        for _ in 0..self.max_terms {
            out = out.iter().flat_map(|&s| self.generators.iter().map(move |&b| s + b * power)).collect();
            power *= self.base;
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// The first `2^J` elements of `Λ₄`, sorted. `J ≤ 20`.
pub fn lambda4(max_terms: u32) -> Result<Vec<u64>> {
    Spectrum::lambda4(max_terms).elements()
}

/// `G[i][j] = ⟨e_{λ_i}, e_{λ_j}⟩ = ν̂(2π(λ_j - λ_i))`.
pub fn onb_gram<T: Real>(m: &IfsMeasure, freqs: &[T]) -> Result<ComplexMatrix<T>> {
    let n = freqs.len();
    let mut lower = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            lower.push(nu_hat(m, T::TAU() * (freqs[j] - freqs[i]))?);
        }
    }
    let mut it = lower.into_iter();
    Ok(ComplexMatrix::hermitian_from_lower(n, |_, _| it.next().unwrap_or_default()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthSearch<T> {
    pub max_size: usize,
    pub witness: Vec<T>,
    /// Always "evidence": a finite grid cannot settle a statement about all real frequencies.
    pub status: &'static str,
}

/// Largest subset of `grid` whose pairs satisfy `|ν̂(2π(λ_i - λ_j))| ≤ eps`, by
/// Bron–Kerbosch with pivoting. Exact for grids up to [`CLIQUE_LIMIT`] points.
pub fn max_orth_search<T: Real>(m: &IfsMeasure, grid: &[T], eps: T) -> Result<OrthSearch<T>> {
    let n = grid.len();
    if n > CLIQUE_LIMIT {
        return Err(Error::GridTooLarge { size: n, limit: CLIQUE_LIMIT });
    }
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = nu_hat(m, T::TAU() * (grid[i] - grid[j]))?;
            let e = v.norm() <= eps;
            adj[i][j] = e;
            adj[j][i] = e;
        }
    }
    let mut best: Vec<usize> = Vec::new();
    bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut best);
    Ok(OrthSearch { max_size: best.len(), witness: best.iter().map(|&i| grid[i]).collect(), status: "evidence" })
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, best: &mut Vec<usize>) {
    if p.is_empty() && x.is_empty() {
        if r.len() > best.len() {
            *best = r;
        }
        return;
    }
    if r.len() + p.len() <= best.len() {
        return;
    }
    let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count());
    let Some(u) = pivot else { return };
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[u][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let x2 = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r2, p2, x2, best);
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// `|D|^{-K} Σ_w h(Σ_k d_k R^{-k})` over all digit words of length `K`.
pub fn ifs_integrate<T, F>(m: &IfsMeasure, h: F, depth: u32) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    let b = m.digits.len();
    let words = (b as f64).powi(depth as i32);
    if words > MAX_WORDS as f64 {
        let limit = ((MAX_WORDS as f64).ln() / (b as f64).ln()).floor() as usize;
        return Err(Error::DepthInsufficient { required: depth as usize, limit });
    }
    let words = words as usize;
    let r = T::lit(f64::from(m.scale));
    let weights: Vec<T> = (1..=depth).scan(T::one(), |w, _| {
        *w = *w / r;
        Some(*w)
    }).collect();
    let chunk = 4096usize;
    let partials: Vec<Complex<T>> = (0..words.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for mut idx in c * chunk..((c + 1) * chunk).min(words) {
                let mut x = T::zero();
                for w in &weights {
                    x = x + *w * T::lit(m.digits[idx % b] as f64);
                    idx /= b;
                }
                acc = acc + h(x);
            }
            acc
        })
        .collect();
    let total = partials.into_iter().fold(Complex::new(T::zero(), T::zero()), |a, v| a + v);
    Ok(total / T::from_usize_lossy(words))
}

/// Depth at which a Lipschitz-`lip` integrand is integrated to `tol`.
pub fn ifs_depth_for<T: Real>(m: &IfsMeasure, lip: T, tol: T) -> Result<u32> {
    let (lo, hi) = m.hull::<T>();
    let r = T::lit(f64::from(m.scale));
    let need = ((lip * (hi - lo) / tol).ln() / r.ln()).ceil().max(T::one());
    let b = m.digits.len() as f64;
    let limit = ((MAX_WORDS as f64).ln() / b.ln()).floor() as u32;
    let need = need.to_f64_lossy() as u32;
    if need > limit {
        return Err(Error::DepthInsufficient { required: need as usize, limit: limit as usize });
    }
    Ok(need)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParsevalReport<T> {
    pub rkhs_side: T,
    pub l2_side: T,
}

/// `Σ |c_λ|²` against `∫ |Σ c_λ e_λ|² dν`, the latter by [`ifs_integrate`] at a depth
/// chosen from the Lipschitz constant of the integrand.
pub fn parseval_check<T: Real>(coefficients: &[(T, Complex<T>)], m: &IfsMeasure, tol: T) -> Result<ParsevalReport<T>> {
    let rkhs_side: T = coefficients.iter().map(|(_, c)| c.norm_sqr()).sum();
    let l1: T = coefficients.iter().map(|(_, c)| c.norm()).sum();
    let d1: T = coefficients.iter().map(|(l, c)| c.norm() * T::TAU() * l.abs()).sum();
    let lip = T::lit(2.0) * l1 * d1;
    if lip == T::zero() {
        return Ok(ParsevalReport { rkhs_side, l2_side: rkhs_side });
    }
    let depth = ifs_depth_for(m, lip, tol)?;
    let g = |x: T| {
        let s = coefficients.iter().fold(Complex::new(T::zero(), T::zero()), |a, (l, c)| a + *c * cis(T::TAU() * *l * x));
        Complex::new(s.norm_sqr(), T::zero())
    };
    let l2_side = ifs_integrate(m, g, depth)?.re;
    Ok(ParsevalReport { rkhs_side, l2_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn lambda4_prefixes() {
        assert_eq!(lambda4(1).unwrap(), vec![0, 1]);
        assert_eq!(lambda4(3).unwrap(), vec![0, 1, 4, 5, 16, 17, 20, 21]);
        assert_eq!(lambda4(4).unwrap()[..10], [0, 1, 4, 5, 16, 17, 20, 21, 64, 65]);
        assert_eq!(lambda4(20).unwrap().len(), 1 << 20);
        assert!(lambda4(40).is_err());
    }

    #[test]
    fn nu_hat_basics() {
        let m = IfsMeasure::nu4();
        assert_eq!(nu_hat::<f64>(&m, 0.0).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(nu_hat::<f64>(&m, TAU).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(nu_hat::<f64>(&m, TAU * 12.0).unwrap(), Complex::new(0.0, 0.0));
        let xi = 7.3;
        let lhs = nu_hat(&m, xi).unwrap();
        let rhs = (Complex::new(1.0, 0.0) + Complex::new(0.0, xi / 2.0).exp()) / 2.0 * nu_hat(&m, xi / 4.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn mask_reproduces_stated_factor() {
        let m = IfsMeasure::nu4();
        for &xi in &[0.3, 1.0, 5.5, -17.0] {
            let expect = (Complex::new(1.0, 0.0) + Complex::new(0.0, xi / 2.0).exp()) / 2.0;
            assert!((m.mask(xi) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn depth_is_checked() {
        let m = IfsMeasure::nu4().with_depth(2);
        assert!(matches!(nu_hat::<f64>(&m, 100.0), Err(Error::DepthInsufficient { .. })));
    }

    #[test]
    fn gram_of_lambda4_prefix() {
        let freqs: Vec<f64> = lambda4(4).unwrap().into_iter().map(|l| l as f64).collect();
        let g = onb_gram(&IfsMeasure::nu4(), &freqs).unwrap();
        assert_eq!(g.max_off_diagonal(), 0.0);
        let one = onb_gram(&IfsMeasure::nu3(), &[0.0]).unwrap();
        assert_eq!(one.get(0, 0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn orth_search_examples() {
        let freqs: Vec<f64> = lambda4(4).unwrap().into_iter().map(|l| l as f64).collect();
        let r = max_orth_search(&IfsMeasure::nu4(), &freqs, 1e-8).unwrap();
        assert_eq!(r.max_size, 16);
        let r = max_orth_search(&IfsMeasure::nu3(), &[0.0], 1e-3).unwrap();
        assert_eq!(r.max_size, 1);
        let big: Vec<f64> = (0..201).map(f64::from).collect();
        assert!(matches!(max_orth_search(&IfsMeasure::nu3(), &big, 1e-3), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn integration_matches_transform() {
        let m = IfsMeasure::nu4();
        let one = ifs_integrate(&m, |_x: f64| Complex::new(1.0, 0.0), 5).unwrap();
        assert!((one.re - 1.0).abs() < 1e-15);
        for &xi in &[1.0, 3.0, 10.0] {
            let depth = ifs_depth_for(&m, xi, 1e-9).unwrap();
            let a = ifs_integrate(&m, |x: f64| Complex::new(0.0, xi * x).exp(), depth).unwrap();
            let b = nu_hat_with_error(&m, xi).unwrap();
            assert!((a - b.value).norm() <= 1e-9 + b.error, "xi={xi}");
        }
    }

    #[test]
    fn refinement_through_integration() {
        let m = IfsMeasure::nu4();
        let h = |x: f64| Complex::new(x.cos(), 0.0);
        let lhs = ifs_integrate(&m, |x: f64| (h(x / 4.0) + h((x + 2.0) / 4.0)) / 2.0, 12).unwrap();
        let rhs = ifs_integrate(&m, h, 12).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn parseval_examples() {
        let m = IfsMeasure::nu4();
        let c = |re: f64, im: f64| Complex::new(re, im);
        let r = parseval_check(&[(5.0, c(1.0, 0.0))], &m, 1e-7).unwrap();
        assert!((r.l2_side - 1.0).abs() < 1e-6 && r.rkhs_side == 1.0);
        let r = parseval_check(&[(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))], &m, 1e-7).unwrap();
        assert!((r.l2_side - 2.0).abs() < 1e-6);
        let r = parseval_check(&[(0.0, c(1.0, 0.0)), (1.0, c(0.0, 1.0)), (4.0, c(-1.0, 0.0))], &m, 1e-7).unwrap();
        assert!((r.l2_side - 3.0).abs() < 1e-6 && r.rkhs_side == 3.0);
    }

    #[test]
    fn nu3_has_no_exact_zero_at_integers() {
        let m = IfsMeasure::nu3();
        for k in 1..20 {
            assert!(nu_hat::<f64>(&m, TAU * f64::from(k)).unwrap().norm() > 0.0);
        }
        // zeros sit at ξ = 3^{k+1}π(2j+1)/2
        assert_eq!(nu_hat::<f64>(&m, 1.5 * PI).unwrap().norm(), 0.0);
    }
}
