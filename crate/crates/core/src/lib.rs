//! Positive definite functions on the line, their spectral measures, and the
//! reproducing kernel Hilbert spaces and Gaussian processes they define.
//!
//! Fourier convention throughout: `φ̂(λ) = ∫ φ(x) e^{iλx} dx` and `f(x) = ∫ e^{ixλ} dμ(λ)`.
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar.

// `!(x > 0)` style comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod cantor;
pub mod comb;
pub mod error;
pub mod gp;
pub mod linalg;
pub mod quad;
pub mod rkhs;
pub mod scalar;
pub mod spectra;
pub mod testfn;

pub use error::{Error, Result};
pub use scalar::Real;

pub use cantor::IfsMeasure;

pub type SpectralMeasureF64 = spectra::SpectralMeasure<f64>;
pub type SpectralMeasureF32 = spectra::SpectralMeasure<f32>;
pub type PdKernelF64 = spectra::PdKernel<f64>;
pub type PdKernelF32 = spectra::PdKernel<f32>;
pub type TestFunctionF64 = testfn::TestFunction<f64>;
pub type TestFunctionF32 = testfn::TestFunction<f32>;
pub type RkhsElementF64 = rkhs::RkhsElement<f64>;
pub type RkhsElementF32 = rkhs::RkhsElement<f32>;
pub type DiracCombF64 = comb::DiracComb<f64>;
pub type GpModelF64 = gp::GpModel<f64>;
pub type GpModelF32 = gp::GpModel<f32>;
pub type CyclicPdFunctionF64 = abelian::CyclicPdFunction<f64>;
pub type CyclicPdFunctionF32 = abelian::CyclicPdFunction<f32>;
pub type ComplexMatrixF64 = linalg::ComplexMatrix<f64>;
