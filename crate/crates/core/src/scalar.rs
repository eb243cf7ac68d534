//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar. Implemented for `f32` and `f64`.
///
/// The trait only gathers bounds; all arithmetic comes from `num_traits::Float`.
/// Special functions without a `Float` method (`erfc`) are routed through `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Complementary error function.
    #[inline]
    fn erfc(self) -> Self {
        Self::lit(libm::erfc(self.to_f64_lossy()))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `(e^{iz} − 1)/(iz)` with its removable singularity at `z = 0` handled by series.
pub fn expm1_ratio<T: Real>(z: T) -> Complex<T> {
    if z.abs() < T::lit(1e-4) {
        // 1 + iz/2 − z²/6 − iz³/24
        let z2 = z * z;
        Complex::new(T::one() - z2 / T::lit(6.0), z / T::lit(2.0) - z2 * z / T::lit(24.0))
    } else {
        // sin z / z + i (1 − cos z)/z
        Complex::new(z.sin() / z, (T::one() - z.cos()) / z)
    }
}

/// `sin(z)/z` with the series branch near zero.
pub fn sinc<T: Real>(z: T) -> T {
    if z.abs() < T::lit(1e-4) {
        T::one() - z * z / T::lit(6.0)
    } else {
        z.sin() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_ratio_branches_agree_near_switch() {
        for &z in &[9.999e-5f64, 1.0001e-4, -1.0001e-4] {
            let direct = (cis(z) - Complex::new(1.0, 0.0)) / Complex::new(0.0, z);
            assert!((expm1_ratio(z) - direct).norm() < 1e-10);
        }
        assert_eq!(expm1_ratio(0.0f64), Complex::new(1.0, 0.0));
    }

    #[test]
    fn sinc_is_continuous() {
        for &z in &[0.999e-4f64, 1.001e-4, 3e-5] {
            assert!((sinc(z) - z.sin() / z).abs() < 1e-15);
        }
        assert_eq!(sinc(0.0f32), 1.0);
    }

    #[test]
    fn erfc_matches_known_value() {
        assert!((Real::erfc(1.0f64) - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!((Real::erfc(1.0f32) - 0.157_299_2).abs() < 1e-6);
    }
}
