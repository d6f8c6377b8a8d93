//! Scalar abstraction for the numerical core.
//!
//! Everything downstream is generic over [`Real`], which is satisfied by
//! `f32` and `f64`. The trait folds in the bounds needed by the FFT backend
//! and adds the special functions used for Gaussian tail estimates.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar type for grids, wavefunctions, and spectra.
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + FftNum {
    /// Converts an `f64` constant into the scalar type.
    ///
    /// Panics if the value is not representable, which cannot happen for the
    /// finite literals this crate feeds it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal must convert")
    }

    /// Returns `self` as `f64` for diagnostics and special functions.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    /// Error function.
    fn erf(self) -> Self {
        Self::lit(libm::erf(self.as_f64()))
    }

    /// Complementary error function.
    fn erfc(self) -> Self {
        Self::lit(libm::erfc(self.as_f64()))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// The imaginary unit.
pub fn im<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}

/// `e^{i theta}` as a complex scalar.
pub fn cis<T: Real>(theta: T) -> C<T> {
    C::new(theta.cos(), theta.sin())
}
