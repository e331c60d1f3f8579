//! Generic real scalar underlying all complex linear algebra in this crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Every numeric type in the crate is generic over this trait; the crate root
/// exports `f64` aliases for everyday use.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the crate's scalar.
pub type C<S> = Complex<S>;

/// Shorthand complex constructor from `f64` parts.
pub fn cplx<S: Scalar>(re: f64, im: f64) -> C<S> {
    Complex::new(S::from_real(re), S::from_real(im))
}

/// Numerical tolerances used by every validating constructor and check.
///
/// The mathematics is exact; floating point needs one documented knob. All
/// fields default to `1e-9` and can be overridden per construction site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<S: Scalar> {
    /// Allowed deviation from Hermitian symmetry.
    pub herm: S,
    /// Allowed negative part of eigenvalues for PSD checks; eigenvalues in
    /// `[-psd, 0)` are clamped to 0 before square roots.
    pub psd: S,
    /// Allowed residual in reconstructions, round trips and equalities.
    pub recon: S,
    /// Allowed deviation of a density-matrix trace from 1.
    pub trace: S,
    /// Allowed deviation of a POVM's total effect from the identity.
    pub norm: S,
    /// Allowed deviation of a probability total from 1.
    pub prob: S,
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        Self::uniform(S::from_real(1e-9))
    }
}

impl<S: Scalar> Tolerances<S> {
    /// One value for every knob.
    pub fn uniform(eps: S) -> Self {
        Tolerances {
            herm: eps,
            psd: eps,
            recon: eps,
            trace: eps,
            norm: eps,
            prob: eps,
        }
    }
}
