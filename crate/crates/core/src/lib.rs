//! Finite-dimensional toolkit for operational quantum measurement theory.
//!
//! The crate models POVMs on finite outcome spaces together with their
//! equivalent representations — statistical maps on density matrices,
//! positive unital maps out of bounded functions, and predual maps into
//! integrable functions — plus the Radon–Nikodym machinery needed to
//! compose measurements sequentially. A spin-1/2 demonstration builds the
//! direction measurement on a discretized sphere, follows it with a
//! spin-component measurement along the observed direction, and checks the
//! two exact identities the composite must satisfy.
//!
//! All numeric types are generic over the real scalar (`f32` or `f64`)
//! through the [`scalar::Scalar`] trait; the crate root exports `f64`
//! aliases for the common types.

pub mod duality;
pub mod effect_algebra;
pub mod error;
pub mod io;
pub mod operator;
pub mod outcome;
pub mod povm;
pub mod sampling;
pub mod scalar;
pub mod sequential;
pub mod spin;

pub use error::{Error, Result};
pub use operator::{
    classify, operator_norm, psd_sqrt, spectral_decompose, ComplexMatrix, ConjugationDirection,
    DensityMatrix, Effect, Isometry, OperatorClass, SpectralDecomposition,
};
pub use scalar::{cplx, Scalar, Tolerances, C};

/// Double-precision aliases for the core types.
pub type C64 = C<f64>;
pub type Matrix64 = ComplexMatrix<f64>;
pub type Effect64 = Effect<f64>;
pub type Density64 = DensityMatrix<f64>;
pub type Isometry64 = Isometry<f64>;
pub type Tolerances64 = Tolerances<f64>;
pub type Measure64 = outcome::FiniteMeasure<f64>;
pub type Fn64 = outcome::MeasurableFn<f64>;
pub type Distribution64 = outcome::Distribution<f64>;
pub type Kleisli64 = outcome::KleisliMap<f64>;
pub type Povm64 = povm::Povm<f64>;
pub type StatisticalMap64 = duality::StatisticalMap<f64>;
pub type ObservableMap64 = duality::ObservableMap<f64>;
pub type PredualMap64 = duality::PredualMap<f64>;
pub type Family64 = sequential::IndexedPovmFamily<f64>;
pub type SphereGrid64 = spin::SphereGrid<f64>;
