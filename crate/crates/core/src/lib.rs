//! Covariance estimation for a Gaussian signal observed through additive
//! noise of unknown distribution.
//!
//! The core estimator works on the empirical characteristic function of the
//! observations `Y = X + ε`: probing it at a large spectral radius separates
//! the Gaussian exponent of `X` from the slower-decaying exponent of `ε`.
//! On top of the raw entrywise estimate sit hard, soft and positive-definite
//! soft thresholding, a weighted nuclear-norm estimator for low-rank
//! covariances, scenario generators and a reproducible experiment harness.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! simulation and harness layers use.

pub mod charfreq;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lowrank;
pub mod shrinkage;
pub mod simgen;
pub mod spectral;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::NdFloat;
use num_traits::FromPrimitive;

pub use error::{Error, Result};

/// Floating point scalar the estimators are generic over.
pub trait Real: NdFloat + FromPrimitive + Sum + Debug + Display + Default {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

pub type SampleMatrix = charfreq::SampleMatrix<f64>;
pub type Frequency = charfreq::Frequency<f64>;
pub type CfValue = charfreq::CfValue<f64>;
pub type CovEstimate = spectral::CovEstimate<f64>;
pub type SpectralConfig = spectral::SpectralConfig<f64>;
pub type EllipticalGenerator = spectral::EllipticalGenerator<f64>;
pub type PdSoftConfig = shrinkage::PdSoftConfig<f64>;
pub type CvConfig = shrinkage::CvConfig<f64>;
pub type LowRankConfig = lowrank::LowRankConfig<f64>;
pub type Quadrature = lowrank::Quadrature<f64>;

pub use spectral::{EstimatorKind, Tuning};
