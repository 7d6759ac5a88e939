//! Entrywise thresholding, its positive-definite variant, cross-validated
//! threshold selection and the sample-covariance baselines.
//!
//! Diagonal entries are thresholded together with the off-diagonal ones.

mod cv;
mod pdsoft;
mod threshold;

pub use cv::{cross_validate_tau, default_tau_grid, split_sizes, CvConfig, CvOutcome, ThresholdRule};
pub use pdsoft::{pd_soft_objective, pd_soft_solve, pd_soft_threshold, PdSoftConfig, PdSoftSolution};
pub use threshold::{hard_threshold, soft_threshold};

use ndarray::Array2;

use crate::charfreq::SampleMatrix;
use crate::spectral::{CovEstimate, EstimatorKind, Tuning};
use crate::{Real, Result};

/// `(1/n) Σⱼ YⱼYⱼᵀ`, without centring.
pub fn sample_covariance<T: Real>(y: &SampleMatrix<T>) -> CovEstimate<T> {
    let data = y.data();
    let n = T::from_usize(y.n()).unwrap();
    let mut m: Array2<T> = data.t().dot(&data);
    m.mapv_inplace(|x| x / n);
    let p = m.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            let v = m[[i, j]];
            m[[j, i]] = v;
        }
    }
    CovEstimate::new(m, EstimatorKind::Sample, Tuning::default())
}

/// Positive-definite soft thresholding of the sample covariance.
pub fn pds_baseline<T: Real>(y: &SampleMatrix<T>, cfg: &PdSoftConfig<T>) -> Result<CovEstimate<T>> {
    let est = pd_soft_threshold(&sample_covariance(y), cfg)?;
    let tuning = est.tuning;
    Ok(est.relabel(EstimatorKind::Pds, tuning))
}
