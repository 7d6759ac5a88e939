//! Threshold selection by repeated random splitting.
//!
//! Each split trains the thresholded estimator on `n₁ = n − ⌊n/log n⌋` rows and
//! compares it with the plain spectral estimate on the remaining `n₂` rows.

use ndarray::Zip;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{hard_threshold, pd_soft_threshold, sample_covariance, soft_threshold, PdSoftConfig};
use crate::charfreq::SampleMatrix;
use crate::spectral::{spectral_estimate, CovEstimate};
use crate::{lit, Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig<T> {
    pub num_splits: usize,
    pub tau_grid: Vec<T>,
    pub seed: u64,
}

impl<T: Real> CvConfig<T> {
    pub fn new(num_splits: usize, tau_grid: Vec<T>, seed: u64) -> Result<Self> {
        let cfg = Self { num_splits, tau_grid, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_splits == 0 {
            return Err(Error::InvalidArgument("need at least one split".into()));
        }
        if self.tau_grid.is_empty() {
            return Err(Error::InvalidArgument("τ grid is empty".into()));
        }
        if self.tau_grid.iter().any(|t| !(*t > T::zero()) || !t.is_finite())
            || self.tau_grid.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidArgument("τ grid must be positive and strictly ascending".into()));
        }
        Ok(())
    }
}

/// 40 log-spaced thresholds in `[10⁻³, 2]`.
pub fn default_tau_grid<T: Real>() -> Vec<T> {
    log_grid(1e-3, 2.0, 40)
}

pub(crate) fn log_grid<T: Real>(lo: f64, hi: f64, points: usize) -> Vec<T> {
    if points == 1 {
        return vec![lit(lo)];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| lit((a + (b - a) * k as f64 / (points - 1) as f64).exp()))
        .collect()
}

/// Estimator fitted on the training part for each candidate threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule<T> {
    /// Hard thresholding of the spectral estimate.
    Hard,
    /// Soft thresholding of the spectral estimate.
    Soft,
    /// Positive-definite soft thresholding of the spectral estimate; `tau` in the config is ignored.
    Sps(PdSoftConfig<T>),
    /// Positive-definite soft thresholding of the sample covariance.
    Pds(PdSoftConfig<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome<T> {
    pub tau_hat: T,
    /// `Q_N(τ)` for every grid point, in grid order.
    pub q_values: Vec<T>,
}

/// `(n₁, n₂)` with `n₂ = ⌊n / log n⌋`.
pub fn split_sizes(n: usize) -> Result<(usize, usize)> {
    let n2 = if n >= 2 { (n as f64 / (n as f64).ln()).floor() as usize } else { 0 };
    let n1 = n.saturating_sub(n2);
    if n < 4 || n1 == 0 || n2 == 0 {
        return Err(Error::DegenerateSplit { n, n1, n2 });
    }
    Ok((n1, n2))
}

fn fit<T: Real>(
    base: &CovEstimate<T>,
    rule: &ThresholdRule<T>,
    tau: T,
) -> Result<CovEstimate<T>> {
    Ok(match rule {
        ThresholdRule::Hard => hard_threshold(base, tau),
        ThresholdRule::Soft => soft_threshold(base, tau),
        ThresholdRule::Sps(c) | ThresholdRule::Pds(c) => pd_soft_threshold(base, &PdSoftConfig { tau, ..*c })?,
    })
}

pub fn cross_validate_tau<T: Real>(
    y: &SampleMatrix<T>,
    radius: T,
    cfg: &CvConfig<T>,
    rule: &ThresholdRule<T>,
) -> Result<CvOutcome<T>> {
    cfg.validate()?;
    let n = y.n();
    let (n1, _) = split_sizes(n)?;

    let per_split: Vec<Result<Vec<T>>> = (0..cfg.num_splits)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(m as u64);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let train = y.select_rows(&idx[..n1])?;
            let valid = y.select_rows(&idx[n1..])?;
            let reference = spectral_estimate(&valid, radius)?;
            let base = match rule {
                ThresholdRule::Pds(_) => sample_covariance(&train),
                _ => spectral_estimate(&train, radius)?,
            };
            cfg.tau_grid
                .iter()
                .map(|&tau| {
                    let est = fit(&base, rule, tau)?;
                    let mut d = T::zero();
                    Zip::from(&est.matrix)
                        .and(&reference.matrix)
                        .for_each(|&a, &b| d += (a - b) * (a - b));
                    Ok(d)
                })
                .collect()
        })
        .collect();

    let mut q_values = vec![T::zero(); cfg.tau_grid.len()];
    for split in per_split {
        for (q, d) in q_values.iter_mut().zip(split?) {
            *q += d;
        }
    }
    // strict comparison keeps the smallest τ among ties
    let mut best = 0;
    for (k, q) in q_values.iter().enumerate() {
        if *q < q_values[best] {
            best = k;
        }
    }
    Ok(CvOutcome { tau_hat: cfg.tau_grid[best], q_values })
}
