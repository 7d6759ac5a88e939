//! Positive-definite soft thresholding
//!
//! ```text
//! minimise  |S − Σ̂|₂² + 2τ|S|₁ − λ·log det S   over S ≻ 0
//! ```
//!
//! solved by ADMM on the split `S = Z`: the smooth part (quadratic plus
//! barrier) has a closed-form prox through one eigendecomposition, the ℓ₁
//! part is entrywise soft thresholding. The penalty `ρ` starts at
//! `rho_admm` and is adapted by residual balancing.

use ndarray::{Array2, ArrayView2, Zip};

use super::threshold::with_tau;
use crate::linalg::{soft, sym_eigen};
use crate::spectral::{CovEstimate, EstimatorKind};
use crate::{lit, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdSoftConfig<T> {
    pub tau: T,
    pub lambda_barrier: T,
    pub max_iter: usize,
    pub tol: T,
    pub rho_admm: T,
}

impl<T: Real> PdSoftConfig<T> {
    pub fn new(tau: T, lambda_barrier: T) -> Self {
        Self {
            tau,
            lambda_barrier,
            max_iter: 10_000,
            tol: lit::<T>(1e-7).max(T::epsilon() * lit(100.0)),
            rho_admm: T::one(),
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.tau >= T::zero()
            && self.lambda_barrier > T::zero()
            && self.tol > T::zero()
            && self.max_iter >= 1
            && self.rho_admm > T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "pd-soft config needs τ ≥ 0, λ > 0, tol > 0, max_iter ≥ 1, ρ > 0 (got {self:?})"
            )))
        }
    }
}

/// Solver output with convergence diagnostics.
#[derive(Debug, Clone)]
pub struct PdSoftSolution<T> {
    /// Positive definite iterate `S`.
    pub matrix: Array2<T>,
    /// Sparse iterate `Z` (within `tol` of `matrix`).
    pub sparse: Array2<T>,
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
}

/// Objective value; `+∞` when `s` is not positive definite.
pub fn pd_soft_objective<T: Real>(s: ArrayView2<T>, target: ArrayView2<T>, tau: T, lambda: T) -> T {
    let eig = sym_eigen(s);
    if eig.min_value() <= T::zero() {
        return T::infinity();
    }
    let logdet: T = eig.values.iter().map(|d| d.ln()).sum();
    let mut fit = T::zero();
    let mut l1 = T::zero();
    Zip::from(s).and(target).for_each(|&x, &a| {
        fit += (x - a) * (x - a);
        l1 += x.abs();
    });
    fit + lit::<T>(2.0) * tau * l1 - lambda * logdet
}

/// Positive root of `k·x² − d·x − λ = 0`, computed without cancellation.
#[inline]
fn barrier_root<T: Real>(d: T, k: T, lambda: T) -> T {
    let disc = (d * d + lit::<T>(4.0) * k * lambda).sqrt();
    if d >= T::zero() {
        (d + disc) / (k + k)
    } else {
        (lambda + lambda) / (disc - d)
    }
}

/// Soft threshold projected onto `{S : λ_min(S) ≥ δ}`; the solver's warm start.
pub(crate) fn projected_soft<T: Real>(target: ArrayView2<T>, tau: T, floor: T) -> Array2<T> {
    let z = target.mapv(|x| soft(x, tau));
    sym_eigen(z.view()).reconstruct_with(|d| d.max(floor))
}

pub fn pd_soft_solve<T: Real>(target: ArrayView2<T>, cfg: &PdSoftConfig<T>) -> Result<PdSoftSolution<T>> {
    cfg.validate()?;
    let p = target.nrows();
    if p != target.ncols() {
        return Err(Error::DimensionMismatch { expected: p, got: target.ncols() });
    }
    let mut rho = cfg.rho_admm;
    let two = lit::<T>(2.0);
    let ten = lit::<T>(10.0);
    let floor = cfg.lambda_barrier.max(T::epsilon());

    let mut z = projected_soft(target, cfg.tau, floor);
    let mut w = Array2::<T>::zeros((p, p));
    let mut m = Array2::<T>::zeros((p, p));
    let (mut primal, mut dual) = (T::infinity(), T::infinity());

    for it in 1..=cfg.max_iter {
        let k = two + rho;
        let shrink = two * cfg.tau / rho;
        Zip::from(&mut m)
            .and(target)
            .and(&z)
            .and(&w)
            .for_each(|m, &a, &z, &w| *m = two * a + rho * (z - w));
        let s = sym_eigen(m.view()).reconstruct_with(|d| barrier_root(d, k, cfg.lambda_barrier));

        let mut z_change = T::zero();
        let mut gap = T::zero();
        Zip::from(&mut z).and(&s).and(&mut w).for_each(|z, &s, w| {
            let fresh = soft(s + *w, shrink);
            z_change += (fresh - *z) * (fresh - *z);
            *z = fresh;
            let r = s - fresh;
            gap += r * r;
            *w += r;
        });
        primal = gap.sqrt();
        dual = rho * z_change.sqrt();
        if primal.max(dual) < cfg.tol {
            return Ok(PdSoftSolution {
                matrix: s,
                sparse: z,
                iterations: it,
                primal_residual: primal,
                dual_residual: dual,
            });
        }
        // residual balancing; w is the scaled dual so it rescales with ρ
        if primal > ten * dual {
            rho = rho * two;
            w.mapv_inplace(|x| x / two);
        } else if dual > ten * primal {
            rho = rho / two;
            w.mapv_inplace(|x| x * two);
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        primal: primal.to_f64().unwrap_or(f64::NAN),
        dual: dual.to_f64().unwrap_or(f64::NAN),
    })
}

/// Positive-definite soft thresholding of an entrywise estimate. Applied to
/// the spectral estimate this is the `sps` estimator.
pub fn pd_soft_threshold<T: Real>(est: &CovEstimate<T>, cfg: &PdSoftConfig<T>) -> Result<CovEstimate<T>> {
    let sol = pd_soft_solve(est.view(), cfg)?;
    let mut tuning = with_tau(est.tuning, cfg.tau);
    tuning.lambda = cfg.lambda_barrier.to_f64();
    let kind = match est.kind {
        EstimatorKind::Sample => EstimatorKind::Pds,
        _ => EstimatorKind::Sps,
    };
    Ok(CovEstimate::new(sol.matrix, kind, tuning))
}
