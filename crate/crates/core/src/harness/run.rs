use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{CvSpec, EstimatorSpec, ExperimentSpec, GeneratorSpec, TheorySpec};
use crate::charfreq::SampleMatrix;
use crate::linalg::sym_eigen;
use crate::lowrank::{lambda_threshold, lowrank_estimate, LowRankConfig, WeightFunction};
use crate::shrinkage::{
    cross_validate_tau, hard_threshold, pd_soft_threshold, sample_covariance, soft_threshold, PdSoftConfig,
    ThresholdRule,
};
use crate::simgen::{covariance_root, frobenius_error, sample_with_root, NoiseModel};
use crate::spectral::{
    admissible, elliptical_spectral_estimate, spectral_estimate, tau_threshold, CovEstimate, EstimatorKind,
    SpectralConfig,
};
use crate::{Error, Result};

const DEFAULT_BARRIER: f64 = 1e-4;

/// SplitMix64 finaliser applied to `seed + (index + 1)·φ`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub replication: usize,
    pub estimator: String,
    pub kind: EstimatorKind,
    /// Missing when the estimator failed.
    pub frob_error: Option<f64>,
    pub wall_time_s: f64,
    pub tau: Option<f64>,
    pub u: Option<f64>,
    pub lambda: Option<f64>,
    /// Missing when the theory constants are not available for the estimator.
    pub admissible: Option<bool>,
    /// `ok`, or the error kind.
    pub status: String,
}

/// Everything an estimator may need besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationContext {
    pub gamma: f64,
    pub r_bound: Option<f64>,
    pub t_noise: Option<f64>,
    pub beta: Option<f64>,
    pub sigma_norm: Option<f64>,
    pub cv: Option<CvSpec>,
}

impl EstimationContext {
    pub fn from_theory(theory: &TheorySpec, cv: Option<CvSpec>) -> Self {
        Self {
            gamma: theory.gamma,
            r_bound: theory.r_bound,
            t_noise: theory.t_noise,
            beta: theory.beta,
            sigma_norm: theory.sigma_norm,
            cv,
        }
    }

    /// Fills unset constants from a known covariance and noise law.
    pub fn with_truth(mut self, sigma: &Array2<f64>, noise: &NoiseModel) -> Self {
        let max_entry = sigma.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.r_bound.get_or_insert(max_entry);
        self.sigma_norm.get_or_insert_with(|| sym_eigen(sigma.view()).max_value());
        if let Some(tag) = noise.class_tag() {
            self.t_noise.get_or_insert(tag.t);
            self.beta.get_or_insert(tag.beta);
        }
        self
    }

    fn spectral_config(&self, u: f64) -> Option<SpectralConfig<f64>> {
        Some(SpectralConfig::new(u, self.r_bound?, self.t_noise?, self.beta?).with_gamma(self.gamma))
    }
}

fn rule_for(spec: &EstimatorSpec) -> ThresholdRule<f64> {
    let barrier = || PdSoftConfig::new(0.0, spec.lambda.unwrap_or(DEFAULT_BARRIER));
    match spec.kind {
        EstimatorKind::Hard => ThresholdRule::Hard,
        EstimatorKind::Soft => ThresholdRule::Soft,
        EstimatorKind::Pds => ThresholdRule::Pds(barrier()),
        _ => ThresholdRule::Sps(barrier()),
    }
}

fn resolve_tau(spec: &EstimatorSpec, y: &SampleMatrix<f64>, ctx: &EstimationContext, seed: u64) -> Result<f64> {
    if let Some(t) = spec.tau {
        return Ok(t);
    }
    if let Some(cv) = &ctx.cv {
        // the radius only enters through the validation reference
        let u = spec.u.ok_or_else(|| Error::Config(format!("{}: cross-validation needs u", spec.label())))?;
        let cfg = cv.config(derive_seed(seed, cv.seed))?;
        return Ok(cross_validate_tau(y, u, &cfg, &rule_for(spec))?.tau_hat);
    }
    let u = spec.u.ok_or_else(|| Error::Config(format!("{}: no tau and no u", spec.label())))?;
    let cfg = ctx
        .spectral_config(u)
        .ok_or_else(|| Error::Config(format!("{}: theory threshold needs r_bound, t_noise and beta", spec.label())))?;
    Ok(tau_threshold(&cfg, y.n(), y.p()))
}

/// Runs one estimator. Also returns the admissibility flag when it applies.
pub fn run_estimator(
    spec: &EstimatorSpec,
    y: &SampleMatrix<f64>,
    ctx: &EstimationContext,
    seed: u64,
) -> Result<(CovEstimate<f64>, Option<bool>)> {
    spec.validate()?;
    let u = || spec.u.ok_or_else(|| Error::Config(format!("{}: u is required", spec.label())));
    let barrier = spec.lambda.unwrap_or(DEFAULT_BARRIER);
    let est = match spec.kind {
        EstimatorKind::Sample => sample_covariance(y),
        EstimatorKind::Spectral => spectral_estimate(y, u()?)?,
        EstimatorKind::Hard => hard_threshold(&spectral_estimate(y, u()?)?, resolve_tau(spec, y, ctx, seed)?),
        EstimatorKind::Soft => soft_threshold(&spectral_estimate(y, u()?)?, resolve_tau(spec, y, ctx, seed)?),
        EstimatorKind::Sps => {
            let tau = resolve_tau(spec, y, ctx, seed)?;
            pd_soft_threshold(&spectral_estimate(y, u()?)?, &PdSoftConfig::new(tau, barrier))?
        }
        EstimatorKind::Pds => {
            let tau = resolve_tau(spec, y, ctx, seed)?;
            pd_soft_threshold(&sample_covariance(y), &PdSoftConfig::new(tau, barrier))?
        }
        EstimatorKind::Elliptical => {
            let generator = spec.generator.unwrap_or(GeneratorSpec::Gaussian).build()?;
            elliptical_spectral_estimate(y, u()?, &generator)?
        }
        EstimatorKind::Lowrank => {
            let radius = u()?;
            let lambda = match spec.lambda {
                Some(l) => l,
                None => {
                    let missing = || Error::Config(format!("{}: default lambda needs sigma_norm, t_noise and beta", spec.label()));
                    let (s, t, b) = (
                        ctx.sigma_norm.ok_or_else(missing)?,
                        ctx.t_noise.ok_or_else(missing)?,
                        ctx.beta.ok_or_else(missing)?,
                    );
                    lambda_threshold(radius, s, t, b, ctx.gamma, y.n()).lambda
                }
            };
            let mut cfg = LowRankConfig::new(radius, lambda, y.n());
            if let Some(k) = spec.mc_samples {
                cfg.mc_samples = k;
            }
            if let Some(psd) = spec.psd_constrained {
                cfg.psd_constrained = psd;
            }
            lowrank_estimate(y, &cfg, &WeightFunction::bump(y.p())?, seed)?
        }
    };
    let flag = match spec.kind {
        EstimatorKind::Spectral
        | EstimatorKind::Hard
        | EstimatorKind::Soft
        | EstimatorKind::Sps
        | EstimatorKind::Elliptical => spec
            .u
            .and_then(|u| ctx.spectral_config(u))
            .map(|cfg| admissible(&cfg, y.n(), y.p())),
        _ => None,
    };
    Ok((est, flag))
}

fn failed(rep: usize, spec: &EstimatorSpec, wall: f64, err: &Error) -> ResultRecord {
    ResultRecord {
        replication: rep,
        estimator: spec.label(),
        kind: spec.kind,
        frob_error: None,
        wall_time_s: wall,
        tau: spec.tau,
        u: spec.u,
        lambda: spec.lambda,
        admissible: None,
        status: err.kind().to_string(),
    }
}

/// All replications × estimators, ordered by replication then estimator
/// list position. Estimator failures are recorded, never propagated.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    spec.validate()?;
    let sigma = spec.scenario.cov.matrix()?;
    let root = covariance_root(sigma.view())?;
    let ctx = EstimationContext::from_theory(&spec.theory, spec.cv.clone()).with_truth(&sigma, &spec.scenario.noise);
    let timing = spec.output.timing;

    let per_rep: Vec<Vec<ResultRecord>> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(spec.scenario.seed, rep as u64);
            let y = match sample_with_root(root.view(), &spec.scenario.noise, spec.scenario.n, seed) {
                Ok(y) => y,
                Err(e) => return spec.estimators.iter().map(|s| failed(rep, s, 0.0, &e)).collect(),
            };
            spec.estimators
                .iter()
                .enumerate()
                .map(|(k, es)| {
                    let start = Instant::now();
                    let out = run_estimator(es, &y, &ctx, derive_seed(seed, k as u64));
                    let wall = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
                    match out.and_then(|(est, flag)| Ok((frobenius_error(&est, sigma.view())?, est, flag))) {
                        Ok((err, est, flag)) => ResultRecord {
                            replication: rep,
                            estimator: es.label(),
                            kind: es.kind,
                            frob_error: Some(err),
                            wall_time_s: wall,
                            tau: est.tuning.tau,
                            u: est.tuning.u,
                            lambda: est.tuning.lambda,
                            admissible: flag,
                            status: "ok".into(),
                        },
                        Err(e) => failed(rep, es, wall, &e),
                    }
                })
                .collect()
        })
        .collect();
    Ok(per_rep.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::OutputSpec;
    use crate::simgen::{make_tridiagonal, sample_scenario, CovModel, Scenario};

    fn spec(estimators: Vec<EstimatorSpec>, noise: NoiseModel, reps: usize) -> ExperimentSpec {
        ExperimentSpec {
            scenario: Scenario { cov: CovModel::Tridiagonal { p: 5, offdiag: 0.4 }, noise, n: 60, seed: 3 },
            estimators,
            replications: reps,
            cv: None,
            theory: TheorySpec::default(),
            output: OutputSpec { timing: false, ..OutputSpec::default() },
        }
    }

    #[test]
    fn single_cov_record_matches_direct_computation() {
        let s = spec(vec![EstimatorSpec::new(EstimatorKind::Sample)], NoiseModel::None, 1);
        let recs = run_experiment(&s).unwrap();
        assert_eq!(recs.len(), 1);
        let y = sample_scenario(&Scenario { seed: derive_seed(3, 0), ..s.scenario.clone() }).unwrap();
        let direct = frobenius_error(&sample_covariance(&y), make_tridiagonal(5).view()).unwrap();
        assert_eq!(recs[0].frob_error, Some(direct));
        assert_eq!(recs[0].status, "ok");
        assert_eq!(recs[0].admissible, None);
    }

    #[test]
    fn records_are_ordered_and_deterministic() {
        let ests = vec![
            EstimatorSpec::new(EstimatorKind::Sample),
            EstimatorSpec::new(EstimatorKind::Sps).with_u(1.0).with_tau(0.1),
            EstimatorSpec::new(EstimatorKind::Hard).with_u(1.0),
        ];
        let s = spec(ests, NoiseModel::GammaElliptical { a: None, theta: 0.5 }, 6);
        let a = run_experiment(&s).unwrap();
        let b = run_experiment(&s).unwrap();
        assert_eq!(a, b);
        let keys: Vec<(usize, String)> = a.iter().map(|r| (r.replication, r.estimator.clone())).collect();
        let want: Vec<(usize, String)> =
            (0..6).flat_map(|r| ["cov", "sps", "hard"].map(|e| (r, e.to_string()))).collect();
        assert_eq!(keys, want);
        // theory τ for hard thresholding, with the Gamma class constants
        let hard = &a[2];
        assert!(hard.tau.unwrap() > 0.0);
        assert!(hard.admissible.is_some());
    }

    #[test]
    fn failures_are_isolated() {
        let ests = vec![
            EstimatorSpec::new(EstimatorKind::Sample),
            // Gaussian noise has no class constants, so the theory threshold is unavailable
            EstimatorSpec::new(EstimatorKind::Soft).with_u(1.0),
        ];
        let s = spec(ests, NoiseModel::Gaussian { rho: 0.5 }, 3);
        let recs = run_experiment(&s).unwrap();
        for r in &recs {
            if r.estimator == "cov" {
                assert_eq!(r.status, "ok");
            } else {
                assert_eq!(r.status, "config");
                assert_eq!(r.frob_error, None);
            }
        }
    }

    #[test]
    fn cv_resolves_tau_on_grid() {
        let mut s = spec(
            vec![EstimatorSpec::new(EstimatorKind::Soft).with_u(1.0)],
            NoiseModel::GammaElliptical { a: None, theta: 0.5 },
            2,
        );
        s.cv = Some(CvSpec { num_splits: 3, tau_grid: Some(vec![0.05, 0.1, 0.2]), seed: 1 });
        let recs = run_experiment(&s).unwrap();
        for r in recs {
            assert!([0.05, 0.1, 0.2].contains(&r.tau.unwrap()));
        }
    }

    #[test]
    fn seeds_differ_per_index() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 9), derive_seed(5, 9));
    }
}
