//! The spectral covariance estimator, its theory-driven tuning constants and
//! the elliptical generalisation.
//!
//! For a Gaussian signal, `log|φ(u)| = −⟨u,Σu⟩/2 + log|ψ(u)|`. Probing at
//! `U·u^{(i,j)}` and normalising by `U²` gives
//!
//! ```text
//! σ̂ᵢᵢ = −2·U⁻²·log|φₙ(U·eᵢ)|
//! σ̂ᵢⱼ = −2·U⁻²·log|φₙ(U·(eᵢ+eⱼ)/√2)| − (σ̂ᵢᵢ + σ̂ⱼⱼ)/2
//! ```
//!
//! and the noise contributes a bias of order `U^{β−2}` when `|log ψ(u)| ≲ |u|^β`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::charfreq::{probe_log_moduli, CfOptions, SampleMatrix};
use crate::{lit, Error, Real, Result};

/// Which estimator produced a [`CovEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Spectral,
    #[serde(alias = "cov")]
    Sample,
    Hard,
    Soft,
    Pds,
    Sps,
    #[serde(alias = "low_rank")]
    Lowrank,
    Elliptical,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Spectral => "spectral",
            EstimatorKind::Sample => "cov",
            EstimatorKind::Hard => "hard",
            EstimatorKind::Soft => "soft",
            EstimatorKind::Pds => "pds",
            EstimatorKind::Sps => "sps",
            EstimatorKind::Lowrank => "lowrank",
            EstimatorKind::Elliptical => "elliptical",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectral" => EstimatorKind::Spectral,
            "cov" | "sample" => EstimatorKind::Sample,
            "hard" => EstimatorKind::Hard,
            "soft" => EstimatorKind::Soft,
            "pds" => EstimatorKind::Pds,
            "sps" => EstimatorKind::Sps,
            "lowrank" | "low_rank" => EstimatorKind::Lowrank,
            "elliptical" => EstimatorKind::Elliptical,
            other => return Err(Error::InvalidArgument(format!("unknown estimator '{other}'"))),
        })
    }
}

/// Tuning values actually used to produce an estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub u: Option<f64>,
    pub tau: Option<f64>,
    pub lambda: Option<f64>,
}

/// A symmetric `p×p` covariance estimate with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovEstimate<T> {
    pub matrix: Array2<T>,
    pub kind: EstimatorKind,
    pub tuning: Tuning,
}

impl<T: Real> CovEstimate<T> {
    pub fn new(matrix: Array2<T>, kind: EstimatorKind, tuning: Tuning) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix, kind, tuning }
    }

    pub fn p(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, T> {
        self.matrix.view()
    }

    pub fn is_symmetric(&self) -> bool {
        let p = self.p();
        (0..p).all(|i| (0..i).all(|j| self.matrix[[i, j]] == self.matrix[[j, i]]))
    }

    /// Same matrix with a different tag and tuning record.
    pub(crate) fn relabel(self, kind: EstimatorKind, tuning: Tuning) -> Self {
        Self { matrix: self.matrix, kind, tuning }
    }
}

/// Theory constants: spectral radius `U`, concentration level `γ`, entry bound
/// `R ≥ |Σ|_∞`, noise-class constant `T` and decay exponent `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig<T> {
    pub spectral_radius: T,
    pub gamma: T,
    pub r_bound: T,
    pub t_noise: T,
    pub beta: T,
}

impl<T: Real> SpectralConfig<T> {
    pub fn new(spectral_radius: T, r_bound: T, t_noise: T, beta: T) -> Self {
        Self { spectral_radius, gamma: lit(1.5), r_bound, t_noise, beta }
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.spectral_radius > T::zero()) {
            return bad("spectral radius U must be positive");
        }
        if !(self.gamma > lit::<T>(2.0).sqrt()) {
            return bad("γ must exceed √2");
        }
        if !(self.beta >= T::zero() && self.beta < lit(2.0)) {
            return bad("β must lie in [0, 2)");
        }
        if !(self.r_bound > T::zero() && self.t_noise >= T::zero()) {
            return bad("R must be positive and T nonnegative");
        }
        Ok(())
    }
}

fn check_radius<T: Real>(u: T) -> Result<()> {
    if u > T::zero() && u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("spectral radius must be positive, got {u}")))
    }
}

/// Assembles the estimate from `−log|φₙ|` at the probes, mapping each value by
/// `inverse` before the `U⁻²` normalisation.
fn assemble<T: Real>(
    log_moduli: ArrayView2<T>,
    radius: T,
    inverse: impl Fn(T) -> T,
) -> Result<Array2<T>> {
    let p = log_moduli.nrows();
    let u2 = radius * radius;
    let half = lit::<T>(0.5);
    let mut out = Array2::<T>::zeros((p, p));
    for i in 0..p {
        let v = inverse(-log_moduli[[i, i]]) / u2;
        if !v.is_finite() {
            return Err(Error::GeneratorDomain { i, j: i });
        }
        out[[i, i]] = v;
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let v = inverse(-log_moduli[[i, j]]) / u2 - (out[[i, i]] + out[[j, j]]) * half;
            if !v.is_finite() {
                return Err(Error::GeneratorDomain { i, j });
            }
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}

#[inline]
fn gaussian_inverse<T: Real>(y: T) -> T {
    y + y
}

/// Spectral covariance estimate at radius `U`.
pub fn spectral_estimate<T: Real>(y: &SampleMatrix<T>, radius: T) -> Result<CovEstimate<T>> {
    check_radius(radius)?;
    let logs = probe_log_moduli(y, radius, &CfOptions::default());
    spectral_from_log_moduli(logs.view(), radius)
}

/// Spectral estimate from a precomputed probe matrix `L[i,j] = log|φ(U·u^{(i,j)})|`.
/// Feeding exact characteristic-function values here recovers `Σ` exactly.
pub fn spectral_from_log_moduli<T: Real>(
    log_moduli: ArrayView2<T>,
    radius: T,
) -> Result<CovEstimate<T>> {
    check_radius(radius)?;
    let m = assemble(log_moduli, radius, gaussian_inverse)?;
    Ok(CovEstimate::new(
        m,
        EstimatorKind::Spectral,
        Tuning { u: radius.to_f64(), ..Tuning::default() },
    ))
}

/// Universal threshold `τ(U)` under which all entries concentrate.
pub fn tau_threshold<T: Real>(cfg: &SpectralConfig<T>, n: usize, p: usize) -> T {
    let u = cfg.spectral_radius;
    let nf = T::from_usize(n).unwrap();
    let log_ep = (lit::<T>(std::f64::consts::E) * T::from_usize(p).unwrap()).ln();
    let growth = (cfg.r_bound * u * u + lit::<T>(3.0) * cfg.t_noise * u.powf(cfg.beta)).exp();
    lit::<T>(6.0) * cfg.gamma * growth / (u * u) * (log_ep / nf).sqrt()
        + lit::<T>(3.0) * cfg.t_noise * u.powf(cfg.beta - lit(2.0))
}

/// Whether `8γ√(log(ep)/n) < exp(−RU² − 3TU^β)` holds. Estimation never
/// depends on this flag; it only qualifies the concentration guarantee.
pub fn admissible<T: Real>(cfg: &SpectralConfig<T>, n: usize, p: usize) -> bool {
    let u = cfg.spectral_radius;
    let nf = T::from_usize(n).unwrap();
    let log_ep = (lit::<T>(std::f64::consts::E) * T::from_usize(p).unwrap()).ln();
    let lhs = lit::<T>(8.0) * cfg.gamma * (log_ep / nf).sqrt();
    let rhs = (-cfg.r_bound * u * u - lit::<T>(3.0) * cfg.t_noise * u.powf(cfg.beta)).exp();
    lhs < rhs
}

/// Rate-optimal spectral radius `U* = √(log(n / (64γ² log(ep))) / (4R))`.
pub fn spectral_radius_star<T: Real>(r_bound: T, gamma: T, n: usize, p: usize) -> Result<T> {
    if !(r_bound > T::zero()) {
        return Err(Error::InvalidArgument("R must be positive".into()));
    }
    let log_ep = (lit::<T>(std::f64::consts::E) * T::from_usize(p).unwrap()).ln();
    let threshold = lit::<T>(64.0) * gamma * gamma * log_ep;
    let nf = T::from_usize(n).unwrap();
    if !(nf > threshold) {
        return Err(Error::PreAsymptotic {
            n,
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(((nf / threshold).ln() / (lit::<T>(4.0) * r_bound)).sqrt())
}

/// Checks the checkable part of the radius condition behind the minimax rate,
/// `U* ≥ (3T/R)^{1/(2−β)} ∨ 1`. The remaining `(c̄/T)^{1/β}` term has an
/// unspecified constant and is not checked.
pub fn radius_star_in_range<T: Real>(u_star: T, r_bound: T, t_noise: T, beta: T) -> bool {
    let floor = (lit::<T>(3.0) * t_noise / r_bound).powf(T::one() / (lit::<T>(2.0) - beta));
    u_star >= floor.max(T::one())
}

/// Parameters of the constant-free minimax rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams<T> {
    /// Sparsity level `S` of the class `G_q(S, R)`.
    pub sparsity: T,
    pub r_bound: T,
    pub t_noise: T,
    pub beta: T,
    /// Sparsity exponent `q ∈ [0, 2)`.
    pub q: T,
}

/// `S^{1/2}·(R^{1−β/2}·T·log(n/log(ep))^{−1+β/2})^{1−q/2}`, without constants.
/// Diagnostic only; never used for tuning.
pub fn theoretical_rate<T: Real>(params: &RateParams<T>, n: usize, p: usize) -> Result<T> {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    if !(params.q >= T::zero() && params.q < two && params.beta >= T::zero() && params.beta < two) {
        return Err(Error::InvalidArgument("need 0 ≤ q < 2 and 0 ≤ β < 2".into()));
    }
    let log_ep = (lit::<T>(std::f64::consts::E) * T::from_usize(p).unwrap()).ln();
    let ratio = T::from_usize(n).unwrap() / log_ep;
    if !(ratio > T::one()) {
        return Err(Error::InvalidArgument("need n / log(ep) > 1".into()));
    }
    let b = params.beta * half;
    let inner = params.r_bound.powf(T::one() - b) * params.t_noise * ratio.ln().powf(b - T::one());
    Ok(params.sparsity.sqrt() * inner.powf(T::one() - params.q * half))
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Characteristic generator `Φ = exp(−η)` of an elliptical law, given as the
/// triple `(η, η′, η⁻¹)`.
#[derive(Clone)]
pub struct EllipticalGenerator<T> {
    pub eta: ScalarFn<T>,
    pub eta_prime: ScalarFn<T>,
    pub eta_inv: ScalarFn<T>,
}

impl<T> fmt::Debug for EllipticalGenerator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EllipticalGenerator { .. }")
    }
}

impl<T: Real> EllipticalGenerator<T> {
    pub fn new(
        eta: impl Fn(T) -> T + Send + Sync + 'static,
        eta_prime: impl Fn(T) -> T + Send + Sync + 'static,
        eta_inv: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { eta: Arc::new(eta), eta_prime: Arc::new(eta_prime), eta_inv: Arc::new(eta_inv) }
    }

    /// `η(x) = x/2`: the Gaussian case.
    pub fn gaussian() -> Self {
        let half = lit::<T>(0.5);
        Self::new(move |x| x * half, move |_| half, gaussian_inverse)
    }

    /// `η(x) = x^{α/2}`: multivariate α-stable laws, `α ∈ (0, 2]`.
    pub fn stable(alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= lit(2.0)) {
            return Err(Error::InvalidArgument("stable generator needs α ∈ (0, 2]".into()));
        }
        let e = alpha / lit(2.0);
        Ok(Self::new(
            move |x| x.powf(e),
            move |x| e * x.powf(e - T::one()),
            move |y| y.powf(T::one() / e),
        ))
    }

    /// Checks strict monotonicity of `η` and `η⁻¹∘η = id` (relative `1e-9`) on `grid`.
    pub fn validate(&self, grid: &[T]) -> Result<()> {
        let tol = lit::<T>(1e-9).max(T::epsilon() * lit(64.0));
        for w in grid.windows(2) {
            if !((self.eta)(w[1]) > (self.eta)(w[0])) {
                return Err(Error::InvalidArgument(format!(
                    "η is not strictly increasing between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        for &x in grid {
            let back = (self.eta_inv)((self.eta)(x));
            if (back - x).abs() > tol * x.abs().max(T::one()) {
                return Err(Error::InvalidArgument(format!("η⁻¹(η({x})) = {back}")));
            }
        }
        Ok(())
    }
}

/// Elliptical spectral estimate `Σ̂^Φ`. Negative `−log|φₙ|` values, which only
/// arise from rounding when `|φₙ| > 1`, are clamped to zero before `η⁻¹`.
pub fn elliptical_spectral_estimate<T: Real>(
    y: &SampleMatrix<T>,
    radius: T,
    generator: &EllipticalGenerator<T>,
) -> Result<CovEstimate<T>> {
    check_radius(radius)?;
    let logs = probe_log_moduli(y, radius, &CfOptions::default());
    elliptical_from_log_moduli(logs.view(), radius, generator)
}

pub fn elliptical_from_log_moduli<T: Real>(
    log_moduli: ArrayView2<T>,
    radius: T,
    generator: &EllipticalGenerator<T>,
) -> Result<CovEstimate<T>> {
    check_radius(radius)?;
    let inv = &generator.eta_inv;
    let m = assemble(log_moduli, radius, |y| inv(y.max(T::zero())))?;
    Ok(CovEstimate::new(
        m,
        EstimatorKind::Elliptical,
        Tuning { u: radius.to_f64(), ..Tuning::default() },
    ))
}
