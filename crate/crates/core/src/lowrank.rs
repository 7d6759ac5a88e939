//! Weighted nuclear-norm least squares over a frequency annulus.
//!
//! For `u` in the annulus `{U/4 ≤ |u| ≤ U/2}` the normalised log characteristic
//! function is (up to noise and stochastic error) linear in `Σ`:
//!
//! ```text
//! 2·log|φ(u)| / |u|² ≈ ⟨Θ(u), Σ⟩,   Θ(u) = −uuᵀ/|u|²
//! ```
//!
//! The estimator minimises the `w_U`-weighted squared residual plus `λ‖M‖₁`
//! (nuclear norm). The integral is replaced by a frozen Monte Carlo sum so the
//! solver works on a deterministic surrogate.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::charfreq::{CfValue, Frequency, SampleMatrix};
use crate::linalg::{frob_dot, sym_eigen};
use crate::spectral::{CovEstimate, EstimatorKind, Tuning};
use crate::{lit, Error, Real, Result};

const INNER: f64 = 0.25;
const OUTER: f64 = 0.5;

/// Radially symmetric weight on the unit annulus `{1/4 ≤ |v| ≤ 1/2}`:
/// the bump `exp(−1/((|v| − 1/4)(1/2 − |v|)))`, normalised to unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    p: usize,
    /// `ln ∫_{1/4}^{1/2} s^{p−1} bump(s) ds`
    log_radial_mass: f64,
    /// `ln |S^{p−1}|`
    log_sphere_area: f64,
    pub l1_mass: f64,
    pub kappa_lower: f64,
}

fn log_bump(s: f64) -> f64 {
    if s <= INNER || s >= OUTER {
        f64::NEG_INFINITY
    } else {
        -1.0 / ((s - INNER) * (OUTER - s))
    }
}

/// `ln Γ(k/2)` for a positive integer `k`.
fn ln_gamma_half(k: usize) -> f64 {
    let (mut x, mut acc) = if k % 2 == 0 { (1.0, 0.0) } else { (0.5, 0.5 * std::f64::consts::PI.ln()) };
    while x < k as f64 / 2.0 - 1e-9 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

impl WeightFunction {
    pub fn bump(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("weight dimension must be positive".into()));
        }
        // composite Simpson on the log-shifted integrand
        let steps = 20_000;
        let h = (OUTER - INNER) / steps as f64;
        let f = |s: f64| log_bump(s) + (p as f64 - 1.0) * s.ln();
        let peak = (0..=steps).map(|k| f(INNER + k as f64 * h)).fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        for k in 0..=steps {
            let coef = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += coef * (f(INNER + k as f64 * h) - peak).exp();
        }
        let log_radial_mass = peak + (acc * h / 3.0).ln();
        let log_sphere_area = std::f64::consts::LN_2 + 0.5 * p as f64 * std::f64::consts::PI.ln()
            - ln_gamma_half(p);
        Ok(Self {
            p,
            log_radial_mass,
            log_sphere_area,
            l1_mass: 1.0,
            // E[v₁⁴/|v|⁴] under the uniform law on the sphere is 3/(p(p+2))
            kappa_lower: 3.0 / (p * (p + 2)) as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn support(&self) -> (f64, f64) {
        (INNER, OUTER)
    }

    /// Weight value at any `v` with `|v| = r`.
    pub fn radial_profile(&self, r: f64) -> f64 {
        (log_bump(r) - self.log_radial_mass - self.log_sphere_area).exp()
    }

    /// `w_U(u) = U^{−p}·w(u/U)`.
    pub fn scaled_value(&self, u_norm: f64, radius: f64) -> f64 {
        (log_bump(u_norm / radius) - self.log_radial_mass - self.log_sphere_area - self.p as f64 * radius.ln())
            .exp()
    }

    /// Importance weight of a point sampled with radius fraction `s = |u|/U`
    /// drawn uniformly in `[1/4, 1/2]` and uniform direction.
    fn importance(&self, s: f64) -> f64 {
        (log_bump(s) + (self.p as f64 - 1.0) * s.ln() - self.log_radial_mass - (4.0f64).ln()).exp()
    }
}

/// Frozen Monte Carlo quadrature for `∫ f(u) w_U(u) du ≈ Σₖ weights[k]·f(points[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature<T> {
    /// `K × p` sample frequencies.
    pub points: Array2<T>,
    /// `K × p` unit directions `u/|u|`.
    pub directions: Array2<T>,
    pub norms: Array1<T>,
    pub weights: Array1<T>,
}

impl<T: Real> Quadrature<T> {
    /// Points with radius uniform in `[U/4, U/2]` and uniform direction.
    pub fn sample(w: &WeightFunction, radius: T, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("need at least one quadrature point".into()));
        }
        let u = radius.to_f64().unwrap();
        if !(u > 0.0) {
            return Err(Error::InvalidArgument("spectral radius must be positive".into()));
        }
        let p = w.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Array2::<T>::zeros((count, p));
        let mut directions = Array2::<T>::zeros((count, p));
        let mut norms = Array1::<T>::zeros(count);
        let mut weights = Array1::<T>::zeros(count);
        let mut g = vec![0.0f64; p];
        for k in 0..count {
            let len = loop {
                for x in g.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
                let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 1e-300 {
                    break len;
                }
            };
            let s = INNER + (OUTER - INNER) * rng.random::<f64>();
            let r = u * s;
            for (j, &x) in g.iter().enumerate() {
                directions[[k, j]] = lit(x / len);
                points[[k, j]] = lit(r * x / len);
            }
            norms[k] = lit(r);
            weights[k] = lit(w.importance(s) / count as f64);
        }
        Ok(Self { points, directions, norms, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn frequency(&self, k: usize) -> Frequency<T> {
        Frequency::new(self.points.row(k).to_owned()).expect("finite quadrature point")
    }

    /// Quadrature estimate of `‖A‖_U² = ∫ ⟨Θ(u), A⟩² w_U(u) du`.
    pub fn weighted_norm_sq(&self, a: ArrayView2<T>) -> T {
        (0..self.len())
            .map(|k| {
                let d = self.directions.row(k);
                let q = d.dot(&a.dot(&d));
                self.weights[k] * q * q
            })
            .sum()
    }
}

/// `Θ(u) = −uuᵀ/|u|²`.
pub fn design_matrix<T: Real>(u: &Frequency<T>) -> Result<Array2<T>> {
    let n2 = u.norm().powi(2);
    if !(n2 > T::zero()) {
        return Err(Error::InvalidArgument("design matrix needs a non-zero frequency".into()));
    }
    let v = u.view();
    let p = u.dim();
    Ok(Array2::from_shape_fn((p, p), |(i, j)| -v[i] * v[j] / n2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowRankConfig<T> {
    pub spectral_radius: T,
    pub lambda_nuc: T,
    /// Truncation level: frequencies with `|φₙ(u)| < ι` contribute a zero response.
    pub iota: T,
    pub mc_samples: usize,
    pub max_iter: usize,
    /// Relative objective decrease below which iteration stops.
    pub tol: T,
    pub psd_constrained: bool,
}

impl<T: Real> LowRankConfig<T> {
    /// Defaults with `ι = 1/(2√n)`.
    pub fn new(spectral_radius: T, lambda_nuc: T, n: usize) -> Self {
        Self {
            spectral_radius,
            lambda_nuc,
            iota: T::one() / (lit::<T>(2.0) * T::from_usize(n.max(1)).unwrap().sqrt()),
            mc_samples: 4096,
            max_iter: 20_000,
            tol: lit::<T>(1e-12).max(T::epsilon() * lit(10.0)),
            psd_constrained: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.spectral_radius > T::zero()
            && self.lambda_nuc >= T::zero()
            && self.iota > T::zero()
            && self.mc_samples >= 1
            && self.max_iter >= 1
            && self.tol > T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid low-rank config {self:?}")))
        }
    }
}

fn feature_count(p: usize) -> usize {
    p * (p + 1) / 2
}

/// Maps a symmetric matrix to `(M₀₀, M₀₁, …, M₀,ₚ₋₁, M₁₁, …)`.
fn to_features<T: Real>(m: ArrayView2<T>) -> Array1<T> {
    let p = m.nrows();
    let mut out = Array1::zeros(feature_count(p));
    let mut k = 0;
    for i in 0..p {
        for j in i..p {
            out[k] = m[[i, j]];
            k += 1;
        }
    }
    out
}

fn from_features<T: Real>(v: &Array1<T>, p: usize) -> Array2<T> {
    let mut out = Array2::zeros((p, p));
    let mut k = 0;
    for i in 0..p {
        for j in i..p {
            out[[i, j]] = v[k];
            out[[j, i]] = v[k];
            k += 1;
        }
    }
    out
}

/// The frozen least-squares surrogate `F(M) = Σₖ cₖ(yₖ − ⟨Θₖ, M⟩)²`, stored
/// as the quadratic `c₀ + 2bᵀm + mᵀHm` in upper-triangular coordinates.
#[derive(Debug, Clone)]
pub struct LowRankProblem<T> {
    p: usize,
    responses: Array1<T>,
    weights: Array1<T>,
    directions: Array2<T>,
    hessian: Array2<T>,
    linear: Array1<T>,
    constant: T,
    /// Fraction of quadrature points whose truncation indicator is active.
    pub active_fraction: f64,
}

impl<T: Real> LowRankProblem<T> {
    /// Builds the surrogate from characteristic-function values at the
    /// quadrature points. `cf` is the hook for exact characteristic functions.
    pub fn from_cf(quad: &Quadrature<T>, iota: T, cf: impl Fn(&Frequency<T>) -> CfValue<T> + Sync) -> Self {
        let values: Vec<CfValue<T>> = (0..quad.len()).into_par_iter().map(|k| cf(&quad.frequency(k))).collect();
        Self::from_values(quad, iota, &values)
    }

    pub fn from_sample(y: &SampleMatrix<T>, quad: &Quadrature<T>, iota: T) -> Result<Self> {
        if y.p() != quad.dim() {
            return Err(Error::DimensionMismatch { expected: y.p(), got: quad.dim() });
        }
        let data = y.data();
        let n = T::from_usize(y.n()).unwrap();
        let values: Vec<CfValue<T>> = (0..quad.len())
            .into_par_iter()
            .map(|k| {
                let u = quad.points.row(k);
                let (mut re, mut im) = (T::zero(), T::zero());
                for row in data.rows() {
                    let (s, c) = row.dot(&u).sin_cos();
                    re += c;
                    im += s;
                }
                CfValue::new(Complex::new(re / n, im / n))
            })
            .collect();
        Ok(Self::from_values(quad, iota, &values))
    }

    fn from_values(quad: &Quadrature<T>, iota: T, values: &[CfValue<T>]) -> Self {
        let p = quad.dim();
        let nf = feature_count(p);
        let two = lit::<T>(2.0);
        let mut responses = Array1::zeros(quad.len());
        let mut active = 0usize;
        for (k, v) in values.iter().enumerate() {
            if v.modulus >= iota && v.modulus > T::zero() {
                active += 1;
                responses[k] = two * v.modulus.ln() / (quad.norms[k] * quad.norms[k]);
            }
        }
        let mut hessian = Array2::<T>::zeros((nf, nf));
        let mut linear = Array1::<T>::zeros(nf);
        let mut constant = T::zero();
        let mut phi = Array1::<T>::zeros(nf);
        for k in 0..quad.len() {
            let d = quad.directions.row(k);
            let mut idx = 0;
            for i in 0..p {
                for j in i..p {
                    phi[idx] = if i == j { d[i] * d[i] } else { two * d[i] * d[j] };
                    idx += 1;
                }
            }
            let c = quad.weights[k];
            let yk = responses[k];
            constant += c * yk * yk;
            for a in 0..nf {
                let ca = c * phi[a];
                linear[a] += ca * yk;
                for b in a..nf {
                    hessian[[a, b]] += ca * phi[b];
                }
            }
        }
        for a in 0..nf {
            for b in 0..a {
                hessian[[a, b]] = hessian[[b, a]];
            }
        }
        Self {
            p,
            responses,
            weights: quad.weights.clone(),
            directions: quad.directions.clone(),
            hessian,
            linear,
            constant,
            active_fraction: active as f64 / quad.len().max(1) as f64,
        }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Data-fit term evaluated point by point.
    pub fn data_fit(&self, m: ArrayView2<T>) -> T {
        (0..self.weights.len())
            .map(|k| {
                let d = self.directions.row(k);
                let r = self.responses[k] + d.dot(&m.dot(&d));
                self.weights[k] * r * r
            })
            .sum()
    }

    fn smooth(&self, m: &Array1<T>) -> T {
        self.constant + lit::<T>(2.0) * self.linear.dot(m) + m.dot(&self.hessian.dot(m))
    }

    /// Frobenius gradient of `F` as a symmetric matrix.
    fn gradient(&self, m: &Array1<T>) -> Array2<T> {
        let two = lit::<T>(2.0);
        let g = (&self.linear + &self.hessian.dot(m)) * two;
        let mut out = from_features(&g, self.p);
        for i in 0..self.p {
            for j in 0..self.p {
                if i != j {
                    out[[i, j]] = out[[i, j]] / two;
                }
            }
        }
        out
    }

    /// Lipschitz constant of the gradient by power iteration.
    fn lipschitz(&self) -> T {
        let p = self.p;
        let mut x = Array2::<T>::from_shape_fn((p, p), |(i, j)| if i == j { T::one() } else { lit(0.1) });
        let mut est = T::zero();
        for _ in 0..100 {
            let g0 = self.gradient(&Array1::zeros(feature_count(p)));
            let gx = self.gradient(&to_features(x.view())) - g0;
            let norm = gx.iter().map(|v| *v * *v).sum::<T>().sqrt();
            let xn = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
            if norm == T::zero() || xn == T::zero() {
                break;
            }
            est = norm / xn;
            x = gx / norm;
        }
        est.max(T::epsilon())
    }
}

/// Nuclear-norm prox of a symmetric matrix: eigenvalues soft-thresholded by
/// `t`, and additionally clipped at zero when `psd`.
pub fn nuclear_prox<T: Real>(m: ArrayView2<T>, t: T, psd: bool) -> Array2<T> {
    let eig = sym_eigen(m);
    if psd {
        eig.reconstruct_with(|d| (d - t).max(T::zero()))
    } else {
        eig.reconstruct_with(|d| crate::linalg::soft(d, t))
    }
}

fn nuclear<T: Real>(m: ArrayView2<T>) -> T {
    sym_eigen(m).values.iter().map(|d| d.abs()).sum()
}

/// `F(M) + λ‖M‖₁` with data from `y` at the frozen quadrature points.
pub fn lowrank_objective<T: Real>(
    m: ArrayView2<T>,
    y: &SampleMatrix<T>,
    cfg: &LowRankConfig<T>,
    quad: &Quadrature<T>,
) -> Result<T> {
    let problem = LowRankProblem::from_sample(y, quad, cfg.iota)?;
    Ok(problem.data_fit(m) + cfg.lambda_nuc * nuclear(m))
}

#[derive(Debug, Clone)]
pub struct LowRankSolution<T> {
    pub matrix: Array2<T>,
    pub iterations: usize,
    pub objective_trace: Vec<T>,
}

/// Proximal gradient with backtracking on a frozen surrogate.
pub fn lowrank_solve<T: Real>(problem: &LowRankProblem<T>, cfg: &LowRankConfig<T>) -> Result<LowRankSolution<T>> {
    cfg.validate()?;
    let p = problem.dim();
    let lambda = cfg.lambda_nuc;
    let half = lit::<T>(0.5);
    let mut step = T::one() / problem.lipschitz();
    let mut x = Array2::<T>::zeros((p, p));
    let mut xf = to_features(x.view());
    let mut f_x = problem.smooth(&xf);
    let mut obj = f_x + lambda * nuclear(x.view());
    let mut trace = vec![obj];

    for it in 1..=cfg.max_iter {
        let grad = problem.gradient(&xf);
        let (next, next_f, next_obj) = loop {
            let cand = nuclear_prox((&x - &(&grad * step)).view(), step * lambda, cfg.psd_constrained);
            let cf = to_features(cand.view());
            let fc = problem.smooth(&cf);
            let diff = &cand - &x;
            let model = f_x + frob_dot(grad.view(), diff.view()) + half / step * frob_dot(diff.view(), diff.view());
            if fc <= model || step < T::epsilon() {
                let oc = fc + lambda * nuclear(cand.view());
                break (cand, fc, oc);
            }
            step = step * half;
        };
        let decrease = obj - next_obj;
        x = next;
        xf = to_features(x.view());
        f_x = next_f;
        let prev = obj;
        obj = next_obj.min(prev);
        trace.push(obj);
        if decrease <= cfg.tol * prev.abs().max(T::min_positive_value()) {
            return Ok(LowRankSolution { matrix: x, iterations: it, objective_trace: trace });
        }
    }
    Err(Error::LowRankNotConverged {
        iterations: cfg.max_iter,
        objective_trace: trace.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
    })
}

/// Low-rank estimate from a sample, with quadrature points drawn from `seed`.
pub fn lowrank_estimate<T: Real>(
    y: &SampleMatrix<T>,
    cfg: &LowRankConfig<T>,
    w: &WeightFunction,
    seed: u64,
) -> Result<CovEstimate<T>> {
    cfg.validate()?;
    if w.dim() != y.p() {
        return Err(Error::DimensionMismatch { expected: y.p(), got: w.dim() });
    }
    let quad = Quadrature::sample(w, cfg.spectral_radius, cfg.mc_samples, seed)?;
    let problem = LowRankProblem::from_sample(y, &quad, cfg.iota)?;
    let sol = lowrank_solve(&problem, cfg)?;
    Ok(CovEstimate::new(
        sol.matrix,
        EstimatorKind::Lowrank,
        Tuning { u: cfg.spectral_radius.to_f64(), tau: None, lambda: cfg.lambda_nuc.to_f64() },
    ))
}

/// Heuristic nuclear penalty level with unit constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBound<T> {
    pub lambda: T,
    /// Whether `exp(‖Σ‖U²/8 + 2TU^β) ≤ √n` holds.
    pub hypothesis_holds: bool,
}

/// `C₁γ²·exp(‖Σ‖U²/4 + 4TU^β)/(U²√n) + C₂·T·U^{β−2}` with `C₁ = C₂ = 1`.
pub fn lambda_threshold<T: Real>(
    radius: T,
    sigma_norm: T,
    t_noise: T,
    beta: T,
    gamma: T,
    n: usize,
) -> LambdaBound<T> {
    let u = radius;
    let sqrt_n = T::from_usize(n).unwrap().sqrt();
    let ub = u.powf(beta);
    let lambda = gamma * gamma * (sigma_norm * u * u / lit(4.0) + lit::<T>(4.0) * t_noise * ub).exp()
        / (u * u * sqrt_n)
        + t_noise * u.powf(beta - lit(2.0));
    let hypothesis_holds = (sigma_norm * u * u / lit(8.0) + lit::<T>(2.0) * t_noise * ub).exp() <= sqrt_n;
    LambdaBound { lambda, hypothesis_holds }
}
