//! Simulation scenarios: covariance models, noise laws with closed-form
//! characteristic functions, and seeded samplers for `Y = X + ε`.

use ndarray::{Array1, Array2, ArrayView2, Zip};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::charfreq::{CfValue, Frequency, SampleMatrix};
use crate::linalg::{psd_sqrt, sym_eigen};
use crate::spectral::CovEstimate;
use crate::{Error, Real, Result};

const CLAMP: f64 = 1e-10;

mod rows {
    use ndarray::Array2;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_matrix(v: Vec<Vec<f64>>) -> Result<Array2<f64>, String> {
        let r = v.len();
        let c = v.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || v.iter().any(|row| row.len() != c) {
            return Err("matrix must be a non-empty list of equal-length rows".into());
        }
        Array2::from_shape_vec((r, c), v.into_iter().flatten().collect()).map_err(|e| e.to_string())
    }

    pub fn from_matrix(m: &Array2<f64>) -> Vec<Vec<f64>> {
        m.rows().into_iter().map(|r| r.to_vec()).collect()
    }

    pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
        from_matrix(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<f64>, D::Error> {
        to_matrix(Vec::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(m: &Option<Array2<f64>>, s: S) -> Result<S::Ok, S::Error> {
            m.as_ref().map(from_matrix).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Array2<f64>>, D::Error> {
            Option::<Vec<Vec<f64>>>::deserialize(d)?
                .map(to_matrix)
                .transpose()
                .map_err(D::Error::custom)
        }
    }
}

fn default_offdiag() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovModel {
    /// Unit diagonal, `offdiag` on the first off-diagonals.
    Tridiagonal {
        p: usize,
        #[serde(default = "default_offdiag")]
        offdiag: f64,
    },
    /// Random signed blocks shifted to a target condition number (default `p`).
    BlockDiagonal {
        p: usize,
        block_sizes: Vec<usize>,
        #[serde(default)]
        condition_target: Option<f64>,
        #[serde(default)]
        seed: u64,
    },
    Explicit {
        #[serde(with = "rows")]
        matrix: Array2<f64>,
    },
}

impl CovModel {
    pub fn dim(&self) -> usize {
        match self {
            CovModel::Tridiagonal { p, .. } | CovModel::BlockDiagonal { p, .. } => *p,
            CovModel::Explicit { matrix } => matrix.nrows(),
        }
    }

    pub fn matrix(&self) -> Result<Array2<f64>> {
        match self {
            CovModel::Tridiagonal { p, offdiag } => {
                if *p == 0 {
                    return Err(Error::Model("dimension must be positive".into()));
                }
                Ok(tridiagonal_with(*p, *offdiag))
            }
            CovModel::BlockDiagonal { p, block_sizes, condition_target, seed } => {
                make_block_diagonal_with(*p, block_sizes, condition_target.unwrap_or(*p as f64), *seed)
            }
            CovModel::Explicit { matrix } => {
                let p = matrix.nrows();
                if p == 0 || matrix.ncols() != p {
                    return Err(Error::Model("explicit covariance must be square".into()));
                }
                if matrix.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Model("explicit covariance has non-finite entries".into()));
                }
                for i in 0..p {
                    for j in 0..i {
                        if matrix[[i, j]] != matrix[[j, i]] {
                            return Err(Error::Model(format!("explicit covariance not symmetric at ({i},{j})")));
                        }
                    }
                }
                let lo = sym_eigen(matrix.view()).min_value();
                if lo < -CLAMP {
                    return Err(Error::Model(format!("explicit covariance has eigenvalue {lo}")));
                }
                Ok(matrix.clone())
            }
        }
    }
}

pub fn make_tridiagonal(p: usize) -> Array2<f64> {
    tridiagonal_with(p, default_offdiag())
}

pub fn tridiagonal_with(p: usize, offdiag: f64) -> Array2<f64> {
    Array2::from_shape_fn((p, p), |(i, j)| {
        if i == j {
            1.0
        } else if i.abs_diff(j) == 1 {
            offdiag
        } else {
            0.0
        }
    })
}

pub fn make_block_diagonal(p: usize, block_sizes: &[usize], seed: u64) -> Result<Array2<f64>> {
    make_block_diagonal_with(p, block_sizes, p as f64, seed)
}

/// Blocks with entries `±U(0.1, 1)`, then `Σ + cI` with `c` chosen so that
/// `(λ_max + c)/(λ_min + c) = cond`, rescaled to unit mean diagonal.
pub fn make_block_diagonal_with(p: usize, block_sizes: &[usize], cond: f64, seed: u64) -> Result<Array2<f64>> {
    if p == 0 || block_sizes.iter().sum::<usize>() != p || block_sizes.contains(&0) {
        return Err(Error::Model(format!("block sizes {block_sizes:?} do not partition {p}")));
    }
    if !(cond >= 1.0) {
        return Err(Error::Model(format!("condition target {cond} below 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Array2::<f64>::zeros((p, p));
    let mut start = 0;
    for &b in block_sizes {
        for i in start..start + b {
            for j in i..start + b {
                let mag = rng.random_range(0.1..1.0);
                let v = if rng.random::<bool>() { mag } else { -mag };
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        start += b;
    }
    if p > 1 || cond > 1.0 {
        let eig = sym_eigen(m.view());
        let (lo, hi) = (eig.min_value(), eig.max_value());
        if cond == 1.0 || !(hi - lo > 1e-12 * hi.abs().max(1.0)) {
            return Err(Error::Model("block spectrum cannot reach the condition target".into()));
        }
        let shift = (hi - cond * lo) / (cond - 1.0);
        for i in 0..p {
            m[[i, i]] += shift;
        }
    }
    let scale = m.diag().sum() / p as f64;
    if !(scale > 0.0) {
        return Err(Error::Model("shifted block matrix has non-positive trace".into()));
    }
    m.mapv_inplace(|x| x / scale);
    Ok(m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableNorm {
    /// Independent coordinates, `ψ(u) = exp(−σ Σᵢ|uᵢ|^β)`.
    #[default]
    Independent,
    /// Rotation invariant, `ψ(u) = exp(−σ|u|₂^β)`.
    Isotropic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// `√W·A·Z` with `W ~ Gamma(ϑ, 1)`; `A` defaults to the identity.
    GammaElliptical {
        #[serde(default, with = "rows::opt", skip_serializing_if = "Option::is_none")]
        a: Option<Array2<f64>>,
        theta: f64,
    },
    /// `ρ·N(0, I)`.
    Gaussian { rho: f64 },
    Stable {
        beta: f64,
        sigma: f64,
        #[serde(default)]
        norm: StableNorm,
    },
}

/// Membership `|log|ψ(u)|| ≤ T(1 + |u|^β)`. `l2_decay` marks the subclass
/// where the bound holds with the Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassTag {
    pub beta: f64,
    pub t: f64,
    pub l2_decay: bool,
}

impl NoiseModel {
    pub fn validate(&self, p: usize) -> Result<()> {
        match self {
            NoiseModel::None => Ok(()),
            NoiseModel::GammaElliptical { a, theta } => {
                if !(*theta > 0.0) {
                    return Err(Error::Model(format!("gamma shape must be positive, got {theta}")));
                }
                if let Some(a) = a {
                    if a.nrows() != p || a.ncols() != p {
                        return Err(Error::DimensionMismatch { expected: p, got: a.nrows().max(a.ncols()) });
                    }
                    if a.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Model("noise matrix has non-finite entries".into()));
                    }
                }
                Ok(())
            }
            NoiseModel::Gaussian { rho } => {
                if *rho >= 0.0 && rho.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Model(format!("noise level must be non-negative, got {rho}")))
                }
            }
            NoiseModel::Stable { beta, sigma, .. } => {
                if !(*beta > 0.0 && *beta < 2.0) {
                    return Err(Error::Model(format!("stable index must lie in (0, 2), got {beta}")));
                }
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::Model(format!("stable scale must be positive, got {sigma}")));
                }
                Ok(())
            }
        }
    }

    /// Smallest recorded class the characteristic function belongs to, or
    /// `None` for Gaussian noise (which has no heavier-than-Gaussian exponent).
    pub fn class_tag(&self) -> Option<ClassTag> {
        match self {
            NoiseModel::None => Some(ClassTag { beta: 1.0, t: 0.0, l2_decay: true }),
            // ϑ·log(1 + ‖A‖²|u|²/2) ≤ ϑ‖A‖|u|/√2 since log(1 + x) ≤ √x
            NoiseModel::GammaElliptical { a, theta } => {
                let norm = a.as_ref().map_or(1.0, |a| {
                    let aat = a.dot(&a.t());
                    sym_eigen(aat.view()).max_value().max(0.0).sqrt()
                });
                Some(ClassTag { beta: 1.0, t: theta * norm / std::f64::consts::SQRT_2, l2_decay: true })
            }
            NoiseModel::Gaussian { .. } => None,
            NoiseModel::Stable { beta, sigma, norm } => {
                Some(ClassTag { beta: *beta, t: *sigma, l2_decay: *norm == StableNorm::Isotropic })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub cov: CovModel,
    pub noise: NoiseModel,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Model("sample size must be positive".into()));
        }
        self.noise.validate(self.cov.dim())
    }
}

/// Symmetric standard `β`-stable draw (Chambers–Mallows–Stuck), `E e^{itX} = e^{−|t|^β}`.
fn symmetric_stable(rng: &mut impl Rng, beta: f64) -> f64 {
    let v = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    (beta * v).sin() / v.cos().powf(1.0 / beta) * (((1.0 - beta) * v).cos() / w).powf((1.0 - beta) / beta)
}

/// Positive `a`-stable draw (Kanter), `E e^{−sA} = e^{−s^a}`, `0 < a < 1`.
fn positive_stable(rng: &mut impl Rng, a: f64) -> f64 {
    let theta = std::f64::consts::PI * rng.random::<f64>();
    let e: f64 = Exp1.sample(rng);
    (a * theta).sin() / theta.sin().powf(1.0 / a) * (((1.0 - a) * theta).sin() / e).powf((1.0 - a) / a)
}

fn normals(rng: &mut impl Rng, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, p), || rng.sample(StandardNormal))
}

/// Draws `n` noise vectors.
pub fn sample_noise(noise: &NoiseModel, n: usize, p: usize, rng: &mut impl Rng) -> Result<Array2<f64>> {
    noise.validate(p)?;
    Ok(match noise {
        NoiseModel::None => Array2::zeros((n, p)),
        NoiseModel::GammaElliptical { a, theta } => {
            let gamma = Gamma::new(*theta, 1.0).map_err(|e| Error::Model(e.to_string()))?;
            let mut z = normals(rng, n, p);
            if let Some(a) = a {
                z = z.dot(&a.t());
            }
            for mut row in z.rows_mut() {
                let w: f64 = gamma.sample(rng);
                row.mapv_inplace(|x| x * w.sqrt());
            }
            z
        }
        NoiseModel::Gaussian { rho } => normals(rng, n, p) * *rho,
        NoiseModel::Stable { beta, sigma, norm } => {
            let scale = sigma.powf(1.0 / beta);
            match norm {
                StableNorm::Independent => {
                    Array2::from_shape_simple_fn((n, p), || scale * symmetric_stable(rng, *beta))
                }
                StableNorm::Isotropic => {
                    // √A·G with G ~ N(0, 2σ^{2/β} I) and A positive (β/2)-stable
                    let mut g = normals(rng, n, p);
                    for mut row in g.rows_mut() {
                        let mix = if *beta == 2.0 { 1.0 } else { positive_stable(rng, beta / 2.0) };
                        let f = (2.0 * mix).sqrt() * scale;
                        row.mapv_inplace(|x| x * f);
                    }
                    g
                }
            }
        }
    })
}

/// Observations `Y = Σ^{1/2}Z + ε` given a precomputed square root.
pub fn sample_with_root(root: ArrayView2<f64>, noise: &NoiseModel, n: usize, seed: u64) -> Result<SampleMatrix<f64>> {
    let p = root.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = normals(&mut rng, n, p).dot(&root);
    let eps = sample_noise(noise, n, p, &mut rng)?;
    SampleMatrix::new(x + eps)
}

/// Symmetric eigen square root; eigenvalues in `[−1e-10, 0]` are clamped.
pub fn covariance_root(sigma: ArrayView2<f64>) -> Result<Array2<f64>> {
    psd_sqrt(sigma, CLAMP).map_err(|lo| Error::Model(format!("covariance has eigenvalue {lo} below -1e-10")))
}

pub fn sample_scenario(s: &Scenario) -> Result<SampleMatrix<f64>> {
    s.validate()?;
    let sigma = s.cov.matrix()?;
    let root = covariance_root(sigma.view())?;
    sample_with_root(root.view(), &s.noise, s.n, s.seed)
}

/// Closed-form characteristic function of the noise.
pub fn noise_cf(model: &NoiseModel, u: &Frequency<f64>) -> CfValue<f64> {
    let v = u.view();
    let re = match model {
        NoiseModel::None => 1.0,
        NoiseModel::GammaElliptical { a, theta } => {
            let q = match a {
                Some(a) => {
                    let w: Array1<f64> = a.t().dot(&v);
                    w.dot(&w)
                }
                None => v.dot(&v),
            };
            (1.0 + q / 2.0).powf(-theta)
        }
        NoiseModel::Gaussian { rho } => (-rho * rho * v.dot(&v) / 2.0).exp(),
        NoiseModel::Stable { beta, sigma, norm } => {
            let s = match norm {
                StableNorm::Independent => v.iter().map(|x| x.abs().powf(*beta)).sum::<f64>(),
                StableNorm::Isotropic => v.dot(&v).sqrt().powf(*beta),
            };
            (-sigma * s).exp()
        }
    };
    CfValue::new(Complex::new(re, 0.0))
}

/// `‖Σ̂ − Σ‖_F`.
pub fn frobenius_error<T: Real>(est: &CovEstimate<T>, truth: ArrayView2<T>) -> Result<T> {
    if est.matrix.dim() != truth.dim() {
        return Err(Error::DimensionMismatch { expected: truth.nrows(), got: est.p() });
    }
    let mut acc = T::zero();
    Zip::from(&est.matrix).and(truth).for_each(|&a, &b| acc += (a - b) * (a - b));
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfreq::empirical_cf;
    use crate::linalg::condition_number;
    use crate::shrinkage::sample_covariance;
    use crate::spectral::{EstimatorKind, Tuning};
    use ndarray::array;

    #[test]
    fn tridiagonal_examples() {
        assert_eq!(make_tridiagonal(1), array![[1.0]]);
        assert_eq!(make_tridiagonal(3), array![[1.0, 0.4, 0.0], [0.4, 1.0, 0.4], [0.0, 0.4, 1.0]]);
        let t = make_tridiagonal(20);
        let eig = sym_eigen(t.view());
        assert!(eig.min_value() > 0.2 && eig.max_value() < 1.8);
        assert_eq!(t.iter().filter(|x| **x != 0.0).count(), 3 * 20 - 2);
        assert_eq!(t.iter().fold(0.0f64, |m, x| m.max(x.abs())), 1.0);
    }

    #[test]
    fn block_diagonal_condition_and_shape() {
        assert_eq!(make_block_diagonal(1, &[1], 3).unwrap(), array![[1.0]]);
        let m = make_block_diagonal(20, &[5, 5, 10], 9).unwrap();
        assert!((condition_number(m.view()) / 20.0 - 1.0).abs() < 0.01);
        assert!(sym_eigen(m.view()).min_value() > 0.0);
        assert_eq!(m, m.t());
        assert_eq!(m[[0, 5]], 0.0);
        assert!((m.diag().sum() - 20.0).abs() < 1e-12);
        assert_eq!(m, make_block_diagonal(20, &[5, 5, 10], 9).unwrap());
        assert!(make_block_diagonal(4, &[1, 2], 0).is_err());
    }

    #[test]
    fn direct_gaussian_sample_covariance() {
        let s = Scenario { cov: CovModel::Tridiagonal { p: 3, offdiag: 0.0 }, noise: NoiseModel::None, n: 100_000, seed: 1 };
        let y = sample_scenario(&s).unwrap();
        let c = sample_covariance(&y);
        let eye = Array2::<f64>::eye(3);
        assert!((&c.matrix - &eye).iter().all(|x| x.abs() < 0.02));
    }

    fn cf_grid(p: usize) -> Vec<Frequency<f64>> {
        (1..=8)
            .map(|k| {
                let u: Vec<f64> = (0..p).map(|j| 0.25 * k as f64 * if j % 2 == 0 { 1.0 } else { -0.5 }).collect();
                Frequency::from_slice(&u).unwrap()
            })
            .collect()
    }

    fn assert_cf_matches(noise: NoiseModel, p: usize, n: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let eps = SampleMatrix::new(sample_noise(&noise, n, p, &mut rng).unwrap()).unwrap();
        for u in cf_grid(p) {
            let emp = empirical_cf(&eps, &u).unwrap().value;
            let exact = noise_cf(&noise, &u).value;
            assert!((emp - exact).norm() < 3.0 / (n as f64).sqrt(), "{noise:?} at {:?}", u.view());
        }
    }

    #[test]
    fn gamma_noise_cf_and_covariance() {
        let p = 2;
        assert_cf_matches(NoiseModel::GammaElliptical { a: None, theta: 1.5 }, p, 50_000);
        let a = array![[1.0, 0.3], [0.0, 0.5]];
        assert_cf_matches(NoiseModel::GammaElliptical { a: Some(a), theta: 0.7 }, p, 50_000);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = 2.0;
        let eps = sample_noise(&NoiseModel::GammaElliptical { a: None, theta }, 100_000, p, &mut rng).unwrap();
        let c = sample_covariance(&SampleMatrix::new(eps).unwrap()).matrix;
        for i in 0..p {
            assert!((c[[i, i]] / theta - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn cauchy_and_stable_cf() {
        assert_cf_matches(NoiseModel::Stable { beta: 1.0, sigma: 1.0, norm: StableNorm::Independent }, 1, 50_000);
        assert_cf_matches(NoiseModel::Stable { beta: 0.5, sigma: 0.3, norm: StableNorm::Independent }, 3, 50_000);
        assert_cf_matches(NoiseModel::Stable { beta: 1.5, sigma: 0.3, norm: StableNorm::Isotropic }, 3, 50_000);
        assert_cf_matches(NoiseModel::Gaussian { rho: 0.5 }, 2, 50_000);
    }

    #[test]
    fn generator_is_deterministic() {
        let s = Scenario {
            cov: CovModel::BlockDiagonal { p: 4, block_sizes: vec![2, 2], condition_target: None, seed: 2 },
            noise: NoiseModel::Stable { beta: 1.2, sigma: 0.4, norm: StableNorm::Isotropic },
            n: 30,
            seed: 5,
        };
        let a = sample_scenario(&s).unwrap().into_inner();
        let b = sample_scenario(&s).unwrap().into_inner();
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = sample_scenario(&Scenario { seed: 6, ..s }).unwrap().into_inner();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = |noise| Scenario { cov: CovModel::Tridiagonal { p: 2, offdiag: 0.4 }, noise, n: 5, seed: 0 };
        assert!(matches!(
            sample_scenario(&base(NoiseModel::GammaElliptical { a: Some(Array2::eye(3)), theta: 1.0 })),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(sample_scenario(&base(NoiseModel::GammaElliptical { a: None, theta: 0.0 })).is_err());
        assert!(sample_scenario(&base(NoiseModel::Gaussian { rho: -1.0 })).is_err());
        assert!(sample_scenario(&base(NoiseModel::Stable { beta: 2.0, sigma: 1.0, norm: StableNorm::Independent })).is_err());
        let bad = CovModel::Explicit { matrix: array![[1.0, 2.0], [2.0, 1.0]] };
        assert!(bad.matrix().is_err());
    }

    #[test]
    fn class_tags() {
        let g = NoiseModel::GammaElliptical { a: Some(array![[2.0, 0.0], [0.0, 1.0]]), theta: 1.0 };
        let tag = g.class_tag().unwrap();
        assert_eq!(tag.beta, 1.0);
        assert!((tag.t - 2.0 / std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(NoiseModel::Gaussian { rho: 1.0 }.class_tag().is_none());
        let s = NoiseModel::Stable { beta: 0.5, sigma: 0.2, norm: StableNorm::Independent }.class_tag().unwrap();
        assert!(!s.l2_decay && s.t == 0.2);
    }

    #[test]
    fn frobenius_error_examples() {
        let truth = make_tridiagonal(4);
        let est = |m| CovEstimate::new(m, EstimatorKind::Sample, Tuning::default());
        assert_eq!(frobenius_error(&est(truth.clone()), truth.view()).unwrap(), 0.0);
        let mut bumped = truth.clone();
        bumped[[0, 0]] += 1.0;
        assert_eq!(frobenius_error(&est(bumped), truth.view()).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = normals(&mut rng, 5, 5);
        let b = normals(&mut rng, 5, 5);
        let mut acc = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                acc += (a[[i, j]] - b[[i, j]]).powi(2);
            }
        }
        let got = frobenius_error(&est(a), b.view()).unwrap();
        assert!((got - acc.sqrt()).abs() < 1e-14);
        assert!(frobenius_error(&est(Array2::eye(2)), Array2::eye(3).view()).is_err());
    }

    #[test]
    fn scenario_round_trips_through_toml() {
        let s = Scenario {
            cov: CovModel::Explicit { matrix: array![[1.0, 0.1], [0.1, 2.0]] },
            noise: NoiseModel::GammaElliptical { a: Some(array![[1.0, 0.0], [0.5, 1.0]]), theta: 0.5 },
            n: 10,
            seed: 4,
        };
        let text = toml::to_string(&s).unwrap();
        let back: Scenario = toml::from_str(&text).unwrap();
        assert_eq!(back, s);
        let parsed: Scenario = toml::from_str(
            "n = 50\n[cov]\nkind = \"tridiagonal\"\np = 20\n[noise]\nkind = \"gamma_elliptical\"\ntheta = 1.0\n",
        )
        .unwrap();
        assert_eq!(parsed.cov, CovModel::Tridiagonal { p: 20, offdiag: 0.4 });
        assert_eq!(parsed.seed, 0);
    }
}
