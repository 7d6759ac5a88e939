//! Empirical characteristic functions and the probe frequencies of the
//! spectral estimator.
//!
//! Indices are zero-based throughout: `direction_vector(0, 0, p)` is the
//! first standard basis vector.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use num_complex::Complex;
use rayon::prelude::*;

use crate::{lit, Error, Real, Result};

/// `n` observations of a `p`-vector, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix<T> {
    data: Array2<T>,
}

impl<T: Real> SampleMatrix<T> {
    pub fn new(data: Array2<T>) -> Result<Self> {
        let (n, p) = data.dim();
        if n == 0 || p == 0 {
            return Err(Error::InvalidArgument(format!(
                "sample matrix must be non-empty, got {n}×{p}"
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at row {}, column {}",
                pos / p,
                pos % p
            )));
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let p = rows.first().map(Vec::len).unwrap_or(0);
        let mut flat = Vec::with_capacity(rows.len() * p);
        for r in rows {
            if r.len() != p {
                return Err(Error::DimensionMismatch { expected: p, got: r.len() });
            }
            flat.extend_from_slice(r);
        }
        let data = Array2::from_shape_vec((rows.len(), p), flat)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::new(data)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> ArrayView2<'_, T> {
        self.data.view()
    }

    pub fn into_inner(self) -> Array2<T> {
        self.data
    }

    /// Sub-sample made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        Self::new(self.data.select(Axis(0), rows))
    }
}

/// A probe frequency `u ∈ ℝᵖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency<T>(Array1<T>);

impl<T: Real> Frequency<T> {
    pub fn new(u: Array1<T>) -> Result<Self> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("frequency has non-finite entries".into()));
        }
        Ok(Self(u))
    }

    pub fn from_slice(u: &[T]) -> Result<Self> {
        Self::new(Array1::from(u.to_vec()))
    }

    pub fn zeros(p: usize) -> Self {
        Self(Array1::zeros(p))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn view(&self) -> ArrayView1<'_, T> {
        self.0.view()
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.mapv(|x| x * s))
    }

    pub fn neg(&self) -> Self {
        Self(self.0.mapv(|x| -x))
    }
}

/// A characteristic function value with its cached modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue<T> {
    pub value: Complex<T>,
    pub modulus: T,
}

impl<T: Real> CfValue<T> {
    pub fn new(value: Complex<T>) -> Self {
        Self { value, modulus: value.norm() }
    }

    /// `log|value|`, with the convention that a (numerically) vanishing value has log 0.
    pub fn log_modulus(&self, zero_tol: T) -> T {
        if self.modulus <= zero_tol {
            T::zero()
        } else {
            self.modulus.ln()
        }
    }
}

/// Evaluation options for characteristic-function logs.
#[derive(Debug, Clone, Copy)]
pub struct CfOptions<T> {
    /// Moduli at or below this value are treated as exact zeros (log := 0).
    pub zero_tol: T,
}

impl<T: Real> Default for CfOptions<T> {
    fn default() -> Self {
        Self { zero_tol: lit(1e-300) }
    }
}

/// `(1/n) Σⱼ exp(i⟨u, Yⱼ⟩)`, accumulated in row order.
pub fn empirical_cf<T: Real>(y: &SampleMatrix<T>, u: &Frequency<T>) -> Result<CfValue<T>> {
    if u.dim() != y.p() {
        return Err(Error::DimensionMismatch { expected: y.p(), got: u.dim() });
    }
    let mut re = T::zero();
    let mut im = T::zero();
    for row in y.data.rows() {
        let t = row.dot(&u.0);
        let (s, c) = t.sin_cos();
        re += c;
        im += s;
    }
    let n = T::from_usize(y.n()).unwrap();
    Ok(CfValue::new(Complex::new(re / n, im / n)))
}

/// `log|φₙ(u)|` with the default zero convention.
pub fn log_modulus_cf<T: Real>(y: &SampleMatrix<T>, u: &Frequency<T>) -> Result<T> {
    log_modulus_cf_with(y, u, &CfOptions::default())
}

pub fn log_modulus_cf_with<T: Real>(
    y: &SampleMatrix<T>,
    u: &Frequency<T>,
    opts: &CfOptions<T>,
) -> Result<T> {
    Ok(empirical_cf(y, u)?.log_modulus(opts.zero_tol))
}

/// Probe direction `u^{(i,j)}`: `e_i` on the diagonal, `(e_i + e_j)/√2` otherwise.
pub fn direction_vector<T: Real>(i: usize, j: usize, p: usize) -> Result<Frequency<T>> {
    if i >= p || j >= p {
        return Err(Error::IndexOutOfRange { i, j, p });
    }
    let mut u = Array1::<T>::zeros(p);
    if i == j {
        u[i] = T::one();
    } else {
        let h = T::one() / lit::<T>(2.0).sqrt();
        u[i] = h;
        u[j] = h;
    }
    Ok(Frequency(u))
}

/// Upper-triangular probe index pairs `(i, j)`, `i ≤ j`, in row-major order.
pub fn probe_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect()
}

/// Symmetric matrix `L[i, j] = log|φₙ(U·u^{(i,j)})|` over all probe pairs.
///
/// Uses `⟨U·u^{(i,j)}, y⟩ = U(yᵢ + yⱼ)/√2`, so each probe is a single pass over
/// two columns. Probes are evaluated in parallel; each one accumulates in row
/// order, so the result does not depend on scheduling.
pub fn probe_log_moduli<T: Real>(
    y: &SampleMatrix<T>,
    radius: T,
    opts: &CfOptions<T>,
) -> Array2<T> {
    let p = y.p();
    let n = T::from_usize(y.n()).unwrap();
    let cols: Vec<Vec<T>> = (0..p).map(|k| y.data.column(k).to_vec()).collect();
    let off_scale = radius / lit::<T>(2.0).sqrt();
    let pairs = probe_pairs(p);
    let logs: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut re = T::zero();
            let mut im = T::zero();
            if i == j {
                for &a in &cols[i] {
                    let (s, c) = (radius * a).sin_cos();
                    re += c;
                    im += s;
                }
            } else {
                for (&a, &b) in cols[i].iter().zip(&cols[j]) {
                    let (s, c) = (off_scale * (a + b)).sin_cos();
                    re += c;
                    im += s;
                }
            }
            CfValue::new(Complex::new(re / n, im / n)).log_modulus(opts.zero_tol)
        })
        .collect();
    fill_symmetric(p, &pairs, &logs)
}

/// Same layout as [`probe_log_moduli`], with `log|φ|` supplied by a closure.
/// This is the hook for substituting an exact characteristic function.
pub fn probe_log_moduli_from<T: Real>(
    p: usize,
    radius: T,
    log_modulus: impl Fn(&Frequency<T>) -> T,
) -> Array2<T> {
    let pairs = probe_pairs(p);
    let logs: Vec<T> = pairs
        .iter()
        .map(|&(i, j)| {
            let u = direction_vector::<T>(i, j, p).expect("pair in range").scaled(radius);
            log_modulus(&u)
        })
        .collect();
    fill_symmetric(p, &pairs, &logs)
}

fn fill_symmetric<T: Real>(p: usize, pairs: &[(usize, usize)], vals: &[T]) -> Array2<T> {
    let mut out = Array2::<T>::zeros((p, p));
    for (&(i, j), &v) in pairs.iter().zip(vals) {
        out[[i, j]] = v;
        out[[j, i]] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn two_points() -> SampleMatrix<f64> {
        SampleMatrix::new(array![[1.0, 0.0], [-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn single_observation_has_unit_modulus() {
        let y = SampleMatrix::new(array![[0.3, -1.2, 2.0]]).unwrap();
        let u = Frequency::from_slice(&[0.7, 0.1, -0.4]).unwrap();
        let cf = empirical_cf(&y, &u).unwrap();
        let t: f64 = 0.3 * 0.7 - 1.2 * 0.1 - 2.0 * 0.4;
        assert!((cf.value.re - t.cos()).abs() < 1e-15);
        assert!((cf.value.im - t.sin()).abs() < 1e-15);
        assert!((cf.modulus - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_frequency_gives_one() {
        let y = two_points();
        let cf = empirical_cf(&y, &Frequency::zeros(2)).unwrap();
        assert_eq!(cf.value, Complex::new(1.0, 0.0));
        assert_eq!(log_modulus_cf(&y, &Frequency::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn two_point_sum_by_hand() {
        let cf = empirical_cf(&two_points(), &Frequency::from_slice(&[PI, 0.0]).unwrap()).unwrap();
        assert!((cf.value.re + 1.0).abs() < 1e-15);
        assert!(cf.value.im.abs() < 1e-15);
    }

    #[test]
    fn vanishing_cf_uses_zero_log_convention() {
        // cos(π/2) is 6.1e-17 in floating point, so the cutoff has to sit above it.
        let y = two_points();
        let u = Frequency::from_slice(&[PI / 2.0, 0.0]).unwrap();
        let lenient = CfOptions { zero_tol: 1e-12 };
        assert_eq!(log_modulus_cf_with(&y, &u, &lenient).unwrap(), 0.0);
        let strict = log_modulus_cf(&y, &u).unwrap();
        assert!((strict - (PI / 2.0).cos().abs().ln()).abs() < 1e-12);
        let exact = CfValue::new(Complex::new(0.0, 0.0));
        assert_eq!(exact.log_modulus(1e-300), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = empirical_cf(&two_points(), &Frequency::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 3 }));
    }

    #[test]
    fn non_finite_samples_rejected() {
        assert!(SampleMatrix::new(array![[1.0, f64::NAN]]).is_err());
        assert!(SampleMatrix::<f64>::new(Array2::zeros((0, 3))).is_err());
    }

    #[test]
    fn direction_vectors() {
        let d = direction_vector::<f64>(0, 0, 3).unwrap();
        assert_eq!(d.view().to_vec(), vec![1.0, 0.0, 0.0]);
        let o = direction_vector::<f64>(0, 1, 2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(o.view().to_vec(), vec![h, h]);
        assert!((o.norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            direction_vector::<f64>(3, 0, 3),
            Err(Error::IndexOutOfRange { i: 3, j: 0, p: 3 })
        ));
    }

    #[test]
    fn batched_probes_match_pointwise_evaluation() {
        let y = SampleMatrix::new(array![[0.1, 0.5, -0.3], [1.2, -0.7, 0.4], [-0.2, 0.9, 2.1]]).unwrap();
        let u = 1.7f64;
        let batch = probe_log_moduli(&y, u, &CfOptions::default());
        for i in 0..3 {
            for j in 0..3 {
                let f = direction_vector(i, j, 3).unwrap().scaled(u);
                let direct = log_modulus_cf(&y, &f).unwrap();
                assert!((batch[[i, j]] - direct).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    fn sample_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (1usize..12, 1usize..5).prop_flat_map(|(n, p)| {
            (
                prop::collection::vec(prop::collection::vec(-5.0..5.0f64, p), n),
                prop::collection::vec(-3.0..3.0f64, p),
            )
        })
    }

    proptest! {
        #[test]
        fn modulus_bounded_and_conjugate_symmetric((rows, u) in sample_strategy()) {
            let y = SampleMatrix::from_rows(&rows).unwrap();
            let f = Frequency::from_slice(&u).unwrap();
            let a = empirical_cf(&y, &f).unwrap();
            let b = empirical_cf(&y, &f.neg()).unwrap();
            prop_assert!(a.modulus <= 1.0 + 1e-12 * rows.len() as f64);
            prop_assert!((a.value - b.value.conj()).norm() < 1e-12);
        }

        #[test]
        fn log_modulus_permutation_invariant((rows, u) in sample_strategy(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rng);
            let f = Frequency::from_slice(&u).unwrap();
            let a = log_modulus_cf(&SampleMatrix::from_rows(&rows).unwrap(), &f).unwrap();
            let b = log_modulus_cf(&SampleMatrix::from_rows(&shuffled).unwrap(), &f).unwrap();
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }

        #[test]
        fn probe_quadratic_form_identity(entries in prop::collection::vec(-2.0..2.0f64, 10)) {
            // random symmetric 4×4 from its upper triangle
            let p = 4;
            let mut s = Array2::<f64>::zeros((p, p));
            let mut k = 0;
            for i in 0..p { for j in i..p { s[[i, j]] = entries[k]; s[[j, i]] = entries[k]; k += 1; } }
            for i in 0..p {
                for j in 0..p {
                    let u = direction_vector::<f64>(i, j, p).unwrap();
                    let q = u.view().dot(&s.dot(&u.view()));
                    let expected = if i == j { s[[i, i]] } else { s[[i, j]] + (s[[i, i]] + s[[j, j]]) / 2.0 };
                    prop_assert!((q - expected).abs() < 1e-12);
                }
            }
        }
    }
}
