use crate::linalg::soft;
use crate::spectral::{CovEstimate, EstimatorKind, Tuning};
use crate::Real;

/// Keeps entries with `|σ̂ᵢⱼ| > τ` (strict), zeroes the rest.
pub fn hard_threshold<T: Real>(est: &CovEstimate<T>, tau: T) -> CovEstimate<T> {
    let m = est.matrix.mapv(|x| if x.abs() > tau { x } else { T::zero() });
    CovEstimate::new(m, EstimatorKind::Hard, with_tau(est.tuning, tau))
}

/// Entrywise `sign(σ̂ᵢⱼ)·(|σ̂ᵢⱼ| − τ)₊`, the minimiser of `|A − Σ̂|₂² + 2τ|A|₁`.
pub fn soft_threshold<T: Real>(est: &CovEstimate<T>, tau: T) -> CovEstimate<T> {
    let m = est.matrix.mapv(|x| soft(x, tau));
    CovEstimate::new(m, EstimatorKind::Soft, with_tau(est.tuning, tau))
}

pub(crate) fn with_tau<T: Real>(tuning: Tuning, tau: T) -> Tuning {
    Tuning { tau: tau.to_f64(), ..tuning }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn est(m: Array2<f64>) -> CovEstimate<f64> {
        CovEstimate::new(m, EstimatorKind::Spectral, Tuning::default())
    }

    #[test]
    fn hard_rule_examples() {
        let e = est(array![[0.3, -0.5], [-0.5, 0.1]]);
        assert_eq!(hard_threshold(&e, 0.25).matrix, array![[0.3, -0.5], [-0.5, 0.0]]);
        assert_eq!(hard_threshold(&e, 0.0).matrix, e.matrix);
        let tie = est(array![[0.25, 0.0], [0.0, -0.25]]);
        assert_eq!(hard_threshold(&tie, 0.25).matrix, Array2::<f64>::zeros((2, 2)));
        assert_eq!(hard_threshold(&e, 0.25).tuning.tau, Some(0.25));
    }

    #[test]
    fn soft_rule_examples() {
        let e = est(array![[0.3, -0.5], [-0.5, 0.1]]);
        let s = soft_threshold(&e, 0.25).matrix;
        assert!((s[[0, 0]] - 0.05).abs() < 1e-15);
        assert_eq!(s[[0, 1]], -0.25);
        assert_eq!(s[[1, 1]], 0.0);
        assert_eq!(soft_threshold(&e, 0.0).matrix, e.matrix);
    }

    /// Independent minimisation of the separable objective `(a − x)² + 2τ|a|`
    /// by golden-section search on each entry.
    fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        while hi - lo > 1e-12 {
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - g * (hi - lo);
            d = lo + g * (hi - lo);
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn soft_matches_variational_oracle_3x3() {
        let sigma = array![[1.2, -0.3, 0.05], [-0.3, 0.7, 0.41], [0.05, 0.41, -0.2]];
        let tau = 0.25;
        let s = soft_threshold(&est(sigma.clone()), tau).matrix;
        for ((i, j), &x) in sigma.indexed_iter() {
            let a = golden_min(|a| (a - x).powi(2) + 2.0 * tau * a.abs(), -5.0, 5.0);
            assert!((a - s[[i, j]]).abs() < 1e-6, "({i},{j}): {a} vs {}", s[[i, j]]);
        }
    }

    proptest! {
        #[test]
        fn thresholding_is_odd_and_shrinks(x in -3.0..3.0f64, tau in 0.0..1.5f64) {
            let e = est(array![[x]]);
            let n = est(array![[-x]]);
            let h = hard_threshold(&e, tau).matrix[[0, 0]];
            let s = soft_threshold(&e, tau).matrix[[0, 0]];
            prop_assert_eq!(hard_threshold(&n, tau).matrix[[0, 0]], -h);
            prop_assert_eq!(soft_threshold(&n, tau).matrix[[0, 0]], -s);
            prop_assert!(s.abs() <= x.abs());
            prop_assert!((s - x).abs() <= tau + 1e-15);
        }

        #[test]
        fn thresholding_preserves_symmetry(v in prop::collection::vec(-2.0..2.0f64, 6), tau in 0.0..1.0f64) {
            let m = array![[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]];
            prop_assert!(hard_threshold(&est(m.clone()), tau).is_symmetric());
            prop_assert!(soft_threshold(&est(m), tau).is_symmetric());
        }
    }
}
