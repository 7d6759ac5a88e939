//! Brute-force optimisers used as oracles. None of them touches the
//! library's solvers.

#![allow(dead_code)]

use nalgebra::DMatrix;
use ndarray::Array2;

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// `log det` through a Cholesky factorisation, `None` when not positive definite.
pub fn logdet(s: &Array2<f64>) -> Option<f64> {
    let p = s.nrows();
    let m = DMatrix::from_fn(p, p, |i, j| s[[i, j]]);
    let chol = m.cholesky()?;
    Some(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// `‖S − A‖² + 2τ|S|₁ − λ log det S`, `+∞` off the positive definite cone.
pub fn pd_soft_value(s: &Array2<f64>, a: &Array2<f64>, tau: f64, lambda: f64) -> f64 {
    match logdet(s) {
        None => f64::INFINITY,
        Some(ld) => {
            let mut v = 0.0;
            for (x, y) in s.iter().zip(a.iter()) {
                v += (x - y) * (x - y) + 2.0 * tau * x.abs();
            }
            v - lambda * ld
        }
    }
}

/// Cyclic coordinate descent over the free symmetric entries with an exact
/// golden-section line search. The `ℓ₁` term is separable in these
/// coordinates, so the iteration converges to the global minimiser.
pub fn pd_soft_oracle(a: &Array2<f64>, tau: f64, lambda: f64) -> Array2<f64> {
    let p = a.nrows();
    let mut s = Array2::<f64>::eye(p) * (1.0 + a.diag().iter().fold(0.0f64, |m, x| m.max(x.abs())));
    for _ in 0..5000 {
        let mut change = 0.0f64;
        for i in 0..p {
            for j in i..p {
                let cur = s[[i, j]];
                let f = |t: f64| {
                    let mut m = s.clone();
                    m[[i, j]] = t;
                    m[[j, i]] = t;
                    pd_soft_value(&m, a, tau, lambda)
                };
                let (lo, hi) = (feasible_edge(&f, cur, -1.0), feasible_edge(&f, cur, 1.0));
                let t = golden_min(f, lo, hi, 1e-13);
                if f(t) <= f(cur) {
                    change = change.max((t - cur).abs());
                    s[[i, j]] = t;
                    s[[j, i]] = t;
                }
            }
        }
        if change < 1e-11 {
            break;
        }
    }
    s
}

/// End of the finite region of `f` starting from the finite point `x` in
/// direction `dir`, capped at distance 4.
fn feasible_edge(f: &impl Fn(f64) -> f64, x: f64, dir: f64) -> f64 {
    let far = x + 4.0 * dir;
    if f(far).is_finite() {
        return far;
    }
    let (mut inside, mut outside) = (x, far);
    for _ in 0..80 {
        let mid = 0.5 * (inside + outside);
        if f(mid).is_finite() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Nelder–Mead simplex search with standard coefficients.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, iters: usize) -> Vec<f64> {
    let d = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut x = start.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if (vals[d] - vals[0]).abs() <= 1e-15 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|x| x[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| centroid[j] + t * (simplex[d][j] - centroid[j])).collect() };
        let r = along(-1.0);
        let fr = f(&r);
        if fr < vals[0] {
            let e = along(-2.0);
            let fe = f(&e);
            if fe < fr {
                simplex[d] = e;
                vals[d] = fe;
            } else {
                simplex[d] = r;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            simplex[d] = r;
            vals[d] = fr;
        } else {
            let c = if fr < vals[d] { along(-0.5) } else { along(0.5) };
            let fc = f(&c);
            if fc < vals[d].min(fr) {
                simplex[d] = c;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    simplex[i] = (0..d).map(|j| 0.5 * (simplex[0][j] + simplex[i][j])).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    simplex[best].clone()
}

/// Lower-triangular factor from a parameter vector, row by row.
pub fn cholesky_product(x: &[f64], p: usize) -> Array2<f64> {
    let mut l = Array2::<f64>::zeros((p, p));
    let mut k = 0;
    for i in 0..p {
        for j in 0..=i {
            l[[i, j]] = x[k];
            k += 1;
        }
    }
    l.dot(&l.t())
}

/// Repeated Nelder–Mead restarts from the previous best point.
pub fn minimise_psd(f: impl Fn(&Array2<f64>) -> f64, p: usize) -> Array2<f64> {
    let d = p * (p + 1) / 2;
    let mut x: Vec<f64> = {
        let mut v = vec![0.0; d];
        let mut k = 0;
        for i in 0..p {
            for j in 0..=i {
                v[k] = if i == j { 0.7 } else { 0.1 };
                k += 1;
            }
        }
        v
    };
    let g = |x: &[f64]| f(&cholesky_product(x, p));
    let mut step = 0.3;
    for _ in 0..40 {
        x = nelder_mead(&g, &x, step, 20_000);
        step = (step * 0.5f64).max(1e-4);
    }
    cholesky_product(&x, p)
}

pub fn frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
