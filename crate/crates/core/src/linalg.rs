//! Dense symmetric linear algebra used by the solvers and samplers.
//!
//! Matrices here are small (p up to a few dozen), so a cyclic Jacobi
//! eigensolver is accurate and fast enough, and keeps everything generic
//! over the scalar type.

use ndarray::{Array1, Array2, ArrayView2, Zip};

use crate::{lit, Real};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V diag(values) Vᵀ` of a symmetric matrix.
/// Eigenvalues are sorted ascending; column `k` of `vectors` pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Array1<T>,
    pub vectors: Array2<T>,
}

impl<T: Real> SymEigen<T> {
    /// `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Array2<T> {
        let p = self.values.len();
        let mapped: Vec<T> = self.values.iter().map(|&d| f(d)).collect();
        let mut out = Array2::<T>::zeros((p, p));
        for i in 0..p {
            for j in i..p {
                let mut acc = T::zero();
                for k in 0..p {
                    acc += self.vectors[[i, k]] * mapped[k] * self.vectors[[j, k]];
                }
                out[[i, j]] = acc;
                out[[j, i]] = acc;
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

/// Cyclic Jacobi eigendecomposition of the symmetric part of `a`.
pub fn sym_eigen<T: Real>(a: ArrayView2<T>) -> SymEigen<T> {
    let p = a.nrows();
    assert_eq!(p, a.ncols(), "sym_eigen needs a square matrix");
    let half = lit::<T>(0.5);
    let mut m = Array2::<T>::zeros((p, p));
    for i in 0..p {
        for j in 0..p {
            m[[i, j]] = (a[[i, j]] + a[[j, i]]) * half;
        }
    }
    let mut v = Array2::<T>::eye(p);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..p {
            total += m[[i, i]] * m[[i, i]];
            for j in (i + 1)..p {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        total += off + off;
        if off == T::zero() || off <= eps * eps * total {
            break;
        }
        for ip in 0..p {
            for iq in (ip + 1)..p {
                let apq = m[[ip, iq]];
                if apq == T::zero() {
                    continue;
                }
                let app = m[[ip, ip]];
                let aqq = m[[iq, iq]];
                let theta = (aqq - app) / (apq + apq);
                let t = if theta.abs() > T::one() / eps {
                    half / theta
                } else {
                    let s = if theta < T::zero() { -T::one() } else { T::one() };
                    s / (theta.abs() + theta.hypot(T::one()))
                };
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                for k in 0..p {
                    if k == ip || k == iq {
                        continue;
                    }
                    let akp = m[[k, ip]];
                    let akq = m[[k, iq]];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    m[[k, ip]] = new_kp;
                    m[[ip, k]] = new_kp;
                    m[[k, iq]] = new_kq;
                    m[[iq, k]] = new_kq;
                }
                m[[ip, ip]] = app - t * apq;
                m[[iq, iq]] = aqq + t * apq;
                m[[ip, iq]] = T::zero();
                m[[iq, ip]] = T::zero();
                for k in 0..p {
                    let vkp = v[[k, ip]];
                    let vkq = v[[k, iq]];
                    v[[k, ip]] = c * vkp - s * vkq;
                    v[[k, iq]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| m[[x, x]].partial_cmp(&m[[y, y]]).unwrap_or(std::cmp::Ordering::Equal));
    let values = Array1::from_iter(order.iter().map(|&k| m[[k, k]]));
    let mut vectors = Array2::<T>::zeros((p, p));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    SymEigen { values, vectors }
}

/// Frobenius norm of a matrix.
pub fn frobenius<T: Real>(a: ArrayView2<T>) -> T {
    a.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Frobenius inner product.
pub fn frob_dot<T: Real>(a: ArrayView2<T>, b: ArrayView2<T>) -> T {
    let mut acc = T::zero();
    Zip::from(a).and(b).for_each(|&x, &y| acc += x * y);
    acc
}

/// Entrywise `sign(x)·(|x| − t)₊`.
#[inline]
pub fn soft<T: Real>(x: T, t: T) -> T {
    let m = x.abs() - t;
    if m > T::zero() {
        m.copysign(x)
    } else {
        T::zero()
    }
}

/// Sum of absolute eigenvalues, i.e. the nuclear norm of a symmetric matrix.
pub fn nuclear_norm_sym<T: Real>(a: ArrayView2<T>) -> T {
    sym_eigen(a).values.iter().map(|d| d.abs()).sum()
}

/// Symmetric positive semidefinite square root. Eigenvalues in `[-clamp, 0)`
/// are treated as zero; anything more negative is reported as the offending value.
pub fn psd_sqrt<T: Real>(a: ArrayView2<T>, clamp: T) -> Result<Array2<T>, T> {
    let eig = sym_eigen(a);
    let lo = eig.min_value();
    if lo < -clamp {
        return Err(lo);
    }
    Ok(eig.reconstruct_with(|d| d.max(T::zero()).sqrt()))
}

/// Largest-to-smallest eigenvalue ratio of a symmetric positive definite matrix.
pub fn condition_number<T: Real>(a: ArrayView2<T>) -> T {
    let eig = sym_eigen(a);
    eig.max_value() / eig.min_value()
}
