//! Floating-point kernels: one-sided Jacobi SVD and cyclic Jacobi
//! eigenvalues. Both are slow in theory and irrelevant in practice at the
//! dimensions used here, and both are accurate to a few ulps of the largest
//! singular value / eigenvalue.

use num_traits::Float;

use super::{Inertia, Matrix};

const MAX_SWEEPS: usize = 80;

/// Singular values and right singular vectors (columns of `v`).
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub sigma: Vec<F>,
    pub v: Matrix<F>,
}

/// One-sided (Hestenes) Jacobi SVD of an `m x n` matrix.
pub fn svd<F: Float>(a: &Matrix<F>) -> Svd<F> {
    let (m, n) = (a.rows(), a.cols());
    let mut u = Matrix::from_fn(m, n, |i, j| a[(i, j)]);
    let mut v = Matrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() });
    let eps = F::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (F::zero(), F::zero(), F::zero());
                for i in 0..m {
                    alpha = alpha + u[(i, p)] * u[(i, p)];
                    beta = beta + u[(i, q)] * u[(i, q)];
                    gamma = gamma + u[(i, p)] * u[(i, q)];
                }
                if gamma == F::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = F::one() + F::one();
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = (0..n).map(|j| (0..m).fold(F::zero(), |acc, i| acc + u[(i, j)] * u[(i, j)]).sqrt()).collect();
    Svd { sigma, v }
}

fn split<F: Float>(m: &Matrix<F>, tol: F) -> (Vec<Vec<F>>, Vec<Vec<F>>) {
    let Svd { sigma, v } = svd(m);
    let smax = sigma.iter().copied().fold(F::zero(), F::max);
    let thr = tol * smax;
    let mut range = Vec::new();
    let mut kernel = Vec::new();
    for (j, s) in sigma.iter().enumerate() {
        let col = v.col(j);
        if smax > F::zero() && *s > thr {
            range.push(col);
        } else {
            kernel.push(col);
        }
    }
    (range, kernel)
}

/// Orthonormal basis of the row span (right singular vectors with
/// `sigma > tol * sigma_max`).
pub fn row_basis<F: Float>(m: &Matrix<F>, tol: F) -> Vec<Vec<F>> {
    split(m, tol).0
}

/// Orthonormal basis of the numerical kernel.
pub fn null_space<F: Float>(m: &Matrix<F>, tol: F) -> Vec<Vec<F>> {
    split(m, tol).1
}

/// Smallest singular value divided by the largest (0 for the zero matrix).
pub fn reciprocal_condition<F: Float>(m: &Matrix<F>) -> F {
    let s = svd(m).sigma;
    let smax = s.iter().copied().fold(F::zero(), F::max);
    let smin = s.iter().copied().fold(F::infinity(), F::min);
    if smax == F::zero() {
        F::zero()
    } else {
        smin / smax
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<F: Float>(sym: &Matrix<F>) -> Vec<F> {
    let n = sym.rows();
    let mut a = sym.clone();
    for _ in 0..MAX_SWEEPS {
        let mut off = F::zero();
        let mut diag = F::zero();
        for i in 0..n {
            diag = diag + a[(i, i)] * a[(i, i)];
            for j in 0..n {
                if i != j {
                    off = off + a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off <= F::epsilon() * F::epsilon() * diag || off == F::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == F::zero() {
                    continue;
                }
                let two = F::one() + F::one();
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Inertia from eigenvalue signs; eigenvalues within `tol * max|lambda|` of
/// zero count as zero.
pub fn inertia<F: Float>(sym: &Matrix<F>, tol: F) -> Inertia {
    let ev = symmetric_eigenvalues(sym);
    let thr = tol * ev.iter().map(|x| x.abs()).fold(F::zero(), F::max);
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    for e in ev {
        if e > thr {
            out.positive += 1;
        } else if e < -thr {
            out.negative += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn svd_of_diagonal() {
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -4.0], vec![0.0, 0.0]]).unwrap();
        let mut s = svd(&m).sigma;
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_kernel() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert_eq!(row_basis(&m, 1e-9).len(), 1);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn lorentz_inertia() {
        let g = Matrix::diagonal(&[1.0, 1.0, -1.0]);
        assert_eq!(inertia(&g, 1e-9), Inertia { positive: 2, negative: 1, zero: 0 });
        let h = Matrix::from_rows(&[vec![0.0f32, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(inertia(&h, 1e-4), Inertia { positive: 1, negative: 1, zero: 0 });
    }

    proptest! {
        #[test]
        fn eigenvalues_preserve_trace_and_frobenius(v in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let a = Matrix::from_fn(4, 4, |i, j| v[i * 4 + j] + v[j * 4 + i]);
            let ev = symmetric_eigenvalues(&a);
            let tr: f64 = (0..4).map(|i| a[(i, i)]).sum();
            let fro: f64 = a.as_slice().iter().map(|x| x * x).sum();
            prop_assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-9 * (1.0 + fro));
            prop_assert!((ev.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-9 * (1.0 + fro));
        }

        #[test]
        fn singular_values_reconstruct_frobenius(v in proptest::collection::vec(-5.0f64..5.0, 12)) {
            let a = Matrix::from_fn(4, 3, |i, j| v[i * 3 + j]);
            let s = svd(&a).sigma;
            let fro: f64 = a.as_slice().iter().map(|x| x * x).sum();
            prop_assert!((s.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-9 * (1.0 + fro));
        }
    }
}
