//! Symmetric bilinear forms, Sylvester signature, ad-invariance and
//! k-symmetric isomorphisms.

use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{bilinear, Matrix};
use crate::scalar::{Mode, Scalar};

/// A nondegenerate symmetric bilinear form, `<x, y> = x^T G y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBilinearForm<T> {
    g: Matrix<T>,
}

/// Sylvester signature. `index = min(p, q)` is the dimension of a maximal
/// totally isotropic subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub index: usize,
}

/// An invertible `u` with `k(ux, y) = k(x, uy)`, i.e. `U^T K = K U`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricIso<T> {
    u: Matrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdInvariance<T> {
    pub invariant: bool,
    /// Largest entry of `K ad_{e_i} + ad_{e_i}^T K` over all `i`.
    pub worst_residual: T,
    pub tolerance: f64,
    pub mode: Mode,
}

fn check_symmetric<T: Scalar>(m: &Matrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    if let Some((i, j)) = m.asymmetry() {
        return Err(Error::NotSymmetric { i, j });
    }
    Ok(())
}

fn kernel_strings<T: Scalar>(kernel: &[Vec<T>]) -> Vec<Vec<String>> {
    kernel.iter().map(|v| v.iter().map(Scalar::render).collect()).collect()
}

impl<T: Scalar> SymBilinearForm<T> {
    /// Accepts iff `g` is symmetric and nondegenerate.
    pub fn new(g: Matrix<T>) -> Result<Self> {
        check_symmetric(&g)?;
        let kernel = T::null_space(&g);
        if !kernel.is_empty() {
            return Err(Error::Degenerate { kernel: kernel_strings(&kernel) });
        }
        Ok(SymBilinearForm { g })
    }

    pub fn identity(n: usize) -> Self {
        SymBilinearForm { g: Matrix::identity(n) }
    }

    pub fn diagonal(d: &[T]) -> Result<Self> {
        Self::new(Matrix::diagonal(d))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> T {
        bilinear(&self.g, x, y)
    }

    pub fn signature(&self) -> Signature {
        let i = T::inertia(&self.g);
        Signature { p: i.positive, q: i.negative, index: i.positive.min(i.negative) }
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymBilinearForm<U> {
        SymBilinearForm { g: self.g.map(f) }
    }

    pub fn to_f64(&self) -> SymBilinearForm<f64> {
        self.convert(Scalar::to_f64)
    }
}

/// Signature of an arbitrary symmetric matrix; degenerate input is an error.
pub fn signature<T: Scalar>(g: &Matrix<T>) -> Result<Signature> {
    Ok(SymBilinearForm::new(g.clone())?.signature())
}

/// `k(ad_x y, z) + k(y, ad_x z) = 0` for all basis `x`.
pub fn check_ad_invariance<T: Scalar>(alg: &LieAlgebra<T>, k: &SymBilinearForm<T>) -> Result<AdInvariance<T>> {
    let n = alg.dim();
    if k.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: k.dim() });
    }
    let scale = k.matrix().max_magnitude() * alg.max_constant();
    let mut worst = T::zero();
    for i in 0..n {
        let ad = alg.ad_basis(i);
        let r = k.matrix().mul(&ad).add(&ad.transpose().mul(k.matrix()));
        for x in r.as_slice() {
            if x.abs() > worst {
                worst = x.abs();
            }
        }
    }
    Ok(AdInvariance {
        invariant: worst.is_negligible(scale),
        worst_residual: worst,
        tolerance: T::rel_tol() * scale,
        mode: T::MODE,
    })
}

impl<T: Scalar> SymmetricIso<T> {
    /// Checks invertibility and `U^T K = K U`.
    pub fn new(k: &SymBilinearForm<T>, u: Matrix<T>) -> Result<Self> {
        let n = k.dim();
        if u.rows() != n || u.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: u.rows() });
        }
        if !T::null_space(&u).is_empty() {
            return Err(Error::Singular);
        }
        let ku = k.matrix().mul(&u);
        let utk = u.transpose().mul(k.matrix());
        let diff = ku.sub(&utk);
        let scale = k.matrix().max_magnitude() * u.max_magnitude();
        for i in 0..n {
            for j in 0..n {
                if !diff[(i, j)].is_negligible(scale) {
                    return Err(Error::NotKSymmetric { i, j, residual: diff[(i, j)].render() });
                }
            }
        }
        Ok(SymmetricIso { u })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.u
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.u.mul_vec(x)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        self.u.inverse()
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymmetricIso<U> {
        SymmetricIso { u: self.u.map(f) }
    }

    pub fn to_f64(&self) -> SymmetricIso<f64> {
        self.convert(Scalar::to_f64)
    }
}

/// `<x, y> = k(u x, y)`, i.e. the metric with matrix `K U`.
pub fn metric_from_iso<T: Scalar>(k: &SymBilinearForm<T>, u: Matrix<T>) -> Result<(SymmetricIso<T>, SymBilinearForm<T>)> {
    let iso = SymmetricIso::new(k, u)?;
    let g = SymBilinearForm::new(k.matrix().mul(&iso.u))?;
    Ok((iso, g))
}

/// Inverse of [`metric_from_iso`]: `U = K^{-1} G`.
pub fn recover_iso<T: Scalar>(k: &SymBilinearForm<T>, metric: &SymBilinearForm<T>) -> Result<SymmetricIso<T>> {
    let u = k.matrix().inverse()?.mul(metric.matrix());
    SymmetricIso::new(k, u)
}
