//! Left-invariant connections as bilinear products on the Lie algebra.
//!
//! A product `x y = L_x y` with coefficients `e_i e_j = sum_k Gamma^k_ij e_k`.
//! The Levi-Civita product of a metric `<,>` comes from the Koszul formula
//!
//! ```text
//! 2 <x y, z> = <[x,y], z> - <[y,z], x> + <[z,x], y>
//! ```
//!
//! **Curvature sign convention.** Throughout this crate
//!
//! ```text
//! R(x, y) z = [x,y] z - x (y z) + y (x z)
//! ```
//!
//! which is the negative of the common `[L_x, L_y] - L_[x,y]`. Under this
//! convention a bi-invariant metric has `R(x, y) = 1/4 ad_[x,y]`.

use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::metric::SymBilinearForm;
use crate::scalar::{max_magnitude, Mode, Scalar};

/// Coefficients `Gamma^k_ij` of a product on an algebra, stored flat at
/// `(i * n + j) * n + k`, together with the algebra (and metric, when the
/// product is a Levi-Civita product) it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTensor<T> {
    algebra: LieAlgebra<T>,
    metric: Option<SymBilinearForm<T>>,
    gamma: Vec<T>,
}

/// `R(e_i, e_j) e_k = sum_l R^l_ijk e_l`, stored at `((i n + j) n + k) n + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor<T> {
    dim: usize,
    r: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub flat: bool,
    /// Largest `|R^l_ijk|`, rendered in the arithmetic mode of the input.
    pub max_residual: String,
    pub max_residual_f64: f64,
    pub torsion_ok: bool,
    /// `None` when the product carries no metric.
    pub skew_ok: Option<bool>,
    pub left_symmetric: bool,
    pub left_symmetry_residual: f64,
    pub tolerance: f64,
    pub mode: Mode,
}

impl<T: Scalar> ProductTensor<T> {
    /// Wrap explicit coefficients. No identities are assumed; use the
    /// residual methods to check them.
    pub fn from_coefficients(algebra: LieAlgebra<T>, metric: Option<SymBilinearForm<T>>, gamma: Vec<T>) -> Result<Self> {
        let n = algebra.dim();
        if gamma.len() != n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n, found: gamma.len() });
        }
        if let Some(g) = &metric {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
            }
        }
        Ok(ProductTensor { algebra, metric, gamma })
    }

    /// Build from the matrices `L_{e_i}` (column `j` is `e_i e_j`).
    pub fn from_left_multiplications(algebra: LieAlgebra<T>, metric: Option<SymBilinearForm<T>>, ls: &[Matrix<T>]) -> Result<Self> {
        let n = algebra.dim();
        if ls.len() != n || ls.iter().any(|l| l.rows() != n || l.cols() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: ls.len() });
        }
        let mut gamma = vec![T::zero(); n * n * n];
        for (i, l) in ls.iter().enumerate() {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] = l[(k, j)].clone();
                }
            }
        }
        Self::from_coefficients(algebra, metric, gamma)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn algebra(&self) -> &LieAlgebra<T> {
        &self.algebra
    }

    pub fn metric(&self) -> Option<&SymBilinearForm<T>> {
        self.metric.as_ref()
    }

    pub fn coefficients(&self) -> &[T] {
        &self.gamma
    }

    /// `Gamma^k_ij`.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> &T {
        let n = self.dim();
        &self.gamma[(i * n + j) * n + k]
    }

    pub fn max_coefficient(&self) -> f64 {
        max_magnitude(&self.gamma)
    }

    /// `x y`.
    pub fn product(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n, "vector length");
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let w = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let g = self.coefficient(i, j, k);
                    if !g.is_zero() {
                        *o = o.clone() + w.clone() * g.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `L_x`.
    pub fn left_mult(&self, x: &[T]) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| (0..n).fold(T::zero(), |acc, i| acc + x[i].clone() * self.coefficient(i, j, k).clone()))
    }

    pub fn left_mult_basis(&self, i: usize) -> Matrix<T> {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| self.coefficient(i, j, k).clone())
    }

    /// Largest `|Gamma^k_ij - Gamma^k_ji - c^k_ij|`.
    pub fn torsion_residual(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = (self.coefficient(i, j, k).clone() - self.coefficient(j, i, k).clone()
                        - self.algebra.constant(i, j, k).clone())
                    .abs();
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
        worst
    }

    /// Largest `|<e_i e_j, e_l> + <e_j, e_i e_l>|`; `None` without a metric.
    pub fn metric_skew_residual(&self) -> Option<T> {
        let g = self.metric.as_ref()?;
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            // G L_i + L_i^T G must vanish.
            let l = self.left_mult_basis(i);
            let s = g.matrix().mul(&l).add(&l.transpose().mul(g.matrix()));
            for x in s.as_slice() {
                if x.abs() > worst {
                    worst = x.abs();
                }
            }
        }
        Some(worst)
    }

    /// Largest entry of the left-symmetry defect
    /// `(xy)z - x(yz) - (yx)z + y(xz)` over basis triples, computed from the
    /// product alone.
    pub fn left_symmetry_residual(&self) -> T {
        let n = self.dim();
        let ls: Vec<Matrix<T>> = (0..n).map(|i| self.left_mult_basis(i)).collect();
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                // L_{e_i e_j - e_j e_i} - [L_i, L_j]
                let mut m = ls[i].mul(&ls[j]).sub(&ls[j].mul(&ls[i]));
                for s in 0..n {
                    let a = self.coefficient(i, j, s).clone() - self.coefficient(j, i, s).clone();
                    if !a.is_zero() {
                        m = m.sub(&ls[s].scale(&a));
                    }
                }
                for x in m.as_slice() {
                    if x.abs() > worst {
                        worst = x.abs();
                    }
                }
            }
        }
        worst
    }

    /// `R^l_ijk = sum_m c^m_ij Gamma^l_mk - Gamma^m_jk Gamma^l_im + Gamma^m_ik Gamma^l_jm`.
    pub fn curvature(&self) -> CurvatureTensor<T> {
        let n = self.dim();
        let c = &self.algebra;
        let mut r = vec![T::zero(); n * n * n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = T::zero();
                        for m in 0..n {
                            let cm = c.constant(i, j, m);
                            if !cm.is_zero() {
                                acc = acc + cm.clone() * self.coefficient(m, k, l).clone();
                            }
                            acc = acc - self.coefficient(j, k, m).clone() * self.coefficient(i, m, l).clone()
                                + self.coefficient(i, k, m).clone() * self.coefficient(j, m, l).clone();
                        }
                        r[((j * n + i) * n + k) * n + l] = -acc.clone();
                        r[((i * n + j) * n + k) * n + l] = acc;
                    }
                }
            }
        }
        CurvatureTensor { dim: n, r }
    }

    /// Zero threshold for curvature entries: `rel_tol * (1 + |Gamma|^2 + |c| |Gamma|)`.
    pub fn curvature_tolerance(&self) -> f64 {
        let g = self.max_coefficient();
        T::rel_tol() * (1.0 + g * g + self.algebra.max_constant() * g)
    }

    pub fn flatness_report(&self) -> FlatnessReport {
        let curv = self.curvature();
        let tol = self.curvature_tolerance();
        let max_r = crate::scalar::max_abs(&curv.r);
        let scale = 1.0 + self.max_coefficient() * self.max_coefficient() + self.algebra.max_constant() * self.max_coefficient();
        let torsion_scale = self.max_coefficient().max(self.algebra.max_constant());
        let skew_ok = self.metric_skew_residual().map(|r| {
            let s = self.metric.as_ref().map_or(0.0, |g| g.matrix().max_magnitude()) * self.max_coefficient();
            r.is_negligible(s)
        });
        let ls = self.left_symmetry_residual();
        FlatnessReport {
            flat: max_r.is_negligible(scale),
            max_residual: max_r.render(),
            max_residual_f64: max_r.to_f64(),
            torsion_ok: self.torsion_residual().is_negligible(torsion_scale),
            skew_ok,
            left_symmetric: ls.is_negligible(scale),
            left_symmetry_residual: ls.to_f64(),
            tolerance: tol,
            mode: T::MODE,
        }
    }

    /// Same coefficients, metric back-reference dropped.
    pub fn without_metric(&self) -> Self {
        ProductTensor { algebra: self.algebra.clone(), metric: None, gamma: self.gamma.clone() }
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> ProductTensor<U> {
        ProductTensor {
            algebra: self.algebra.convert(f),
            metric: self.metric.as_ref().map(|g| g.convert(f)),
            gamma: self.gamma.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> ProductTensor<f64> {
        self.convert(Scalar::to_f64)
    }
}

/// Levi-Civita product of a left-invariant metric, via the Koszul formula.
/// `2G` is factored once and reused for every `(i, j)`.
pub fn levi_civita<T: Scalar>(algebra: &LieAlgebra<T>, metric: &SymBilinearForm<T>) -> Result<ProductTensor<T>> {
    let n = algebra.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: metric.dim() });
    }
    let g = metric.matrix();
    let two_g = g.scale(&T::from_int(2));
    let lu = Lu::factor(&two_g).map_err(|_| Error::Degenerate { kernel: Vec::new() })?;
    // w[a][b] = G [e_a, e_b], so <[e_a, e_b], e_m> = w[a][b][m].
    let w: Vec<Vec<Vec<T>>> =
        (0..n).map(|a| (0..n).map(|b| g.mul_vec(&algebra.basis_bracket(a, b))).collect()).collect();
    let mut gamma = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let rhs: Vec<T> = (0..n)
                .map(|m| w[i][j][m].clone() - w[j][m][i].clone() + w[m][i][j].clone())
                .collect();
            if rhs.iter().all(|x| x.is_zero()) {
                continue;
            }
            let sol = lu.solve(&rhs);
            gamma[(i * n + j) * n..(i * n + j + 1) * n].clone_from_slice(&sol);
        }
    }
    ProductTensor::from_coefficients(algebra.clone(), Some(metric.clone()), gamma)
}

/// The product `x y = 1/2 [x, y]` of a bi-invariant metric. The caller is
/// responsible for the metric being ad-invariant.
pub fn biinvariant_connection<T: Scalar>(algebra: &LieAlgebra<T>) -> ProductTensor<T> {
    let gamma = algebra.constants().iter().map(|c| c.clone() * T::half()).collect();
    ProductTensor { algebra: algebra.clone(), metric: None, gamma }
}

/// Levi-Civita flatness of `(algebra, metric)`.
pub fn flatness_report<T: Scalar>(algebra: &LieAlgebra<T>, metric: &SymBilinearForm<T>) -> Result<FlatnessReport> {
    Ok(levi_civita(algebra, metric)?.flatness_report())
}

impl<T: Scalar> CurvatureTensor<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R^l_ijk`, the `e_l` component of `R(e_i, e_j) e_k`.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> &T {
        let n = self.dim;
        &self.r[((i * n + j) * n + k) * n + l]
    }

    pub fn entries(&self) -> &[T] {
        &self.r
    }

    /// `R(e_i, e_j)` as a matrix acting on column vectors.
    pub fn operator(&self, i: usize, j: usize) -> Matrix<T> {
        let n = self.dim;
        Matrix::from_fn(n, n, |l, k| self.component(i, j, k, l).clone())
    }

    /// `R(x, y) z`.
    pub fn apply(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let xy = x[i].clone() * y[j].clone();
                if xy.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let w = xy.clone() * z[k].clone();
                    if w.is_zero() {
                        continue;
                    }
                    for (l, o) in out.iter_mut().enumerate() {
                        *o = o.clone() + w.clone() * self.component(i, j, k, l).clone();
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().all(|x| x.is_zero())
    }

    pub fn max_entry(&self) -> T {
        crate::scalar::max_abs(&self.r)
    }
}

/// The three curvature expressions attached to the four-dimensional
/// double extension of the Minkowski plane, as functions of
/// `a = k(u e1, e1)`, `b = k(u e2, e1)`, `d = -k(u e2, e2)`:
///
/// ```text
/// b (a + d - 1) / (b^2 + a d)
/// (a^2 + 2a(d - 1) - (d - 1)(1 + 3d)) / (4 a d)
/// (3a^2 - 2a(1 + d) - (d - 1)^2) / (4 a d)
/// ```
///
/// Under the sign convention of this module these are
/// `k(R(e1,e-1)e-1, e2)`, `k(R(e1,e-1)e-1, e1)` and `k(R(e2,e-1)e-1, e2)`; the
/// last two hold on the slice `b = 0`.
pub fn dim4_obstruction<T: Scalar>(a: &T, b: &T, d: &T) -> Result<[T; 3]> {
    let one = T::one();
    let den1 = b.clone() * b.clone() + a.clone() * d.clone();
    let den2 = T::from_int(4) * a.clone() * d.clone();
    if den1.is_zero() {
        return Err(Error::DivisionByZero("b^2 + a d"));
    }
    if den2.is_zero() {
        return Err(Error::DivisionByZero("a d"));
    }
    let dm1 = d.clone() - one.clone();
    let f1 = b.clone() * (a.clone() + d.clone() - one.clone()) / den1;
    let two = T::from_int(2);
    let f2 = (a.clone() * a.clone() + two.clone() * a.clone() * dm1.clone()
        - dm1.clone() * (one.clone() + T::from_int(3) * d.clone()))
        / den2.clone();
    let f3 = (T::from_int(3) * a.clone() * a.clone() - two * a.clone() * (one + d.clone()) - dm1.clone() * dm1)
        / den2;
    Ok([f1, f2, f3])
}
