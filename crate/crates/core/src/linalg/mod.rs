//! Small dense linear algebra over any [`Scalar`].
//!
//! Dimensions in this crate are tiny (the largest algebras in use have a
//! dozen basis vectors), so everything is a row-major `Vec` and clarity wins
//! over blocking or SIMD.

pub mod exact;
pub mod float;

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Counts of positive, negative and zero squares of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from row vectors. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() })
    }

    /// Build a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn max_magnitude(&self) -> f64 {
        crate::scalar::max_magnitude(&self.data)
    }

    /// All entries zero (exactly, or relative to `scale` for floats).
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(scale))
    }

    /// First `(i, j)` with `m[i][j] != m[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let scale = self.max_magnitude().max(f64::MIN_POSITIVE);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = self[(i, j)].clone() - self[(j, i)].clone();
                if !d.is_negligible(scale) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn rank(&self) -> usize {
        T::row_basis(self).len()
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn determinant(&self) -> T {
        match Lu::factor(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => T::zero(),
        }
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        Ok(Lu::factor(self)?.inverse())
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
///
/// For rationals every pivot test is exact; for floats a pivot is rejected
/// when it is negligible relative to the largest entry of `A`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    odd: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows, found: a.cols });
        }
        let n = a.rows;
        let scale = a.max_magnitude();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if lu[(i, k)].abs() > lu[(p, k)].abs() {
                    p = i;
                }
            }
            if lu[(p, k)].is_negligible(scale) || scale == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = lu[(k, k)].clone();
            for i in (k + 1)..n {
                let f = lu[(i, k)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let v = lu[(i, j)].clone() - f.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = v;
                }
                lu[(i, k)] = f;
            }
        }
        Ok(Lu { lu, perm, odd })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let v = y[i].clone() - self.lu[(i, j)].clone() * y[j].clone();
                y[i] = v;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let v = y[i].clone() - self.lu[(i, j)].clone() * y[j].clone();
                y[i] = v;
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        y
    }

    pub fn determinant(&self) -> T {
        let mut d = if self.odd { -T::one() } else { T::one() };
        for i in 0..self.dim() {
            d = d * self.lu[(i, i)].clone();
        }
        d
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<T> = (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect();
            cols.push(self.solve(&e));
        }
        Matrix::from_columns(&cols).expect("square")
    }
}

/// Outcome of solving a possibly over-determined linear system.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution<T> {
    Unique(Vec<T>),
    Underdetermined,
    Inconsistent,
}

/// Solve `a x = b` where `a` may have more rows than columns.
pub fn solve_system<T: Scalar>(a: &Matrix<T>, b: &[T]) -> LinearSolution<T> {
    assert_eq!(a.rows, b.len());
    let (m, n) = (a.rows, a.cols);
    let scale = a.max_magnitude().max(crate::scalar::max_magnitude(b));
    let mut aug = Matrix::from_fn(m, n + 1, |i, j| if j < n { a[(i, j)].clone() } else { b[i].clone() });
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let mut p = r;
        for i in (r + 1)..m {
            if aug[(i, c)].abs() > aug[(p, c)].abs() {
                p = i;
            }
        }
        if aug[(p, c)].is_negligible(scale) {
            continue;
        }
        for j in 0..=n {
            aug.data.swap(r * (n + 1) + j, p * (n + 1) + j);
        }
        let pivot = aug[(r, c)].clone();
        for i in 0..m {
            if i == r {
                continue;
            }
            let f = aug[(i, c)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..=n {
                let v = aug[(i, j)].clone() - f.clone() * aug[(r, j)].clone();
                aug[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..m).any(|i| !aug[(i, n)].is_negligible(scale)) {
        return LinearSolution::Inconsistent;
    }
    if r < n {
        return LinearSolution::Underdetermined;
    }
    let x = (0..n).map(|i| aug[(i, n)].clone() / aug[(i, pivots[i])].clone()).collect();
    LinearSolution::Unique(x)
}

/// Dot product of two equal-length slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `x^T G y`.
pub fn bilinear<T: Scalar>(g: &Matrix<T>, x: &[T], y: &[T]) -> T {
    dot(x, &g.mul_vec(y))
}

/// Unit vector `e_i` of length `n`.
pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    (0..n).map(|j| if j == i { T::one() } else { T::zero() }).collect()
}
