//! Univariate polynomials over a [`Scalar`] field, enough for similarity
//! invariants of small matrices (characteristic polynomial and invariant
//! factors). Meaningful over exact rationals; float coefficients are only
//! trimmed on exact zeros.

use std::fmt;

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`.
    pub fn monomial_shift(a: T) -> Self {
        Self::new(vec![-a, T::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by the zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = r[k + dd].clone() / dl.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - f.clone() * c.clone();
            }
            // Exact for rationals; forced for floats.
            r[k + dd] = T::zero();
            q[k] = f;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c.render())?,
                1 => write!(f, "({})x", c.render())?,
                _ => write!(f, "({})x^{i}", c.render())?,
            }
        }
        Ok(())
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion.
/// Only used for tiny sizes.
pub fn poly_det<T: Scalar>(m: &[Vec<Polynomial<T>>]) -> Polynomial<T> {
    let n = m.len();
    match n {
        0 => Polynomial::constant(T::one()),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial<T>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = m[0][j].mul(&poly_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// `xI - A` as a polynomial matrix.
fn characteristic_matrix<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<Polynomial<T>>> {
    let n = a.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Polynomial::monomial_shift(a[(i, j)].clone())
                    } else {
                        Polynomial::constant(-a[(i, j)].clone())
                    }
                })
                .collect()
        })
        .collect()
}

/// `det(xI - A)`.
pub fn characteristic_polynomial<T: Scalar>(a: &Matrix<T>) -> Polynomial<T> {
    poly_det(&characteristic_matrix(a))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Invariant factors `i_1 | i_2 | ... | i_n` of `A` (monic, constant ones
/// included), from determinantal divisors `D_k = gcd of k x k minors of xI - A`.
pub fn invariant_factors<T: Scalar>(a: &Matrix<T>) -> Vec<Polynomial<T>> {
    let n = a.rows();
    let cm = characteristic_matrix(a);
    let mut divisors = vec![Polynomial::constant(T::one())];
    for k in 1..=n {
        let mut g = Polynomial::zero();
        'outer: for rows in combinations(n, k) {
            for cols in combinations(n, k) {
                let sub: Vec<Vec<Polynomial<T>>> =
                    rows.iter().map(|&r| cols.iter().map(|&c| cm[r][c].clone()).collect()).collect();
                g = g.gcd(&poly_det(&sub));
                if g.degree() == Some(0) {
                    // gcd is already 1; more minors cannot lower it.
                    break 'outer;
                }
            }
        }
        divisors.push(g);
    }
    (1..=n).map(|k| divisors[k].div_rem(&divisors[k - 1]).0.monic()).collect()
}
