//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! `[e_i, e_j] = sum_k c^k_ij e_k`, stored flat at index `(i * n + j) * n + k`.
//! Basis labels are cosmetic; every operation is index based.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{max_magnitude, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<T> {
    dim: usize,
    labels: Vec<String>,
    c: Vec<T>,
}

/// A linear subspace of `T^n`, held as a basis of row vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Scalar> Subspace<T> {
    /// Span of arbitrary vectors; the stored basis is reduced.
    pub fn span(ambient: usize, vectors: &[Vec<T>]) -> Self {
        if vectors.is_empty() {
            return Subspace { ambient, basis: Vec::new() };
        }
        let m = Matrix::from_rows(vectors).expect("vectors of equal length");
        Subspace { ambient, basis: T::row_basis(&m) }
    }

    pub fn whole(ambient: usize) -> Self {
        Subspace { ambient, basis: (0..ambient).map(|i| crate::linalg::unit(ambient, i)).collect() }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Subspace::span(self.ambient, &rows).dim() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace<T>) -> bool {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &rows).dim() == self.dim()
    }

    /// Sum of two subspaces.
    pub fn join(&self, other: &Subspace<T>) -> Subspace<T> {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &rows)
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, m: &Matrix<T>) -> Subspace<T> {
        let rows: Vec<Vec<T>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::span(self.ambient, &rows)
    }

    /// Extend this subspace to `within` using standard or given vectors, greedily.
    /// Returns the vectors added (a complement of `self` inside `within`).
    pub fn complement_in(&self, within: &[Vec<T>]) -> Vec<Vec<T>> {
        let mut acc = self.clone();
        let mut added = Vec::new();
        for v in within {
            let next = acc.join(&Subspace { ambient: self.ambient, basis: vec![v.clone()] });
            if next.dim() > acc.dim() {
                added.push(v.clone());
                acc = next;
            }
        }
        added
    }
}

/// Structural invariants of an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport<T> {
    pub center: Subspace<T>,
    pub derived: Subspace<T>,
    /// `C^1 = G`, `C^{i+1} = [G, C^i]`, listed until the sequence is
    /// stationary (the stationary term appears once).
    pub lower_central: Vec<Subspace<T>>,
    /// `m` with `C^{m+1} = 0 != C^m`; `None` when not nilpotent.
    pub nilpotency_class: Option<usize>,
    pub solvable: bool,
    pub unimodular: bool,
    pub abelian: bool,
}

impl<T: Scalar> LieAlgebra<T> {
    /// Validate a structure-constant tensor (flat, length `n^3`).
    pub fn new(dim: usize, labels: Option<Vec<String>>, c: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: c.len() });
        }
        let labels = match labels {
            Some(l) if l.len() != dim => return Err(Error::DimensionMismatch { expected: dim, found: l.len() }),
            Some(l) => l,
            None => default_labels(dim),
        };
        let alg = LieAlgebra { dim, labels, c };
        alg.check_antisymmetry()?;
        alg.check_jacobi()?;
        Ok(alg)
    }

    /// Build from bracket entries `[e_i, e_j] = sum coef e_k`. Unlisted pairs
    /// are zero; listing both `(i, j)` and `(j, i)` is allowed when they agree.
    pub fn from_brackets(dim: usize, labels: Option<Vec<String>>, entries: &[(usize, usize, Vec<(usize, T)>)]) -> Result<Self> {
        let mut c = vec![T::zero(); dim * dim * dim];
        let mut set = vec![false; dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, terms) in entries {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i.max(j) + 1 });
            }
            let mut row = vec![T::zero(); dim];
            for (k, coef) in terms {
                if *k >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: k + 1 });
                }
                row[*k] = row[*k].clone() + coef.clone();
            }
            if i == j {
                if let Some(k) = row.iter().position(|x| !x.is_zero()) {
                    return Err(Error::AntisymmetryViolation { i, j, k });
                }
                continue;
            }
            if set[j * dim + i] {
                for (k, v) in row.iter().enumerate() {
                    if c[idx(j, i, k)].clone() + v.clone() != T::zero() {
                        return Err(Error::AntisymmetryViolation { i, j, k });
                    }
                }
            }
            for (k, v) in row.into_iter().enumerate() {
                c[idx(j, i, k)] = -v.clone();
                c[idx(i, j, k)] = v;
            }
            set[i * dim + j] = true;
            set[j * dim + i] = true;
        }
        Self::new(dim, labels, c)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, labels: default_labels(dim), c: vec![T::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Position of a basis label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `c^k_ij`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &T {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn constants(&self) -> &[T] {
        &self.c
    }

    pub fn max_constant(&self) -> f64 {
        max_magnitude(&self.c)
    }

    /// Tolerance scale for quadratic expressions in `c` (Jacobi residuals).
    fn quadratic_scale(&self) -> f64 {
        let m = self.max_constant();
        m * m.max(1.0)
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim;
        let scale = self.max_constant();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let s = self.constant(i, j, k).clone() + self.constant(j, i, k).clone();
                    if !s.is_negligible(scale) {
                        return Err(Error::AntisymmetryViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Jacobi residual `sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj`.
    pub fn jacobi_residual(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let mut acc = T::zero();
        for m in 0..self.dim {
            acc = acc
                + self.constant(i, j, m).clone() * self.constant(m, k, l).clone()
                + self.constant(j, k, m).clone() * self.constant(m, i, l).clone()
                + self.constant(k, i, m).clone() * self.constant(m, j, l).clone();
        }
        acc
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        let scale = self.quadratic_scale();
        // Given antisymmetry the Jacobiator is alternating in (i, j, k).
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let r = self.jacobi_residual(i, j, k, l);
                        if !r.is_negligible(scale) {
                            return Err(Error::JacobiViolation { i, j, k, l, residual: r.render() });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    /// `[x, y]` without length checks; panics on mismatched lengths.
    pub fn bracket_unchecked(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim;
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
                    let cijk = self.constant(i, j, k);
                    if !cijk.is_zero() {
                        *o = o.clone() + w.clone() * cijk.clone();
                    }
                }
            }
        }
        out
    }

    /// `[e_i, e_j]` as a vector.
    pub fn basis_bracket(&self, i: usize, j: usize) -> Vec<T> {
        let start = (i * self.dim + j) * self.dim;
        self.c[start..start + self.dim].to_vec()
    }

    /// Matrix of `ad_x`: `(ad_x)^k_j = sum_i x^i c^k_ij`.
    pub fn ad(&self, x: &[T]) -> Result<Matrix<T>> {
        self.check_len(x)?;
        let n = self.dim;
        Ok(Matrix::from_fn(n, n, |k, j| {
            (0..n).fold(T::zero(), |acc, i| acc + x[i].clone() * self.constant(i, j, k).clone())
        }))
    }

    pub fn ad_basis(&self, i: usize) -> Matrix<T> {
        let n = self.dim;
        Matrix::from_fn(n, n, |k, j| self.constant(i, j, k).clone())
    }

    fn check_len(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        let scale = self.max_constant();
        self.c.iter().all(|x| x.is_negligible(scale.max(1.0)))
    }

    /// `trace(ad_{e_i}) = 0` for every basis vector.
    pub fn is_unimodular(&self) -> bool {
        let scale = self.max_constant();
        (0..self.dim).all(|i| {
            let tr = (0..self.dim).fold(T::zero(), |acc, k| acc + self.constant(i, k, k).clone());
            tr.is_negligible(scale)
        })
    }

    /// `Z(G) = { x : [x, e_j] = 0 for all j }`.
    pub fn center(&self) -> Subspace<T> {
        let n = self.dim;
        let m = Matrix::from_fn(n * n, n, |row, i| {
            let (j, k) = (row / n, row % n);
            self.constant(i, j, k).clone()
        });
        let kernel = T::null_space(&m);
        Subspace::span(n, &kernel)
    }

    /// Span of all `[a, b]` with `a` in `A`, `b` in `B`.
    pub fn bracket_span(&self, a: &Subspace<T>, b: &Subspace<T>) -> Subspace<T> {
        let mut rows = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                rows.push(self.bracket_unchecked(x, y));
            }
        }
        Subspace::span(self.dim, &rows)
    }

    pub fn derived(&self) -> Subspace<T> {
        let g = Subspace::whole(self.dim);
        self.bracket_span(&g, &g)
    }

    pub fn lower_central_series(&self) -> Vec<Subspace<T>> {
        let g = Subspace::whole(self.dim);
        let mut series = vec![g.clone()];
        loop {
            let next = self.bracket_span(&g, series.last().expect("nonempty"));
            let stationary = next.dim() == series.last().expect("nonempty").dim();
            if stationary {
                break;
            }
            let done = next.is_zero();
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    pub fn nilpotency_class(&self) -> Option<usize> {
        class_of(&self.lower_central_series())
    }

    pub fn is_solvable(&self) -> bool {
        let mut d = Subspace::whole(self.dim);
        loop {
            if d.is_zero() {
                return true;
            }
            let next = self.bracket_span(&d, &d);
            if next.dim() == d.dim() {
                return false;
            }
            d = next;
        }
    }

    pub fn structure_report(&self) -> StructureReport<T> {
        let lower_central = self.lower_central_series();
        StructureReport {
            center: self.center(),
            derived: self.derived(),
            nilpotency_class: class_of(&lower_central),
            lower_central,
            solvable: self.is_solvable(),
            unimodular: self.is_unimodular(),
            abelian: self.is_abelian(),
        }
    }

    /// Change of scalar field, e.g. exact to binary64.
    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LieAlgebra<U> {
        LieAlgebra { dim: self.dim, labels: self.labels.clone(), c: self.c.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.convert(Scalar::to_f64)
    }
}

fn class_of<T: Scalar>(series: &[Subspace<T>]) -> Option<usize> {
    let last = series.last()?;
    if last.is_zero() {
        // series = [C^1, ..., C^{m+1} = 0]; a zero-dimensional algebra is excluded.
        Some(series.len() - 1)
    } else {
        None
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn e2() -> LieAlgebra<Rational> {
        LieAlgebra::from_brackets(3, None, &[(2, 0, vec![(1, q(1))]), (2, 1, vec![(0, q(-1))])]).unwrap()
    }

    fn heisenberg() -> LieAlgebra<Rational> {
        LieAlgebra::from_brackets(3, None, &[(0, 1, vec![(2, q(1))])]).unwrap()
    }

    #[test]
    fn e2_is_valid_and_brackets() {
        let g = e2();
        assert_eq!(g.bracket(&[q(0), q(0), q(1)], &[q(1), q(0), q(0)]).unwrap(), vec![q(0), q(1), q(0)]);
        assert!(g.is_unimodular());
        assert!(g.is_solvable());
        assert_eq!(g.nilpotency_class(), None);
        assert_eq!(g.center().dim(), 0);
    }

    #[test]
    fn symmetric_entry_is_rejected() {
        let mut c = vec![q(0); 27];
        c[1] = q(1); // c^1_00
        assert!(matches!(LieAlgebra::new(3, None, c), Err(Error::AntisymmetryViolation { .. })));
        let mut c = vec![q(0); 8];
        c[(0 * 2 + 1) * 2] = q(1);
        c[(1 * 2 + 0) * 2] = q(1);
        assert!(matches!(LieAlgebra::new(2, None, c), Err(Error::AntisymmetryViolation { i: 0, j: 1, k: 0 })));
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [e0,e1]=e2, [e1,e2]=e0, [e0,e2]=e0 is not a Lie bracket.
        let r = LieAlgebra::from_brackets(
            3,
            None,
            &[(0, 1, vec![(2, q(1))]), (1, 2, vec![(0, q(1))]), (0, 2, vec![(0, q(1))])],
        );
        assert!(matches!(r, Err(Error::JacobiViolation { .. })));
    }

    #[test]
    fn conflicting_duplicate_entries() {
        let r = LieAlgebra::from_brackets(2, None, &[(0, 1, vec![(0, q(1))]), (1, 0, vec![(0, q(1))])]);
        assert!(matches!(r, Err(Error::AntisymmetryViolation { .. })));
        let ok = LieAlgebra::from_brackets(2, None, &[(0, 1, vec![(0, q(1))]), (1, 0, vec![(0, q(-1))])]);
        assert!(ok.is_ok());
    }

    #[test]
    fn abelian_report() {
        let r = LieAlgebra::<Rational>::abelian(3).structure_report();
        assert_eq!(r.center.dim(), 3);
        assert_eq!(r.nilpotency_class, Some(1));
        assert!(r.abelian && r.unimodular && r.solvable);
        assert_eq!(r.lower_central.len(), 2);
    }

    #[test]
    fn heisenberg_report() {
        let r = heisenberg().structure_report();
        assert_eq!(r.nilpotency_class, Some(2));
        assert_eq!(r.center, Subspace::span(3, &[vec![q(0), q(0), q(1)]]));
        assert_eq!(r.derived, r.center);
    }

    #[test]
    fn ad_matches_bracket() {
        let g = e2();
        let x = vec![q(1), q(2), q(3)];
        let y = vec![q(-1), q(0), q(5)];
        assert_eq!(g.ad(&x).unwrap().mul_vec(&y), g.bracket(&x, &y).unwrap());
        assert!(matches!(g.bracket(&x, &y[..2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn float_mode_thresholds() {
        let g = e2().to_f64();
        let x = [0.3, -1.1, 2.0];
        let y = [1.0, 0.5, -0.25];
        let z = [2.0, 0.0, 1.0];
        let j = |a: &[f64], b: &[f64], c: &[f64]| g.bracket_unchecked(a, &g.bracket_unchecked(b, c));
        let s: Vec<f64> = (0..3).map(|k| j(&x, &y, &z)[k] + j(&y, &z, &x)[k] + j(&z, &x, &y)[k]).collect();
        assert!(s.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(g.center().dim(), 0);
        assert_eq!(g.derived().dim(), 2);
    }

    fn vec3() -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-9i64..=9).prop_map(q), 3)
    }

    proptest! {
        #[test]
        fn jacobi_holds_on_random_triples(x in vec3(), y in vec3(), z in vec3()) {
            for g in [e2(), heisenberg()] {
                let b = |a: &[Rational], c: &[Rational]| g.bracket_unchecked(a, c);
                let s1 = b(&x, &b(&y, &z));
                let s2 = b(&y, &b(&z, &x));
                let s3 = b(&z, &b(&x, &y));
                for k in 0..3 {
                    prop_assert_eq!(s1[k].clone() + s2[k].clone() + s3[k].clone(), q(0));
                }
            }
        }

        #[test]
        fn bracket_is_antisymmetric(x in vec3(), y in vec3()) {
            let g = e2();
            let a = g.bracket_unchecked(&x, &y);
            let b = g.bracket_unchecked(&y, &x);
            for k in 0..3 {
                prop_assert_eq!(a[k].clone(), -b[k].clone());
            }
        }
    }
}
