//! Exact kernels over arbitrary-precision rationals.
//!
//! Rank and span work goes through fraction-free (Bareiss) elimination on
//! integer rows, so intermediate entries stay integral and grow only like
//! minors of the input. Inertia uses congruence diagonalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Inertia, Matrix};
use crate::scalar::Rational;

/// Clear denominators row by row.
fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Fraction-free row echelon form. Returns the echelon rows (nonzero rows
/// first) and the pivot column of each nonzero row.
pub fn bareiss_echelon(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let m = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..m {
            for j in (col + 1)..ncols {
                let num = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = num / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        // Rows above the current one keep their scale; rows below were
        // divided by the previous pivot, matching the Sylvester identity.
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Reduced row echelon form over the rationals, computed from the
/// fraction-free echelon form.
pub fn rref(m: &Matrix<Rational>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let n = m.cols();
    let (ech, pivots) = bareiss_echelon(integer_rows(m), n);
    let mut rows: Vec<Vec<Rational>> = ech
        .into_iter()
        .zip(&pivots)
        .map(|(row, &p)| {
            let lead = row[p].clone();
            row.into_iter().map(|x| Rational::new(x, lead.clone())).collect()
        })
        .collect();
    for r in (0..rows.len()).rev() {
        let p = pivots[r];
        for above in 0..r {
            let f = rows[above][p].clone();
            if f.is_zero() {
                continue;
            }
            for j in p..n {
                let v = &rows[above][j] - &f * &rows[r][j];
                rows[above][j] = v;
            }
        }
    }
    (rows, pivots)
}

/// Canonical (reduced echelon) basis of the row span.
pub fn row_basis(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    rref(m).0
}

pub fn rank(m: &Matrix<Rational>) -> usize {
    bareiss_echelon(integer_rows(m), m.cols()).1.len()
}

/// Basis of the right kernel, one vector per free column.
pub fn null_space(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let n = m.cols();
    let (rows, pivots) = rref(m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Sylvester inertia by symmetric Gaussian elimination (completion of
/// squares). A zero diagonal with a nonzero off-diagonal entry is handled by
/// the congruence `e_i <- e_i + e_j`, which produces a nonzero pivot.
pub fn inertia(sym: &Matrix<Rational>) -> Inertia {
    let n = sym.rows();
    let mut a = sym.clone();
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| {
                    i != j && !a[(i, j)].is_zero()
                });
                match pair {
                    Some((i, j)) => {
                        // a_ii = a_jj = 0, so the new a_ii is 2 a_ij != 0.
                        for k in 0..n {
                            let v = a[(i, k)].clone() + a[(j, k)].clone();
                            a[(i, k)] = v;
                        }
                        for k in 0..n {
                            let v = a[(k, i)].clone() + a[(k, j)].clone();
                            a[(k, i)] = v;
                        }
                        i
                    }
                    None => {
                        out.zero += active.len();
                        break;
                    }
                }
            }
        };
        let d = a[(p, p)].clone();
        if d.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            let f = a[(i, p)].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for &j in &active {
                let v = a[(i, j)].clone() - f.clone() * a[(p, j)].clone();
                a[(i, j)] = v;
            }
            a[(i, p)] = Rational::zero();
        }
        for &j in &active {
            a[(p, j)] = Rational::zero();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>()).unwrap()
    }

    // Plain rational Gauss-Jordan, used as the reference for rank.
    fn naive_rank(m: &Matrix<Rational>) -> usize {
        let mut rows = m.to_rows();
        let mut r = 0;
        for c in 0..m.cols() {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r {
                    let f = rows[i][c].clone() / rows[r][c].clone();
                    for j in 0..m.cols() {
                        let v = rows[i][j].clone() - f.clone() * rows[r][j].clone();
                        rows[i][j] = v;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn hyperbolic_plane_inertia() {
        let h = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(inertia(&h), Inertia { positive: 1, negative: 1, zero: 0 });
    }

    #[test]
    fn degenerate_inertia_counts_zeros() {
        let m = mat(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, -2]]);
        assert_eq!(inertia(&m), Inertia { positive: 1, negative: 1, zero: 1 });
    }

    #[test]
    fn null_space_is_annihilated() {
        let m = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = null_space(&m);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<Rational>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c)
                .prop_map(move |v| Matrix::from_fn(r, c, |i, j| q(v[i * c + j])))
        })
    }

    proptest! {
        #[test]
        fn bareiss_rank_matches_gauss(m in small_matrix()) {
            prop_assert_eq!(rank(&m), naive_rank(&m));
            prop_assert_eq!(row_basis(&m).len() + null_space(&m).len(), m.cols());
        }

        #[test]
        fn inertia_is_congruence_invariant(
            d in proptest::collection::vec(-2i64..=2, 4),
            p in proptest::collection::vec(-3i64..=3, 16),
        ) {
            let g = Matrix::diagonal(&d.iter().map(|&x| q(x)).collect::<Vec<_>>());
            let p = Matrix::from_fn(4, 4, |i, j| q(p[i * 4 + j]) + if i == j { q(7) } else { q(0) });
            prop_assume!(!p.determinant().is_zero());
            let h = p.transpose().mul(&g).mul(&p);
            prop_assert_eq!(inertia(&h), inertia(&g));
        }
    }
}
