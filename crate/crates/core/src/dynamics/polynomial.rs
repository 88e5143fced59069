//! Polynomial geodesics on nilpotent quadratic algebras.
//!
//! For `x' = B(x, x)` with `B(a, b) = u^{-1}[u a, b]`: if `u` preserves every
//! term `C^i` of the lower central series then `B(C^i, C^j)` lies in
//! `C^{i+j}`, so by induction `x^{(i)}` lies in `C^{i+1}` and `x^{(m)} = 0`
//! for class `m`. Reflections are then polynomials of degree `<= m - 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::integrator::{sample, IntegratorOptions};
use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::SymmetricIso;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialVerdict {
    pub nilpotency_class: usize,
    /// Reflections are polynomials of at most this degree.
    pub degree_bound: usize,
    /// Points at which the derivative recursion was evaluated in the
    /// algebra's own arithmetic.
    pub trials: usize,
    /// Largest `(m+1)`-th divided difference of integrated reflections,
    /// relative to `1 + max |x|`.
    pub max_divided_difference: f64,
    pub certified: bool,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

pub fn polynomial_geodesic_check<T: Scalar>(alg: &LieAlgebra<T>, u: &SymmetricIso<T>, trials: usize) -> Result<PolynomialVerdict> {
    let n = alg.dim();
    let m = alg.nilpotency_class().ok_or(Error::NotNilpotent)?;
    let series = alg.lower_central_series();
    // series[i - 1] = C^i
    for i in 1..=m {
        let ci = &series[i - 1];
        if !ci.contains_subspace(&ci.image(u.matrix())) {
            return Err(Error::SeriesNotPreserved(i));
        }
    }
    let uinv = u.inverse()?;
    let b = |a: &[T], c: &[T]| uinv.mul_vec(&alg.bracket_unchecked(&u.apply(a), c));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..trials {
        let x: Vec<T> = (0..n).map(|_| T::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
        let mut ders = vec![x];
        for k in 0..m {
            let mut next = vec![T::zero(); n];
            for j in 0..=k {
                let term = b(&ders[j], &ders[k - j]);
                let w = T::from_int(binomial(k, j));
                for (o, t) in next.iter_mut().zip(term) {
                    *o = o.clone() + w.clone() * t;
                }
            }
            ders.push(next);
        }
        for (i, d) in ders.iter().enumerate().skip(1) {
            // x^(i) in C^(i+1); C^(m+1) = 0.
            let inside = series.get(i).is_none_or(|c| c.contains(d));
            if !inside {
                return Err(Error::Validation(format!("derivative {i} leaves C^{}", i + 1)));
            }
        }
    }

    let uf: Matrix<f64> = u.matrix().to_f64();
    let uinvf = uinv.to_f64();
    let af = alg.to_f64();
    let field = |x: &[f64], d: &mut [f64]| {
        let br = af.bracket_unchecked(&uf.mul_vec(x), x);
        d.copy_from_slice(&uinvf.mul_vec(&br));
    };
    let order = m + 1;
    let h = 0.5;
    let grid: Vec<f64> = (0..=order).map(|j| j as f64 * h).collect();
    let fact: f64 = (1..=order).map(|v| v as f64).product();
    let mut worst: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let tr = sample(field, &x0, &grid, IntegratorOptions::default())?;
        if !tr.status.is_completed() {
            worst = f64::INFINITY;
            continue;
        }
        let scale = 1.0 + tr.states.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for k in 0..n {
            // forward difference of order m + 1
            let diff: f64 = (0..=order)
                .map(|j| {
                    let sgn = if (order - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sgn * binomial(order, j) as f64 * tr.states[j][k]
                })
                .sum();
            worst = worst.max((diff / (fact * h.powi(order as i32))).abs() / scale);
        }
    }
    Ok(PolynomialVerdict {
        nilpotency_class: m,
        degree_bound: m.saturating_sub(1),
        trials,
        max_divided_difference: worst,
        certified: worst <= 1e-7,
    })
}
