//! Jacobi fields through their reflections:
//! `y'' + 2 x y' = [y, x] x + x [y, x] + [x x, y]` along `x' = -x x`.

use serde::Serialize;

use super::integrator::{integrate, sample, IntegratorOptions, Trajectory};
use super::FastProduct;
use crate::algebra::LieAlgebra;
use crate::connection::ProductTensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Right-hand side of the coupled system on `(x, y, y')`.
pub fn jacobi_rhs(fp: &FastProduct, s: &[f64], out: &mut [f64]) {
    let n = fp.dim();
    let (x, rest) = s.split_at(n);
    let (y, v) = rest.split_at(n);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut xx = vec![0.0; n];
    fp.product(x, x, &mut xx);
    for k in 0..n {
        out[k] = -xx[k];
        out[n + k] = v[k];
    }
    // -2 x v
    fp.product(x, v, &mut a);
    for k in 0..n {
        out[2 * n + k] = -2.0 * a[k];
    }
    // [y, x] x + x [y, x]
    let mut yx = vec![0.0; n];
    fp.bracket(y, x, &mut yx);
    fp.product(&yx, x, &mut a);
    fp.product(x, &yx, &mut b);
    for k in 0..n {
        out[2 * n + k] += a[k] + b[k];
    }
    // [x x, y]
    fp.bracket(&xx, y, &mut a);
    for k in 0..n {
        out[2 * n + k] += a[k];
    }
}

fn check_len(n: usize, v: &[f64]) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    Ok(())
}

/// States are `(x, y, y')`, length `3n`.
pub fn integrate_jacobi<T: Scalar>(
    p: &ProductTensor<T>,
    x0: &[f64],
    y0: &[f64],
    ydot0: &[f64],
    span: (f64, f64),
    opts: IntegratorOptions,
) -> Result<Trajectory> {
    let n = p.dim();
    for v in [x0, y0, ydot0] {
        check_len(n, v)?;
    }
    let fp = FastProduct::new(p);
    let s0: Vec<f64> = x0.iter().chain(y0).chain(ydot0).copied().collect();
    integrate(|s, d| jacobi_rhs(&fp, s, d), &s0, span, opts)
}

/// `y'' = [y', x0]` for a bi-invariant metric; states are `(y, y')`.
pub fn integrate_jacobi_biinvariant<T: Scalar>(
    alg: &LieAlgebra<T>,
    x0: &[f64],
    y0: &[f64],
    ydot0: &[f64],
    span: (f64, f64),
    opts: IntegratorOptions,
) -> Result<Trajectory> {
    let n = alg.dim();
    for v in [x0, y0, ydot0] {
        check_len(n, v)?;
    }
    let c: Vec<f64> = alg.constants().iter().map(Scalar::to_f64).collect();
    // ad-type matrix: [v, x0]_k = sum_i v_i sum_j x0_j c^k_ij
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m[k * n + i] += x0[j] * c[(i * n + j) * n + k];
            }
        }
    }
    let s0: Vec<f64> = y0.iter().chain(ydot0).copied().collect();
    integrate(
        |s, d| {
            let v = &s[n..];
            for k in 0..n {
                d[k] = v[k];
                d[n + k] = (0..n).map(|i| m[k * n + i] * v[i]).sum();
            }
        },
        &s0,
        span,
        opts,
    )
}

/// Reflection of the right-invariant field through `y0` along the geodesic
/// with initial velocity `x0`, checked against the Jacobi equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectionCheck {
    /// States `(x, y)` on a uniform grid.
    pub trajectory: Trajectory,
    /// Largest deviation from the Jacobi-equation solution with the same
    /// initial data, relative to `1 + max |y|`.
    pub residual: f64,
}

/// Integrates `x' = -x x`, `y' = -[x, y]` (that is `y = Ad(sigma^-1) y0`)
/// and compares with `integrate_jacobi` started at `(y0, -[x0, y0])`.
pub fn right_invariant_reflection<T: Scalar>(
    p: &ProductTensor<T>,
    x0: &[f64],
    y0: &[f64],
    span: (f64, f64),
    opts: IntegratorOptions,
) -> Result<ReflectionCheck> {
    let n = p.dim();
    check_len(n, x0)?;
    check_len(n, y0)?;
    let (a, b) = span;
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(Error::InvalidSpan { start: a, end: b });
    }
    let fp = FastProduct::new(p);
    let grid: Vec<f64> = (0..=200).map(|k| a + (b - a) * k as f64 / 200.0).collect();
    let s0: Vec<f64> = x0.iter().chain(y0).copied().collect();
    let ri = sample(
        |s, d| {
            let (x, y) = s.split_at(n);
            let (dx, dy) = d.split_at_mut(n);
            fp.euler(x, dx);
            fp.bracket(x, y, dy);
            dy.iter_mut().for_each(|v| *v = -*v);
        },
        &s0,
        &grid,
        opts,
    )?;
    let mut v0 = vec![0.0; n];
    fp.bracket(x0, y0, &mut v0);
    v0.iter_mut().for_each(|v| *v = -*v);
    let j0: Vec<f64> = x0.iter().chain(y0).chain(&v0).copied().collect();
    let jac = sample(|s, d| jacobi_rhs(&fp, s, d), &j0, &grid, opts)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (r, j) in ri.states.iter().zip(&jac.states) {
        for k in 0..n {
            scale = scale.max(1.0 + r[n + k].abs());
            worst = worst.max((r[n + k] - j[n + k]).abs());
        }
    }
    if ri.states.len() != jac.states.len() {
        worst = f64::INFINITY;
    }
    Ok(ReflectionCheck { trajectory: ri, residual: worst / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{biinvariant_connection, levi_civita};
    use crate::constructions::{catalog, CatalogParams, OscillatorClosedForm};
    use crate::metric::SymBilinearForm;

    #[test]
    fn abelian_fields_are_affine() {
        let alg = LieAlgebra::<f64>::abelian(2);
        let p = levi_civita(&alg, &SymBilinearForm::identity(2)).unwrap();
        let tr = integrate_jacobi(&p, &[1.0, 1.0], &[0.5, 0.0], &[1.0, -2.0], (0.0, 3.0), IntegratorOptions::default()).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s[2] - (0.5 + t)).abs() < 1e-12);
            assert!((s[3] + 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let e = catalog("e2-motion", &CatalogParams::default()).unwrap();
        let p = levi_civita(&e.algebra, e.metric.as_ref().unwrap()).unwrap();
        let tr = integrate_jacobi(&p, &[0.3, 0.2, 1.0], &[0.0; 3], &[0.0; 3], (0.0, 5.0), IntegratorOptions::default()).unwrap();
        assert!(tr.states.iter().all(|s| s[3..].iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn oscillator_paths_agree_with_closed_form() {
        let e = catalog("oscillator(1,2)", &CatalogParams::default()).unwrap();
        let p = biinvariant_connection(&e.algebra);
        let x0 = [0.5, 0.3, 0.2, -0.4, 0.7, 0.1];
        let r = [1.0, -0.5];
        let s = [0.25, 0.6];
        let cf = OscillatorClosedForm::new(&[1.0, 2.0], &x0, &r).unwrap().with_s(&s).with_c0(0.3);
        let v0 = cf.initial_velocity();
        let opts = IntegratorOptions::default();
        let full = integrate_jacobi(&p, &x0, &[0.0; 6], &v0, (0.0, 10.0), opts).unwrap();
        let short = integrate_jacobi_biinvariant(&e.algebra, &x0, &[0.0; 6], &v0, (0.0, 10.0), opts).unwrap();
        for (t, st) in full.times.iter().zip(&full.states) {
            let y = cf.y(*t);
            for k in 0..6 {
                assert!((st[6 + k] - y[k]).abs() < 1e-8, "t={t} k={k} {} {}", st[6 + k], y[k]);
            }
        }
        for (t, st) in short.times.iter().zip(&short.states) {
            let y = cf.y(*t);
            let v = cf.ydot(*t);
            for k in 0..6 {
                assert!((st[k] - y[k]).abs() < 1e-8);
                assert!((st[6 + k] - v[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn right_invariant_fields_are_jacobi() {
        let e = catalog("e2-motion", &CatalogParams::default()).unwrap();
        let p = levi_civita(&e.algebra, e.metric.as_ref().unwrap()).unwrap();
        let chk = right_invariant_reflection(&p, &[0.4, -0.9, 0.7], &[1.0, 0.5, -0.3], (0.0, 10.0), IntegratorOptions::default()).unwrap();
        assert!(chk.residual < 1e-8, "{}", chk.residual);
        let alg = LieAlgebra::<f64>::abelian(2);
        let flat = levi_civita(&alg, &SymBilinearForm::identity(2)).unwrap();
        let chk = right_invariant_reflection(&flat, &[1.0, 2.0], &[3.0, 4.0], (0.0, 1.0), IntegratorOptions::default()).unwrap();
        assert!(chk.trajectory.states.iter().all(|s| s[2] == 3.0 && s[3] == 4.0));
    }
}
