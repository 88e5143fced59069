//! Geodesics and Jacobi fields through their reflections in the Lie algebra.
//!
//! A geodesic `sigma` with `sigma(0) = e` is encoded by `x(t) =
//! (L_{sigma(t)^-1})_* sigma'(t)`, which solves the Euler equation
//! `x' = -x x` for the Levi-Civita product. A field `Y` along `sigma` is
//! encoded the same way by `y(t)`. All integration runs in binary64.

mod conjugate;
mod integrator;
mod jacobi;
mod polynomial;

pub use conjugate::{conjugate_scan, CandidateCheck, ConjugateReport, ConjugateRoot, RootKind, ScanOptions};
pub use integrator::{integrate, sample, IntegratorOptions, Status, Stepper, Trajectory};
pub use jacobi::{
    integrate_jacobi, integrate_jacobi_biinvariant, jacobi_rhs, right_invariant_reflection, ReflectionCheck,
};
pub use polynomial::{polynomial_geodesic_check, PolynomialVerdict};

use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::connection::ProductTensor;
use crate::error::{Error, Result};
use crate::metric::{SymBilinearForm, SymmetricIso};
use crate::scalar::Scalar;

/// `-x x` for the product `P`.
pub fn euler_field<T: Scalar>(p: &ProductTensor<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x.len() });
    }
    Ok(p.product(x, x).into_iter().map(|v| -v).collect())
}

/// `u^{-1}[u x, x]`, the Euler field of the metric `k(u ., .)` when `k` is
/// ad-invariant.
pub fn euler_field_quadratic<T: Scalar>(alg: &LieAlgebra<T>, u: &SymmetricIso<T>, x: &[T]) -> Result<Vec<T>> {
    let ux = u.apply(x);
    let br = alg.bracket(&ux, x)?;
    Ok(u.inverse()?.mul_vec(&br))
}

/// Flat binary64 copy of a product for the integrators.
#[derive(Debug, Clone)]
pub struct FastProduct {
    n: usize,
    gamma: Vec<f64>,
    c: Vec<f64>,
    /// Rows of `Gamma_ij + Gamma_ji` (`i < j`) and `Gamma_ii`, summed in the
    /// source arithmetic, so that a skew product gives `x x = 0` exactly.
    sym: Vec<(usize, usize, Vec<f64>)>,
}

impl FastProduct {
    pub fn new<T: Scalar>(p: &ProductTensor<T>) -> Self {
        let n = p.dim();
        let g = p.coefficients();
        let mut sym = Vec::new();
        for i in 0..n {
            for j in i..n {
                let row: Vec<f64> = (0..n)
                    .map(|k| {
                        let a = &g[(i * n + j) * n + k];
                        if i == j {
                            a.to_f64()
                        } else {
                            (a.clone() + g[(j * n + i) * n + k].clone()).to_f64()
                        }
                    })
                    .collect();
                if row.iter().any(|v| *v != 0.0) {
                    sym.push((i, j, row));
                }
            }
        }
        FastProduct {
            n,
            gamma: g.iter().map(Scalar::to_f64).collect(),
            c: p.algebra().constants().iter().map(Scalar::to_f64).collect(),
            sym,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `out = x y`.
    pub fn product(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.gamma[(i * n + j) * n..(i * n + j + 1) * n];
                for k in 0..n {
                    out[k] += w * row[k];
                }
            }
        }
    }

    /// `out = [x, y]`.
    pub fn bracket(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.c[(i * n + j) * n..(i * n + j + 1) * n];
                for k in 0..n {
                    out[k] += w * row[k];
                }
            }
        }
    }

    /// `out = -x x`.
    pub fn euler(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, j, row) in &self.sym {
            let w = x[*i] * x[*j];
            if w == 0.0 {
                continue;
            }
            for k in 0..self.n {
                out[k] -= w * row[k];
            }
        }
    }
}

pub fn integrate_geodesic<T: Scalar>(
    p: &ProductTensor<T>,
    x0: &[f64],
    span: (f64, f64),
    opts: IntegratorOptions,
) -> Result<Trajectory> {
    if x0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x0.len() });
    }
    let fp = FastProduct::new(p);
    integrate(|x, d| fp.euler(x, d), x0, span, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub seed: Vec<f64>,
    pub forward: Status,
    pub backward: Status,
    /// Largest relative change of `<x, x>` in either direction, as in
    /// [`energy_drift`].
    pub energy_drift: Option<f64>,
}

impl ProbeResult {
    pub fn completed(&self) -> bool {
        self.forward.is_completed() && self.backward.is_completed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub t_max: f64,
    pub results: Vec<ProbeResult>,
    /// A single escape proves incompleteness; all-completed is evidence only.
    pub incomplete: bool,
}

/// Integrate every seed to `+t_max` and `-t_max`.
pub fn completeness_probe<T: Scalar>(
    p: &ProductTensor<T>,
    seeds: &[Vec<f64>],
    t_max: f64,
    opts: IntegratorOptions,
) -> Result<CompletenessReport> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidSpan { start: -t_max, end: t_max });
    }
    let g = p.metric().map(SymBilinearForm::to_f64);
    let mut results = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let fwd = integrate_geodesic(p, seed, (0.0, t_max), opts)?;
        let bwd = integrate_geodesic(p, seed, (0.0, -t_max), opts)?;
        let energy_drift = g.as_ref().map(|g| {
            let mut d: f64 = 0.0;
            for tr in [&fwd, &bwd] {
                d = d.max(energy_drift(tr, g));
            }
            d
        });
        results.push(ProbeResult { seed: seed.clone(), forward: fwd.status, backward: bwd.status, energy_drift });
    }
    let incomplete = results.iter().any(|r| !r.completed());
    Ok(CompletenessReport { t_max, results, incomplete })
}

/// `max |<x(t),x(t)> - <x0,x0>|`, each sample relative to
/// `max(|<x0,x0>|, |x0|^2, |x(t)|^2)`. On an escaping curve the absolute
/// error grows with `|x|`; see [`energy_drift_from_start`] for the fixed
/// initial scale.
pub fn energy_drift(tr: &Trajectory, g: &SymBilinearForm<f64>) -> f64 {
    drift(tr, g, true)
}

/// As [`energy_drift`], but relative to `max(|<x0,x0>|, |x0|^2)` only.
pub fn energy_drift_from_start(tr: &Trajectory, g: &SymBilinearForm<f64>) -> f64 {
    drift(tr, g, false)
}

fn drift(tr: &Trajectory, g: &SymBilinearForm<f64>, local: bool) -> f64 {
    let Some(first) = tr.states.first() else {
        return 0.0;
    };
    let n = g.dim();
    let e = |x: &[f64]| g.eval(&x[..n], &x[..n]);
    let norm2 = |x: &[f64]| x[..n].iter().map(|v| v * v).sum::<f64>();
    // The first sample is the initial point only for forward runs.
    let x0 = if tr.times.len() > 1 && tr.times[0].abs() > tr.times[tr.times.len() - 1].abs() {
        tr.states.last().expect("nonempty")
    } else {
        first
    };
    let e0 = e(x0);
    let scale0 = e0.abs().max(norm2(x0)).max(f64::MIN_POSITIVE);
    tr.states
        .iter()
        .map(|x| {
            let scale = if local { scale0.max(norm2(x)) } else { scale0 };
            (e(x) - e0).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Residual `max |x'(t) - F(x(t))|` of a closed-form curve against a field,
/// relative to `1 + |F|`.
pub fn field_residual(
    field: impl Fn(&[f64]) -> Vec<f64>,
    curve: impl Fn(f64) -> Vec<f64>,
    derivative: impl Fn(f64) -> Vec<f64>,
    times: &[f64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in times {
        let x = curve(t);
        let f = field(&x);
        let d = derivative(t);
        let scale = 1.0 + f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in d.iter().zip(&f) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    worst
}

/// Default random-free seed set: the coordinate vectors and a few fixed
/// combinations, each of unit sup-norm.
pub fn standard_seeds(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    out.push(vec![1.0; n]);
    out.push((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -0.5 }).collect());
    out.push((0..n).map(|i| ((i + 1) as f64 * 0.7).sin()).collect());
    out
}
