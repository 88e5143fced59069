//! Conjugate points from the Jacobi fundamental matrix `M(t)`, whose
//! columns are the fields with `y(0) = 0`, `y'(0) = e_i`.

use serde::Serialize;

use super::integrator::{IntegratorOptions, Status, Stepper};
use super::FastProduct;
use crate::connection::ProductTensor;
use crate::constructions::Candidates;
use crate::error::{Error, Result};
use crate::linalg::float::svd;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    /// Number of grid intervals over the window.
    pub grid: usize,
    /// Width of the final bracketing interval.
    pub root_tol: f64,
    pub integrator: IntegratorOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid: 2000, root_tol: 1e-10, integrator: IntegratorOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootKind {
    /// `det M / t^n` changes sign.
    SignChange,
    /// Even-multiplicity zero found from a local minimum.
    Touch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateRoot {
    pub t: f64,
    pub kind: RootKind,
    pub bracket: (f64, f64),
    /// `|det M(t)| / max |det M|` over the scan grid.
    pub residual: f64,
    /// Orthonormal basis of the numerical kernel of `M(t)`: initial
    /// velocities `y'(0)` of the fields vanishing at `t`.
    pub kernel: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCheck {
    /// `(candidate, confirmed by the scan)`.
    pub two_pi: Vec<(f64, bool)>,
    pub pi: Vec<(f64, bool)>,
    /// Set when some `pi k` candidate is not a conjugate value.
    pub discrepancy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateReport {
    pub window: (f64, f64),
    pub grid: usize,
    pub roots: Vec<ConjugateRoot>,
    pub max_abs_det: f64,
    /// Integration failure that cut the scan short, if any.
    pub stopped: Option<Status>,
    pub candidates: Option<CandidateCheck>,
}

impl ConjugateReport {
    pub fn times(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.t).collect()
    }
}

/// State `(x, Y, V)` with `Y`, `V` stored column by column.
fn fundamental_rhs(fp: &FastProduct, s: &[f64], out: &mut [f64], scratch: &mut [Vec<f64>; 5]) {
    let n = fp.dim();
    let x = &s[..n];
    let [xx, yx, a, b, c] = scratch;
    fp.product(x, x, xx);
    for k in 0..n {
        out[k] = -xx[k];
    }
    for i in 0..n {
        let y = &s[n + i * n..n + (i + 1) * n];
        let v = &s[n + n * n + i * n..n + n * n + (i + 1) * n];
        out[n + i * n..n + (i + 1) * n].copy_from_slice(v);
        fp.product(x, v, a);
        fp.bracket(y, x, yx);
        fp.product(yx, x, b);
        fp.product(x, yx, c);
        let acc = &mut out[n + n * n + i * n..n + n * n + (i + 1) * n];
        for k in 0..n {
            acc[k] = -2.0 * a[k] + b[k] + c[k];
        }
        fp.bracket(xx, y, a);
        for k in 0..n {
            acc[k] += a[k];
        }
    }
}

struct Evaluator {
    fp: FastProduct,
    opts: IntegratorOptions,
}

impl Evaluator {
    fn rhs(&self) -> impl FnMut(&[f64], &mut [f64]) + '_ {
        let n = self.fp.dim();
        let mut scratch: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
        move |s, d| fundamental_rhs(&self.fp, s, d, &mut scratch)
    }

    fn m(&self, s: &[f64]) -> Matrix<f64> {
        let n = self.fp.dim();
        Matrix::from_fn(n, n, |r, c| s[n + c * n + r])
    }

    /// State at `t`, integrating from a stored grid state.
    fn state_at(&self, t0: f64, s0: &[f64], t: f64) -> Option<Vec<f64>> {
        let mut st = Stepper::new(self.rhs(), t0, s0, self.opts).ok()?;
        st.advance_to(t, |_, _| {}).is_completed().then(|| st.state().to_vec())
    }

    fn g(&self, t: f64, s: &[f64]) -> f64 {
        let n = self.fp.dim() as i32;
        self.m(s).determinant() / t.powi(n)
    }

    fn conditioning(&self, s: &[f64]) -> f64 {
        let sv = svd(&self.m(s)).sigma;
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    fn kernel(&self, s: &[f64], rel: f64) -> Vec<Vec<f64>> {
        let m = self.m(s);
        let d = svd(&m);
        let max = d.sigma.iter().copied().fold(0.0, f64::max);
        let (jmin, _) = d.sigma.iter().enumerate().fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j, v) } else { acc });
        let mut out: Vec<Vec<f64>> = (0..d.sigma.len()).filter(|&j| d.sigma[j] <= rel * max).map(|j| d.v.col(j)).collect();
        if out.is_empty() {
            out.push(d.v.col(jmin));
        }
        out
    }
}

/// Scan `(a, b]` (`0 <= a < b`) for zeros of `det M(t) / t^n`.
pub fn conjugate_scan<T: Scalar>(
    p: &ProductTensor<T>,
    x0: &[f64],
    window: (f64, f64),
    opts: ScanOptions,
    candidates: Option<&Candidates>,
) -> Result<ConjugateReport> {
    let n = p.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    let (a, b) = window;
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(Error::InvalidSpan { start: a, end: b });
    }
    if opts.grid < 2 {
        return Err(Error::Validation("the scan grid needs at least two intervals".into()));
    }
    let ev = Evaluator { fp: FastProduct::new(p), opts: opts.integrator };
    let mut s0 = vec![0.0; n + 2 * n * n];
    s0[..n].copy_from_slice(x0);
    for i in 0..n {
        s0[n + n * n + i * n + i] = 1.0;
    }

    // Grid states; the first grid point is a (or a small offset from 0).
    let h = (b - a) / opts.grid as f64;
    let start = if a == 0.0 { h * 1e-3 } else { a };
    let mut ts = vec![start];
    ts.extend((1..=opts.grid).map(|k| a + h * k as f64));
    let mut stepper = Stepper::new(ev.rhs(), 0.0, &s0, opts.integrator)?;
    let mut states = Vec::with_capacity(ts.len());
    let mut stopped = None;
    for &t in &ts {
        let st = stepper.advance_to(t, |_, _| {});
        if !st.is_completed() {
            stopped = Some(st);
            break;
        }
        states.push(stepper.state().to_vec());
    }
    drop(stepper);
    ts.truncate(states.len());
    let gs: Vec<f64> = ts.iter().zip(&states).map(|(t, s)| ev.g(*t, s)).collect();
    let max_abs_det = states.iter().map(|s| ev.m(s).determinant().abs()).fold(0.0, f64::max);
    let max_g = gs.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let det_at = |t: f64, s: &[f64]| ev.g(t, s).abs() * t.powi(n as i32);

    let mut roots: Vec<ConjugateRoot> = Vec::new();
    let mut sign_change = vec![false; gs.len()];
    for k in 0..gs.len().saturating_sub(1) {
        if gs[k] == 0.0 || gs[k] * gs[k + 1] >= 0.0 {
            continue;
        }
        sign_change[k] = true;
        sign_change[k + 1] = true;
        let (mut lo, mut hi) = (ts[k], ts[k + 1]);
        let glo = gs[k];
        let mut mid_state = states[k].clone();
        while hi - lo > opts.root_tol {
            let mid = 0.5 * (lo + hi);
            let Some(s) = ev.state_at(ts[k], &states[k], mid) else { break };
            let gm = ev.g(mid, &s);
            mid_state = s;
            if gm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if gm * glo < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let s = ev.state_at(ts[k], &states[k], t).unwrap_or(mid_state);
        roots.push(ConjugateRoot {
            t,
            kind: RootKind::SignChange,
            bracket: (lo, hi),
            residual: det_at(t, &s) / max_abs_det.max(f64::MIN_POSITIVE),
            kernel: ev.kernel(&s, 1e-6),
        });
    }

    // Sign-preserving zeros: local minima of |g| that dip below half the
    // larger neighbour (a double root midway between grid points leaves
    // two nearly equal samples, so the smaller neighbour is no guide),
    // refined on the conditioning of M, which vanishes linearly there.
    for k in 1..gs.len().saturating_sub(1) {
        if sign_change[k - 1] || sign_change[k] || sign_change[k + 1] {
            continue;
        }
        let (gl, gc, gr) = (gs[k - 1].abs(), gs[k].abs(), gs[k + 1].abs());
        if !(gc < gl && gc <= gr && gc <= 0.5 * gl.max(gr)) {
            continue;
        }
        let (mut lo, mut hi) = (ts[k - 1], ts[k + 1]);
        let base = (ts[k - 1], states[k - 1].clone());
        let f = |t: f64| ev.state_at(base.0, &base.1, t).map(|s| ev.conditioning(&s)).unwrap_or(f64::INFINITY);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = hi - r * (hi - lo);
        let mut d = lo + r * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        while hi - lo > opts.root_tol {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - r * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + r * (hi - lo);
                fd = f(d);
            }
        }
        let t = 0.5 * (lo + hi);
        let Some(s) = ev.state_at(base.0, &base.1, t) else { continue };
        let cond = ev.conditioning(&s);
        let gt = ev.g(t, &s).abs();
        if cond <= 1e-6 && gt <= 1e-10 * max_g {
            roots.push(ConjugateRoot {
                t,
                kind: RootKind::Touch,
                bracket: (ts[k - 1], ts[k + 1]),
                residual: det_at(t, &s) / max_abs_det.max(f64::MIN_POSITIVE),
                kernel: ev.kernel(&s, 1e-6),
            });
        }
    }
    roots.sort_by(|x, y| x.t.total_cmp(&y.t));
    roots.dedup_by(|x, y| (x.t - y.t).abs() <= 1e-8);

    let candidates = candidates.map(|c| {
        let confirm = |v: &[f64]| -> Vec<(f64, bool)> {
            v.iter().map(|&t| (t, roots.iter().any(|r| (r.t - t).abs() <= 1e-6))).collect()
        };
        let pi = confirm(&c.pi);
        CandidateCheck { two_pi: confirm(&c.two_pi), discrepancy: pi.iter().any(|(_, ok)| !ok), pi }
    });
    Ok(ConjugateReport { window, grid: opts.grid, roots, max_abs_det, stopped, candidates })
}
