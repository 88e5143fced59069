//! Closed-form solutions attached to catalog models. All in binary64.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Solution of `x1' = x2 x3, x2' = -x1 x3, x3' = 0` on E(2).
pub fn e2_geodesic(x0: [f64; 3], t: f64) -> [f64; 3] {
    let (s, c) = (x0[2] * t).sin_cos();
    [x0[0] * c + x0[1] * s, -x0[0] * s + x0[1] * c, x0[2]]
}

/// Rotation by `+x3 t`, as usually printed for this example. It solves
/// `x' = +x x` instead and is kept only for comparison.
pub fn e2_geodesic_printed(x0: [f64; 3], t: f64) -> [f64; 3] {
    let (s, c) = (x0[2] * t).sin_cos();
    [x0[0] * c - x0[1] * s, x0[0] * s + x0[1] * c, x0[2]]
}

/// Group-level geodesic through the identity of `R^2 x| SO(2)` in
/// coordinates `(x, y, alpha)`. The body rotation cancels the frame
/// rotation, so the curve is a straight line in these coordinates.
pub fn e2_group_curve(x0: [f64; 3], t: f64) -> [f64; 3] {
    [t * x0[0], t * x0[1], t * x0[2]]
}

/// Companion of [`e2_geodesic_printed`] on the group.
pub fn e2_group_curve_printed(x0: [f64; 3], t: f64) -> [f64; 3] {
    let [x1, x2, x3] = x0;
    if x3 == 0.0 {
        return [t * x1, t * x2, 0.0];
    }
    let (s, c) = (2.0 * x3 * t).sin_cos();
    let h = 2.0 * x3;
    [-x2 / h + x2 / h * c + x1 / h * s, x1 / h - x1 / h * c + x2 / h * s, x3 * t]
}

/// Exponential map at the identity.
pub fn e2_exp(x: [f64; 3]) -> [f64; 3] {
    e2_group_curve(x, 1.0)
}

/// The incomplete solution of the momentum form `p' = [p, u^{-1} p]` on the
/// five-dimensional nilpotent example; pole at `t = -1`.
pub fn dim5_curve_momentum(c: f64, t: f64) -> [f64; 5] {
    let s = 1.0 + t;
    [-2.0 / (s * s), 0.0, 2.0 / s, c * s * s - 1.0, 1.0]
}

/// `x = u^{-1} p` for the curve above; a solution of the Euler equation
/// `x' = u^{-1}[u x, x]`.
pub fn dim5_curve(c: f64, t: f64) -> [f64; 5] {
    let s = 1.0 + t;
    [0.0, -2.0 / (s * s), 2.0 / s, -1.0, 1.0 - c * s * s]
}

pub fn dim5_curve_derivative(c: f64, t: f64) -> [f64; 5] {
    let s = 1.0 + t;
    [0.0, 4.0 / (s * s * s), -2.0 / (s * s), 0.0, -2.0 * c * s]
}

pub fn dim5_curve_momentum_derivative(c: f64, t: f64) -> [f64; 5] {
    let s = 1.0 + t;
    [4.0 / (s * s * s), 0.0, -2.0 / (s * s), 2.0 * c * s, 0.0]
}

/// Conjugate-parameter candidates inside a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidates {
    /// `2 pi k / |x_{-1} lambda_i|`: common zeros of the closed-form fields.
    pub two_pi: Vec<f64>,
    /// `pi k / |x_{-1} lambda_i|`.
    pub pi: Vec<f64>,
}

/// Jacobi fields along `t -> exp(t x0)` for the bi-invariant metric of an
/// oscillator algebra, `y'' = [y', x0]`, with `y(0) = 0` and
/// `y'(0) = c0 e0 + sum r_j e_j + s_j e_j'` (no `e-1` component).
///
/// Basis order `(e-1, e0, e1..en, e1'..en')`. With `w_j = x_{-1} lambda_j`:
///
/// ```text
/// y_j  = (r_j sin w_j t + s_j (1 - cos w_j t)) / w_j
/// y_j' = (s_j sin w_j t - r_j (1 - cos w_j t)) / w_j
/// y0'' = sum lambda_j ((x'_j r_j - x_j s_j) cos w_j t + (x'_j s_j + x_j r_j) sin w_j t)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorClosedForm {
    lambda: Vec<f64>,
    x0: Vec<f64>,
    r: Vec<f64>,
    s: Vec<f64>,
    c0: f64,
}

impl OscillatorClosedForm {
    pub fn new(lambda: &[f64], x0: &[f64], r: &[f64]) -> Result<Self> {
        let n = lambda.len();
        if x0.len() != 2 * n + 2 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 2, found: x0.len() });
        }
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        if x0[0] == 0.0 {
            return Err(Error::ZeroXMinusOne);
        }
        Ok(OscillatorClosedForm { lambda: lambda.to_vec(), x0: x0.to_vec(), r: r.to_vec(), s: vec![0.0; n], c0: 0.0 })
    }

    pub fn with_s(mut self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.lambda.len());
        self.s = s.to_vec();
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    fn n(&self) -> usize {
        self.lambda.len()
    }

    fn omega(&self, j: usize) -> f64 {
        self.x0[0] * self.lambda[j]
    }

    /// `y'(0)` in basis order.
    pub fn initial_velocity(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![0.0; 2 * n + 2];
        v[1] = self.c0;
        for j in 0..n {
            v[2 + j] = self.r[j];
            v[2 + n + j] = self.s[j];
        }
        v
    }

    pub fn y(&self, t: f64) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; 2 * n + 2];
        let mut y0 = self.c0 * t;
        for j in 0..n {
            let w = self.omega(j);
            let (sn, cs) = (w * t).sin_cos();
            let (r, s) = (self.r[j], self.s[j]);
            y[2 + j] = (r * sn + s * (1.0 - cs)) / w;
            y[2 + n + j] = (s * sn - r * (1.0 - cs)) / w;
            let (xj, xcj) = (self.x0[2 + j], self.x0[2 + n + j]);
            let a = self.lambda[j] * (xcj * r - xj * s);
            let b = self.lambda[j] * (xcj * s + xj * r);
            y0 += a * (1.0 - cs) / (w * w) + b * (t / w - sn / (w * w));
        }
        y[1] = y0;
        y
    }

    pub fn ydot(&self, t: f64) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![0.0; 2 * n + 2];
        let mut v0 = self.c0;
        for j in 0..n {
            let w = self.omega(j);
            let (sn, cs) = (w * t).sin_cos();
            let (r, s) = (self.r[j], self.s[j]);
            v[2 + j] = r * cs + s * sn;
            v[2 + n + j] = s * cs - r * sn;
            let (xj, xcj) = (self.x0[2 + j], self.x0[2 + n + j]);
            let a = self.lambda[j] * (xcj * r - xj * s);
            let b = self.lambda[j] * (xcj * s + xj * r);
            v0 += a * sn / w + b * (1.0 - cs) / w;
        }
        v[1] = v0;
        v
    }

    /// The displayed formulas taken verbatim (`+(1 - cos)` for the checked
    /// component, no `lambda` factor in `y0`), for a single excited index with
    /// `y0(0) = y0(t_1) = 0`. Kept to document where they disagree with the
    /// differential equation.
    pub fn printed_y(&self, t: f64) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; 2 * n + 2];
        for j in 0..n {
            let w = self.omega(j);
            let (sn, cs) = (w * t).sin_cos();
            let r = self.r[j];
            y[2 + j] = r / w * sn;
            y[2 + n + j] = r / w * (1.0 - cs);
            let (xj, xcj) = (self.x0[2 + j], self.x0[2 + n + j]);
            y[1] += r / (w * w) * (xj * sn + xcj * (1.0 - cs));
        }
        y
    }

    /// Candidate conjugate parameters in `(a, b]`, both families.
    pub fn candidates(&self, a: f64, b: f64) -> Candidates {
        oscillator_candidates(&self.lambda, self.x0[0], a, b)
    }
}

pub fn oscillator_candidates(lambda: &[f64], x_minus_one: f64, a: f64, b: f64) -> Candidates {
    let collect = |step: f64| {
        let mut out: Vec<f64> = Vec::new();
        for l in lambda {
            let period = step / (x_minus_one * l).abs();
            if !period.is_finite() || period <= 0.0 {
                continue;
            }
            let mut k = (a / period).floor().max(0.0) + 1.0;
            while k * period <= b {
                let t = k * period;
                if t > a && t > 0.0 {
                    out.push(t);
                }
                k += 1.0;
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(1.0));
        out
    };
    Candidates { two_pi: collect(2.0 * PI), pi: collect(PI) }
}
