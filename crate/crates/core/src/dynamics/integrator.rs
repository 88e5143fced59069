//! Dormand-Prince 5(4) with PI step-size control.

use serde::Serialize;

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights are the last row of A (FSAL); E = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// How an integration ended. Times are those reached, in the original
/// (signed) time variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "t")]
pub enum Status {
    Completed(f64),
    /// The state left the escape ball.
    BlowUp(f64),
    /// The controller asked for a step below the minimum.
    StepCollapse(f64),
}

impl Status {
    pub fn time(&self) -> f64 {
        match *self {
            Status::Completed(t) | Status::BlowUp(t) | Status::StepCollapse(t) => t,
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, Status::Completed(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Status::Completed(_) => "Completed",
            Status::BlowUp(_) => "BlowUp",
            Status::StepCollapse(_) => "StepCollapse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    /// Local error bound per step, mixed absolute/relative.
    pub tol: f64,
    pub escape_radius: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { tol: 1e-10, escape_radius: 1e8, min_step: 1e-12, max_steps: 5_000_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidTolerance(tol));
        }
        Ok(IntegratorOptions { tol, ..Self::default() })
    }

    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        Ok(())
    }
}

/// Samples of an integration with increasing times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub status: Status,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        self.times.last().map(|&t| (t, self.states.last().expect("same length").as_slice()))
    }

    /// Keep only the first `n` components of every state.
    pub fn truncated(&self, n: usize) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|s| s[..n].to_vec()).collect(),
            status: self.status,
        }
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// A stepper holding the current state; `advance_to` lands exactly on the
/// requested time so grids can be sampled without interpolation.
pub struct Stepper<F> {
    f: F,
    t: f64,
    y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    err_old: f64,
    opts: IntegratorOptions,
    steps: usize,
    stage: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl<F: FnMut(&[f64], &mut [f64])> Stepper<F> {
    pub fn new(mut f: F, t0: f64, y0: &[f64], opts: IntegratorOptions) -> Result<Self> {
        opts.check()?;
        let n = y0.len();
        let mut k1 = vec![0.0; n];
        f(y0, &mut k1);
        Ok(Stepper {
            f,
            t: t0,
            y: y0.to_vec(),
            k1,
            h: 0.0,
            err_old: 1e-4,
            opts,
            steps: 0,
            stage: vec![vec![0.0; n]; 7],
            tmp: vec![0.0; n],
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64] {
        &self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Hairer's starting-step heuristic.
    fn initial_step(&mut self, dir: f64) -> f64 {
        let tol = self.opts.tol;
        let sc = |y: f64| tol * (1.0 + y.abs());
        let d0 = self.y.iter().map(|y| (y / sc(*y)).powi(2)).sum::<f64>().sqrt();
        let d1 = self.y.iter().zip(&self.k1).map(|(y, k)| (k / sc(*y)).powi(2)).sum::<f64>().sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(1.0);
        for i in 0..self.y.len() {
            self.tmp[i] = self.y[i] + dir * h0 * self.k1[i];
        }
        let mut k2 = vec![0.0; self.y.len()];
        (self.f)(&self.tmp, &mut k2);
        let d2 = self.y.iter().zip(k2.iter().zip(&self.k1)).map(|(y, (a, b))| ((a - b) / sc(*y)).powi(2)).sum::<f64>().sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1)
    }

    /// One attempted step of size `h` (signed). Returns the scaled error
    /// norm; the candidate state is left in `tmp`, its slope in `stage[6]`.
    /// The system is autonomous, so the stage nodes are not needed.
    fn attempt(&mut self, h: f64) -> f64 {
        let n = self.y.len();
        self.stage[0].copy_from_slice(&self.k1);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.stage[j][i];
                }
                self.tmp[i] = self.y[i] + h * acc;
            }
            (self.f)(&self.tmp, &mut self.stage[s]);
        }
        // tmp now holds the fifth-order solution (row 6 of A), stage[6] its slope.
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (s, w) in E.iter().enumerate() {
                e += w * self.stage[s][i];
            }
            let sc = self.opts.tol * (1.0 + self.y[i].abs().max(self.tmp[i].abs()));
            err += (h * e / sc).powi(2);
        }
        (err / n.max(1) as f64).sqrt()
    }

    /// Integrate to `target`, calling `on_step` after every accepted step.
    /// Stops early with the failure status.
    pub fn advance_to(&mut self, target: f64, mut on_step: impl FnMut(f64, &[f64])) -> Status {
        if target == self.t {
            return Status::Completed(self.t);
        }
        let dir = (target - self.t).signum();
        if self.h == 0.0 || self.h.signum() != dir {
            self.h = dir * self.initial_step(dir);
        }
        loop {
            let remaining = target - self.t;
            if remaining * dir <= 0.0 {
                return Status::Completed(self.t);
            }
            let mut h = self.h;
            let last = (h.abs() >= remaining.abs()) || (remaining.abs() - h.abs()) <= 1e-14 * self.t.abs().max(1.0);
            if last {
                h = remaining;
            }
            if h.abs() < self.opts.min_step && !last {
                return Status::StepCollapse(self.t);
            }
            if self.steps >= self.opts.max_steps {
                return Status::StepCollapse(self.t);
            }
            let err = self.attempt(h);
            if !err.is_finite() {
                self.h = h * FAC_MIN;
                if self.h.abs() < self.opts.min_step {
                    return Status::StepCollapse(self.t);
                }
                continue;
            }
            if err <= 1.0 {
                self.steps += 1;
                self.t = if last { target } else { self.t + h };
                std::mem::swap(&mut self.y, &mut self.tmp);
                self.k1.copy_from_slice(&self.stage[6]);
                let fac = (SAFETY * err.max(1e-10).powf(-ALPHA) * self.err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX);
                self.err_old = err.max(1e-4);
                if !last {
                    self.h = h * fac;
                }
                on_step(self.t, &self.y);
                if norm_inf(&self.y) > self.opts.escape_radius || self.y.iter().any(|v| !v.is_finite()) {
                    return Status::BlowUp(self.t);
                }
            } else {
                let fac = (SAFETY * err.powf(-ALPHA)).clamp(FAC_MIN, 1.0);
                self.h = h * fac;
                if self.h.abs() < self.opts.min_step {
                    return Status::StepCollapse(self.t);
                }
            }
        }
    }
}

/// Integrate an autonomous system over `span = (t0, t1)`. `t1 < t0`
/// integrates backward; the returned samples are sorted by time either way.
pub fn integrate<F: FnMut(&[f64], &mut [f64])>(f: F, y0: &[f64], span: (f64, f64), opts: IntegratorOptions) -> Result<Trajectory> {
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::InvalidSpan { start: t0, end: t1 });
    }
    let mut stepper = Stepper::new(f, t0, y0, opts)?;
    let mut times = vec![t0];
    let mut states = vec![y0.to_vec()];
    let status = stepper.advance_to(t1, |t, y| {
        times.push(t);
        states.push(y.to_vec());
    });
    if t1 < t0 {
        times.reverse();
        states.reverse();
    }
    Ok(Trajectory { times, states, status })
}

/// Values at the given monotone times (the first is the initial time).
/// Stops at the first failure; returns the samples reached so far.
pub fn sample<F: FnMut(&[f64], &mut [f64])>(f: F, y0: &[f64], times: &[f64], opts: IntegratorOptions) -> Result<Trajectory> {
    let Some(&t0) = times.first() else {
        return Err(Error::InvalidSpan { start: f64::NAN, end: f64::NAN });
    };
    let mut stepper = Stepper::new(f, t0, y0, opts)?;
    let mut out_t = vec![t0];
    let mut out_y = vec![y0.to_vec()];
    let mut status = Status::Completed(t0);
    for &t in &times[1..] {
        status = stepper.advance_to(t, |_, _| {});
        if !status.is_completed() {
            break;
        }
        out_t.push(t);
        out_y.push(stepper.state().to_vec());
    }
    if out_t.len() > 1 && out_t[1] < out_t[0] {
        out_t.reverse();
        out_y.reverse();
    }
    Ok(Trajectory { times: out_t, states: out_y, status })
}
