//! Explicit time integration with the four-stage, third-order SSP Runge-Kutta
//! method, either with an embedded second-order error estimate and PI step-size
//! control, or with a prescribed step.

use crate::error::{Error, Result};

/// Right-hand side `du/dt = f(t, u)`, written into the output slice.
pub trait Rhs {
    fn eval(&mut self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<F> Rhs for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn eval(&mut self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        self(t, u, out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub safety: f64,
    /// Exponent on the current error estimate.
    pub beta1: f64,
    /// Exponent on the previous accepted error estimate.
    pub beta2: f64,
    pub min_factor: f64,
    pub max_factor: f64,
    pub dt_max: f64,
    /// First step; estimated from the initial data when `None`.
    pub dt_initial: Option<f64>,
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            safety: 0.9,
            beta1: 0.7 / 3.0,
            beta2: 0.4 / 3.0,
            min_factor: 0.2,
            max_factor: 5.0,
            dt_max: f64::INFINITY,
            dt_initial: None,
            max_steps: 10_000_000,
        }
    }
}

/// Step-size controller state and counters.
#[derive(Debug, Clone)]
pub struct TimeController {
    pub options: AdaptiveOptions,
    pub dt: f64,
    prev_error: f64,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

impl TimeController {
    pub fn new(options: AdaptiveOptions) -> Result<Self> {
        if !(options.abs_tol > 0.0 && options.rel_tol >= 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(options.dt_max > 0.0) {
            return Err(Error::invalid("dt_max must be positive"));
        }
        Ok(Self {
            dt: options.dt_initial.unwrap_or(0.0),
            options,
            prev_error: 1.0,
            n_accepted: 0,
            n_rejected: 0,
            n_rhs: 0,
        })
    }
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub t: f64,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

/// Scratch storage for the stages.
struct Stages {
    k1: Vec<f64>,
    k: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    u_hat: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            u_hat: vec![0.0; n],
        }
    }
}

/// One SSPRK43 step from `u` (with `k1 = f(t, u)` already in `s.k1`) into `out`.
/// The embedded solution is left in `s.u_hat`.
fn ssprk43_step(rhs: &mut impl Rhs, t: f64, dt: f64, u: &[f64], s: &mut Stages, out: &mut [f64]) -> Result<()> {
    let h = 0.5 * dt;
    for i in 0..u.len() {
        s.u1[i] = u[i] + h * s.k1[i];
    }
    rhs.eval(t + h, &s.u1, &mut s.k)?;
    for i in 0..u.len() {
        s.u2[i] = s.u1[i] + h * s.k[i];
    }
    rhs.eval(t + dt, &s.u2, &mut s.k)?;
    for i in 0..u.len() {
        let euler = s.u2[i] + h * s.k[i];
        s.u_hat[i] = u[i] / 3.0 + 2.0 * euler / 3.0;
        // reuse u1 for the third stage value
        s.u1[i] = 2.0 * u[i] / 3.0 + euler / 3.0;
    }
    rhs.eval(t + h, &s.u1, &mut s.k)?;
    for i in 0..u.len() {
        out[i] = s.u1[i] + h * s.k[i];
    }
    Ok(())
}

/// Weighted RMS norm of `a - b` with weights `abs + rel max(|u|, |v|)`.
fn error_norm(opts: &AdaptiveOptions, u_old: &[f64], u_new: &[f64], u_hat: &[f64]) -> f64 {
    let n = u_old.len().max(1) as f64;
    let sum: f64 = u_old
        .iter()
        .zip(u_new)
        .zip(u_hat)
        .map(|((a, b), c)| {
            let w = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            let e = (b - c) / w;
            e * e
        })
        .sum();
    (sum / n).sqrt()
}

/// Starting step from the two-probe heuristic of Hairer, Norsett and Wanner.
/// The second probe sits one explicit Euler step ahead; if that state is
/// inadmissible the trial step is shrunk until it is not.
fn initial_dt(rhs: &mut impl Rhs, ctrl: &mut TimeController, t: f64, u: &[f64], k1: &[f64], span: f64) -> Result<f64> {
    let opts = ctrl.options;
    let scaled = |x: &[f64]| {
        let s: f64 = x
            .iter()
            .zip(u)
            .map(|(a, b)| {
                let w = opts.abs_tol + opts.rel_tol * b.abs();
                (a / w) * (a / w)
            })
            .sum();
        (s / u.len().max(1) as f64).sqrt()
    };
    let d0 = scaled(u);
    let d1 = scaled(k1);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span).min(opts.dt_max);
    let mut probe = vec![0.0; u.len()];
    let mut k2 = vec![0.0; u.len()];
    let mut tries = 0;
    loop {
        for ((p, a), k) in probe.iter_mut().zip(u).zip(k1) {
            *p = a + h0 * k;
        }
        ctrl.n_rhs += 1;
        match rhs.eval(t + h0, &probe, &mut k2) {
            Ok(()) => break,
            Err(e) if e.is_admissibility() && tries < 30 => {
                tries += 1;
                h0 *= 0.1;
            }
            Err(e) => return Err(e),
        }
    }
    let diff: Vec<f64> = k2.iter().zip(k1).map(|(a, b)| a - b).collect();
    let d2 = scaled(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.25)
    };
    Ok((100.0 * h0).min(h1).min(span).min(opts.dt_max))
}

/// Integrate from `t0` to `t_final` with adaptive steps, calling `observer`
/// after every accepted step.
pub fn integrate_adaptive(
    rhs: &mut impl Rhs,
    u: &mut [f64],
    t0: f64,
    t_final: f64,
    ctrl: &mut TimeController,
    mut observer: impl FnMut(f64, &[f64]) -> Result<()>,
) -> Result<Stats> {
    let n = u.len();
    let span = t_final - t0;
    if !(span > 0.0) {
        return Err(Error::invalid("final time must exceed the start time"));
    }
    let opts = ctrl.options;
    let mut s = Stages::new(n);
    let mut next = vec![0.0; n];
    let mut t = t0;
    rhs.eval(t, u, &mut s.k1)?;
    ctrl.n_rhs += 1;
    if ctrl.dt <= 0.0 {
        ctrl.dt = initial_dt(rhs, ctrl, t, u, &s.k1, span)?;
    }
    while t < t_final {
        if ctrl.n_accepted + ctrl.n_rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("step limit {} reached", opts.max_steps),
            });
        }
        let remaining = t_final - t;
        let dt = ctrl.dt.min(opts.dt_max).min(remaining);
        if dt < 1e-14 * span {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("time step {dt:.3e} underflow"),
            });
        }
        match ssprk43_step(rhs, t, dt, u, &mut s, &mut next) {
            Ok(()) => {}
            // before the first accepted step an inadmissible stage only says
            // the starting guess was too large
            Err(e) if e.is_admissibility() && ctrl.n_accepted == 0 => {
                ctrl.n_rejected += 1;
                ctrl.dt = 0.1 * dt;
                continue;
            }
            Err(e) => return Err(e),
        }
        ctrl.n_rhs += 3;
        let err = error_norm(&opts, u, &next, &s.u_hat);
        if err <= 1.0 {
            let err = err.max(1e-10);
            let factor = (opts.safety * err.powf(-opts.beta1) * ctrl.prev_error.powf(opts.beta2))
                .clamp(opts.min_factor, opts.max_factor);
            ctrl.prev_error = err;
            // land exactly on the final time
            t = if dt == remaining { t_final } else { t + dt };
            u.copy_from_slice(&next);
            ctrl.n_accepted += 1;
            ctrl.dt = (dt * factor).min(opts.dt_max);
            observer(t, u)?;
            if t < t_final {
                rhs.eval(t, u, &mut s.k1)?;
                ctrl.n_rhs += 1;
            }
        } else {
            ctrl.n_rejected += 1;
            let factor = if err.is_finite() {
                (opts.safety * err.powf(-1.0 / 3.0)).max(opts.min_factor)
            } else {
                opts.min_factor
            };
            ctrl.dt = dt * factor.min(1.0);
        }
    }
    Ok(Stats {
        t,
        n_accepted: ctrl.n_accepted,
        n_rejected: ctrl.n_rejected,
        n_rhs: ctrl.n_rhs,
    })
}

/// One SSPRK43 step of size `dt`, in place.
pub fn step_fixed(rhs: &mut impl Rhs, u: &mut [f64], t: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step {dt} is not positive")));
    }
    let mut s = Stages::new(u.len());
    rhs.eval(t, u, &mut s.k1)?;
    let mut next = vec![0.0; u.len()];
    ssprk43_step(rhs, t, dt, u, &mut s, &mut next)?;
    u.copy_from_slice(&next);
    Ok(())
}

/// Integrate with steps chosen by `dt_of` (e.g. from a CFL condition),
/// truncating the last step at `t_final`.
pub fn integrate_fixed(
    rhs: &mut impl Rhs,
    u: &mut [f64],
    t0: f64,
    t_final: f64,
    mut dt_of: impl FnMut(&[f64]) -> Result<f64>,
    mut observer: impl FnMut(f64, &[f64]) -> Result<()>,
) -> Result<Stats> {
    if !(t_final > t0) {
        return Err(Error::invalid("final time must exceed the start time"));
    }
    let mut t = t0;
    let mut stats = Stats::default();
    while t < t_final {
        let dt = dt_of(u)?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("time step {dt} is not positive")));
        }
        if dt < 1e-14 * (t_final - t0) {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("time step {dt:.3e} underflow"),
            });
        }
        let remaining = t_final - t;
        let step = dt.min(remaining);
        step_fixed(rhs, u, t, step)?;
        stats.n_rhs += 4;
        stats.n_accepted += 1;
        t = if step == remaining { t_final } else { t + step };
        observer(t, u)?;
    }
    stats.t = t;
    Ok(stats)
}
