//! Dormand–Prince 5(4) with PI step-size control and a per-step callback.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            first_step: None,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    /// The callback asked to stop before `t_end`.
    pub stopped: bool,
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], opts: &Options) -> f64 {
    let n = y.len().max(1) as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step<F>(f: &mut F, t: f64, y: &[f64], f0: &[f64], span: f64, opts: &Options) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let scale: Vec<f64> = y.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let rms = |v: &[f64]| {
        (v.iter().zip(&scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / v.len().max(1) as f64)
            .sqrt()
    };
    let (d0, d1) = (rms(y), rms(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (1e-6f64).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`. `on_step` sees the state
/// after every accepted step and may break to stop early.
pub fn integrate<F, S>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &Options,
    mut on_step: S,
) -> Result<Outcome>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> ControlFlow<()>,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t, &y, &mut k[0]);
    let span = t_end - t0;
    let mut out = Outcome {
        t,
        y: y.clone(),
        accepted: 0,
        rejected: 0,
        stopped: false,
    };
    if span <= 0.0 {
        return Ok(out);
    }
    let mut h = opts
        .first_step
        .unwrap_or_else(|| initial_step(&mut f, t, &y, &k[0], span, opts));
    let (safe, beta, fac_min, fac_max) = (0.9, 0.04, 0.2, 10.0);
    let expo = 0.2 - 0.75 * beta;
    let mut err_old: f64 = 1e-4;
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut last_rejected = false;

    while t < t_end {
        if out.accepted + out.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t, h });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            f(t + C[s] * h, &stage, &mut k[s]);
        }
        // stage 7 is evaluated at the fifth-order solution
        y_new.copy_from_slice(&stage);
        for i in 0..n {
            err[i] = h * E.iter().zip(&k).map(|(e, ki)| e * ki[i]).sum::<f64>();
        }
        let en = error_norm(&y, &y_new, &err, opts);
        if en.is_finite() && en <= 1.0 {
            let fac11 = en.powf(expo);
            let fac = (fac11 / err_old.powf(beta) / safe).clamp(1.0 / fac_max, 1.0 / fac_min);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            err_old = en.max(1e-4);
            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            out.accepted += 1;
            last_rejected = false;
            if on_step(t, &y).is_break() {
                out.stopped = true;
                break;
            }
            h = h_new;
        } else {
            let shrink = if en.is_finite() {
                (en.powf(expo) / safe).min(1.0 / fac_min)
            } else {
                10.0
            };
            h /= shrink;
            out.rejected += 1;
            last_rejected = true;
        }
    }
    out.t = t;
    out.y = y;
    Ok(out)
}
