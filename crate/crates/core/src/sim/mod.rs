//! Time integration of the discrete closures with blow-up and irregularity
//! detection, and the critical-amplitude search built on it.

pub mod dopri;

use std::f64::consts::PI;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid_ops::GridField;
use crate::models::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: ModelSpec,
    /// Number of grid intervals on the `2π`-periodic domain.
    pub n: usize,
    /// Initial field `U_j = A sin(X_j)`.
    pub amplitude: f64,
    pub t_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `max_j |U_j|` beyond which the run counts as unstable.
    pub blowup_threshold: f64,
    /// Keep every `k`-th accepted step in the trajectory; 0 keeps only the
    /// initial and final states.
    pub output_stride: usize,
    pub detect_irregularity: bool,
    /// Keep the state exactly invariant under reflection-negation (see
    /// [`symmetrize`]).
    pub enforce_symmetry: bool,
}

impl SimConfig {
    pub fn new(model: ModelSpec, n: usize, amplitude: f64) -> Self {
        Self {
            model,
            n,
            amplitude,
            t_max: 10.0,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            blowup_threshold: 1000.0,
            output_stride: 0,
            detect_irregularity: true,
            enforce_symmetry: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n < 3 {
            return Err(Error::GridTooSmall(self.n));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_max));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !self.amplitude.is_finite() {
            return bad("amplitude must be finite".into());
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blow-up threshold must be positive".into());
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn initial_field(&self) -> GridField {
        let a = self.amplitude;
        GridField::from_fn(self.n, self.spacing(), |x| a * x.sin())
            .expect("validated grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Instability,
    Irregularity,
    None,
    /// The integrator gave up (step-size underflow); not a model verdict.
    Failed,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Instability => "instability",
            EventKind::Irregularity => "irregularity",
            EventKind::None => "none",
            EventKind::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub event: Event,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Number of local extrema of the periodic sequence, plateaus merged: the
/// count of sign changes around the cycle of the nonzero successive
/// differences.
pub fn count_extrema(u: &[f64]) -> usize {
    let n = u.len();
    let signs: Vec<bool> = (0..n)
        .filter_map(|j| {
            let d = u[(j + 1) % n] - u[j];
            (d != 0.0).then_some(d > 0.0)
        })
        .collect();
    let m = signs.len();
    (0..m).filter(|&i| signs[i] != signs[(i + 1) % m]).count()
}

pub fn detect_irregularity(u: &GridField, baseline_extrema: usize) -> bool {
    count_extrema(u.values()) > baseline_extrema
}

/// Replaces `v` by `(v + Rv)/2`, `(Rv)_j = −v_{−j}`. The initial field
/// `A sin X_j` is `R`-invariant and every closure here is `R`-equivariant, so
/// the exact trajectory stays in the invariant subspace; projecting the
/// derivative keeps the computed one there too, bit for bit, instead of
/// letting rounding seed growth along unstable asymmetric directions.
pub fn symmetrize(v: &mut [f64]) {
    let n = v.len();
    v[0] = 0.0;
    for j in 1..=(n - 1) / 2 {
        let a = 0.5 * (v[j] - v[n - j]);
        v[j] = a;
        v[n - j] = -a;
    }
    if n % 2 == 0 {
        v[n / 2] = 0.0;
    }
}

pub fn integrate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let h = cfg.spacing();
    let mut u0 = cfg.initial_field().into_values();
    if cfg.enforce_symmetry {
        symmetrize(&mut u0);
    }
    let baseline = count_extrema(&u0);
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut event = Event {
        kind: EventKind::None,
        time: None,
    };
    let opts = dopri::Options {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        ..dopri::Options::default()
    };
    let spec = cfg.model;
    let mut step = 0usize;
    let outcome = dopri::integrate(
        |_, u, du| {
            spec.rhs_into(u, h, du);
            if cfg.enforce_symmetry {
                symmetrize(du);
            }
        },
        0.0,
        &u0,
        cfg.t_max,
        &opts,
        |t, u| {
            step += 1;
            if cfg.output_stride > 0 && step % cfg.output_stride == 0 {
                times.push(t);
                states.push(u.to_vec());
            }
            let kind = if u.iter().any(|v| !(v.abs() <= cfg.blowup_threshold)) {
                EventKind::Instability
            } else if cfg.detect_irregularity && count_extrema(u) > baseline {
                EventKind::Irregularity
            } else {
                return ControlFlow::Continue(());
            };
            event = Event {
                kind,
                time: Some(t),
            };
            ControlFlow::Break(())
        },
    )?;
    if times.last() != Some(&outcome.t) {
        times.push(outcome.t);
        states.push(outcome.y);
    }
    Ok(Trajectory {
        times,
        states,
        event,
        accepted_steps: outcome.accepted,
        rejected_steps: outcome.rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventFilter {
    /// First event of either kind.
    #[default]
    Any,
    /// Blow-up only; irregularity detection is switched off.
    Instability,
    /// Irregularity only; a run that blows up without first turning
    /// irregular counts as no event.
    Irregularity,
}

impl EventFilter {
    fn accepts(self, kind: EventKind) -> bool {
        match self {
            EventFilter::Any => matches!(kind, EventKind::Instability | EventKind::Irregularity),
            EventFilter::Instability => kind == EventKind::Instability,
            EventFilter::Irregularity => kind == EventKind::Irregularity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub start: f64,
    /// Largest `|A|` tried, further limited so that `max_j |A sin X_j|` stays
    /// within the blow-up threshold.
    pub cap: f64,
    /// Bisection stops once `(hi − lo)/hi` is below this.
    pub rel_width: f64,
    pub filter: EventFilter,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            start: 0.5,
            cap: 1e4,
            rel_width: 1e-3,
            filter: EventFilter::Any,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub model: String,
    #[serde(rename = "N")]
    pub n: usize,
    /// `+1` or `−1`, the sign of the initial amplitude.
    pub sign: i8,
    #[serde(rename = "A_star")]
    pub a_star: Option<f64>,
    pub event: EventKind,
    pub t_event: Option<f64>,
    /// Integrator failure message when `event` is `failed`.
    #[serde(skip)]
    pub failure: Option<String>,
}

/// Smallest `|A|` (to the search resolution) whose run produces an event
/// accepted by the filter. `base` supplies everything but `n`, the model and
/// the amplitude.
pub fn critical_amplitude(
    model: &ModelSpec,
    n: usize,
    sign: i8,
    search: &SearchConfig,
    base: &SimConfig,
) -> SweepRecord {
    let mut rec = SweepRecord {
        model: model.id(),
        n,
        sign: if sign < 0 { -1 } else { 1 },
        a_star: None,
        event: EventKind::None,
        t_event: None,
        failure: None,
    };
    let s = f64::from(rec.sign);
    let run = |a: f64| -> Result<Event> {
        let cfg = SimConfig {
            model: *model,
            n,
            amplitude: s * a,
            detect_irregularity: search.filter != EventFilter::Instability,
            ..*base
        };
        let ev = integrate(&cfg)?.event;
        Ok(if search.filter.accepts(ev.kind) {
            ev
        } else {
            Event {
                kind: EventKind::None,
                time: None,
            }
        })
    };
    let fail = |mut rec: SweepRecord, e: Error| {
        rec.event = EventKind::Failed;
        rec.failure = Some(e.to_string());
        rec
    };

    // an initial field already past the blow-up threshold says nothing
    // about the model, so such amplitudes are outside the search
    let peak = (0..n)
        .map(|j| (2.0 * PI * j as f64 / n as f64).sin().abs())
        .fold(0.0, f64::max);
    let cap = search.cap.min(base.blowup_threshold / peak);
    let mut lo = 0.0;
    let mut hi = search.start;
    let mut hit = loop {
        match run(hi) {
            Err(e) => return fail(rec, e),
            Ok(ev) if ev.kind != EventKind::None => break ev,
            Ok(_) => {}
        }
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return rec;
        }
    };
    while hi - lo > search.rel_width * hi {
        let mid = 0.5 * (lo + hi);
        match run(mid) {
            Err(e) => return fail(rec, e),
            Ok(ev) if ev.kind != EventKind::None => {
                hi = mid;
                hit = ev;
            }
            Ok(_) => lo = mid,
        }
    }
    rec.a_star = Some(hi);
    rec.event = hit.kind;
    rec.t_event = hit.time;
    rec
}

/// Every `(model, N, sign)` cell, in that nesting order. Cells run through
/// `exec`; a failing cell is recorded, not fatal.
pub fn sweep(
    models: &[ModelSpec],
    ns: &[usize],
    signs: &[i8],
    search: &SearchConfig,
    base: &SimConfig,
    exec: Execution,
) -> Result<Vec<SweepRecord>> {
    if models.is_empty() || ns.is_empty() || signs.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one model, N and sign".into()));
    }
    let cells: Vec<(ModelSpec, usize, i8)> = models
        .iter()
        .flat_map(|m| ns.iter().flat_map(move |&n| signs.iter().map(move |&s| (*m, n, s))))
        .collect();
    Ok(exec.map(&cells, |(m, n, s)| critical_amplitude(m, *n, *s, search, base)))
}
