//! Equilibria and linear stability of small Dirichlet reductions.
//!
//! `M` interior grid values sit between two ends pinned at zero. With
//! `U_j = ν/(αH) V_j` and time measured in `H²/ν`, the closures become
//! parameter-free quadratic systems `V̇ = f(V)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid_ops::solve_s_in_place;
use crate::models::{holistic1_bracket_into, ModelKind, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ClosedForm {
    MixtureM2 { theta: f64 },
    Holistic1M2,
    MixtureM3 { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Source {
    /// Masked grid evaluation of a closure.
    Grid(ModelSpec),
    Closed(ClosedForm),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedSystem {
    dim: usize,
    source: Source,
}

/// Builds the reduced system on a grid of `M + 2` points, ends pinned.
///
/// For the holistic closure the bracket is masked to the interior before the
/// nonlocal `S` is applied, and the result is masked again.
pub fn reduce(spec: &ModelSpec, m: usize) -> Result<ReducedSystem> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    spec.validate()?;
    let unit = match spec.kind {
        ModelKind::Mixture { .. } | ModelKind::Holistic1 => ModelSpec {
            nu: 1.0,
            alpha: 1.0,
            ..*spec
        },
        _ => {
            return Err(Error::InvalidModel(format!(
                "no scaled reduction for model {}",
                spec.id()
            )))
        }
    };
    Ok(ReducedSystem {
        dim: m,
        source: Source::Grid(unit),
    })
}

impl ReducedSystem {
    pub fn closed(form: ClosedForm) -> Self {
        let dim = match form {
            ClosedForm::MixtureM2 { .. } | ClosedForm::Holistic1M2 => 2,
            ClosedForm::MixtureM3 { .. } => 3,
        };
        Self {
            dim,
            source: Source::Closed(form),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn describe(&self) -> String {
        match self.source {
            Source::Grid(spec) => format!("{} masked to {} interior points", spec.id(), self.dim),
            Source::Closed(form) => format!("{form:?}"),
        }
    }

    pub fn rhs(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "state has the wrong dimension");
        match self.source {
            Source::Grid(spec) => grid_rhs(&spec, v),
            Source::Closed(form) => closed_rhs(form, v),
        }
    }

    /// Jacobian, row-major. Closed forms are differentiated analytically;
    /// grid reductions by central differences with a step proportional to
    /// `max(1, ‖V‖∞)`, exact up to rounding because the systems are quadratic.
    pub fn jacobian(&self, v: &[f64]) -> DMatrix<f64> {
        if let Source::Closed(form) = self.source {
            return closed_jacobian(form, v);
        }
        let n = self.dim;
        let step = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let mut jac = DMatrix::zeros(n, n);
        let mut p = v.to_vec();
        for k in 0..n {
            p[k] = v[k] + step;
            let fp = self.rhs(&p);
            p[k] = v[k] - step;
            let fm = self.rhs(&p);
            p[k] = v[k];
            for i in 0..n {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * step);
            }
        }
        jac
    }
}

fn grid_rhs(spec: &ModelSpec, v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let mut u = vec![0.0; m + 2];
    u[1..=m].copy_from_slice(v);
    let mut out = vec![0.0; m + 2];
    match spec.kind {
        ModelKind::Holistic1 => {
            holistic1_bracket_into(&u, 1.0, spec, &mut out);
            out[0] = 0.0;
            out[m + 1] = 0.0;
            solve_s_in_place(&mut out);
        }
        _ => spec.rhs_into(&u, 1.0, &mut out),
    }
    out[1..=m].to_vec()
}

fn closed_rhs(form: ClosedForm, v: &[f64]) -> Vec<f64> {
    match form {
        ClosedForm::MixtureM2 { theta: t } => {
            let (a, b) = (v[0], v[1]);
            vec![
                -2.0 * a + b - (1.0 - t) * a * b / 2.0 - t * b * b / 4.0,
                a - 2.0 * b + (1.0 - t) * a * b / 2.0 + t * a * a / 4.0,
            ]
        }
        ClosedForm::Holistic1M2 => {
            let (a, b) = (v[0], v[1]);
            vec![
                -4.0 * a + 2.75 * b - a * a / 12.0 - 0.375 * a * b - 7.0 * b * b / 24.0,
                2.75 * a - 4.0 * b + 7.0 * a * a / 24.0 + 0.375 * a * b + b * b / 12.0,
            ]
        }
        ClosedForm::MixtureM3 { theta: t } => {
            let (a, b, c) = (v[0], v[1], v[2]);
            vec![
                -2.0 * a + b - (1.0 - t) * a * b / 2.0 - t * b * b / 4.0,
                a - 2.0 * b + c - (1.0 - t) * b * (c - a) / 2.0 - t * (c * c - a * a) / 4.0,
                b - 2.0 * c + (1.0 - t) * b * c / 2.0 + t * b * b / 4.0,
            ]
        }
    }
}

fn closed_jacobian(form: ClosedForm, v: &[f64]) -> DMatrix<f64> {
    match form {
        ClosedForm::MixtureM2 { theta: t } => {
            let (a, b) = (v[0], v[1]);
            let s = 1.0 - t;
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    -2.0 - s * b / 2.0,
                    1.0 - s * a / 2.0 - t * b / 2.0,
                    1.0 + s * b / 2.0 + t * a / 2.0,
                    -2.0 + s * a / 2.0,
                ],
            )
        }
        ClosedForm::Holistic1M2 => {
            let (a, b) = (v[0], v[1]);
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    -4.0 - a / 6.0 - 0.375 * b,
                    2.75 - 0.375 * a - 7.0 * b / 12.0,
                    2.75 + 7.0 * a / 12.0 + 0.375 * b,
                    -4.0 + 0.375 * a + b / 6.0,
                ],
            )
        }
        ClosedForm::MixtureM3 { theta: t } => {
            let (a, b, c) = (v[0], v[1], v[2]);
            let s = 1.0 - t;
            DMatrix::from_row_slice(
                3,
                3,
                &[
                    -2.0 - s * b / 2.0,
                    1.0 - s * a / 2.0 - t * b / 2.0,
                    0.0,
                    1.0 + s * b / 2.0 + t * a / 2.0,
                    -2.0 - s * (c - a) / 2.0,
                    1.0 - s * b / 2.0 - t * c / 2.0,
                    0.0,
                    1.0 + s * c / 2.0 + t * b / 2.0,
                    -2.0 + s * b / 2.0,
                ],
            )
        }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Residual bound for accepting `v` as an equilibrium. The systems are
/// quadratic, so rounding in `f` grows like `‖V‖²`.
fn residual_tolerance(v: &[f64], base: f64) -> f64 {
    base * max_norm(v).max(1.0).powi(2)
}

pub const EQUILIBRIUM_TOL: f64 = 1e-10;
pub const DEDUP_TOL: f64 = 1e-7;

/// Damped Newton from `start`; `None` if it fails to converge or leaves
/// `escape` in the max norm.
pub fn newton(sys: &ReducedSystem, start: &[f64], escape: f64) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    let mut f = sys.rhs(&x);
    let mut converged_steps = 0;
    for _ in 0..200 {
        if max_norm(&f) <= residual_tolerance(&x, EQUILIBRIUM_TOL) {
            // a couple of extra full steps tighten the root to rounding level
            converged_steps += 1;
            if converged_steps > 2 {
                return Some(x);
            }
        }
        let jac = sys.jacobian(&x);
        let rhs = DVector::from_iterator(x.len(), f.iter().map(|v| -v));
        let dx = jac.lu().solve(&rhs)?;
        let f0 = max_norm(&f);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + t * d).collect();
            let ft = sys.rhs(&trial);
            if max_norm(&ft) < f0 || t < 1e-6 || converged_steps > 0 {
                x = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
        if !x.iter().all(|v| v.is_finite()) || max_norm(&x) > escape {
            return None;
        }
    }
    (max_norm(&f) <= residual_tolerance(&x, EQUILIBRIUM_TOL)).then_some(x)
}

pub fn find_equilibria(sys: &ReducedSystem, half_width: f64, grid: usize) -> Result<Vec<Vec<f64>>> {
    find_equilibria_with(sys, half_width, grid, Execution::default())
}

/// Newton from every point of a `grid^M` lattice on `[−w, w]^M`; converged
/// roots inside the box are deduplicated and sorted lexicographically.
pub fn find_equilibria_with(
    sys: &ReducedSystem,
    half_width: f64,
    grid: usize,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    if !(half_width > 0.0) || grid < 3 {
        return Err(Error::InvalidArgument(
            "search box must be positive and the grid at least 3 per axis".into(),
        ));
    }
    let m = sys.dim();
    let total = grid.pow(m as u32);
    let starts: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            (0..m)
                .map(|_| {
                    let k = idx % grid;
                    idx /= grid;
                    -half_width + 2.0 * half_width * k as f64 / (grid - 1) as f64
                })
                .collect()
        })
        .collect();
    let roots = exec.map(&starts, |s| newton(sys, s, 100.0 * half_width));
    let mut found: Vec<Vec<f64>> = Vec::new();
    for r in roots.into_iter().flatten() {
        if max_norm(&r) > half_width * (1.0 + 1e-9) {
            continue;
        }
        let dup = found.iter().any(|f| {
            let d = f.iter().zip(&r).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            d <= DEDUP_TOL * max_norm(f).max(1.0)
        });
        if !dup {
            found.push(r);
        }
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

/// Jacobian eigenvalues at an equilibrium, sorted by real then imaginary part.
pub fn eigenvalues_at(sys: &ReducedSystem, point: &[f64]) -> Result<Vec<Complex64>> {
    let res = max_norm(&sys.rhs(point));
    if res > residual_tolerance(point, 1e-8) {
        return Err(Error::NotEquilibrium(res));
    }
    let mut ev: Vec<Complex64> = sys.jacobian(point).complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// The nonzero equilibrium `V₁ = −V₂ = 12/(2 − 3θ)` of the two-point
/// mixture reduction; `None` at `θ = 2/3`, where it has gone to infinity.
pub fn mixture_m2_unstable_point(theta: f64) -> Option<[f64; 2]> {
    let d = 2.0 - 3.0 * theta;
    (d.abs() > 1e-12).then(|| [12.0 / d, -12.0 / d])
}

/// `2/(2 − 3θ) ± |4 − 9θ|/|2 − 3θ|`, ascending.
pub fn mixture_m2_unstable_eigenvalues(theta: f64) -> Option<[f64; 2]> {
    let d = 2.0 - 3.0 * theta;
    if d.abs() <= 1e-12 {
        return None;
    }
    let c = 2.0 / d;
    let r = (4.0 - 9.0 * theta).abs() / d.abs();
    Some([c - r, c + r])
}

pub const THETA_CRITICAL: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureM3Analysis {
    pub theta: f64,
    /// `(c₄, c₂, c₀)` in `μ(c₄μ⁴ + c₂μ² + c₀) = 0`.
    pub quartic: [f64; 3],
    /// Real nonzero roots `μ`, ascending.
    pub mu_roots: Vec<f64>,
    /// Finite critical points `(V₁, V₂, V₃)`, one per root not sent to infinity.
    pub critical_points: Vec<[f64; 3]>,
    /// Roots at which a denominator of the critical-point map vanishes.
    pub roots_at_infinity: Vec<f64>,
    pub unstable_count: usize,
}

pub fn mixture_m3_analysis(theta: f64) -> Result<MixtureM3Analysis> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta must lie in [0, 1], got {theta}")));
    }
    let t = theta;
    let c4 = t * (1.0 - t) * (t * t - 3.0 * t + 1.0);
    let c2 = 16.0 * (2.0 * t * t - 4.0 * t + 1.0);
    let c0 = -256.0;
    // roots in y = μ²
    let ys: Vec<f64> = if c4.abs() < 1e-14 {
        if c2 == 0.0 {
            vec![]
        } else {
            vec![-c0 / c2]
        }
    } else {
        let disc = c2 * c2 - 4.0 * c4 * c0;
        if disc < 0.0 {
            vec![]
        } else {
            // cancellation-free pair
            let sgn = if c2 >= 0.0 { 1.0 } else { -1.0 };
            let qv = -0.5 * (c2 + sgn * disc.sqrt());
            vec![qv / c4, c0 / qv]
        }
    };
    let mut mu_roots: Vec<f64> = ys
        .into_iter()
        .filter(|y| *y > 0.0)
        .flat_map(|y| [-y.sqrt(), y.sqrt()])
        .collect();
    mu_roots.sort_by(f64::total_cmp);
    mu_roots.dedup();
    let mut critical_points = Vec::new();
    let mut roots_at_infinity = Vec::new();
    for &mu in &mu_roots {
        let d1 = 8.0 + 2.0 * mu * (1.0 - t);
        let d3 = 8.0 - 2.0 * mu * (1.0 - t);
        if d1.abs() < 1e-9 || d3.abs() < 1e-9 {
            roots_at_infinity.push(mu);
            continue;
        }
        critical_points.push([mu * (4.0 - mu * t) / d1, mu, mu * (4.0 + mu * t) / d3]);
    }
    Ok(MixtureM3Analysis {
        theta,
        quartic: [c4, c2, c0],
        unstable_count: critical_points.len(),
        mu_roots,
        critical_points,
        roots_at_infinity,
    })
}
