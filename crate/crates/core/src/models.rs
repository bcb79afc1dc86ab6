//! Discrete closures `dU/dt = g(U)` for Burgers' equation
//! `u_t = ν u_xx − α u u_x` on a periodic grid.
//!
//! * mixture-θ: centred differences blending the advective `U μδU` and
//!   conservative `μδ(U²)/2` forms;
//! * first-order holistic: `S[νγ δ²U/H² − α U μδU/(3H) − α μδ(U²)/(3H)]`;
//! * second-order holistic: the first-order closure plus the `γα` correction;
//! * holistic diffusion (`α = 0`) through third order in `γ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_ops::{apply_slice, solve_s_in_place, GridField, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Mixture { theta: f64 },
    Holistic1,
    Holistic2,
    DiffusionHolistic { order: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    /// Coupling homotopy parameter; 1 is full coupling. Unused by the mixture model.
    pub gamma: f64,
    pub nu: f64,
    pub alpha: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, gamma: f64, nu: f64, alpha: f64) -> Result<Self> {
        let spec = Self {
            kind,
            gamma,
            nu,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mixture(theta: f64, nu: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Mixture { theta }, 1.0, nu, alpha)
    }

    pub fn holistic1(gamma: f64, nu: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Holistic1, gamma, nu, alpha)
    }

    pub fn holistic2(gamma: f64, nu: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Holistic2, gamma, nu, alpha)
    }

    pub fn diffusion(order: u8, gamma: f64, nu: f64) -> Result<Self> {
        Self::new(ModelKind::DiffusionHolistic { order }, gamma, nu, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidModel(m.to_string()));
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return bad("viscosity nu must be positive");
        }
        if !self.gamma.is_finite() || !self.alpha.is_finite() {
            return bad("gamma and alpha must be finite");
        }
        match self.kind {
            ModelKind::Mixture { theta } if !(0.0..=1.0).contains(&theta) => {
                bad("theta must lie in [0, 1]")
            }
            ModelKind::DiffusionHolistic { order } if !(1..=3).contains(&order) => {
                bad("diffusion order must be 1, 2 or 3")
            }
            ModelKind::DiffusionHolistic { .. } if self.alpha != 0.0 => {
                bad("the holistic diffusion family requires alpha = 0")
            }
            _ => Ok(()),
        }
    }

    /// Short stable identifier used in CSV output.
    pub fn id(&self) -> String {
        match self.kind {
            ModelKind::Mixture { theta } => format!("mixture:{theta}"),
            ModelKind::Holistic1 => "holistic1".into(),
            ModelKind::Holistic2 => "holistic2".into(),
            ModelKind::DiffusionHolistic { order } => format!("diffusion{order}"),
        }
    }

    /// Evaluates the closure into `out`; `h` is the grid spacing.
    pub fn rhs_into(&self, u: &[f64], h: f64, out: &mut [f64]) {
        match self.kind {
            ModelKind::Mixture { theta } => mixture_into(u, h, theta, self.nu, self.alpha, out),
            ModelKind::Holistic1 => {
                holistic1_bracket_into(u, h, self, out);
                solve_s_in_place(out);
            }
            ModelKind::Holistic2 => holistic2_into(u, h, self, out),
            ModelKind::DiffusionHolistic { order } => {
                diffusion_into(u, h, order, self.gamma, self.nu, out)
            }
        }
    }

    pub fn rhs(&self, u: &GridField) -> GridField {
        let mut out = vec![0.0; u.len()];
        self.rhs_into(u.values(), u.spacing(), &mut out);
        u.with_values(out)
    }
}

fn expect_kind(spec: &ModelSpec, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{what} called with model {}",
            spec.id()
        )))
    }
}

pub fn mixture_rhs(u: &GridField, spec: &ModelSpec) -> Result<GridField> {
    expect_kind(spec, matches!(spec.kind, ModelKind::Mixture { .. }), "mixture_rhs")?;
    Ok(spec.rhs(u))
}

pub fn holistic1_rhs(u: &GridField, spec: &ModelSpec) -> Result<GridField> {
    expect_kind(spec, spec.kind == ModelKind::Holistic1, "holistic1_rhs")?;
    Ok(spec.rhs(u))
}

pub fn holistic2_rhs(u: &GridField, spec: &ModelSpec) -> Result<GridField> {
    expect_kind(spec, spec.kind == ModelKind::Holistic2, "holistic2_rhs")?;
    Ok(spec.rhs(u))
}

pub fn diffusion_holistic_rhs(u: &GridField, spec: &ModelSpec) -> Result<GridField> {
    expect_kind(
        spec,
        matches!(spec.kind, ModelKind::DiffusionHolistic { .. }),
        "diffusion_holistic_rhs",
    )?;
    spec.validate()?;
    Ok(spec.rhs(u))
}

/// The first-order holistic closure before `S` is applied. With `γ = 1` this
/// is algebraically the mixture closure at `θ = 2/3`.
pub fn holistic1_bracket(u: &GridField, spec: &ModelSpec) -> GridField {
    let mut out = vec![0.0; u.len()];
    holistic1_bracket_into(u.values(), u.spacing(), spec, &mut out);
    u.with_values(out)
}

/// Zeroes every entry whose index is not in `interior`.
pub fn dirichlet_mask(rhs: &GridField, interior: &[usize]) -> GridField {
    let mut out = vec![0.0; rhs.len()];
    for &j in interior {
        if j < out.len() {
            out[j] = rhs.values()[j];
        }
    }
    rhs.with_values(out)
}

/// `(RU)_j = −U_{−j mod N}`; Burgers' equation is equivariant under `R`.
pub fn reflect_negate(u: &GridField) -> GridField {
    let n = u.len();
    u.with_values((0..n).map(|j| -u.values()[(n - j) % n]).collect())
}

fn op(o: Operator, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    apply_slice(o, v, &mut out);
    out
}

fn s_pow(mut v: Vec<f64>, k: usize) -> Vec<f64> {
    for _ in 0..k {
        solve_s_in_place(&mut v);
    }
    v
}

fn times(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn squares(u: &[f64]) -> Vec<f64> {
    u.iter().map(|x| x * x).collect()
}

fn mixture_into(u: &[f64], h: f64, theta: f64, nu: f64, alpha: f64, out: &mut [f64]) {
    let n = u.len();
    for j in 0..n {
        let (um, up) = (u[(j + n - 1) % n], u[(j + 1) % n]);
        let mu_delta = 0.5 * (up - um);
        let mu_delta_sq = 0.5 * (up * up - um * um);
        out[j] = -(1.0 - theta) * alpha * u[j] * mu_delta / h
            - theta * alpha * mu_delta_sq / (2.0 * h)
            + nu * (up - 2.0 * u[j] + um) / (h * h);
    }
}

pub(crate) fn holistic1_bracket_into(u: &[f64], h: f64, spec: &ModelSpec, out: &mut [f64]) {
    let n = u.len();
    let (nu, gamma, alpha) = (spec.nu, spec.gamma, spec.alpha);
    for j in 0..n {
        let (um, up) = (u[(j + n - 1) % n], u[(j + 1) % n]);
        let mu_delta = 0.5 * (up - um);
        let mu_delta_sq = 0.5 * (up * up - um * um);
        out[j] = nu * gamma * (up - 2.0 * u[j] + um) / (h * h)
            - alpha * (u[j] * mu_delta + mu_delta_sq) / (3.0 * h);
    }
}

fn holistic2_into(u: &[f64], h: f64, spec: &ModelSpec, out: &mut [f64]) {
    holistic1_bracket_into(u, h, spec, out);
    solve_s_in_place(out);
    let ga = spec.gamma * spec.alpha;
    if ga == 0.0 {
        return;
    }
    for (o, c) in out.iter_mut().zip(gamma_alpha_bracket(u)) {
        *o += ga * c / h;
    }
}

/// The ten-term `γα` correction, without the `γα/H` prefactor.
pub(crate) fn gamma_alpha_bracket(u: &[f64]) -> Vec<f64> {
    let md = op(Operator::MuDelta, u);
    let s_md = s_pow(md.clone(), 1);
    let su = s_pow(u.to_vec(), 1);
    let md_sq = op(Operator::MuDelta, &squares(u));

    let u_smd = times(u, &s_md);
    let u_md = times(u, &md);
    let su_md = times(&su, &md);

    let terms: [(f64, Vec<f64>); 10] = [
        (-1.0 / 10.0, s_pow(u_smd.clone(), 1)),
        (-1.0 / 6.0, s_pow(u_md.clone(), 1)),
        (1.0 / 10.0, s_pow(su_md, 1)),
        (-1.0 / 5.0, s_pow(u_smd.clone(), 2)),
        (13.0 / 30.0, s_pow(u_md.clone(), 2)),
        (-1.0 / 15.0, s_pow(u_md, 3)),
        (-1.0 / 15.0, s_pow(md_sq.clone(), 3)),
        (7.0 / 30.0, s_pow(md_sq.clone(), 2)),
        (2.0 / 5.0, u_smd),
        (-11.0 / 30.0, s_pow(md_sq, 1)),
    ];
    let mut acc = vec![0.0; u.len()];
    for (c, t) in terms.iter() {
        for (a, x) in acc.iter_mut().zip(t) {
            *a += c * x;
        }
    }
    acc
}

fn diffusion_into(u: &[f64], h: f64, order: u8, gamma: f64, nu: f64, out: &mut [f64]) {
    let d2 = op(Operator::Delta2, u);
    let scale = nu / (h * h);
    let first = s_pow(d2.clone(), 1);
    for (o, v) in out.iter_mut().zip(&first) {
        *o = scale * gamma * v;
    }
    if order >= 2 {
        // (7 − 2S) S² δ⁴ U
        let d4 = op(Operator::Delta2, &d2);
        let s2 = s_pow(d4, 2);
        let s3 = s_pow(s2.clone(), 1);
        let c = scale * gamma * gamma / 60.0;
        for ((o, a), b) in out.iter_mut().zip(&s2).zip(&s3) {
            *o += c * (7.0 * a - 2.0 * b);
        }
    }
    if order >= 3 {
        // (94 − 73S + 14S²) S³ δ⁶ U
        let d6 = op(Operator::Delta2, &op(Operator::Delta2, &d2));
        let s3 = s_pow(d6, 3);
        let s4 = s_pow(s3.clone(), 1);
        let s5 = s_pow(s4.clone(), 1);
        let c = scale * gamma.powi(3) / 6300.0;
        for (j, o) in out.iter_mut().enumerate() {
            *o += c * (94.0 * s3[j] - 73.0 * s4[j] + 14.0 * s5[j]);
        }
    }
}

/// First-order holistic diffusion decay rate `λ̄ = H²λ/ν` at `γ = 1`.
pub fn holistic1_diffusion_decay(kappa: f64) -> f64 {
    let c = kappa.cos();
    -6.0 * (1.0 - c) / (2.0 + c)
}
