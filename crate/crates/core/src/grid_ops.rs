//! Periodic finite-difference operators on a uniform grid.
//!
//! Every operator here is a polynomial (or the inverse of one) in the shift
//! `σ U_j = U_{j+1}`, so each has a Fourier multiplier obtained by replacing
//! `σ` with `e^{iκ}`. Only integer-index composites are exposed: `δ²`, `μδ`
//! and the backward difference `∇`, together with the nonlocal operator
//! `S = (1 + δ²/6)⁻¹`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid values `U_j`, `j = 0..N-1`, on a periodic grid with spacing `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    values: Vec<f64>,
    spacing: f64,
}

impl GridField {
    pub fn new(values: Vec<f64>, spacing: f64) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::GridTooSmall(values.len()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::BadSpacing(spacing));
        }
        Ok(Self { values, spacing })
    }

    /// Samples `f(X_j)` at `X_j = j H`.
    pub fn from_fn(n: usize, spacing: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|j| f(j as f64 * spacing)).collect(), spacing)
    }

    /// Same grid, new values. Panics if the length differs.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len(), "grid length mismatch");
        Self {
            values,
            spacing: self.spacing,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Periodic length `L = N H`.
    pub fn period(&self) -> f64 {
        self.spacing * self.values.len() as f64
    }

    /// Periodic indexing: any integer index is reduced modulo `N`.
    pub fn at(&self, j: i64) -> f64 {
        self.values[wrap(j, self.values.len())]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub(crate) fn wrap(j: i64, n: usize) -> usize {
    j.rem_euclid(n as i64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    /// `σ^k`; `Shift(0)` is the identity.
    Shift(i64),
    /// `δ² = σ - 2 + σ⁻¹`
    Delta2,
    /// `μδ = (σ - σ⁻¹)/2`
    MuDelta,
    /// `∇ = 1 - σ⁻¹`
    Nabla,
    /// `S = (1 + δ²/6)⁻¹`
    S,
    /// `S⁻¹ = 1 + δ²/6`
    SInverse,
}

pub fn apply(op: Operator, f: &GridField) -> GridField {
    let mut out = vec![0.0; f.len()];
    apply_slice(op, f.values(), &mut out);
    f.with_values(out)
}

/// Slice form of [`apply`]; `src.len()` must be at least 3 and equal `dst.len()`.
pub fn apply_slice(op: Operator, src: &[f64], dst: &mut [f64]) {
    let n = src.len();
    assert!(n >= 3, "periodic operators need N >= 3");
    assert_eq!(n, dst.len());
    let prev = |j: usize| src[if j == 0 { n - 1 } else { j - 1 }];
    let next = |j: usize| src[if j + 1 == n { 0 } else { j + 1 }];
    match op {
        Operator::Shift(k) => {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = src[wrap(j as i64 + k, n)];
            }
        }
        Operator::Delta2 => {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = next(j) - 2.0 * src[j] + prev(j);
            }
        }
        Operator::MuDelta => {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = 0.5 * (next(j) - prev(j));
            }
        }
        Operator::Nabla => {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = src[j] - prev(j);
            }
        }
        Operator::SInverse => {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = (2.0 * src[j] + 0.5 * (next(j) + prev(j))) / 3.0;
            }
        }
        Operator::S => {
            dst.copy_from_slice(src);
            solve_s_in_place(dst);
        }
    }
}

/// Applies `S` in place: overwrites `rhs` with the `g` satisfying
/// `g_j + (g_{j+1} - 2 g_j + g_{j-1})/6 = rhs_j`.
pub fn solve_s_in_place(rhs: &mut [f64]) {
    cyclic_tridiagonal_constant(1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, rhs);
}

/// Solves the periodic constant-coefficient tridiagonal system
/// `lower x_{j-1} + diag x_j + upper x_{j+1} = r_j` in place.
///
/// The corner entries make the matrix cyclic; they are removed with a
/// Sherman-Morrison rank-one correction so the work is two Thomas sweeps.
/// Requires strict diagonal dominance (`|diag| > |lower| + |upper|`).
pub fn cyclic_tridiagonal_constant(lower: f64, diag: f64, upper: f64, r: &mut [f64]) {
    let n = r.len();
    assert!(n >= 3);
    debug_assert!(diag.abs() > lower.abs() + upper.abs());
    // A = T + u vᵀ with u = (γ, 0, .., 0, upper) and v = (1, 0, .., 0, lower/γ);
    // T is A with its corners removed and the first/last diagonal adjusted.
    let gamma = -diag;
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = upper;

    let mut cp = vec![0.0; n];
    let d0 = diag - gamma;
    cp[0] = upper / d0;
    r[0] /= d0;
    z[0] /= d0;
    for j in 1..n {
        let dj = if j == n - 1 {
            diag - lower * upper / gamma
        } else {
            diag
        };
        let denom = dj - lower * cp[j - 1];
        cp[j] = upper / denom;
        r[j] = (r[j] - lower * r[j - 1]) / denom;
        z[j] = (z[j] - lower * z[j - 1]) / denom;
    }
    for j in (0..n - 1).rev() {
        r[j] -= cp[j] * r[j + 1];
        z[j] -= cp[j] * z[j + 1];
    }
    let factor = (r[0] + lower / gamma * r[n - 1]) / (1.0 + z[0] + lower / gamma * z[n - 1]);
    for (x, zj) in r.iter_mut().zip(&z) {
        *x -= factor * zj;
    }
}

/// Fourier multiplier of `op` at nondimensional wavenumber `kappa`.
pub fn symbol(op: Operator, kappa: f64) -> Complex64 {
    let c = kappa.cos();
    match op {
        Operator::Shift(k) => Complex64::from_polar(1.0, k as f64 * kappa),
        Operator::Delta2 => Complex64::new(2.0 * c - 2.0, 0.0),
        Operator::MuDelta => Complex64::new(0.0, kappa.sin()),
        Operator::Nabla => Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -kappa),
        Operator::S => Complex64::new(6.0 / (4.0 + 2.0 * c), 0.0),
        Operator::SInverse => Complex64::new((4.0 + 2.0 * c) / 6.0, 0.0),
    }
}

/// Dense `N × N` matrix of a linear map on periodic grids of size `n`,
/// built column by column from unit vectors. Row-major.
pub fn matrix_of(n: usize, map: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    let mut e = vec![0.0; n];
    for k in 0..n {
        e[k] = 1.0;
        let col = map(&e);
        for (row, v) in m.iter_mut().zip(col) {
            row[k] = v;
        }
        e[k] = 0.0;
    }
    m
}
