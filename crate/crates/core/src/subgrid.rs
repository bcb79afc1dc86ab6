//! Subgrid fields `u(x, U)` reconstructed from grid values.
//!
//! Element `e` spans `[X_e, X_{e+1}]` with local coordinate
//! `ξ = (x − X_e)/H ∈ [0, 1]`, so its left value is `U_e` and its right value
//! `U_{e+1 mod N}`. The interpolation operators take the conventional
//! right-endpoint index: `I(ξ)V` on element `j` combines `V_j` with `V_{j−1}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_ops::{wrap, GridField};
use crate::models::{ModelKind, ModelSpec};

/// Monomial coefficients `[a, b, c, d]` of `aξ³ + bξ² + cξ + d`.
pub type Cubic = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgridField {
    elements: Vec<Cubic>,
    spacing: f64,
    origin: f64,
}

impl SubgridField {
    pub fn new(elements: Vec<Cubic>, spacing: f64, origin: f64) -> Self {
        Self {
            elements,
            spacing,
            origin,
        }
    }

    pub fn elements(&self) -> &[Cubic] {
        &self.elements
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn period(&self) -> f64 {
        self.spacing * self.elements.len() as f64
    }

    /// Element index and local coordinate for `x`, wrapped into one period.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.elements.len();
        let s = (x - self.origin).rem_euclid(self.period()) / self.spacing;
        let e = (s.floor() as usize).min(n - 1);
        (e, (s - e as f64).clamp(0.0, 1.0))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (e, xi) = self.locate(x);
        self.value(e, xi)
    }

    pub fn value(&self, e: usize, xi: f64) -> f64 {
        let [a, b, c, d] = self.elements[e];
        ((a * xi + b) * xi + c) * xi + d
    }

    /// `du/dx` on element `e` at local coordinate `xi`.
    pub fn slope(&self, e: usize, xi: f64) -> f64 {
        let [a, b, c, _] = self.elements[e];
        ((3.0 * a * xi + 2.0 * b) * xi + c) / self.spacing
    }

    /// `(x, u(x))` at `points` equally spaced samples over one period,
    /// including both end points.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        let last = points.saturating_sub(1).max(1) as f64;
        (0..points)
            .map(|i| {
                let x = self.origin + self.period() * i as f64 / last;
                let value = if i + 1 == points && points > 1 {
                    let n = self.elements.len();
                    self.value(n - 1, 1.0)
                } else {
                    self.eval(x)
                };
                (x, value)
            })
            .collect()
    }

    fn zip_add(&self, other: &Self) -> Self {
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(p, q)| [p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]])
            .collect();
        Self::new(elements, self.spacing, self.origin)
    }
}

/// `u⁰_j(ξ) = (1−ξ)U_{j−1} + ξU_j`.
pub fn piecewise_linear(u: &GridField) -> SubgridField {
    let n = u.len();
    let elements = (0..n)
        .map(|e| {
            let (l, r) = (u.values()[e], u.values()[(e + 1) % n]);
            [0.0, 0.0, r - l, l]
        })
        .collect();
    SubgridField::new(elements, u.spacing(), 0.0)
}

/// `I₀(ξ)V = ξV_j + (1−ξ)V_{j−1}`.
pub fn apply_i0(v: &GridField, xi: f64, j: i64) -> f64 {
    xi * v.at(j) + (1.0 - xi) * v.at(j - 1)
}

/// `I₁(ξ)V = ξ³V_j + (1−ξ)³V_{j−1} − ξ(V_j − V_{j−1}) − V_{j−1}`.
pub fn apply_i1(v: &GridField, xi: f64, j: i64) -> f64 {
    let (r, l) = (v.at(j), v.at(j - 1));
    xi.powi(3) * r + (1.0 - xi).powi(3) * l - xi * (r - l) - l
}

/// Monomial coefficients of `I₁(ξ)` acting on left/right values `(l, r)`.
fn i1_cubic(l: f64, r: f64) -> Cubic {
    [r - l, 3.0 * l, -(r + 2.0 * l), 0.0]
}

/// First-order holistic field `u⁰ + u¹` with
/// `ν u¹ = (H²/6) I₁ g¹ + (αH/6) (I₁U)(∇U)`, where `g¹` is the first-order
/// holistic closure.
pub fn holistic_field(u: &GridField, spec: &ModelSpec) -> Result<SubgridField> {
    if spec.kind != ModelKind::Holistic1 {
        return Err(Error::InvalidModel(format!(
            "holistic_field needs the first-order holistic model, got {}",
            spec.id()
        )));
    }
    let h = u.spacing();
    let g1 = spec.rhs(u);
    let n = u.len();
    let correction = (0..n)
        .map(|e| {
            let next = (e + 1) % n;
            let gc = i1_cubic(g1.values()[e], g1.values()[next]);
            let (l, r) = (u.values()[e], u.values()[next]);
            let uc = i1_cubic(l, r);
            let w_g = h * h / (6.0 * spec.nu);
            let w_u = spec.alpha * h * (r - l) / (6.0 * spec.nu);
            std::array::from_fn(|k| w_g * gc[k] + w_u * uc[k])
        })
        .collect();
    Ok(piecewise_linear(u).zip_add(&SubgridField::new(correction, h, 0.0)))
}

/// The C² periodic cubic spline through `(X_j, U_j)`.
///
/// Built in the textbook parametrisation
/// `s_j = a H³ξ³/6 + b H²ξ²/2 + c Hξ + d` with `d` the left value and `b` the
/// second derivative at the left end, where `b` solves the dense periodic
/// system `b_{j−1} + 4b_j + b_{j+1} = 6 δ²U_j / H²` by LU factorisation.
pub fn natural_periodic_spline(u: &GridField) -> SubgridField {
    let n = u.len();
    let h = u.spacing();
    let y = u.values();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for j in 0..n {
        let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
        m[(j, j)] += 4.0;
        m[(j, jm)] += 1.0;
        m[(j, jp)] += 1.0;
        rhs[j] = 6.0 * (y[jp] - 2.0 * y[j] + y[jm]) / (h * h);
    }
    let b = m.lu().solve(&rhs).expect("spline system is diagonally dominant");
    let elements = (0..n)
        .map(|j| {
            let jp = (j + 1) % n;
            let a = (b[jp] - b[j]) / h;
            let c = (y[jp] - y[j]) / h - h * (2.0 * b[j] + b[jp]) / 6.0;
            [a * h.powi(3) / 6.0, b[j] * h * h / 2.0, c * h, y[j]]
        })
        .collect();
    SubgridField::new(elements, h, 0.0)
}

/// Residual of the derivative-jump coupling at every node,
/// `r_j = ν[u_x]_j − (C/H) ν (u(X_{j+1}⁻) − u(X_j⁺) + u(X_{j−1}⁺) − u(X_j⁻))`
/// with `C(γ) = 1 − γ`. Only defined for the linear problem (`α = 0`).
pub fn jump_check(field: &SubgridField, spec: &ModelSpec) -> Result<Vec<f64>> {
    if spec.alpha != 0.0 {
        return Err(Error::InvalidArgument(
            "jump_check is defined for alpha = 0 only".into(),
        ));
    }
    let n = field.elements.len();
    let h = field.spacing;
    let coupling = 1.0 - spec.gamma;
    Ok((0..n)
        .map(|j| {
            let before = wrap(j as i64 - 1, n);
            let jump = field.slope(j, 0.0) - field.slope(before, 1.0);
            let stencil = field.value(j, 1.0) - field.value(j, 0.0) + field.value(before, 0.0)
                - field.value(before, 1.0);
            spec.nu * jump - coupling / h * spec.nu * stencil
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_grid(n: usize, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField::new(
            (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            2.0 * PI / n as f64,
        )
        .unwrap()
    }

    #[test]
    fn linear_field_through_fig1_data() {
        let u = GridField::new(vec![0.0, 1.0, -1.0], 2.0 * PI / 3.0).unwrap();
        let f = piecewise_linear(&u);
        let h = u.spacing();
        assert!((f.eval(0.5 * h) - 0.5).abs() < 1e-15);
        assert!((f.eval(1.5 * h) - 0.0).abs() < 1e-15);
        assert!((f.eval(2.5 * h) + 0.5).abs() < 1e-15);
        for j in 0..3 {
            assert!((f.eval(j as f64 * h) - u.values()[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_data_gives_constant_fields() {
        let u = GridField::new(vec![1.25; 6], 0.3).unwrap();
        let spec = ModelSpec::holistic1(1.0, 1.0, 0.7).unwrap();
        for f in [
            piecewise_linear(&u),
            natural_periodic_spline(&u),
            holistic_field(&u, &spec).unwrap(),
        ] {
            for i in 0..50 {
                assert!((f.eval(i as f64 * 0.037) - 1.25).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn interpolation_operator_endpoints() {
        let v = random_grid(5, 7);
        for j in 0..5 {
            assert_eq!(apply_i0(&v, 0.0, j), v.at(j - 1));
            assert_eq!(apply_i0(&v, 1.0, j), v.at(j));
            assert!(apply_i1(&v, 0.0, j).abs() < 1e-15);
            assert!(apply_i1(&v, 1.0, j).abs() < 1e-15);
        }
    }

    #[test]
    fn i1_second_derivative_is_six_i0() {
        let v = random_grid(6, 8);
        let h = 1e-4;
        for j in 0..6 {
            for &xi in &[0.1, 0.33, 0.5, 0.9] {
                // I₁ is cubic in ξ, so the central second difference is exact
                // up to rounding.
                let d2 = (apply_i1(&v, xi + h, j) - 2.0 * apply_i1(&v, xi, j)
                    + apply_i1(&v, xi - h, j))
                    / (h * h);
                assert!((d2 - 6.0 * apply_i0(&v, xi, j)).abs() < 1e-6);
                let [a, b, _, _] = i1_cubic(v.at(j - 1), v.at(j));
                let exact = 6.0 * a * xi + 2.0 * b;
                assert!((exact - 6.0 * apply_i0(&v, xi, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn holistic_field_interpolates_and_is_continuous() {
        let u = random_grid(7, 9);
        let f = holistic_field(&u, &ModelSpec::holistic1(0.6, 1.3, 0.9).unwrap()).unwrap();
        let n = u.len();
        for e in 0..n {
            assert!((f.value(e, 0.0) - u.values()[e]).abs() < 1e-13);
            assert!((f.value(e, 1.0) - f.value((e + 1) % n, 0.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn uncoupled_linear_problem_keeps_linear_field() {
        let u = random_grid(5, 10);
        let f = holistic_field(&u, &ModelSpec::holistic1(0.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(f, piecewise_linear(&u));
    }

    #[test]
    fn holistic_field_is_the_spline_on_fig1_data() {
        let u = GridField::new(vec![0.0, 1.0, -1.0], 2.0 * PI / 3.0).unwrap();
        let f = holistic_field(&u, &ModelSpec::holistic1(1.0, 1.0, 0.0).unwrap()).unwrap();
        let s = natural_periodic_spline(&u);
        for i in 0..=100 {
            let x = 2.0 * PI * i as f64 / 100.0;
            assert!((f.eval(x) - s.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn spline_is_c2() {
        let u = random_grid(8, 11);
        let s = natural_periodic_spline(&u);
        let n = 8;
        for e in 0..n {
            let next = (e + 1) % n;
            assert!((s.value(e, 1.0) - s.value(next, 0.0)).abs() < 1e-12);
            assert!((s.slope(e, 1.0) - s.slope(next, 0.0)).abs() < 1e-12);
            let [a, b, ..] = s.elements()[e];
            let [_, b2, ..] = s.elements()[next];
            assert!((6.0 * a + 2.0 * b - 2.0 * b2).abs() < 1e-11);
        }
    }

    #[test]
    fn jump_residuals() {
        let u = random_grid(6, 12);
        let lin = piecewise_linear(&u);
        let spec0 = ModelSpec::holistic1(0.0, 1.0, 0.0).unwrap();
        assert!(jump_check(&lin, &spec0).unwrap().iter().all(|r| r.abs() < 1e-13));

        let spec1 = ModelSpec::holistic1(1.0, 0.8, 0.0).unwrap();
        let f = holistic_field(&u, &spec1).unwrap();
        assert!(jump_check(&f, &spec1).unwrap().iter().all(|r| r.abs() < 1e-12));

        for gamma in [0.3, 0.7, 1e-2, 1e-3] {
            let spec = ModelSpec::holistic1(gamma, 0.8, 0.0).unwrap();
            let f = holistic_field(&u, &spec).unwrap();
            for r in jump_check(&f, &spec).unwrap() {
                assert!(r.abs() / (gamma * gamma) < 1.0, "gamma {gamma}: {r}");
            }
        }

        let nonlinear = ModelSpec::holistic1(1.0, 1.0, 0.5).unwrap();
        assert!(jump_check(&f, &nonlinear).is_err());
    }

    #[test]
    fn sampling_covers_the_period() {
        let u = random_grid(4, 13);
        let samples = natural_periodic_spline(&u).sample(9);
        assert_eq!(samples.len(), 9);
        assert!((samples[8].0 - 2.0 * PI).abs() < 1e-14);
        assert!((samples[8].1 - u.values()[0]).abs() < 1e-12);
    }
}
