//! Slow manifold of Burgers' equation `u_t = u_xx − a u u_x` on `[−1, 1]`
//! split into the two elements `[−1, 0]` and `[0, 1]`.
//!
//! The advection strength `a` is either `γα` (the default, so the subspace of
//! linear equilibria at `γ = 0` persists for every `α`) or plain `α`.
//!
//! Ends are held at zero, the grid value is `U = u(0)`, and the elements are
//! coupled by `[u] = 0`, `[u_x] + 2(1 − γ) u = 0` at `x = 0`. The field and
//! evolution are expanded as
//!
//! ```text
//! u = Σ γ^p α^q u_pq(x, U),   U̇ = Σ γ^p α^q g_pq(U),
//! ```
//!
//! with every coefficient polynomial in `U` and piecewise polynomial in `x`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::algebra::{q, q_to_f64, q_to_string, QPoly, Rational};
use crate::error::{Error, Result};

pub const MAX_GAMMA_ORDER: usize = 7;
pub const MAX_ALPHA_ORDER: usize = 2;

/// A function of `x` given by one polynomial on `[−1, 0]` and another on
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pub left: QPoly,
    pub right: QPoly,
}

impl Piecewise {
    pub fn zero() -> Self {
        Self {
            left: QPoly::zero(),
            right: QPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }

    /// `1 − |x|`
    pub fn hat() -> Self {
        Self {
            left: QPoly::from_ints(&[1, 1]),
            right: QPoly::from_ints(&[1, -1]),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.left.eval_f64(x)
        } else {
            self.right.eval_f64(x)
        }
    }

    fn map(&self, f: impl Fn(&QPoly) -> QPoly) -> Self {
        Self {
            left: f(&self.left),
            right: f(&self.right),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&QPoly, &QPoly) -> QPoly) -> Self {
        Self {
            left: f(&self.left, &o.left),
            right: f(&self.right, &o.right),
        }
    }

    pub fn derivative(&self) -> Self {
        self.map(QPoly::derivative)
    }

    fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    /// `u_x(0⁺) − u_x(0⁻)`
    pub fn derivative_jump(&self) -> Rational {
        let d = self.derivative();
        d.right.coeff(0) - d.left.coeff(0)
    }

    fn at(&self, x: i64) -> Rational {
        let p = if x < 0 { &self.left } else { &self.right };
        p.eval(&q(x, 1))
    }
}

/// `Σ_m U^m f_m(x)`, stored as `f_m` indexed by `m`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UField {
    terms: Vec<Piecewise>,
}

impl UField {
    fn trimmed(mut terms: Vec<Piecewise>) -> Self {
        while terms.last().is_some_and(Piecewise::is_zero) {
            terms.pop();
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[Piecewise] {
        &self.terms
    }

    pub fn term(&self, m: usize) -> Piecewise {
        self.terms.get(m).cloned().unwrap_or_else(Piecewise::zero)
    }

    pub fn eval(&self, u: f64, x: f64) -> f64 {
        self.terms
            .iter()
            .rev()
            .fold(0.0, |acc, t| acc * u + t.eval(x))
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.terms.len().max(o.terms.len());
        Self::trimmed(
            (0..n)
                .map(|m| self.term(m).zip(&o.term(m), |a, b| a + b))
                .collect(),
        )
    }

    fn d_du(&self) -> Self {
        Self::trimmed(
            self.terms
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, t)| t.scale(&q(m as i64, 1)))
                .collect(),
        )
    }

    fn d_dx(&self) -> Self {
        Self::trimmed(self.terms.iter().map(Piecewise::derivative).collect())
    }

    fn d2_dx2(&self) -> Self {
        self.d_dx().d_dx()
    }

    /// Product with a polynomial in `U`.
    fn times_u_poly(&self, g: &QPoly) -> Self {
        let mut out = vec![Piecewise::zero(); self.terms.len() + g.coeffs().len()];
        for (m, t) in self.terms.iter().enumerate() {
            for (k, c) in g.coeffs().iter().enumerate() {
                out[m + k] = out[m + k].zip(&t.scale(c), |a, b| a + b);
            }
        }
        Self::trimmed(out)
    }

    fn times(&self, o: &Self) -> Self {
        let mut out = vec![Piecewise::zero(); self.terms.len() + o.terms.len()];
        for (m, a) in self.terms.iter().enumerate() {
            for (k, b) in o.terms.iter().enumerate() {
                let prod = a.zip(b, |x, y| x * y);
                out[m + k] = out[m + k].zip(&prod, |x, y| x + y);
            }
        }
        Self::trimmed(out)
    }
}

type Order = (usize, usize);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Advection {
    /// `u_t = u_xx − γα u u_x`
    #[default]
    GammaAlpha,
    /// `u_t = u_xx − α u u_x`
    Alpha,
}

impl Advection {
    /// Powers of `γ` carried by the advection term.
    fn gamma_shift(self) -> usize {
        match self {
            Advection::GammaAlpha => 1,
            Advection::Alpha => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoElementSeries {
    advection: Advection,
    gamma_order: usize,
    alpha_order: usize,
    fields: BTreeMap<Order, UField>,
    rates: BTreeMap<Order, QPoly>,
}

/// Jump condition right-hand side, the `γ^p α^q` part of `−2(1 − γ) U`.
fn jump_target(order: Order) -> QPoly {
    match order {
        (0, 0) => QPoly::monomial(1, q(-2, 1)),
        (1, 0) => QPoly::monomial(1, q(2, 1)),
        _ => QPoly::zero(),
    }
}

/// `f'' = forcing` on each element with `f(−1) = f(0) = f(1) = 0`.
fn solve_elements(forcing: &Piecewise) -> Piecewise {
    let left = forcing.left.antiderivative().antiderivative();
    let right = forcing.right.antiderivative().antiderivative();
    let fl = left.eval(&q(-1, 1));
    let fr = right.eval(&q(1, 1));
    Piecewise {
        left: &left + &QPoly::monomial(1, fl),
        right: &right - &QPoly::monomial(1, fr),
    }
}

/// Everything at order `(p, q)` except the `(1 − |x|) g_pq` term:
/// `Σ ∂_U u_a g_b` over splits with `a ≠ 0`, `b ≠ (p, q)`, plus the
/// advection products from order `(p − s, q − 1)`, `s` the advection's `γ`
/// power.
fn known_terms(
    advection: Advection,
    order: Order,
    fields: &BTreeMap<Order, UField>,
    rates: &BTreeMap<Order, QPoly>,
) -> UField {
    let (p, qa) = order;
    let mut acc = UField::default();
    for (&(ap, aq), ua) in fields {
        if (ap, aq) == (0, 0) || ap > p || aq > qa {
            continue;
        }
        let b = (p - ap, qa - aq);
        if b == order {
            continue;
        }
        if let Some(gb) = rates.get(&b) {
            acc = acc.add(&ua.d_du().times_u_poly(gb));
        }
    }
    let shift = advection.gamma_shift();
    if qa > 0 && p >= shift {
        let p = p - shift;
        for (&(ap, aq), ua) in fields {
            if ap > p || aq > qa - 1 {
                continue;
            }
            if let Some(ub) = fields.get(&(p - ap, qa - 1 - aq)) {
                acc = acc.add(&ua.times(&ub.d_dx()));
            }
        }
    }
    acc
}

pub fn two_element_series(gamma_order: usize, alpha_order: usize) -> Result<TwoElementSeries> {
    two_element_series_with(gamma_order, alpha_order, Advection::default())
}

pub fn two_element_series_with(
    gamma_order: usize,
    alpha_order: usize,
    advection: Advection,
) -> Result<TwoElementSeries> {
    if gamma_order > MAX_GAMMA_ORDER || alpha_order > MAX_ALPHA_ORDER {
        return Err(Error::InvalidArgument(format!(
            "two-element orders must satisfy P <= {MAX_GAMMA_ORDER}, Q <= {MAX_ALPHA_ORDER}"
        )));
    }
    let a = solve_elements(&Piecewise::hat());
    let ja = a.derivative_jump();
    let mut fields = BTreeMap::new();
    let mut rates = BTreeMap::new();
    fields.insert(
        (0, 0),
        UField {
            terms: vec![Piecewise::zero(), Piecewise::hat()],
        },
    );
    rates.insert((0, 0), QPoly::zero());

    for total in 1..=gamma_order + alpha_order {
        for qa in 0..=alpha_order.min(total) {
            let p = total - qa;
            if p > gamma_order {
                continue;
            }
            let order = (p, qa);
            let known = known_terms(advection, order, &fields, &rates);
            let target = jump_target(order);
            let degree = known.terms.len().max(target.coeffs().len());
            let mut field = Vec::with_capacity(degree);
            let mut rate = Vec::with_capacity(degree);
            for m in 0..degree {
                let b = solve_elements(&known.term(m));
                let g = (target.coeff(m) - b.derivative_jump()) / &ja;
                field.push(a.scale(&g).zip(&b, |x, y| x + y));
                rate.push(g);
            }
            fields.insert(order, UField::trimmed(field));
            rates.insert(order, QPoly::new(rate));
        }
    }
    let series = TwoElementSeries {
        advection,
        gamma_order,
        alpha_order,
        fields,
        rates,
    };
    series.verify()?;
    Ok(series)
}

impl TwoElementSeries {
    pub fn advection(&self) -> Advection {
        self.advection
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_order
    }

    pub fn alpha_order(&self) -> usize {
        self.alpha_order
    }

    pub fn orders(&self) -> impl Iterator<Item = Order> + '_ {
        self.rates.keys().copied()
    }

    pub fn field(&self, p: usize, q: usize) -> Option<&UField> {
        self.fields.get(&(p, q))
    }

    /// `g_pq` as a polynomial in `U`.
    pub fn rate(&self, p: usize, q: usize) -> Option<&QPoly> {
        self.rates.get(&(p, q))
    }

    /// Coefficient of `γ^p α^q U^m` in `U̇`.
    pub fn rate_coefficient(&self, p: usize, q: usize, m: usize) -> Rational {
        self.rate(p, q)
            .map(|g| g.coeff(m))
            .unwrap_or_else(Rational::zero)
    }

    /// `γ^p` coefficients of the linear decay, `p = 1..=P`.
    pub fn linear_coefficients(&self) -> Vec<Rational> {
        (1..=self.gamma_order)
            .map(|p| self.rate_coefficient(p, 0, 1))
            .collect()
    }

    pub fn evolution(&self, gamma: f64, alpha: f64, u: f64) -> f64 {
        self.rates
            .iter()
            .map(|(&(p, qa), g)| gamma.powi(p as i32) * alpha.powi(qa as i32) * g.eval_f64(u))
            .sum()
    }

    pub fn field_value(&self, gamma: f64, alpha: f64, u: f64, x: f64) -> f64 {
        self.fields
            .iter()
            .map(|(&(p, qa), f)| gamma.powi(p as i32) * alpha.powi(qa as i32) * f.eval(u, x))
            .sum()
    }

    /// Exact residual check of the differential equation, end conditions,
    /// continuity and derivative-jump coupling at every computed order.
    pub fn verify(&self) -> Result<()> {
        for (&order, field) in &self.fields {
            let (p, qa) = order;
            let fail = |what: &str| Error::ResidualNonzero {
                order: p + qa,
                what: format!("{what} at γ^{p} α^{qa}"),
            };
            let rate = &self.rates[&order];
            let mut rhs = known_terms(self.advection, order, &self.fields, &self.rates);
            // ∂_U u_00 = 1 − |x|
            rhs = rhs.add(&UField {
                terms: vec![Piecewise::hat()],
            }
            .times_u_poly(rate));
            if field.d2_dx2() != rhs {
                return Err(fail("field equation"));
            }
            let target = jump_target(order);
            let n = field.terms.len().max(target.coeffs().len());
            for m in 0..n {
                let t = field.term(m);
                let centre = if order == (0, 0) && m == 1 { q(1, 1) } else { q(0, 1) };
                if !t.at(-1).is_zero() || !t.at(1).is_zero() {
                    return Err(fail("end values"));
                }
                if t.left.coeff(0) != centre || t.right.coeff(0) != centre {
                    return Err(fail("centre value"));
                }
                if t.derivative_jump() != target.coeff(m) {
                    return Err(fail("derivative jump"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PiecewiseJson {
    /// Ascending coefficients in `x` on `[−1, 0]`.
    pub left: Vec<String>,
    /// Ascending coefficients in `x` on `[0, 1]`.
    pub right: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoElementTermJson {
    pub gamma_power: usize,
    pub alpha_power: usize,
    /// Ascending coefficients in `U` of this term of `U̇`.
    pub rate: Vec<String>,
    pub rate_decimal: Vec<f64>,
    /// `field[m]` multiplies `U^m`.
    pub field: Vec<PiecewiseJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoElementSeriesJson {
    pub advection: Advection,
    pub gamma_order: usize,
    pub alpha_order: usize,
    pub terms: Vec<TwoElementTermJson>,
}

fn strings(p: &QPoly) -> Vec<String> {
    p.coeffs().iter().map(q_to_string).collect()
}

impl From<&TwoElementSeries> for TwoElementSeriesJson {
    fn from(s: &TwoElementSeries) -> Self {
        let terms = s
            .rates
            .iter()
            .map(|(&(p, qa), g)| TwoElementTermJson {
                gamma_power: p,
                alpha_power: qa,
                rate: strings(g),
                rate_decimal: g.coeffs().iter().map(q_to_f64).collect(),
                field: s.fields[&(p, qa)]
                    .terms
                    .iter()
                    .map(|t| PiecewiseJson {
                        left: strings(&t.left),
                        right: strings(&t.right),
                    })
                    .collect(),
            })
            .collect();
        Self {
            advection: s.advection,
            gamma_order: s.gamma_order,
            alpha_order: s.alpha_order,
            terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsupported_orders() {
        assert!(two_element_series(8, 0).is_err());
        assert!(two_element_series(2, 3).is_err());
    }

    #[test]
    fn first_order_decay_and_field() {
        let s = two_element_series(1, 0).unwrap();
        assert_eq!(s.rate_coefficient(1, 0, 1), q(-3, 1));
        let f = s.field(1, 0).unwrap().term(1);
        // |x| − (3/2)x² + (1/2)|x|³
        assert_eq!(f.right, QPoly::new(vec![q(0, 1), q(1, 1), q(-3, 2), q(1, 2)]));
        assert_eq!(f.left, QPoly::new(vec![q(0, 1), q(-1, 1), q(-3, 2), q(-1, 2)]));
    }

    #[test]
    fn quasi_equilibrium_at_zero_coupling() {
        let s = two_element_series(0, 2).unwrap();
        for (p, qa) in s.orders() {
            assert!(s.rate(p, qa).unwrap().is_zero());
        }
    }

    #[test]
    fn plain_advection_is_the_gamma_scaled_series_reindexed() {
        let scaled = two_element_series(4, 2).unwrap();
        let plain = two_element_series_with(2, 2, Advection::Alpha).unwrap();
        for (p, qa) in plain.orders() {
            if p + qa <= 4 {
                assert_eq!(plain.rate(p, qa), scaled.rate(p + qa, qa));
            }
        }
        assert_eq!(plain.rate_coefficient(0, 2, 3), q(-1, 15));
    }

    #[test]
    fn full_coupling_sum_approaches_exact_decay() {
        // slowest mode of u_xx on (−1, 1) is cos(πx/2), rate −π²/4
        let s = two_element_series(7, 0).unwrap();
        let rate = s.evolution(1.0, 0.0, 1.0);
        assert!((rate + std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-4);
    }

    #[test]
    fn field_is_odd_in_u_when_advection_enters() {
        // u ↦ −u, x ↦ −x maps solutions to solutions
        let s = two_element_series(2, 2).unwrap();
        for x in [-0.7, -0.2, 0.3, 0.9] {
            let a = s.field_value(0.8, 1.5, 0.6, x);
            let b = s.field_value(0.8, 1.5, -0.6, -x);
            assert!((a + b).abs() < 1e-13);
        }
    }
}
