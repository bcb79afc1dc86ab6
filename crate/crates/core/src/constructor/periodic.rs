//! Per-mode construction of the holistic diffusion closure on a periodic grid.
//!
//! For linear diffusion (`α = 0`, `ν = H = 1`) a Fourier mode `U_j = z^j`,
//! `z = e^{iκ}`, is an eigenvector of the closure, so the subgrid field on
//! element `j` is `U_j φ(ξ)` and the evolution is `U̇_j = λ U_j`. The field
//! and rate solve
//!
//! ```text
//! φ'' = λ φ,   φ(0) = z⁻¹,   φ(1) = 1,
//! z φ'(0) − φ'(1) = (1 − γ)(z − 2 + z⁻¹),
//! ```
//!
//! the last line being the derivative-jump coupling at a node. Expanding
//! `φ = Σ γⁿ φₙ`, `λ = Σ γⁿ ĝⁿ` gives one linear problem per order, solved
//! exactly over `ℚ(z)`.

use serde::Serialize;

use super::algebra::{q, q_to_string, Field, Poly, QPoly, RatFunc, Rational};
use crate::error::{Error, Result};

pub type XiPoly = Poly<RatFunc>;

pub const MAX_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSeries {
    /// `φ₀ … φ_p`, polynomials in `ξ` over `ℚ(z)`.
    fields: Vec<XiPoly>,
    /// `ĝ¹ … ĝᵖ`; index `n − 1` holds order `n`.
    rates: Vec<RatFunc>,
}

impl SymbolSeries {
    pub fn max_order(&self) -> usize {
        self.rates.len()
    }

    pub fn field(&self, order: usize) -> &XiPoly {
        &self.fields[order]
    }

    /// `ĝⁿ` for `n ≥ 1`.
    pub fn rate(&self, order: usize) -> &RatFunc {
        &self.rates[order - 1]
    }

    pub fn rates(&self) -> &[RatFunc] {
        &self.rates
    }
}

/// `z − 2 + z⁻¹`, the symbol of `δ²`.
pub fn delta2_symbol() -> RatFunc {
    RatFunc::laurent(&[(1, q(1, 1)), (0, q(-2, 1)), (-1, q(1, 1))])
}

/// `6/(z + 4 + z⁻¹)`, the symbol of `S`.
pub fn s_symbol() -> RatFunc {
    RatFunc::int(6).over(&RatFunc::laurent(&[
        (1, q(1, 1)),
        (0, q(4, 1)),
        (-1, q(1, 1)),
    ]))
}

fn z() -> RatFunc {
    RatFunc::z_pow(1, q(1, 1))
}

fn z_inv() -> RatFunc {
    RatFunc::z_pow(-1, q(1, 1))
}

/// `(1 − ξ) z⁻¹ + ξ`
pub fn linear_field_symbol() -> XiPoly {
    XiPoly::new(vec![z_inv(), RatFunc::one().minus(&z_inv())])
}

/// `p'' = f` with `p(0) = p(1) = 0`.
fn solve_two_point(f: &XiPoly) -> XiPoly {
    let p = f.antiderivative().antiderivative();
    let end = p.eval(&RatFunc::one());
    &p - &XiPoly::monomial(1, end)
}

/// Derivative jump `z φ'(0) − φ'(1)` across a node.
fn node_jump(phi: &XiPoly) -> RatFunc {
    let d = phi.derivative();
    z().times(&d.eval(&RatFunc::zero()))
        .minus(&d.eval(&RatFunc::one()))
}

/// Right-hand side of the jump condition at order `n` (expansion of
/// `(1 − γ)(z − 2 + z⁻¹)`).
fn jump_target(order: usize) -> RatFunc {
    match order {
        0 => delta2_symbol(),
        1 => RatFunc::zero().minus(&delta2_symbol()),
        _ => RatFunc::zero(),
    }
}

pub fn construct_diffusion_symbol(max_order: usize) -> Result<SymbolSeries> {
    if !(1..=MAX_ORDER).contains(&max_order) {
        return Err(Error::InvalidArgument(format!(
            "max_order must be in 1..={MAX_ORDER}, got {max_order}"
        )));
    }
    let phi0 = linear_field_symbol();
    let a = solve_two_point(&phi0);
    let ja = node_jump(&a);
    if ja.is_zero() {
        return Err(Error::NotSolvable {
            order: 1,
            reason: "jump of the homogeneous correction vanishes".into(),
        });
    }

    let mut fields = vec![phi0];
    let mut rates: Vec<RatFunc> = Vec::new();
    for n in 1..=max_order {
        let forcing = (1..n).fold(XiPoly::zero(), |acc, k| {
            &acc + &fields[n - k].scale(&rates[k - 1])
        });
        let b = solve_two_point(&forcing);
        let rate = jump_target(n).minus(&node_jump(&b)).over(&ja);
        let phi = &a.scale(&rate) + &b;
        fields.push(phi);
        rates.push(rate);
    }
    let series = SymbolSeries { fields, rates };
    verify(&series)?;
    Ok(series)
}

/// Checks every order of the truncated series against the field equation,
/// the node values and the jump coupling, in exact arithmetic.
pub fn verify(series: &SymbolSeries) -> Result<()> {
    let zero = RatFunc::zero();
    let one = RatFunc::one();
    for n in 0..=series.max_order() {
        let phi = series.field(n);
        let forcing = (1..=n).fold(XiPoly::zero(), |acc, k| {
            &acc + &series.field(n - k).scale(series.rate(k))
        });
        let fail = |what: &str| Error::ResidualNonzero {
            order: n,
            what: what.to_string(),
        };
        if !(&phi.derivative().derivative() - &forcing).is_zero() {
            return Err(fail("field equation"));
        }
        let (left, right) = if n == 0 {
            (z_inv(), one.clone())
        } else {
            (zero.clone(), zero.clone())
        };
        if phi.eval(&zero) != left || phi.eval(&one) != right {
            return Err(fail("node values"));
        }
        if node_jump(phi) != jump_target(n) {
            return Err(fail("derivative jump"));
        }
    }
    Ok(())
}

/// Decay rate `λ̄ = Σₙ γⁿ ĝⁿ(e^{iκ})`, evaluated through the `δ²` symbol so
/// that it is real by construction and accurate as `κ → 0`.
pub fn decay_rate(series: &SymbolSeries, kappa: f64, gamma: f64) -> f64 {
    decay_rate_through(series, series.max_order(), kappa, gamma)
}

/// [`decay_rate`] truncated after the `γ^order` term.
pub fn decay_rate_through(series: &SymbolSeries, order: usize, kappa: f64, gamma: f64) -> f64 {
    series.rates[..order.min(series.rates.len())]
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let form = r
                .to_delta2_form()
                .expect("diffusion symbols are reflection invariant");
            gamma.powi(k as i32 + 1) * form.eval_kappa(kappa)
        })
        .sum()
}

/// Same sum evaluated directly at the complex point `z = e^{iκ}`.
pub fn decay_rate_complex(series: &SymbolSeries, kappa: f64, gamma: f64) -> num_complex::Complex64 {
    let z = num_complex::Complex64::from_polar(1.0, kappa);
    series
        .rates
        .iter()
        .enumerate()
        .map(|(k, r)| gamma.powi(k as i32 + 1) * r.eval_complex(z))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct RatFuncJson {
    /// Ascending coefficients of the numerator in `z`, as `"p/q"` strings.
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
    /// The same function as a ratio of polynomials in `s = z − 2 + z⁻¹`.
    pub delta2_numerator: Option<Vec<String>>,
    pub delta2_denominator: Option<Vec<String>>,
}

fn poly_strings(p: &QPoly) -> Vec<String> {
    p.coeffs().iter().map(q_to_string).collect()
}

impl From<&RatFunc> for RatFuncJson {
    fn from(r: &RatFunc) -> Self {
        let form = r.to_delta2_form();
        Self {
            numerator: poly_strings(r.numerator()),
            denominator: poly_strings(r.denominator()),
            delta2_numerator: form.as_ref().map(|f| poly_strings(&f.num)),
            delta2_denominator: form.as_ref().map(|f| poly_strings(&f.den)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolSeriesJson {
    pub max_order: usize,
    /// `rates[n-1]` is the order-`n` evolution symbol.
    pub rates: Vec<RatFuncJson>,
    /// `fields[n][k]` is the `ξ^k` coefficient of the order-`n` field symbol.
    pub fields: Vec<Vec<RatFuncJson>>,
}

impl From<&SymbolSeries> for SymbolSeriesJson {
    fn from(s: &SymbolSeries) -> Self {
        Self {
            max_order: s.max_order(),
            rates: s.rates.iter().map(RatFuncJson::from).collect(),
            fields: s
                .fields
                .iter()
                .map(|f| f.coeffs().iter().map(RatFuncJson::from).collect())
                .collect(),
        }
    }
}

/// `c · S̃^a · δ̂^{2b}` helper for building reference symbols.
pub fn s_delta_term(c: Rational, s_power: u32, delta_power: u32) -> RatFunc {
    RatFunc::rational(c)
        .times(&s_symbol().pow(s_power))
        .times(&delta2_symbol().pow(delta_power))
}
