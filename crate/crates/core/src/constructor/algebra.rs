//! Exact polynomial and rational-function arithmetic over `ℚ`.
//!
//! [`Poly`] is generic over a coefficient [`Field`], so the same type serves
//! for polynomials in `z` over `ℚ`, polynomials in `x` over `ℚ`, and
//! polynomials in `ξ` whose coefficients are rational functions of `z`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `"p/q"` in lowest terms, `q > 0`; integers keep the `/1`.
pub fn q_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Panics on division by zero.
    fn over(&self, o: &Self) -> Self;
    fn from_rational(r: Rational) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
}

/// Dense polynomial, ascending powers, no trailing zeros.
#[derive(Clone, PartialEq)]
pub struct Poly<T: Field> {
    coeffs: Vec<T>,
}

impl<T: Field> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`
    pub fn monomial(k: usize, c: T) -> Self {
        let mut coeffs = vec![T::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc.times(x).plus(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.times(&T::from_rational(q(k as i64, 1))))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![T::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.over(&T::from_rational(q(k as i64 + 1, 1)))),
        );
        Self::new(coeffs)
    }

    /// `p(x + shift)`
    pub fn shifted(&self, shift: &T) -> Self {
        let lin = Poly::new(vec![shift.clone(), T::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &lin) + &Poly::constant(c.clone()))
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead = d.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].over(&lead);
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].minus(&c.times(dc));
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = T::one().over(&self.lead());
        self.scale(&inv)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let r = a.div_rem(&b).1.monic();
            a = b;
            b = r;
        }
        a
    }
}

impl<T: Field> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).plus(&o.coeff(k))).collect())
    }
}

impl<T: Field> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k).minus(&o.coeff(k))).collect())
    }
}

impl<T: Field> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(out)
    }
}

impl<T: Field> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(&T::zero().minus(&T::one()))
    }
}

pub type QPoly = Poly<Rational>;

impl QPoly {
    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&k| q(k, 1)).collect())
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + q_to_f64(c))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + q_to_f64(c))
    }

    /// Lowest power with a nonzero coefficient.
    fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !Zero::is_zero(c)).unwrap_or(0)
    }

    fn strip_low(&self, v: usize) -> Self {
        Self::new(self.coeffs[v..].to_vec())
    }
}

/// A rational function `num(z)/den(z)` over `ℚ`, kept in lowest terms with a
/// monic denominator, so equal functions have equal representations.
#[derive(Clone, PartialEq)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self {
                num,
                den: QPoly::constant(q(1, 1)),
            };
        }
        // common powers of z first, then whatever else is shared
        let v = num.valuation().min(den.valuation());
        let (num, den) = (num.strip_low(v), den.strip_low(v));
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let inv = q(1, 1) / den.lead();
        Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn rational(r: Rational) -> Self {
        Self::new(QPoly::constant(r), QPoly::constant(q(1, 1)))
    }

    pub fn int(k: i64) -> Self {
        Self::rational(q(k, 1))
    }

    /// The Laurent monomial `c · z^k`, `k` of either sign.
    pub fn z_pow(k: i64, c: Rational) -> Self {
        if k >= 0 {
            Self::new(QPoly::monomial(k as usize, c), QPoly::constant(q(1, 1)))
        } else {
            Self::new(QPoly::constant(c), QPoly::monomial((-k) as usize, q(1, 1)))
        }
    }

    /// A Laurent polynomial `Σ c_k z^k` given as `(k, c_k)` pairs.
    pub fn laurent(terms: &[(i64, Rational)]) -> Self {
        terms
            .iter()
            .fold(Self::zero(), |acc, (k, c)| acc.plus(&Self::z_pow(*k, c.clone())))
    }

    /// `self ± o` over the least common denominator.
    fn combine(&self, o: &Self, op: impl Fn(&QPoly, &QPoly) -> QPoly) -> Self {
        if self.den == o.den {
            return Self::new(op(&self.num, &o.num), self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = self.den.div_rem(&g).0;
        let b = o.den.div_rem(&g).0;
        Self::new(op(&(&self.num * &b), &(&o.num * &a)), &self.den * &b)
    }

    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    pub fn denominator(&self) -> &QPoly {
        &self.den
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.times(self))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Rewrites a function invariant under `z ↦ 1/z` as a rational function
    /// of `s = z − 2 + z⁻¹` (the symbol of `δ²`). Returns `None` when the
    /// function is not of that form.
    pub fn to_delta2_form(&self) -> Option<CosineForm> {
        if self.num.is_zero() {
            return Some(CosineForm {
                num: QPoly::zero(),
                den: QPoly::from_ints(&[1]),
            });
        }
        let (vn, vd) = (self.num.valuation(), self.den.valuation());
        let (n, d) = (self.num.strip_low(vn), self.den.strip_low(vd));
        let (dn, dd) = (n.degree()?, d.degree()?);
        if dn % 2 != 0 || dd % 2 != 0 {
            return None;
        }
        // z^{vn} n / (z^{vd} d) = z^{vn − vd + (dn − dd)/2} · L_n / L_d
        if vn as i64 - vd as i64 + (dn as i64 - dd as i64) / 2 != 0 {
            return None;
        }
        let shift = q(2, 1);
        let num = symmetric_to_t(&n)?.shifted(&shift);
        let den = symmetric_to_t(&d)?.shifted(&shift);
        let lead = den.lead();
        let inv = q(1, 1) / lead;
        Some(CosineForm {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }
}

/// Treats palindromic `p` of even degree `2m` as the Laurent polynomial
/// `z^{−m} p(z)` and rewrites it in `t = z + z⁻¹`.
fn symmetric_to_t(p: &QPoly) -> Option<QPoly> {
    let deg = p.degree()?;
    let m = deg / 2;
    let c = p.coeffs();
    if (0..=deg).any(|k| c[k] != c[deg - k]) {
        return None;
    }
    // work[k] holds the coefficient of z^{k−m}
    let mut work: Vec<Rational> = c.to_vec();
    let mut out = vec![q(0, 1); m + 1];
    for top in (0..=m).rev() {
        let a = work[m + top].clone();
        if Zero::is_zero(&a) {
            continue;
        }
        out[top] = a.clone();
        // subtract a (z + z⁻¹)^top = a Σ_i C(top, i) z^{top − 2i}
        let mut binom = BigInt::one();
        for i in 0..=top {
            let power = m + top - 2 * i;
            work[power] -= &a * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(top - i) / BigInt::from(i + 1);
        }
    }
    if work.iter().any(|w| !Zero::is_zero(w)) {
        return None;
    }
    Some(QPoly::new(out))
}

impl Field for RatFunc {
    fn zero() -> Self {
        Self {
            num: QPoly::zero(),
            den: QPoly::from_ints(&[1]),
        }
    }
    fn one() -> Self {
        Self::int(1)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a + b)
    }
    fn minus(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a - b)
    }
    fn times(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }
    fn over(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "rational function division by zero");
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }
    fn from_rational(r: Rational) -> Self {
        Self::rational(r)
    }
}

/// A real rational function of `s = −4 sin²(κ/2)`, the `δ²` symbol. Evaluating
/// through `s` keeps full relative precision as `κ → 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineForm {
    pub num: QPoly,
    pub den: QPoly,
}

impl CosineForm {
    pub fn eval_s(&self, s: f64) -> f64 {
        self.num.eval_f64(s) / self.den.eval_f64(s)
    }

    pub fn eval_kappa(&self, kappa: f64) -> f64 {
        let h = (0.5 * kappa).sin();
        self.eval_s(-4.0 * h * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        // (x − 1)(x + 2) and (x − 1)(x − 3)
        let a = QPoly::from_ints(&[-2, 1, 1]);
        let b = QPoly::from_ints(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), QPoly::from_ints(&[-1, 1]));
        let (quot, rem) = a.div_rem(&QPoly::from_ints(&[-1, 1]));
        assert_eq!(quot, QPoly::from_ints(&[2, 1]));
        assert!(rem.is_zero());
    }

    #[test]
    fn rational_functions_are_canonical() {
        let a = RatFunc::new(QPoly::from_ints(&[-2, 1, 1]), QPoly::from_ints(&[-2, 2]));
        let b = RatFunc::new(QPoly::from_ints(&[2, 1]), QPoly::from_ints(&[2]));
        assert_eq!(a, b);
        let s = a.plus(&b).minus(&b).minus(&a);
        assert!(Field::is_zero(&s));
        assert_eq!(a.over(&a), RatFunc::one());
    }

    #[test]
    fn calculus() {
        let p = QPoly::from_ints(&[1, 2, 3]);
        assert_eq!(p.derivative(), QPoly::from_ints(&[2, 6]));
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.shifted(&q(1, 1)), QPoly::from_ints(&[6, 8, 3]));
    }

    #[test]
    fn delta2_form_of_s_operator() {
        // S = 6/(z + 4 + z⁻¹) = 6/(s + 6)
        let s_op = RatFunc::int(6).over(&RatFunc::laurent(&[
            (1, q(1, 1)),
            (0, q(4, 1)),
            (-1, q(1, 1)),
        ]));
        let form = s_op.to_delta2_form().unwrap();
        assert_eq!(form.num, QPoly::from_ints(&[6]));
        assert_eq!(form.den, QPoly::from_ints(&[6, 1]));
        assert!((form.eval_kappa(std::f64::consts::PI) - 3.0).abs() < 1e-15);
        // z alone is not reflection invariant
        assert!(RatFunc::z_pow(1, q(1, 1)).to_delta2_form().is_none());
    }

    #[test]
    fn printing() {
        assert_eq!(q_to_string(&q(-6, 4)), "-3/2");
        assert_eq!(q_to_string(&q(8, 4)), "2/1");
    }
}
