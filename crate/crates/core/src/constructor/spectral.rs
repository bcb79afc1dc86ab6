//! Spectra tied to the coupling conditions: the two-element diffusion
//! eigenvalues and the wavenumbers admitted by partial coupling.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Distance kept from `tan` poles when bracketing.
const POLE_OFFSET: f64 = 1e-9;

/// Newton iteration on `f` guarded by a sign-changing bracket `[lo, hi]`;
/// any step leaving the bracket is replaced by bisection.
pub fn safeguarded_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootNotConverged { lo, hi });
    }
    let rising = fa < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == rising {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || b - a <= f64::EPSILON * b.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotConverged { lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    /// Even modes `cos(kx)`-like, `k = tan k`.
    TanBranch,
    /// Odd modes `sin(nπx)`, `k = nπ`.
    SineBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenpair {
    pub k: f64,
    pub lambda: f64,
    pub family: ModeFamily,
}

/// `n`-th positive root of `k = tan k`, in `(nπ, nπ + π/2)`.
pub fn tan_root(n: usize) -> Result<f64> {
    let lo = n as f64 * PI;
    let hi = lo + FRAC_PI_2 - POLE_OFFSET;
    safeguarded_newton(|k| k * k.cos() - k.sin(), |k| -k * k.sin(), lo + POLE_OFFSET, hi)
}

/// Diffusion spectrum of the two-element problem with zero coupling
/// (`γ = 0`): `m` modes of each family, sorted by `|λ|`.
pub fn two_element_eigenvalues(m: usize) -> Result<Vec<Eigenpair>> {
    if m == 0 {
        return Err(Error::InvalidArgument("mode count must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(2 * m);
    for n in 1..=m {
        let k = tan_root(n)?;
        out.push(Eigenpair {
            k,
            lambda: -k * k,
            family: ModeFamily::TanBranch,
        });
        let k = n as f64 * PI;
        out.push(Eigenpair {
            k,
            lambda: -k * k,
            family: ModeFamily::SineBranch,
        });
    }
    out.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
    Ok(out)
}

pub const DEFAULT_K_MAX: f64 = 6.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, kappa: f64) -> bool {
        (self.lo..=self.hi).contains(&kappa)
    }
}

fn check_coupling(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("coupling C must lie in (0, 1], got {c}")))
    }
}

/// Direct test of `tan(κ/2) ≤ κ/(2C)`; poles of `tan` count as allowed.
pub fn is_allowed(kappa: f64, c: f64) -> bool {
    let x = 0.5 * kappa;
    let (s, co) = x.sin_cos();
    if co > 0.0 {
        c * s <= x * co
    } else if co < 0.0 {
        c * s >= x * co
    } else {
        true
    }
}

/// Closed intervals of `[0, k_max]` where `tan(κ/2) ≤ κ/(2C)`.
pub fn allowed_wavenumber_bands(c: f64, k_max: f64) -> Result<Vec<Band>> {
    check_coupling(c)?;
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(Error::InvalidArgument(format!("K_max must be positive, got {k_max}")));
    }
    let mut bands = Vec::new();
    // band about κ = 0: x = κ/2 with sin x / x ≤ cos x / C
    let r0 = if c == 1.0 {
        0.0
    } else {
        let f = |x: f64| sinc(x) - x.cos() / c;
        let df = |x: f64| sinc_prime(x) + x.sin() / c;
        2.0 * safeguarded_newton(f, df, 0.0, FRAC_PI_2)?
    };
    bands.push(Band { lo: 0.0, hi: r0 });
    // tan(κ/2) < 0 on ((2m−1)π, 2mπ), then allowed until tan(κ/2) = κ/(2C)
    for m in 1.. {
        let lo = (2 * m - 1) as f64 * PI;
        if lo > k_max {
            break;
        }
        let h = |k: f64| (0.5 * k).sin() - k * (0.5 * k).cos() / (2.0 * c);
        let dh = |k: f64| {
            let (s, co) = (0.5 * k).sin_cos();
            0.5 * co - co / (2.0 * c) + k * s / (4.0 * c)
        };
        let hi = safeguarded_newton(h, dh, 2.0 * m as f64 * PI, (2 * m + 1) as f64 * PI)?;
        bands.push(Band { lo, hi });
    }
    for b in &mut bands {
        b.hi = b.hi.min(k_max);
    }
    Ok(bands)
}

/// Total length of the allowed set within `[0, k_max]`.
pub fn band_measure(c: f64, k_max: f64) -> Result<f64> {
    Ok(allowed_wavenumber_bands(c, k_max)?.iter().map(Band::width).sum())
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinc_prime(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        -x / 3.0
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_sqrt2() {
        let r = safeguarded_newton(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn newton_rejects_bad_bracket() {
        assert!(safeguarded_newton(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0).is_err());
    }

    #[test]
    fn tan_roots_satisfy_equation() {
        for n in 1..10 {
            let k = tan_root(n).unwrap();
            assert!((k - k.tan()).abs() < 1e-9 * k);
        }
    }

    #[test]
    fn spectrum_sorted_and_starts_at_minus_pi_squared() {
        let e = two_element_eigenvalues(4).unwrap();
        assert_eq!(e.len(), 8);
        assert!((e[0].lambda + PI * PI).abs() < 1e-12);
        assert!(e.windows(2).all(|w| w[0].lambda.abs() <= w[1].lambda.abs()));
        assert!(two_element_eigenvalues(0).is_err());
    }

    #[test]
    fn band_ends_satisfy_boundary_equation() {
        for c in [0.1, 0.5, 1.0] {
            let bands = allowed_wavenumber_bands(c, 30.0).unwrap();
            for b in &bands[1..] {
                if b.hi < 30.0 {
                    assert!(((0.5 * b.hi).tan() - b.hi / (2.0 * c)).abs() < 1e-6);
                }
                let mid = 0.5 * (b.lo + b.hi);
                assert!(is_allowed(mid, c));
            }
        }
    }

    #[test]
    fn gaps_are_disallowed() {
        let bands = allowed_wavenumber_bands(0.7, DEFAULT_K_MAX).unwrap();
        for w in bands.windows(2) {
            assert!(w[0].hi < w[1].lo);
            assert!(!is_allowed(0.5 * (w[0].hi + w[1].lo), 0.7));
        }
    }

    #[test]
    fn invalid_coupling_rejected() {
        assert!(allowed_wavenumber_bands(0.0, 1.0).is_err());
        assert!(allowed_wavenumber_bands(1.5, 1.0).is_err());
    }
}
