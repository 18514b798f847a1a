//! Gamma-type special functions.
//!
//! The complete gamma function comes from `libm` and the digamma function
//! from `statrs`; the upper
//! incomplete gamma function and the exponential moment series are
//! implemented here because the `h` kernel needs the exponentially scaled
//! form `e^x Γ(a, x)` and a controlled series tolerance.

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default truncation tolerance for the power series below.
pub const SERIES_TOL: f64 = 1e-15;
/// Hard cap on series terms.
pub const SERIES_MAX_TERMS: usize = 200;

const CF_MAX_ITER: usize = 2000;
const TINY: f64 = 1e-300;

pub fn gamma(a: f64) -> f64 {
    libm::tgamma(a)
}

pub fn ln_gamma(a: f64) -> f64 {
    libm::lgamma(a)
}

pub fn digamma(a: f64) -> f64 {
    statrs::function::gamma::digamma(a)
}

/// `Γ'(a) = Γ(a) ψ(a)`.
pub fn gamma_prime(a: f64) -> f64 {
    gamma(a) * digamma(a)
}

fn check_upper(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("gamma_upper", format!("need a > 0, got {a}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("gamma_upper", format!("need finite x >= 0, got {x}")));
    }
    Ok(())
}

/// Upper incomplete gamma function `Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt`.
pub fn gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_upper(a, x)?;
    if x == 0.0 {
        return Ok(gamma(a));
    }
    if x < a + 1.0 {
        Ok(gamma(a) - lower_series(a, x))
    } else {
        Ok((-x).exp() * x.powf(a) * upper_fraction(a, x))
    }
}

/// `e^x Γ(a, x)`, which stays finite for large `x` where `Γ(a, x)`
/// underflows.
pub fn gamma_upper_scaled(a: f64, x: f64) -> Result<f64> {
    check_upper(a, x)?;
    if x == 0.0 {
        return Ok(gamma(a));
    }
    if x < a + 1.0 {
        Ok(x.exp() * gamma(a) - x.powf(a) * lower_series_sum(a, x))
    } else {
        Ok(x.powf(a) * upper_fraction(a, x))
    }
}

/// Lower incomplete gamma `γ(a, x)` by its power series.
fn lower_series(a: f64, x: f64) -> f64 {
    (-x).exp() * x.powf(a) * lower_series_sum(a, x)
}

/// `Σ_{n≥0} x^n / (a (a+1) ⋯ (a+n))`.
fn lower_series_sum(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..CF_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// Continued fraction for `e^x x^{-a} Γ(a, x)`, modified Lentz.
fn upper_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    h
}

/// `∫_0^s t^p e^t dt = Σ_{k≥0} s^{p+k+1} / (k! (p+k+1))`, for `p > -1`.
pub fn exp_moment(s: f64, p: f64) -> Result<f64> {
    exp_moment_tol(s, p, SERIES_TOL)
}

pub(crate) fn exp_moment_tol(s: f64, p: f64, tol: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("exp_moment", format!("need finite s >= 0, got {s}")));
    }
    if !(p > -1.0) {
        return Err(domain("exp_moment", format!("need p > -1, got {p}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    // Σ s^k/(k! (p+k+1)); all terms positive.
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..SERIES_MAX_TERMS {
        if k > 0 {
            power *= s / k as f64;
        }
        let term = power / (p + k as f64 + 1.0);
        sum += term;
        if (k as f64) > s && term <= tol * sum {
            break;
        }
    }
    Ok(s.powf(p + 1.0) * sum)
}

/// `Σ_{k≥0} 1 / (k! (k + p + 1)^m)` for `m ∈ {1, 2}`; the `s = 1` moment
/// series and its `p`-derivative (up to sign).
pub(crate) fn factorial_series(p: f64, m: i32) -> f64 {
    let mut inv_fact = 1.0;
    let mut sum = 0.0;
    for k in 0..SERIES_MAX_TERMS {
        if k > 0 {
            inv_fact /= k as f64;
        }
        let term = inv_fact / (k as f64 + p + 1.0).powi(m);
        sum += term;
        if term <= SERIES_TOL * 1e-2 * sum {
            break;
        }
    }
    sum
}
