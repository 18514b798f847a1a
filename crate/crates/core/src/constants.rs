//! The constant `C_p = ∫_0^1 |1 + ln x|^p dx` and the sharp-constant
//! records built from it.
//!
//! Substituting `x = e^{-y}` gives `C_p = ∫_0^∞ |1 - y|^p e^{-y} dy`, and
//! splitting at `y = 1`,
//!
//! ```text
//! C_p = e^{-1} [ Γ(p+1) + Σ_{k≥0} 1 / (k! (k+p+1)) ]
//! C_p' = e^{-1} [ Γ'(p+1) - Σ_{k≥0} 1 / (k! (k+p+1)^2) ]
//! ```

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kernel::quadrature::integrate_with_breaks;
use crate::kernel::special::{factorial_series, gamma, gamma_prime};
use crate::output::fmt_f64;
use crate::verify::VerificationReport;

fn check_p(op: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("need finite p > 0, got {p}")))
    }
}

/// `C_p` by the series.
pub fn cp(p: f64) -> Result<f64> {
    check_p("cp", p)?;
    Ok((gamma(p + 1.0) + factorial_series(p, 1)) / E)
}

/// `dC_p/dp`.
pub fn cp_prime(p: f64) -> Result<f64> {
    check_p("cp_prime", p)?;
    Ok((gamma_prime(p + 1.0) - factorial_series(p, 2)) / E)
}

/// `C_p^{1/p}`.
pub fn cp_root(p: f64) -> Result<f64> {
    Ok(cp(p)?.powf(1.0 / p))
}

/// `C_p` by quadrature of `∫_0^∞ |1 - y|^p e^{-y} dy`, split at `y = 1`.
pub fn cp_by_quadrature(p: f64, tol: f64) -> Result<f64> {
    check_p("cp_by_quadrature", p)?;
    let r = integrate_with_breaks(
        |y| (p * (1.0 - y).abs().ln() - y).exp(),
        0.0,
        f64::INFINITY,
        &[1.0],
        tol,
    )?;
    Ok(r.value)
}

/// `∫_0^1 ln|1 + ln x| dx = ∫_0^∞ ln|1 - y| e^{-y} dy`.
pub fn log_mean() -> Result<f64> {
    let r = integrate_with_breaks(
        |y| {
            let d = (1.0 - y).abs();
            if d == 0.0 {
                0.0
            } else {
                d.ln() * (-y).exp()
            }
        },
        0.0,
        f64::INFINITY,
        &[1.0],
        1e-14,
    )?;
    Ok(r.value)
}

/// `lim_{p→0+} C_p^{1/p} = exp(∫_0^1 ln|1 + ln x| dx)`.
pub fn cp_limit_zero() -> Result<f64> {
    Ok(log_mean()?.exp())
}

/// The three pairs of sharp constants at `p`, each ordered as
/// `lower ≤ ratio ≤ upper` for the regime containing `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstants {
    pub p: f64,
    /// `‖(H* - I) f‖ / ‖f‖`
    pub dual_lower: f64,
    pub dual_upper: f64,
    /// `‖(H - I) f‖ / ‖f‖`
    pub hardy_lower: f64,
    pub hardy_upper: f64,
    /// `‖(H* - I) f‖ / ‖(H - I) f‖`
    pub compare_lower: f64,
    pub compare_upper: f64,
}

/// Sharp constants for `p > 1`.
pub fn sharp(p: f64) -> Result<SharpConstants> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain("sharp", format!("need finite p > 1, got {p}")));
    }
    let root = cp_root(p)?;
    let pm1 = p - 1.0;
    let k_root = pm1.powf(-1.0 / p);
    let k_inv = 1.0 / pm1;
    let c_mix = root * pm1.powf(1.0 / p);
    let c_sq = pm1 * pm1;
    let s = if p <= 2.0 {
        SharpConstants {
            p,
            dual_lower: pm1,
            dual_upper: root,
            hardy_lower: k_root,
            hardy_upper: k_inv,
            compare_lower: c_sq,
            compare_upper: c_mix,
        }
    } else {
        SharpConstants {
            p,
            dual_lower: root,
            dual_upper: pm1,
            hardy_lower: k_inv,
            hardy_upper: k_root,
            compare_lower: c_mix,
            compare_upper: c_sq,
        }
    };
    Ok(s)
}

/// Bounds for `‖(H* - I) f‖ / ‖f‖` for `p ≥ 1`, as `(lower, upper)`.
pub fn dual_bounds(p: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(domain("dual_bounds", format!("need finite p >= 1, got {p}")));
    }
    let root = cp_root(p)?;
    let pm1 = p - 1.0;
    Ok(if p <= 2.0 { (pm1, root) } else { (root, pm1) })
}

/// One row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpRow {
    pub p: f64,
    pub cp: f64,
    pub cp_root: f64,
    pub p_minus_1: f64,
    pub cp_prime: f64,
}

impl CpRow {
    pub const CSV_HEADER: &'static str = "p,cp,cp_root,p_minus_1,cp_prime";

    pub fn new(p: f64) -> Result<Self> {
        let c = cp(p)?;
        Ok(CpRow {
            p,
            cp: c,
            cp_root: c.powf(1.0 / p),
            p_minus_1: p - 1.0,
            cp_prime: cp_prime(p)?,
        })
    }

    pub fn csv_row(&self) -> String {
        [self.p, self.cp, self.cp_root, self.p_minus_1, self.cp_prime]
            .map(fmt_f64)
            .join(",")
    }
}

/// `lo, lo + step, …` up to `hi` (inclusive, with a half-step allowance
/// against rounding).
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(domain("p_grid", format!("bad range {lo}..{hi}")));
    }
    if !(step > 0.0) {
        return Err(domain("p_grid", format!("step must be positive, got {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn report(name: &str, samples: usize, worst: f64, tol: f64) -> VerificationReport {
    VerificationReport::new(name, samples, worst, tol, None)
}

/// Monotonicity and convexity checks of `C_p` on a sorted grid of positive
/// exponents. Each report carries the worst violation (positive means a
/// failure beyond tolerance).
pub fn property_scan(grid: &[f64]) -> Result<Vec<VerificationReport>> {
    if grid.is_empty() || grid.iter().any(|&p| !(p > 0.0)) {
        return Err(domain("property_scan", "grid must be nonempty and positive"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(domain("property_scan", "grid must be strictly increasing"));
    }
    let c: Vec<f64> = grid.iter().map(|&p| cp(p)).collect::<Result<_>>()?;
    let roots: Vec<f64> = grid.iter().zip(&c).map(|(&p, &v)| v.powf(1.0 / p)).collect();

    // strictly increasing: violation = max(prev - next)
    let increasing = |vals: &[f64], keep: &dyn Fn(f64) -> bool| -> (usize, f64) {
        let idx: Vec<usize> = (0..grid.len()).filter(|&i| keep(grid[i])).collect();
        let worst = idx
            .windows(2)
            .map(|w| vals[w[0]] - vals[w[1]])
            .fold(f64::NEG_INFINITY, f64::max);
        (idx.len().saturating_sub(1), worst)
    };

    let mut out = Vec::new();
    let (n, w) = increasing(&roots, &|_| true);
    out.push(report("cp_root_increasing", n, w, 0.0));

    // ln C_p convex: divided second differences
    let logs: Vec<f64> = c.iter().map(|v| v.ln()).collect();
    let mut worst = f64::NEG_INFINITY;
    for i in 1..grid.len().saturating_sub(1) {
        let d1 = (logs[i] - logs[i - 1]) / (grid[i] - grid[i - 1]);
        let d2 = (logs[i + 1] - logs[i]) / (grid[i + 1] - grid[i]);
        worst = worst.max(-(d2 - d1) / (grid[i + 1] - grid[i - 1]));
    }
    out.push(report("log_cp_convex", grid.len().saturating_sub(2), worst, 1e-10));

    let (n, w) = increasing(&c, &|p| p >= 1.0);
    out.push(report("cp_increasing_from_1", n, w, 0.0));
    let (n, w) = increasing(&c, &|p| p >= 2.0);
    out.push(report("cp_increasing_from_2", n, w, 0.0));

    // not increasing near 0: C_0.01 > C_1
    let w = cp(1.0)? - cp(0.01)?;
    out.push(report("cp_not_increasing_near_0", 1, w, 0.0));
    Ok(out)
}

/// The monotonicity bracket at `p = 1`: `Γ'(2) = 1 - γ`, the series
/// `Σ 1/(k! (k+2)^2)`, and their difference `e C_1'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub gamma_prime_2: f64,
    pub series: f64,
    pub cp_prime_1: f64,
    /// Rational bound `1/4 + 1/9 + e - 8/3` on the series.
    pub series_bound: f64,
}

pub fn proposition_bracket() -> Bracket {
    Bracket {
        gamma_prime_2: gamma_prime(2.0),
        series: factorial_series(1.0, 2),
        cp_prime_1: (gamma_prime(2.0) - factorial_series(1.0, 2)) / E,
        series_bound: 0.25 + 1.0 / 9.0 + E - 8.0 / 3.0,
    }
}
