use serde::{Deserialize, Serialize};

use super::special::{exp_moment_tol, gamma, gamma_upper_scaled, SERIES_TOL};
use crate::error::{domain, Result};

/// Evaluator for `h(r) = e^r ∫_r^∞ |y - 1|^p e^{-y} dy`
/// (equivalently `e^r ∫_0^{e^{-r}} |1 + ln x|^p dx`), the per-interval
/// building block of `‖(H* - I) f‖_p^p` on step functions.
///
/// Closed forms:
/// - `r ≥ 1`: `e^{r-1} Γ(p+1, r-1)`
/// - `0 ≤ r < 1`: `e^{r-1} [Γ(p+1) + ∫_0^{1-r} t^p e^t dt]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HEvaluator {
    p: f64,
    gamma_p1: f64,
    series_tol: f64,
}

impl HEvaluator {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_series_tol(p, SERIES_TOL)
    }

    pub fn with_series_tol(p: f64, series_tol: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(domain("HEvaluator", format!("need p > 0, got {p}")));
        }
        if !(series_tol > 0.0) {
            return Err(domain("HEvaluator", "series_tol must be positive"));
        }
        Ok(Self {
            p,
            gamma_p1: gamma(p + 1.0),
            series_tol,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Cached `Γ(p + 1)`.
    pub fn gamma_p1(&self) -> f64 {
        self.gamma_p1
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn h(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain("h_eval", format!("need finite r >= 0, got {r}")));
        }
        if r >= 1.0 {
            gamma_upper_scaled(self.p + 1.0, r - 1.0)
        } else {
            let m = exp_moment_tol(1.0 - r, self.p, self.series_tol)?;
            Ok((r - 1.0).exp() * (self.gamma_p1 + m))
        }
    }

    /// `h(0) = C_p`.
    pub fn h0(&self) -> f64 {
        self.h(0.0).expect("r = 0 is in the domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_case() {
        let ev = HEvaluator::new(2.0).unwrap();
        for &r in &[0.0, 0.25, 0.5, 0.999, 1.0, 1.5, 3.0, 10.0, 40.0] {
            let v = ev.h(r).unwrap();
            assert!(((v - (r * r + 1.0)) / (r * r + 1.0)).abs() < 1e-13, "r={r} {v}");
        }
    }

    #[test]
    fn value_at_one_is_gamma() {
        for &p in &[0.5, 1.0, 1.5, 3.0, 4.5] {
            let ev = HEvaluator::new(p).unwrap();
            assert!((ev.h(1.0).unwrap() / ev.gamma_p1() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn branches_meet_at_one() {
        for &p in &[1.1, 1.5, 2.5, 4.0] {
            let ev = HEvaluator::new(p).unwrap();
            // h' = h - |r - 1|^p, so h(1 + δ) = Γ(p+1)(1 + δ) + O(δ^2)
            let g = ev.gamma_p1();
            let d = 1e-7;
            let lo = ev.h(1.0 - d).unwrap();
            let hi = ev.h(1.0 + d).unwrap();
            assert!((lo / (g * (1.0 - d)) - 1.0).abs() < 1e-12, "p={p}");
            assert!((hi / (g * (1.0 + d)) - 1.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn negative_r_rejected() {
        let ev = HEvaluator::new(1.5).unwrap();
        assert!(ev.h(-1e-3).is_err());
        assert!(HEvaluator::new(0.0).is_err());
    }
}
