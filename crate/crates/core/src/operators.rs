//! Closed-form application of `H`, `H*`, `H - I` and `H* - I` to piecewise
//! functions.
//!
//! `H*` is applied in one right-to-left pass that carries the tail integral
//! `∫_hi^∞ f(t) dt/t`; `H` in one left-to-right pass that carries the prefix
//! integral `∫_0^lo f`. Each pass is exact on the supported terms of
//! [`Form`] and fails with [`Error::Unrepresentable`] otherwise.

use serde::{Deserialize, Serialize};

use crate::cone::{Form, Piece, PiecewiseFunction, StepFunction};
use crate::error::{Error, Result};

/// Logarithmic centres `S_n` of a cone step function: on `(a_{n-1}, a_n]`,
/// `(H* - I) f = b_n (S_n - 1 - ln x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SValues {
    pub s: Vec<f64>,
}

fn require_cone(f: &StepFunction) -> Result<()> {
    if f.is_cone() {
        Ok(())
    } else {
        Err(Error::NotInCone(format!(
            "values {:?} are not nonincreasing",
            f.values()
        )))
    }
}

/// Backward recursion `S_N = d_N`, `b_n (S_n - d_n) = b_{n+1} (S_{n+1} - d_n)`.
pub fn s_values(f: &StepFunction) -> Result<SValues> {
    require_cone(f)?;
    let d = f.log_breakpoints();
    let b = f.values();
    let n = b.len();
    let mut s = vec![0.0; n];
    s[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        s[i] = d[i] + (b[i + 1] / b[i]) * (s[i + 1] - d[i]);
    }
    Ok(SValues { s })
}

/// `S_n` straight from its defining sum
/// `b_n S_n = b_n d_n + Σ_{k>n} b_k (d_k - d_{k-1})`.
pub fn s_values_direct(f: &StepFunction) -> SValues {
    let d = f.log_breakpoints();
    let b = f.values();
    let n = b.len();
    let s = (0..n)
        .map(|i| {
            let tail: f64 = (i + 1..n).map(|k| b[k] * (d[k] - d[k - 1])).sum();
            d[i] + tail / b[i]
        })
        .collect();
    SValues { s }
}

fn unrepresentable(op: &str, what: &str, lo: f64, hi: f64) -> Error {
    Error::Unrepresentable(format!("{op} of a {what} term on ({lo}, {hi}]"))
}

/// `G(x) = ∫_x^hi F(t) dt/t` as a form in `x`.
fn dual_antiderivative(f: &Form, lo: f64, hi: f64) -> Result<Form> {
    let inf = hi.is_infinite();
    if f.log_sq != 0.0 {
        return Err(unrepresentable("H*", "squared-log", lo, hi));
    }
    if inf && !f.decays() {
        return Err(Error::NotIntegrable {
            index: 0,
            lo,
            hi,
            msg: "tail is not integrable against dt/t".into(),
        });
    }
    let mut g = Form::zero();
    if f.constant != 0.0 {
        let l = hi.ln();
        g.constant += f.constant * l;
        g.log -= f.constant;
    }
    if f.linear != 0.0 {
        g.constant += f.linear * hi;
        g.linear -= f.linear;
    }
    if f.log != 0.0 {
        let l = hi.ln();
        g.constant += 0.5 * f.log * l * l;
        g.log_sq -= 0.5 * f.log;
    }
    if f.reciprocal != 0.0 {
        g.reciprocal += f.reciprocal;
        if !inf {
            g.constant -= f.reciprocal / hi;
        }
    }
    if f.power != 0.0 {
        let a = f.exponent;
        g = g.add(&Form::power(-f.power / a, a))?;
        if !inf {
            g.constant += f.power / a * hi.powf(a);
        }
    }
    Ok(g.normalized())
}

/// `H* f (x) = ∫_x^∞ f(t) dt/t`, exactly, on the partition of `f`.
pub fn dual_hardy(f: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    let pieces = f.pieces();
    let mut out = Vec::with_capacity(pieces.len());
    let mut tail = 0.0;
    for (i, p) in pieces.iter().enumerate().rev() {
        let g = dual_antiderivative(&p.form, p.lo, p.hi).map_err(|e| match e {
            Error::NotIntegrable { lo, hi, msg, .. } => Error::NotIntegrable {
                index: i,
                lo,
                hi,
                msg,
            },
            other => other,
        })?;
        let image = g.add(&Form::constant(tail))?;
        if p.lo > 0.0 {
            tail += g.eval(p.lo);
        }
        out.push(Piece {
            lo: p.lo,
            hi: p.hi,
            form: image,
        });
    }
    out.reverse();
    PiecewiseFunction::new(out)
}

/// `(1/x) ∫_lo^x F(t) dt` as a form, plus `∫_lo^hi F` (infinite when the
/// last piece has a non-integrable tail, which only matters if it is used).
fn hardy_piece(f: &Form, lo: f64, hi: f64) -> Result<(Form, f64)> {
    if f.reciprocal != 0.0 {
        return Err(unrepresentable("H", "reciprocal", lo, hi));
    }
    // antiderivative A with A(x)/x expressed as a form; `at(x)` evaluates A
    let mut img = Form::zero();
    let mut at_lo = 0.0;
    let mut at_hi = 0.0;
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let xlog2x = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            let l = x.ln();
            x * l * l
        }
    };
    let inf = hi.is_infinite();
    if f.constant != 0.0 {
        img.constant += f.constant;
        at_lo += f.constant * lo;
        at_hi += f.constant * hi;
    }
    if f.linear != 0.0 {
        img.linear += 0.5 * f.linear;
        at_lo += 0.5 * f.linear * lo * lo;
        at_hi += 0.5 * f.linear * hi * hi;
    }
    if f.log != 0.0 {
        // ∫ ln t = t ln t - t
        img.log += f.log;
        img.constant -= f.log;
        at_lo += f.log * (xlogx(lo) - lo);
        at_hi += if inf { f64::INFINITY } else { f.log * (xlogx(hi) - hi) };
    }
    if f.log_sq != 0.0 {
        // ∫ ln² t = t ln² t - 2 t ln t + 2 t
        img.log_sq += f.log_sq;
        img.log -= 2.0 * f.log_sq;
        img.constant += 2.0 * f.log_sq;
        at_lo += f.log_sq * (xlog2x(lo) - 2.0 * xlogx(lo) + 2.0 * lo);
        at_hi += if inf {
            f64::INFINITY
        } else {
            f.log_sq * (xlog2x(hi) - 2.0 * xlogx(hi) + 2.0 * hi)
        };
    }
    if f.power != 0.0 {
        let a1 = f.exponent + 1.0;
        if lo == 0.0 && a1 <= 0.0 {
            return Err(Error::NotIntegrable {
                index: 0,
                lo,
                hi,
                msg: format!("x^{} is not integrable at 0", f.exponent),
            });
        }
        img = img.add(&Form::power(f.power / a1, f.exponent))?;
        at_lo += if lo == 0.0 { 0.0 } else { f.power * lo.powf(a1) / a1 };
        at_hi += if inf {
            if a1 < 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            f.power * hi.powf(a1) / a1
        };
    }
    img.reciprocal -= at_lo;
    Ok((img.normalized(), at_hi - at_lo))
}

/// `H f (x) = (1/x) ∫_0^x f`, exactly. When `f` is supported on `(0, X]`
/// the image gains a `P/x` piece on `(X, ∞)`.
pub fn hardy(f: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    let mut out = Vec::with_capacity(f.pieces().len() + 1);
    let mut prefix = 0.0;
    for (i, p) in f.pieces().iter().enumerate() {
        let (img, mass) = hardy_piece(&p.form, p.lo, p.hi).map_err(|e| match e {
            Error::NotIntegrable { lo, hi, msg, .. } => Error::NotIntegrable {
                index: i,
                lo,
                hi,
                msg,
            },
            other => other,
        })?;
        let form = img.add(&Form::reciprocal(prefix))?;
        out.push(Piece {
            lo: p.lo,
            hi: p.hi,
            form,
        });
        prefix += mass;
    }
    let end = f.support_end();
    if end.is_finite() {
        out.push(Piece {
            lo: end,
            hi: f64::INFINITY,
            form: Form::reciprocal(prefix),
        });
    }
    PiecewiseFunction::new(out)
}

/// `(H* - I) f`.
pub fn dual_osc(f: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    dual_hardy(f)?.sub(f)
}

/// `(H - I) f`.
pub fn hardy_osc(f: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    hardy(f)?.sub(f)
}

/// `(H* - I) f` for a step function: `b_n (S_n - 1 - ln x)` on each step.
///
/// Built from the symbolic pass; for cone inputs it agrees with the
/// `S_n` description.
pub fn dual_osc_step(f: &StepFunction) -> Result<PiecewiseFunction> {
    dual_osc(&f.to_piecewise())
}

/// `(H - I) f` for a step function: `c_n / x` on `(a_{n-1}, a_n]` with
/// `c_n = P_{n-1} - b_n a_{n-1}`, and `P_N / x` beyond `a_N`.
pub fn hardy_osc_step(f: &StepFunction) -> Result<PiecewiseFunction> {
    hardy_osc(&f.to_piecewise())
}

/// Coefficients `c_1..c_N` and total mass `P_N` of `(H - I) f` for a step
/// function.
pub fn hardy_osc_coefficients(f: &StepFunction) -> (Vec<f64>, f64) {
    let mut prefix = 0.0;
    let mut lo = 0.0;
    let mut c = Vec::with_capacity(f.len());
    for (&a, &b) in f.breakpoints().iter().zip(f.values()) {
        c.push(prefix - b * lo);
        prefix += b * (a - lo);
        lo = a;
    }
    (c, prefix)
}

/// `max |(H - I)(H* - I) f (x) - f(x)|` over the grid, skipping points that
/// sit on a breakpoint.
pub fn inversion_residual(f: &StepFunction, grid: &[f64]) -> Result<f64> {
    let image = hardy_osc(&dual_osc_step(f)?)?;
    let bps = f.breakpoints();
    let mut worst: f64 = 0.0;
    for &x in grid {
        if !(x > 0.0) || bps.iter().any(|&a| (x - a).abs() <= 1e-12 * a) {
            continue;
        }
        worst = worst.max((image.eval(x) - f.eval(x)).abs());
    }
    Ok(worst)
}

/// `n` log-spaced points spanning `[a_1 / 100, 2 a_N]`.
pub fn default_grid(f: &StepFunction, n: usize) -> Vec<f64> {
    let lo = (f.breakpoints()[0] / 100.0).ln();
    let hi = (2.0 * f.support_end()).ln();
    if n == 1 {
        return vec![lo.exp()];
    }
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{family, make_step, FamilyKind, PieceKind};
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn s_values_examples() {
        let one = make_step(vec![3.0], vec![2.0]).unwrap();
        assert!(close(s_values(&one).unwrap().s[0], 3f64.ln(), 1e-15));

        let two = make_step(vec![1.0, E], vec![2.0, 1.0]).unwrap();
        let s = s_values(&two).unwrap().s;
        assert!(close(s[0], 0.5, 1e-15) && close(s[1], 1.0, 1e-15), "{s:?}");
        let direct = s_values_direct(&two).s;
        assert!(close(direct[0], 0.5, 1e-15) && close(direct[1], 1.0, 1e-15));

        let up = make_step(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(s_values(&up), Err(Error::NotInCone(_))));
    }

    #[test]
    fn dual_hardy_of_indicator() {
        let chi = family(FamilyKind::Chi01, 0.0).unwrap();
        let img = dual_hardy(&chi).unwrap();
        assert_eq!(img.pieces().len(), 1);
        assert_eq!(img.pieces()[0].kind(), PieceKind::LogAffine { u: 0.0, v: -1.0 });
        assert_eq!(img.eval(2.0), 0.0);
        let osc = dual_osc(&chi).unwrap();
        assert_eq!(osc.pieces()[0].kind(), PieceKind::LogAffine { u: -1.0, v: -1.0 });
    }

    #[test]
    fn dual_hardy_maps_g_to_f() {
        for &q in &[1.5, 2.0, 3.7] {
            let img = dual_hardy(&family(FamilyKind::GQ, q).unwrap()).unwrap();
            let fq = family(FamilyKind::FQ, q).unwrap();
            for &x in &[0.01, 0.5, 1.0, 1.5, 10.0, 1e4] {
                assert!(close(img.eval(x), fq.eval(x), 1e-14), "q={q} x={x}");
            }
        }
    }

    #[test]
    fn dual_hardy_of_k_eps() {
        let eps = 0.25;
        let img = dual_hardy(&family(FamilyKind::KEps, eps).unwrap()).unwrap();
        for &t in &[0.1, 0.5, 0.75, 0.8, 0.9, 0.99, 1.0, 1.5] {
            let want = if t < 1.0 { (1.0f64).min((1.0 - t) / eps) } else { 0.0 };
            assert!(close(img.eval(t), want, 1e-14), "t={t}");
        }
    }

    #[test]
    fn hardy_examples() {
        let chi = family(FamilyKind::Chi01, 0.0).unwrap();
        let h = hardy(&chi).unwrap();
        assert_eq!(h.eval(0.5), 1.0);
        assert!(close(h.eval(4.0), 0.25, 1e-15));
        let osc = hardy_osc(&chi).unwrap();
        assert_eq!(osc.eval(0.5), 0.0);
        assert!(close(osc.eval(3.0), 1.0 / 3.0, 1e-15));

        let two = make_step(vec![1.0, E], vec![2.0, 1.0]).unwrap();
        let osc = hardy_osc_step(&two).unwrap();
        assert!(osc.eval(0.5).abs() < 1e-15);
        assert!(close(osc.eval(2.0), 0.5, 1e-15));
        assert!(close(osc.eval(5.0), (E + 1.0) / 5.0, 1e-15));
        let (c, total) = hardy_osc_coefficients(&two);
        assert_eq!(c[0], 0.0);
        assert!(close(c[1], 1.0, 1e-15) && close(total, E + 1.0, 1e-15));
    }

    #[test]
    fn dual_osc_step_matches_s_values() {
        let two = make_step(vec![1.0, E], vec![2.0, 1.0]).unwrap();
        let img = dual_osc_step(&two).unwrap();
        for &x in &[0.1f64, 0.5, 1.0, 1.5, 2.7] {
            let want = if x <= 1.0 {
                2.0 * (0.5 - 1.0 - x.ln())
            } else {
                1.0 - 1.0 - x.ln()
            };
            assert!(close(img.eval(x), want, 1e-14), "x={x}");
        }
        assert_eq!(img.eval(3.0), 0.0);
        assert_eq!(img.support_end(), E);
    }

    #[test]
    fn f_q_oscillation_closed_form() {
        let q = 2.5;
        let img = dual_osc(&family(FamilyKind::FQ, q).unwrap()).unwrap();
        for &x in &[0.2, 0.9, 1.0] {
            assert!(close(img.eval(x), q - 1.0 - x.ln(), 1e-14));
        }
        for &x in &[1.5, 7.0, 300.0] {
            assert!(close(img.eval(x), (q - 1.0) * x.powf(-1.0 / q), 1e-14));
        }
    }

    #[test]
    fn g_q_shift_identity() {
        // (H* - qI) g_q = χ_(0,1)
        let q = 2.2;
        let g = family(FamilyKind::GQ, q).unwrap();
        let hg = dual_hardy(&g).unwrap();
        for &x in &[0.1, 0.7, 1.3, 5.0, 80.0] {
            let v = hg.eval(x) - q * g.eval(x);
            let want = if x < 1.0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-14, "x={x} v={v}");
        }
    }

    #[test]
    fn f_minus_g_composition() {
        let q = 2.4;
        let fg = family(FamilyKind::FQMinusGQ, q).unwrap();
        let img = dual_osc(&fg).unwrap();
        for &x in &[0.3, 0.99] {
            assert!(close(img.eval(x), q - 2.0 - x.ln(), 1e-14));
        }
        for &x in &[2.0f64, 40.0] {
            let want = (q - 1.0).powi(2) / q * x.powf(-1.0 / q);
            assert!(close(img.eval(x), want, 1e-14));
        }
        // (H - I)(f_q - g_q) = g_q
        let back = hardy_osc(&fg).unwrap();
        let g = family(FamilyKind::GQ, q).unwrap();
        for &x in &[0.3, 0.99, 2.0, 40.0] {
            assert!((back.eval(x) - g.eval(x)).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn inversion_on_examples() {
        let chi = make_step(vec![1.0], vec![1.0]).unwrap();
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 * 0.0213).collect();
        assert!(inversion_residual(&chi, &grid).unwrap() <= 1e-12);
        let two = make_step(vec![1.0, E], vec![2.0, 1.0]).unwrap();
        assert!(inversion_residual(&two, &default_grid(&two, 100)).unwrap() <= 1e-12);
    }

    #[test]
    fn unsupported_terms_are_reported() {
        let bad = PiecewiseFunction::new(vec![
            Piece::new(0.0, 1.0, Form::constant(1.0)).unwrap(),
            Piece::new(1.0, f64::INFINITY, Form::reciprocal(1.0)).unwrap(),
        ])
        .unwrap();
        assert!(matches!(hardy(&bad), Err(Error::Unrepresentable(_))));
        let sq = PiecewiseFunction::new(vec![Piece::new(
            0.0,
            1.0,
            Form {
                log_sq: 1.0,
                ..Form::zero()
            },
        )
        .unwrap()])
        .unwrap();
        assert!(dual_hardy(&sq).is_err());
    }
}
