//! Exact `L^p` norms of piecewise functions and of operator images.
//!
//! For a cone step function `f = Σ b_n χ_(a_{n-1}, a_n]`,
//!
//! ```text
//! ‖(H* - I) f‖_p^p = Σ_n b_n^p [a_n h(S_n - d_n) - a_{n-1} h(S_n - d_{n-1})]
//! ```
//!
//! with `d_n = ln a_n`, the `S_n` of [`crate::operators::s_values`] and the
//! `h` kernel. The `n = 1` left term is the limit `a h(S - ln a) → 0` as
//! `a → 0`.

use serde::{Deserialize, Serialize};

use crate::cone::{Form, Piece, PieceKind, PiecewiseFunction, StepFunction};
use crate::error::{domain, Error, Result};
use crate::output::fmt_f64;
use crate::kernel::{exp_moment, integrate_with_breaks, HEvaluator};
use crate::operators::{dual_osc, hardy_osc, hardy_osc_coefficients, s_values, s_values_direct};

/// Tolerance of the quadrature fallback for pieces without a closed form.
pub const FALLBACK_TOL: f64 = 1e-12;

fn check_p(op: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("need finite p > 0, got {p}")))
    }
}

/// `‖f‖_p^p` of a step function: `Σ b_n^p (a_n - a_{n-1})`.
pub fn lp_pow_step(f: &StepFunction, p: f64) -> Result<f64> {
    check_p("lp_pow", p)?;
    let mut lo = 0.0;
    let mut sum = 0.0;
    for (&a, &b) in f.breakpoints().iter().zip(f.values()) {
        sum += b.powf(p) * (a - lo);
        lo = a;
    }
    Ok(sum)
}

/// `‖f‖_p^p` of a piecewise function, summed piece by piece in order.
pub fn lp_pow(f: &PiecewiseFunction, p: f64) -> Result<f64> {
    check_p("lp_pow", p)?;
    let ev = HEvaluator::new(p)?;
    let mut sum = 0.0;
    for (i, piece) in f.pieces().iter().enumerate() {
        sum += piece_lp_pow(piece, p, &ev, i)?;
    }
    Ok(sum)
}

fn not_integrable(index: usize, piece: &Piece, msg: impl Into<String>) -> Error {
    Error::NotIntegrable {
        index,
        lo: piece.lo,
        hi: piece.hi,
        msg: msg.into(),
    }
}

/// `k ∫_lo^hi x^β dx`.
fn power_integral(k: f64, beta: f64, piece: &Piece, index: usize) -> Result<f64> {
    let (lo, hi) = (piece.lo, piece.hi);
    let b1 = beta + 1.0;
    if hi.is_infinite() && b1 >= 0.0 {
        return Err(not_integrable(index, piece, format!("x^{beta} is not integrable at infinity")));
    }
    if lo == 0.0 && b1 <= 0.0 {
        return Err(not_integrable(index, piece, format!("x^{beta} is not integrable at 0")));
    }
    let v = if lo == 0.0 {
        hi.powf(b1) / b1
    } else if hi.is_infinite() {
        -lo.powf(b1) / b1
    } else if b1 == 0.0 {
        (hi / lo).ln()
    } else {
        // lo^{β+1} (e^{(β+1) ln(hi/lo)} - 1) / (β+1), stable near β = -1
        lo.powf(b1) * (b1 * (hi / lo).ln()).exp_m1() / b1
    };
    Ok(k * v)
}

fn piece_lp_pow(piece: &Piece, p: f64, ev: &HEvaluator, index: usize) -> Result<f64> {
    match piece.kind() {
        PieceKind::Constant(c) => {
            if c == 0.0 {
                Ok(0.0)
            } else if piece.hi.is_infinite() {
                Err(not_integrable(index, piece, "nonzero constant on an infinite tail"))
            } else {
                Ok(c.abs().powf(p) * (piece.hi - piece.lo))
            }
        }
        PieceKind::Power { c, alpha } => power_integral(c.abs().powf(p), p * alpha, piece, index),
        PieceKind::Reciprocal(c) => power_integral(c.abs().powf(p), -p, piece, index),
        PieceKind::LogAffine { u, v } => log_affine_lp_pow(u, v, piece, p, ev, index),
        PieceKind::LinearPlusLog { .. } | PieceKind::General(_) => {
            quadrature_lp_pow(&piece.form, piece, p, FALLBACK_TOL, index)
        }
    }
}

/// `∫_lo^hi |u + v ln x|^p dx` with `v ≠ 0`.
///
/// Writing `u + v ln x = -v (S - 1 - ln x)` with `S = 1 - u/v`, the part of
/// the interval left of `e^S` is `X h(S - ln X)` evaluated between the
/// endpoints; the part right of `e^S` is an exponential moment.
fn log_affine_lp_pow(
    u: f64,
    v: f64,
    piece: &Piece,
    p: f64,
    ev: &HEvaluator,
    index: usize,
) -> Result<f64> {
    if piece.hi.is_infinite() {
        return Err(not_integrable(index, piece, "logarithm on an infinite tail"));
    }
    let s = 1.0 - u / v;
    let split = s.exp();
    let left_of = |x: f64| -> Result<f64> {
        // ∫_0^x |S - 1 - ln t|^p dt for x <= e^S
        if x == 0.0 {
            Ok(0.0)
        } else {
            Ok(x * ev.h((s - x.ln()).max(0.0))?)
        }
    };
    let mut total = 0.0;
    if piece.lo < split {
        let hi = piece.hi.min(split);
        total += left_of(hi)? - left_of(piece.lo)?;
    }
    if piece.hi > split {
        let lo = piece.lo.max(split);
        let w_lo = (lo.ln() - s).max(0.0);
        let w_hi = piece.hi.ln() - s;
        if 1.0 + w_hi <= 40.0 {
            // e^{S-1} ∫_{1+w_lo}^{1+w_hi} t^p e^t dt
            let m = exp_moment(1.0 + w_hi, p)? - exp_moment(1.0 + w_lo, p)?;
            total += (s - 1.0).exp() * m;
        } else {
            let right = Piece {
                lo,
                hi: piece.hi,
                form: piece.form,
            };
            return Ok(v.abs().powf(p) * total
                + quadrature_lp_pow(&piece.form, &right, p, FALLBACK_TOL, index)?);
        }
    }
    Ok(v.abs().powf(p) * total)
}

/// Sign changes of `form` on the piece, located by sampling in `ln x` and
/// bisection. Exact for forms that are quadratic in `ln x`.
fn form_roots(form: &Form, lo: f64, hi: f64) -> Vec<f64> {
    let in_range = |x: f64| x > lo && x < hi && x.is_finite();
    if form.linear == 0.0 && form.reciprocal == 0.0 && form.power == 0.0 {
        // constant + log L + log_sq L^2
        let (a, b, c) = (form.log_sq, form.log, form.constant);
        let mut ls = Vec::new();
        if a == 0.0 {
            if b != 0.0 {
                ls.push(-c / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc > 0.0 {
                let sq = disc.sqrt();
                let qv = -0.5 * (b + b.signum() * sq);
                ls.push(qv / a);
                if qv != 0.0 {
                    ls.push(c / qv);
                }
            }
        }
        let mut xs: Vec<f64> = ls.into_iter().map(f64::exp).filter(|&x| in_range(x)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return xs;
    }
    let l_lo = if lo > 0.0 { lo.ln() } else { hi.ln() - 60.0 };
    let l_hi = if hi.is_finite() { hi.ln() } else { lo.max(1.0).ln() + 60.0 };
    const SAMPLES: usize = 256;
    let g = |l: f64| form.eval(l.exp());
    let mut roots = Vec::new();
    let mut prev_l = l_lo;
    let mut prev_v = g(l_lo);
    for i in 1..=SAMPLES {
        let l = l_lo + (l_hi - l_lo) * i as f64 / SAMPLES as f64;
        let v = g(l);
        if prev_v == 0.0 {
            roots.push(prev_l.exp());
        } else if prev_v * v < 0.0 {
            let (mut a, mut b) = (prev_l, l);
            let mut fa = prev_v;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = g(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fa < 0.0) == (fm < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push((0.5 * (a + b)).exp());
        }
        prev_l = l;
        prev_v = v;
    }
    roots.retain(|&x| in_range(x));
    roots
}

/// `∫_piece |form|^p dx` by quadrature, split at the zeros of the form.
/// Left endpoints at 0 use `x = hi e^{-y}`, infinite right endpoints use
/// `x = lo e^{y}`, and wide finite pieces are integrated in `ln x`.
pub fn quadrature_lp_pow(form: &Form, piece: &Piece, p: f64, tol: f64, index: usize) -> Result<f64> {
    let (lo, hi) = (piece.lo, piece.hi);
    if lo == 0.0 && hi.is_infinite() {
        let left = Piece { lo: 0.0, hi: 1.0, form: *form };
        let right = Piece { lo: 1.0, hi, form: *form };
        return Ok(quadrature_lp_pow(form, &left, p, tol, index)?
            + quadrature_lp_pow(form, &right, p, tol, index)?);
    }
    let roots = form_roots(form, lo, hi);
    let integrand = |x: f64| form.eval(x).abs().powf(p);
    let result = if lo == 0.0 {
        let breaks: Vec<f64> = roots.iter().map(|r| (hi / r).ln()).collect();
        integrate_with_breaks(
            |y| {
                let x = hi * (-y).exp();
                if x == 0.0 {
                    0.0
                } else {
                    integrand(x) * x
                }
            },
            0.0,
            f64::INFINITY,
            &breaks,
            tol,
        )
    } else if hi.is_infinite() {
        let breaks: Vec<f64> = roots.iter().map(|r| (r / lo).ln()).collect();
        integrate_with_breaks(
            |y| {
                let x = lo * y.exp();
                if x.is_infinite() {
                    0.0
                } else {
                    integrand(x) * x
                }
            },
            0.0,
            f64::INFINITY,
            &breaks,
            tol,
        )
    } else if hi / lo > 4.0 {
        let breaks: Vec<f64> = roots.iter().map(|r| r.ln()).collect();
        integrate_with_breaks(
            |l| {
                let x = l.exp();
                integrand(x) * x
            },
            lo.ln(),
            hi.ln(),
            &breaks,
            tol,
        )
    } else {
        integrate_with_breaks(integrand, lo, hi, &roots, tol)
    };
    result.map(|r| r.value).map_err(|e| match e {
        Error::Domain { msg, .. } => not_integrable(index, piece, msg),
        other => other,
    })
}

/// `‖(H* - I) f‖_p^p` for a cone step function, via the `h` kernel.
pub fn dual_osc_pow(f: &StepFunction, p: f64) -> Result<f64> {
    check_p("dual_osc_pow", p)?;
    let ev = HEvaluator::new(p)?;
    dual_osc_pow_with(f, &ev)
}

/// [`dual_osc_pow`] with a caller-supplied evaluator.
pub fn dual_osc_pow_with(f: &StepFunction, ev: &HEvaluator) -> Result<f64> {
    let p = ev.p();
    let s = s_values(f)?.s;
    let a = f.breakpoints();
    let b = f.values();
    let mut sum = 0.0;
    for n in 0..b.len() {
        let d_n = a[n].ln();
        let right = a[n] * ev.h((s[n] - d_n).max(0.0))?;
        let left = if n == 0 {
            0.0
        } else {
            a[n - 1] * ev.h((s[n] - a[n - 1].ln()).max(0.0))?
        };
        sum += b[n].powf(p) * (right - left);
    }
    Ok(sum)
}

/// Per-interval terms `A_n` of [`dual_osc_pow`].
pub fn dual_osc_terms(f: &StepFunction, p: f64) -> Result<Vec<f64>> {
    let ev = HEvaluator::new(p)?;
    let s = s_values(f)?.s;
    let a = f.breakpoints();
    let b = f.values();
    (0..b.len())
        .map(|n| {
            let right = a[n] * ev.h((s[n] - a[n].ln()).max(0.0))?;
            let left = if n == 0 {
                0.0
            } else {
                a[n - 1] * ev.h((s[n] - a[n - 1].ln()).max(0.0))?
            };
            Ok(b[n].powf(p) * (right - left))
        })
        .collect()
}

/// `‖(H* - I) f‖_p^p` for any positive step function by quadrature of
/// `|b_n (S_n - 1 - ln x)|^p` on each interval, in the variable `ln x`,
/// with `S_n` from its defining sum. Shares no code with the `h` route.
pub fn dual_osc_pow_quadrature(f: &StepFunction, p: f64, tol: f64) -> Result<f64> {
    check_p("dual_osc_pow_quadrature", p)?;
    let s = s_values_direct(f).s;
    let d = f.log_breakpoints();
    let b = f.values();
    let mut sum = 0.0;
    for n in 0..b.len() {
        let root = s[n] - 1.0;
        let bp = b[n].powf(p);
        let v = if n == 0 {
            // ln x = d_1 - y, y ∈ [0, ∞)
            integrate_with_breaks(
                |y| (p * (root - d[0] + y).abs().ln() + d[0] - y).exp(),
                0.0,
                f64::INFINITY,
                &[d[0] - root],
                tol,
            )?
        } else {
            integrate_with_breaks(
                |l| (p * (root - l).abs().ln() + l).exp(),
                d[n - 1],
                d[n],
                &[root],
                tol,
            )?
        };
        sum += bp * v.value;
    }
    Ok(sum)
}

/// `‖(H - I) f‖_p^p` for a step function, `p > 1`:
/// `Σ_{n≥2} |c_n|^p (a_{n-1}^{1-p} - a_n^{1-p})/(p-1) + P_N^p a_N^{1-p}/(p-1)`.
pub fn hardy_osc_pow(f: &StepFunction, p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain(
            "hardy_osc_pow",
            format!("need p > 1 (the 1/x tail is not in L^p otherwise), got {p}"),
        ));
    }
    let (c, total) = hardy_osc_coefficients(f);
    let a = f.breakpoints();
    let q = 1.0 - p;
    let mut sum = 0.0;
    for n in 1..c.len() {
        if c[n] == 0.0 {
            continue;
        }
        // (a_{n-1}^{1-p} - a_n^{1-p}) / (p - 1)
        let span = a[n - 1].powf(q) * -(q * (a[n] / a[n - 1]).ln()).exp_m1() / (p - 1.0);
        sum += c[n].abs().powf(p) * span;
    }
    let end = *a.last().unwrap();
    sum += total.powf(p) * end.powf(q) / (p - 1.0);
    Ok(sum)
}

/// Norms and ratios compared by the sharp inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub p: f64,
    pub norm_f: f64,
    pub norm_hardy_osc: f64,
    pub norm_dual_osc: f64,
    pub ratio_dual: f64,
    pub ratio_hardy: f64,
    pub ratio_dual_over_hardy: f64,
}

impl NormReport {
    pub const CSV_HEADER: &'static str =
        "p,norm_f,norm_hardy_osc,norm_dual_osc,ratio_dual,ratio_hardy,ratio_dual_over_hardy";

    fn from_pows(p: f64, f: f64, hardy: f64, dual: f64) -> Self {
        let root = |x: f64| x.powf(1.0 / p);
        let (nf, nh, nd) = (root(f), root(hardy), root(dual));
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
        NormReport {
            p,
            norm_f: nf,
            norm_hardy_osc: nh,
            norm_dual_osc: nd,
            ratio_dual: ratio(nd, nf),
            ratio_hardy: ratio(nh, nf),
            ratio_dual_over_hardy: ratio(nd, nh),
        }
    }

    pub fn csv_row(&self) -> String {
        [
            self.p,
            self.norm_f,
            self.norm_hardy_osc,
            self.norm_dual_osc,
            self.ratio_dual,
            self.ratio_hardy,
            self.ratio_dual_over_hardy,
        ]
        .map(fmt_f64)
        .join(",")
    }
}

/// Norm report for a step function (`p > 1`). Cone inputs use the `h`
/// formula; others fall back to the symbolic image.
pub fn norm_report(f: &StepFunction, p: f64) -> Result<NormReport> {
    let nf = lp_pow_step(f, p)?;
    let nh = hardy_osc_pow(f, p)?;
    let nd = if f.is_cone() {
        dual_osc_pow(f, p)?
    } else {
        lp_pow(&dual_osc(&f.to_piecewise())?, p)?
    };
    Ok(NormReport::from_pows(p, nf, nh, nd))
}

/// Norm report for a piecewise function, through its symbolic images.
pub fn norm_report_piecewise(f: &PiecewiseFunction, p: f64) -> Result<NormReport> {
    if !(p > 1.0) {
        return Err(domain("norm_report", format!("need p > 1, got {p}")));
    }
    let nf = lp_pow(f, p)?;
    let nh = lp_pow(&hardy_osc(f)?, p)?;
    let nd = lp_pow(&dual_osc(f)?, p)?;
    Ok(NormReport::from_pows(p, nf, nh, nd))
}
