//! Lemma-level checks and the bundled verification suites.
//!
//! Every check reduces to a signed violation, positive when the asserted
//! inequality fails. A report passes when its worst violation is at most
//! its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{random_cone_sample, random_step, sample_seed, SampleScale, StepFunction};
use crate::constants::{cp, dual_bounds, p_grid, property_scan, proposition_bracket, sharp};
use crate::error::{domain, Result};
use crate::exec::{map_indexed, Parallelism};
use crate::extremal::{family_scan, keps_scan};
use crate::kernel::special::EULER_GAMMA;
use crate::kernel::{integrate_with_breaks, HEvaluator};
use crate::norms::{dual_osc_pow, dual_osc_pow_quadrature, hardy_osc_pow, lp_pow, lp_pow_step};
use crate::operators::{default_grid, dual_hardy, dual_osc, inversion_residual};

/// How many worst cases a report keeps.
pub const DETAIL_COUNT: usize = 3;

/// Quadrature target inside the lemma checks.
const LEMMA_QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub label: String,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub samples: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: Option<Vec<WorstCase>>,
}

impl VerificationReport {
    pub fn new(
        name: &str,
        samples: usize,
        worst: f64,
        tolerance: f64,
        details: Option<Vec<WorstCase>>,
    ) -> Self {
        Self {
            check_name: name.to_string(),
            samples,
            worst_violation: worst,
            tolerance,
            passed: worst <= tolerance,
            details,
        }
    }

    /// Builds a report from labelled violations; errors count as infinite
    /// violations and keep their message in the label.
    fn collect(name: &str, tolerance: f64, cases: Vec<(String, Result<f64>)>) -> Self {
        let samples = cases.len();
        let mut scored: Vec<(usize, String, f64)> = cases
            .into_iter()
            .enumerate()
            .map(|(i, (label, r))| match r {
                Ok(v) if !v.is_nan() => (i, label, v),
                Ok(_) => (i, format!("{label}: NaN"), f64::INFINITY),
                Err(e) => (i, format!("{label}: {e}"), f64::INFINITY),
            })
            .collect();
        scored.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        let worst = scored.first().map_or(f64::NEG_INFINITY, |c| c.2);
        let details = scored
            .into_iter()
            .take(DETAIL_COUNT)
            .map(|(_, label, violation)| WorstCase { label, violation })
            .collect();
        Self::new(name, samples, worst, tolerance, Some(details))
    }
}

/// `(lhs - rhs) / |rhs|`, or `lhs - rhs` when `rhs = 0`: positive when
/// `lhs ≤ rhs` fails.
pub fn rel_excess(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        lhs - rhs
    } else {
        (lhs - rhs) / rhs.abs()
    }
}

/// Violation of `lower ≤ x ≤ upper`, relative to the bounds.
pub fn band_violation(x: f64, lower: f64, upper: f64) -> f64 {
    rel_excess(lower, x).max(rel_excess(x, upper))
}

fn fmt_p(p: f64) -> String {
    format!("{p}")
}

// ---------------------------------------------------------------------------
// Lemma checks
// ---------------------------------------------------------------------------

/// `n` equally spaced points on `(0, hi]`.
pub fn open_grid(hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| hi * i as f64 / n as f64).collect()
}

/// `n` equally spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Convexity of `t ↦ h(t^{1/p} u)`: `h(t^{1/p} u) ≤ (1-t) h(0) + t h(u)` for
/// `1 < p ≤ 2`, reversed for `p ≥ 2`; at `p = 2` both sides agree and the
/// absolute difference is reported.
pub fn check_lemma_tech(p: f64, u_grid: &[f64], t_grid: &[f64]) -> Result<VerificationReport> {
    if !(p > 1.0) {
        return Err(domain("check_lemma_tech", format!("need p > 1, got {p}")));
    }
    if u_grid.iter().any(|&u| !(u > 0.0)) || t_grid.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(domain("check_lemma_tech", "need u > 0 and t in [0, 1]"));
    }
    let ev = HEvaluator::new(p)?;
    let h0 = ev.h0();
    let mut cases = Vec::with_capacity(u_grid.len() * t_grid.len());
    for &u in u_grid {
        let hu = ev.h(u)?;
        for &t in t_grid {
            let lhs = ev.h(t.powf(1.0 / p) * u)?;
            let rhs = (1.0 - t) * h0 + t * hu;
            let scale = rhs.abs().max(1.0);
            let v = if p == 2.0 {
                (lhs - rhs).abs() / scale
            } else if p < 2.0 {
                (lhs - rhs) / scale
            } else {
                (rhs - lhs) / scale
            };
            cases.push((format!("u={u} t={t}"), Ok(v)));
        }
    }
    Ok(VerificationReport::collect(&format!("lemma_tech_p{}", fmt_p(p)), 1e-10, cases))
}

/// `e^r ∫_r^∞ |y - 1|^{p-2} φ(y) e^{-y} dy` for `p > 1`. For `p < 2` the
/// singular factor is absorbed by `u = |y - 1|^{p-1}`, which turns
/// `|y - 1|^{p-2} dy` into `du / (p - 1)` on each side of `y = 1`.
pub fn singular_moment<F: Fn(f64) -> f64>(p: f64, r: f64, phi: F, tol: f64) -> Result<f64> {
    if !(p > 1.0) || !(r >= 0.0) {
        return Err(domain("singular_moment", format!("need p > 1 and r >= 0, got p={p}, r={r}")));
    }
    let weighted = |y: f64| {
        let w = (r - y).exp();
        if w == 0.0 || !y.is_finite() {
            0.0
        } else {
            phi(y) * w
        }
    };
    if p >= 2.0 {
        let q = p - 2.0;
        let f = |y: f64| {
            let d = (y - 1.0).abs();
            let k = if q == 0.0 { 1.0 } else { d.powf(q) };
            k * weighted(y)
        };
        return Ok(integrate_with_breaks(f, r, f64::INFINITY, &[1.0], tol)?.value);
    }
    let c = p - 1.0;
    let k = 1.0 / c;
    let mut total = 0.0;
    if r < 1.0 {
        let top = (1.0 - r).powf(c);
        total += integrate_with_breaks(|w| weighted(1.0 - w.powf(k)), 0.0, top, &[], tol)?.value;
    }
    let start = if r > 1.0 { (r - 1.0).powf(c) } else { 0.0 };
    total += integrate_with_breaks(|u| weighted(1.0 + u.powf(k)), start, f64::INFINITY, &[], tol)?
        .value;
    Ok(total / c)
}

/// `g(s) = s ∫_s^∞ |y-1|^{p-2} e^{-y} dy - ∫_s^∞ |y-1|^{p-2} (y-1) e^{-y} dy`.
pub fn g_function(p: f64, s: f64) -> Result<f64> {
    let m = singular_moment(p, s, |y| s + 1.0 - y, LEMMA_QUAD_TOL)?;
    Ok((-s).exp() * m)
}

/// Sign of `g` on the grid (`g ≥ 0` for `1 < p < 2`, `g ≤ 0` for `p > 2`,
/// `g = 0` at `p = 2`), the value `g(0) = (1 - C_p)/p`, and decay at the
/// largest grid point, measured as `|g(s)| / max(1, s^{p-2})`.
pub fn check_g_function(p: f64, s_grid: &[f64]) -> Result<Vec<VerificationReport>> {
    if !(p > 1.0) || s_grid.is_empty() || s_grid.iter().any(|&s| !(s > 0.0)) {
        return Err(domain("check_g_function", "need p > 1 and a nonempty grid in (0, ∞)"));
    }
    let tag = fmt_p(p);
    let cases = s_grid
        .iter()
        .map(|&s| {
            let v = g_function(p, s).map(|g| {
                if p < 2.0 {
                    -g
                } else if p > 2.0 {
                    g
                } else {
                    g.abs()
                }
            });
            (format!("s={s}"), v)
        })
        .collect();
    let sign = VerificationReport::collect(&format!("g_sign_p{tag}"), 1e-9, cases);

    let want = (1.0 - cp(p)?) / p;
    let g0 = g_function(p, 0.0).map(|g| (g - want).abs());
    let zero = VerificationReport::collect(&format!("g_at_zero_p{tag}"), 1e-9, vec![("s=0".into(), g0)]);

    let s_max = s_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // the tail behaves like s^{p-2} e^{-s}; divide out the power factor
    let envelope = s_max.powf(p - 2.0).max(1.0);
    let tail = g_function(p, s_max).map(|g| g.abs() / envelope);
    let decay =
        VerificationReport::collect(&format!("g_decay_p{tag}"), 1e-4, vec![(format!("s={s_max}"), tail)]);
    Ok(vec![sign, zero, decay])
}

/// The two integral identities behind the convexity lemma, checked by
/// quadrature against the `h` kernel, plus `h(0) = C_p`.
pub fn check_identities(p: f64, r_grid: &[f64]) -> Result<Vec<VerificationReport>> {
    if !(p > 1.0) || r_grid.iter().any(|&r| !(r >= 0.0)) {
        return Err(domain("check_identities", "need p > 1 and r >= 0"));
    }
    let ev = HEvaluator::new(p)?;
    let tag = fmt_p(p);
    let mut id1 = Vec::new();
    let mut id2 = Vec::new();
    for &r in r_grid {
        let v1 = (|| {
            let m1 = singular_moment(p, r, |y| y - 1.0, LEMMA_QUAD_TOL)?;
            let rhs = ev.h(r)? - (r - 1.0).abs().powf(p);
            Ok((p * m1 - rhs).abs() / rhs.abs().max(1.0))
        })();
        id1.push((format!("r={r}"), v1));
        if r == 1.0 && p < 2.0 {
            continue;
        }
        let v2 = (|| {
            let m0 = singular_moment(p, r, |_| 1.0, LEMMA_QUAD_TOL)?;
            let m1 = singular_moment(p, r, |y| y - 1.0, LEMMA_QUAD_TOL)?;
            let d = r - 1.0;
            let edge = if d == 0.0 { 0.0 } else { d.abs().powf(p - 2.0) * d };
            let rhs = m1 - edge;
            Ok(((p - 1.0) * m0 - rhs).abs() / rhs.abs().max(1.0))
        })();
        id2.push((format!("r={r}"), v2));
    }
    let c = cp(p)?;
    let tie = vec![("r=0".to_string(), Ok(((ev.h0() - c) / c).abs()))];
    Ok(vec![
        VerificationReport::collect(&format!("identity_1_p{tag}"), 1e-9, id1),
        VerificationReport::collect(&format!("identity_2_p{tag}"), 1e-9, id2),
        VerificationReport::collect(&format!("h0_equals_cp_p{tag}"), 1e-12, tie),
    ])
}

// ---------------------------------------------------------------------------
// Randomized sweeps
// ---------------------------------------------------------------------------

/// Where the exponent of each sweep pair comes from.
#[derive(Debug, Clone, Copy)]
enum PRange {
    /// uniform on `[1, 4]`
    Closed,
    /// uniform on `(1, 4]`
    OpenAtOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub samples: usize,
    pub seed: u64,
    /// Fixed exponents; each sample is checked at every grid point. When
    /// absent each sample draws its own exponent.
    pub p_grid: Option<Vec<f64>>,
    pub n_max: usize,
    pub scale: SampleScale,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl SweepConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            p_grid: None,
            n_max: 8,
            scale: SampleScale::default(),
            parallelism: Parallelism::default(),
        }
    }
}

fn sample_p(seed: u64, index: u64, range: PRange) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(sample_seed(seed, index), 1));
    match range {
        PRange::Closed => 1.0 + 3.0 * rng.random_range(0.0..=1.0),
        PRange::OpenAtOne => 4.0 - 3.0 * rng.random::<f64>(),
    }
}

/// The `(sample index, p)` pairs of a sweep.
fn pairs(cfg: &SweepConfig, range: PRange) -> Vec<(usize, f64)> {
    match &cfg.p_grid {
        Some(grid) => {
            let keep: Vec<f64> = grid
                .iter()
                .copied()
                .filter(|&p| match range {
                    PRange::Closed => p >= 1.0,
                    PRange::OpenAtOne => p > 1.0,
                })
                .collect();
            (0..cfg.samples)
                .flat_map(|i| keep.iter().map(move |&p| (i, p)))
                .collect()
        }
        None => (0..cfg.samples)
            .map(|i| (i, sample_p(cfg.seed, i as u64, range)))
            .collect(),
    }
}

fn cone_sample(cfg: &SweepConfig, index: usize) -> StepFunction {
    random_cone_sample(sample_seed(cfg.seed, index as u64), cfg.n_max, &cfg.scale)
}

fn run_sweep<F>(name: &str, tolerance: f64, cfg: &SweepConfig, range: PRange, check: F) -> VerificationReport
where
    F: Fn(&StepFunction, f64) -> Result<f64> + Sync,
{
    let pairs = pairs(cfg, range);
    let cases = map_indexed(pairs.len(), cfg.parallelism, |k| {
        let (i, p) = pairs[k];
        let f = cone_sample(cfg, i);
        (format!("sample={i} p={p}"), check(&f, p))
    });
    VerificationReport::collect(name, tolerance, cases)
}

/// `‖(H* - I) f‖ / ‖f‖` between `p - 1` and `C_p^{1/p}` (ordered by regime)
/// for `p ∈ [1, 4]`.
pub fn sweep_dual(cfg: &SweepConfig) -> VerificationReport {
    run_sweep("dual_bounds", 1e-12, cfg, PRange::Closed, |f, p| {
        let (lo, hi) = dual_bounds(p)?;
        let r = (dual_osc_pow(f, p)? / lp_pow_step(f, p)?).powf(1.0 / p);
        Ok(band_violation(r, lo, hi))
    })
}

/// `‖(H - I) f‖ / ‖f‖` between `(p-1)^{-1/p}` and `(p-1)^{-1}`.
pub fn sweep_hardy(cfg: &SweepConfig) -> VerificationReport {
    run_sweep("hardy_bounds", 1e-12, cfg, PRange::OpenAtOne, |f, p| {
        let s = sharp(p)?;
        let r = (hardy_osc_pow(f, p)? / lp_pow_step(f, p)?).powf(1.0 / p);
        Ok(band_violation(r, s.hardy_lower, s.hardy_upper))
    })
}

/// `‖(H* - I) f‖ / ‖(H - I) f‖` between `(p-1)^2` and `C_p^{1/p}(p-1)^{1/p}`.
pub fn sweep_compare(cfg: &SweepConfig) -> VerificationReport {
    run_sweep("compare_bounds", 1e-12, cfg, PRange::OpenAtOne, |f, p| {
        let s = sharp(p)?;
        let r = (dual_osc_pow(f, p)? / hardy_osc_pow(f, p)?).powf(1.0 / p);
        Ok(band_violation(r, s.compare_lower, s.compare_upper))
    })
}

/// At `p = 2` both oscillation operators are isometries on the cone.
pub fn sweep_isometry(cfg: &SweepConfig) -> VerificationReport {
    let cases = map_indexed(cfg.samples, cfg.parallelism, |i| {
        let f = cone_sample(cfg, i);
        let v = (|| {
            let nf = lp_pow_step(&f, 2.0)?;
            let rd = (dual_osc_pow(&f, 2.0)? / nf).sqrt();
            let rh = (hardy_osc_pow(&f, 2.0)? / nf).sqrt();
            Ok((rd - 1.0).abs().max((rh - 1.0).abs()))
        })();
        (format!("sample={i}"), v)
    });
    VerificationReport::collect("isometry_p2", 1e-10, cases)
}

/// `max_x |(H - I)(H* - I) f(x) - f(x)|` on 100-point log grids.
pub fn sweep_inversion(cfg: &SweepConfig) -> VerificationReport {
    let cases = map_indexed(cfg.samples, cfg.parallelism, |i| {
        let f = cone_sample(cfg, i);
        (format!("sample={i}"), inversion_residual(&f, &default_grid(&f, 100)))
    });
    VerificationReport::collect("inversion", 1e-10, cases)
}

pub const TELESCOPING_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

/// The `h`-kernel norm against per-interval quadrature, relative error.
pub fn sweep_telescoping(cfg: &SweepConfig) -> VerificationReport {
    let mut cfg = cfg.clone();
    if cfg.p_grid.is_none() {
        cfg.p_grid = Some(TELESCOPING_GRID.to_vec());
    }
    run_sweep("telescoping_vs_quadrature", 1e-10, &cfg, PRange::Closed, |f, p| {
        let a = dual_osc_pow(f, p)?;
        let b = dual_osc_pow_quadrature(f, p, 1e-14)?;
        Ok(((a - b) / b).abs())
    })
}

/// `‖(H*^2 - H*) g‖ / ‖H* g‖` within the dual bounds, for random
/// nonnegative (not necessarily monotone) step functions `g`.
pub fn sweep_squared(cfg: &SweepConfig) -> VerificationReport {
    let pairs = pairs(cfg, PRange::OpenAtOne);
    let cases = map_indexed(pairs.len(), cfg.parallelism, |k| {
        let (i, p) = pairs[k];
        let g = random_step(sample_seed(cfg.seed, i as u64), cfg.n_max, &cfg.scale, false);
        let v = (|| {
            let f = dual_hardy(&g.to_piecewise())?;
            let osc = dual_osc(&f)?;
            let r = (lp_pow(&osc, p)? / lp_pow(&f, p)?).powf(1.0 / p);
            let (lo, hi) = dual_bounds(p)?;
            Ok(band_violation(r, lo, hi))
        })();
        (format!("sample={i} p={p}"), v)
    });
    VerificationReport::collect("squared_dual_bounds", 1e-9, cases)
}

// ---------------------------------------------------------------------------
// Family and limit reports
// ---------------------------------------------------------------------------

/// `q_k = p - min(1, p-1) 10^{-k}`, `k = 1..=4`.
pub fn family_q_list(p: f64) -> Vec<f64> {
    let w = (p - 1.0).min(1.0);
    (1..=4).map(|k| p - w * 10f64.powi(-k)).collect()
}

/// Monotone approach of a sequence to `limit`: the worst increase of the
/// gap between consecutive entries, and the final relative gap.
fn approach(values: &[f64], limit: f64) -> (f64, f64) {
    let gaps: Vec<f64> = values.iter().map(|v| (v - limit).abs()).collect();
    let worst_step = gaps
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let last = gaps.last().copied().unwrap_or(f64::INFINITY) / limit.abs();
    (worst_step, last)
}

/// Which family ratio to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTest {
    /// `‖(H* - I) f_q‖ / ‖f_q‖ → p - 1`
    Test1,
    /// `‖(H* - I)(f_q - g_q)‖ / ‖(H - I)(f_q - g_q)‖ → (p - 1)^2`
    Test2,
}

pub fn family_reports(p: f64, test: FamilyTest) -> Result<Vec<VerificationReport>> {
    let scan = family_scan(p, &family_q_list(p))?;
    let (name, values, limit) = match test {
        FamilyTest::Test1 => ("family_test1", &scan.ratios_test1, p - 1.0),
        FamilyTest::Test2 => ("family_test2", &scan.ratios_test2, (p - 1.0).powi(2)),
    };
    let tag = fmt_p(p);
    let (step, last) = approach(values, limit);
    let n = values.len();
    let eps_worst = scan.eps_check.iter().map(|e| (e - 1.0).abs()).fold(0.0, f64::max);
    Ok(vec![
        VerificationReport::new(&format!("{name}_monotone_p{tag}"), n, step, 1e-12, None),
        VerificationReport::new(&format!("{name}_final_gap_p{tag}"), 1, last, 0.01, None),
        VerificationReport::new(&format!("{name}_eps_norm_p{tag}"), n, eps_worst, 1e-10, None),
    ])
}

pub const KEPS_LIST: [f64; 3] = [0.1, 0.01, 0.001];

/// `‖H* k_ε‖ → 1` and `‖(H*^2 - H*) k_ε‖ → C_p^{1/p}`, each gap shrinking
/// with every step of `ε`.
pub fn keps_report(p: f64) -> Result<VerificationReport> {
    let rows = keps_scan(p, &KEPS_LIST)?;
    let first: Vec<f64> = rows.iter().map(|r| r.norm_dual).collect();
    let second: Vec<f64> = rows.iter().map(|r| r.norm_dual_osc).collect();
    let (s1, _) = approach(&first, 1.0);
    let (s2, _) = approach(&second, cp(p)?.powf(1.0 / p));
    let rising = first.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    Ok(VerificationReport::new(
        &format!("keps_convergence_p{}", fmt_p(p)),
        rows.len(),
        s1.max(s2).max(rising),
        0.0,
        None,
    ))
}

/// The indicator attains `C_p^{1/p} (p-1)^{1/p}` in the comparison ratio.
pub fn indicator_witness(grid: &[f64]) -> Result<VerificationReport> {
    let chi = crate::cone::make_step(vec![1.0], vec![1.0])?;
    let cases = grid
        .iter()
        .filter(|&&p| p > 1.0)
        .map(|&p| {
            let v = (|| {
                let r = (dual_osc_pow(&chi, p)? / hardy_osc_pow(&chi, p)?).powf(1.0 / p);
                let want = cp(p)?.powf(1.0 / p) * (p - 1.0).powf(1.0 / p);
                Ok(((r - want) / want).abs())
            })();
            (format!("p={p}"), v)
        })
        .collect();
    Ok(VerificationReport::collect("indicator_compare_witness", 1e-12, cases))
}

/// `Γ'(2) = 1 - γ`, `Σ 1/(k!(k+2)^2) < 0.42`, `C_1' > 0`.
pub fn bracket_reports() -> Vec<VerificationReport> {
    let b = proposition_bracket();
    vec![
        VerificationReport::new("gamma_prime_2", 1, (b.gamma_prime_2 - (1.0 - EULER_GAMMA)).abs(), 1e-10, None),
        VerificationReport::new("bracket_series_below_0.42", 1, b.series - 0.42, 0.0, None),
        VerificationReport::new("cp_prime_1_positive", 1, -b.cp_prime_1, 0.0, None),
    ]
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// dual bounds, `p = 2` isometry, inversion, kernel vs quadrature
    Main,
    /// bounds for `H - I`
    Kolyada,
    /// comparison bounds, indicator witness, second family ratio
    Compare,
    /// bounds for `H*^2 - H*`, the `k_ε` limit, first family ratio
    Sqrd,
    /// convexity lemma, `g` sign, identities, properties of `C_p`
    Lemmas,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["main", "kolyada", "compare", "sqrd", "lemmas", "all"];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Main => "main",
            Suite::Kolyada => "kolyada",
            Suite::Compare => "compare",
            Suite::Sqrd => "sqrd",
            Suite::Lemmas => "lemmas",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "main" => Ok(Suite::Main),
            "kolyada" => Ok(Suite::Kolyada),
            "compare" => Ok(Suite::Compare),
            "sqrd" => Ok(Suite::Sqrd),
            "lemmas" => Ok(Suite::Lemmas),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s:?}; expected one of {}", Suite::NAMES.join(", "))),
        }
    }
}

pub const LEMMA_GRID: [f64; 7] = [1.1, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0];
pub const FAMILY_GRID: [f64; 2] = [1.5, 3.0];
pub const IDENTITY_R_GRID: [f64; 4] = [0.0, 0.5, 2.0, 5.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub sweep: SweepConfig,
}

impl SuiteConfig {
    pub fn new(suite: Suite, samples: usize, seed: u64) -> Self {
        Self {
            suite,
            sweep: SweepConfig::new(samples, seed),
        }
    }
}

fn grid_or(cfg: &SweepConfig, default: &[f64]) -> Vec<f64> {
    cfg.p_grid.clone().unwrap_or_else(|| default.to_vec())
}

fn main_suite(cfg: &SweepConfig) -> Vec<VerificationReport> {
    vec![sweep_dual(cfg), sweep_isometry(cfg), sweep_inversion(cfg), sweep_telescoping(cfg)]
}

fn kolyada_suite(cfg: &SweepConfig) -> Vec<VerificationReport> {
    vec![sweep_hardy(cfg)]
}

fn compare_suite(cfg: &SweepConfig) -> Result<Vec<VerificationReport>> {
    let mut out = vec![sweep_compare(cfg)];
    out.push(indicator_witness(&grid_or(cfg, &LEMMA_GRID))?);
    for p in grid_or(cfg, &FAMILY_GRID).into_iter().filter(|&p| p > 1.0) {
        out.extend(family_reports(p, FamilyTest::Test2)?);
    }
    Ok(out)
}

fn sqrd_suite(cfg: &SweepConfig) -> Result<Vec<VerificationReport>> {
    let mut out = vec![sweep_squared(cfg)];
    for p in grid_or(cfg, &FAMILY_GRID).into_iter().filter(|&p| p > 1.0) {
        out.push(keps_report(p)?);
        out.extend(family_reports(p, FamilyTest::Test1)?);
    }
    Ok(out)
}

fn lemmas_suite(cfg: &SweepConfig) -> Result<Vec<VerificationReport>> {
    let u_grid = open_grid(10.0, 50);
    let t_grid = unit_grid(50);
    let s_grid = open_grid(10.0, 50);
    let mut out = Vec::new();
    for p in grid_or(cfg, &LEMMA_GRID).into_iter().filter(|&p| p > 1.0) {
        out.push(check_lemma_tech(p, &u_grid, &t_grid)?);
        out.extend(check_g_function(p, &s_grid)?);
        out.extend(check_identities(p, &IDENTITY_R_GRID)?);
    }
    out.extend(property_scan(&p_grid(1.0, 5.0, 0.1)?)?);
    out.extend(bracket_reports());
    Ok(out)
}

/// Runs a suite. Reports come back in a fixed order and are reproducible
/// bit for bit from the configuration.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let s = &cfg.sweep;
    if s.samples == 0 {
        return Err(domain("run_suite", "samples must be at least 1"));
    }
    if let Some(grid) = &s.p_grid {
        if grid.is_empty() || grid.iter().any(|&p| !(p >= 1.0) || !p.is_finite()) {
            return Err(domain("run_suite", "p grid must be nonempty with p >= 1"));
        }
    }
    Ok(match cfg.suite {
        Suite::Main => main_suite(s),
        Suite::Kolyada => kolyada_suite(s),
        Suite::Compare => compare_suite(s)?,
        Suite::Sqrd => sqrd_suite(s)?,
        Suite::Lemmas => lemmas_suite(s)?,
        Suite::All => {
            let mut out = main_suite(s);
            out.extend(kolyada_suite(s));
            out.extend(compare_suite(s)?);
            out.extend(sqrd_suite(s)?);
            out.extend(lemmas_suite(s)?);
            out
        }
    })
}
