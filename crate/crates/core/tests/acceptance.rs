//! Acceptance suite: one PASS/FAIL line per criterion.

#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::f64::consts::E;
use std::process::Command;
use std::time::Instant;

use hardy_sharp::cone::{make_step, random_cone_sample, sample_seed, SampleScale, StepFunction};
use hardy_sharp::constants::{cp, cp_by_quadrature, cp_prime, cp_root, proposition_bracket};
use hardy_sharp::extremal::{family_scan, keps_scan, search, SearchConfig, SearchMode};
use hardy_sharp::kernel::special::gamma_prime;
use hardy_sharp::kernel::{integrate_with_breaks, HEvaluator};
use hardy_sharp::norms::dual_osc_pow;
use hardy_sharp::operators::default_grid;
use hardy_sharp::verify::{
    check_g_function, check_lemma_tech, g_function, open_grid, sweep_compare, sweep_dual, sweep_hardy,
    sweep_inversion, sweep_isometry, unit_grid, SweepConfig, VerificationReport,
};

const SEED: u64 = 20_240_601;
const EULER: f64 = 0.577_215_664_901_532_860_6;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn report_line(r: &VerificationReport) -> String {
    format!("{} worst {:.3e} (tol {:.0e}, n={})", r.check_name, r.worst_violation, r.tolerance, r.samples)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Closed forms on a step function f = Σ b_k χ_(a_{k-1}, a_k], written
// independently of the library operators.

/// `T_k = Σ_{j>k} b_j ln(a_j / a_{j-1})`.
fn tails(f: &StepFunction) -> Vec<f64> {
    let (a, b) = (f.breakpoints(), f.values());
    let n = a.len();
    let mut t = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        t[k] = t[k + 1] + b[k + 1] * (a[k + 1] / a[k]).ln();
    }
    t
}

/// `(H* - I) f (x)`.
fn dual_osc_at(f: &StepFunction, t: &[f64], x: f64) -> f64 {
    let (a, b) = (f.breakpoints(), f.values());
    match a.iter().position(|&ak| x <= ak) {
        Some(k) => b[k] * (a[k] / x).ln() + t[k] - b[k],
        None => 0.0,
    }
}

/// `∫_0^x (H* - I) f`.
fn dual_osc_integral(f: &StepFunction, t: &[f64], x: f64) -> f64 {
    let (a, b) = (f.breakpoints(), f.values());
    // ∫_lo^hi [b ln(ak/s) + c] ds with s ln(ak/s) -> 0 at s = 0
    let piece = |k: usize, lo: f64, hi: f64| {
        let anti = |s: f64| if s == 0.0 { 0.0 } else { b[k] * s * ((a[k] / s).ln() + 1.0) + (t[k] - b[k]) * s };
        anti(hi) - anti(lo)
    };
    let mut total = 0.0;
    let mut lo = 0.0;
    for k in 0..a.len() {
        if x <= a[k] {
            return total + piece(k, lo, x);
        }
        total += piece(k, lo, a[k]);
        lo = a[k];
    }
    total
}

/// `‖(H* - I) f‖_p^p` by per-piece quadrature in `y = ln(a_k / x)`.
fn dual_osc_pow_oracle(f: &StepFunction, p: f64) -> f64 {
    let (a, b) = (f.breakpoints(), f.values());
    let t = tails(f);
    let mut total = 0.0;
    for k in 0..a.len() {
        let c = t[k] - b[k];
        let len = if k == 0 { f64::INFINITY } else { (a[k] / a[k - 1]).ln() };
        let root = -c / b[k];
        let breaks: Vec<f64> = if root > 0.0 && root < len { vec![root] } else { vec![] };
        let ln_ak = a[k].ln();
        let g = |y: f64| {
            let v = (b[k] * y + c).abs();
            if v == 0.0 {
                0.0
            } else {
                (p * v.ln() + ln_ak - y).exp()
            }
        };
        total += integrate_with_breaks(g, 0.0, len, &breaks, 1e-14).expect("oracle quadrature").value;
    }
    total
}

fn sample(i: usize) -> StepFunction {
    random_cone_sample(sample_seed(SEED, i as u64), 8, &SampleScale::default())
}

fn c1_constants() -> Outcome {
    let e1 = (cp(1.0).unwrap() - 2.0 / E).abs();
    let e2 = (cp(2.0).unwrap() - 1.0).abs();
    outcome(e1 <= 1e-12 && e2 <= 1e-12, format!("|cp(1) - 2/e| = {e1:.2e}, |cp(2) - 1| = {e2:.2e}"))
}

fn c2_triple() -> Outcome {
    let mut worst: f64 = 0.0;
    for &p in &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0] {
        let series = cp(p).unwrap();
        let h0 = HEvaluator::new(p).unwrap().h(0.0).unwrap();
        // ∫_0^1 |1 + ln x|^p dx = ∫_0^∞ |1 - y|^p e^{-y} dy
        let quad = integrate_with_breaks(
            |y: f64| {
                let d = (1.0 - y).abs();
                if d == 0.0 { 0.0 } else { (p * d.ln() - y).exp() }
            },
            0.0,
            f64::INFINITY,
            &[1.0],
            1e-15,
        )
        .unwrap()
        .value;
        let lib_quad = cp_by_quadrature(p, 1e-14).unwrap();
        for (x, y) in [(series, h0), (series, quad), (h0, quad), (series, lib_quad)] {
            worst = worst.max(rel(x, y));
        }
    }
    outcome(worst <= 1e-11, format!("worst pairwise relative difference {worst:.2e} (tol 1e-11)"))
}

fn c3_step_norm() -> Outcome {
    let f = make_step(vec![1.0, E], vec![2.0, 1.0]).unwrap();
    let exact = (dual_osc_pow(&f, 2.0).unwrap() - (3.0 + E)).abs();
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for i in 0..200 {
        let f = sample(i);
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.0] {
            let e = rel(dual_osc_pow(&f, p).unwrap(), dual_osc_pow_oracle(&f, p));
            if e > worst {
                worst = e;
                at = format!("sample {i}, p = {p}");
            }
        }
    }
    outcome(
        exact <= 1e-12 && worst <= 1e-10,
        format!("|N - (3+e)| = {exact:.2e}; worst vs quadrature {worst:.2e} at {at} (tol 1e-10)"),
    )
}

fn c4_inversion() -> Outcome {
    let cfg = SweepConfig::new(500, SEED);
    let r = sweep_inversion(&cfg);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let f = sample(i);
        let t = tails(&f);
        for x in default_grid(&f, 100) {
            if f.breakpoints().iter().any(|&a| (x - a).abs() <= 1e-12 * a) {
                continue;
            }
            // (H - I) g (x) = (1/x) ∫_0^x g - g(x)
            let g = dual_osc_at(&f, &t, x);
            let back = dual_osc_integral(&f, &t, x) / x - g;
            worst = worst.max((back - f.eval(x)).abs());
        }
    }
    outcome(
        r.passed && worst <= 1e-10,
        format!("{}; closed-form residual {worst:.3e}", report_line(&r)),
    )
}

fn c5_isometry() -> Outcome {
    let r = sweep_isometry(&SweepConfig::new(500, SEED));
    outcome(r.passed && r.tolerance == 1e-10, report_line(&r))
}

fn c6_dual_sweep() -> Outcome {
    let r = sweep_dual(&SweepConfig::new(10_000, SEED));
    outcome(r.passed && r.tolerance == 1e-12 && r.samples == 10_000, report_line(&r))
}

fn c7_hardy_compare() -> Outcome {
    let cfg = SweepConfig::new(10_000, SEED);
    let h = sweep_hardy(&cfg);
    let c = sweep_compare(&cfg);
    let ok = [&h, &c].iter().all(|r| r.passed && r.tolerance == 1e-12 && r.samples == 10_000);
    outcome(ok, format!("{}; {}", report_line(&h), report_line(&c)))
}

fn c8_search() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (p, mode, target) in [(1.5, SearchMode::Sup, 0.859_011_298_213_252_3), (3.0, SearchMode::Inf, 1.341_566_685_806_808)] {
        let r = search(&SearchConfig::new(p, mode)).unwrap();
        let root = cp_root(p).unwrap();
        let gap = (r.best_ratio - target).abs();
        // hard ceiling: C_p^{1/p} above for p < 2, below for p > 2; p - 1 on the other side
        let (lo, hi) = if p < 2.0 { (p - 1.0, root) } else { (root, p - 1.0) };
        let excess = (r.max_ratio_seen - hi).max(lo - r.min_ratio_seen);
        ok &= gap <= 1e-6 && excess <= 1e-10;
        lines.push(format!("p={p} best {:.16} gap {gap:.2e} ceiling excess {excess:.2e}", r.best_ratio));
    }
    outcome(ok, lines.join("; "))
}

fn strictly_approaches(values: &[f64], limit: f64) -> bool {
    let gaps: Vec<f64> = values.iter().map(|v| (limit - v).abs()).collect();
    gaps.windows(2).all(|w| w[1] < w[0])
}

fn c9_family() -> Outcome {
    let q: Vec<f64> = (1..=4).map(|k| 3.0 - 10f64.powi(-k)).collect();
    let s = family_scan(3.0, &q).unwrap();
    let t1 = strictly_approaches(&s.ratios_test1, 2.0);
    let t2 = strictly_approaches(&s.ratios_test2, 4.0);
    let g1 = rel(*s.ratios_test1.last().unwrap(), 2.0);
    let g2 = rel(*s.ratios_test2.last().unwrap(), 4.0);
    let eps = s.eps_check.iter().map(|e| (e - 1.0).abs()).fold(0.0, f64::max);
    outcome(
        t1 && t2 && g1 < 0.01 && g2 < 0.01 && eps <= 1e-10,
        format!("monotone {t1}/{t2}, final gaps {g1:.2e}/{g2:.2e}, |eps*|g| - 1| {eps:.2e}"),
    )
}

fn c10_lemma() -> Outcome {
    let u = open_grid(10.0, 50);
    let t = unit_grid(50);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut ok = true;
    let mut at_two = f64::NAN;
    for &p in &[1.1, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0] {
        let r = check_lemma_tech(p, &u, &t).unwrap();
        ok &= r.passed && r.tolerance <= 1e-10 && r.samples == 2500;
        worst = worst.max(r.worst_violation);
        if p == 2.0 {
            at_two = r.worst_violation;
        }
    }
    outcome(ok && at_two <= 1e-10, format!("worst violation {worst:.2e}, equality defect at p=2 {at_two:.2e}"))
}

fn c11_g_function() -> Outcome {
    let grid = open_grid(10.0, 50);
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &[1.5, 3.0] {
        let reports = check_g_function(p, &grid).unwrap();
        for name in ["g_sign", "g_at_zero"] {
            let r = reports.iter().find(|r| r.check_name.starts_with(name)).unwrap();
            ok &= r.passed && r.tolerance <= 1e-9;
        }
        let g0 = g_function(p, 0.0).unwrap();
        let e0 = (g0 - (1.0 - cp(p).unwrap()) / p).abs();
        let g10 = g_function(p, 10.0).unwrap().abs();
        ok &= e0 <= 1e-9 && g10 <= 1e-4;
        parts.push(format!("p={p}: |g(0) - (1-C_p)/p| {e0:.1e}, |g(10)| {g10:.2e}"));
    }
    // for p = 3 and s >= 1 the function is -e^{-s}
    let e3 = (g_function(3.0, 10.0).unwrap() + (-10f64).exp()).abs();
    ok &= e3 <= 1e-12;
    outcome(ok, parts.join("; "))
}

fn c12_bracket() -> Outcome {
    let gp = (gamma_prime(2.0) - (1.0 - EULER)).abs();
    let mut series = 0.0;
    let mut fact = 1.0;
    for k in 0..30 {
        if k > 0 {
            fact *= k as f64;
        }
        series += 1.0 / (fact * ((k + 2) as f64).powi(2));
    }
    let b = proposition_bracket();
    let cp1 = cp_prime(1.0).unwrap();
    let values: Vec<f64> = (0..=40).map(|i| cp(1.0 + i as f64 / 10.0).unwrap()).collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    outcome(
        gp <= 1e-10 && b.series < 0.42 && (b.series - series).abs() <= 1e-15 && cp1 > 0.0 && increasing,
        format!("|G'(2) - (1-gamma)| {gp:.1e}, series {:.12} < 0.42, cp'(1) {cp1:.6e}, increasing {increasing}", b.series),
    )
}

fn c13_keps() -> Outcome {
    let eps = [0.1, 0.01, 0.001];
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &[1.5, 3.0] {
        let rows = keps_scan(p, &eps).unwrap();
        let root = cp_root(p).unwrap();
        let d: Vec<f64> = rows.iter().map(|r| r.norm_dual).collect();
        let o: Vec<f64> = rows.iter().map(|r| r.norm_dual_osc).collect();
        let increasing = d.windows(2).all(|w| w[1] > w[0]) && d.iter().all(|&x| x < 1.0);
        ok &= increasing && strictly_approaches(&d, 1.0) && strictly_approaches(&o, root);
        parts.push(format!(
            "p={p}: gaps {:.1e} -> {:.1e}, {:.1e} -> {:.1e}",
            1.0 - d[0],
            1.0 - d[2],
            (o[0] - root).abs(),
            (o[2] - root).abs()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c14_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hardy-sharp"))
            .args(["verify", "--suite", "all", "--samples", "500", "--seed", "7"])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let json_ok = serde_json::from_slice::<serde_json::Value>(&a.stdout).is_ok();
    outcome(
        json_ok && !a.stdout.is_empty() && a.stdout == b.stdout && a.status.code() == b.status.code(),
        format!("{} bytes, identical {}, exit {:?}", a.stdout.len(), a.stdout == b.stdout, a.status.code()),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("constants exactness", c1_constants),
        ("series, h(0) and quadrature agree", c2_triple),
        ("step-norm algorithm", c3_step_norm),
        ("inversion identity", c4_inversion),
        ("isometry at p = 2", c5_isometry),
        ("H* - I bounds sweep", c6_dual_sweep),
        ("H - I and comparison sweeps", c7_hardy_compare),
        ("attained sharpness by search", c8_search),
        ("non-attained sharpness by family", c9_family),
        ("technical lemma grid", c10_lemma),
        ("g-function", c11_g_function),
        ("derivative bracket and monotonicity", c12_bracket),
        ("k_eps convergence", c13_keps),
        ("determinism of verify output", c14_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {:>2} {name}: {} ({:.2}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
