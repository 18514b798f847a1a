use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{minimize, NelderMeadConfig};
use crate::cone::{make_step, sample_seed, StepFunction};
use crate::error::{domain, Result};
use crate::exec::{map_indexed, Parallelism};
use crate::kernel::HEvaluator;
use crate::norms::{dual_osc_pow_with, lp_pow_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Sup,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub p: f64,
    pub pieces: usize,
    pub mode: SearchMode,
    /// Objective evaluations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl SearchConfig {
    pub fn new(p: f64, mode: SearchMode) -> Self {
        Self {
            p,
            pieces: 8,
            mode,
            budget: 5000,
            restarts: 8,
            seed: 0,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub p: f64,
    pub mode: SearchMode,
    pub best_ratio: f64,
    pub best_function: StepFunction,
    /// Objective evaluations summed over restarts.
    pub iterations: usize,
    pub best_restart: usize,
    /// Largest and smallest ratio over every evaluation of every restart.
    pub max_ratio_seen: f64,
    pub min_ratio_seen: f64,
    /// Running best of the winning restart, by evaluation index.
    pub trace: Vec<TracePoint>,
}

const LOG_GAP_MIN: f64 = -20.0;
const LOG_GAP_MAX: f64 = 3.0;
const DROP_MAX: f64 = 3.0;

/// Maps free coordinates to a cone step function with `pieces` steps.
/// The first `pieces - 1` coordinates set log-gaps between breakpoints
/// (`a_1 = 1`), the rest set squared log-drops between values (`b_1 = 1`).
pub fn decode(x: &[f64], pieces: usize) -> Result<StepFunction> {
    if pieces == 0 || x.len() != 2 * (pieces - 1) {
        return Err(domain("decode", format!("need {} coordinates", 2 * pieces.saturating_sub(1))));
    }
    let (gaps, drops) = x.split_at(pieces - 1);
    let mut d = 0.0;
    let mut lb = 0.0;
    let mut a = vec![1.0];
    let mut b = vec![1.0];
    for k in 0..pieces - 1 {
        d += gaps[k].clamp(LOG_GAP_MIN, LOG_GAP_MAX).exp();
        lb -= drops[k].clamp(-DROP_MAX, DROP_MAX).powi(2);
        a.push(d.exp());
        b.push(lb.exp());
    }
    make_step(a, b)
}

fn ratio(f: &StepFunction, ev: &HEvaluator) -> f64 {
    let p = ev.p();
    match (dual_osc_pow_with(f, ev), lp_pow_step(f, p)) {
        (Ok(num), Ok(den)) if den > 0.0 => (num / den).powf(1.0 / p),
        _ => f64::NAN,
    }
}

struct RestartOutcome {
    x: Vec<f64>,
    ratio: f64,
    evaluations: usize,
    max_seen: f64,
    min_seen: f64,
    trace: Vec<TracePoint>,
}

fn run_restart(cfg: &SearchConfig, ev: &HEvaluator, index: usize) -> RestartOutcome {
    let dim = 2 * (cfg.pieces - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(cfg.seed, index as u64));
    let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let sign = match cfg.mode {
        SearchMode::Sup => -1.0,
        SearchMode::Inf => 1.0,
    };
    let mut max_seen = f64::NEG_INFINITY;
    let mut min_seen = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut trace = Vec::new();
    let objective = |x: &[f64]| match decode(x, cfg.pieces) {
        Ok(f) => sign * ratio(&f, ev),
        Err(_) => f64::NAN,
    };
    let nm = NelderMeadConfig {
        max_evaluations: cfg.budget,
        ..Default::default()
    };
    let result = minimize(objective, &x0, &nm, |i, v| {
        if v.is_nan() {
            return;
        }
        let r = sign * v;
        max_seen = max_seen.max(r);
        min_seen = min_seen.min(r);
        if v < best {
            best = v;
            trace.push(TracePoint { iteration: i, ratio: r });
        }
    });
    RestartOutcome {
        ratio: sign * result.value,
        x: result.x,
        evaluations: result.evaluations,
        max_seen,
        min_seen,
        trace,
    }
}

/// Multi-start simplex search for the extreme of `‖(H* - I) f‖_p / ‖f‖_p`
/// over cone step functions with `pieces` steps. Deterministic in the
/// configuration; ties between restarts go to the lower index.
pub fn search(cfg: &SearchConfig) -> Result<SearchResult> {
    if !(cfg.p >= 1.0) || !cfg.p.is_finite() {
        return Err(domain("search", format!("need finite p >= 1, got {}", cfg.p)));
    }
    if cfg.pieces == 0 || cfg.budget == 0 || cfg.restarts == 0 {
        return Err(domain("search", "pieces, budget and restarts must be at least 1"));
    }
    let ev = HEvaluator::new(cfg.p)?;
    let outcomes = map_indexed(cfg.restarts, cfg.parallelism, |i| run_restart(cfg, &ev, i));
    let better = |a: f64, b: f64| match cfg.mode {
        SearchMode::Sup => a > b,
        SearchMode::Inf => a < b,
    };
    let mut best_index = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        if better(o.ratio, outcomes[best_index].ratio) {
            best_index = i;
        }
    }
    let best = &outcomes[best_index];
    Ok(SearchResult {
        p: cfg.p,
        mode: cfg.mode,
        best_ratio: best.ratio,
        best_function: decode(&best.x, cfg.pieces)?,
        iterations: outcomes.iter().map(|o| o.evaluations).sum(),
        best_restart: best_index,
        max_ratio_seen: outcomes.iter().map(|o| o.max_seen).fold(f64::NEG_INFINITY, f64::max),
        min_ratio_seen: outcomes.iter().map(|o| o.min_seen).fold(f64::INFINITY, f64::min),
        trace: best.trace.clone(),
    })
}
