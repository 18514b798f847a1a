use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hardy_sharp::constants::{cp_by_quadrature, cp_root, dual_bounds, p_grid, CpRow};
use hardy_sharp::extremal::{family_scan, keps_scan, search, FamilyScan, KepsRow, SearchConfig, SearchMode, SearchResult};
use hardy_sharp::norms::{norm_report, NormReport};
use hardy_sharp::output::{fmt_f64, to_json, Cell, Table};
use hardy_sharp::plot::{cp_root_plot, family_plot, keps_plot, trace_plot};
use hardy_sharp::verify::{family_q_list, run_suite, Suite, SuiteConfig, VerificationReport, KEPS_LIST};
use hardy_sharp::{exec, Error};

const CEILING_TOL: f64 = 1e-10;
const DEFAULT_GAP_TOL: f64 = 1e-6;
const DEFAULT_EPS_TOL: f64 = 1e-10;

/// Sharp constants for the oscillation operators H - I and H* - I.
#[derive(Debug, Parser)]
#[command(name = "hardy-sharp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct Shared {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pass tolerance for commands that check a result.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sup,
    Inf,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sup => SearchMode::Sup,
            ModeArg::Inf => SearchMode::Inf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotWhat {
    CpRoot,
    Family,
    Keps,
    Trace,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Exponent p >= 1.
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Sup)]
    mode: ModeArg,
    /// Number of steps of the searched function.
    #[arg(long, default_value_t = 8)]
    pieces: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of C_p, C_p^(1/p), p - 1 and C_p'.
    Cp {
        #[arg(long, default_value_t = 1.0)]
        pmin: f64,
        #[arg(long, default_value_t = 5.0)]
        pmax: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Range as `a..b`; overrides --pmin and --pmax.
        #[arg(long, value_parser = parse_range)]
        p_range: Option<(f64, f64)>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Fixed exponents, comma separated.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Largest number of steps in random samples.
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Search the cone for extremal ratios of the H* - I norm.
    Extremal {
        #[command(flatten)]
        search: SearchArgs,
        /// With --format csv, print the running best instead of the norm report.
        #[arg(long)]
        trace: bool,
    },
    /// Ratios of the power-law test family as q approaches p.
    Family {
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
    },
    /// Norms of the images of k_eps.
    Keps {
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Write an SVG plot.
    Plot {
        #[arg(long, value_enum)]
        what: PlotWhat,
        #[arg(long, default_value_t = 1.0)]
        pmin: f64,
        #[arg(long, default_value_t = 5.0)]
        pmax: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Validation { .. } | Error::NotInCone(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// Rendered output and whether every check in it passed.
struct Outcome {
    text: String,
    passed: bool,
}

fn render<T: Serialize>(format: FormatArg, json: &T, csv: impl FnOnce() -> String, table: impl FnOnce() -> String) -> String {
    match format {
        FormatArg::Json => to_json(json),
        FormatArg::Csv => csv(),
        FormatArg::Table => table(),
    }
}

fn kv_table(pairs: &[(&str, Cell)]) -> String {
    let mut t = Table::new(&["field", "value"]);
    for (k, v) in pairs {
        t.push(vec![(*k).into(), v.clone()]);
    }
    t.to_text()
}

fn cmd_cp(shared: &Shared, pmin: f64, pmax: f64, step: f64, range: Option<(f64, f64)>) -> Result<Outcome, Failure> {
    let (lo, hi) = range.unwrap_or((pmin, pmax));
    let grid = p_grid(lo, hi, step)?;
    let rows = grid.iter().map(|&p| CpRow::new(p)).collect::<Result<Vec<_>, _>>()?;
    let checks = match shared.tol {
        Some(tol) => Some(
            rows.iter()
                .map(|r| {
                    let q = cp_by_quadrature(r.p, tol.min(1e-6))?;
                    Ok((q, ((q - r.cp) / r.cp).abs()))
                })
                .collect::<Result<Vec<_>, Error>>()?,
        ),
        None => None,
    };
    let passed = match (&checks, shared.tol) {
        (Some(c), Some(tol)) => c.iter().all(|&(_, d)| d <= tol),
        _ => true,
    };

    #[derive(Serialize)]
    struct Row<'a> {
        #[serde(flatten)]
        row: &'a CpRow,
        #[serde(skip_serializing_if = "Option::is_none")]
        cp_quadrature: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        rel_diff: Option<f64>,
    }
    #[derive(Serialize)]
    struct Json<'a> {
        command: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
        passed: bool,
        rows: Vec<Row<'a>>,
    }
    let json_rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| Row {
            row,
            cp_quadrature: checks.as_ref().map(|c| c[i].0),
            rel_diff: checks.as_ref().map(|c| c[i].1),
        })
        .collect();
    let json = Json { command: "cp", tol: shared.tol, passed, rows: json_rows };
    let table = || {
        let mut header = vec!["p", "cp", "cp_root", "p_minus_1", "cp_prime"];
        if checks.is_some() {
            header.extend(["cp_quadrature", "rel_diff"]);
        }
        let mut t = Table::new(&header);
        for (i, r) in rows.iter().enumerate() {
            let mut cells: Vec<Cell> = vec![r.p.into(), r.cp.into(), r.cp_root.into(), r.p_minus_1.into(), r.cp_prime.into()];
            if let Some(c) = &checks {
                cells.extend([c[i].0.into(), c[i].1.into()]);
            }
            t.push(cells);
        }
        t
    };
    let text = render(shared.format, &json, || table().to_csv(), || table().to_text());
    Ok(Outcome { text, passed })
}

fn with_tolerance(mut reports: Vec<VerificationReport>, tol: Option<f64>) -> Vec<VerificationReport> {
    if let Some(tol) = tol {
        for r in &mut reports {
            r.tolerance = tol;
            r.passed = r.worst_violation <= tol;
        }
    }
    reports
}

fn cmd_verify(shared: &Shared, suite: Suite, samples: usize, p: Option<Vec<f64>>, n_max: usize) -> Result<Outcome, Failure> {
    if n_max == 0 {
        return Err(Failure::Usage("--n-max must be at least 1".into()));
    }
    let mut cfg = SuiteConfig::new(suite, samples, shared.seed);
    cfg.sweep.p_grid = p;
    cfg.sweep.n_max = n_max;
    let reports = with_tolerance(run_suite(&cfg)?, shared.tol);
    let passed = reports.iter().all(|r| r.passed);

    #[derive(Serialize)]
    struct Json<'a> {
        command: &'static str,
        suite: String,
        samples: usize,
        seed: u64,
        p_grid: &'a Option<Vec<f64>>,
        n_max: usize,
        passed: bool,
        reports: &'a [VerificationReport],
    }
    let json = Json {
        command: "verify",
        suite: suite.to_string(),
        samples,
        seed: shared.seed,
        p_grid: &cfg.sweep.p_grid,
        n_max,
        passed,
        reports: &reports,
    };
    let table = || {
        let mut t = Table::new(&["check_name", "samples", "worst_violation", "tolerance", "passed"]);
        for r in &reports {
            t.push(vec![
                r.check_name.clone().into(),
                r.samples.into(),
                r.worst_violation.into(),
                r.tolerance.into(),
                r.passed.into(),
            ]);
        }
        t
    };
    let seed = shared.seed;
    let text = render(
        shared.format,
        &json,
        || format!("# suite={suite} samples={samples} seed={seed}\n{}", table().to_csv()),
        || {
            let mut s = format!("suite {suite}, {samples} samples, seed {seed}\n\n{}", table().to_text());
            let failed = reports.iter().filter(|r| !r.passed).count();
            let _ = writeln!(s, "\n{} of {} checks passed", reports.len() - failed, reports.len());
            s
        },
    );
    Ok(Outcome { text, passed })
}

fn search_config(args: &SearchArgs, seed: u64) -> SearchConfig {
    let mut cfg = SearchConfig::new(args.p, args.mode.into());
    cfg.pieces = args.pieces;
    cfg.budget = args.budget;
    cfg.restarts = args.restarts;
    cfg.seed = seed;
    cfg
}

#[derive(Serialize)]
struct ExtremalSummary {
    lower: f64,
    upper: f64,
    target: f64,
    attained: bool,
    gap: f64,
    gap_tol: f64,
    ceiling_excess: f64,
    passed: bool,
}

fn summarize(result: &SearchResult, gap_tol: f64) -> Result<ExtremalSummary, Failure> {
    let (lower, upper) = dual_bounds(result.p)?;
    let target = cp_root(result.p)?;
    let (attained, ceiling_excess) = match result.mode {
        SearchMode::Sup => (result.p <= 2.0, result.max_ratio_seen - upper),
        SearchMode::Inf => (result.p >= 2.0, lower - result.min_ratio_seen),
    };
    let gap = (result.best_ratio - target).abs();
    let passed = ceiling_excess <= CEILING_TOL && (!attained || gap <= gap_tol);
    Ok(ExtremalSummary { lower, upper, target, attained, gap, gap_tol, ceiling_excess, passed })
}

fn cmd_extremal(shared: &Shared, args: &SearchArgs, trace: bool) -> Result<Outcome, Failure> {
    let cfg = search_config(args, shared.seed);
    let result = search(&cfg)?;
    let summary = summarize(&result, shared.tol.unwrap_or(DEFAULT_GAP_TOL))?;
    let report: Option<NormReport> = if result.p > 1.0 { Some(norm_report(&result.best_function, result.p)?) } else { None };

    #[derive(Serialize)]
    struct Json<'a> {
        command: &'static str,
        seed: u64,
        pieces: usize,
        budget: usize,
        restarts: usize,
        #[serde(flatten)]
        summary: &'a ExtremalSummary,
        result: &'a SearchResult,
        norm_report: &'a Option<NormReport>,
    }
    let json = Json {
        command: "extremal",
        seed: cfg.seed,
        pieces: cfg.pieces,
        budget: cfg.budget,
        restarts: cfg.restarts,
        summary: &summary,
        result: &result,
        norm_report: &report,
    };
    let mode = match result.mode {
        SearchMode::Sup => "sup",
        SearchMode::Inf => "inf",
    };
    let comment = format!("# p={} mode={mode} seed={} pieces={} budget={} restarts={}\n", fmt_f64(cfg.p), cfg.seed, cfg.pieces, cfg.budget, cfg.restarts);
    let csv = || {
        let mut s = comment.clone();
        if trace {
            s.push_str("iteration,ratio\n");
            for t in &result.trace {
                let _ = writeln!(s, "{},{}", t.iteration, fmt_f64(t.ratio));
            }
        } else if let Some(r) = &report {
            let _ = writeln!(s, "{}\n{}", NormReport::CSV_HEADER, r.csv_row());
        } else {
            let _ = writeln!(s, "p,ratio_dual\n{},{}", fmt_f64(result.p), fmt_f64(result.best_ratio));
        }
        s
    };
    let table = || {
        let mut s = kv_table(&[
            ("p", result.p.into()),
            ("mode", mode.into()),
            ("seed", cfg.seed.into()),
            ("best_ratio", result.best_ratio.into()),
            ("target C_p^(1/p)", summary.target.into()),
            ("gap", summary.gap.into()),
            ("target attained", summary.attained.to_string().into()),
            ("lower bound", summary.lower.into()),
            ("upper bound", summary.upper.into()),
            ("ceiling excess", summary.ceiling_excess.into()),
            ("evaluations", result.iterations.into()),
            ("best restart", result.best_restart.into()),
            ("passed", summary.passed.into()),
        ]);
        let mut t = Table::new(&["breakpoint", "value"]);
        let f = &result.best_function;
        for (a, b) in f.breakpoints().iter().zip(f.values()) {
            t.push(vec![(*a).into(), (*b).into()]);
        }
        s.push('\n');
        s.push_str(&t.to_text());
        s
    };
    let text = render(shared.format, &json, csv, table);
    Ok(Outcome { text, passed: summary.passed })
}

fn cmd_family(shared: &Shared, p: f64, q: Option<Vec<f64>>) -> Result<Outcome, Failure> {
    let q_list = q.unwrap_or_else(|| family_q_list(p));
    let scan: FamilyScan = family_scan(p, &q_list)?;
    let tol = shared.tol.unwrap_or(DEFAULT_EPS_TOL);
    let passed = scan.eps_check.iter().all(|e| (e - 1.0).abs() <= tol);
    let limit_test1 = p - 1.0;
    let limit_test2 = (p - 1.0).powi(2);

    #[derive(Serialize)]
    struct Json<'a> {
        command: &'static str,
        limit_test1: f64,
        limit_test2: f64,
        eps_tol: f64,
        passed: bool,
        #[serde(flatten)]
        scan: &'a FamilyScan,
    }
    let json = Json { command: "family", limit_test1, limit_test2, eps_tol: tol, passed, scan: &scan };
    let table = || {
        let mut t = Table::new(&["q", "ratio_test1", "ratio_test2", "eps_check"]);
        for i in 0..scan.q_list.len() {
            t.push(vec![
                scan.q_list[i].into(),
                scan.ratios_test1[i].into(),
                scan.ratios_test2[i].into(),
                scan.eps_check[i].into(),
            ]);
        }
        t
    };
    let text = render(shared.format, &json, || table().to_csv(), || {
        format!("p = {p}; test1 -> {limit_test1}, test2 -> {limit_test2}\n\n{}", table().to_text())
    });
    Ok(Outcome { text, passed })
}

fn cmd_keps(shared: &Shared, p: f64, eps: Option<Vec<f64>>) -> Result<Outcome, Failure> {
    let eps = eps.unwrap_or_else(|| KEPS_LIST.to_vec());
    let rows: Vec<KepsRow> = keps_scan(p, &eps)?;
    let limit_dual = 1.0;
    let limit_dual_osc = cp_root(p)?;

    #[derive(Serialize)]
    struct Json<'a> {
        command: &'static str,
        p: f64,
        limit_dual: f64,
        limit_dual_osc: f64,
        rows: &'a [KepsRow],
    }
    let json = Json { command: "keps", p, limit_dual, limit_dual_osc, rows: &rows };
    let table = || {
        let mut t = Table::new(&["eps", "norm_dual", "norm_dual_osc"]);
        for r in &rows {
            t.push(vec![r.eps.into(), r.norm_dual.into(), r.norm_dual_osc.into()]);
        }
        t
    };
    let text = render(shared.format, &json, || table().to_csv(), || {
        format!("p = {p}; norm_dual -> 1, norm_dual_osc -> {limit_dual_osc}\n\n{}", table().to_text())
    });
    Ok(Outcome { text, passed: true })
}

fn cmd_plot(shared: &Shared, what: PlotWhat, pmin: f64, pmax: f64, args: &SearchArgs) -> Result<Outcome, Failure> {
    let plot = match what {
        PlotWhat::CpRoot => cp_root_plot(pmin, pmax)?,
        PlotWhat::Family => family_plot(args.p)?,
        PlotWhat::Keps => keps_plot(args.p)?,
        PlotWhat::Trace => trace_plot(&search(&search_config(args, shared.seed))?)?,
    };
    Ok(Outcome { text: plot.to_svg(), passed: true })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let shared = &cli.shared;
    if let Some(tol) = shared.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let outcome = match cli.command {
        Command::Cp { pmin, pmax, step, p_range } => cmd_cp(shared, pmin, pmax, step, p_range)?,
        Command::Verify { suite, samples, p, n_max } => cmd_verify(shared, suite, samples, p, n_max)?,
        Command::Extremal { search, trace } => cmd_extremal(shared, &search, trace)?,
        Command::Family { p, q } => cmd_family(shared, p, q)?,
        Command::Keps { p, eps } => cmd_keps(shared, p, eps)?,
        Command::Plot { what, pmin, pmax, search } => cmd_plot(shared, what, pmin, pmax, &search)?,
    };
    match &shared.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    exec::init_threads_from_env();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
