use hardy_sharp::constants::cp_root;
use hardy_sharp::exec::Parallelism;
use hardy_sharp::extremal::{search, SearchConfig, SearchMode};

fn run(p: f64, mode: SearchMode, pieces: usize) -> hardy_sharp::extremal::SearchResult {
    let mut cfg = SearchConfig::new(p, mode);
    cfg.pieces = pieces;
    cfg.budget = 2000;
    cfg.restarts = 4;
    search(&cfg).unwrap()
}

#[test]
fn unattained_inf_below_two_respects_floor_and_improves() {
    let coarse = run(1.5, SearchMode::Inf, 8);
    let fine = run(1.5, SearchMode::Inf, 16);
    for r in [&coarse, &fine] {
        assert!(r.min_ratio_seen >= 0.5 - 1e-10, "{}", r.min_ratio_seen);
        assert!(r.max_ratio_seen <= cp_root(1.5).unwrap() + 1e-10);
    }
    assert!(fine.best_ratio < coarse.best_ratio, "{} vs {}", fine.best_ratio, coarse.best_ratio);
}

#[test]
fn unattained_sup_above_two_respects_ceiling() {
    let r = run(3.0, SearchMode::Sup, 8);
    assert!(r.max_ratio_seen <= 2.0 + 1e-10, "{}", r.max_ratio_seen);
    assert!(r.min_ratio_seen >= cp_root(3.0).unwrap() - 1e-10);
    assert!(r.best_ratio > 1.7);
}

#[test]
fn witness_is_in_the_cone_and_reproduces_its_ratio() {
    let r = run(2.5, SearchMode::Inf, 6);
    let f = &r.best_function;
    assert!(f.is_cone());
    let report = hardy_sharp::norms::norm_report(f, 2.5).unwrap();
    assert!((report.ratio_dual - r.best_ratio).abs() <= 1e-12 * r.best_ratio);
    // the running best never gets worse
    assert!(r.trace.windows(2).all(|w| w[1].ratio <= w[0].ratio));
}

#[test]
fn identical_across_parallelism_and_seeds_differ() {
    let mut cfg = SearchConfig::new(1.8, SearchMode::Sup);
    cfg.budget = 600;
    cfg.restarts = 3;
    cfg.seed = 42;
    let a = search(&cfg).unwrap();
    cfg.parallelism = Parallelism::Sequential;
    let b = search(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 43;
    let c = search(&cfg).unwrap();
    assert_ne!(a.trace, c.trace);
}
