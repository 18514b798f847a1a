//! Self-contained SVG line plots.

use std::fmt::Write as _;

use crate::constants::cp_root;
use crate::error::{domain, Result};
use crate::extremal::{family_scan, keps_scan, SearchResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points, dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// About five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

impl LinePlot {
    fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let mut b: Option<(f64, f64, f64, f64)> = None;
        for &(x, y) in pts {
            b = Some(match b {
                None => (x, x, y, y),
                Some((x0, x1, y0, y1)) => (x0.min(x), x1.max(x), y0.min(y), y1.max(y)),
            });
        }
        b.map(|(x0, x1, y0, y1)| {
            let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x1 + 0.5) };
            let pad = if y1 > y0 { 0.05 * (y1 - y0) } else { 0.5 };
            (x0, x1, y0 - pad, y1 + pad)
        })
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let Some((x0, x1, y0, y1)) = self.bounds() else {
            s.push_str("</svg>\n");
            return s;
        };
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
        );
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                MARGIN_TOP,
                MARGIN_TOP + ph,
                MARGIN_TOP + ph + 16.0,
                trim_num(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_LEFT + pw,
                MARGIN_LEFT - 6.0,
                y + 4.0,
                trim_num(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                pts.join(" ")
            );
            let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
            let lx = MARGIN_LEFT + pw + 10.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn trim_num(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// `C_p^{1/p}` and `p - 1` over `[pmin, pmax]`; the curves cross at `p = 2`.
pub fn cp_root_plot(pmin: f64, pmax: f64) -> Result<LinePlot> {
    if !(pmin > 0.0 && pmax > pmin && pmax.is_finite()) {
        return Err(domain("plot", format!("bad range {pmin}..{pmax}")));
    }
    let n = 200;
    let ps: Vec<f64> = (0..=n).map(|i| pmin + (pmax - pmin) * i as f64 / n as f64).collect();
    let root = ps.iter().map(|&p| Ok((p, cp_root(p)?))).collect::<Result<Vec<_>>>()?;
    let line = ps.iter().map(|&p| (p, p - 1.0)).collect();
    Ok(LinePlot {
        title: "C_p^(1/p) and p - 1".into(),
        x_label: "p".into(),
        y_label: "constant".into(),
        series: vec![Series::new("C_p^(1/p)", root), Series::new("p - 1", line)],
    })
}

/// Family ratios against `k = -log10(p - q)`, with their limits.
pub fn family_plot(p: f64) -> Result<LinePlot> {
    let w = (p - 1.0).min(1.0);
    let ks: Vec<f64> = (2..=12).map(|i| i as f64 / 2.0).collect();
    let qs: Vec<f64> = ks.iter().map(|k| p - w * 10f64.powf(-k)).collect();
    let scan = family_scan(p, &qs)?;
    let xs: Vec<f64> = qs.iter().map(|q| -(p - q).log10()).collect();
    let zip = |v: &[f64]| xs.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    let flat = |y: f64| vec![(xs[0], y), (xs[xs.len() - 1], y)];
    Ok(LinePlot {
        title: format!("test family ratios, p = {p}"),
        x_label: "-log10(p - q)".into(),
        y_label: "ratio".into(),
        series: vec![
            Series::new("test1", zip(&scan.ratios_test1)),
            Series::new("p - 1", flat(p - 1.0)).dashed(),
            Series::new("test2", zip(&scan.ratios_test2)),
            Series::new("(p - 1)^2", flat((p - 1.0).powi(2))).dashed(),
        ],
    })
}

/// `‖H* k_ε‖` and `‖(H*^2 - H*) k_ε‖` against `-log10 ε`, with limits.
pub fn keps_plot(p: f64) -> Result<LinePlot> {
    let eps: Vec<f64> = (2..=8).map(|i| 10f64.powf(-(i as f64) / 2.0)).collect();
    let rows = keps_scan(p, &eps)?;
    let xs: Vec<f64> = eps.iter().map(|e| -e.log10()).collect();
    let flat = |y: f64| vec![(xs[0], y), (xs[xs.len() - 1], y)];
    Ok(LinePlot {
        title: format!("k_eps norms, p = {p}"),
        x_label: "-log10(eps)".into(),
        y_label: "norm".into(),
        series: vec![
            Series::new("|H* k|", xs.iter().zip(&rows).map(|(&x, r)| (x, r.norm_dual)).collect()),
            Series::new("1", flat(1.0)).dashed(),
            Series::new("|(H*^2 - H*) k|", xs.iter().zip(&rows).map(|(&x, r)| (x, r.norm_dual_osc)).collect()),
            Series::new("C_p^(1/p)", flat(cp_root(p)?)).dashed(),
        ],
    })
}

/// Running best ratio of a search.
pub fn trace_plot(result: &SearchResult) -> Result<LinePlot> {
    let pts: Vec<(f64, f64)> = result.trace.iter().map(|t| (t.iteration as f64, t.ratio)).collect();
    let target = cp_root(result.p)?;
    let last = pts.last().map_or(1.0, |p| p.0);
    Ok(LinePlot {
        title: format!("search trace, p = {}", result.p),
        x_label: "evaluation".into(),
        y_label: "ratio".into(),
        series: vec![
            Series::new("best ratio", pts),
            Series::new("C_p^(1/p)", vec![(0.0, target), (last, target)]).dashed(),
        ],
    })
}
