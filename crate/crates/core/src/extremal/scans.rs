use serde::{Deserialize, Serialize};

use crate::cone::{family, FamilyKind};
use crate::error::{domain, Result};
use crate::kernel::HEvaluator;
use crate::norms::lp_pow;
use crate::operators::{dual_hardy, dual_osc};

/// Closed-form `p`-th powers of the norms along the `f_q`, `g_q` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyNorms {
    pub q: f64,
    /// `‖f_q‖^p`
    pub f: f64,
    /// `‖(H* - I) f_q‖^p`
    pub dual_osc_f: f64,
    /// `‖(H* - I)(f_q - g_q)‖^p`
    pub dual_osc_diff: f64,
    /// `‖g_q‖^p`, which equals `‖(H - I)(f_q - g_q)‖^p`
    pub g: f64,
    /// `ε = q^{(p-1)/p} (p - q)^{1/p}`
    pub eps: f64,
}

pub fn family_norms(p: f64, q: f64) -> Result<FamilyNorms> {
    if !(q > 1.0 && q < p) || !p.is_finite() {
        return Err(domain("family_scan", format!("need 1 < q < p, got q={q}, p={p}")));
    }
    let ev = HEvaluator::new(p)?;
    let tail = q / (p - q);
    Ok(FamilyNorms {
        q,
        f: 1.0 + tail,
        dual_osc_f: ev.h(q)? + (q - 1.0).powf(p) * tail,
        dual_osc_diff: ev.h(q - 1.0)? + ((q - 1.0).powi(2) / q).powf(p) * tail,
        g: q.powf(1.0 - p) / (p - q),
        eps: q.powf((p - 1.0) / p) * (p - q).powf(1.0 / p),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyScan {
    pub p: f64,
    pub q_list: Vec<f64>,
    /// `‖(H* - I) f_q‖ / ‖f_q‖`, tends to `p - 1`
    pub ratios_test1: Vec<f64>,
    /// `‖(H* - I)(f_q - g_q)‖ / ‖(H - I)(f_q - g_q)‖`, tends to `(p - 1)^2`
    pub ratios_test2: Vec<f64>,
    /// `ε ‖g_q‖`, identically 1
    pub eps_check: Vec<f64>,
}

pub fn family_scan(p: f64, q_list: &[f64]) -> Result<FamilyScan> {
    let mut scan = FamilyScan {
        p,
        q_list: q_list.to_vec(),
        ratios_test1: Vec::with_capacity(q_list.len()),
        ratios_test2: Vec::with_capacity(q_list.len()),
        eps_check: Vec::with_capacity(q_list.len()),
    };
    for &q in q_list {
        let n = family_norms(p, q)?;
        scan.ratios_test1.push((n.dual_osc_f / n.f).powf(1.0 / p));
        scan.ratios_test2.push((n.dual_osc_diff / n.g).powf(1.0 / p));
        scan.eps_check.push(n.eps * n.g.powf(1.0 / p));
    }
    Ok(scan)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KepsRow {
    pub eps: f64,
    /// `‖H* k_ε‖_p`
    pub norm_dual: f64,
    /// `‖(H*^2 - H*) k_ε‖_p`
    pub norm_dual_osc: f64,
}

pub fn keps_scan(p: f64, eps_list: &[f64]) -> Result<Vec<KepsRow>> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(domain("keps_scan", format!("need finite p >= 1, got {p}")));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let k = family(FamilyKind::KEps, eps)?;
            let hk = dual_hardy(&k)?;
            let osc = dual_osc(&hk)?;
            Ok(KepsRow {
                eps,
                norm_dual: lp_pow(&hk, p)?.powf(1.0 / p),
                norm_dual_osc: lp_pow(&osc, p)?.powf(1.0 / p),
            })
        })
        .collect()
}
