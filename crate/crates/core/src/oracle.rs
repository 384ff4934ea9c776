//! Brute-force reference implementations.
//!
//! Everything here is re-derived from the utility definition alone: argmax
//! over items on a dense alpha grid, CDF-weighted grid integration for
//! shares, and per-price linear-constraint intersection for the pricing
//! oracle. No hull or interval geometry is shared with the analytic modules,
//! so agreement between the two routes is a meaningful check.

use std::collections::BTreeSet;

use crate::distribution::PreferenceCdf;
use crate::market::{MarketSnapshot, NormalizedItem};
use crate::preference::{utility, PreferenceError, PreferenceWeight};
use crate::pricing::PricingProblem;

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub grid_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { grid_points: 10001 }
    }
}

/// Tie rule shared with the analytic modules: higher r first, then lower id.
fn beats(a: &NormalizedItem, b: &NormalizedItem, ua: f64, ub: f64) -> bool {
    if ua != ub {
        return ua > ub;
    }
    if a.r != b.r {
        return a.r > b.r;
    }
    a.id < b.id
}

/// The item a consumer with the given weight picks: direct utility argmax.
pub fn choose_at_alpha<'m>(
    alpha: PreferenceWeight,
    market: &'m MarketSnapshot,
) -> Result<&'m NormalizedItem, PreferenceError> {
    let mut iter = market.items.iter();
    let mut best = iter.next().ok_or(PreferenceError::EmptyFrontier)?;
    let mut best_u = utility(alpha, best);
    for it in iter {
        let u = utility(alpha, it);
        if beats(it, best, u, best_u) {
            best = it;
            best_u = u;
        }
    }
    Ok(best)
}

/// Empirical share table: CDF mass of each grid cell assigned to the argmax
/// at the cell's center point.
pub fn sweep_shares(
    market: &MarketSnapshot,
    cdf: &PreferenceCdf,
    cfg: &SweepConfig,
) -> Vec<(String, f64)> {
    let g = cfg.grid_points.max(2);
    let mut shares: Vec<(String, f64)> = market
        .items
        .iter()
        .map(|it| (it.id.clone(), 0.0))
        .collect();
    let step = 1.0 / (g - 1) as f64;
    // accumulate per maximal run of identical argmax so masses telescope
    let mut run_start_boundary = 0.0_f64;
    let mut run_id: Option<String> = None;
    for i in 0..g {
        let alpha = i as f64 * step;
        let chosen = choose_at_alpha(PreferenceWeight::new(alpha).unwrap(), market).unwrap();
        if run_id.as_deref() != Some(chosen.id.as_str()) {
            if let Some(prev) = run_id.take() {
                let boundary = alpha - 0.5 * step;
                let mass =
                    cdf.eval_unchecked(boundary) - cdf.eval_unchecked(run_start_boundary);
                let slot = shares.iter_mut().find(|(id, _)| *id == prev).unwrap();
                slot.1 += mass;
                run_start_boundary = boundary;
            }
            run_id = Some(chosen.id.clone());
        }
    }
    if let Some(prev) = run_id {
        let mass = cdf.eval_unchecked(1.0) - cdf.eval_unchecked(run_start_boundary);
        let slot = shares.iter_mut().find(|(id, _)| *id == prev).unwrap();
        slot.1 += mass;
    }
    shares
}

/// Ids chosen at some grid alpha: the brute-force frontier vertex set.
pub fn frontier_bruteforce(market: &MarketSnapshot, cfg: &SweepConfig) -> BTreeSet<String> {
    let g = cfg.grid_points.max(2);
    let mut out = BTreeSet::new();
    for i in 0..g {
        let alpha = i as f64 / (g - 1) as f64;
        let chosen = choose_at_alpha(PreferenceWeight::new(alpha).unwrap(), market).unwrap();
        out.insert(chosen.id.clone());
    }
    out
}

/// Alpha range over which a point at (ln_p, ln_r) beats every listed item,
/// from the pairwise utility differences (each linear in alpha). Ties count
/// for the focal point.
fn winning_alpha_range(items: &[NormalizedItem], ln_p: f64, ln_r: f64) -> Option<(f64, f64)> {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for it in items {
        // (alpha ln_p + (1-alpha) ln_r) - (alpha ln_p_j + (1-alpha) ln_r_j) >= 0
        let b = ln_r - it.ln_r;
        let a = (ln_p - it.ln_p) - b;
        if a > 0.0 {
            lo = lo.max(-b / a);
        } else if a < 0.0 {
            hi = hi.min(-b / a);
        } else if b < 0.0 {
            return None;
        }
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Dense-grid pricing reference: sweep p over [p_min, 1] and score
/// (C - p) * mass of the alpha range where the focal point wins outright.
pub fn price_grid_oracle(problem: &PricingProblem, grid_points: usize) -> (f64, f64) {
    let g = grid_points.max(2);
    let empty = Vec::new();
    let items = problem
        .competitors
        .as_ref()
        .map(|m| m.items.as_slice())
        .unwrap_or(&empty);
    let ln_r = problem.r_i.ln();
    let lo = problem.p_min;
    let mut best_p = lo;
    let mut best_profit = f64::NEG_INFINITY;
    for i in 0..g {
        let p = lo + (1.0 - lo) * i as f64 / (g - 1) as f64;
        let share = match winning_alpha_range(items, p.ln(), ln_r) {
            Some((a_lo, a_hi)) => {
                problem.cdf.eval_unchecked(a_hi) - problem.cdf.eval_unchecked(a_lo)
            }
            None => 0.0,
        };
        let profit = (problem.ceiling - p) * share;
        if profit > best_profit {
            best_profit = profit;
            best_p = p;
        }
    }
    (best_p, best_profit)
}
