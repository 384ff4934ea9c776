//! Profit-maximizing pricing for a focal seller with fixed reputation.
//!
//! As the focal price sweeps (0,1] along the fixed line ln r = ln r_i, the
//! focal point's frontier neighbors among the competitors stay constant on
//! intervals delimited by edge-line crossings and dominance onsets. The
//! objective (C - p) * share is maximized per interval (grid scan plus
//! golden-section refinement), then globally.

use serde::Serialize;
use thiserror::Error;

use crate::distribution::PreferenceCdf;
use crate::frontier::{upper_frontier_chain, Frontier};
use crate::market::{MarketSnapshot, NormalizedItem};
use crate::preference::{alpha_of_k, SlopeParam};

const GRID_POINTS: usize = 1024;
const REFINE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("OutOfRangePrice: price {0} outside (0, 1]")]
    OutOfRangePrice(f64),
    #[error("InvalidProblem: {0}")]
    InvalidProblem(String),
}

/// The focal seller's optimization setting: the market with the focal seller
/// removed, the seller's fixed normalized reputation, the profit ceiling C,
/// and the population preference distribution.
#[derive(Debug, Clone)]
pub struct PricingProblem {
    pub competitors: Option<MarketSnapshot>,
    pub r_i: f64,
    pub ceiling: f64,
    pub cdf: PreferenceCdf,
    /// Smallest admissible normalized price (p = 0 has no log image).
    pub p_min: f64,
}

impl PricingProblem {
    pub fn new(
        competitors: Option<MarketSnapshot>,
        r_i: f64,
        ceiling: f64,
        cdf: PreferenceCdf,
    ) -> Result<Self, PricingError> {
        if !(r_i > 0.0 && r_i <= 1.0) {
            return Err(PricingError::InvalidProblem(format!(
                "reputation {r_i} outside (0, 1]"
            )));
        }
        if !(ceiling > 0.0) {
            return Err(PricingError::InvalidProblem(format!(
                "ceiling {ceiling} must be positive"
            )));
        }
        cdf.validate()
            .map_err(|e| PricingError::InvalidProblem(e.to_string()))?;
        Ok(PricingProblem {
            competitors,
            r_i,
            ceiling,
            cdf,
            p_min: 1e-6,
        })
    }

    pub fn with_p_min(mut self, p_min: f64) -> Result<Self, PricingError> {
        if !(p_min > 0.0 && p_min < 1.0) {
            return Err(PricingError::InvalidProblem(format!(
                "p_min {p_min} outside (0, 1)"
            )));
        }
        self.p_min = p_min;
        Ok(self)
    }

    /// Competitor frontier, or None for an empty competitor market.
    pub fn frontier(&self) -> Option<Frontier> {
        self.competitors
            .as_ref()
            .map(|m| upper_frontier_chain(m).expect("competitor market is nonempty"))
    }

    pub fn decomposition(&self) -> IntervalDecomposition {
        match self.frontier() {
            Some(f) => competitor_intervals(&f, self.r_i),
            None => IntervalDecomposition::monopoly(self.r_i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// The focal point lies below the competitor frontier: share 0.
    Interior,
    /// On the frontier with the stated neighbors (none on both sides means
    /// monopoly, share 1).
    Active,
}

/// A price range over which the focal seller's key competitors are constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitorInterval {
    pub p_lo: f64,
    pub p_hi: f64,
    pub kind: IntervalKind,
    /// Lower-price frontier neighbor, when on the frontier.
    pub left: Option<NormalizedItem>,
    /// Higher-price frontier neighbor, when on the frontier.
    pub right: Option<NormalizedItem>,
}

/// Where an inserted point lands relative to the competitor frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Interior,
    Active {
        left: Option<usize>,
        right: Option<usize>,
    },
}

/// Place (ln_p, ln_r) against frontier vertices by direct insertion.
///
/// A competitor at the same price with strictly higher reputation wins the
/// tie; at equal or lower reputation the focal seller wins and the
/// competitor is evicted. A point exactly on an edge line counts as
/// on-frontier.
pub fn insert_point(vertices: &[NormalizedItem], ln_p: f64, ln_r: f64) -> Placement {
    for v in vertices {
        if v.ln_p == ln_p && v.ln_r > ln_r {
            return Placement::Interior;
        }
        if v.ln_p > ln_p && v.ln_r >= ln_r {
            // dominated: a competitor is at least as cheap and as reputed
            return Placement::Interior;
        }
    }
    let mut left: Option<(f64, usize)> = None;
    for (i, v) in vertices.iter().enumerate() {
        if v.ln_p < ln_p && v.ln_r > ln_r {
            let k = (ln_r - v.ln_r) / (ln_p - v.ln_p);
            left = match left {
                None => Some((k, i)),
                Some((bk, bi)) => {
                    if k < bk || (k == bk && v.ln_p > vertices[bi].ln_p) {
                        Some((k, i))
                    } else {
                        Some((bk, bi))
                    }
                }
            };
        }
    }
    let mut right: Option<(f64, usize)> = None;
    for (i, v) in vertices.iter().enumerate() {
        if v.ln_p > ln_p {
            let k = (v.ln_r - ln_r) / (v.ln_p - ln_p);
            right = match right {
                None => Some((k, i)),
                Some((bk, bi)) => {
                    if k > bk || (k == bk && v.ln_p < vertices[bi].ln_p) {
                        Some((k, i))
                    } else {
                        Some((bk, bi))
                    }
                }
            };
        }
    }
    if let (Some((kl, _)), Some((kr, _))) = (left, right) {
        if kl < kr {
            return Placement::Interior;
        }
    }
    Placement::Active {
        left: left.map(|(_, i)| i),
        right: right.map(|(_, i)| i),
    }
}

/// Breakpoint prices where the focal point crosses a frontier edge's
/// supporting line, plus dominance onsets at the endpoint vertices.
pub fn edge_intersections(frontier: &Frontier, r_i: f64) -> Vec<f64> {
    let c = r_i.ln();
    let mut out = Vec::new();
    if frontier.len() < 2 {
        return out;
    }
    for (j, &k) in frontier.edge_slopes.iter().enumerate() {
        let v = &frontier.vertices[j];
        let x = v.ln_p + (c - v.ln_r) / k;
        let p = x.exp();
        if p.is_finite() && p > 0.0 && p <= 1.0 {
            out.push(p);
        }
    }
    for v in [frontier.vertices.first().unwrap(), frontier.vertices.last().unwrap()] {
        if c >= v.ln_r && v.p > 0.0 && v.p <= 1.0 {
            out.push(v.p);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

/// The interval decomposition together with the competitor vertices needed
/// to resolve exact breakpoint prices by insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDecomposition {
    pub intervals: Vec<CompetitorInterval>,
    pub vertices: Vec<NormalizedItem>,
    pub r_i: f64,
    pub ln_r_i: f64,
}

impl IntervalDecomposition {
    fn monopoly(r_i: f64) -> Self {
        IntervalDecomposition {
            intervals: vec![CompetitorInterval {
                p_lo: 0.0,
                p_hi: 1.0,
                kind: IntervalKind::Active,
                left: None,
                right: None,
            }],
            vertices: Vec::new(),
            r_i,
            ln_r_i: r_i.ln(),
        }
    }

    /// Index of the interval whose half-open range (p_lo, p_hi] contains p.
    pub fn interval_index(&self, p: f64) -> Result<usize, PricingError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(PricingError::OutOfRangePrice(p));
        }
        let i = self.intervals.partition_point(|iv| iv.p_hi < p);
        Ok(i.min(self.intervals.len() - 1))
    }

    pub fn placement_at(&self, p: f64) -> Placement {
        insert_point(&self.vertices, p.ln(), self.ln_r_i)
    }

    fn share_from_placement(&self, p: f64, placement: Placement, cdf: &PreferenceCdf) -> f64 {
        match placement {
            Placement::Interior => 0.0,
            Placement::Active { left, right } => {
                let x = p.ln();
                let lo = match left {
                    Some(i) => {
                        let u = &self.vertices[i];
                        let k = (self.ln_r_i - u.ln_r) / (x - u.ln_p);
                        alpha_of_k(SlopeParam::new(k.min(0.0)).unwrap()).value()
                    }
                    None => 0.0,
                };
                let hi = match right {
                    Some(i) => {
                        let t = &self.vertices[i];
                        let k = (t.ln_r - self.ln_r_i) / (t.ln_p - x);
                        alpha_of_k(SlopeParam::new(k.min(0.0)).unwrap()).value()
                    }
                    None => 1.0,
                };
                (cdf.eval_unchecked(hi) - cdf.eval_unchecked(lo)).max(0.0)
            }
        }
    }
}

/// Tile (0,1] into competitor-constant intervals. Each open interval is
/// classified by direct insertion at its midpoint; adjacent intervals with
/// identical placement are merged.
pub fn competitor_intervals(frontier: &Frontier, r_i: f64) -> IntervalDecomposition {
    let vertices = frontier.vertices.clone();
    let c = r_i.ln();

    let mut bounds = edge_intersections(frontier, r_i);
    for v in &vertices {
        if v.p > 0.0 && v.p < 1.0 {
            bounds.push(v.p);
        }
    }
    bounds.push(1.0);
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup();
    bounds.retain(|&b| b > 0.0 && b <= 1.0);
    if *bounds.last().unwrap() != 1.0 {
        bounds.push(1.0);
    }

    let mut intervals: Vec<(CompetitorInterval, Placement)> = Vec::new();
    let mut lo = 0.0;
    for &hi in &bounds {
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let placement = insert_point(&vertices, mid.ln(), c);
        let (kind, left, right) = match placement {
            Placement::Interior => (IntervalKind::Interior, None, None),
            Placement::Active { left, right } => (
                IntervalKind::Active,
                left.map(|i| vertices[i].clone()),
                right.map(|i| vertices[i].clone()),
            ),
        };
        match intervals.last_mut() {
            Some((prev, prev_placement)) if *prev_placement == placement => {
                prev.p_hi = hi;
            }
            _ => intervals.push((
                CompetitorInterval {
                    p_lo: lo,
                    p_hi: hi,
                    kind,
                    left,
                    right,
                },
                placement,
            )),
        }
        lo = hi;
    }

    IntervalDecomposition {
        intervals: intervals.into_iter().map(|(iv, _)| iv).collect(),
        vertices,
        r_i,
        ln_r_i: c,
    }
}

/// Focal market share at price p. Prices strictly inside an interval use the
/// interval's cached neighbors; exact interval boundaries are resolved by
/// direct insertion.
pub fn share_at_price(
    p: f64,
    decomp: &IntervalDecomposition,
    cdf: &PreferenceCdf,
) -> Result<f64, PricingError> {
    let idx = decomp.interval_index(p)?;
    let iv = &decomp.intervals[idx];
    let placement = if p == iv.p_lo || p == iv.p_hi {
        decomp.placement_at(p)
    } else {
        match iv.kind {
            IntervalKind::Interior => Placement::Interior,
            IntervalKind::Active => Placement::Active {
                left: iv
                    .left
                    .as_ref()
                    .map(|u| decomp.vertices.iter().position(|v| v.id == u.id).unwrap()),
                right: iv
                    .right
                    .as_ref()
                    .map(|t| decomp.vertices.iter().position(|v| v.id == t.id).unwrap()),
            },
        }
    };
    Ok(decomp.share_from_placement(p, placement, cdf))
}

/// Best price within one interval, clamped to the admissible domain.
/// Interior intervals return profit 0 at their upper end.
pub fn optimize_interval(
    interval: &CompetitorInterval,
    decomp: &IntervalDecomposition,
    problem: &PricingProblem,
) -> (f64, f64) {
    let lo = interval.p_lo.max(problem.p_min);
    let hi = interval.p_hi.min(1.0);
    if lo > hi {
        return (hi.max(problem.p_min), f64::NEG_INFINITY);
    }
    if interval.kind == IntervalKind::Interior {
        // the closed upper boundary may sit on the frontier; check it
        let share = decomp.share_from_placement(hi, decomp.placement_at(hi), &problem.cdf);
        return (hi, (problem.ceiling - hi) * share);
    }

    let objective = |p: f64| -> f64 {
        let placement = if p == interval.p_lo || p == interval.p_hi {
            decomp.placement_at(p)
        } else {
            Placement::Active {
                left: interval
                    .left
                    .as_ref()
                    .map(|u| decomp.vertices.iter().position(|v| v.id == u.id).unwrap()),
                right: interval
                    .right
                    .as_ref()
                    .map(|t| decomp.vertices.iter().position(|v| v.id == t.id).unwrap()),
            }
        };
        (problem.ceiling - p) * decomp.share_from_placement(p, placement, &problem.cdf)
    };

    let n = GRID_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_p = lo;
    let mut best_profit = objective(lo);
    let mut best_idx = 0usize;
    for i in 1..n {
        let p = if i == n - 1 { hi } else { lo + step * i as f64 };
        let profit = objective(p);
        if profit > best_profit {
            best_profit = profit;
            best_p = p;
            best_idx = i;
        }
    }

    // golden-section refinement inside the bracketing grid cells
    let mut a = if best_idx == 0 { lo } else { lo + step * (best_idx - 1) as f64 };
    let mut b = if best_idx >= n - 2 { hi } else { lo + step * (best_idx + 1) as f64 };
    a = a.max(lo);
    b = b.min(hi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while b - a > REFINE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2);
        }
    }
    for (p, profit) in [(x1, f1), (x2, f2)] {
        if profit > best_profit || (profit == best_profit && p < best_p) {
            best_profit = profit;
            best_p = p;
        }
    }
    (best_p, best_profit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub share: f64,
    pub profit: f64,
}

/// The optimizer's result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricingSolution {
    pub p_star: f64,
    pub profit: f64,
    pub share: f64,
    pub interval_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurvePoint>>,
}

/// Globally optimal price: the best interval-wise optimum. Ties on equal
/// profit resolve to the smallest price.
pub fn optimize_price(problem: &PricingProblem) -> Result<PricingSolution, PricingError> {
    let decomp = problem.decomposition();
    let mut best: Option<(f64, f64)> = None;
    for interval in &decomp.intervals {
        if interval.p_hi < problem.p_min {
            continue;
        }
        let (p, profit) = optimize_interval(interval, &decomp, problem);
        best = match best {
            None => Some((p, profit)),
            Some((bp, bf)) => {
                if profit > bf || (profit == bf && p < bp) {
                    Some((p, profit))
                } else {
                    Some((bp, bf))
                }
            }
        };
    }
    let (p_star, profit) = best.expect("decomposition tiles (0,1]");
    let share = decomp.share_from_placement(p_star, decomp.placement_at(p_star), &problem.cdf);
    Ok(PricingSolution {
        p_star,
        profit,
        share,
        interval_index: decomp.interval_index(p_star)?,
        curve: None,
    })
}

/// Uniformly sampled (p, share, profit) curve over the admissible domain.
pub fn profit_curve(problem: &PricingProblem, samples: usize) -> Vec<CurvePoint> {
    let decomp = problem.decomposition();
    let n = samples.max(2);
    let lo = problem.p_min;
    (0..n)
        .map(|i| {
            let p = lo + (1.0 - lo) * i as f64 / (n - 1) as f64;
            let share = share_at_price(p, &decomp, &problem.cdf).unwrap();
            CurvePoint {
                p,
                share,
                profit: (problem.ceiling - p) * share,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{MarketSnapshot, NormalizedItem};

    fn market(points: &[(&str, f64, f64)]) -> MarketSnapshot {
        MarketSnapshot::new(
            points
                .iter()
                .map(|(id, p, r)| NormalizedItem::new(*id, *p, *r))
                .collect(),
            None,
        )
        .unwrap()
    }

    fn two_competitor_problem() -> PricingProblem {
        PricingProblem::new(
            Some(market(&[("a", 0.25, 1.0), ("b", 1.0, 0.25)])),
            0.5,
            1.0,
            PreferenceCdf::Uniform01,
        )
        .unwrap()
    }

    #[test]
    fn breakpoint_for_symmetric_edge() {
        let p = two_competitor_problem();
        let f = p.frontier().unwrap();
        let bps = edge_intersections(&f, 0.5);
        assert_eq!(bps.len(), 2); // edge crossing at 0.5 plus dominance onset at b
        assert!((bps[0] - 0.5).abs() < 1e-12);
        assert!((bps[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_breakpoints_for_single_vertex_frontier() {
        let m = market(&[("a", 0.5, 0.5)]);
        let f = upper_frontier_chain(&m).unwrap();
        assert!(edge_intersections(&f, 0.7).is_empty());
    }

    #[test]
    fn two_competitor_intervals() {
        let problem = two_competitor_problem();
        let d = problem.decomposition();
        assert_eq!(d.intervals.len(), 2);
        assert_eq!(d.intervals[0].kind, IntervalKind::Interior);
        assert!((d.intervals[0].p_hi - 0.5).abs() < 1e-12);
        assert_eq!(d.intervals[1].kind, IntervalKind::Active);
        assert_eq!(d.intervals[1].left.as_ref().unwrap().id, "a");
        assert_eq!(d.intervals[1].right.as_ref().unwrap().id, "b");
        assert_eq!(d.intervals[1].p_hi, 1.0);
    }

    #[test]
    fn single_competitor_intervals_with_dominance() {
        let problem = PricingProblem::new(
            Some(market(&[("a", 0.5, 0.5)])),
            1.0,
            1.0,
            PreferenceCdf::Uniform01,
        )
        .unwrap();
        let d = problem.decomposition();
        assert_eq!(d.intervals.len(), 2);
        assert_eq!(d.intervals[0].kind, IntervalKind::Active);
        assert!(d.intervals[0].left.is_none());
        assert_eq!(d.intervals[0].right.as_ref().unwrap().id, "a");
        assert!((d.intervals[0].p_hi - 0.5).abs() < 1e-12);
        // beyond 0.5 the competitor is dominated: monopoly
        assert_eq!(d.intervals[1].kind, IntervalKind::Active);
        assert!(d.intervals[1].left.is_none());
        assert!(d.intervals[1].right.is_none());
    }

    #[test]
    fn empty_market_is_monopoly() {
        let problem =
            PricingProblem::new(None, 0.8, 1.0, PreferenceCdf::Uniform01).unwrap();
        let d = problem.decomposition();
        assert_eq!(d.intervals.len(), 1);
        assert_eq!(d.intervals[0].kind, IntervalKind::Active);
        assert!(d.intervals[0].left.is_none() && d.intervals[0].right.is_none());
        let share = share_at_price(0.3, &d, &problem.cdf).unwrap();
        assert_eq!(share, 1.0);
    }

    #[test]
    fn share_at_known_price() {
        let problem = two_competitor_problem();
        let d = problem.decomposition();
        let p = 2f64.powf(-0.5);
        let share = share_at_price(p, &d, &problem.cdf).unwrap();
        assert!((share - (2.0 / 3.0 - 0.4)).abs() < 1e-9);
        // below the breakpoint: interior
        assert_eq!(share_at_price(0.3, &d, &problem.cdf).unwrap(), 0.0);
        assert!(share_at_price(0.0, &d, &problem.cdf).is_err());
        assert!(share_at_price(1.5, &d, &problem.cdf).is_err());
    }

    #[test]
    fn monopoly_interval_optimum_is_left_end() {
        let problem = PricingProblem::new(
            Some(market(&[("a", 0.5, 0.5)])),
            1.0,
            1.0,
            PreferenceCdf::Uniform01,
        )
        .unwrap();
        let d = problem.decomposition();
        let (p, profit) = optimize_interval(&d.intervals[1], &d, &problem);
        assert!((p - 0.5).abs() < 1e-9);
        assert!((profit - 0.5).abs() < 1e-9);
    }

    #[test]
    fn interior_interval_reports_zero_like_profit() {
        let problem = two_competitor_problem();
        let d = problem.decomposition();
        let (p, profit) = optimize_interval(&d.intervals[0], &d, &problem);
        // the closed upper end touches the frontier edge, where share is
        // still 0 measure-wise at the single point alpha boundary collapse
        assert!((p - 0.5).abs() < 1e-12);
        assert!(profit >= 0.0);
    }

    #[test]
    fn single_competitor_global_optimum() {
        let problem = PricingProblem::new(
            Some(market(&[("a", 0.5, 0.5)])),
            1.0,
            1.0,
            PreferenceCdf::Uniform01,
        )
        .unwrap();
        // at p = 0.25: slope to competitor is -1, alpha_hi = 0.5, profit 0.375
        let d = problem.decomposition();
        let share = share_at_price(0.25, &d, &problem.cdf).unwrap();
        assert!((share - 0.5).abs() < 1e-12);
        assert!(((1.0 - 0.25) * share - 0.375).abs() < 1e-12);

        let sol = optimize_price(&problem).unwrap();
        assert!((sol.p_star - 0.5).abs() < 1e-9);
        assert!((sol.profit - 0.5).abs() < 1e-9);
        assert!((sol.share - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monopoly_global_optimum_at_p_min() {
        let problem = PricingProblem::new(None, 1.0, 1.0, PreferenceCdf::Uniform01).unwrap();
        let sol = optimize_price(&problem).unwrap();
        assert_eq!(sol.p_star, 1e-6);
        assert!((sol.profit - (1.0 - 1e-6)).abs() < 1e-12);
        assert_eq!(sol.share, 1.0);
    }

    #[test]
    fn rejects_invalid_problems() {
        assert!(PricingProblem::new(None, 0.0, 1.0, PreferenceCdf::Uniform01).is_err());
        assert!(PricingProblem::new(None, 1.5, 1.0, PreferenceCdf::Uniform01).is_err());
        assert!(PricingProblem::new(None, 0.5, 0.0, PreferenceCdf::Uniform01).is_err());
    }
}
