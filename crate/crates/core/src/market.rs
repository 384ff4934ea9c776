//! Raw listings and their normalization into (0,1] attractiveness values.
//!
//! Price and reputation are mapped so that larger is always better: the
//! cheapest seller gets price attractiveness 1, the best-reputed seller
//! gets reputation 1. All downstream geometry works on the natural logs
//! of these values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("EmptyMarket: no listings supplied")]
    EmptyMarket,
    #[error("NonPositiveAttribute: listing {0} has a non-positive price or reputation")]
    NonPositiveAttribute(String),
    #[error("DuplicateId: id {0} appears more than once")]
    DuplicateId(String),
}

/// A seller's raw offer as it appears in input data.
#[derive(Debug, Clone, PartialEq)]
pub struct RawListing {
    pub id: String,
    pub price: f64,
    pub reputation: f64,
}

impl RawListing {
    pub fn new(id: impl Into<String>, price: f64, reputation: f64) -> Self {
        RawListing {
            id: id.into(),
            price,
            reputation,
        }
    }
}

/// A seller with normalized attractiveness pair (p, r) in (0,1]^2 and the
/// cached log coordinates used by the frontier geometry.
///
/// `ln_p`/`ln_r` are computed once in [`NormalizedItem::new`]; nothing else
/// recomputes them, so exact duplicates stay bitwise identical.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedItem {
    pub id: String,
    pub p: f64,
    pub r: f64,
    pub ln_p: f64,
    pub ln_r: f64,
}

impl NormalizedItem {
    pub fn new(id: impl Into<String>, p: f64, r: f64) -> Self {
        debug_assert!(p > 0.0 && p <= 1.0, "p out of (0,1]: {p}");
        debug_assert!(r > 0.0 && r <= 1.0, "r out of (0,1]: {r}");
        NormalizedItem {
            id: id.into(),
            p,
            r,
            ln_p: p.ln(),
            ln_r: r.ln(),
        }
    }
}

/// An ordered, normalized market.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSnapshot {
    pub items: Vec<NormalizedItem>,
    pub label: Option<String>,
}

impl MarketSnapshot {
    pub fn new(items: Vec<NormalizedItem>, label: Option<String>) -> Result<Self, MarketError> {
        if items.is_empty() {
            return Err(MarketError::EmptyMarket);
        }
        let mut seen = std::collections::HashSet::new();
        for it in &items {
            if !seen.insert(it.id.as_str()) {
                return Err(MarketError::DuplicateId(it.id.clone()));
            }
        }
        Ok(MarketSnapshot { items, label })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceRule {
    /// p = min raw price / raw price; the cheapest listing gets p = 1.
    ReciprocalMin,
    /// p = (min + max - price) / max; affine in the raw price, cheapest gets 1.
    InverseMinmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReputationRule {
    /// r = raw reputation / max raw reputation.
    MaxRatio,
    /// r = eps + (1 - eps) * (rep - min) / (max - min); tolerates zero scores.
    MinmaxWithFloor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationConfig {
    pub price_rule: PriceRule,
    pub reputation_rule: ReputationRule,
    /// Floor used by `MinmaxWithFloor`; must lie in (0, 1).
    pub epsilon: f64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            price_rule: PriceRule::ReciprocalMin,
            reputation_rule: ReputationRule::MaxRatio,
            epsilon: 1e-3,
        }
    }
}

/// Normalize raw listings into a [`MarketSnapshot`], preserving input order.
pub fn normalize_market(
    listings: &[RawListing],
    config: &NormalizationConfig,
) -> Result<MarketSnapshot, MarketError> {
    if listings.is_empty() {
        return Err(MarketError::EmptyMarket);
    }
    let mut seen = std::collections::HashSet::new();
    for l in listings {
        if !seen.insert(l.id.as_str()) {
            return Err(MarketError::DuplicateId(l.id.clone()));
        }
        let rep_ok = match config.reputation_rule {
            ReputationRule::MaxRatio => l.reputation > 0.0,
            ReputationRule::MinmaxWithFloor => l.reputation >= 0.0,
        };
        if !(l.price > 0.0) || !rep_ok || !l.price.is_finite() || !l.reputation.is_finite() {
            return Err(MarketError::NonPositiveAttribute(l.id.clone()));
        }
    }

    let min_price = listings.iter().map(|l| l.price).fold(f64::INFINITY, f64::min);
    let max_price = listings.iter().map(|l| l.price).fold(0.0_f64, f64::max);
    let min_rep = listings
        .iter()
        .map(|l| l.reputation)
        .fold(f64::INFINITY, f64::min);
    let max_rep = listings.iter().map(|l| l.reputation).fold(0.0_f64, f64::max);
    if max_rep <= 0.0 {
        // all-zero reputations cannot be floored into (0,1]
        return Err(MarketError::NonPositiveAttribute(listings[0].id.clone()));
    }

    let items = listings
        .iter()
        .map(|l| {
            let p = match config.price_rule {
                PriceRule::ReciprocalMin => min_price / l.price,
                PriceRule::InverseMinmax => (min_price + max_price - l.price) / max_price,
            };
            let r = match config.reputation_rule {
                ReputationRule::MaxRatio => l.reputation / max_rep,
                ReputationRule::MinmaxWithFloor => {
                    if max_rep == min_rep {
                        1.0
                    } else {
                        config.epsilon
                            + (1.0 - config.epsilon) * (l.reputation - min_rep)
                                / (max_rep - min_rep)
                    }
                }
            };
            NormalizedItem::new(l.id.clone(), p, r)
        })
        .collect();

    MarketSnapshot::new(items, None)
}

/// Project a market onto the log plane as (id, ln p, ln r) triples.
pub fn log_project(market: &MarketSnapshot) -> Vec<(String, f64, f64)> {
    market
        .items
        .iter()
        .map(|it| (it.id.clone(), it.ln_p, it.ln_r))
        .collect()
}

/// Informational pre-frontier hygiene report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarketReport {
    /// Pairs of ids occupying the exact same (p, r) point.
    pub duplicate_points: Vec<(String, String)>,
    /// Pairs of ids sharing the same p with different r.
    pub shared_price: Vec<(String, String)>,
    /// Ids strictly dominated in both attributes by some other item.
    pub dominated: Vec<String>,
}

impl MarketReport {
    pub fn is_clean(&self) -> bool {
        self.duplicate_points.is_empty() && self.shared_price.is_empty() && self.dominated.is_empty()
    }
}

/// Report duplicate points, shared-price pairs and strictly dominated items.
pub fn validate_market(market: &MarketSnapshot) -> MarketReport {
    let mut report = MarketReport::default();
    let items = &market.items;
    for (i, a) in items.iter().enumerate() {
        for b in items.iter().skip(i + 1) {
            if a.ln_p == b.ln_p && a.ln_r == b.ln_r {
                report.duplicate_points.push((a.id.clone(), b.id.clone()));
            } else if a.ln_p == b.ln_p {
                report.shared_price.push((a.id.clone(), b.id.clone()));
            }
        }
        if items
            .iter()
            .any(|b| b.p > a.p && b.r > a.r)
        {
            report.dominated.push(a.id.clone());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NormalizationConfig {
        NormalizationConfig::default()
    }

    fn listings(prices: &[f64], reps: &[f64]) -> Vec<RawListing> {
        prices
            .iter()
            .zip(reps)
            .enumerate()
            .map(|(i, (&p, &r))| RawListing::new(format!("s{i}"), p, r))
            .collect()
    }

    #[test]
    fn reciprocal_min_prices() {
        let m = normalize_market(&listings(&[100.0, 200.0, 400.0], &[1.0, 1.0, 1.0]), &cfg())
            .unwrap();
        let ps: Vec<f64> = m.items.iter().map(|i| i.p).collect();
        assert_eq!(ps, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn max_ratio_reputations() {
        let m = normalize_market(&listings(&[1.0, 1.0], &[500.0, 1000.0]), &cfg()).unwrap();
        let rs: Vec<f64> = m.items.iter().map(|i| i.r).collect();
        assert_eq!(rs, vec![0.5, 1.0]);
    }

    #[test]
    fn single_listing_is_the_maximum() {
        let m = normalize_market(&[RawListing::new("a", 7.0, 3.0)], &cfg()).unwrap();
        assert_eq!(m.items[0].p, 1.0);
        assert_eq!(m.items[0].r, 1.0);
    }

    #[test]
    fn log_projection_values() {
        let m = MarketSnapshot::new(
            vec![
                NormalizedItem::new("a", 1.0, 1.0),
                NormalizedItem::new("b", 0.5, 0.25),
                NormalizedItem::new("c", 0.25, 1.0),
            ],
            None,
        )
        .unwrap();
        let proj = log_project(&m);
        assert_eq!(proj[0].1, 0.0);
        assert_eq!(proj[0].2, 0.0);
        assert!((proj[1].1 - (-0.6931471805599453)).abs() < 1e-15);
        assert!((proj[1].2 - (-1.3862943611198906)).abs() < 1e-15);
        assert!((proj[2].1 - (-1.3862943611198906)).abs() < 1e-15);
        assert_eq!(proj[2].2, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(normalize_market(&[], &cfg()), Err(MarketError::EmptyMarket));
        let err = normalize_market(&[RawListing::new("z", 0.0, 1.0)], &cfg()).unwrap_err();
        assert_eq!(err, MarketError::NonPositiveAttribute("z".into()));
        let err = normalize_market(&[RawListing::new("z", 1.0, 0.0)], &cfg()).unwrap_err();
        assert_eq!(err, MarketError::NonPositiveAttribute("z".into()));
        let err = normalize_market(
            &[RawListing::new("a", 1.0, 1.0), RawListing::new("a", 2.0, 1.0)],
            &cfg(),
        )
        .unwrap_err();
        assert_eq!(err, MarketError::DuplicateId("a".into()));
    }

    #[test]
    fn floor_rule_accepts_zero_reputation() {
        let c = NormalizationConfig {
            reputation_rule: ReputationRule::MinmaxWithFloor,
            epsilon: 0.01,
            ..cfg()
        };
        let m = normalize_market(&listings(&[1.0, 1.0], &[0.0, 10.0]), &c).unwrap();
        assert_eq!(m.items[0].r, 0.01);
        assert_eq!(m.items[1].r, 1.0);
    }

    #[test]
    fn inverse_minmax_lands_in_unit_interval() {
        let c = NormalizationConfig {
            price_rule: PriceRule::InverseMinmax,
            ..cfg()
        };
        let m = normalize_market(&listings(&[100.0, 250.0, 400.0], &[1.0, 1.0, 1.0]), &c).unwrap();
        assert_eq!(m.items[0].p, 1.0);
        for it in &m.items {
            assert!(it.p > 0.0 && it.p <= 1.0);
        }
        assert!(m.items[1].p > m.items[2].p);
    }

    #[test]
    fn price_scale_invariance_under_reciprocal_min() {
        let a = normalize_market(&listings(&[10.0, 20.0, 50.0], &[1.0, 2.0, 3.0]), &cfg()).unwrap();
        let b =
            normalize_market(&listings(&[30.0, 60.0, 150.0], &[1.0, 2.0, 3.0]), &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exp_ln_round_trip() {
        let m = normalize_market(&listings(&[3.0, 7.0, 11.0], &[2.0, 9.0, 4.0]), &cfg()).unwrap();
        for it in &m.items {
            assert!((it.ln_p.exp() - it.p).abs() <= 1e-15 * it.p.max(1.0));
            assert!((it.ln_r.exp() - it.r).abs() <= 1e-15 * it.r.max(1.0));
        }
    }

    #[test]
    fn report_flags_dominated_and_duplicates() {
        let m = MarketSnapshot::new(
            vec![
                NormalizedItem::new("a", 0.5, 0.5),
                NormalizedItem::new("b", 0.6, 0.6),
            ],
            None,
        )
        .unwrap();
        let rep = validate_market(&m);
        assert_eq!(rep.dominated, vec!["a".to_string()]);

        let m = MarketSnapshot::new(
            vec![
                NormalizedItem::new("a", 0.5, 0.5),
                NormalizedItem::new("b", 0.5, 0.5),
            ],
            None,
        )
        .unwrap();
        let rep = validate_market(&m);
        assert_eq!(rep.duplicate_points, vec![("a".to_string(), "b".to_string())]);

        let m = MarketSnapshot::new(
            vec![
                NormalizedItem::new("a", 0.25, 1.0),
                NormalizedItem::new("b", 1.0, 0.25),
            ],
            None,
        )
        .unwrap();
        assert!(validate_market(&m).is_clean());
    }
}
