//! The population preference distribution F(alpha) on [0,1], and its
//! estimation from purchase histories.
//!
//! Each purchase record pins the buyer's alpha to the chosen vertex's
//! interval; superimposing one uniform component per record gives the
//! population mixture. All supported CDFs are continuous, so interval
//! boundary ties carry zero mass.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::upper_frontier_chain;
use crate::market::MarketSnapshot;
use crate::preference::alpha_intervals;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("InvalidCdf: {0}")]
    InvalidCdf(String),
    #[error("OutOfDomain: alpha must lie in [0,1], got {0}")]
    OutOfDomain(f64),
    #[error("EmptyHistory: no purchase records supplied")]
    EmptyHistory,
    #[error("AllRecordsInconsistent: every chosen item is interior to its market frontier")]
    AllRecordsInconsistent,
    #[error("AllZeroCounts: histogram has no mass")]
    AllZeroCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

/// F(alpha) on [0,1]. F(0) = 0, F(1) = 1, nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PreferenceCdf {
    Uniform01,
    UniformInterval {
        lo: f64,
        hi: f64,
    },
    MixtureOfUniforms {
        components: Vec<MixtureComponent>,
    },
    /// Knots are (alpha, F(alpha)) pairs, first (0,0), last (1,1).
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl PreferenceCdf {
    pub fn validate(&self) -> Result<(), DistributionError> {
        let bad = |msg: String| Err(DistributionError::InvalidCdf(msg));
        match self {
            PreferenceCdf::Uniform01 => Ok(()),
            PreferenceCdf::UniformInterval { lo, hi } => {
                if !(0.0..=1.0).contains(lo) || !(0.0..=1.0).contains(hi) || lo >= hi {
                    return bad(format!("uniform interval ({lo}, {hi}) invalid"));
                }
                Ok(())
            }
            PreferenceCdf::MixtureOfUniforms { components } => {
                if components.is_empty() {
                    return bad("mixture has no components".into());
                }
                let mut total = 0.0;
                for c in components {
                    if !(0.0..=1.0).contains(&c.lo) || !(0.0..=1.0).contains(&c.hi) || c.lo >= c.hi
                    {
                        return bad(format!("mixture component ({}, {}) invalid", c.lo, c.hi));
                    }
                    if !(c.weight >= 0.0) {
                        return bad(format!("negative mixture weight {}", c.weight));
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("mixture weights sum to {total}, expected 1"));
                }
                Ok(())
            }
            PreferenceCdf::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return bad("piecewise-linear CDF needs at least two knots".into());
                }
                if knots[0] != (0.0, 0.0) {
                    return bad("first knot must be (0, 0)".into());
                }
                if *knots.last().unwrap() != (1.0, 1.0) {
                    return bad("last knot must be (1, 1)".into());
                }
                for w in knots.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return bad(format!("knot alphas not strictly increasing at {}", w[1].0));
                    }
                    if !(w[0].1 <= w[1].1) {
                        return bad(format!("knot values decreasing at {}", w[1].0));
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluate F(alpha) without re-validating the representation.
    pub fn eval_unchecked(&self, alpha: f64) -> f64 {
        match self {
            PreferenceCdf::Uniform01 => alpha,
            PreferenceCdf::UniformInterval { lo, hi } => uniform_cdf(*lo, *hi, alpha),
            PreferenceCdf::MixtureOfUniforms { components } => components
                .iter()
                .map(|c| c.weight * uniform_cdf(c.lo, c.hi, alpha))
                .sum(),
            PreferenceCdf::PiecewiseLinear { knots } => {
                match knots.binary_search_by(|k| k.0.partial_cmp(&alpha).unwrap()) {
                    Ok(i) => knots[i].1,
                    Err(i) => {
                        // alpha strictly between knots i-1 and i
                        let (a0, f0) = knots[i - 1];
                        let (a1, f1) = knots[i];
                        f0 + (f1 - f0) * (alpha - a0) / (a1 - a0)
                    }
                }
            }
        }
    }
}

fn uniform_cdf(lo: f64, hi: f64, alpha: f64) -> f64 {
    ((alpha - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Validated CDF evaluation.
pub fn cdf_eval(cdf: &PreferenceCdf, alpha: f64) -> Result<f64, DistributionError> {
    cdf.validate()?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(DistributionError::OutOfDomain(alpha));
    }
    Ok(cdf.eval_unchecked(alpha))
}

/// One historical purchase: a market and the id actually chosen in it.
#[derive(Debug, Clone, PartialEq)]
pub struct PurchaseRecord {
    pub market: MarketSnapshot,
    pub chosen_id: String,
    pub user_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureEstimate {
    pub cdf: PreferenceCdf,
    pub records_used: usize,
    /// Records whose chosen item is not a frontier vertex of its market;
    /// the model assigns those choices probability zero, so they are skipped.
    pub records_excluded: usize,
}

/// Equal-weight mixture of the chosen vertices' alpha intervals.
pub fn estimate_mixture(history: &[PurchaseRecord]) -> Result<MixtureEstimate, DistributionError> {
    if history.is_empty() {
        return Err(DistributionError::EmptyHistory);
    }
    let mut intervals = Vec::with_capacity(history.len());
    let mut excluded = 0usize;
    for rec in history {
        let frontier = upper_frontier_chain(&rec.market)
            .map_err(|e| DistributionError::InvalidCdf(e.to_string()))?;
        let ivs = alpha_intervals(&frontier)
            .map_err(|e| DistributionError::InvalidCdf(e.to_string()))?;
        match ivs.iter().find(|(id, _)| *id == rec.chosen_id) {
            Some((_, iv)) => intervals.push((iv.lo, iv.hi)),
            None => excluded += 1,
        }
    }
    if intervals.is_empty() {
        return Err(DistributionError::AllRecordsInconsistent);
    }
    let w = 1.0 / intervals.len() as f64;
    let components = intervals
        .into_iter()
        .map(|(lo, hi)| MixtureComponent { lo, hi, weight: w })
        .collect();
    Ok(MixtureEstimate {
        cdf: PreferenceCdf::MixtureOfUniforms { components },
        records_used: history.len() - excluded,
        records_excluded: excluded,
    })
}

/// Piecewise-linear CDF from bin counts over a uniform partition of [0,1].
pub fn cdf_from_histogram(counts: &[u64]) -> Result<PreferenceCdf, DistributionError> {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return Err(DistributionError::AllZeroCounts);
    }
    let n = counts.len();
    let mut knots = Vec::with_capacity(n + 1);
    knots.push((0.0, 0.0));
    let mut acc = 0u64;
    for (i, &c) in counts.iter().enumerate() {
        acc += c;
        let alpha = if i + 1 == n { 1.0 } else { (i + 1) as f64 / n as f64 };
        let f = if i + 1 == n { 1.0 } else { acc as f64 / total as f64 };
        knots.push((alpha, f));
    }
    Ok(PreferenceCdf::PiecewiseLinear { knots })
}
