//! The log-linear utility U = alpha ln p + (1 - alpha) ln r, the
//! correspondence between preference weights and log-plane slopes
//! (k = -alpha / (1 - alpha)), per-vertex alpha intervals, and market shares.

use thiserror::Error;

use crate::distribution::PreferenceCdf;
use crate::frontier::Frontier;
use crate::market::NormalizedItem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreferenceError {
    #[error("PositiveSlope: k must be <= 0, got {0}")]
    PositiveSlope(f64),
    #[error("OutOfDomain: alpha must lie in [0,1], got {0}")]
    OutOfDomain(f64),
    #[error("EmptyFrontier")]
    EmptyFrontier,
    #[error("InvalidCdf: {0}")]
    InvalidCdf(String),
}

/// A consumer's weight on price attractiveness, in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PreferenceWeight(f64);

impl PreferenceWeight {
    pub fn new(alpha: f64) -> Result<Self, PreferenceError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(PreferenceError::OutOfDomain(alpha));
        }
        Ok(PreferenceWeight(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// An indifference slope in the log plane, k <= 0. `f64::NEG_INFINITY` is the
/// distinguished value for alpha = 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SlopeParam(f64);

impl SlopeParam {
    pub fn new(k: f64) -> Result<Self, PreferenceError> {
        if k > 0.0 || k.is_nan() {
            return Err(PreferenceError::PositiveSlope(k));
        }
        Ok(SlopeParam(k))
    }

    pub fn neg_infinity() -> Self {
        SlopeParam(f64::NEG_INFINITY)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// k = -alpha / (1 - alpha); alpha = 1 maps to negative infinity.
pub fn k_of_alpha(alpha: PreferenceWeight) -> SlopeParam {
    let a = alpha.value();
    if a == 1.0 {
        SlopeParam::neg_infinity()
    } else {
        SlopeParam(-a / (1.0 - a))
    }
}

/// alpha = k / (k - 1); the inverse of [`k_of_alpha`].
pub fn alpha_of_k(k: SlopeParam) -> PreferenceWeight {
    let k = k.value();
    if k == f64::NEG_INFINITY {
        PreferenceWeight(1.0)
    } else {
        PreferenceWeight(k / (k - 1.0))
    }
}

/// U(alpha, item) = alpha ln p + (1 - alpha) ln r. Always <= 0.
pub fn utility(alpha: PreferenceWeight, item: &NormalizedItem) -> f64 {
    let a = alpha.value();
    a * item.ln_p + (1.0 - a) * item.ln_r
}

/// The preference-weight range over which one vertex is the best choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AlphaInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0);
        AlphaInterval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Per-vertex alpha intervals. Vertex i is attracted for slopes in
/// (k_{i,i+1}, k_{i-1,i}), which maps to alpha in
/// (alpha_of_k(k_{i-1,i}), alpha_of_k(k_{i,i+1})); the endpoints extend to
/// 0 and 1 respectively.
pub fn alpha_intervals(
    frontier: &Frontier,
) -> Result<Vec<(String, AlphaInterval)>, PreferenceError> {
    if frontier.is_empty() {
        return Err(PreferenceError::EmptyFrontier);
    }
    let n = frontier.len();
    let mut out = Vec::with_capacity(n);
    for (i, v) in frontier.vertices.iter().enumerate() {
        let lo = if i == 0 {
            0.0
        } else {
            alpha_of_k(SlopeParam(frontier.edge_slopes[i - 1])).value()
        };
        let hi = if i == n - 1 {
            1.0
        } else {
            alpha_of_k(SlopeParam(frontier.edge_slopes[i])).value()
        };
        out.push((v.id.clone(), AlphaInterval::new(lo, hi)));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareEntry {
    pub id: String,
    pub interval: AlphaInterval,
    pub share: f64,
}

/// Shares of the frontier vertices; interior items implicitly hold share 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable {
    pub entries: Vec<ShareEntry>,
}

impl ShareTable {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.share).sum()
    }

    pub fn share_of(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.share)
    }
}

/// share_i = F(alpha_hi_i) - F(alpha_lo_i); the column sums telescope to 1.
pub fn market_shares(
    frontier: &Frontier,
    cdf: &PreferenceCdf,
) -> Result<ShareTable, PreferenceError> {
    cdf.validate()
        .map_err(|e| PreferenceError::InvalidCdf(e.to_string()))?;
    let entries = alpha_intervals(frontier)?
        .into_iter()
        .map(|(id, interval)| {
            let share = cdf.eval_unchecked(interval.hi) - cdf.eval_unchecked(interval.lo);
            ShareEntry {
                id,
                interval,
                share,
            }
        })
        .collect();
    Ok(ShareTable { entries })
}
