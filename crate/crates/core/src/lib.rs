//! Consumer choice over price/reputation trade-offs.
//!
//! Sellers are normalized into (0,1]^2 attractiveness space; a consumer with
//! weight alpha picks the item maximizing alpha ln p + (1 - alpha) ln r. Only
//! vertices of the upper convex frontier in (ln p, ln r) are ever chosen, and
//! each vertex owns a contiguous alpha interval, so market shares are CDF
//! differences over those intervals. A focal seller's profit-maximizing price
//! follows by decomposing its price axis into competitor-constant intervals.

pub mod cli;
pub mod distribution;
pub mod frontier;
pub mod market;
pub mod oracle;
pub mod preference;
pub mod pricing;

pub use distribution::{cdf_eval, cdf_from_histogram, estimate_mixture, PreferenceCdf};
pub use frontier::{classify, slope, upper_frontier_chain, upper_frontier_scan, Frontier};
pub use market::{normalize_market, MarketSnapshot, NormalizationConfig, RawListing};
pub use preference::{alpha_intervals, alpha_of_k, k_of_alpha, market_shares, utility};
pub use pricing::{
    competitor_intervals, edge_intersections, optimize_price, share_at_price, PricingProblem,
    PricingSolution,
};
