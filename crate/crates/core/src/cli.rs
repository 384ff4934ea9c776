//! Command implementations behind the `frontier-pricing` binary: CSV/JSON
//! I/O, deterministic number formatting, and the profit-curve SVG emitter.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::distribution::{estimate_mixture, PreferenceCdf, PurchaseRecord};
use crate::frontier::{classify, upper_frontier_chain, upper_frontier_scan, Role};
use crate::market::{
    normalize_market, MarketSnapshot, NormalizationConfig, PriceRule, RawListing, ReputationRule,
};
use crate::oracle::{frontier_bruteforce, price_grid_oracle, sweep_shares, SweepConfig};
use crate::preference::market_shares;
use crate::pricing::{optimize_price, profit_curve, CurvePoint, PricingProblem};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: exit code 1.
    #[error("{0}")]
    User(String),
    /// Broken internal invariant: exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

fn user<E: std::fmt::Display>(e: E) -> CliError {
    CliError::User(e.to_string())
}

/// Format with 12 significant digits, plain decimal where practical.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-9..=15).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let point = exp + 1;
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

#[derive(Debug, Deserialize, Default)]
struct NormConfigFile {
    price_rule: Option<PriceRule>,
    reputation_rule: Option<ReputationRule>,
    epsilon: Option<f64>,
}

/// Load a normalization config JSON, falling back to defaults per field.
pub fn load_norm_config(path: Option<&Path>) -> Result<NormalizationConfig, CliError> {
    let mut cfg = NormalizationConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(user)?;
        let raw: NormConfigFile = serde_json::from_str(&text).map_err(user)?;
        if let Some(rule) = raw.price_rule {
            cfg.price_rule = rule;
        }
        if let Some(rule) = raw.reputation_rule {
            cfg.reputation_rule = rule;
        }
        if let Some(eps) = raw.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(CliError::User(format!("epsilon {eps} outside (0, 1)")));
            }
            cfg.epsilon = eps;
        }
    }
    Ok(cfg)
}

pub fn load_cdf(path: Option<&Path>) -> Result<PreferenceCdf, CliError> {
    match path {
        None => Ok(PreferenceCdf::Uniform01),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(user)?;
            let cdf: PreferenceCdf = serde_json::from_str(&text).map_err(user)?;
            cdf.validate().map_err(user)?;
            Ok(cdf)
        }
    }
}

/// Read `id,price,reputation` rows.
pub fn read_listings_csv(path: &Path) -> Result<Vec<RawListing>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(user)?;
    let headers = reader.headers().map_err(user)?.clone();
    let expected = ["id", "price", "reputation"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::User(format!(
            "expected header id,price,reputation, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut listings = Vec::new();
    for row in reader.records() {
        let row = row.map_err(user)?;
        let price: f64 = row[1].trim().parse().map_err(user)?;
        let reputation: f64 = row[2].trim().parse().map_err(user)?;
        listings.push(RawListing::new(row[0].trim(), price, reputation));
    }
    Ok(listings)
}

/// Read `market_label,id,price,reputation,chosen` rows grouped by label.
pub fn read_history_csv(
    path: &Path,
    config: &NormalizationConfig,
) -> Result<Vec<PurchaseRecord>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(user)?;
    let headers = reader.headers().map_err(user)?.clone();
    let expected = ["market_label", "id", "price", "reputation", "chosen"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::User(format!(
            "expected header market_label,id,price,reputation,chosen, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    // rows arrive grouped by label; one (listings, chosen ids) bucket per label
    let mut groups: Vec<(String, Vec<RawListing>, Vec<String>)> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(user)?;
        let label = row[0].trim().to_string();
        let id = row[1].trim().to_string();
        let price: f64 = row[2].trim().parse().map_err(user)?;
        let reputation: f64 = row[3].trim().parse().map_err(user)?;
        let chosen = match row[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::User(format!(
                    "chosen must be 0 or 1, got {other}"
                )))
            }
        };
        if groups.last().map(|(l, _, _)| l.as_str()) != Some(label.as_str()) {
            groups.push((label, Vec::new(), Vec::new()));
        }
        let (_, listings, chosen_ids) = groups.last_mut().unwrap();
        if chosen {
            chosen_ids.push(id.clone());
        }
        listings.push(RawListing::new(id, price, reputation));
    }

    let mut records = Vec::new();
    for (label, listings, chosen_ids) in groups {
        if chosen_ids.is_empty() {
            return Err(CliError::User(format!(
                "market {label} has no chosen row"
            )));
        }
        let mut market = normalize_market(&listings, config).map_err(user)?;
        market.label = Some(label);
        for chosen_id in chosen_ids {
            records.push(PurchaseRecord {
                market: market.clone(),
                chosen_id,
                user_id: None,
            });
        }
    }
    if records.is_empty() {
        return Err(CliError::User("EmptyHistory: no purchase records".into()));
    }
    Ok(records)
}

fn load_market(path: &Path, config: &NormalizationConfig) -> Result<MarketSnapshot, CliError> {
    let listings = read_listings_csv(path)?;
    normalize_market(&listings, config).map_err(user)
}

/// `frontier` subcommand: emit `id,ln_p,ln_r,role` rows in market order.
pub fn cmd_frontier(market_csv: &Path, config: &NormalizationConfig) -> Result<String, CliError> {
    let market = load_market(market_csv, config)?;
    let frontier = upper_frontier_chain(&market).map_err(user)?;
    let classification = classify(&market, &frontier)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = String::from("id,ln_p,ln_r,role\n");
    for (item, (id, role)) in market.items.iter().zip(&classification.roles) {
        debug_assert_eq!(&item.id, id);
        let role = match role {
            Role::Vertex(_) => "vertex",
            Role::Interior => "interior",
            Role::DominatedDuplicate => "dominated",
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            item.id,
            fmt_sig(item.ln_p),
            fmt_sig(item.ln_r),
            role
        ));
    }
    Ok(out)
}

/// `shares` subcommand: emit `id,alpha_lo,alpha_hi,share` per frontier vertex.
pub fn cmd_shares(
    market_csv: &Path,
    cdf: &PreferenceCdf,
    config: &NormalizationConfig,
) -> Result<String, CliError> {
    let market = load_market(market_csv, config)?;
    let frontier = upper_frontier_chain(&market).map_err(user)?;
    let table = market_shares(&frontier, cdf).map_err(user)?;
    if (table.total() - 1.0).abs() > 1e-9 {
        return Err(CliError::Internal(format!(
            "shares sum to {}, expected 1",
            table.total()
        )));
    }
    let mut out = String::from("id,alpha_lo,alpha_hi,share\n");
    for e in &table.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.id,
            fmt_sig(e.interval.lo),
            fmt_sig(e.interval.hi),
            fmt_sig(e.share)
        ));
    }
    Ok(out)
}

/// `estimate` subcommand: returns (cdf JSON, diagnostics line).
pub fn cmd_estimate(
    history_csv: &Path,
    config: &NormalizationConfig,
) -> Result<(String, String), CliError> {
    let records = read_history_csv(history_csv, config)?;
    let estimate = estimate_mixture(&records).map_err(user)?;
    let json = serde_json::to_string_pretty(&estimate.cdf).map_err(|e| CliError::Internal(e.to_string()))?;
    let diagnostics = format!(
        "records used: {}, excluded (interior choice): {}",
        estimate.records_used, estimate.records_excluded
    );
    Ok((json, diagnostics))
}

/// Normalize a pricing problem from raw inputs. Prices normalize over the
/// competitors only (the focal price is the free variable in normalized
/// space); reputations normalize over competitors plus the focal seller.
fn build_problem(
    listings: &[RawListing],
    config: &NormalizationConfig,
    rep_raw: f64,
    ceiling: f64,
    cdf: PreferenceCdf,
) -> Result<PricingProblem, CliError> {
    if listings.is_empty() {
        return PricingProblem::new(None, 1.0, ceiling, cdf).map_err(user);
    }
    // run the standard routine once for its input validation
    normalize_market(listings, config).map_err(user)?;

    let pool_max = listings.iter().map(|l| l.reputation).fold(rep_raw, f64::max);
    let pool_min = listings.iter().map(|l| l.reputation).fold(rep_raw, f64::min);
    let norm_rep = |rep: f64| match config.reputation_rule {
        ReputationRule::MaxRatio => rep / pool_max,
        ReputationRule::MinmaxWithFloor => {
            if pool_max == pool_min {
                1.0
            } else {
                config.epsilon + (1.0 - config.epsilon) * (rep - pool_min) / (pool_max - pool_min)
            }
        }
    };
    let min_price = listings.iter().map(|l| l.price).fold(f64::INFINITY, f64::min);
    let max_price = listings.iter().map(|l| l.price).fold(0.0_f64, f64::max);
    let items = listings
        .iter()
        .map(|l| {
            let p = match config.price_rule {
                PriceRule::ReciprocalMin => min_price / l.price,
                PriceRule::InverseMinmax => (min_price + max_price - l.price) / max_price,
            };
            crate::market::NormalizedItem::new(l.id.clone(), p, norm_rep(l.reputation))
        })
        .collect();
    let market = MarketSnapshot::new(items, None).map_err(user)?;
    PricingProblem::new(Some(market), norm_rep(rep_raw), ceiling, cdf).map_err(user)
}

pub struct PriceArgs {
    pub rep_raw: f64,
    pub ceiling: f64,
    pub cdf: PreferenceCdf,
    pub p_min: Option<f64>,
    pub curve_samples: usize,
}

pub struct PriceOutput {
    pub json: String,
    pub curve: Vec<CurvePoint>,
    pub breakpoints: Vec<f64>,
}

/// `price` subcommand. The focal reputation is normalized against the pool
/// of competitor reputations plus the focal seller's own; the raw-price
/// equivalent assumes the focal seller is not the price-normalization anchor.
pub fn cmd_price(
    competitors_csv: Option<&Path>,
    config: &NormalizationConfig,
    args: &PriceArgs,
) -> Result<PriceOutput, CliError> {
    if !(args.rep_raw > 0.0) {
        return Err(CliError::User(format!(
            "reputation must be positive, got {}",
            args.rep_raw
        )));
    }
    let listings = match competitors_csv {
        Some(path) => read_listings_csv(path)?,
        None => Vec::new(),
    };
    let problem = build_problem(&listings, config, args.rep_raw, args.ceiling, args.cdf.clone())?;
    let mut problem = problem;
    if let Some(p_min) = args.p_min {
        problem = problem.with_p_min(p_min).map_err(user)?;
    }
    let solution = optimize_price(&problem).map_err(|e| CliError::Internal(e.to_string()))?;

    let raw_price_equivalent = if listings.is_empty() {
        None
    } else {
        let min_price = listings.iter().map(|l| l.price).fold(f64::INFINITY, f64::min);
        let max_price = listings.iter().map(|l| l.price).fold(0.0_f64, f64::max);
        Some(match config.price_rule {
            PriceRule::ReciprocalMin => min_price / solution.p_star,
            PriceRule::InverseMinmax => min_price + max_price - solution.p_star * max_price,
        })
    };

    let json = serde_json::to_string_pretty(&serde_json::json!({
        "p_star": solution.p_star,
        "raw_price_equivalent": raw_price_equivalent,
        "profit": solution.profit,
        "share": solution.share,
        "interval": solution.interval_index,
    }))
    .map_err(|e| CliError::Internal(e.to_string()))?;

    let decomp = problem.decomposition();
    let breakpoints = decomp
        .intervals
        .iter()
        .skip(1)
        .map(|iv| iv.p_lo)
        .collect();
    let curve = profit_curve(&problem, args.curve_samples);
    Ok(PriceOutput {
        json,
        curve,
        breakpoints,
    })
}

pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from("p,share,profit\n");
    for pt in curve {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(pt.p),
            fmt_sig(pt.share),
            fmt_sig(pt.profit)
        ));
    }
    out
}

/// Static profit-vs-price line chart with vertical rules at breakpoints.
pub fn render_profit_svg(curve: &[CurvePoint], breakpoints: &[f64]) -> String {
    let (w, h) = (640.0, 400.0);
    let margin = 48.0;
    let plot_w = w - 2.0 * margin;
    let plot_h = h - 2.0 * margin;
    let max_profit = curve.iter().map(|c| c.profit).fold(0.0_f64, f64::max).max(1e-12);
    let x = |p: f64| margin + p * plot_w;
    let y = |v: f64| h - margin - (v / max_profit) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = h - margin,
        r = w - margin
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        t = margin,
        b = h - margin
    ));
    for bp in breakpoints {
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{t}\" x2=\"{x}\" y2=\"{b}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
            x = x(*bp),
            t = margin,
            b = h - margin
        ));
    }
    let points: Vec<String> = curve
        .iter()
        .map(|c| format!("{:.2},{:.2}", x(c.p), y(c.profit)))
        .collect();
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        points.join(" ")
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">p</text>\n",
        w - margin + 8.0,
        h - margin + 4.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">profit</text>\n",
        margin - 40.0,
        margin - 8.0
    ));
    svg.push_str("</svg>\n");
    svg
}

pub struct ValidateArgs {
    pub rep_raw: Option<f64>,
    pub ceiling: Option<f64>,
    pub cdf: PreferenceCdf,
}

/// `validate` subcommand: oracle-vs-analytic report. Returns the report and
/// whether every check passed.
pub fn cmd_validate(
    market_csv: &Path,
    config: &NormalizationConfig,
    args: &ValidateArgs,
) -> Result<(String, bool), CliError> {
    let market = load_market(market_csv, config)?;
    let cfg = SweepConfig::default();
    let mut report = String::new();
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        all_ok &= ok;
        report.push_str(&format!(
            "{} {name}: {detail}\n",
            if ok { "PASS" } else { "FAIL" }
        ));
    };

    let frontier = upper_frontier_chain(&market).map_err(user)?;
    let scan = upper_frontier_scan(&market).map_err(user)?;
    check(
        "scan/chain equivalence",
        scan == frontier,
        format!("{} vertices", frontier.len()),
    );

    let brute: Vec<String> = frontier_bruteforce(&market, &cfg).into_iter().collect();
    let analytic: std::collections::BTreeSet<&str> =
        frontier.vertices.iter().map(|v| v.id.as_str()).collect();
    let subset = brute.iter().all(|id| analytic.contains(id.as_str()));
    check(
        "brute-force frontier",
        subset,
        format!("{} of {} vertices reached by sweep", brute.len(), analytic.len()),
    );

    let table = market_shares(&frontier, &args.cdf).map_err(user)?;
    let swept = sweep_shares(&market, &args.cdf, &cfg);
    let mut max_err = 0.0_f64;
    for (id, s) in &swept {
        let analytic_share = table.share_of(id).unwrap_or(0.0);
        max_err = max_err.max((analytic_share - s).abs());
    }
    check(
        "share sweep",
        max_err < 2e-4,
        format!("max |analytic - sweep| = {}", fmt_sig(max_err)),
    );
    check(
        "telescoping",
        (table.total() - 1.0).abs() < 1e-12,
        format!("sum = {}", fmt_sig(table.total())),
    );

    if let (Some(rep), Some(ceiling)) = (args.rep_raw, args.ceiling) {
        let listings = read_listings_csv(market_csv)?;
        let problem = build_problem(&listings, config, rep, ceiling, args.cdf.clone())?;
        let sol = optimize_price(&problem).map_err(|e| CliError::Internal(e.to_string()))?;
        let (_, oracle_profit) = price_grid_oracle(&problem, 100_001);
        check(
            "pricing optimizer",
            sol.profit >= oracle_profit - 1e-6 * ceiling,
            format!(
                "optimizer {} vs oracle {}",
                fmt_sig(sol.profit),
                fmt_sig(oracle_profit)
            ),
        );
    }

    Ok((report, all_ok))
}
