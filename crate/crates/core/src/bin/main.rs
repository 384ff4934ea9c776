use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use frontier_pricing::cli::{
    cmd_estimate, cmd_frontier, cmd_price, cmd_shares, cmd_validate, curve_csv, load_cdf,
    load_norm_config, render_profit_svg, CliError, PriceArgs, ValidateArgs,
};

#[derive(Parser)]
#[command(
    name = "frontier-pricing",
    about = "Market shares from the convex frontier of price/reputation trade-offs, and optimal pricing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a market's items against its convex frontier
    Frontier {
        /// Market CSV with header id,price,reputation
        market: PathBuf,
        /// Normalization config JSON
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-vertex alpha intervals and market shares
    Shares {
        market: PathBuf,
        /// Preference CDF JSON (uniform on [0,1] when absent)
        #[arg(long)]
        cdf: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the preference CDF from a purchase history
    Estimate {
        /// History CSV with header market_label,id,price,reputation,chosen
        history: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Profit-maximizing price for a focal seller
    Price {
        /// Competitor CSV (focal seller excluded); omit for a monopoly
        competitors: Option<PathBuf>,
        /// Focal seller's raw reputation score
        #[arg(long)]
        rep: f64,
        /// Profit ceiling C in the objective (C - p) * share
        #[arg(long)]
        ceiling: f64,
        #[arg(long)]
        cdf: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Smallest admissible normalized price
        #[arg(long)]
        p_min: Option<f64>,
        /// Write a p,share,profit sample CSV here
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Write a profit-curve SVG here
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Samples for the curve outputs
        #[arg(long, default_value_t = 512)]
        curve_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check analytic results against the brute-force oracles
    Validate {
        market: PathBuf,
        #[arg(long)]
        rep: Option<f64>,
        #[arg(long)]
        ceiling: Option<f64>,
        #[arg(long)]
        cdf: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::User(e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Frontier { market, config, out } => {
            let cfg = load_norm_config(config.as_deref())?;
            let csv = cmd_frontier(&market, &cfg)?;
            emit(&csv, out.as_ref())?;
            Ok(0)
        }
        Command::Shares {
            market,
            cdf,
            config,
            out,
        } => {
            let cfg = load_norm_config(config.as_deref())?;
            let cdf = load_cdf(cdf.as_deref())?;
            let csv = cmd_shares(&market, &cdf, &cfg)?;
            emit(&csv, out.as_ref())?;
            Ok(0)
        }
        Command::Estimate {
            history,
            config,
            out,
        } => {
            let cfg = load_norm_config(config.as_deref())?;
            let (json, diagnostics) = cmd_estimate(&history, &cfg)?;
            eprintln!("{diagnostics}");
            emit(&json, out.as_ref())?;
            if out.is_none() {
                println!();
            }
            Ok(0)
        }
        Command::Price {
            competitors,
            rep,
            ceiling,
            cdf,
            config,
            p_min,
            curve,
            svg,
            curve_samples,
            out,
        } => {
            let cfg = load_norm_config(config.as_deref())?;
            let args = PriceArgs {
                rep_raw: rep,
                ceiling,
                cdf: load_cdf(cdf.as_deref())?,
                p_min,
                curve_samples,
            };
            let result = cmd_price(competitors.as_deref(), &cfg, &args)?;
            emit(&result.json, out.as_ref())?;
            if out.is_none() {
                println!();
            }
            if let Some(path) = curve {
                fs::write(&path, curve_csv(&result.curve))
                    .map_err(|e| CliError::User(e.to_string()))?;
            }
            if let Some(path) = svg {
                fs::write(&path, render_profit_svg(&result.curve, &result.breakpoints))
                    .map_err(|e| CliError::User(e.to_string()))?;
            }
            Ok(0)
        }
        Command::Validate {
            market,
            rep,
            ceiling,
            cdf,
            config,
        } => {
            let cfg = load_norm_config(config.as_deref())?;
            let args = ValidateArgs {
                rep_raw: rep,
                ceiling,
                cdf: load_cdf(cdf.as_deref())?,
            };
            let (report, all_ok) = cmd_validate(&market, &cfg, &args)?;
            print!("{report}");
            Ok(if all_ok { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
