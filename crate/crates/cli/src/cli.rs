use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Treasury leverage analytics: liquidity thresholds, leverage and
/// insolvency-risk scenarios for productive combinations.
#[derive(Debug, Parser)]
#[command(name = "treslev", version)]
pub struct Cli {
    /// Project definitions (JSON).
    #[arg(long, global = true, env = "TRESLEV_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Half-width of the window excluded around critical points in curve
    /// grids, as a fraction of the critical value.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub gap: f64,

    /// Points per curve.
    #[arg(long, global = true, default_value_t = 256)]
    pub samples: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flows, liquidity break indicators (seuils, marges critiques) and
    /// treasury leverage of one project.
    Analyze { project: String },
    /// Side-by-side performance of projects (all projects when none given).
    Compare { projects: Vec<String> },
    /// Change of cost structure at fixed capacity.
    Transform(TransformArgs),
    /// Capacity expansion.
    Expand(ExpandArgs),
    /// Sampled curve grid, written as CSV or JSON.
    Curves(CurvesArgs),
    /// Fit the cost behaviour line v = a·f + b.
    FitCosts(FitArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub project: String,
    /// Change of cash fixed costs (coûts fixes décaissables).
    #[arg(long, allow_hyphen_values = true)]
    pub delta_fixed_cash: Option<f64>,
    /// Change of non-cash fixed charges (charges calculées).
    #[arg(long, allow_hyphen_values = true)]
    pub delta_fixed_noncash: Option<f64>,
    /// Proposed unit variable cost.
    #[arg(long, conflicts_with = "solve_v")]
    pub new_v: Option<f64>,
    /// Solve for the highest unit variable cost keeping both thresholds.
    #[arg(long)]
    pub solve_v: bool,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    pub project: String,
    /// Decimals of the former leverages used as rounded price targets.
    #[arg(long, default_value_t = 3)]
    pub target_decimals: u32,
    /// Price keeping the term leverage.
    #[arg(long)]
    pub solve_price_term: bool,
    /// Lowest price keeping the immediate leverage.
    #[arg(long)]
    pub solve_price_immediate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKindArg {
    ElasticityQ,
    ElasticityM,
    Indifference,
    CostBehavior,
    RelativeElasticity,
    AbsoluteLines,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    pub project: String,
    #[arg(long, value_enum)]
    pub kind: CurveKindArg,
    /// Output file; `.json` writes JSON, anything else CSV. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fixed-cost levels of the indifference contours.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
    #[arg(long)]
    pub q_min: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub m_min: Option<f64>,
    #[arg(long)]
    pub m_max: Option<f64>,
    #[arg(long)]
    pub f_min: Option<f64>,
    #[arg(long)]
    pub f_max: Option<f64>,
    /// Slopes of the absolute elasticity lines.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub slopes: Vec<f64>,
    #[arg(long)]
    pub base_f: Option<f64>,
    #[arg(long)]
    pub base_v: Option<f64>,
    /// Relative fixed-cost moves Δf/f0 of the absolute elasticity lines.
    #[arg(long, allow_hyphen_values = true)]
    pub df_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub df_max: Option<f64>,
    /// Logarithmic spacing of the abscissas.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Two points `f:v,f:v`.
    #[arg(long, conflicts_with_all = ["point", "intercept"])]
    pub points: Option<String>,
    /// One point `f:v`, with `--intercept`.
    #[arg(long, requires = "intercept")]
    pub point: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub intercept: Option<f64>,
}
