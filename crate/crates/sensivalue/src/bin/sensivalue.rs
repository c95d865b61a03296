//! Batch CLI over the sensivalue library: `analyze`, `simulate`, `density`.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sensivalue::report::{
    analyze_files, density_params_from_args, density_table, render_json, render_report_csv,
    simulate, thread_pool_from_env, AnalyzeOptions, DensityGrid, MethodSelection,
};

#[derive(Parser)]
#[command(name = "sensivalue", version, about = "Sensitivity analysis for missing outcomes on the E-value scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-event E-value intervals from unit-level and benchmark CSVs
    Analyze(AnalyzeArgs),
    /// Coverage/width study over synthetic data
    Simulate(SimulateArgs),
    /// Closed-form density table (v, pdf, cdf)
    Density(DensityArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Unit-level CSV: event_name,y,r,propensity
    unit_csv: PathBuf,
    /// Benchmark CSV: event_name,mu_source1,mu_source2
    benchmark_csv: PathBuf,
    /// Credible/confidence level
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    level: f64,
    /// Posterior draws for the Bayesian intervals
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(100..))]
    draws: u64,
    /// Master seed for posterior sampling
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Which intervals to report
    #[arg(long, default_value = "all", value_parser = parse_methods)]
    method: MethodSelection,
    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Significant digits for numeric fields
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML study configuration; omit for the built-in default study
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// Density family: normal, product or invgamma
    #[arg(long, value_parser = ["normal", "product", "invgamma"])]
    variant: String,
    /// Sensitivity-parameter mean
    #[arg(long)]
    eta: f64,
    /// Sensitivity-parameter standard deviation
    #[arg(long)]
    tau: f64,
    /// Observed fraction (normal variant)
    #[arg(long)]
    p_obs: Option<f64>,
    /// Mean missing fraction (product and invgamma variants)
    #[arg(long)]
    mu_q: Option<f64>,
    /// Missing-fraction standard deviation
    #[arg(long)]
    sigma_q: Option<f64>,
    /// Outcome standard deviation (normal and product variants)
    #[arg(long)]
    sd_y: Option<f64>,
    /// Inverse-gamma shape of the outcome deviation (invgamma variant)
    #[arg(long)]
    alpha: Option<f64>,
    /// Inverse-gamma rate of the outcome deviation (invgamma variant)
    #[arg(long)]
    beta: Option<f64>,
    /// Grid start
    #[arg(long, default_value_t = 1.01)]
    v_min: f64,
    /// Grid end
    #[arg(long, default_value_t = 10.0)]
    v_max: f64,
    /// Grid size
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    points: u64,
    /// Significant digits for numeric fields
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_level(raw: &str) -> Result<f64, String> {
    let level: f64 = raw.parse().map_err(|_| "level must be a number".to_string())?;
    if level > 0.0 && level < 1.0 {
        Ok(level)
    } else {
        Err("level must lie strictly between 0 and 1".to_string())
    }
}

fn parse_methods(raw: &str) -> Result<MethodSelection, String> {
    MethodSelection::parse(raw)
        .ok_or_else(|| "expected all, subjective, objective, taylor or poisson".to_string())
}

fn emit(text: &str, output: Option<&PathBuf>) -> sensivalue::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> sensivalue::Result<()> {
    let pool = thread_pool_from_env()?;
    let dispatch = || -> sensivalue::Result<()> {
        match cli.command {
            Command::Analyze(args) => {
                let options = AnalyzeOptions {
                    level: args.level,
                    draws: args.draws as usize,
                    seed: args.seed,
                    methods: args.method,
                    ..AnalyzeOptions::default()
                };
                let report = analyze_files(&args.unit_csv, &args.benchmark_csv, &options)?;
                for warning in &report.warnings {
                    eprintln!("warning: {warning}");
                }
                let text = match args.format.as_str() {
                    "csv" => render_report_csv(&report, args.digits),
                    _ => render_json(&report, args.digits)?,
                };
                emit(&text, args.output.as_ref())
            }
            Command::Simulate(args) => {
                let result = simulate(args.config.as_deref(), args.seed, args.trials)?;
                emit(&result.to_csv(), args.output.as_ref())
            }
            Command::Density(args) => {
                let params = density_params_from_args(
                    &args.variant,
                    args.eta,
                    args.tau,
                    args.p_obs,
                    args.mu_q,
                    args.sigma_q,
                    args.sd_y,
                    args.alpha,
                    args.beta,
                )?;
                let grid = DensityGrid {
                    v_min: args.v_min,
                    v_max: args.v_max,
                    points: args.points as usize,
                };
                let table = density_table(&params, &grid, args.digits)?;
                emit(&table, args.output.as_ref())
            }
        }
    };
    match pool {
        Some(pool) => pool.install(dispatch),
        None => dispatch(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
