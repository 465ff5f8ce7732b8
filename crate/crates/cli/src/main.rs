//! `forecast`: backtest runner for the hybrid exchange-rate forecasters.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use hybrid_forecast::backtest::{run_backtest, RunConfig};
use hybrid_forecast::grey::{ChiSquareVariant, MidpointMode, PartitionScheme};
use hybrid_forecast::hybrid::EffectiveDegreeDirection;
use hybrid_forecast::ingest::{ingest_csv, to_csv};
use hybrid_forecast::kalman::TransitionMode;
use hybrid_forecast::report::{emit_report, parse_json_report, ReportFormat};
use hybrid_forecast::simulate::{
    simulate_arfima, simulate_dgm, simulate_fractal, ArfimaParams, DgmParams, FractalParams,
};
use hybrid_forecast::{ForecastError, Series};

/// Parses a kebab-case name into any of the library's option enums.
fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown value {s:?}"))
}

fn format_arg(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: ForecastError| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "forecast",
    version,
    about = "Hybrid ARFIMA / grey-Markov / fractal Kalman forecasting backtests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hold out the last h+1 points, fit every forecaster and score it.
    Run(RunArgs),
    /// Write a seeded synthetic series as `date,value` CSV.
    Simulate(SimulateArgs),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Two-column `date,value` CSV.
    #[arg(long, required_unless_present = "print_config")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    horizon: usize,
    #[arg(long, default_value_t = 3)]
    arfima_p: usize,
    #[arg(long, default_value_t = 0)]
    arfima_q: usize,
    /// Force the ARFIMA mean to zero instead of the sample mean.
    #[arg(long)]
    zero_mean: bool,
    /// Fit ARFIMA to first differences and integrate the forecasts.
    #[arg(long)]
    difference_first: bool,
    #[arg(long, default_value_t = 50)]
    arfima_burn_in: usize,
    #[arg(long, default_value_t = 200)]
    arfima_truncation: usize,
    #[arg(long, default_value_t = 4)]
    dgm_states: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// quantile | sigma
    #[arg(long, default_value = "quantile", value_parser = kebab::<PartitionScheme>)]
    partition: PartitionScheme,
    /// target | source
    #[arg(long, default_value = "target", value_parser = kebab::<MidpointMode>)]
    markov_midpoint: MidpointMode,
    /// absolute | likelihood-ratio
    #[arg(long, default_value = "absolute", value_parser = kebab::<ChiSquareVariant>)]
    chi_square: ChiSquareVariant,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 1e-4)]
    kalman_q: f64,
    #[arg(long, default_value_t = 1.0)]
    kalman_r: f64,
    #[arg(long, default_value_t = 1e-4)]
    kalman_p0: f64,
    /// derived | paper
    #[arg(long, default_value = "derived", value_parser = kebab::<TransitionMode>)]
    fractal_transition: TransitionMode,
    /// maximize | minimize
    #[arg(long, default_value = "maximize", value_parser = kebab::<EffectiveDegreeDirection>)]
    effective_degree_direction: EffectiveDegreeDirection,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// text | json | csv
    #[arg(long, default_value = "text", value_parser = format_arg)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            input: self.input.as_ref().map(|p| p.display().to_string()),
            horizon: self.horizon,
            arfima_p: self.arfima_p,
            arfima_q: self.arfima_q,
            zero_mean: self.zero_mean,
            difference_first: self.difference_first,
            arfima_burn_in: self.arfima_burn_in,
            arfima_truncation: self.arfima_truncation,
            dgm_states: self.dgm_states,
            alpha: self.alpha,
            partition: self.partition,
            markov_midpoint: self.markov_midpoint,
            chi_square: self.chi_square,
            rho: self.rho,
            kalman_q: self.kalman_q,
            kalman_r: self.kalman_r,
            kalman_p0: self.kalman_p0,
            fractal_transition: self.fractal_transition,
            effective_degree_direction: self.effective_degree_direction,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Kind {
    Arfima,
    Dgm,
    Fractal,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 120)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// ARFIMA memory parameter.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    d: f64,
    /// ARFIMA AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [0.5], allow_negative_numbers = true)]
    phi: Vec<f64>,
    #[arg(long, default_value_t = 8.0)]
    mean: f64,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Grey recursion coefficients b1,b2,b3,b4.
    #[arg(long, value_delimiter = ',', default_values_t = [1.02, 0.3, 0.1, 0.5], allow_negative_numbers = true)]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 4.0)]
    xi: f64,
    /// Relative noise on the grey series.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 1.5)]
    start_price: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    degree: f64,
    #[arg(long, default_value_t = 1e-3)]
    q_sd: f64,
    #[arg(long, default_value_t = 5e-3)]
    r_sd: f64,
    /// derived | paper
    #[arg(long, default_value = "derived", value_parser = kebab::<TransitionMode>)]
    fractal_transition: TransitionMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report written by `forecast run --format json`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "text", value_parser = format_arg)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), ForecastError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| ForecastError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn monthly_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| format!("{}-{:02}", 1971 + i / 12, i % 12 + 1))
        .collect()
}

fn run(args: &RunArgs) -> Result<(), ForecastError> {
    let config = args.config();
    if args.print_config {
        let json = serde_json::to_string_pretty(&config)
            .map_err(|e| ForecastError::Numerical(e.to_string()))?;
        return write_output(args.out.as_deref(), &(json + "\n"));
    }
    config.validate()?;
    let input = args.input.as_deref().expect("clap requires --input");
    let series = ingest_csv(input)?;
    log::info!("read {} points from {}", series.len(), input.display());
    let report = run_backtest(&series, &config)?;
    write_output(args.out.as_deref(), &emit_report(&report, args.format)?)
}

fn simulate(args: &SimulateArgs) -> Result<(), ForecastError> {
    let values = match args.kind {
        Kind::Arfima => simulate_arfima(
            &ArfimaParams {
                d: args.d,
                phi: args.phi.clone(),
                mean: args.mean,
                sigma: args.sigma,
            },
            args.n,
            args.seed,
        )?,
        Kind::Dgm => {
            let beta: [f64; 4] = args.beta.as_slice().try_into().map_err(|_| {
                ForecastError::InvalidParameter(format!(
                    "--beta needs 4 values, got {}",
                    args.beta.len()
                ))
            })?;
            simulate_dgm(
                &DgmParams {
                    beta,
                    xi: args.xi,
                    noise: args.noise,
                },
                args.n,
                args.seed,
            )?
        }
        Kind::Fractal => simulate_fractal(
            &FractalParams {
                start_price: args.start_price,
                degree: args.degree,
                q_sd: args.q_sd,
                r_sd: args.r_sd,
                transition: args.fractal_transition,
            },
            args.n,
            args.seed,
        )?,
    };
    let n = values.len();
    let series = Series::new((0..n as i64).collect(), values, Some(monthly_labels(n)))?;
    write_output(args.out.as_deref(), &to_csv(&series))
}

fn report(args: &ReportArgs) -> Result<(), ForecastError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| ForecastError::Io(format!("{}: {e}", args.input.display())))?;
    let parsed = parse_json_report(&text)?;
    write_output(args.out.as_deref(), &emit_report(&parsed, args.format)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FORECAST_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Simulate(args) => simulate(args),
        Command::Report(args) => report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
