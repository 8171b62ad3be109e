//! Command-line driver for the analysis pipeline.
//!
//! Each subcommand resolves a [`RunConfig`] the same way: built-in defaults,
//! then an optional `--config` file, then any per-field override flags, in
//! that order. Written file paths are printed to stdout, one per line;
//! errors go to stderr and map onto stable exit codes (see [`exit_code`]).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use solwave::pipeline::{self, RunConfig};
use solwave::Error;

#[derive(Parser)]
#[command(
    name = "solwave",
    version,
    about = "Wavelet coherence and causality analysis of solar and temperature records"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate the five input records; write normalized CSV
    /// copies and a summary.
    Ingest(CommonArgs),
    /// Wavelet power with a red-noise significance mask for each record.
    Power(CommonArgs),
    /// Squared wavelet coherence of the sunspot record against each
    /// temperature record, with phase arrows and significance.
    Coherence {
        #[command(flatten)]
        common: CommonArgs,
        /// Resample annually and replace each temperature by its
        /// cointegration residual against emissions.
        #[arg(long)]
        corrected: bool,
    },
    /// Stationarity, cointegration and causality tables (text and JSON).
    Granger(CommonArgs),
    /// Run every stage into one output directory and write a manifest.
    Reproduce(CommonArgs),
    /// Print the resolved configuration and its digest without running.
    Config(CommonArgs),
}

/// Configuration sources shared by all subcommands. Every flag overrides
/// the matching configuration key; values use the same text forms as the
/// configuration file.
#[derive(Args)]
struct CommonArgs {
    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Sunspot record path.
    #[arg(long, value_name = "PATH")]
    sunspots: Option<String>,
    /// Sunspot record layout: generic, sidc, giss or cdiac.
    #[arg(long, value_name = "NAME")]
    sunspots_format: Option<String>,
    /// Northern-hemisphere temperature path.
    #[arg(long, value_name = "PATH")]
    temp_north: Option<String>,
    /// Northern-hemisphere temperature layout.
    #[arg(long, value_name = "NAME")]
    temp_north_format: Option<String>,
    /// Southern-hemisphere temperature path.
    #[arg(long, value_name = "PATH")]
    temp_south: Option<String>,
    /// Southern-hemisphere temperature layout.
    #[arg(long, value_name = "NAME")]
    temp_south_format: Option<String>,
    /// Global temperature path.
    #[arg(long, value_name = "PATH")]
    temp_global: Option<String>,
    /// Global temperature layout.
    #[arg(long, value_name = "NAME")]
    temp_global_format: Option<String>,
    /// Annual emissions path.
    #[arg(long, value_name = "PATH")]
    co2: Option<String>,
    /// Annual emissions layout.
    #[arg(long, value_name = "NAME")]
    co2_format: Option<String>,

    /// Smallest wavelet scale as a multiple of the sampling step.
    #[arg(long, value_name = "X")]
    s0_steps: Option<String>,
    /// Scale grid resolution in octave fractions.
    #[arg(long, value_name = "X")]
    dj: Option<String>,
    /// Largest Fourier period on monthly grids, months.
    #[arg(long, value_name = "MONTHS")]
    max_period_months: Option<String>,
    /// Largest Fourier period on annual grids, years.
    #[arg(long, value_name = "YEARS")]
    max_period_years: Option<String>,
    /// Morlet center frequency (>= 5).
    #[arg(long, value_name = "X")]
    omega0: Option<String>,
    /// Time-smoothing width as a multiple of scale.
    #[arg(long, value_name = "X")]
    time_sigma: Option<String>,
    /// Scale-smoothing width in octaves.
    #[arg(long, value_name = "X")]
    scale_octaves: Option<String>,
    /// Monte Carlo significance level, e.g. 0.05.
    #[arg(long, value_name = "P")]
    level: Option<String>,
    /// Surrogate count for significance masks.
    #[arg(long, value_name = "N")]
    surrogates: Option<String>,
    /// Base random seed; stages derive independent streams from it.
    #[arg(long, value_name = "N")]
    seed: Option<String>,
    /// Squared-coherence threshold below which phase arrows are hidden.
    #[arg(long, value_name = "X")]
    arrow_threshold: Option<String>,
    /// Arrow decimation along the time axis, years.
    #[arg(long, value_name = "YEARS")]
    arrow_step_years: Option<String>,
    /// Lag-order search bound for time-domain causality.
    #[arg(long, value_name = "N")]
    granger_max_lag: Option<String>,
    /// Autoregressive order of the frequency-domain system.
    #[arg(long, value_name = "N")]
    spectral_lag: Option<String>,
    /// Boundary between the short and long period bands, years.
    #[arg(long, value_name = "YEARS")]
    band_split_years: Option<String>,
    /// Longest period included in the long band, years.
    #[arg(long, value_name = "YEARS")]
    band_max_years: Option<String>,
    /// Bootstrap replications for frequency-band critical values.
    #[arg(long, value_name = "N")]
    bootstrap: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    outdir: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),* $(,)?) => {
                $(
                    if let Some(value) = &self.$field {
                        cfg.set(stringify!($field), value)?;
                    }
                )*
            };
        }
        apply!(
            sunspots,
            sunspots_format,
            temp_north,
            temp_north_format,
            temp_south,
            temp_south_format,
            temp_global,
            temp_global_format,
            co2,
            co2_format,
            s0_steps,
            dj,
            max_period_months,
            max_period_years,
            omega0,
            time_sigma,
            scale_octaves,
            level,
            surrogates,
            seed,
            arrow_threshold,
            arrow_step_years,
            granger_max_lag,
            spectral_lag,
            band_split_years,
            band_max_years,
            bootstrap,
            outdir,
        );
        Ok(cfg)
    }
}

/// Stable exit codes by error category, for scripting:
/// 2 bad parameter, 3 malformed input file, 4 series incompatibility,
/// 5 internal shape mismatch, 6 degenerate or too-short sample,
/// 7 numerical conditioning failure, 8 i/o failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParam(_) => 2,
        Error::Parse { .. } | Error::Value { .. } => 3,
        Error::Gap { .. } | Error::StepMismatch(_) | Error::EmptyOverlap(_) => 4,
        Error::Dimension(_) => 5,
        Error::Degenerate(_) | Error::SampleSize(_) => 6,
        Error::Conditioning(_) => 7,
        Error::Io { .. } => 8,
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    match cli.command {
        Command::Ingest(args) => pipeline::cmd_ingest(&args.resolve()?),
        Command::Power(args) => pipeline::cmd_power(&args.resolve()?),
        Command::Coherence { common, corrected } => {
            let mut cfg = common.resolve()?;
            if corrected {
                cfg.corrected = true;
            }
            pipeline::cmd_coherence(&cfg)
        }
        Command::Granger(args) => pipeline::cmd_granger(&args.resolve()?),
        Command::Reproduce(args) => pipeline::cmd_reproduce(&args.resolve()?),
        Command::Config(args) => {
            let cfg = args.resolve()?;
            print!("{}", cfg.to_text());
            println!("# digest {}", cfg.digest());
            Ok(Vec::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
