//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::clustering::{mean_shift, MeanShiftConfig};
use crate::coverage::coverage_report;
use crate::error::{Error, Result};
use crate::io::{self, load_houses};
use crate::pipeline::{self, DEFAULT_BANDWIDTHS};
use crate::routing::{aco_solve, brute_force_tsp, AcoParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "stopplan",
    version,
    about = "Place bus stops by mean shift and route them by ant colony"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster houses into stops and report coverage at one bandwidth.
    Cluster {
        #[arg(long)]
        houses: PathBuf,
        /// Bandwidth / service radius in meters.
        #[arg(long, default_value_t = 500.0)]
        bandwidth: f64,
        #[command(flatten)]
        out: Outputs,
        /// Write the stops as `lat,lon` CSV.
        #[arg(long)]
        stops_out: Option<PathBuf>,
    },
    /// Cluster and score a list of bandwidths; pick the lowest error share.
    Sweep {
        #[arg(long)]
        houses: PathBuf,
        /// Comma-separated radii in meters.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BANDWIDTHS)]
        bandwidths: Vec<f64>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Find a short closed tour over the given stops with the ant colony.
    Route {
        #[arg(long)]
        stops: PathBuf,
        #[command(flatten)]
        aco: AcoArgs,
        /// Write the route GeoJSON here instead of stdout.
        #[arg(long)]
        geojson: Option<PathBuf>,
    },
    /// Sweep, choose a bandwidth, then route the chosen stops.
    Plan {
        #[arg(long)]
        houses: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BANDWIDTHS)]
        bandwidths: Vec<f64>,
        #[command(flatten)]
        aco: AcoArgs,
        /// Existing stops (CSV or GeoJSON) copied into the GeoJSON output.
        #[arg(long)]
        existing_stops: Option<PathBuf>,
        #[command(flatten)]
        out: Outputs,
    },
    /// Exact shortest tour by enumeration (at most 11 stops).
    Oracle {
        #[arg(long)]
        stops: PathBuf,
        #[arg(long)]
        geojson: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Outputs {
    /// Write the table CSV here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    geojson: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AcoArgs {
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.15)]
    rho: f64,
    #[arg(long, default_value_t = 30)]
    ants: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long)]
    seed: u64,
}

impl From<&AcoArgs> for AcoParams {
    fn from(a: &AcoArgs) -> Self {
        AcoParams {
            alpha: a.alpha,
            beta: a.beta,
            rho: a.rho,
            n_ants: a.ants,
            n_iterations: a.iters,
            seed: a.seed,
            ..AcoParams::default()
        }
    }
}

/// Writes to `path` when given, otherwise to `stdout`.
fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Cluster {
            houses,
            bandwidth,
            out,
            stops_out,
        } => {
            let data = load_houses(&houses)?;
            let clusters = mean_shift(&data.houses, &MeanShiftConfig::new(bandwidth))?;
            let row = coverage_report(&data.houses, &clusters.centers, bandwidth)?;
            if let Some(p) = &stops_out {
                io::write_atomic(p, io::points_csv(&clusters.centers).as_bytes())?;
            }
            if let Some(p) = &out.geojson {
                io::write_atomic(
                    p,
                    io::stops_geojson(&clusters.centers, &data.existing_stops).as_bytes(),
                )?;
            }
            emit(out.report.as_deref(), &io::table_csv([&row]), stdout)
        }
        Command::Sweep {
            houses,
            bandwidths,
            report,
        } => {
            let data = load_houses(&houses)?;
            let sweep =
                pipeline::bandwidth_sweep(&data.houses, &bandwidths, &MeanShiftConfig::new(1.0))?;
            writeln!(stderr, "chosen bandwidth: {} m", sweep.chosen_bandwidth)?;
            emit(report.as_deref(), &io::sweep_csv(&sweep), stdout)
        }
        Command::Route {
            stops,
            aco,
            geojson,
        } => {
            let data = load_houses(&stops)?;
            let outcome = aco_solve(&data.houses, &AcoParams::from(&aco))?;
            writeln!(stderr, "tour length: {:.2} m", outcome.best.length)?;
            let text = io::route_geojson(&data.houses, &outcome.best, &data.existing_stops);
            emit(geojson.as_deref(), &text, stdout)
        }
        Command::Plan {
            houses,
            bandwidths,
            aco,
            existing_stops,
            out,
        } => {
            let data = load_houses(&houses)?;
            let mut existing = data.existing_stops;
            if let Some(p) = &existing_stops {
                existing.extend(load_houses(p)?.houses);
            }
            let params = AcoParams::from(&aco);
            let result = pipeline::plan(
                &data.houses,
                &bandwidths,
                &MeanShiftConfig::new(1.0),
                &params,
                existing,
            )?;
            writeln!(
                stderr,
                "chosen bandwidth: {} m, {} stops, tour length: {:.2} m",
                result.sweep.chosen_bandwidth,
                result.stops().len(),
                result.tour.length
            )?;
            if let Some(p) = &out.geojson {
                io::export_geojson(&result, p)?;
            }
            emit(out.report.as_deref(), &io::sweep_csv(&result.sweep), stdout)
        }
        Command::Oracle { stops, geojson } => {
            let data = load_houses(&stops)?;
            let tour = brute_force_tsp(&data.houses)?;
            writeln!(stderr, "tour length: {:.2} m", tour.length)?;
            let text = io::route_geojson(&data.houses, &tour, &data.existing_stops);
            emit(geojson.as_deref(), &text, stdout)
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            // one line: everything clap prints before the usage block
            let rendered = e.to_string();
            let message: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
                .collect();
            let _ = writeln!(stderr, "stopplan: {}", message.join(" "));
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "stopplan: error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

pub fn cli_main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
