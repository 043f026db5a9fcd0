//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage error,
//! 3 unknown hardware or region, 4 value out of range, 5 invalid dataset
//! or configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::PossibleValue;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{self, DataCatalog, GeoMap, Provider};
use crate::engine::{compare_regions, estimate_emissions, regional_stats, Metric, Workload};
use crate::error::{Error, Result};
use crate::report::{ComparisonReport, EstimateReport, HardwareReport, RegionsReport, Render, StatsReport};
use crate::service::{self, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;
pub const EXIT_RANGE: i32 = 4;
pub const EXIT_DATA: i32 = 5;

/// Environment variable naming a directory with `regions.csv`,
/// `hardware.csv` and `geo.csv`.
pub const DATA_DIR_ENV: &str = "MLCO2_DATA_DIR";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotFound { .. } => EXIT_NOT_FOUND,
        Error::Range { .. } | Error::EmptyComparison => EXIT_RANGE,
        Error::Ingest { .. }
        | Error::Header { .. }
        | Error::DuplicateKey { .. }
        | Error::EmptyCatalog(_)
        | Error::Config(_)
        | Error::Csv(_) => EXIT_DATA,
        Error::Io(_) => EXIT_FAILURE,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl ValueEnum for Provider {
    fn value_variants<'a>() -> &'a [Self] {
        &Provider::ALL
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(PossibleValue::new(self.as_str()))
    }
}

impl ValueEnum for Metric {
    fn value_variants<'a>() -> &'a [Self] {
        &[Metric::Gross, Metric::Net]
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(PossibleValue::new(self.as_str()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "mlco2", version, about = "Estimate CO2eq emissions of ML training runs")]
pub struct Cli {
    #[command(flatten)]
    data: DataArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Directory with regions.csv, hardware.csv and geo.csv; missing files fall back to the bundled data
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,

    #[arg(long, global = true)]
    regions_file: Option<PathBuf>,

    #[arg(long, global = true)]
    hardware_file: Option<PathBuf>,

    #[arg(long, global = true)]
    geo_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WorkloadArgs {
    /// Device name, matched case-insensitively (e.g. "Tesla V100")
    #[arg(long)]
    hardware: String,

    #[arg(long, default_value_t = 1)]
    count: u32,

    /// Wall-clock training hours
    #[arg(long, allow_negative_numbers = true)]
    hours: f64,

    /// Override the region's PUE
    #[arg(long, allow_negative_numbers = true)]
    pue: Option<f64>,

    /// Fraction of TDP drawn, in (0, 1]
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    utilization: f64,
}

impl WorkloadArgs {
    fn workload(&self) -> Workload {
        Workload {
            hardware_name: self.hardware.clone(),
            device_count: self.count,
            hours: self.hours,
            pue_override: self.pue,
            utilization: self.utilization,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate emissions of one training run
    Estimate {
        #[arg(long)]
        provider: Provider,
        #[arg(long)]
        region: String,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Rank regions for a workload, lowest emissions first
    Compare {
        #[command(flatten)]
        workload: WorkloadArgs,
        /// Restrict to one provider
        #[arg(long)]
        provider: Option<Provider>,
        /// Show only the first N rows
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        top: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        metric: Metric,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// List hardware profiles
    Hardware {
        /// Add GFLOPS/W columns
        #[arg(long)]
        efficiency: bool,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// List regions
    Regions {
        #[arg(long)]
        provider: Option<Provider>,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Carbon intensity statistics per geographic region
    Stats {
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Run the HTTP API
    Serve {
        #[arg(long, env = "MLCO2_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
        /// Directory with the built web UI
        #[arg(long, env = "MLCO2_STATIC_DIR")]
        static_dir: Option<PathBuf>,
        /// Allowed CORS origin (default: any)
        #[arg(long, env = "MLCO2_CORS_ORIGIN")]
        cors_origin: Option<String>,
    },
}

impl DataArgs {
    fn resolve(&self, explicit: &Option<PathBuf>, file: &str) -> Option<PathBuf> {
        explicit.clone().or_else(|| {
            self.data_dir
                .as_ref()
                .map(|d| d.join(file))
                .filter(|p| p.exists())
        })
    }

    fn catalog(&self) -> Result<DataCatalog> {
        let regions = self.resolve(&self.regions_file, "regions.csv");
        let hardware = self.resolve(&self.hardware_file, "hardware.csv");
        if regions.is_none() && hardware.is_none() {
            return DataCatalog::shipped();
        }
        let shipped = DataCatalog::shipped()?;
        let regions = match regions {
            Some(p) => dataset::load_regions(open(&p)?)?,
            None => shipped.regions().to_vec(),
        };
        let hardware = match hardware {
            Some(p) => dataset::load_hardware(open(&p)?)?,
            None => shipped.hardware().to_vec(),
        };
        dataset::validate_catalog(regions, hardware)
    }

    fn geo(&self) -> Result<GeoMap> {
        match self.resolve(&self.geo_file, "geo.csv") {
            Some(p) => dataset::load_geo(open(&p)?),
            None => GeoMap::shipped(),
        }
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn render<R: Render>(report: &R, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Text => report.text(),
        OutputFormat::Json => report.json(),
        OutputFormat::Csv => report.csv()?,
    })
}

fn execute(cli: Cli) -> Result<String> {
    let catalog = cli.data.catalog()?;
    match cli.command {
        Command::Estimate {
            provider,
            region,
            workload,
            format,
        } => {
            let request = workload.workload().at(provider, region);
            let est = estimate_emissions(&catalog, &request)?;
            render(&EstimateReport::new(&catalog, &est), format)
        }
        Command::Compare {
            workload,
            provider,
            top,
            metric,
            format,
        } => {
            let workload = workload.workload();
            let cmp = compare_regions(&catalog, &workload, provider, metric)?;
            let top = top.map(|n| usize::try_from(n).unwrap_or(usize::MAX));
            render(&ComparisonReport::new(&catalog, &workload, provider, &cmp, top), format)
        }
        Command::Hardware { efficiency, format } => render(&HardwareReport::new(&catalog, efficiency), format),
        Command::Regions { provider, format } => render(&RegionsReport::new(&catalog, provider), format),
        Command::Stats { format } => {
            let stats = regional_stats(&catalog, &cli.data.geo()?)?;
            render(&StatsReport::new(&catalog, &stats), format)
        }
        Command::Serve {
            bind,
            static_dir,
            cors_origin,
        } => {
            let geo = cli.data.geo()?;
            // fail at startup, not per request, on an incomplete geo map
            regional_stats(&catalog, &geo)?;
            let config = ServiceConfig {
                static_dir,
                cors_origin,
            };
            let app = service::router(catalog, geo, &config)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(&bind, app))?;
            Ok(String::new())
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes
/// results to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli) {
        Ok(text) => match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_FAILURE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
