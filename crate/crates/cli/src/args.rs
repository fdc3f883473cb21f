use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use selgps::PolicyKind;

#[derive(Debug, Parser)]
#[command(
    name = "selgps",
    version,
    about = "Selective GPS satellite tracking simulator and receiver energy model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic drive scenario as TOML.
    Generate(GenerateArgs),
    /// Run one scenario under one tracking policy.
    Run(RunArgs),
    /// Run several policies over paired seeds and tabulate accuracy and energy.
    Compare(CompareArgs),
    /// Print the per-procedure power breakdown at one operating point.
    Energy(EnergyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Full,
    Selective,
    Random,
}

impl From<Policy> for PolicyKind {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Full => PolicyKind::Full,
            Policy::Selective => PolicyKind::Selective,
            Policy::Random => PolicyKind::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Per-epoch CSV plus the JSON summary.
    Csv,
    /// JSON summary only.
    Summary,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "default-drive")]
    pub name: String,
    /// Seconds.
    #[arg(long, default_value_t = 300.0)]
    pub duration: f64,
    #[arg(long = "speed", default_value_t = 60.0)]
    pub speed_kmh: f64,
    #[arg(long, default_value_t = 24)]
    pub satellites: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fixes per second.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Pseudorange noise sigma, meters.
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
    /// Elevation mask, degrees.
    #[arg(long, default_value_t = 10.0)]
    pub mask: f64,
    /// Start latitude, degrees.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub lat: f64,
    /// Start longitude, degrees.
    #[arg(long, default_value_t = 105.0, allow_negative_numbers = true)]
    pub lon: f64,
    /// Constellation epoch, seconds.
    #[arg(long, default_value_t = 4200.0)]
    pub epoch: f64,
    /// Mean satellite up-time for the outage model, seconds.
    #[arg(long, requires = "outage_down")]
    pub outage_up: Option<f64>,
    /// Mean satellite down-time for the outage model, seconds.
    #[arg(long, requires = "outage_up")]
    pub outage_down: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Subset size of the random policy.
    #[arg(long, default_value_t = 4)]
    pub subset_size: usize,
    /// Seconds between subset refreshes.
    #[arg(long, default_value_t = 60.0)]
    pub period: f64,
    /// Use the previous fix's height so three satellites suffice.
    #[arg(long)]
    pub aided: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Policy::Selective)]
    pub policy: Policy,
    #[command(flatten)]
    pub policy_args: PolicyArgs,
    /// Overrides the scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `namuru` or a TOML profile file.
    #[arg(long, default_value = "namuru")]
    pub profile: String,
    /// Overrides the scenario's update rate, Hz.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Write report files here instead of printing to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated policies, e.g. `full,selective,random`.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "full,selective,random")]
    pub policies: Vec<Policy>,
    #[command(flatten)]
    pub policy_args: PolicyArgs,
    /// Seeds as a list and/or ranges, e.g. `1-20` or `1,4,9-12`.
    #[arg(long, default_value = "1-20")]
    pub seeds: String,
    #[arg(long, default_value = "namuru")]
    pub profile: String,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// `csv` also writes the per-run table and trajectory files.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, default_value = "namuru")]
    pub profile: String,
    /// Tracked satellites.
    #[arg(short = 'n', long = "satellites", default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub satellites: u32,
    /// Fixes per second, 1 to 10.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Milliseconds of raw signal per fix.
    #[arg(long)]
    pub ms_per_fix: Option<f64>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Print the resolved profile as TOML and exit.
    #[arg(long)]
    pub dump_profile: bool,
}

/// Parses `1-3,7,10-11` into `[1, 2, 3, 7, 10, 11]`.
pub fn parse_seeds(list: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("bad seed list entry {part:?}");
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err("at least one seed is required".into());
    }
    Ok(seeds)
}
