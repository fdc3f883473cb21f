use std::io::Write;
use std::path::Path;

use selgps::sim::{write_epochs_csv, RunSummary};
use selgps::{run_scenario, EnergyModelParams, Error, PolicyKind, Scenario, TrackingPolicy};

use crate::args::{Format, PolicyArgs, RunArgs};
use crate::output::{read_text, write_atomic};
use crate::CliError;

/// Reads and validates a scenario file, then applies command-line overrides.
pub fn load_scenario(path: &Path, seed: Option<u64>, rate: Option<f64>) -> Result<Scenario, CliError> {
    let text = read_text(path)?;
    let mut scenario = Scenario::from_toml_str(&text).map_err(|e| {
        let detail = match e {
            Error::Parse(m) => m,
            other => other.to_string(),
        };
        CliError::Parse(format!("{}: {detail}", path.display()))
    })?;
    if let Some(s) = seed {
        scenario.rng_seed = s;
    }
    if let Some(r) = rate {
        scenario.update_rate = r;
        scenario.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(scenario)
}

pub fn build_policy(kind: PolicyKind, a: &PolicyArgs) -> Result<TrackingPolicy, CliError> {
    let mut p = TrackingPolicy::new(kind);
    p.random_subset_size = a.subset_size;
    p.reselection_period = a.period;
    p.selection.altitude_aided = a.aided;
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

pub fn load_profile(name: &str) -> Result<EnergyModelParams, CliError> {
    EnergyModelParams::resolve_profile(name).map_err(|e| CliError::Parse(format!("profile {name:?}: {e}")))
}

pub fn cmd_run(a: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(&a.scenario, a.seed, a.rate)?;
    let policy = build_policy(a.policy.into(), &a.policy_args)?;
    let params = load_profile(&a.profile)?;
    let report = run_scenario(&scenario, &policy, &params)?;
    let summary = RunSummary::from(&report).to_json()? + "\n";

    let mut csv = Vec::new();
    if a.format == Format::Csv {
        write_epochs_csv(&report, &mut csv)?;
    }
    match &a.out_dir {
        Some(dir) => {
            let stem = format!("run-{}-seed{}", report.policy, report.seed);
            if a.format == Format::Csv {
                write_atomic(&dir.join(format!("{stem}.csv")), &csv)?;
            }
            write_atomic(&dir.join(format!("{stem}.summary.json")), summary.as_bytes())?;
        }
        None if a.format == Format::Csv => stdout.write_all(&csv)?,
        None => stdout.write_all(summary.as_bytes())?,
    }
    Ok(())
}
