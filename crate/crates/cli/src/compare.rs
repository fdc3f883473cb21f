use std::io::Write;

use rayon::prelude::*;
use selgps::sim::write_trajectory_csv;
use selgps::{energy_saving, run_scenario, EnergyModelParams, RunReport, Scenario, TrackingPolicy};
use serde::{Deserialize, Serialize};

use crate::args::{parse_seeds, CompareArgs, Format};
use crate::output::write_atomic;
use crate::run::{build_policy, load_profile, load_scenario};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub seed: u64,
    pub mean_error: f64,
    pub mean_power: f64,
    pub total_energy: f64,
    pub reacquisition_events: u32,
}

/// Seed-averaged figures of one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub policy: String,
    pub mean_error: f64,
    pub mean_power: f64,
    pub total_energy: f64,
    pub saving_vs_full: f64,
    pub runs: Vec<SeedRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub scenario: String,
    pub seeds: Vec<u64>,
    pub policies: Vec<PolicyEntry>,
}

/// Every policy on every seed, run in parallel; entries keep the order of
/// `policies`. Savings are against full tracking on the same seeds, which is
/// run as an extra baseline when `policies` does not include it.
pub fn compare_policies(
    scenario: &Scenario,
    seeds: &[u64],
    policies: &[TrackingPolicy],
    params: &EnergyModelParams,
) -> Result<(CompareSummary, Vec<Vec<RunReport>>), CliError> {
    if seeds.is_empty() {
        return Err(CliError::Usage("at least one seed is required".into()));
    }
    let full = TrackingPolicy::full();
    let baseline = policies.iter().position(|p| *p == full);
    let mut all = policies.to_vec();
    if baseline.is_none() {
        all.push(full);
    }
    let jobs: Vec<(usize, u64)> = (0..all.len())
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let results: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(p, s)| run_scenario(&scenario.with_seed(s), &all[p], params))
        .collect::<selgps::Result<_>>()?;
    let mut grouped: Vec<Vec<RunReport>> = results.chunks(seeds.len()).map(<[RunReport]>::to_vec).collect();

    let n = seeds.len() as f64;
    let mean = |runs: &[RunReport], f: fn(&RunReport) -> f64| runs.iter().map(f).sum::<f64>() / n;
    let full_power = mean(&grouped[baseline.unwrap_or(all.len() - 1)], |r| r.mean_power);
    if baseline.is_none() {
        grouped.pop();
    }

    let entries = grouped
        .iter()
        .map(|runs| {
            let mean_power = mean(runs, |r| r.mean_power);
            Ok(PolicyEntry {
                policy: runs[0].policy.clone(),
                mean_error: mean(runs, |r| r.mean_error),
                mean_power,
                total_energy: mean(runs, |r| r.total_energy),
                saving_vs_full: energy_saving(full_power, mean_power)?,
                runs: runs
                    .iter()
                    .map(|r| SeedRow {
                        seed: r.seed,
                        mean_error: r.mean_error,
                        mean_power: r.mean_power,
                        total_energy: r.total_energy,
                        reacquisition_events: r.reacquisition_events,
                    })
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let summary = CompareSummary {
        scenario: scenario.name.clone(),
        seeds: seeds.to_vec(),
        policies: entries,
    };
    Ok((summary, grouped))
}

/// One row per (policy, seed) run, ready for plotting.
pub fn table_csv(summary: &CompareSummary) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Run(e.to_string());
    w.write_record([
        "policy",
        "seed",
        "mean_error_m",
        "mean_power_mw",
        "total_energy_j",
        "reacquisition_events",
    ])
    .map_err(err)?;
    for p in &summary.policies {
        for r in &p.runs {
            w.write_record([
                p.policy.clone(),
                r.seed.to_string(),
                r.mean_error.to_string(),
                r.mean_power.to_string(),
                r.total_energy.to_string(),
                r.reacquisition_events.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Run(e.to_string()))
}

pub fn cmd_compare(a: &CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.policies.len() < 2 {
        return Err(CliError::Usage("--policies needs at least two entries".into()));
    }
    let seeds = parse_seeds(&a.seeds).map_err(CliError::Usage)?;
    let scenario = load_scenario(&a.scenario, None, a.rate)?;
    let policies = a
        .policies
        .iter()
        .map(|&p| build_policy(p.into(), &a.policy_args))
        .collect::<Result<Vec<_>, _>>()?;
    let params = load_profile(&a.profile)?;
    let (summary, reports) = compare_policies(&scenario, &seeds, &policies, &params)?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Run(e.to_string()))? + "\n";

    let Some(dir) = &a.out_dir else {
        stdout.write_all(json.as_bytes())?;
        return Ok(());
    };
    write_atomic(&dir.join("compare.summary.json"), json.as_bytes())?;
    if a.format == Format::Csv {
        write_atomic(&dir.join("compare.table.csv"), &table_csv(&summary)?)?;
        // Trajectories of the first seed, one file per listed policy.
        for (i, runs) in reports.iter().enumerate() {
            let mut buf = Vec::new();
            write_trajectory_csv(&runs[0], &mut buf)?;
            let name = format!("trajectory-{i}-{}-seed{}.csv", runs[0].policy, runs[0].seed);
            write_atomic(&dir.join(name), &buf)?;
        }
    }
    Ok(())
}
