use serde::{Deserialize, Serialize};

use crate::energy::{accumulate_run_energy, total_power, EnergyModelParams, OperatingPoint, PowerBreakdown};
use crate::error::{Error, Result};
use crate::gdop::select_subset;
use crate::geo::{geometry_matrix, EcefVector, GeodeticPosition};
use crate::nav::{solution_error, solve_position, AltitudeAiding, NavSolution, SolverConfig};

use super::constellation::{propagate_constellation, visible_satellites};
use super::generate_measurements;
use super::noise::{NoiseStreams, Purpose};
use super::policy::{PolicyKind, TrackingPolicy};
use super::scenario::Scenario;

/// Slack when comparing elapsed time against the refresh period.
const PERIOD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub index: usize,
    pub time: f64,
    pub truth: GeodeticPosition,
    pub visible_count: usize,
    /// Satellite ids tracked this epoch, ascending.
    pub tracked_indices: Vec<usize>,
    /// Satellite count the power model was charged with.
    pub charged_satellites: u32,
    /// The tracked subset was (re)chosen this epoch.
    pub refreshed: bool,
    /// `|G − G_w| / G` of a selective refresh.
    pub selection_gap: Option<f64>,
    pub solution: Option<NavSolution>,
    pub error_3d: Option<f64>,
    pub power: PowerBreakdown,
    /// Extra power of a re-acquisition charged to this epoch, mW.
    pub reacquisition_mw: f64,
}

impl EpochRecord {
    pub fn has_fix(&self) -> bool {
        self.error_3d.is_some()
    }

    /// Steady-state model power plus any re-acquisition charge, mW.
    pub fn power_mw(&self) -> f64 {
        self.power.total + self.reacquisition_mw
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub policy: String,
    pub seed: u64,
    pub update_rate: f64,
    pub epochs: Vec<EpochRecord>,
    pub fix_count: usize,
    /// Mean 3-D error over epochs with a fix, meters.
    pub mean_error: f64,
    pub mean_power: f64,
    pub total_energy: f64,
    pub reacquisition_events: u32,
    pub refresh_count: usize,
}

impl RunReport {
    pub fn no_fix_count(&self) -> usize {
        self.epochs.len() - self.fix_count
    }

    pub fn mean_tracked(&self) -> f64 {
        self.epochs.iter().map(|e| e.tracked_indices.len() as f64).sum::<f64>() / self.epochs.len() as f64
    }

    pub fn mean_visible(&self) -> f64 {
        self.epochs.iter().map(|e| e.visible_count as f64).sum::<f64>() / self.epochs.len() as f64
    }
}

struct Refresh {
    tracked: Vec<usize>,
    gap: Option<f64>,
}

fn choose_subset(
    policy: &TrackingPolicy,
    visible: &[usize],
    positions: &[EcefVector],
    receiver: EcefVector,
    aided: bool,
    noise: &NoiseStreams,
    epoch: usize,
) -> Result<Refresh> {
    match policy.kind {
        PolicyKind::Full => Ok(Refresh {
            tracked: visible.to_vec(),
            gap: None,
        }),
        PolicyKind::Selective => {
            let mut config = policy.selection;
            config.altitude_aided = aided;
            if visible.len() < config.minimum_satellites() {
                return Ok(Refresh {
                    tracked: visible.to_vec(),
                    gap: None,
                });
            }
            let sats: Vec<EcefVector> = visible.iter().map(|&i| positions[i]).collect();
            let a = geometry_matrix(receiver, &sats)?;
            match select_subset(&a, &config) {
                Ok(sel) => Ok(Refresh {
                    tracked: sel.selected_indices.iter().map(|&k| visible[k]).collect(),
                    gap: Some(sel.relative_gap),
                }),
                // Degenerate full-sky geometry: nothing to gain from selecting.
                Err(Error::DegenerateGeometry { .. }) => Ok(Refresh {
                    tracked: visible.to_vec(),
                    gap: None,
                }),
                Err(e) => Err(e),
            }
        }
        PolicyKind::Random => {
            use rand::Rng;
            let mut pool = visible.to_vec();
            let take = policy.random_subset_size.min(pool.len());
            let mut rng = noise.stream(Purpose::RandomSelection, 0, epoch as u64);
            for i in 0..take {
                let j = rng.random_range(i..pool.len());
                pool.swap(i, j);
            }
            let mut tracked = pool[..take].to_vec();
            tracked.sort_unstable();
            Ok(Refresh { tracked, gap: None })
        }
    }
}

/// Runs one scenario under one tracking policy.
///
/// Selective and random policies pick their subset from a full-visibility
/// snapshot every `reselection_period` seconds; that epoch is charged at the
/// visible count. If tracked satellites set or drop out so that fewer than the
/// solvable minimum remain, the subset is refreshed immediately and one
/// re-acquisition is charged. Epochs without a converged fix are excluded
/// from the mean error.
pub fn run_scenario(scenario: &Scenario, policy: &TrackingPolicy, params: &EnergyModelParams) -> Result<RunReport> {
    scenario.validate()?;
    policy.validate()?;
    params.validate()?;

    let noise = NoiseStreams::new(scenario.rng_seed);
    let rate = scenario.update_rate;
    let dt = 1.0 / rate;
    let n_sats = scenario.constellation.satellite_count;
    let solver = SolverConfig::default();

    let mut up = vec![true; n_sats];
    let mut tracked: Vec<usize> = Vec::new();
    let mut last_refresh: Option<f64> = None;
    let mut last_fix: Option<NavSolution> = None;
    let mut last_charged: Option<u32> = None;
    let mut previously_solvable = false;
    let mut reacquisitions = 0u32;
    let mut refreshes = 0usize;
    let mut epochs = Vec::with_capacity(scenario.epoch_count());

    for k in 0..scenario.epoch_count() {
        let t = k as f64 * dt;
        let truth_geo = scenario.position_at(t);
        let truth = truth_geo.to_ecef();

        if let (Some(model), true) = (&scenario.outage_model, k > 0) {
            for (id, state) in up.iter_mut().enumerate() {
                let u = noise.uniform(Purpose::Outage, id as u64, k as u64);
                let p_switch = if *state {
                    dt / model.mean_up_s
                } else {
                    dt / model.mean_down_s
                };
                if u < p_switch {
                    *state = !*state;
                }
            }
        }

        let sats = propagate_constellation(&scenario.constellation, t);
        let positions: Vec<EcefVector> = sats.iter().map(|s| s.1).collect();
        let visible = visible_satellites(truth, &positions, scenario.elevation_mask, Some(&up));

        let aided = policy.altitude_aided() && last_fix.is_some();
        let min_fix = if aided { 3 } else { 4 };

        let mut refreshed = false;
        let mut gap = None;
        let mut reacquisition_mw = 0.0;
        if policy.kind == PolicyKind::Full {
            tracked = visible.clone();
        } else {
            tracked.retain(|id| visible.binary_search(id).is_ok());
            let due = last_refresh.is_none_or(|r| t - r >= policy.reselection_period - PERIOD_SLACK);
            let lost = !due && tracked.len() < min_fix;
            if lost && previously_solvable {
                reacquisitions += 1;
                reacquisition_mw = 1000.0 * params.acquisition_energy() * rate;
            }
            if due || lost {
                let r = choose_subset(policy, &visible, &positions, truth, aided, &noise, k)?;
                tracked = r.tracked;
                gap = r.gap;
                refreshed = true;
                refreshes += 1;
                last_refresh = Some(t);
            }
        }

        let enough_visible = visible.len() >= min_fix;
        let charged = if !enough_visible {
            last_charged.unwrap_or(visible.len().max(1) as u32)
        } else if refreshed {
            visible.len() as u32
        } else {
            tracked.len() as u32
        };
        if enough_visible {
            last_charged = Some(charged);
        }

        let mut solution = None;
        let mut error_3d = None;
        if tracked.len() >= min_fix {
            let chosen: Vec<(usize, EcefVector)> = tracked.iter().map(|&id| sats[id]).collect();
            let m = generate_measurements(
                truth,
                scenario.receiver_clock_bias,
                &chosen,
                scenario.pseudorange_noise_sigma,
                &noise,
                k as u64,
                t,
            )?;
            let (guess, bias) = last_fix.map_or((EcefVector::ZERO, 0.0), |s| (s.position, s.clock_bias));
            let aiding = if aided {
                let prior = crate::geo::ecef_to_geodetic(last_fix.expect("aided implies a prior fix").position)?;
                Some(AltitudeAiding::new(prior.height()))
            } else {
                None
            };
            match solve_position(&m, guess, bias, aiding, &solver) {
                Ok(s) if s.converged => {
                    error_3d = Some(solution_error(&s, truth));
                    solution = Some(s);
                    last_fix = Some(s);
                }
                Ok(_) | Err(Error::DegenerateGeometry { .. }) | Err(Error::DegenerateInput(_)) => {}
                Err(e) => return Err(e),
            }
        }
        previously_solvable = tracked.len() >= min_fix;

        let power = total_power(params, &OperatingPoint::new(charged, rate)?)?;
        epochs.push(EpochRecord {
            index: k,
            time: t,
            truth: truth_geo,
            visible_count: visible.len(),
            tracked_indices: tracked.clone(),
            charged_satellites: charged,
            refreshed,
            selection_gap: gap,
            solution,
            error_3d,
            power,
            reacquisition_mw,
        });
    }

    let errors: Vec<f64> = epochs.iter().filter_map(|e| e.error_3d).collect();
    if errors.is_empty() {
        return Err(Error::RunFailed(format!(
            "scenario {:?} under policy {} produced no fix",
            scenario.name,
            policy.label()
        )));
    }
    let charged: Vec<u32> = epochs.iter().map(|e| e.charged_satellites).collect();
    let energy = accumulate_run_energy(&charged, rate, params, reacquisitions)?;

    Ok(RunReport {
        scenario: scenario.name.clone(),
        policy: policy.label(),
        seed: scenario.rng_seed,
        update_rate: rate,
        fix_count: errors.len(),
        mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
        mean_power: energy.mean_mw,
        total_energy: energy.joules,
        reacquisition_events: reacquisitions,
        refresh_count: refreshes,
        epochs,
    })
}
