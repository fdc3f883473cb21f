use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::ecef_to_geodetic;

use super::runner::RunReport;

/// Header of the per-epoch CSV written by [`write_epochs_csv`].
pub const CSV_COLUMNS: [&str; 30] = [
    "epoch",
    "time_s",
    "visible",
    "tracked",
    "charged_satellites",
    "tracked_ids",
    "refresh",
    "selection_gap",
    "fix",
    "truth_lat_deg",
    "truth_lon_deg",
    "truth_height_m",
    "lat_deg",
    "lon_deg",
    "height_m",
    "clock_bias_m",
    "error_m",
    "gdop",
    "iterations",
    "power_rf_mw",
    "power_acquisition_mw",
    "power_track_mw",
    "power_ephemeris_mw",
    "power_navigation_mw",
    "power_idle_mw",
    "power_total_mw",
    "reacquisition_mw",
    "power_mw",
    "residual_rms_m",
    "converged",
];

/// Header of the trajectory CSV written by [`write_trajectory_csv`].
pub const TRAJECTORY_COLUMNS: [&str; 4] = ["time_s", "lat_deg", "lon_deg", "error_m"];

fn csv_err(e: csv::Error) -> Error {
    Error::RunFailed(format!("csv: {e}"))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One row per epoch. Solution columns are empty on epochs without a fix.
pub fn write_epochs_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for e in &report.epochs {
        let geo = match &e.solution {
            Some(s) => Some(ecef_to_geodetic(s.position)?),
            None => None,
        };
        let ids: Vec<String> = e.tracked_indices.iter().map(usize::to_string).collect();
        let row = [
            e.index.to_string(),
            num(e.time),
            e.visible_count.to_string(),
            e.tracked_indices.len().to_string(),
            e.charged_satellites.to_string(),
            ids.join(";"),
            u8::from(e.refreshed).to_string(),
            opt(e.selection_gap),
            u8::from(e.has_fix()).to_string(),
            num(e.truth.latitude().to_degrees()),
            num(e.truth.longitude().to_degrees()),
            num(e.truth.height()),
            opt(geo.map(|g| g.latitude().to_degrees())),
            opt(geo.map(|g| g.longitude().to_degrees())),
            opt(geo.map(|g| g.height())),
            opt(e.solution.map(|s| s.clock_bias)),
            opt(e.error_3d),
            opt(e.solution.map(|s| s.gdop_at_solution)),
            e.solution.map(|s| s.iterations.to_string()).unwrap_or_default(),
            num(e.power.rf),
            num(e.power.acquisition),
            num(e.power.track),
            num(e.power.ephemeris),
            num(e.power.navigation),
            num(e.power.idle),
            num(e.power.total),
            num(e.reacquisition_mw),
            num(e.power_mw()),
            opt(e.solution.map(|s| s.residual_rms)),
            u8::from(e.solution.is_some_and(|s| s.converged)).to_string(),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::RunFailed(e.to_string()))
}

/// Estimated track, one row per epoch with a fix.
pub fn write_trajectory_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS).map_err(csv_err)?;
    for e in &report.epochs {
        if let (Some(s), Some(err)) = (&e.solution, e.error_3d) {
            let g = ecef_to_geodetic(s.position)?;
            w.write_record([
                num(e.time),
                num(g.latitude().to_degrees()),
                num(g.longitude().to_degrees()),
                num(err),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::RunFailed(e.to_string()))
}

/// Aggregate figures of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub policy: String,
    pub seed: u64,
    pub update_rate_hz: f64,
    pub epochs: usize,
    pub fixes: usize,
    pub no_fixes: usize,
    pub refreshes: usize,
    pub reacquisition_events: u32,
    pub mean_visible: f64,
    pub mean_tracked: f64,
    pub mean_error_m: f64,
    pub mean_power_mw: f64,
    pub total_energy_j: f64,
}

impl From<&RunReport> for RunSummary {
    fn from(r: &RunReport) -> Self {
        Self {
            scenario: r.scenario.clone(),
            policy: r.policy.clone(),
            seed: r.seed,
            update_rate_hz: r.update_rate,
            epochs: r.epochs.len(),
            fixes: r.fix_count,
            no_fixes: r.no_fix_count(),
            refreshes: r.refresh_count,
            reacquisition_events: r.reacquisition_events,
            mean_visible: r.mean_visible(),
            mean_tracked: r.mean_tracked(),
            mean_error_m: r.mean_error,
            mean_power_mw: r.mean_power,
            total_energy_j: r.total_energy,
        }
    }
}

impl RunSummary {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::RunFailed(e.to_string()))
    }
}
