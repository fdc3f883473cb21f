use std::io::Write;

use selgps::sim::{generate_drive, DriveOptions, OutageModel};

use crate::args::GenerateArgs;
use crate::output::write_atomic;
use crate::CliError;

pub fn drive_options(a: &GenerateArgs) -> Result<DriveOptions, CliError> {
    if !(a.duration > 0.0 && a.duration.is_finite()) {
        return Err(CliError::Usage("--duration must be positive".into()));
    }
    if a.satellites == 0 {
        return Err(CliError::Usage("--satellites must be at least 1".into()));
    }
    let outage_model = match (a.outage_up, a.outage_down) {
        (Some(up), Some(down)) => Some(OutageModel {
            mean_up_s: up,
            mean_down_s: down,
        }),
        _ => None,
    };
    Ok(DriveOptions {
        name: a.name.clone(),
        duration: a.duration,
        speed_kmh: a.speed_kmh,
        start_latitude_deg: a.lat,
        start_longitude_deg: a.lon,
        update_rate: a.rate,
        noise_sigma: a.sigma,
        elevation_mask_deg: a.mask,
        satellite_count: a.satellites,
        constellation_epoch: a.epoch,
        outage_model,
        seed: a.seed,
        ..DriveOptions::default()
    })
}

pub fn cmd_generate(a: &GenerateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = generate_drive(&drive_options(a)?).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = scenario.to_toml_string()?;
    match &a.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}
