use std::io::Write;

use selgps::{total_power, OperatingPoint, PowerBreakdown, Procedure};
use serde::Serialize;

use crate::args::EnergyArgs;
use crate::run::load_profile;
use crate::CliError;

#[derive(Debug, Serialize)]
struct EnergyReport {
    profile: String,
    satellites: u32,
    rate_hz: f64,
    ms_per_fix: f64,
    breakdown: PowerBreakdown,
    dominant: &'static str,
}

pub fn cmd_energy(a: &EnergyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = load_profile(&a.profile)?;
    if a.dump_profile {
        stdout.write_all(params.to_toml_string().as_bytes())?;
        return Ok(());
    }
    let ms = a.ms_per_fix.unwrap_or(OperatingPoint::DEFAULT_MS_PER_FIX);
    let op = OperatingPoint::with_capture(a.satellites, a.rate, ms).map_err(|e| CliError::Usage(e.to_string()))?;
    let b = total_power(&params, &op)?;

    if a.json {
        let report = EnergyReport {
            profile: a.profile.clone(),
            satellites: a.satellites,
            rate_hz: a.rate,
            ms_per_fix: ms,
            breakdown: b,
            dominant: b.dominant().name(),
        };
        let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Run(e.to_string()))?;
        writeln!(stdout, "{text}")?;
        return Ok(());
    }

    writeln!(
        stdout,
        "profile {}  N = {}  f = {} Hz  {} ms/fix",
        a.profile, a.satellites, a.rate, ms
    )?;
    writeln!(stdout, "{:<12} {:>10} {:>7}", "procedure", "mW", "share")?;
    for p in Procedure::ALL {
        writeln!(
            stdout,
            "{:<12} {:>10.3} {:>6.1}%",
            p.name(),
            b.component(p),
            100.0 * b.share(p)
        )?;
    }
    writeln!(stdout, "{:<12} {:>10.3}", "total", b.total)?;
    Ok(())
}
