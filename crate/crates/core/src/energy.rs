//! Parametric receiver power model.
//!
//! Each receiver procedure contributes an amortised per-second power:
//!
//! | procedure   | contribution (mW)                                   |
//! |-------------|-----------------------------------------------------|
//! | RF          | `U_r·I_r·t_r·f`                                     |
//! | acquisition | `(U_s·I_a·t_a + U_r·I_r·t_r) / T_a`                 |
//! | track       | `intercept + slope·N·L`                             |
//! | ephemeris   | `(U_s·I_e·t_e + U_r·I_r·t_re) / T_e`                |
//! | navigation  | `intercept + slope·N·L`                             |
//! | idle        | `P_i·(t_i/T)` when included                         |
//!
//! where `N` is the number of tracked satellites, `f` the update rate and
//! `L` the milliseconds of raw samples captured per second. Track and
//! navigation are fitted linear models, already amortised per second.
//!
//! Voltages, currents and durations are SI; the fitted models and every
//! reported power are in milliwatts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_RATE_HZ: f64 = 1.0;
pub const MAX_RATE_HZ: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfParams {
    /// `U_r`, volts.
    pub voltage: f64,
    /// `I_r`, amps.
    pub current: f64,
    /// `t_r`, seconds of signal captured per fix.
    pub capture_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionParams {
    /// `U_s`, processor supply voltage (also used by ephemeris extraction).
    pub processor_voltage: f64,
    /// `I_a`, amps.
    pub current: f64,
    /// `t_a`, seconds.
    pub run_time: f64,
    /// `T_a`, seconds between acquisitions.
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EphemerisParams {
    /// `I_e`, amps.
    pub current: f64,
    /// `t_e`, seconds.
    pub run_time: f64,
    /// `t_re`, seconds of continuous RF sampling.
    pub rf_capture_time: f64,
    /// `T_e`, seconds between ephemeris collections.
    pub period: f64,
}

/// `intercept + slope·N·L`, mW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearFit {
    pub fn eval(&self, n_times_l: f64) -> f64 {
        self.intercept + self.slope * n_times_l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdleParams {
    /// `P_i`, mW.
    pub power: f64,
    /// `t_i / T`, fraction of each cycle spent idle.
    pub fraction: f64,
    pub included: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyModelParams {
    pub rf: RfParams,
    pub acquisition: AcquisitionParams,
    pub track_fit: LinearFit,
    pub ephemeris: EphemerisParams,
    pub navigation_fit: LinearFit,
    pub idle: IdleParams,
}

impl EnergyModelParams {
    /// Constants measured on the Namuru V2 receiver.
    pub const NAMURU: EnergyModelParams = EnergyModelParams {
        rf: RfParams {
            voltage: 5.0,
            current: 0.064,
            capture_time: 0.002,
        },
        acquisition: AcquisitionParams {
            processor_voltage: 3.3,
            current: 0.130,
            run_time: 1.2,
            period: 60.0,
        },
        track_fit: LinearFit {
            intercept: 11.88,
            slope: 7.26,
        },
        ephemeris: EphemerisParams {
            current: 0.131,
            run_time: 50.0,
            rf_capture_time: 36.0,
            period: 1800.0,
        },
        navigation_fit: LinearFit {
            intercept: 2.0,
            slope: 1.65,
        },
        idle: IdleParams {
            power: 0.0,
            fraction: 1.0,
            included: false,
        },
    };

    pub fn namuru() -> Self {
        Self::NAMURU
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rf.voltage", self.rf.voltage),
            ("rf.current", self.rf.current),
            ("rf.capture_time", self.rf.capture_time),
            ("acquisition.processor_voltage", self.acquisition.processor_voltage),
            ("acquisition.current", self.acquisition.current),
            ("acquisition.run_time", self.acquisition.run_time),
            ("acquisition.period", self.acquisition.period),
            ("ephemeris.current", self.ephemeris.current),
            ("ephemeris.run_time", self.ephemeris.run_time),
            ("ephemeris.rf_capture_time", self.ephemeris.rf_capture_time),
            ("ephemeris.period", self.ephemeris.period),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        for (name, fit) in [("track_fit", self.track_fit), ("navigation_fit", self.navigation_fit)] {
            if !(fit.intercept >= 0.0 && fit.slope >= 0.0 && fit.intercept.is_finite() && fit.slope.is_finite()) {
                return Err(Error::invalid(name, "coefficients must be non-negative"));
            }
        }
        if !(self.idle.power >= 0.0 && (0.0..=1.0).contains(&self.idle.fraction)) {
            return Err(Error::invalid("idle", "power >= 0 and fraction in [0, 1]"));
        }
        if self.acquisition.period > self.ephemeris.period {
            return Err(Error::invalid(
                "acquisition.period",
                "must not exceed the ephemeris period",
            ));
        }
        Ok(())
    }

    /// Joules spent by one full acquisition including its RF capture.
    pub fn acquisition_energy(&self) -> f64 {
        self.acquisition.processor_voltage * self.acquisition.current * self.acquisition.run_time
            + self.rf.voltage * self.rf.current * self.rf.capture_time
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let p: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("energy parameters always serialise")
    }

    /// `"namuru"` (any case) selects the built-in profile, anything else is
    /// read as a TOML profile file.
    pub fn resolve_profile(name_or_path: &str) -> Result<Self> {
        if name_or_path.eq_ignore_ascii_case("namuru") {
            return Ok(Self::NAMURU);
        }
        let text = std::fs::read_to_string(Path::new(name_or_path))
            .map_err(|e| Error::Parse(format!("{name_or_path}: {e}")))?;
        Self::from_toml_str(&text)
    }
}

/// Tracked-satellite count and update rate at which power is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    satellites: u32,
    rate_hz: f64,
    ms_per_fix: f64,
}

impl OperatingPoint {
    /// Two milliseconds of raw samples per fix, so `L = 2f`.
    pub const DEFAULT_MS_PER_FIX: f64 = 2.0;

    pub fn new(satellites: u32, rate_hz: f64) -> Result<Self> {
        Self::with_capture(satellites, rate_hz, Self::DEFAULT_MS_PER_FIX)
    }

    pub fn with_capture(satellites: u32, rate_hz: f64, ms_per_fix: f64) -> Result<Self> {
        if satellites < 1 {
            return Err(Error::InvalidOperatingPoint(
                "at least one tracked satellite is required".into(),
            ));
        }
        if !(MIN_RATE_HZ..=MAX_RATE_HZ).contains(&rate_hz) {
            return Err(Error::InvalidOperatingPoint(format!(
                "update rate {rate_hz} Hz outside [{MIN_RATE_HZ}, {MAX_RATE_HZ}]"
            )));
        }
        if !(ms_per_fix > 0.0 && ms_per_fix.is_finite()) {
            return Err(Error::InvalidOperatingPoint("capture length must be positive".into()));
        }
        Ok(Self {
            satellites,
            rate_hz,
            ms_per_fix,
        })
    }

    pub fn satellites(&self) -> u32 {
        self.satellites
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    /// `L`, milliseconds of raw data sampled per second.
    pub fn raw_ms_per_second(&self) -> f64 {
        self.ms_per_fix * self.rate_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Procedure {
    Rf,
    Acquisition,
    Track,
    Ephemeris,
    Navigation,
    Idle,
}

impl Procedure {
    pub const ALL: [Procedure; 6] = [
        Procedure::Rf,
        Procedure::Acquisition,
        Procedure::Track,
        Procedure::Ephemeris,
        Procedure::Navigation,
        Procedure::Idle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Rf => "rf",
            Procedure::Acquisition => "acquisition",
            Procedure::Track => "track",
            Procedure::Ephemeris => "ephemeris",
            Procedure::Navigation => "navigation",
            Procedure::Idle => "idle",
        }
    }
}

/// Amortised power of one procedure, mW.
pub fn procedure_power(procedure: Procedure, params: &EnergyModelParams, op: &OperatingPoint) -> Result<f64> {
    params.validate()?;
    let rf_w = params.rf.voltage * params.rf.current;
    let nl = f64::from(op.satellites) * op.raw_ms_per_second();
    let mw = match procedure {
        Procedure::Rf => 1000.0 * rf_w * params.rf.capture_time * op.rate_hz,
        Procedure::Acquisition => 1000.0 * params.acquisition_energy() / params.acquisition.period,
        Procedure::Track => params.track_fit.eval(nl),
        Procedure::Ephemeris => {
            let e = &params.ephemeris;
            1000.0 * (params.acquisition.processor_voltage * e.current * e.run_time + rf_w * e.rf_capture_time)
                / e.period
        }
        Procedure::Navigation => params.navigation_fit.eval(nl),
        Procedure::Idle => {
            if params.idle.included {
                params.idle.power * params.idle.fraction
            } else {
                0.0
            }
        }
    };
    Ok(mw)
}

/// Per-procedure power and their sum, mW.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub rf: f64,
    pub acquisition: f64,
    pub track: f64,
    pub ephemeris: f64,
    pub navigation: f64,
    pub idle: f64,
    pub total: f64,
}

impl PowerBreakdown {
    pub fn component(&self, p: Procedure) -> f64 {
        match p {
            Procedure::Rf => self.rf,
            Procedure::Acquisition => self.acquisition,
            Procedure::Track => self.track,
            Procedure::Ephemeris => self.ephemeris,
            Procedure::Navigation => self.navigation,
            Procedure::Idle => self.idle,
        }
    }

    /// Fraction of the total spent in `p`.
    pub fn share(&self, p: Procedure) -> f64 {
        self.component(p) / self.total
    }

    /// Procedure with the largest contribution.
    pub fn dominant(&self) -> Procedure {
        Procedure::ALL
            .into_iter()
            .max_by(|a, b| self.component(*a).total_cmp(&self.component(*b)))
            .unwrap_or(Procedure::Track)
    }
}

pub fn total_power(params: &EnergyModelParams, op: &OperatingPoint) -> Result<PowerBreakdown> {
    let mut b = PowerBreakdown {
        rf: procedure_power(Procedure::Rf, params, op)?,
        acquisition: procedure_power(Procedure::Acquisition, params, op)?,
        track: procedure_power(Procedure::Track, params, op)?,
        ephemeris: procedure_power(Procedure::Ephemeris, params, op)?,
        navigation: procedure_power(Procedure::Navigation, params, op)?,
        idle: procedure_power(Procedure::Idle, params, op)?,
        total: 0.0,
    };
    b.total = b.rf + b.acquisition + b.track + b.ephemeris + b.navigation + b.idle;
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunEnergy {
    pub joules: f64,
    pub mean_mw: f64,
    pub duration_s: f64,
}

/// Energy of a run whose tracked-satellite count varies per epoch, plus one
/// full acquisition for every re-acquisition event.
pub fn accumulate_run_energy(
    per_epoch_satellites: &[u32],
    rate_hz: f64,
    params: &EnergyModelParams,
    reacquisition_events: u32,
) -> Result<RunEnergy> {
    if per_epoch_satellites.is_empty() {
        return Err(Error::EmptyEpochs);
    }
    let epoch_s = 1.0 / rate_hz;
    let mut mj = 0.0;
    for &n in per_epoch_satellites {
        let op = OperatingPoint::new(n, rate_hz)?;
        mj += total_power(params, &op)?.total * epoch_s;
    }
    let joules = mj / 1000.0 + f64::from(reacquisition_events) * params.acquisition_energy();
    let duration_s = per_epoch_satellites.len() as f64 * epoch_s;
    Ok(RunEnergy {
        joules,
        mean_mw: 1000.0 * joules / duration_s,
        duration_s,
    })
}

/// `(full − selective) / full`.
pub fn energy_saving(full_mw: f64, selective_mw: f64) -> Result<f64> {
    if !(full_mw > 0.0) {
        return Err(Error::invalid("full power", format!("{full_mw} must be positive")));
    }
    Ok((full_mw - selective_mw) / full_mw)
}
