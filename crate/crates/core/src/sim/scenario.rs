use serde::{Deserialize, Serialize};

use crate::energy::{MAX_RATE_HZ, MIN_RATE_HZ};
use crate::error::{Error, Result};
use crate::geo::{GeodeticPosition, WGS84_A, WGS84_E2};

use super::constellation::ConstellationConfig;

/// A trajectory point. Serialised with angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaypointRecord", into = "WaypointRecord")]
pub struct Waypoint {
    pub time: f64,
    pub position: GeodeticPosition,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaypointRecord {
    time: f64,
    latitude_deg: f64,
    longitude_deg: f64,
    height: f64,
}

impl TryFrom<WaypointRecord> for Waypoint {
    type Error = Error;
    fn try_from(r: WaypointRecord) -> Result<Self> {
        Ok(Self {
            time: r.time,
            position: GeodeticPosition::from_degrees(r.latitude_deg, r.longitude_deg, r.height)?,
        })
    }
}

impl From<Waypoint> for WaypointRecord {
    fn from(w: Waypoint) -> Self {
        Self {
            time: w.time,
            latitude_deg: w.position.latitude().to_degrees(),
            longitude_deg: w.position.longitude().to_degrees(),
            height: w.position.height(),
        }
    }
}

/// Two-state (up/down) Markov outage process applied independently to every
/// satellite, stepped once per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutageModel {
    pub mean_up_s: f64,
    pub mean_down_s: f64,
}

impl OutageModel {
    fn validate(&self) -> Result<()> {
        if !(self.mean_up_s > 0.0 && self.mean_down_s > 0.0) {
            return Err(Error::invalid("outage_model", "mean durations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Seconds.
    pub duration: f64,
    /// Fixes per second.
    pub update_rate: f64,
    /// One-sigma Gaussian pseudorange noise, meters.
    #[serde(default = "default_sigma")]
    pub pseudorange_noise_sigma: f64,
    #[serde(rename = "elevation_mask_deg", with = "super::degrees", default = "default_mask")]
    pub elevation_mask: f64,
    /// Constant receiver clock bias, meters.
    #[serde(default)]
    pub receiver_clock_bias: f64,
    pub rng_seed: u64,
    #[serde(default)]
    pub constellation: ConstellationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outage_model: Option<OutageModel>,
    /// Piecewise-linear in latitude, longitude and height; held constant
    /// outside the covered time span.
    pub trajectory: Vec<Waypoint>,
}

fn default_sigma() -> f64 {
    5.0
}

fn default_mask() -> f64 {
    10f64.to_radians()
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if !(MIN_RATE_HZ..=MAX_RATE_HZ).contains(&self.update_rate) {
            return Err(Error::invalid("update_rate", "must lie in [1, 10] Hz"));
        }
        if !(self.pseudorange_noise_sigma >= 0.0 && self.pseudorange_noise_sigma.is_finite()) {
            return Err(Error::invalid("pseudorange_noise_sigma", "must be >= 0"));
        }
        if !(self.elevation_mask.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid("elevation_mask", "must lie in [-90, 90] degrees"));
        }
        if !self.receiver_clock_bias.is_finite() {
            return Err(Error::invalid("receiver_clock_bias", "not finite"));
        }
        if self.epoch_count() == 0 {
            return Err(Error::invalid("duration", "shorter than one epoch"));
        }
        self.constellation.validate()?;
        if let Some(o) = &self.outage_model {
            o.validate()?;
        }
        if self.trajectory.is_empty() {
            return Err(Error::invalid("trajectory", "needs at least one waypoint"));
        }
        if self.trajectory.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(Error::invalid("trajectory", "waypoint times must strictly increase"));
        }
        Ok(())
    }

    /// Number of epochs, `duration · update_rate` rounded to the nearest integer.
    pub fn epoch_count(&self) -> usize {
        (self.duration * self.update_rate).round().max(0.0) as usize
    }

    pub fn position_at(&self, t: f64) -> GeodeticPosition {
        let wp = &self.trajectory;
        if t <= wp[0].time {
            return wp[0].position;
        }
        let last = wp[wp.len() - 1];
        if t >= last.time {
            return last.position;
        }
        let k = wp.partition_point(|w| w.time <= t);
        let (a, b) = (wp[k - 1], wp[k]);
        let s = (t - a.time) / (b.time - a.time);
        let lerp = |x: f64, y: f64| x + s * (y - x);
        GeodeticPosition::new(
            lerp(a.position.latitude(), b.position.latitude()),
            lerp(a.position.longitude(), b.position.longitude()),
            lerp(a.position.height(), b.position.height()),
        )
        .expect("interpolated waypoints stay in range")
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let sc: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Same scenario with a different master seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..self.clone()
        }
    }
}

/// Parameters of a synthetic drive along a gently curving road.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveOptions {
    pub name: String,
    pub duration: f64,
    pub speed_kmh: f64,
    pub start_latitude_deg: f64,
    pub start_longitude_deg: f64,
    pub height: f64,
    pub heading_deg: f64,
    /// Heading change per kilometre driven.
    pub turn_deg_per_km: f64,
    pub update_rate: f64,
    pub noise_sigma: f64,
    pub elevation_mask_deg: f64,
    pub satellite_count: usize,
    pub constellation_epoch: f64,
    pub outage_model: Option<OutageModel>,
    pub seed: u64,
    pub waypoint_spacing: f64,
}

impl Default for DriveOptions {
    fn default() -> Self {
        Self {
            name: "default-drive".into(),
            duration: 300.0,
            speed_kmh: 60.0,
            start_latitude_deg: 20.0,
            start_longitude_deg: 105.0,
            height: 30.0,
            heading_deg: 45.0,
            turn_deg_per_km: 15.0,
            update_rate: 1.0,
            noise_sigma: 5.0,
            elevation_mask_deg: 10.0,
            satellite_count: 24,
            constellation_epoch: 4200.0,
            outage_model: None,
            seed: 1,
            waypoint_spacing: 10.0,
        }
    }
}

/// Builds a drive scenario; identical options give identical scenarios.
pub fn generate_drive(opts: &DriveOptions) -> Result<Scenario> {
    if !(opts.duration > 0.0 && opts.duration.is_finite()) {
        return Err(Error::invalid("duration", "must be positive"));
    }
    if !(opts.speed_kmh >= 0.0 && opts.speed_kmh.is_finite()) {
        return Err(Error::invalid("speed", "must be >= 0"));
    }
    if !(opts.waypoint_spacing > 0.0) {
        return Err(Error::invalid("waypoint_spacing", "must be positive"));
    }
    let start = GeodeticPosition::from_degrees(opts.start_latitude_deg, opts.start_longitude_deg, opts.height)?;
    let speed = opts.speed_kmh / 3.6;

    let mut trajectory = Vec::new();
    let (mut lat, mut lon) = (start.latitude(), start.longitude());
    let mut heading = opts.heading_deg.to_radians();
    let mut t = 0.0;
    let steps = (opts.duration / opts.waypoint_spacing).ceil() as usize;
    for k in 0..=steps {
        trajectory.push(Waypoint {
            time: t,
            position: GeodeticPosition::new(lat, lon, opts.height)?,
        });
        if k == steps {
            break;
        }
        let dt = opts.waypoint_spacing.min(opts.duration - t);
        let dist = speed * dt;
        let s2 = lat.sin().powi(2);
        let meridional = WGS84_A * (1.0 - WGS84_E2) / (1.0 - WGS84_E2 * s2).powf(1.5);
        let normal = WGS84_A / (1.0 - WGS84_E2 * s2).sqrt();
        lat += dist * heading.cos() / (meridional + opts.height);
        lon += dist * heading.sin() / ((normal + opts.height) * lat.cos());
        heading += opts.turn_deg_per_km.to_radians() * dist / 1000.0;
        t += dt;
    }

    let sc = Scenario {
        name: opts.name.clone(),
        duration: opts.duration,
        update_rate: opts.update_rate,
        pseudorange_noise_sigma: opts.noise_sigma,
        elevation_mask: opts.elevation_mask_deg.to_radians(),
        receiver_clock_bias: 0.0,
        rng_seed: opts.seed,
        constellation: ConstellationConfig {
            satellite_count: opts.satellite_count,
            epoch: opts.constellation_epoch,
            ..Default::default()
        },
        outage_model: opts.outage_model,
        trajectory,
    };
    sc.validate()?;
    Ok(sc)
}
