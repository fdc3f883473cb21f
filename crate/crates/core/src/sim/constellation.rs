use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{look_angles, EcefVector, WGS84_A};

/// Earth's gravitational parameter, m³/s².
pub const GM_EARTH: f64 = 3.986_004_418e14;

/// Walker-delta constellation of circular orbits.
///
/// Orbits are propagated in the Earth-fixed frame without Earth rotation, so
/// the sky repeats after one orbital period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationConfig {
    pub satellite_count: usize,
    /// Meters from the Earth's centre.
    pub orbital_radius: f64,
    #[serde(rename = "inclination_deg", with = "super::degrees")]
    pub inclination: f64,
    pub plane_count: usize,
    /// Walker phasing factor: plane `p` is shifted by `2π·phasing·p / satellite_count`.
    pub phasing: u32,
    /// Right ascension of the first plane.
    #[serde(rename = "raan_offset_deg", with = "super::degrees")]
    pub raan_offset: f64,
    /// Seconds added to every propagation time.
    pub epoch: f64,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            satellite_count: 24,
            orbital_radius: 26_560_000.0,
            inclination: 55f64.to_radians(),
            plane_count: 3,
            phasing: 1,
            raan_offset: 0.0,
            epoch: 0.0,
        }
    }
}

impl ConstellationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.satellite_count < 1 || self.plane_count < 1 {
            return Err(Error::invalid(
                "constellation",
                "satellite and plane counts must be >= 1",
            ));
        }
        if self.plane_count > self.satellite_count {
            return Err(Error::invalid("plane_count", "more planes than satellites"));
        }
        if !(self.orbital_radius > WGS84_A && self.orbital_radius.is_finite()) {
            return Err(Error::invalid("orbital_radius", "must exceed the Earth radius"));
        }
        if !self.inclination.is_finite() || !self.raan_offset.is_finite() || !self.epoch.is_finite() {
            return Err(Error::invalid("constellation", "angles and epoch must be finite"));
        }
        Ok(())
    }

    /// Mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (GM_EARTH / self.orbital_radius.powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        TAU / self.mean_motion()
    }

    /// (plane, slot, satellites in that plane) for satellite `id`.
    fn slot(&self, id: usize) -> (usize, usize, usize) {
        let base = self.satellite_count / self.plane_count;
        let extra = self.satellite_count % self.plane_count;
        let mut start = 0;
        for p in 0..self.plane_count {
            let n = base + usize::from(p < extra);
            if id < start + n {
                return (p, id - start, n);
            }
            start += n;
        }
        unreachable!("satellite id {id} out of range")
    }

    /// Argument of latitude of satellite `id` at time `t`.
    pub fn argument_of_latitude(&self, id: usize, t: f64) -> f64 {
        let (p, s, n) = self.slot(id);
        TAU * s as f64 / n as f64
            + TAU * f64::from(self.phasing) * p as f64 / self.satellite_count as f64
            + self.mean_motion() * (self.epoch + t)
    }
}

/// Satellite ids and positions at time `t`, ordered by id.
pub fn propagate_constellation(config: &ConstellationConfig, t: f64) -> Vec<(usize, EcefVector)> {
    let (si, ci) = config.inclination.sin_cos();
    (0..config.satellite_count)
        .map(|id| {
            let (p, _, _) = config.slot(id);
            let raan = config.raan_offset + TAU * p as f64 / config.plane_count as f64;
            let (so, co) = raan.sin_cos();
            let (su, cu) = config.argument_of_latitude(id, t).sin_cos();
            let r = config.orbital_radius;
            let pos = EcefVector::new(r * (cu * co - su * ci * so), r * (cu * so + su * ci * co), r * su * si);
            (id, pos)
        })
        .collect()
}

/// Indices (into `satellites`) at or above `mask` elevation that are not in
/// outage, ascending.
pub fn visible_satellites(
    receiver: EcefVector,
    satellites: &[EcefVector],
    mask: f64,
    available: Option<&[bool]>,
) -> Vec<usize> {
    satellites
        .iter()
        .enumerate()
        .filter(|(i, _)| available.is_none_or(|a| a.get(*i).copied().unwrap_or(false)))
        .filter(|(_, s)| look_angles(receiver, **s).is_ok_and(|la| la.elevation >= mask))
        .map(|(i, _)| i)
        .collect()
}
