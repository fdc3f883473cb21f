//! Pseudorange forward model and the Gauss-Newton position/clock solver.
//!
//! Unknowns are `(x, y, z, b)` in meters, with the receiver clock bias `b`
//! expressed as a range (`c·δt`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gdop::gdop;
use crate::geo::{ecef_to_geodetic, geometry_matrix, EcefVector, WGS84_A};
use crate::linalg::{invert_normal, normal_matrix};

/// Starting points closer than this to the Earth's centre are replaced by a
/// point under the satellites when a height constraint is active.
const NEAR_CENTRE: f64 = 1.0e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pseudorange {
    pub satellite_index: usize,
    pub satellite_position: EcefVector,
    /// Meters.
    pub pseudorange: f64,
}

/// One epoch of pseudoranges. Satellite indices are unique and every range is
/// positive and finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudorangeSet {
    epoch_time: f64,
    entries: Vec<Pseudorange>,
}

impl PseudorangeSet {
    pub fn new(epoch_time: f64, entries: Vec<Pseudorange>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if !(e.pseudorange.is_finite() && e.pseudorange > 0.0) {
                return Err(Error::invalid(
                    "pseudorange",
                    format!("satellite {}: {}", e.satellite_index, e.pseudorange),
                ));
            }
            if !e.satellite_position.is_finite() {
                return Err(Error::invalid("satellite_position", "not finite"));
            }
            if !seen.insert(e.satellite_index) {
                return Err(Error::invalid(
                    "satellite_index",
                    format!("{} appears twice", e.satellite_index),
                ));
            }
        }
        Ok(Self { epoch_time, entries })
    }

    pub fn epoch_time(&self) -> f64 {
        self.epoch_time
    }

    pub fn entries(&self) -> &[Pseudorange] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn satellite_positions(&self) -> Vec<EcefVector> {
        self.entries.iter().map(|e| e.satellite_position).collect()
    }

    /// Copy with `offset` meters added to every range.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| Pseudorange {
                pseudorange: e.pseudorange + offset,
                ..*e
            })
            .collect();
        Self::new(self.epoch_time, entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavSolution {
    pub position: EcefVector,
    /// Receiver clock bias in meters.
    pub clock_bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// RMS of the pseudorange residuals at the solution, meters.
    pub residual_rms: f64,
    pub gdop_at_solution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop once the norm of the (position, bias) update is below this, meters.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_iterations: 20,
        }
    }
}

/// Known geodetic height used as an extra measurement row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltitudeAiding {
    pub height: f64,
    /// Weight relative to a single pseudorange.
    pub weight: f64,
}

impl AltitudeAiding {
    pub fn new(height: f64) -> Self {
        Self { height, weight: 1.0 }
    }
}

/// `‖satellite − receiver‖ + clock_bias`.
pub fn predict_pseudorange(receiver: EcefVector, clock_bias: f64, satellite: EcefVector) -> Result<f64> {
    let range = receiver.distance(satellite);
    if range == 0.0 {
        return Err(Error::DegenerateInput("satellite coincides with receiver"));
    }
    Ok(range + clock_bias)
}

/// Gauss-Newton least squares for position and clock bias.
///
/// Running out of iterations is not an error: the last iterate is returned
/// with `converged == false`.
pub fn solve_position(
    measurements: &PseudorangeSet,
    initial_position: EcefVector,
    initial_bias: f64,
    aiding: Option<AltitudeAiding>,
    config: &SolverConfig,
) -> Result<NavSolution> {
    let need = if aiding.is_some() { 3 } else { 4 };
    if measurements.len() < need {
        return Err(Error::InsufficientMeasurements {
            got: measurements.len(),
            need,
        });
    }
    if let Some(a) = aiding {
        if !(a.weight > 0.0 && a.weight.is_finite() && a.height.is_finite()) {
            return Err(Error::invalid("altitude aiding", "weight must be positive"));
        }
    }

    let mut x = initial_position;
    let mut b = initial_bias;
    if aiding.is_some() && x.norm() < NEAR_CENTRE {
        let mean = measurements
            .entries()
            .iter()
            .fold(EcefVector::ZERO, |acc, e| acc + e.satellite_position);
        x = mean.unit()? * WGS84_A;
    }

    let mut rows: Vec<([f64; 4], f64, f64)> = Vec::with_capacity(measurements.len() + 1);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        rows.clear();
        for e in measurements.entries() {
            let predicted = predict_pseudorange(x, b, e.satellite_position)?;
            let u = (e.satellite_position - x).unit()?;
            rows.push(([-u.x, -u.y, -u.z, 1.0], 1.0, e.pseudorange - predicted));
        }
        if let Some(a) = aiding {
            let site = ecef_to_geodetic(x)?;
            let up = site.enu_basis()[2];
            rows.push(([up.x, up.y, up.z, 0.0], a.weight, a.height - site.height()));
        }

        let n = normal_matrix(rows.iter().map(|(j, w, _)| (j, *w)));
        let inv = invert_normal(&n)?;
        let mut rhs = nalgebra::Vector4::zeros();
        for (j, w, r) in &rows {
            rhs += nalgebra::Vector4::from_column_slice(j) * (w * r);
        }
        let delta = inv * rhs;
        x = x + EcefVector::new(delta[0], delta[1], delta[2]);
        b += delta[3];
        iterations += 1;
        if delta.norm() < config.tolerance {
            converged = true;
            break;
        }
    }

    let mut sum_sq = 0.0;
    for e in measurements.entries() {
        let r = e.pseudorange - predict_pseudorange(x, b, e.satellite_position)?;
        sum_sq += r * r;
    }
    let residual_rms = (sum_sq / measurements.len() as f64).sqrt();

    let mut geometry = geometry_matrix(x, &measurements.satellite_positions())?;
    if aiding.is_some() {
        geometry = geometry.with_altitude_row()?;
    }
    let gdop_at_solution = gdop(&geometry)?;

    Ok(NavSolution {
        position: x,
        clock_bias: b,
        iterations,
        converged,
        residual_rms,
        gdop_at_solution,
    })
}

/// 3-D distance between the solved position and the truth, meters.
pub fn solution_error(solution: &NavSolution, truth: EcefVector) -> f64 {
    solution.position.distance(truth)
}

/// Mean 3-D error over paired solutions and truths; `None` when empty.
pub fn mean_solution_error(pairs: &[(NavSolution, EcefVector)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let sum: f64 = pairs.iter().map(|(s, t)| solution_error(s, *t)).sum();
    Some(sum / pairs.len() as f64)
}
