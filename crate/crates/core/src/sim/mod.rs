//! Synthetic constellation, drive scenarios, measurement generation and the
//! full/selective/random tracking comparison.

mod constellation;
mod noise;
mod policy;
mod report;
mod runner;
mod scenario;

pub use constellation::{propagate_constellation, visible_satellites, ConstellationConfig, GM_EARTH};
pub use noise::{NoiseStreams, Purpose};
pub use policy::{PolicyKind, TrackingPolicy};
pub use report::{write_epochs_csv, write_trajectory_csv, RunSummary, CSV_COLUMNS, TRAJECTORY_COLUMNS};
pub use runner::{run_scenario, EpochRecord, RunReport};
pub use scenario::{generate_drive, DriveOptions, OutageModel, Scenario, Waypoint};

use crate::error::Result;
use crate::geo::EcefVector;
use crate::nav::{predict_pseudorange, Pseudorange, PseudorangeSet};

/// Pseudoranges for `satellites` (id, position) with additive Gaussian noise
/// drawn from the `(id, epoch)` pseudorange substream.
pub fn generate_measurements(
    receiver: EcefVector,
    true_bias: f64,
    satellites: &[(usize, EcefVector)],
    sigma: f64,
    noise: &NoiseStreams,
    epoch: u64,
    epoch_time: f64,
) -> Result<PseudorangeSet> {
    let entries = satellites
        .iter()
        .map(|&(id, pos)| {
            let mut rho = predict_pseudorange(receiver, true_bias, pos)?;
            if sigma > 0.0 {
                rho += sigma * noise.gaussian(Purpose::Pseudorange, id as u64, epoch);
            }
            Ok(Pseudorange {
                satellite_index: id,
                satellite_position: pos,
                pseudorange: rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PseudorangeSet::new(epoch_time, entries)
}

/// Serde adapter storing radians as degrees.
pub(crate) mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rad: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(rad.to_degrees())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d).map(f64::to_radians)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeodeticPosition;
    use crate::nav::{solve_position, SolverConfig};

    fn sky() -> (EcefVector, Vec<(usize, EcefVector)>) {
        let rx = GeodeticPosition::from_degrees(22.5, 114.0, 30.0).unwrap().to_ecef();
        let all = propagate_constellation(&ConstellationConfig::default(), 0.0);
        let pos: Vec<EcefVector> = all.iter().map(|p| p.1).collect();
        let vis = visible_satellites(rx, &pos, 0.0, None);
        (rx, vis.into_iter().map(|i| all[i]).collect())
    }

    #[test]
    fn noiseless_measurements_invert_exactly() {
        let (rx, sats) = sky();
        let m = generate_measurements(rx, 250.0, &sats, 0.0, &NoiseStreams::new(1), 0, 0.0).unwrap();
        let s = solve_position(&m, EcefVector::ZERO, 0.0, None, &SolverConfig::default()).unwrap();
        assert!(s.position.distance(rx) < 1e-6);
        assert!((s.clock_bias - 250.0).abs() < 1e-6);
    }

    #[test]
    fn seeded_measurements_repeat() {
        let (rx, sats) = sky();
        let n = NoiseStreams::new(99);
        let a = generate_measurements(rx, 0.0, &sats, 5.0, &n, 12, 12.0).unwrap();
        let b = generate_measurements(rx, 0.0, &sats, 5.0, &n, 12, 12.0).unwrap();
        assert_eq!(a, b);
        let c = generate_measurements(rx, 0.0, &sats, 5.0, &n, 13, 13.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noise_standard_deviation() {
        let (rx, sats) = sky();
        let n = NoiseStreams::new(2024);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        let mut epoch = 0u64;
        while count < 100_000 {
            let m = generate_measurements(rx, 0.0, &sats, 5.0, &n, epoch, 0.0).unwrap();
            for e in m.entries() {
                let r = e.pseudorange - predict_pseudorange(rx, 0.0, e.satellite_position).unwrap();
                sum += r;
                sum_sq += r * r;
                count += 1;
            }
            epoch += 1;
        }
        let mean = sum / count as f64;
        let sd = (sum_sq / count as f64 - mean * mean).sqrt();
        assert!((4.9..=5.1).contains(&sd), "sd = {sd}");
    }
}
