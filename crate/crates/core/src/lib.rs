//! Measurement-level GPS receiver simulation with a parametric receiver
//! energy model and GDOP-weighted selective satellite tracking.
//!
//! The crate is organised bottom-up:
//!
//! * [`geo`]: WGS-84 frames, look angles and the navigation geometry matrix.
//! * [`gdop`]: GDOP, satellite weight optimisation and greedy subset selection.
//! * [`nav`]: pseudorange forward model and Gauss-Newton position/clock solver.
//! * [`energy`]: per-procedure receiver power model and run energy accounting.
//! * [`sim`]: circular-orbit constellation, trajectories, measurement noise,
//!   tracking policies and end-to-end scenario runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod gdop;
pub mod geo;
mod linalg;
pub mod nav;
pub mod sim;

pub use energy::{
    accumulate_run_energy, energy_saving, procedure_power, total_power, EnergyModelParams, OperatingPoint,
    PowerBreakdown, Procedure, RunEnergy,
};
pub use error::{Error, Result};
pub use gdop::{
    gdop, optimize_weights, select_subset, weight_gradient, weighted_dilution, SelectionConfig, SelectionResult,
    WeightVector,
};
pub use geo::{
    ecef_to_geodetic, geodetic_to_ecef, geometry_matrix, look_angles, EcefVector, GeodeticPosition, GeometryMatrix,
    LookAngles,
};
pub use nav::{
    predict_pseudorange, solution_error, solve_position, AltitudeAiding, NavSolution, Pseudorange, PseudorangeSet,
    SolverConfig,
};
pub use sim::{
    generate_measurements, propagate_constellation, run_scenario, visible_satellites, ConstellationConfig, EpochRecord,
    PolicyKind, RunReport, Scenario, TrackingPolicy,
};
