//! Geometric dilution of precision, satellite weighting and greedy subset
//! selection.
//!
//! Satellite weights are the diagonal of `W` in the weighted normal matrix
//! `AᵀWA`. The objective `f(W) = trace((AᵀWA)⁻¹)` is minimised by projected
//! gradient descent on the simplex `Σw = r, w ≥ 0`, starting from uniform
//! weights. A satellite's final weight is its selection priority.

use std::collections::VecDeque;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeometryMatrix;
use crate::linalg::{invert_normal, normal_matrix, numerical_rank};

const WEIGHT_SUM_TOL: f64 = 1e-9;
const MAX_STEP_HALVINGS: usize = 40;

/// Diagonal of the weight matrix. Weights are non-negative and sum to the
/// number of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn uniform(r: usize) -> Self {
        Self(vec![1.0; r])
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "empty"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights", "must be finite and non-negative"));
        }
        let r = weights.len() as f64;
        let sum: f64 = weights.iter().sum();
        if (sum - r).abs() > WEIGHT_SUM_TOL * r.max(1.0) {
            return Err(Error::invalid("weights", format!("sum {sum} != {r}")));
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Indices by descending weight; ties go to the lower index.
    pub fn ranking(&self) -> Vec<usize> {
        rank_by_weight(&self.0)
    }
}

impl AsRef<[f64]> for WeightVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn rank_by_weight(w: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    /// Subset qualifies once `|G − G_w| / G` drops strictly below this.
    pub gdop_gap_threshold: f64,
    /// Use a known-height virtual row, so three satellites suffice.
    pub altitude_aided: bool,
    pub max_weight_iterations: usize,
    /// First step length, in weight units for the steepest component.
    pub initial_step: f64,
    /// Factor applied to the step after a rejected (non-decreasing) trial.
    pub step_shrink: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            gdop_gap_threshold: 0.05,
            altitude_aided: false,
            max_weight_iterations: 3,
            initial_step: 1.0,
            step_shrink: 0.5,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gdop_gap_threshold > 0.0 && self.gdop_gap_threshold < 1.0) {
            return Err(Error::invalid("gdop_gap_threshold", "must lie in (0, 1)"));
        }
        if self.max_weight_iterations < 1 {
            return Err(Error::invalid("max_weight_iterations", "must be at least 1"));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::invalid("initial_step", "must be positive"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::invalid("step_shrink", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Smallest subset the selector starts from.
    pub fn minimum_satellites(&self) -> usize {
        if self.altitude_aided {
            3
        } else {
            4
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Selected row indices, ascending.
    pub selected_indices: Vec<usize>,
    pub full_gdop: f64,
    pub subset_gdop: f64,
    pub relative_gap: f64,
    /// Final weight of each input satellite (the altitude row, if any, is omitted).
    pub weights: Vec<f64>,
}

fn check_weights(a: &GeometryMatrix, weights: &[f64]) -> Result<()> {
    if weights.len() != a.len() {
        return Err(Error::invalid(
            "weights",
            format!("length {} != {} rows", weights.len(), a.len()),
        ));
    }
    Ok(())
}

fn weighted_inverse(a: &GeometryMatrix, weights: &[f64]) -> Result<Matrix4<f64>> {
    check_weights(a, weights)?;
    invert_normal(&normal_matrix(a.rows().iter().zip(weights.iter().copied())))
}

/// `sqrt(trace((AᵀA)⁻¹))`.
pub fn gdop(a: &GeometryMatrix) -> Result<f64> {
    if a.len() < 4 {
        return Err(Error::InsufficientMeasurements { got: a.len(), need: 4 });
    }
    let inv = invert_normal(&normal_matrix(a.rows().iter().map(|r| (r, 1.0))))?;
    Ok(inv.trace().sqrt())
}

/// The weighting objective `trace((AᵀWA)⁻¹)`.
pub fn weighted_dilution(a: &GeometryMatrix, weights: &[f64]) -> Result<f64> {
    Ok(weighted_inverse(a, weights)?.trace())
}

/// Gradient of [`weighted_dilution`] with respect to each weight:
/// `−Σⱼ m_kj²` with `M = A(AᵀWA)⁻¹`.
pub fn weight_gradient(a: &GeometryMatrix, weights: &[f64]) -> Result<Vec<f64>> {
    let p = weighted_inverse(a, weights)?;
    Ok(a.rows()
        .iter()
        .map(|row| {
            let m = p * nalgebra::Vector4::from_column_slice(row);
            -m.norm_squared()
        })
        .collect())
}

/// Weights plus the objective value after every accepted step (the first
/// entry is the uniform-weight objective).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightOptimization {
    pub weights: WeightVector,
    pub objective_history: Vec<f64>,
}

pub fn optimize_weights(a: &GeometryMatrix, config: &SelectionConfig) -> Result<WeightVector> {
    optimize_weights_traced(a, config).map(|o| o.weights)
}

pub fn optimize_weights_traced(a: &GeometryMatrix, config: &SelectionConfig) -> Result<WeightOptimization> {
    config.validate()?;
    let r = a.len();
    if r < 4 {
        return Err(Error::InsufficientMeasurements { got: r, need: 4 });
    }
    let total = r as f64;
    let mut w = vec![1.0; r];
    let mut f = weighted_dilution(a, &w)?;
    let mut history = vec![f];
    let mut step = config.initial_step;

    'outer: for _ in 0..config.max_weight_iterations {
        let grad = weight_gradient(a, &w)?;
        let scale = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        if !(scale > 0.0) {
            break;
        }
        for _ in 0..MAX_STEP_HALVINGS {
            let mut trial: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(wi, gi)| (wi - step * gi / scale).max(0.0))
                .collect();
            let sum: f64 = trial.iter().sum();
            if sum > 0.0 {
                trial.iter_mut().for_each(|t| *t *= total / sum);
                if let Ok(ft) = weighted_dilution(a, &trial) {
                    if ft < f {
                        w = trial;
                        f = ft;
                        history.push(f);
                        continue 'outer;
                    }
                }
            }
            step *= config.step_shrink;
        }
        break;
    }

    Ok(WeightOptimization {
        weights: WeightVector(w),
        objective_history: history,
    })
}

/// Greedy weight-ordered selection: start from the highest-weight
/// satellites (three with altitude aiding, else four) and keep adding the
/// next-highest until the subset GDOP is within the configured gap of the
/// full-set GDOP.
pub fn select_subset(a: &GeometryMatrix, config: &SelectionConfig) -> Result<SelectionResult> {
    config.validate()?;
    let r = a.len();
    let min = config.minimum_satellites();
    if r < min {
        return Err(Error::InsufficientMeasurements { got: r, need: min });
    }
    let augment = |m: GeometryMatrix| -> Result<GeometryMatrix> {
        if config.altitude_aided {
            m.with_altitude_row()
        } else {
            Ok(m)
        }
    };

    let full = augment(a.clone())?;
    let full_gdop = gdop(&full)?;
    let mut weights = optimize_weights(&full, config)?.into_vec();
    weights.truncate(r);

    let order = rank_by_weight(&weights);
    let mut selected: Vec<usize> = order[..min].to_vec();
    let mut pending: VecDeque<usize> = order[min..].iter().copied().collect();

    let rank_of = |idx: &[usize]| -> Result<usize> {
        let m = augment(a.subset(idx)?)?;
        Ok(numerical_rank(&normal_matrix(m.rows().iter().map(|row| (row, 1.0)))))
    };

    loop {
        let degenerate = match gdop(&augment(a.subset(&selected)?)?) {
            Ok(subset_gdop) => {
                let relative_gap = (full_gdop - subset_gdop).abs() / full_gdop;
                if relative_gap < config.gdop_gap_threshold || pending.is_empty() {
                    selected.sort_unstable();
                    return Ok(SelectionResult {
                        selected_indices: selected,
                        full_gdop,
                        subset_gdop,
                        relative_gap,
                        weights,
                    });
                }
                false
            }
            Err(Error::DegenerateGeometry { .. }) => true,
            Err(e) => return Err(e),
        };

        // A degenerate subset skips candidates that add no new direction.
        let mut pick = 0;
        if degenerate {
            let base = rank_of(&selected)?;
            for (k, &c) in pending.iter().enumerate() {
                let mut trial = selected.clone();
                trial.push(c);
                if rank_of(&trial)? > base {
                    pick = k;
                    break;
                }
            }
        }
        match pending.remove(pick) {
            Some(c) => selected.push(c),
            None => {
                return Err(Error::DegenerateGeometry {
                    condition: f64::INFINITY,
                })
            }
        }
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Gauss-Jordan inverse with partial pivoting.
    fn gauss_jordan(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut a = [[0.0; 8]; 4];
        for i in 0..4 {
            a[i][..4].copy_from_slice(&m[i]);
            a[i][4 + i] = 1.0;
        }
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for row in 0..4 {
                if row != col {
                    let f = a[row][col];
                    for k in 0..8 {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
        let mut inv = [[0.0; 4]; 4];
        for i in 0..4 {
            inv[i].copy_from_slice(&a[i][4..]);
        }
        inv
    }

    fn ata(rows: &[[f64; 4]], w: &[f64]) -> [[f64; 4]; 4] {
        let mut n = [[0.0; 4]; 4];
        for (r, wi) in rows.iter().zip(w) {
            for i in 0..4 {
                for j in 0..4 {
                    n[i][j] += wi * r[i] * r[j];
                }
            }
        }
        n
    }

    fn random_geometry(rng: &mut ChaCha8Rng, r: usize) -> GeometryMatrix {
        let dirs: Vec<[f64; 3]> = (0..r)
            .map(|_| {
                let z: f64 = rng.random_range(0.15..1.0);
                let az: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let s = (1.0 - z * z).sqrt();
                [s * az.cos(), s * az.sin(), z]
            })
            .collect();
        GeometryMatrix::from_directions(&dirs).unwrap()
    }

    fn tetrahedron() -> GeometryMatrix {
        GeometryMatrix::from_directions(&[[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
            .unwrap()
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let a = GeometryMatrix::from_directions(&[[0.0, 0.6, 0.8]; 4]).unwrap();
        assert!(matches!(gdop(&a), Err(Error::DegenerateGeometry { .. })));
    }

    #[test]
    fn too_few_rows() {
        let a = GeometryMatrix::from_directions(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(gdop(&a), Err(Error::InsufficientMeasurements { .. })));
    }

    #[test]
    fn zenith_plus_three_horizon_matches_explicit_inverse() {
        let mut dirs = vec![[0.0, 0.0, 1.0]];
        for az in [0.0_f64, 120.0, 240.0] {
            let az = az.to_radians();
            dirs.push([az.sin(), az.cos(), 0.0]);
        }
        let a = GeometryMatrix::from_directions(&dirs).unwrap();
        let inv = gauss_jordan(ata(a.rows(), &[1.0; 4]));
        let oracle = (0..4).map(|i| inv[i][i]).sum::<f64>().sqrt();
        assert_abs_diff_eq!(gdop(&a).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn gdop_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_geometry(&mut rng, 7);
            let (t1, t2): (f64, f64) = (rng.random_range(0.0..6.0), rng.random_range(0.0..6.0));
            let (s1, c1) = t1.sin_cos();
            let (s2, c2) = t2.sin_cos();
            let rows: Vec<[f64; 4]> = a
                .rows()
                .iter()
                .map(|r| {
                    let x = [c1 * r[0] - s1 * r[1], s1 * r[0] + c1 * r[1], r[2]];
                    [x[0], c2 * x[1] - s2 * x[2], s2 * x[1] + c2 * x[2], 1.0]
                })
                .collect();
            let b =
                GeometryMatrix::from_directions(&rows.iter().map(|r| [r[0], r[1], r[2]]).collect::<Vec<_>>()).unwrap();
            assert_abs_diff_eq!(gdop(&a).unwrap(), gdop(&b).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn uniform_weights_reduce_to_gdop_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_geometry(&mut rng, 6);
        let g = gdop(&a).unwrap();
        assert_abs_diff_eq!(weighted_dilution(&a, &[1.0; 6]).unwrap(), g * g, epsilon = 1e-9);
    }

    #[test]
    fn dilution_homogeneous_in_weight_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_geometry(&mut rng, 8);
        let w: Vec<f64> = (0..8).map(|_| rng.random_range(0.2..2.0)).collect();
        let base = weighted_dilution(&a, &w).unwrap();
        for c in [0.1, 3.0, 17.0] {
            let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
            let v = weighted_dilution(&a, &scaled).unwrap();
            assert!((v - base / c).abs() <= 1e-9 * base / c);
        }
    }

    #[test]
    fn weight_length_mismatch() {
        assert!(weighted_dilution(&tetrahedron(), &[1.0; 3]).is_err());
    }

    #[test]
    fn trace_identity_against_explicit_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let r = rng.random_range(4..=10);
            let a = random_geometry(&mut rng, r);
            let w: Vec<f64> = (0..r).map(|_| rng.random_range(0.1..3.0)).collect();
            let p = gauss_jordan(ata(a.rows(), &w));
            let mut sum = 0.0;
            for (row, wi) in a.rows().iter().zip(&w) {
                for j in 0..4 {
                    let m: f64 = (0..4).map(|k| row[k] * p[k][j]).sum();
                    sum += wi * m * m;
                }
            }
            let f = weighted_dilution(&a, &w).unwrap();
            assert!((f - sum).abs() <= 1e-9 * sum, "{f} vs {sum}");
        }
    }

    #[test]
    fn gradient_non_positive_and_symmetric() {
        let g = weight_gradient(&tetrahedron(), &[1.0; 4]).unwrap();
        for gi in &g {
            assert!(*gi <= 0.0);
            assert_abs_diff_eq!(*gi, g[0], epsilon = 1e-9);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 100 {
            let r = rng.random_range(4..=10);
            let a = random_geometry(&mut rng, r);
            let w: Vec<f64> = (0..r).map(|_| rng.random_range(0.5..2.0)).collect();
            let g = weight_gradient(&a, &w).unwrap();
            let f = |wk: &[f64]| weighted_dilution(&a, wk).unwrap();
            // Differences drown in rounding once GDOP is in the hundreds.
            if f(&w) > 1e4 {
                continue;
            }
            checked += 1;
            for k in 0..r {
                let central = |h: f64| {
                    let mut wp = w.clone();
                    let mut wm = w.clone();
                    wp[k] += h;
                    wm[k] -= h;
                    (f(&wp) - f(&wm)) / (2.0 * h)
                };
                let h = 1e-3 * w[k];
                let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
                assert!((fd - g[k]).abs() <= 1e-5 * g[k].abs(), "{fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn tetrahedron_is_a_fixed_point() {
        let w = optimize_weights(&tetrahedron(), &SelectionConfig::default()).unwrap();
        for wi in w.as_slice() {
            assert_abs_diff_eq!(*wi, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn optimisation_descends_and_normalises() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cfg = SelectionConfig {
            max_weight_iterations: 12,
            ..Default::default()
        };
        for _ in 0..50 {
            let r = rng.random_range(4..=10);
            let a = random_geometry(&mut rng, r);
            let o = optimize_weights_traced(&a, &cfg).unwrap();
            for pair in o.objective_history.windows(2) {
                assert!(pair[1] <= pair[0]);
            }
            let sum: f64 = o.weights.as_slice().iter().sum();
            assert_abs_diff_eq!(sum, r as f64, epsilon = 1e-9);
            assert!(o.weights.as_slice().iter().all(|w| *w >= 0.0));
            let uniform = weighted_dilution(&a, &vec![1.0; r]).unwrap();
            assert!(weighted_dilution(&a, o.weights.as_slice()).unwrap() <= uniform + 1e-12);
            WeightVector::new(o.weights.into_vec()).unwrap();
        }
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![1.0, 1.0]).is_ok());
        assert!(WeightVector::new(vec![2.0, 1.0]).is_err());
        assert!(WeightVector::new(vec![-1.0, 3.0]).is_err());
        assert_eq!(WeightVector::new(vec![0.5, 1.5, 1.0]).unwrap().ranking(), vec![1, 2, 0]);
        assert_eq!(WeightVector::uniform(3).ranking(), vec![0, 1, 2]);
    }

    #[test]
    fn config_validation() {
        let bad = SelectionConfig {
            gdop_gap_threshold: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SelectionConfig {
            max_weight_iterations: 0,
            ..Default::default()
        };
        assert!(select_subset(&tetrahedron(), &bad).is_err());
    }

    #[test]
    fn four_satellites_select_all() {
        let s = select_subset(&tetrahedron(), &SelectionConfig::default()).unwrap();
        assert_eq!(s.selected_indices, vec![0, 1, 2, 3]);
        assert_eq!(s.relative_gap, 0.0);
    }

    #[test]
    fn altitude_aided_needs_three_and_a_zenith() {
        let cfg = SelectionConfig {
            altitude_aided: true,
            ..Default::default()
        };
        let a = GeometryMatrix::from_directions(&[[0.0, 0.0, 1.0], [0.9, 0.0, 0.3], [-0.5, 0.8, 0.3]]).unwrap();
        assert!(select_subset(&a, &cfg).is_err());
        let a = a.with_zenith(crate::geo::EcefVector::new(0.0, 0.0, 1.0)).unwrap();
        let s = select_subset(&a, &cfg).unwrap();
        assert_eq!(s.selected_indices, vec![0, 1, 2]);
        assert!(select_subset(&a, &SelectionConfig::default()).is_err());
    }

    #[test]
    fn selection_always_qualifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let r = rng.random_range(4..=12);
            let a = random_geometry(&mut rng, r);
            let s = select_subset(&a, &SelectionConfig::default()).unwrap();
            assert!(s.relative_gap < 0.05);
            assert!(s.selected_indices.len() >= 4);
            assert!(s.selected_indices.iter().all(|&i| i < r));
            let sub = a.subset(&s.selected_indices).unwrap();
            assert_relative_eq!(gdop(&sub).unwrap(), s.subset_gdop, max_relative = 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn prop_permutation_equivariance(seed in any::<u64>(), r in 5usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_geometry(&mut rng, r);
            let mut perm: Vec<usize> = (0..r).collect();
            for i in (1..r).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let b = a.subset(&perm).unwrap();
            let cfg = SelectionConfig::default();
            let sa = select_subset(&a, &cfg).unwrap();
            let sb = select_subset(&b, &cfg).unwrap();
            for (k, &p) in perm.iter().enumerate() {
                prop_assert!((sb.weights[k] - sa.weights[p]).abs() < 1e-9);
            }
            let mut mapped: Vec<usize> = sb.selected_indices.iter().map(|&k| perm[k]).collect();
            mapped.sort_unstable();
            prop_assert_eq!(mapped, sa.selected_indices);
        }

        #[test]
        fn prop_removing_rows_never_improves_gdop(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_geometry(&mut rng, 7);
            let g = gdop(&a).unwrap();
            for mask in 0u32..(1 << 7) {
                if mask.count_ones() < 4 { continue; }
                let idx: Vec<usize> = (0..7).filter(|i| mask & (1 << i) != 0).collect();
                if let Ok(gs) = gdop(&a.subset(&idx).unwrap()) {
                    prop_assert!(gs >= g - 1e-12);
                }
            }
        }
    }
}
