mod common;

use common::{brute_force_min_qualified, combinations, gdop_oracle, random_geometry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selgps::{gdop, select_subset, GeometryMatrix, SelectionConfig};

#[test]
fn removing_rows_never_improves_gdop() {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    for _ in 0..50 {
        let a = random_geometry(&mut rng, 8);
        let full = gdop(&a).unwrap();
        for k in 4..8 {
            for c in combinations(8, k) {
                if let Ok(g) = gdop(&a.subset(&c).unwrap()) {
                    assert!(g >= full - 1e-12, "{c:?}: {g} < {full}");
                }
            }
        }
    }
}

#[test]
fn greedy_is_within_one_of_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let config = SelectionConfig::default();
    for r in [5, 6, 7, 8] {
        for _ in 0..25 {
            let a = random_geometry(&mut rng, r);
            let s = select_subset(&a, &config).unwrap();
            let best = brute_force_min_qualified(&a, config.gdop_gap_threshold);
            assert!(s.relative_gap < config.gdop_gap_threshold);
            assert!(
                s.selected_indices.len() <= best + 1,
                "greedy {} vs minimum {best}",
                s.selected_indices.len()
            );
        }
    }
}

#[test]
fn duplicated_directions_need_most_of_the_set() {
    // Four satellites each observed twice. The full normal matrix is twice
    // that of one copy, so any four distinct directions sit at a gap of
    // √2 − 1 and no proper subset qualifies.
    let base: [[f64; 3]; 4] = [
        [0.0, 0.0, 1.0],
        [0.94, 0.0, 0.342],
        [-0.47, 0.814, 0.342],
        [-0.47, -0.814, 0.342],
    ];
    let dirs: Vec<[f64; 3]> = base
        .iter()
        .chain(base.iter())
        .map(|d| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            [d[0] / n, d[1] / n, d[2] / n]
        })
        .collect();
    let a = GeometryMatrix::from_directions(&dirs).unwrap();
    let one_copy = a.subset(&[0, 1, 2, 3]).unwrap();
    let gap4 = (gdop_oracle(&one_copy) - gdop_oracle(&a)) / gdop_oracle(&a);
    assert!((gap4 - (2f64.sqrt() - 1.0)).abs() < 1e-12);

    assert_eq!(brute_force_min_qualified(&a, 0.05), 8);
    let s = select_subset(&a, &SelectionConfig::default()).unwrap();
    assert_eq!(s.selected_indices, (0..8).collect::<Vec<_>>());
    assert!(s.relative_gap < 1e-12);
}

#[test]
fn selection_is_permutation_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let config = SelectionConfig::default();
    for _ in 0..30 {
        let a = random_geometry(&mut rng, 7);
        let perm = [3, 6, 0, 5, 1, 4, 2];
        let b = a.subset(&perm).unwrap();
        let sa = select_subset(&a, &config).unwrap();
        let sb = select_subset(&b, &config).unwrap();
        let mut mapped: Vec<usize> = sb.selected_indices.iter().map(|&i| perm[i]).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, sa.selected_indices);
    }
}
