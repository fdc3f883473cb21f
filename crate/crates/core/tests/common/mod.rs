//! Independent oracles shared by the integration and acceptance tests. None
//! of these call into the algorithms they check.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use selgps::{gdop, GeometryMatrix};

/// Unit directions spread over the sky above `min_elev_deg`.
pub fn random_directions<R: Rng>(rng: &mut R, r: usize, min_elev_deg: f64) -> Vec<[f64; 3]> {
    let s_min = min_elev_deg.to_radians().sin();
    (0..r)
        .map(|_| {
            let up: f64 = rng.random_range(s_min..1.0);
            let az: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let h = (1.0 - up * up).sqrt();
            [h * az.sin(), h * az.cos(), up]
        })
        .collect()
}

/// Random geometry whose normal matrix is comfortably invertible.
pub fn random_geometry<R: Rng>(rng: &mut R, r: usize) -> GeometryMatrix {
    loop {
        let a = GeometryMatrix::from_directions(&random_directions(rng, r, 5.0)).unwrap();
        if gdop(&a).is_ok_and(|g| g < 50.0) {
            return a;
        }
    }
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        for j in 0..n {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                for j in 0..n {
                    m[i][j] -= f * m[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

/// `(AᵀWA)` assembled element by element.
pub fn weighted_normal(a: &GeometryMatrix, w: &[f64]) -> Vec<Vec<f64>> {
    let mut n = vec![vec![0.0; 4]; 4];
    for (row, wi) in a.rows().iter().zip(w) {
        for i in 0..4 {
            for j in 0..4 {
                n[i][j] += wi * row[i] * row[j];
            }
        }
    }
    n
}

/// `Σᵢⱼ wᵢ mᵢⱼ²` with `M = A(AᵀWA)⁻¹`.
pub fn trace_by_m(a: &GeometryMatrix, w: &[f64]) -> f64 {
    let p = invert(weighted_normal(a, w));
    let mut total = 0.0;
    for (row, wi) in a.rows().iter().zip(w) {
        for j in 0..4 {
            let m: f64 = (0..4).map(|k| row[k] * p[k][j]).sum();
            total += wi * m * m;
        }
    }
    total
}

/// GDOP from the Gauss-Jordan inverse.
pub fn gdop_oracle(a: &GeometryMatrix) -> f64 {
    let p = invert(weighted_normal(a, &vec![1.0; a.len()]));
    (0..4).map(|i| p[i][i]).sum::<f64>().sqrt()
}

/// Every `k`-subset of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Smallest subset size whose GDOP is within `threshold` of the full set,
/// by exhaustive enumeration.
pub fn brute_force_min_qualified(a: &GeometryMatrix, threshold: f64) -> usize {
    let full = gdop_oracle(a);
    for k in 4..=a.len() {
        for c in combinations(a.len(), k) {
            let sub = a.subset(&c).unwrap();
            let g = gdop_oracle(&sub);
            if g.is_finite() && (g - full).abs() / full < threshold {
                return k;
            }
        }
    }
    a.len()
}

/// Satellite whose removal raises GDOP the most.
pub fn leave_one_out_most_valuable(a: &GeometryMatrix) -> usize {
    (0..a.len())
        .map(|drop| {
            let keep: Vec<usize> = (0..a.len()).filter(|&i| i != drop).collect();
            (drop, gdop_oracle(&a.subset(&keep).unwrap()))
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
        .0
}
