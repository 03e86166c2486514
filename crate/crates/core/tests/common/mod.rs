//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's angle or region code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Angle between vectors via nalgebra's `angle`.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    DVector::from_column_slice(a).angle(&DVector::from_column_slice(b))
}

/// `arccos(s d1/L) + arccos(s d2/L) - angle(x - x1, x2 - x)`, or `None`
/// outside the balls or at a minimizer.
pub fn slack_oracle(x1: &[f64], x2: &[f64], s1: f64, s2: f64, l: f64, x: &[f64]) -> Option<f64> {
    let u1 = sub(x, x1);
    let neg_u2 = sub(x2, x);
    let (d1, d2) = (norm(&u1), norm(&neg_u2));
    if d1 < 1e-12 || d2 < 1e-12 || s1 * d1 > l || s2 * d2 > l {
        return None;
    }
    Some((s1 * d1 / l).acos() + (s2 * d2 / l).acos() - angle(&u1, &neg_u2))
}

/// Smallest eigenvalue by nalgebra's symmetric eigensolver.
pub fn lambda_min_na(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.symmetric_eigen().eigenvalues.min()
}

/// Random orthogonal matrix (rows) from nalgebra's QR.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    (0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect()
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Reference configuration used throughout: constants 1.5, 1 and bound 10.
pub const REF: (f64, f64, f64) = (1.5, 1.0, 10.0);

/// Regime cutoffs `(L/2s1, L/2s2, (L/2)(1/s1 + 1/s2))` for `s1 >= s2`.
pub fn cutoffs(s1: f64, s2: f64, l: f64) -> (f64, f64, f64) {
    (l / (2.0 * s1), l / (2.0 * s2), l / 2.0 * (1.0 / s1 + 1.0 / s2))
}

/// Random sorted constants and bound, with a clear gap between the two
/// constants.
pub fn random_constants<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
    let s2 = rng.gen_range(0.3..3.0);
    let s1 = s2 * rng.gen_range(1.2..4.0);
    let l = rng.gen_range(1.0..20.0);
    (s1, s2, l)
}

/// Half-distance strictly inside `(lo, hi)`, away from both ends.
pub fn inside<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    rng.gen_range(lo + 0.02 * w..hi - 0.02 * w)
}

/// Uniform point in the intersection of the two closed balls, canonical
/// planar coordinates.
pub fn sample_lens<R: Rng>(rng: &mut R, r: f64, s1: f64, s2: f64, l: f64) -> [f64; 2] {
    let (r1, r2) = (l / s1, l / s2);
    let lo = (-r - r1).max(r - r2);
    let hi = (-r + r1).min(r + r2);
    let h = r1.min(r2);
    loop {
        let p = [rng.gen_range(lo..hi), rng.gen_range(-h..h)];
        if (p[0] + r).hypot(p[1]) <= r1 && (p[0] - r).hypot(p[1]) <= r2 {
            return p;
        }
    }
}
