//! Seeded test instances shared by the suites and the acceptance harness.

use greedy_widths_core::linalg::{self, Matrix, Vector};
use greedy_widths_core::sampling::{gaussian_vector, rng};
use greedy_widths_core::verify::{dalpha_points, ImageSet};
use greedy_widths_core::{CompactSet, NormedSpace, OperatorBall, Result};

pub fn unit(m: usize, i: usize) -> Vector {
    let mut u = Vector::zeros(m);
    u[i] = 1.0;
    u
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut g = rng(seed);
    let columns: Vec<Vector> = (0..cols).map(|_| gaussian_vector(&mut g, rows)).collect();
    linalg::from_columns(&columns, rows)
}

/// Haar-distributed orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(m: usize, seed: u64) -> Matrix {
    gaussian_matrix(m, m, seed).qr().q()
}

/// diag((k+1)^{−α}).
pub fn diagonal_operator(alpha: f64, m: usize) -> Matrix {
    Matrix::from_diagonal(&Vector::from_fn(m, |k, _| ((k + 1) as f64).powf(-alpha)))
}

/// The diagonal operator ℓ₂^m → ℓ_q^m with the canonical basis as lifts.
pub fn diagonal_image(alpha: f64, q: f64, m: usize) -> Result<ImageSet> {
    ImageSet::new(
        diagonal_operator(alpha, m),
        NormedSpace::euclidean(m)?,
        NormedSpace::lp(m, q)?,
        (0..m).map(|k| unit(m, k)).collect(),
    )
}

/// A Gaussian operator ℓ₂^m → ℓ₂^m with its sampled unit ball.
pub fn gaussian_ball(m: usize, sphere_samples: usize, seed: u64) -> Result<OperatorBall> {
    match CompactSet::operator_ball(
        gaussian_matrix(m, m, seed),
        NormedSpace::euclidean(m)?,
        sphere_samples,
        seed,
    )? {
        CompactSet::OperatorBall(ball) => Ok(ball),
        CompactSet::PointCloud(_) => unreachable!("operator_ball builds an operator ball"),
    }
}

pub fn gaussian_image(m: usize, sphere_samples: usize, seed: u64) -> Result<ImageSet> {
    ImageSet::from_ball(
        &gaussian_ball(m, sphere_samples, seed)?,
        NormedSpace::euclidean(m)?,
    )
}

/// The scaled canonical basis in a random orthonormal frame.
pub fn rotated_scaled_basis(alpha: f64, m: usize, seed: u64) -> Vec<Vector> {
    let q = random_orthogonal(m, seed);
    dalpha_points(alpha, m).iter().map(|p| &q * p).collect()
}

/// Random unit combinations with coordinate decay (i+1)^{−s}, in a random frame.
pub fn rotated_decay(m: usize, count: usize, s: f64, seed: u64) -> Vec<Vector> {
    let q = random_orthogonal(m, seed);
    let mut g = rng(seed.wrapping_add(1));
    (0..count)
        .map(|_| {
            let c = gaussian_vector(&mut g, m);
            let c = &c / c.norm();
            &q * Vector::from_fn(m, |i, _| c[i] * ((i + 1) as f64).powf(-s))
        })
        .collect()
}

/// Points on an ellipse inside a two-dimensional subspace of ℝ^m.
pub fn planar_ellipse(m: usize, count: usize) -> Vec<Vector> {
    let mut a = Vector::zeros(m);
    let mut b = Vector::zeros(m);
    a[0] = 1.0;
    a[1] = 0.5;
    b[1] = 0.3;
    b[2.min(m - 1)] = 0.2;
    (0..count)
        .map(|i| {
            let t = i as f64 * 0.5;
            &a * t.cos() + &b * t.sin()
        })
        .collect()
}

/// A square operator whose dimension cycles through `min_dim..=max_dim`.
pub fn cycled_dim(index: usize, min_dim: usize, max_dim: usize) -> usize {
    min_dim + index % (max_dim - min_dim + 1)
}
