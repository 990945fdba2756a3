use super::*;
use crate::sampling::{gaussian_vector, rng};
use approx::assert_relative_eq;

fn full_space(m: usize, p: f64) -> Subspace {
    Subspace::new(Matrix::identity(m, m), NormedSpace::lp(m, p).unwrap()).unwrap()
}

fn random_subspace(m: usize, k: usize, p: f64, seed: u64) -> Subspace {
    let mut g = rng(seed);
    let cols: Vec<Vector> = (0..k).map(|_| gaussian_vector(&mut g, m)).collect();
    let basis = linalg::from_columns(&cols, m);
    Subspace::new(basis, NormedSpace::lp(m, p).unwrap()).unwrap()
}

#[test]
fn euclidean_section_is_its_own_ellipsoid() {
    let v = random_subspace(8, 3, 2.0, 1);
    let s = john_ellipsoid(&v, 64, 0).unwrap();
    assert_eq!(s.lambda, 1.0);
    assert_eq!(s.lambda_kind, EstimateKind::Exact);
    assert_relative_eq!(s.ellipsoid, Matrix::identity(3, 3), epsilon = 1e-12);
}

#[test]
fn square_and_diamond_have_ratio_root_two() {
    for p in [1.0, f64::INFINITY] {
        let s = john_ellipsoid(&full_space(2, p), 64, 0).unwrap();
        assert_eq!(s.lambda_kind, EstimateKind::Exact);
        assert_relative_eq!(s.lambda, 2f64.sqrt(), epsilon = 1e-6);
    }
}

#[test]
fn symmetric_lp_ball_contains_a_round_ellipsoid() {
    // The cube group forces E to be a multiple of I; the inscribed ball touches
    // at the coordinate axes for p ≥ 2 and the diagonals for p < 2.
    for (p, k) in [(4.0, 3usize), (1.5, 3), (3.0, 2)] {
        let s = john_ellipsoid(&full_space(k, p), 256, 3).unwrap();
        let kf = k as f64;
        let expected = kf.powf((0.5 - 1.0 / p).abs());
        // Sampled polar bodies resolve the ellipsoid to a few parts per thousand.
        assert!(
            s.lambda <= expected * (1.0 + 5e-3),
            "p = {p}: {} > {expected}",
            s.lambda
        );
        assert!(
            s.lambda >= expected * (1.0 - 5e-3),
            "p = {p}: {} < {expected}",
            s.lambda
        );
        let scale = s.ellipsoid[(0, 0)];
        assert_relative_eq!(
            s.ellipsoid,
            Matrix::identity(k, k) * scale,
            epsilon = 1e-2 * scale
        );
    }
}

#[test]
fn hexagonal_section_of_the_cube() {
    // {x ∈ ℓ_∞³ : x₁ + x₂ + x₃ = 0} is a regular hexagon: λ = circumradius / inradius.
    let basis = linalg::from_columns(
        &[
            Vector::from_column_slice(&[1.0, -1.0, 0.0]),
            Vector::from_column_slice(&[1.0, 1.0, -2.0]),
        ],
        3,
    );
    let v = Subspace::new(basis, NormedSpace::lp(3, f64::INFINITY).unwrap()).unwrap();
    let s = john_ellipsoid(&v, 64, 0).unwrap();
    assert_eq!(s.lambda_kind, EstimateKind::Exact);
    assert_relative_eq!(s.lambda, 2.0 / 3f64.sqrt(), epsilon = 1e-6);
    // Three vertex pairs, one representative each.
    assert_eq!(s.outer_certificates.len(), 3);
}

#[test]
fn sandwich_holds_on_dense_samples() {
    for (i, p) in [1.0, 1.5, 4.0, f64::INFINITY].into_iter().enumerate() {
        let v = random_subspace(8, 3, p, 10 + i as u64);
        let s = john_ellipsoid(&v, 512, 5).unwrap();
        let mut g = rng(99);
        let mut worst_ratio: f64 = 0.0;
        for _ in 0..4000 {
            let c = gaussian_vector(&mut g, 3);
            let x = s.section_norm(&c);
            let e = s.gauge(&c);
            assert!(
                x <= e * (1.0 + 1e-6),
                "p = {p}: inner containment {x} > {e}"
            );
            worst_ratio = worst_ratio.max(e / x);
        }
        assert!(
            worst_ratio <= s.lambda * (1.0 + 1e-6),
            "p = {p}: {worst_ratio} > λ = {}",
            s.lambda
        );
        assert!(s.lambda <= 3f64.sqrt() * (1.0 + 1e-6));
        for c in &s.inner_certificates {
            assert!(s.section_norm(c) <= 1.0 + 1e-6);
        }
    }
}

#[test]
fn tilted_norm_brackets_the_section_norm() {
    let v = random_subspace(6, 2, 3.0, 4);
    let s = john_ellipsoid(&v, 256, 1).unwrap();
    let t = tilted_norm(&v, &s).unwrap();
    assert!(t.lambda >= s.lambda);
    let mut g = rng(7);
    for _ in 0..1000 {
        let c = gaussian_vector(&mut g, 2);
        let x = s.section_norm(&c);
        let e = t.space.norm(&c).unwrap();
        assert!(x <= e * (1.0 + 1e-7));
        assert!(e <= t.lambda * x * (1.0 + 1e-7));
    }
}

#[test]
fn tilted_norm_rejects_a_foreign_sandwich() {
    let a = random_subspace(6, 2, 3.0, 4);
    let b = random_subspace(6, 2, 3.0, 5);
    let s = john_ellipsoid(&a, 64, 1).unwrap();
    assert!(matches!(tilted_norm(&b, &s), Err(Error::Sandwich(_))));
}

#[test]
fn gamma_table_values() {
    let lp = |p: f64| GammaSpaceKind::Lp(LpExponent::new(p).unwrap());
    assert_eq!(gamma_table(GammaSpaceKind::Hilbert, 16), 1.0);
    assert_relative_eq!(gamma_table(lp(4.0), 16), 2.0, epsilon = 1e-12);
    assert_relative_eq!(gamma_table(lp(1.0), 16), 4.0, epsilon = 1e-12);
    assert_relative_eq!(
        gamma_table(GammaSpaceKind::Generic, 9),
        3.0,
        epsilon = 1e-12
    );
    assert_eq!(
        GammaSpaceKind::of(&NormedSpace::lp(3, 2.0).unwrap()),
        GammaSpaceKind::Hilbert
    );
}
