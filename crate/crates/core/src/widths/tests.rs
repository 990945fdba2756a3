use super::*;
use crate::sampling::{gaussian_vector, rng};
use crate::spaces::CompactSet;
use approx::assert_relative_eq;
use std::vec;
use std::vec::Vec;

fn lp(m: usize, p: f64) -> NormedSpace {
    NormedSpace::lp(m, p).unwrap()
}

fn random_matrix(seed: u64, rows: usize, cols: usize) -> Matrix {
    let mut g = rng(seed);
    Matrix::from_fn(rows, cols, |_, _| gaussian_vector(&mut g, 1)[0])
}

fn diagonal_points(alpha: f64, m: usize) -> Vec<Vector> {
    (0..m)
        .map(|j| {
            let mut e = Vector::zeros(m);
            e[j] = ((j + 1) as f64).powf(-alpha);
            e
        })
        .collect()
}

#[test]
fn operator_norm_of_diagonal_and_identity() {
    let t = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 1.0]));
    let est = operator_norm(&t, &lp(2, 2.0), &lp(2, 2.0)).unwrap();
    assert_relative_eq!(est.value, 3.0, epsilon = 1e-14);
    assert_eq!(est.kind, EstimateKind::Exact);
    let est = operator_norm(&Matrix::identity(2, 2), &lp(2, 2.0), &lp(2, 2.0)).unwrap();
    assert_relative_eq!(est.value, 1.0, epsilon = 1e-14);
}

#[test]
fn operator_norm_from_linf_matches_sign_enumeration() {
    let t = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let mut oracle: f64 = 0.0;
    for s0 in [-1.0, 1.0] {
        for s1 in [-1.0, 1.0] {
            let y = [s0 + s1, s0 - s1];
            oracle = oracle.max(y[0].abs() + y[1].abs());
        }
    }
    let est = operator_norm(&t, &lp(2, f64::INFINITY), &lp(2, 1.0)).unwrap();
    assert_relative_eq!(est.value, oracle, epsilon = 1e-14);
    assert_relative_eq!(est.value, 2.0, epsilon = 1e-14);
    assert_eq!(est.kind, EstimateKind::Exact);
}

#[test]
fn operator_norm_from_linf_enumerates_larger_cubes() {
    let t = random_matrix(3, 4, 7);
    let target = lp(4, 3.0);
    let est = operator_norm(&t, &lp(7, f64::INFINITY), &target).unwrap();
    let mut oracle: f64 = 0.0;
    for bits in 0..(1u32 << 7) {
        let x = Vector::from_fn(7, |i, _| if bits >> i & 1 == 1 { -1.0 } else { 1.0 });
        oracle = oracle.max(target.norm(&(&t * x)).unwrap());
    }
    assert_relative_eq!(est.value, oracle, max_relative = 1e-12);
}

#[test]
fn heuristic_norm_stays_between_sampled_lower_and_comparison_upper() {
    let t = random_matrix(11, 5, 5);
    let (domain, target) = (lp(5, 3.0), lp(5, 1.5));
    let est = operator_norm(&t, &domain, &target).unwrap();
    assert_eq!(est.kind, EstimateKind::Heuristic);
    let (upper, kind) = operator_norm_upper(&t, &domain, &target).unwrap();
    assert_eq!(kind, EstimateKind::Upper);
    assert!(est.value <= upper * (1.0 + 1e-12));
    let mut g = rng(5);
    for _ in 0..2000 {
        let x = domain.normalize(&gaussian_vector(&mut g, 5));
        assert!(target.norm(&(&t * x)).unwrap() <= est.value * (1.0 + 1e-9));
    }
}

#[test]
fn polyhedral_norms_are_exact() {
    let t = random_matrix(8, 3, 4);
    let from_l1 = operator_norm(&t, &lp(4, 1.0), &lp(3, 2.0)).unwrap();
    let cols = (0..4).map(|j| t.column(j).norm()).fold(0.0, f64::max);
    assert_relative_eq!(from_l1.value, cols, epsilon = 1e-14);
    let to_linf = operator_norm(&t, &lp(4, 2.0), &lp(3, f64::INFINITY)).unwrap();
    let rows = (0..3).map(|i| t.row(i).norm()).fold(0.0, f64::max);
    assert_relative_eq!(to_linf.value, rows, epsilon = 1e-14);
}

#[test]
fn hilbert_widths_of_diagonal() {
    let t = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 2.0, 1.0]));
    let values: Vec<f64> = hilbert_widths(&t).iter().map(|e| e.value).collect();
    assert_eq!(values, vec![4.0, 2.0, 1.0, 0.0]);
    assert!(hilbert_widths(&Matrix::zeros(3, 3))
        .iter()
        .all(|e| e.value == 0.0));
}

#[test]
fn hilbert_width_product_equals_determinant() {
    for seed in 0..20 {
        let t = random_matrix(seed, 6, 6);
        let product: f64 = hilbert_widths(&t).iter().take(6).map(|e| e.value).product();
        let det = t.clone().lu().determinant().abs();
        assert_relative_eq!(product, det, max_relative = 1e-8);
    }
}

#[test]
fn hilbert_widths_are_multiplicative() {
    for seed in 0..10 {
        let a = random_matrix(100 + seed, 5, 5);
        let t = random_matrix(200 + seed, 5, 5);
        let b = random_matrix(300 + seed, 5, 5);
        let (da, dt, db) = (hilbert_widths(&a), hilbert_widths(&t), hilbert_widths(&b));
        let dbta = hilbert_widths(&(&b * &t * &a));
        for i in 0..=5 {
            for j in 0..=5 - i {
                for k in 0..=5 - i - j {
                    assert!(
                        dbta[i + j + k].value <= db[i].value * dt[j].value * da[k].value + 1e-8
                    );
                }
            }
        }
    }
}

#[test]
fn diagonal_bound_dominates_sampled_tails() {
    let est = diagonal_width_upper(1.0, 4.0, 3, 16).unwrap();
    assert_relative_eq!(est.value, 0.25, epsilon = 1e-15);
    assert_eq!(
        (est.kind, est.method),
        (EstimateKind::Upper, WidthMethod::CoordinateSubspace)
    );
    let tail_space = lp(13, 4.0);
    let mut g = rng(17);
    for _ in 0..5000 {
        let x = gaussian_vector(&mut g, 16);
        let x = &x / x.norm();
        let tail = Vector::from_fn(13, |i, _| x[i + 3] / (i + 4) as f64);
        assert!(tail_space.norm(&tail).unwrap() <= 0.25 + 1e-15);
    }
    assert_relative_eq!(diagonal_width_upper(0.5, 3.0, 0, 4).unwrap().value, 1.0);
}

#[test]
fn diagonal_bound_rejects_bad_parameters() {
    assert!(matches!(
        diagonal_width_upper(1.0, 2.0, 1, 4),
        Err(Error::Config(_))
    ));
    assert!(diagonal_width_upper(1.0, 3.0, 4, 4).is_err());
}

#[test]
fn diagonal_bound_dominates_minimax() {
    let points = diagonal_points(1.0, 64);
    let space = lp(64, 4.0);
    let bound = diagonal_width_upper(1.0, 4.0, 8, 64).unwrap();
    let est = alternating_minimax(&points, &space, 8, 1, 3).unwrap();
    assert!(
        est.value <= bound.value + 1e-12,
        "{} > {}",
        est.value,
        bound.value
    );
}

#[test]
fn gelfand_equals_kolmogorov_in_hilbert_spaces() {
    let t = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0]));
    let opts = WidthOptions::default();
    for n in 0..=2 {
        let k = kolmogorov_width(&t, &lp(2, 2.0), &lp(2, 2.0), n, &opts).unwrap();
        let g = gelfand_width(&t, &lp(2, 2.0), &lp(2, 2.0), n, &opts).unwrap();
        assert_relative_eq!(k.value, g.value, epsilon = 1e-14);
        assert_eq!(g.method, WidthMethod::Duality);
    }
    let t = random_matrix(4, 5, 3);
    let s = linalg::singular_values(&t);
    for (n, &sn) in s.iter().enumerate().take(3) {
        let g = gelfand_width(&t, &lp(3, 2.0), &lp(5, 2.0), n, &opts).unwrap();
        assert_relative_eq!(g.value, sn, max_relative = 1e-12);
        assert_eq!(g.kind, EstimateKind::Exact);
    }
}

#[test]
fn gelfand_width_of_identity_agrees_with_transpose_by_brute_force() {
    let steps = 2000;
    let angle = |i: usize| core::f64::consts::PI * i as f64 / steps as f64;
    // d¹(I: ℓ_∞² → ℓ₂²): minimize over lines L in the domain the largest ‖x‖₂ on L ∩ B_∞.
    let gelfand = (0..steps)
        .map(|i| {
            let (s, c) = angle(i).sin_cos();
            1.0 / c.abs().max(s.abs())
        })
        .fold(f64::INFINITY, f64::min);
    // d₁(I: ℓ₂² → ℓ₁²): minimize over lines u the largest ℓ₁ distance from the unit circle.
    let circle: Vec<(f64, f64)> = (0..400)
        .map(|i| angle(i * 5))
        .map(|t| (t.cos(), t.sin()))
        .collect();
    let kolmogorov = (0..steps / 10)
        .map(|i| {
            let (us, uc) = angle(i * 10).sin_cos();
            circle
                .iter()
                .map(|&(x0, x1)| {
                    // min over t of |x0 − t uc| + |x1 − t us| is attained at a breakpoint.
                    let mut best = f64::INFINITY;
                    for t in [x0 / uc, x1 / us] {
                        if t.is_finite() {
                            best = best.min((x0 - t * uc).abs() + (x1 - t * us).abs());
                        }
                    }
                    best
                })
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    assert_relative_eq!(gelfand, 1.0, epsilon = 1e-9);
    assert_relative_eq!(kolmogorov, gelfand, epsilon = 1e-3);
    let est = gelfand_width(
        &Matrix::identity(2, 2),
        &lp(2, f64::INFINITY),
        &lp(2, 2.0),
        1,
        &WidthOptions::default(),
    )
    .unwrap();
    assert!(est.kind.is_upper());
    assert!(est.value >= gelfand - 1e-9);
}

#[test]
fn brute_force_symmetric_pair() {
    let points = vec![
        Vector::from_vec(vec![1.0, 0.0]),
        Vector::from_vec(vec![0.0, 1.0]),
    ];
    let est = brute_force_width(&points, &lp(2, 2.0), 1, &BruteForceGrid::default()).unwrap();
    assert_relative_eq!(est.value, core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-6);
    assert_eq!(est.kind, EstimateKind::Exact);
    let d0 = brute_force_width(&points, &lp(2, 2.0), 0, &BruteForceGrid::default()).unwrap();
    assert_eq!(d0.value, 1.0);
    let d2 = brute_force_width(&points, &lp(2, 2.0), 2, &BruteForceGrid::default()).unwrap();
    assert_eq!(d2.value, 0.0);
}

#[test]
fn brute_force_matches_a_line_search_oracle_in_l1() {
    let points = vec![
        Vector::from_vec(vec![1.0, 0.2, -0.3]),
        Vector::from_vec(vec![0.1, 0.9, 0.4]),
        Vector::from_vec(vec![-0.5, 0.3, 1.0]),
    ];
    let space = lp(3, 1.0);
    let est = brute_force_width(&points, &space, 2, &BruteForceGrid::default()).unwrap();
    // Planes are kernels of functionals a on the sphere; ℓ₁ distance to ker a is |⟨a,f⟩|/‖a‖_∞.
    let mut oracle = f64::INFINITY;
    let k = 400;
    for i in 0..k {
        for j in 0..k {
            let th = core::f64::consts::PI * i as f64 / k as f64;
            let ph = core::f64::consts::PI * j as f64 / k as f64;
            let a = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let worst = points
                .iter()
                .map(|f| (a[0] * f[0] + a[1] * f[1] + a[2] * f[2]).abs() / amax)
                .fold(0.0, f64::max);
            oracle = oracle.min(worst);
        }
    }
    assert!(est.value <= oracle + 1e-9, "{} vs {}", est.value, oracle);
    assert!(est.value >= oracle - 1e-2, "{} vs {}", est.value, oracle);
}

#[test]
fn brute_force_rejects_large_problems() {
    let points = vec![Vector::zeros(5)];
    assert!(matches!(
        brute_force_width(&points, &lp(5, 2.0), 1, &BruteForceGrid::default()),
        Err(Error::Regime(_))
    ));
}

#[test]
fn minimax_is_near_hilbert_width_on_operator_balls() {
    for seed in 0..3 {
        let t = random_matrix(40 + seed, 4, 4);
        let domain = lp(4, 2.0);
        let set = CompactSet::operator_ball(t.clone(), domain, 256, seed).unwrap();
        let points = set.materialize().unwrap();
        let s = linalg::singular_values(&t);
        for (n, &sn) in s.iter().enumerate().take(3).skip(1) {
            let est = alternating_minimax(&points, &lp(4, 2.0), n, 2, seed).unwrap();
            assert_eq!(est.kind, EstimateKind::Upper);
            assert!(est.value <= sn * 1.05, "n={n}: {} vs {sn}", est.value);
        }
    }
}

#[test]
fn minimax_zero_index_is_max_norm() {
    let points = diagonal_points(0.5, 6);
    let est = alternating_minimax(&points, &lp(6, 3.0), 0, 2, 1).unwrap();
    assert_eq!(est.value, 1.0);
}

#[test]
fn minimax_beats_coordinate_bound_on_diagonal_example() {
    let points = diagonal_points(1.0, 64);
    let space = lp(64, 4.0);
    let coord = coordinate_subspace_width(&points, &space, 4).unwrap();
    assert_relative_eq!(coord.value, 0.2, epsilon = 1e-12);
    let est = alternating_minimax(&points, &space, 4, 2, 9).unwrap();
    assert!(est.value <= 0.2 * 1.05);
}

#[test]
fn minimax_is_deterministic() {
    let points = diagonal_points(1.5, 12);
    let space = lp(12, 3.0);
    let a = minimax_subspace(&points, &space, 3, 3, 42).unwrap();
    let b = minimax_subspace(&points, &space, 3, 3, 42).unwrap();
    assert_eq!(a.1, b.1);
    assert_eq!(a.0.basis(), b.0.basis());
}

#[test]
fn kolmogorov_sequences_are_monotone() {
    let t = random_matrix(21, 4, 4);
    for (dp, tp) in [(1.0, 3.0), (f64::INFINITY, 1.5), (2.0, 4.0), (2.0, 2.0)] {
        let est =
            kolmogorov_widths(&t, &lp(4, dp), &lp(4, tp), 0..=4, &WidthOptions::default()).unwrap();
        for w in est.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-10, "{dp}->{tp}: {:?}", est);
        }
        assert_eq!(est[4].value, 0.0);
    }
}

#[test]
fn kolmogorov_width_from_l1_is_bounded_by_column_brute_force() {
    let t = random_matrix(5, 3, 3);
    let target = lp(3, 3.0);
    let cols = linalg::columns(&t);
    let brute = brute_force_width(&cols, &target, 1, &BruteForceGrid::default()).unwrap();
    let est = kolmogorov_width(&t, &lp(3, 1.0), &target, 1, &WidthOptions::default()).unwrap();
    assert!(est.value <= brute.value + 1e-12);
    assert!(est.kind.is_upper());
}
