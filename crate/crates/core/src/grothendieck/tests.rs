use super::*;
use crate::greedy::{run_greedy, run_greedy_on_points, GreedyOptions};
use crate::sampling::{gaussian_vector, rng};
use crate::spaces::CompactSet;
use approx::assert_relative_eq;

fn lp(m: usize, p: f64) -> NormedSpace {
    NormedSpace::lp(m, p).unwrap()
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut g = rng(seed);
    let v = gaussian_vector(&mut g, rows * cols);
    Matrix::from_column_slice(rows, cols, v.as_slice())
}

fn dalpha_points(alpha: f64, m: usize) -> Vec<Vector> {
    (0..m)
        .map(|k| {
            let mut u = Vector::zeros(m);
            u[k] = ((k + 1) as f64).powf(-alpha);
            u
        })
        .collect()
}

fn assert_witness_replays(
    t: &Matrix,
    d: &NormedSpace,
    tg: &NormedSpace,
    est: &GrothendieckEstimate,
) {
    let dual = tg.dual();
    for x in &est.witness_x {
        assert!(d.norm(x).unwrap() <= 1.0 + 1e-9);
    }
    for b in &est.witness_b {
        assert!(dual.norm(b).unwrap() <= 1.0 + 1e-9);
    }
    assert_relative_eq!(
        witness_value(t, &est.witness_x, &est.witness_b),
        est.value,
        max_relative = 1e-9
    );
}

#[test]
fn identity_has_unit_gamma() {
    let e = lp(4, 2.0);
    for n in 1..=4 {
        let g = gamma_n(&Matrix::identity(4, 4), &e, &e, n, 100, 0).unwrap();
        assert_relative_eq!(g.value, 1.0, epsilon = 1e-12);
        assert_eq!(g.kind, EstimateKind::Exact);
    }
}

#[test]
fn diagonal_gamma_is_the_root_of_the_singular_value_product() {
    let e = lp(2, 2.0);
    let t = Matrix::from_diagonal(&Vector::from_column_slice(&[2.0, 1.0]));
    let g = gamma_n(&t, &e, &e, 2, 100, 0).unwrap();
    assert_relative_eq!(g.value, 2f64.sqrt(), epsilon = 1e-12);
    assert_witness_replays(&t, &e, &e, &g);
}

#[test]
fn cube_identity_matches_sign_pattern_enumeration() {
    // x_i range over (±1, ±1); b_j over ±e_1, ±e_2, and choosing b = (e_1, e_2)
    // loses nothing since signs and order only flip the determinant.
    let mut oracle: f64 = 0.0;
    for bits in 0..16u32 {
        let s = |i: u32| if bits >> i & 1 == 1 { -1.0 } else { 1.0 };
        let det = s(0) * s(3) - s(1) * s(2);
        oracle = oracle.max(det.abs());
    }
    let inf = lp(2, f64::INFINITY);
    let g = gamma_n(&Matrix::identity(2, 2), &inf, &inf, 2, 100, 0).unwrap();
    assert_eq!(g.kind, EstimateKind::Exact);
    assert_relative_eq!(g.value, oracle.sqrt(), epsilon = 1e-12);
    assert_witness_replays(&Matrix::identity(2, 2), &inf, &inf, &g);
}

#[test]
fn hilbert_gamma_power_is_the_eigenvalue_product() {
    for seed in 0..20 {
        let rows = 2 + seed as usize % 7;
        let cols = 2 + (seed as usize * 3) % 7;
        let t = random_matrix(rows, cols, seed);
        let (d, tg) = (lp(cols, 2.0), lp(rows, 2.0));
        let mut eig: Vec<f64> = (t.transpose() * &t)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        for n in 1..=rows.min(cols) {
            let g = gamma_n(&t, &d, &tg, n, 10, 0).unwrap();
            let product: f64 = eig[..n].iter().map(|l| l.sqrt()).product();
            assert_relative_eq!(g.value.powi(n as i32), product, max_relative = 1e-8);
            assert_witness_replays(&t, &d, &tg, &g);
        }
    }
}

#[test]
fn contractions_do_not_raise_hilbert_gamma() {
    let t = random_matrix(5, 5, 3);
    let mut u = random_matrix(5, 5, 4);
    u /= linalg::singular_values(&u)[0];
    let e = lp(5, 2.0);
    for n in 1..=5 {
        let a = gamma_n(&(&u * &t), &e, &e, n, 10, 0).unwrap();
        let b = gamma_n(&t, &e, &e, n, 10, 0).unwrap();
        assert!(a.value <= b.value * (1.0 + 1e-10));
    }
}

#[test]
fn lp_identities_respect_the_model_bound() {
    for (m, p) in [
        (3, 1.0),
        (3, f64::INFINITY),
        (3, 3.0),
        (2, 1.5),
        (4, f64::INFINITY),
    ] {
        let s = lp(m, p);
        let id = Matrix::identity(m, m);
        for n in 1..=m.min(3) {
            let g = gamma_n(&id, &s, &s, n, 300, 11).unwrap();
            let bound = gamma_n_of_space(&s, n).value;
            assert!(
                g.value <= bound * (1.0 + 1e-6),
                "p = {p}, n = {n}: {} > {bound}",
                g.value
            );
            assert!(g.value >= 1.0 - 1e-9);
            assert_witness_replays(&id, &s, &s, &g);
        }
    }
}

#[test]
fn gamma_rejects_out_of_range_n() {
    let e = lp(2, 2.0);
    assert!(matches!(
        gamma_n(&Matrix::identity(2, 2), &e, &e, 0, 1, 0),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        gamma_n(&Matrix::identity(2, 2), &e, &e, 3, 1, 0),
        Err(Error::Config(_))
    ));
}

#[test]
fn lemma_one_is_an_equality_for_euclidean_diagonals() {
    let t = Matrix::from_diagonal(&Vector::from_column_slice(&[4.0, 2.0, 1.0]));
    let e = lp(3, 2.0);
    let r = verify_lemma1(&t, &e, &e, 2, &WidthOptions::default()).unwrap();
    assert_relative_eq!(r.kolmogorov.lhs, 8f64.sqrt(), max_relative = 1e-12);
    assert_relative_eq!(r.kolmogorov.rhs, 8f64.sqrt(), max_relative = 1e-12);
    assert_relative_eq!(r.gelfand.lhs, 8f64.sqrt(), max_relative = 1e-12);
    assert!(r.kolmogorov.pass && r.gelfand.pass);
}

#[test]
fn lemma_one_chain_on_random_operators() {
    let t = random_matrix(6, 6, 21);
    let e = lp(6, 2.0);
    for n in 1..=6 {
        let r = verify_lemma1(&t, &e, &e, n, &WidthOptions::default()).unwrap();
        assert!(r.kolmogorov.pass);
        assert_relative_eq!(r.kolmogorov.lhs, r.kolmogorov.rhs, max_relative = 1e-8);
    }
}

#[test]
fn two_summing_ratio_examples() {
    let e = lp(2, 2.0);
    let id = Matrix::identity(2, 2);
    let basis = [
        Vector::from_column_slice(&[1.0, 0.0]),
        Vector::from_column_slice(&[0.0, 1.0]),
    ];
    assert_relative_eq!(
        two_summing_ratio(&id, &e, &e, &basis[..1]).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    assert_relative_eq!(
        two_summing_ratio(&id, &e, &e, &basis).unwrap(),
        2f64.sqrt(),
        epsilon = 1e-12
    );
    let lower = two_summing_lower(&id, &e, &e, 8, 0).unwrap();
    assert!(lower.value >= 2f64.sqrt() - 1e-12);
    let replay = two_summing_ratio(&id, &e, &e, &lower.family).unwrap();
    assert_relative_eq!(replay, lower.value, max_relative = 1e-9);
}

#[test]
fn two_summing_bounds_bracket_each_other() {
    for (seed, p) in [(1, 1.0), (2, 3.0), (3, f64::INFINITY)] {
        let t = random_matrix(3, 4, seed);
        let (d, tg) = (lp(4, p), lp(3, 2.0));
        let lower = two_summing_lower(&t, &d, &tg, 16, seed).unwrap();
        let upper = two_summing_upper(&t, &d, &tg).unwrap();
        assert!(
            lower.value <= upper.value * (1.0 + 1e-9),
            "p = {p}: {} > {}",
            lower.value,
            upper.value
        );
    }
}

#[test]
fn lemma_two_holds_for_euclidean_identity() {
    let e = lp(3, 2.0);
    let (r, g) = verify_lemma2(&Matrix::identity(3, 3), &e, &e, 3, 0).unwrap();
    assert_relative_eq!(g.value, 1.0, epsilon = 1e-12);
    // π₂(I) ≤ √3 and the right side is e·3^{−1/2}·√3.
    assert_relative_eq!(r.rhs, core::f64::consts::E, max_relative = 1e-12);
    assert!(r.pass);
    assert_eq!(r.outcome, crate::verify::Outcome::Consistent);
}

#[test]
fn greedy_operators_of_the_scaled_basis() {
    let alpha = 0.5;
    let m = 6;
    let x = lp(m, 4.0);
    let points = dalpha_points(alpha, m);
    let trace = run_greedy_on_points(&points, &x, &GreedyOptions::new(m)).unwrap();
    let t = Matrix::from_diagonal(&Vector::from_fn(m, |k, _| ((k + 1) as f64).powf(-alpha)));
    let lifts: Vec<Vector> = trace
        .selected_indices
        .iter()
        .map(|&i| {
            let mut u = Vector::zeros(m);
            u[i] = 1.0;
            u
        })
        .collect();
    let ops = build_a_b(&trace, &t, &lp(m, 2.0), &lifts).unwrap();
    let bta = ops.compose(&t);
    for j in 0..m {
        assert_relative_eq!(bta[(j, j)], ((j + 1) as f64).powf(-alpha), epsilon = 1e-12);
        for k in 0..j {
            assert!(bta[(j, k)].abs() < 1e-12);
        }
    }
    let pairing = pairing_matrix(&trace).unwrap();
    assert_relative_eq!(pairing, bta.transpose(), epsilon = 1e-12);
    assert!(linalg::singular_values(&ops.a)[0] <= 1.0 + 1e-12);
}

#[test]
fn certificate_operator_is_two_summing_below_root_n() {
    for (seed, p) in [(5, 1.0), (6, 2.0), (7, f64::INFINITY), (8, 3.0)] {
        let m = 5;
        let points: Vec<Vector> = {
            let mut g = rng(seed);
            (0..40).map(|_| gaussian_vector(&mut g, m)).collect()
        };
        let x = lp(m, p);
        let trace = run_greedy_on_points(&points, &x, &GreedyOptions::new(3)).unwrap();
        let b = linalg::from_columns(trace.certificates.as_ref().unwrap(), m).transpose();
        let lower = two_summing_lower(&b, &x, &lp(3, 2.0), 16, seed).unwrap();
        assert!(
            lower.value <= 3f64.sqrt() + 1e-8,
            "p = {p}: {}",
            lower.value
        );
        let upper = two_summing_upper(&b, &x, &lp(3, 2.0)).unwrap();
        assert!(upper.value <= 3f64.sqrt() + 1e-8);
    }
}

#[test]
fn euclidean_greedy_composition_is_triangular() {
    let t = random_matrix(4, 4, 9);
    let e = lp(4, 2.0);
    let set = CompactSet::operator_ball(t.clone(), e.clone(), 64, 1).unwrap();
    let trace = run_greedy(&set, &e, 2).unwrap();
    let CompactSet::OperatorBall(ball) = &set else {
        unreachable!()
    };
    let ops = build_a_b(&trace, &t, &e, &sample_lifts(ball, &trace)).unwrap();
    let bta = ops.compose(&t);
    assert!(bta[(1, 0)].abs() < 1e-8);
    assert_relative_eq!(bta[(0, 0)], trace.sigmas[0], max_relative = 1e-12);
    assert_relative_eq!(bta[(1, 1)], trace.sigmas[1], max_relative = 1e-9);
}

#[test]
fn build_rejects_bad_inputs() {
    let m = 3;
    let x = lp(m, 2.0);
    let points = dalpha_points(1.0, m);
    let mut trace = run_greedy_on_points(&points, &x, &GreedyOptions::new(1)).unwrap();
    let t = Matrix::from_diagonal(&Vector::from_fn(m, |k, _| ((k + 1) as f64).recip()));
    let e0 = Vector::from_column_slice(&[1.0, 0.0, 0.0]);
    assert!(matches!(
        build_a_b(&trace, &t, &x, &[&e0 * 2.0]),
        Err(Error::Lift(_))
    ));
    assert!(matches!(
        build_a_b(
            &trace,
            &t,
            &x,
            &[Vector::from_column_slice(&[0.0, 1.0, 0.0])]
        ),
        Err(Error::Lift(_))
    ));
    let single = build_a_b(&trace, &t, &x, core::slice::from_ref(&e0)).unwrap();
    assert_relative_eq!(single.compose(&t)[(0, 0)], trace.sigmas[0], epsilon = 1e-12);
    trace.certificates = None;
    assert!(matches!(
        build_a_b(&trace, &t, &x, &[e0]),
        Err(Error::MissingCertificate(_))
    ));
}

#[test]
fn orthonormal_lifts() {
    let e6 = lp(6, 2.0);
    // A diagonal operator lifts to canonical vectors.
    let d = Matrix::from_diagonal(&Vector::from_fn(6, |k, _| ((k + 1) as f64).powf(-1.0)));
    let set = CompactSet::operator_ball(d.clone(), e6.clone(), 64, 0).unwrap();
    let trace = run_greedy(&set, &lp(6, 4.0), 4).unwrap();
    let lifts = orthonormal_lift(&d, &trace, 1e-8).unwrap();
    for (k, e) in lifts.iter().enumerate() {
        assert_relative_eq!(e[k].abs(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.norm(), 1.0, epsilon = 1e-12);
    }
    // An orthogonal operator lifts by its transpose.
    let q = random_matrix(6, 6, 2).qr().q();
    let set = CompactSet::operator_ball(q.clone(), e6.clone(), 64, 0).unwrap();
    let trace = run_greedy(&set, &e6, 3).unwrap();
    let lifts = orthonormal_lift(&q, &trace, 1e-8).unwrap();
    for (e, f) in lifts.iter().zip(&trace.selected) {
        assert_relative_eq!(e, &(q.transpose() * f), epsilon = 1e-10);
    }
    // A generic injective operator still yields an orthonormal system.
    let t = random_matrix(6, 6, 12);
    let set = CompactSet::operator_ball(t.clone(), e6.clone(), 64, 0).unwrap();
    let trace = run_greedy(&set, &e6, 3).unwrap();
    let lifts = orthonormal_lift(&t, &trace, 1e-6).unwrap();
    assert!(linalg::gram_deviation(&lifts) < 1e-6);
}

#[test]
fn lift_audit_flags_sampled_maximizers() {
    // Into ℓ_1 the exact maximizers are not in the sample, so the audit fails.
    let t = random_matrix(4, 4, 13);
    let set = CompactSet::operator_ball(t.clone(), lp(4, 2.0), 64, 0).unwrap();
    let trace = run_greedy(&set, &lp(4, 1.0), 3).unwrap();
    assert!(matches!(
        orthonormal_lift(&t, &trace, 1e-8),
        Err(Error::Lift(_))
    ));
}
