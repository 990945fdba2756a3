use approx::assert_relative_eq;
use greedy_widths_core::geometry::john_ellipsoid;
use greedy_widths_core::greedy::{replay_verify, run_greedy};
use greedy_widths_core::sampling::{gaussian_vector, rng};
use greedy_widths_core::subspaces::{dist_to_subspace, Subspace};
use greedy_widths_core::verify::dalpha_points;
use greedy_widths_core::{CompactSet, NormedSpace, Vector};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(1.0),
        Just(1.5),
        Just(2.0),
        Just(3.0),
        Just(f64::INFINITY)
    ]
}

fn cloud(seed: u64, count: usize, dim: usize) -> Vec<Vector> {
    let mut r = rng(seed);
    (0..count).map(|_| gaussian_vector(&mut r, dim)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn greedy_errors_start_at_the_largest_norm_and_decrease(seed in any::<u64>(), p in exponent()) {
        let points = cloud(seed, 12, 4);
        let space = NormedSpace::lp(4, p).unwrap();
        let largest = points.iter().map(|x| space.norm(x).unwrap()).fold(0.0, f64::max);
        let set = CompactSet::point_cloud(points).unwrap();
        let trace = run_greedy(&set, &space, 4).unwrap();
        prop_assert!((trace.sigmas[0] - largest).abs() <= 1e-12 * largest);
        for w in trace.sigmas.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9));
        }
        let replay = replay_verify(&trace, &set).unwrap();
        prop_assert!(replay.pass, "max violation {}", replay.max_violation);
    }

    #[test]
    fn distance_certificates_are_norming_annihilators(seed in any::<u64>(), p in exponent()) {
        let vs = cloud(seed, 3, 5);
        let space = NormedSpace::lp(5, p).unwrap();
        let v = Subspace::from_vectors(&vs[..2], space.clone()).unwrap();
        let f = vs[2].clone();
        let d = dist_to_subspace(&f, &v).unwrap();
        let residual = &f - d.approximant(&v);
        prop_assert!((space.norm(&residual).unwrap() - d.value).abs() <= 1e-8 * d.value.max(1.0));
        let b = d.certificate.expect("f is not in V");
        prop_assert!((space.dual_norm(&b).unwrap() - 1.0).abs() <= 1e-6);
        prop_assert!((b.dot(&f) - d.value).abs() <= 1e-6 * d.value.max(1.0));
        for x in &vs[..2] {
            prop_assert!(b.dot(x).abs() <= 1e-6 * x.norm());
        }
    }

    #[test]
    fn john_sandwich_certificates_hold(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(f64::INFINITY)]) {
        let vs = cloud(seed, 2, 4);
        let space = NormedSpace::lp(4, p).unwrap();
        let v = Subspace::from_vectors(&vs, space.clone()).unwrap();
        let s = john_ellipsoid(&v, 500, seed).unwrap();
        prop_assert!(s.lambda >= 1.0 - 1e-9 && s.lambda <= 2f64.sqrt() + 1e-9);
        for c in &s.inner_certificates {
            prop_assert!(space.norm(&(v.orthonormal() * c)).unwrap() <= 1.0 + 1e-7);
        }
        for c in &s.outer_certificates {
            prop_assert!(s.gauge(c) <= s.lambda + 1e-7);
        }
    }
}

#[test]
fn scaled_basis_errors_are_the_scales() {
    for (alpha, p) in [(0.5, 1.0), (1.0, 3.0), (2.0, f64::INFINITY)] {
        let set = CompactSet::point_cloud(dalpha_points(alpha, 10)).unwrap();
        let trace = run_greedy(&set, &NormedSpace::lp(10, p).unwrap(), 10).unwrap();
        for (n, s) in trace.sigmas.iter().enumerate() {
            assert_relative_eq!(*s, ((n + 1) as f64).powf(-alpha), max_relative = 1e-12);
        }
    }
}
