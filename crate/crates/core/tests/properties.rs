//! Property tests for norms, assembly, bounds and the tangent residual.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grid_concentrator::admittance::{
    assemble_admittance, kronecker_sum, lift_real, LineAdmittance, UpsilonConvention,
};
use grid_concentrator::bounds::{
    contingency_factors, contingency_tail_bound, degree_expectation_bound, lcpf_tail_bound,
    ContingencyModel,
};
use grid_concentrator::graph::{sample_er_topology, sample_random_tree, Topology};
use grid_concentrator::lcpf::{flat_start_jacobian, line_space_inverse, schur_inverse};
use grid_concentrator::manifold::{
    distance_bound, norm2, norm_inf, tangent_residual, taylor_residual, DistanceMode,
    ManifoldPoint, TangentStep,
};
use grid_concentrator::spectra::{
    block_diag, hermitian_norm, kron, lambda_min, max_abs_diff, operator_norm,
};

fn connected(n: usize, seed: u64) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = sample_random_tree(n, &mut rng).unwrap();
    let extra = sample_er_topology(n, 0.3, &mut rng).unwrap();
    let mut edges = tree.edges().to_vec();
    edges.extend(extra.edges().iter().copied());
    Topology::new(n, edges).unwrap()
}

fn weight() -> impl Strategy<Value = LineAdmittance> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(g, b)| LineAdmittance::new(g, b))
}

fn network() -> impl Strategy<Value = (Topology, Vec<LineAdmittance>)> {
    (2usize..10, any::<u64>()).prop_flat_map(|(n, seed)| {
        let t = connected(n, seed);
        let m = t.n_edges();
        (Just(t), prop::collection::vec(weight(), m))
    })
}

fn real_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0f64..3.0, rows * cols)
        .prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

fn complex_vec(n: usize, scale: f64) -> impl Strategy<Value = DVector<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
        DVector::from_iterator(n, v.into_iter().map(|(a, b)| Complex64::new(a, b) * scale))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_norm_equals_complex_norm((t, w) in network()) {
        let y = assemble_admittance(&t, &w).unwrap();
        let a = operator_norm(y.matrix()).unwrap();
        let b = operator_norm(&lift_real(&y)).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9 * (1.0 + a));
    }

    #[test]
    fn admittance_rows_sum_to_zero((t, w) in network()) {
        let y = assemble_admittance(&t, &w).unwrap();
        for i in 0..t.n_nodes() {
            let s: Complex64 = y.matrix().row(i).iter().sum();
            prop_assert!(s.norm() < 1e-12);
        }
        prop_assert!(max_abs_diff(y.matrix(), &y.matrix().transpose()) == 0.0);
    }

    #[test]
    fn kronecker_sums_rebuild_lift_and_jacobian((t, w) in network()) {
        let y = assemble_admittance(&t, &w).unwrap();
        let lifted = kronecker_sum(&t, &w, UpsilonConvention::Lifted).unwrap();
        prop_assert!(max_abs_diff(&lifted, &lift_real(&y)) <= 1e-12);
        let f = flat_start_jacobian(&t, &w, false).unwrap();
        let jac = kronecker_sum(&t, &w, UpsilonConvention::Jacobian).unwrap();
        prop_assert!(max_abs_diff(&jac, f.matrix()) <= 1e-12);
    }

    #[test]
    fn kron_norm_is_multiplicative(a in real_matrix(3, 2), b in real_matrix(2, 4)) {
        let lhs = operator_norm(&kron(&a, &b)).unwrap();
        let rhs = operator_norm(&a).unwrap() * operator_norm(&b).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn norm_is_submultiplicative_and_subadditive(
        a in real_matrix(4, 4),
        b in real_matrix(4, 4),
    ) {
        let na = operator_norm(&a).unwrap();
        let nb = operator_norm(&b).unwrap();
        prop_assert!(operator_norm(&(&a * &b)).unwrap() <= na * nb * (1.0 + 1e-12) + 1e-12);
        prop_assert!(operator_norm(&(&a + &b)).unwrap() <= (na + nb) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn block_diagonal_norm_is_max(a in real_matrix(3, 3), b in real_matrix(2, 2)) {
        let d = operator_norm(&block_diag(&a, &b)).unwrap();
        let m = operator_norm(&a).unwrap().max(operator_norm(&b).unwrap());
        assert_abs_diff_eq!(d, m, epsilon = 1e-9 * (1.0 + m));
    }

    #[test]
    fn symmetric_norm_matches_eigen_route(a in real_matrix(5, 5)) {
        let s = (&a + a.transpose()) * 0.5;
        let by_svd = operator_norm(&s).unwrap();
        let by_eig = hermitian_norm(&s).unwrap();
        assert_abs_diff_eq!(by_svd, by_eig, epsilon = 1e-9 * (1.0 + by_svd));
    }

    #[test]
    fn tail_bounds_are_nonincreasing(
        n in 3usize..8,
        p in 0.05f64..0.95,
        t0 in 0.0f64..5.0,
        dt in 0.0f64..5.0,
    ) {
        let model = ContingencyModel::homogeneous(
            Topology::complete(n).unwrap(),
            p,
            Complex64::new(0.6, -0.8),
        ).unwrap();
        let profile = contingency_factors(&model);
        let a = contingency_tail_bound(t0, &profile).unwrap().value;
        let b = contingency_tail_bound(t0 + dt, &profile).unwrap().value;
        prop_assert!(b <= a);
        let la = lcpf_tail_bound(t0, n, 0.1).unwrap().value;
        let lb = lcpf_tail_bound(t0 + dt, n, 0.1).unwrap().value;
        prop_assert!(lb <= la && lb >= 0.0);
    }

    #[test]
    fn degree_bound_is_monotone(n in 2usize..500, dn in 0usize..500, d in 0.0f64..50.0, dd in 0.0f64..50.0) {
        let base = degree_expectation_bound(n, d).unwrap().value;
        prop_assert!(degree_expectation_bound(n + dn, d).unwrap().value >= base);
        prop_assert!(degree_expectation_bound(n, d + dd).unwrap().value >= base);
    }

    #[test]
    fn tree_inverse_routes_agree(
        (t, w) in (2usize..15, any::<u64>()).prop_flat_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = sample_random_tree(n, &mut rng).unwrap().with_reference(0).unwrap();
            let lines = prop::collection::vec(
                (0.1f64..2.0, -2.0f64..-0.1).prop_map(|(g, b)| LineAdmittance::new(g, b)),
                n - 1,
            );
            (Just(t), lines)
        })
    ) {
        let j = flat_start_jacobian(&t, &w, true).unwrap();
        let a = schur_inverse(&j).unwrap();
        let b = line_space_inverse(&t, &w).unwrap();
        let scale = 1.0 + b.r_matrix.amax().max(b.x_matrix.amax());
        prop_assert!(max_abs_diff(&a.r_matrix, &b.r_matrix) <= 1e-9 * scale);
        prop_assert!(max_abs_diff(&a.x_matrix, &b.x_matrix) <= 1e-9 * scale);
    }

    #[test]
    fn residual_matches_taylor_and_obeys_chain(
        ((t, w), u, h) in network().prop_flat_map(|(t, w)| {
            let n = t.n_nodes();
            (Just((t, w)), complex_vec(n, 0.2), complex_vec(n, 0.1))
        })
    ) {
        let n = t.n_nodes();
        let y = assemble_admittance(&t, &w).unwrap();
        let u = u.map(|z| z + Complex64::new(1.0, 0.0));
        let step = TangentStep::new(ManifoldPoint::new(&y, u).unwrap(), h.clone()).unwrap();
        let closed = tangent_residual(&y, &step).unwrap();
        let direct = taylor_residual(&y, &step).unwrap();
        prop_assert!(norm2(&(&closed - &direct)) <= 1e-12 * (1.0 + norm2(&closed)) * n as f64);
        let y_norm = operator_norm(y.matrix()).unwrap();
        prop_assert!(norm2(&closed) <= norm_inf(&h) * y_norm * norm2(&h) * (1.0 + 1e-12) + 1e-15);
        let holder = distance_bound(&h, y_norm, DistanceMode::Holder).unwrap();
        let crude = distance_bound(&h, y_norm, DistanceMode::Crude).unwrap();
        prop_assert!(holder <= crude * (1.0 + 1e-12));
    }

    #[test]
    fn lossless_bound_uses_susceptance_norm((t, w) in network()) {
        let lossless: Vec<_> = w.iter().map(|l| LineAdmittance::new(0.0, l.b)).collect();
        let y = assemble_admittance(&t, &lossless).unwrap();
        let b_norm = operator_norm(&y.susceptance()).unwrap();
        let y_norm = operator_norm(y.matrix()).unwrap();
        assert_abs_diff_eq!(y_norm, b_norm, epsilon = 1e-9 * (1.0 + b_norm));
        let h = DVector::from_element(t.n_nodes(), Complex64::new(0.05, -0.02));
        let general = distance_bound(&h, y_norm, DistanceMode::Holder).unwrap();
        let special = distance_bound(&h, b_norm, DistanceMode::Holder).unwrap();
        prop_assert!(general >= special * (1.0 - 1e-9));
    }

    #[test]
    fn laplacian_is_gram_of_incidence(n in 2usize..12, seed in any::<u64>()) {
        let t = connected(n, seed);
        let a = t.incidence_matrix(false).unwrap();
        let ones = vec![1.0; t.n_edges()];
        prop_assert!(max_abs_diff(&a.gram(&ones).unwrap(), &t.laplacian()) == 0.0);
        let lmin = lambda_min(&t.laplacian()).unwrap();
        prop_assert!(lmin >= -1e-10);
    }
}
