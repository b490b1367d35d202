use gravent_core::entanglement::symplectic_eigenvalues;
use gravent_core::model::initial_covariance;
use gravent_core::propagator::{evolve, propagate, propagate_oracle, Method, PropagatorPlan};
use gravent_core::{Matrix4, SystemParams};
use proptest::prelude::*;

fn params(l1: f64, l2: f64, eta: f64, mu: f64, chi: f64) -> SystemParams {
    SystemParams::new(1.0, l1, l2, eta, mu, chi).unwrap()
}

fn max_rel_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_matches_oracle(
        l1 in -1.5f64..1.5, l2 in -1.5f64..1.5,
        eta in 0.0f64..1e-6, mu in 0.0f64..1e-6, tau in 0.0f64..10.0,
    ) {
        let plan = PropagatorPlan::from_params(&params(l1, l2, eta, mu, 1.0));
        let init = initial_covariance(1.0).unwrap();
        let exact = propagate(&plan, &init, tau).unwrap();
        let oracle = propagate_oracle(&plan.with_method(Method::Oracle), &init, tau).unwrap();
        let d = max_rel_diff(&exact.matrix, &oracle.matrix);
        prop_assert!(d <= 1e-7, "relative difference {d:e}");
    }

    #[test]
    fn semigroup(
        l1 in -1.5f64..1.5, l2 in -1.5f64..1.5,
        eta in 0.0f64..1e-6, mu in 0.0f64..1e-6,
        t1 in 0.0f64..5.0, t2 in 0.0f64..5.0,
    ) {
        let plan = PropagatorPlan::from_params(&params(l1, l2, eta, mu, 1.0));
        let init = initial_covariance(1.0).unwrap();
        let direct = propagate(&plan, &init, t1 + t2).unwrap();
        let mid = propagate(&plan, &init, t1).unwrap();
        let stepped = propagate(&plan, &mid, t1 + t2).unwrap();
        let scale = direct.matrix.amax();
        prop_assert!((direct.matrix - stepped.matrix).amax() <= 1e-9 * scale);
    }

    #[test]
    fn determinant_preserved_without_noise(
        l1 in -1.5f64..1.5, l2 in -1.5f64..1.5,
        eta in 0.0f64..1e-6, chi in 0.5f64..4.0, tau in 0.0f64..6.0,
    ) {
        let plan = PropagatorPlan::from_params(&params(l1, l2, eta, 0.0, chi));
        let init = initial_covariance(chi).unwrap();
        // det through the symplectic spectrum: (nu1 nu2)^2
        let (lo, hi) = symplectic_eigenvalues(&evolve(&plan, &init, tau).unwrap().pulled_back).unwrap();
        let det = (lo * hi).powi(2);
        prop_assert!((det / init.determinant() - 1.0).abs() <= 1e-9);
        let sigma = propagate(&plan, &init, tau.min(3.0)).unwrap();
        prop_assert!((sigma.determinant() / init.determinant() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn noise_only_widens(
        lambda in -1.5f64..1.5, mu in 0.0f64..1e-3, extra in 0.0f64..1e-3, tau in 0.0f64..8.0,
    ) {
        let init = initial_covariance(1.0).unwrap();
        let quiet = propagate(&PropagatorPlan::from_params(&params(lambda, lambda, 0.0, mu, 1.0)), &init, tau).unwrap();
        let noisy = propagate(&PropagatorPlan::from_params(&params(lambda, lambda, 0.0, mu + extra, 1.0)), &init, tau).unwrap();
        for i in 0..4 {
            prop_assert!(noisy.matrix[(i, i)] >= quiet.matrix[(i, i)]);
        }
    }

    #[test]
    fn propagated_states_are_physical(
        l1 in -1.5f64..1.5, l2 in -1.5f64..1.5,
        eta in 0.0f64..1e-6, mu in 0.0f64..1e-6, chi in 0.5f64..4.0, tau in 0.0f64..12.0,
    ) {
        let plan = PropagatorPlan::from_params(&params(l1, l2, eta, mu, chi));
        let ev = evolve(&plan, &initial_covariance(chi).unwrap(), tau).unwrap();
        let (lo, _) = gravent_core::entanglement::evolved_symplectic_eigenvalues(&ev).unwrap();
        prop_assert!(lo >= 0.5 - 1e-9, "nu_min = {lo}");
    }
}

#[test]
fn fixed_time_traces() {
    let init = initial_covariance(1.0).unwrap();
    let inverted = PropagatorPlan::from_params(&params(-1.0, -1.0, 0.0, 0.0, 1.0));
    for tau in [0.5, 3.0, 9.0] {
        let s = propagate(&inverted, &init, tau).unwrap();
        assert!((s.matrix[(0, 0)] / ((2.0 * tau).cosh() / 2.0) - 1.0).abs() < 1e-12);
    }
    let free = PropagatorPlan::from_params(&params(0.0, 0.0, 0.0, 0.0, 1.0));
    let s = propagate(&free, &init, 4.0).unwrap();
    assert!((s.matrix[(0, 0)] - 8.5).abs() < 1e-12);
}
