//! Exact covariance propagation.
//!
//! With `W(t) = e^{K t}` the covariance obeys
//! `sigma(t) = W (sigma(0) + N(t)) W^T`, where
//! `N(t) = int_0^t e^{-K s} D e^{-K^T s} ds`. Both exponentials are computed
//! by scaling and squaring; `N` comes from one 8x8 block exponential.
//! [`propagate_oracle`] integrates `d sigma/dt = K sigma + sigma K^T + D`
//! directly and exists only to check the exact route.

mod oracle;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

pub use oracle::{noise_integral_quadrature, propagate_oracle};

use crate::error::{Error, Result};
use crate::linalg::{self, check_overflow, symmetrize};
use crate::model::{self, CovarianceState, SystemParams};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Matrix exponential plus block-exponential noise integral.
    Exact,
    /// Adaptive Runge-Kutta integration of the Lyapunov ODE.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorPlan {
    pub drift: Matrix4<f64>,
    pub diffusion: Matrix4<f64>,
    pub method: Method,
    pub tolerance: f64,
}

impl PropagatorPlan {
    pub fn new(drift: Matrix4<f64>, diffusion: Matrix4<f64>) -> Self {
        Self {
            drift,
            diffusion,
            method: Method::Exact,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Plan on the dimensionless clock `tau = omega t`: `K / omega`, `D / omega`.
    pub fn from_params(params: &SystemParams) -> Self {
        let scale = 1.0 / params.omega;
        Self::new(model::drift_matrix(params) * scale, model::noise_matrix(params) * scale)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1e-3) {
            return Err(Error::invalid("tolerance", format!("must lie in (0, 1e-3], got {tolerance}")));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    fn check(&self, initial: &CovarianceState, tau: f64) -> Result<f64> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(Error::invalid("tolerance", format!("must lie in (0, 1e-3], got {}", self.tolerance)));
        }
        if self.drift.iter().chain(self.diffusion.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("plan", "drift and diffusion must be finite"));
        }
        if !tau.is_finite() || tau < initial.time {
            return Err(Error::invalid(
                "tau",
                format!("target time {tau} precedes the initial time {}", initial.time),
            ));
        }
        Ok(tau - initial.time)
    }
}

/// A propagated state together with the factors it was built from.
///
/// Keeping `W` and `Q = sigma(t0) + N` around lets symplectic invariants be
/// evaluated without forming the ill-conditioned product `W Q W^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub drift: Matrix4<f64>,
    /// `tau - t0`
    pub elapsed: f64,
    /// `W = e^{K elapsed}`
    pub transfer: Matrix4<f64>,
    /// `Q = sigma(t0) + N(elapsed)`, symmetric positive definite.
    pub pulled_back: Matrix4<f64>,
    pub state: CovarianceState,
}

impl Evolution {
    /// `W^T G W`, accurate when `K^T G + G K` is small.
    pub fn transported_form(&self, form: &Matrix4<f64>) -> Result<Matrix4<f64>> {
        let b = linalg::transported_form(&self.drift, form, self.elapsed)?;
        check_overflow(&b, self.state.time)?;
        Ok(b)
    }
}

pub fn matrix_exponential(m: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    linalg::expm(m)
}

/// `int_0^tau e^{-K s} D e^{-K^T s} ds`.
pub fn noise_integral(drift: &Matrix4<f64>, diffusion: &Matrix4<f64>, tau: f64) -> Result<Matrix4<f64>> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid("tau", format!("must be finite and >= 0, got {tau}")));
    }
    let n = linalg::van_loan_noise(drift, diffusion, tau).map_err(|e| with_tau(e, tau))?;
    if n.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence {
            what: "noise integral",
            detail: format!("non-finite block exponential at tau = {tau}"),
        });
    }
    check_overflow(&n, tau)?;
    Ok(symmetrize(&n))
}

fn with_tau(e: Error, tau: f64) -> Error {
    match e {
        Error::Overflow { .. } => Error::Overflow { tau },
        other => other,
    }
}

/// Exact propagation keeping the factored form.
pub fn evolve(plan: &PropagatorPlan, initial: &CovarianceState, tau: f64) -> Result<Evolution> {
    let elapsed = plan.check(initial, tau)?;
    let transfer = linalg::expm(&(plan.drift * elapsed)).map_err(|e| with_tau(e, tau))?;
    check_overflow(&transfer, tau)?;
    let noise = noise_integral(&plan.drift, &plan.diffusion, elapsed).map_err(|e| with_tau(e, tau))?;
    let pulled_back = symmetrize(&(initial.matrix + noise));
    let sigma = transfer * pulled_back * transfer.transpose();
    check_overflow(&sigma, tau)?;
    Ok(Evolution {
        drift: plan.drift,
        elapsed,
        transfer,
        pulled_back,
        state: CovarianceState::symmetrized(tau, sigma),
    })
}

/// Covariance at `tau`, by the plan's method. Output is symmetrised.
pub fn propagate(plan: &PropagatorPlan, initial: &CovarianceState, tau: f64) -> Result<CovarianceState> {
    match plan.method {
        Method::Exact => evolve(plan, initial, tau).map(|e| e.state),
        Method::Oracle => propagate_oracle(plan, initial, tau),
    }
}

/// Evolves `params` from its initial state to `tau`.
pub fn evolve_params(params: &SystemParams, tau: f64) -> Result<Evolution> {
    let initial = model::initial_covariance(params.chi)?;
    evolve(&PropagatorPlan::from_params(params), &initial, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::initial_covariance;

    fn plan(l1: f64, l2: f64, eta: f64, mu: f64) -> PropagatorPlan {
        PropagatorPlan::from_params(&SystemParams::new(1.0, l1, l2, eta, mu, 1.0).unwrap())
    }

    #[test]
    fn harmonic_ground_state_is_stationary() {
        let s0 = initial_covariance(1.0).unwrap();
        for tau in [0.3, 2.0, 17.0] {
            let s = propagate(&plan(1.0, 1.0, 0.0, 0.0), &s0, tau).unwrap();
            assert!((s.matrix - s0.matrix).amax() < 1e-14, "tau {tau}");
            assert_eq!(s.time, tau);
        }
    }

    #[test]
    fn inverted_spreads_as_cosh() {
        let s0 = initial_covariance(1.0).unwrap();
        for tau in [0.5, 3.0, 9.0] {
            let s = propagate(&plan(-1.0, -1.0, 0.0, 0.0), &s0, tau).unwrap();
            let expected = (2.0 * tau).cosh() / 2.0;
            assert!((s.matrix[(0, 0)] / expected - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn free_particle_spreading() {
        let s0 = initial_covariance(1.0).unwrap();
        for tau in [0.5, 3.0, 40.0] {
            let s = propagate(&plan(0.0, 0.0, 0.0, 0.0), &s0, tau).unwrap();
            let expected = (1.0 + tau * tau) / 2.0;
            assert!((s.matrix[(0, 0)] / expected - 1.0).abs() < 1e-13);
            assert!((s.matrix[(0, 1)] - tau / 2.0).abs() < 1e-13 * tau);
        }
    }

    #[test]
    fn harmonic_period_identity() {
        let k = plan(1.0, 1.0, 0.0, 0.0).drift;
        let w = matrix_exponential(&(k * (2.0 * std::f64::consts::PI))).unwrap();
        assert!((w - Matrix4::identity()).amax() < 1e-9);
    }

    #[test]
    fn noise_integral_trivial_cases() {
        let p = plan(-0.4, 0.8, 1e-3, 0.0);
        assert_eq!(noise_integral(&p.drift, &p.diffusion, 3.0).unwrap(), Matrix4::zeros());

        let d = model::noise_matrix(&SystemParams::new(1.0, 0.0, 0.0, 0.0, 2e-3, 1.0).unwrap());
        let n = noise_integral(&Matrix4::zeros(), &d, 2.5).unwrap();
        assert!((n - d * 2.5).amax() < 1e-18);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = plan(1.0, 1.0, 0.0, 0.0);
        let s0 = CovarianceState::symmetrized(2.0, Matrix4::identity() * 0.5);
        assert!(propagate(&p, &s0, 1.0).is_err());
        assert!(p.with_tolerance(0.0).is_err());
        assert!(p.with_tolerance(1e-2).is_err());
        assert!(p.with_tolerance(1e-6).is_ok());
    }

    #[test]
    fn overflow_reports_tau() {
        let s0 = initial_covariance(1.0).unwrap();
        match propagate(&plan(-1.0, -1.0, 0.0, 0.0), &s0, 400.0) {
            Err(Error::Overflow { tau }) => assert_eq!(tau, 400.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
