//! Partial transpose, symplectic eigenvalues and logarithmic negativity of
//! two-mode Gaussian states.
//!
//! Symplectic eigenvalues of a positive definite `sigma = L L^T` are the
//! singular values of the antisymmetric matrix `L^T Omega L` (each appears
//! twice). This is the primary route: its absolute error is a few ulps of
//! `|sigma|`, so `1/2 - nu` stays resolved down to ~1e-16 where the closed
//! form `(Sigma - sqrt(Sigma^2 - 4 det))/2` loses everything to
//! cancellation. The closed form is kept as an independent check.

use nalgebra::{Cholesky, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::antisymmetrize;
use crate::model::{partial_transpose_operator, symplectic_form, CovarianceState, SystemParams};
use crate::propagator::{self, Evolution};

/// Slack for negative discriminants in the closed form.
pub const DISCRIMINANT_CLAMP: f64 = 1e-12;

const PRODUCT_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    /// Smallest symplectic eigenvalue of the partially transposed state.
    pub nu_min: f64,
    /// `max(0, -log2(2 nu_min))`
    pub log_negativity: f64,
    pub entangled: bool,
}

impl NegativityResult {
    pub fn from_nu_min(nu_min: f64) -> Self {
        let log_negativity = (-(2.0 * nu_min).log2()).max(0.0);
        Self {
            nu_min,
            log_negativity,
            entangled: log_negativity > 0.0,
        }
    }
}

/// `Lambda sigma Lambda` with `Lambda = diag(1, 1, 1, -1)`.
pub fn partial_transpose(state: &CovarianceState) -> CovarianceState {
    let lambda = partial_transpose_operator();
    CovarianceState {
        time: state.time,
        matrix: lambda * state.matrix * lambda,
    }
}

/// `Lambda Omega Lambda`: the symplectic form seen by a partially transposed state.
pub fn transposed_symplectic_form() -> Matrix4<f64> {
    let lambda = partial_transpose_operator();
    lambda * symplectic_form() * lambda
}

fn cholesky_factor(m: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("non-finite covariance entry".into()));
    }
    Cholesky::new(*m)
        .map(|c| c.l())
        .ok_or_else(|| Error::InvalidState("covariance is not positive definite".into()))
}

/// Symplectic eigenvalues `(nu_min, nu_max)` of `W Q W^T` given `Q` and the
/// transported form `W^T Omega' W`.
fn spectrum_from_factors(q: &Matrix4<f64>, form: &Matrix4<f64>) -> Result<(f64, f64)> {
    let l = cholesky_factor(q)?;
    let a = antisymmetrize(&(l.transpose() * form * l));
    let mut sv: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    Ok((0.5 * (sv[0] + sv[1]), 0.5 * (sv[2] + sv[3])))
}

/// Symplectic eigenvalues `(nu_min, nu_max)` of a covariance matrix.
pub fn symplectic_eigenvalues(m: &Matrix4<f64>) -> Result<(f64, f64)> {
    spectrum_from_factors(m, &symplectic_form())
}

/// Smallest symplectic eigenvalue of `state` as given. Pass the partially
/// transposed covariance to obtain `nu~_min`.
pub fn min_symplectic_eigenvalue(state: &CovarianceState) -> Result<f64> {
    symplectic_eigenvalues(&state.matrix).map(|(lo, _)| lo)
}

fn det2(m: &Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Closed-form `nu_min = sqrt((S - sqrt(S^2 - 4 det)) / 2)` with the
/// seralian `S = det s1 + det s2 + 2 det s3` of the matrix given.
///
/// For a partially transposed state this equals the familiar
/// `det s1 + det s2 - 2 det s3` written with the blocks of the original
/// covariance.
pub fn min_symplectic_eigenvalue_closed_form(state: &CovarianceState) -> Result<f64> {
    let seralian = det2(&state.block(0, 0)) + det2(&state.block(1, 1)) + 2.0 * det2(&state.block(0, 1));
    let det = state.determinant();
    let scale = seralian * seralian;
    let mut disc = seralian * seralian - 4.0 * det;
    if disc < -DISCRIMINANT_CLAMP * scale.max(1.0) {
        return Err(Error::InvalidState(format!("negative discriminant {disc:e}")));
    }
    disc = disc.max(0.0);
    let inner = 0.5 * (seralian - disc.sqrt());
    if inner < -DISCRIMINANT_CLAMP * seralian.abs().max(1.0) {
        return Err(Error::InvalidState(format!("negative squared eigenvalue {inner:e}")));
    }
    Ok(inner.max(0.0).sqrt())
}

/// Product states: the partial transpose acts locally, so the spectrum is
/// the local one. Rounding below 1/2 of a physical mode is clamped away.
fn product_result(state: &CovarianceState) -> Option<NegativityResult> {
    if state.block(0, 1).iter().any(|&v| v != 0.0) {
        return None;
    }
    let local = det2(&state.block(0, 0)).min(det2(&state.block(1, 1)));
    if !(local > 0.0) {
        return None;
    }
    let nu = local.sqrt();
    (nu >= 0.5 - PRODUCT_ROUNDING).then(|| NegativityResult::from_nu_min(nu.max(0.5)))
}

/// Logarithmic negativity of an ordinary (not transposed) covariance.
/// States without inter-mode correlations return exactly zero.
pub fn log_negativity(state: &CovarianceState) -> Result<NegativityResult> {
    if let Some(r) = product_result(state) {
        return Ok(r);
    }
    min_symplectic_eigenvalue(&partial_transpose(state)).map(NegativityResult::from_nu_min)
}

/// Same quantity through the closed form; loses accuracy near `nu = 1/2`.
pub fn log_negativity_closed_form(state: &CovarianceState) -> Result<NegativityResult> {
    min_symplectic_eigenvalue_closed_form(&partial_transpose(state)).map(NegativityResult::from_nu_min)
}

/// Symplectic eigenvalues of an evolved state from its factors.
pub fn evolved_symplectic_eigenvalues(ev: &Evolution) -> Result<(f64, f64)> {
    let form = ev.transported_form(&symplectic_form())?;
    spectrum_from_factors(&ev.pulled_back, &form)
}

/// Logarithmic negativity of an evolved state, computed without forming
/// `W Q W^T`. Stays accurate when the covariance entries are ~1e11 and
/// larger, as they are for inverted potentials at `tau` of order 10.
pub fn evolved_negativity(ev: &Evolution) -> Result<NegativityResult> {
    if let Some(r) = product_result(&ev.state) {
        return Ok(r);
    }
    let form = ev.transported_form(&transposed_symplectic_form())?;
    spectrum_from_factors(&ev.pulled_back, &form).map(|(lo, _)| NegativityResult::from_nu_min(lo))
}

/// Negativity of the system released from its initial state, at `tau`.
pub fn negativity_at(params: &SystemParams, tau: f64) -> Result<NegativityResult> {
    evolved_negativity(&propagator::evolve_params(params, tau)?)
}
