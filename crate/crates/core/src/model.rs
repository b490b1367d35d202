//! Parameters of the two-oscillator system and the matrices of its linear
//! Langevin equation `du/dt = K u + l(t)`, with `u = (X1, P1, X2, P2)`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};

/// Coupling or noise strengths at or above this are outside the range where
/// the first-order formulas of [`crate::analytic`] apply.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// Dimensionless model of two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Frequency scale, rad/s.
    pub omega: f64,
    /// Spring constants `k_i / (m omega^2)`; `+1` harmonic, `0` free, `-1` inverted.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Gravitational coupling `2 G m / (omega^2 d^3)`.
    pub eta: f64,
    /// White force-noise strength.
    pub mu: f64,
    /// Initial trap depth `omega_in / omega`.
    pub chi: f64,
}

impl SystemParams {
    pub fn new(omega: f64, lambda1: f64, lambda2: f64, eta: f64, mu: f64, chi: f64) -> Result<Self> {
        let p = Self {
            omega,
            lambda1,
            lambda2,
            eta,
            mu,
            chi,
        };
        p.validate()?;
        Ok(p)
    }

    /// Identical oscillators (`lambda1 = lambda2 = lambda`) released from the
    /// ground state of the frequency-`omega` trap.
    pub fn symmetric(omega: f64, lambda: f64, eta: f64, mu: f64) -> Result<Self> {
        Self::new(omega, lambda, lambda, eta, mu, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("omega", self.omega)?;
        require_finite("lambda1", self.lambda1)?;
        require_finite("lambda2", self.lambda2)?;
        require_non_negative("eta", self.eta)?;
        require_non_negative("mu", self.mu)?;
        require_positive("chi", self.chi)?;
        Ok(())
    }

    /// True when `eta` or `mu` is large enough that first-order results are
    /// not trustworthy. This is a flag, not an error.
    pub fn outside_perturbative_regime(&self) -> bool {
        self.eta >= PERTURBATIVE_LIMIT || self.mu >= PERTURBATIVE_LIMIT
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.eta >= PERTURBATIVE_LIMIT {
            out.push(format!("eta = {} is not << 1; perturbative formulas unreliable", self.eta));
        }
        if self.mu >= PERTURBATIVE_LIMIT {
            out.push(format!("mu = {} is not << 1; perturbative formulas unreliable", self.mu));
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda1 == self.lambda2
    }

    pub fn drift(&self) -> Matrix4<f64> {
        drift_matrix(self)
    }

    pub fn diffusion(&self) -> Matrix4<f64> {
        noise_matrix(self)
    }

    /// Converts a dimensionless time to seconds.
    pub fn seconds(&self, tau: f64) -> f64 {
        tau / self.omega
    }

    /// Converts seconds to dimensionless time.
    pub fn tau(&self, seconds: f64) -> f64 {
        seconds * self.omega
    }
}

/// Dimensional description of two identical oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// kg
    pub mass: f64,
    /// Centre-to-centre distance, m.
    pub separation: f64,
    /// rad/s
    pub omega: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, separation: f64, omega: f64) -> Result<Self> {
        require_positive("mass", mass)?;
        require_positive("separation", separation)?;
        require_positive("omega", omega)?;
        Ok(Self {
            mass,
            separation,
            omega,
        })
    }

    /// Oscillators whose `m / d^3` equals `density` (kg/m^3).
    pub fn from_density(mass: f64, density: f64, omega: f64) -> Result<Self> {
        require_positive("density", density)?;
        Self::new(mass, (mass / density).cbrt(), omega)
    }
}

/// Dimensionless gravitational coupling `2 G m / (omega^2 d^3)`.
pub fn eta_from_physical(constants: &Constants, p: &PhysicalParams) -> f64 {
    2.0 * constants.gravitational * p.mass / (p.omega * p.omega * p.separation.powi(3))
}

/// Zero-mean Gaussian state: the symmetrised covariance over
/// `(X1, P1, X2, P2)` at dimensionless time `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceState {
    pub time: f64,
    pub matrix: Matrix4<f64>,
}

impl CovarianceState {
    pub fn new(time: f64, matrix: Matrix4<f64>) -> Result<Self> {
        require_non_negative("time", time)?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite covariance entry".into()));
        }
        let scale = matrix.amax();
        let asym = (matrix - matrix.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidState(format!(
                "covariance not symmetric: max |s_ij - s_ji| = {asym:e}"
            )));
        }
        Ok(Self { time, matrix })
    }

    /// Builds a state and forces exact symmetry.
    pub fn symmetrized(time: f64, matrix: Matrix4<f64>) -> Self {
        Self {
            time,
            matrix: (matrix + matrix.transpose()) * 0.5,
        }
    }

    /// 2x2 block `(row, col)` in the `[[s1, s3], [s3^T, s2]]` layout.
    pub fn block(&self, row: usize, col: usize) -> nalgebra::Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(2 * row, 2 * col).into_owned()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// Drift matrix `K`.
pub fn drift_matrix(s: &SystemParams) -> Matrix4<f64> {
    let w = s.omega;
    let mut k = Matrix4::zeros();
    k[(0, 1)] = w;
    k[(1, 0)] = w * (s.eta - s.lambda1);
    k[(1, 2)] = -w * s.eta;
    k[(2, 3)] = w;
    k[(3, 0)] = -w * s.eta;
    k[(3, 2)] = w * (s.eta - s.lambda2);
    k
}

/// Diffusion matrix `D = diag(0, mu omega, 0, mu omega)`.
pub fn noise_matrix(s: &SystemParams) -> Matrix4<f64> {
    let d = s.mu * s.omega;
    Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, d, 0.0, d))
}

/// Ground state of a trap `chi` times stiffer in frequency than `omega`:
/// `diag(1/chi, chi, 1/chi, chi) / 2` at time zero.
pub fn initial_covariance(chi: f64) -> Result<CovarianceState> {
    require_positive("chi", chi)?;
    let x = 0.5 / chi;
    let p = 0.5 * chi;
    Ok(CovarianceState {
        time: 0.0,
        matrix: Matrix4::from_diagonal(&nalgebra::Vector4::new(x, p, x, p)),
    })
}

/// Symplectic form `J + J` for the ordering `(X1, P1, X2, P2)`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// `Lambda = diag(1, 1, 1, -1)`: flips the momentum of the second oscillator.
pub fn partial_transpose_operator() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0))
}
