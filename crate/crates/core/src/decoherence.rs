//! Decoherence from residual gas and from photon shot noise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{Constants, NITROGEN_MOLECULE_MASS};
use crate::design::SandwichGeometry;
use crate::error::{require_non_negative, require_positive, Error, Result};

/// Largest `delta_x / a_L` for which the quadratic suppression of the
/// horizontal shot noise is trusted.
pub const SUPPRESSION_LIMIT: f64 = 0.01;

/// Oscillator in a thermal gas. `pressure` may be zero (perfect vacuum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    /// Pa
    pub pressure: f64,
    /// K
    pub temperature: f64,
    /// Oscillator radius, m.
    pub radius: f64,
    /// Oscillator mass, kg.
    pub mass: f64,
    /// kg
    pub gas_molecule_mass: f64,
    /// rad/s
    pub omega: f64,
}

impl EnvironmentParams {
    /// Nitrogen background gas.
    pub fn new(pressure: f64, temperature: f64, radius: f64, mass: f64, omega: f64) -> Result<Self> {
        let e = Self {
            pressure,
            temperature,
            radius,
            mass,
            gas_molecule_mass: NITROGEN_MOLECULE_MASS,
            omega,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn with_gas_molecule_mass(mut self, mass: f64) -> Result<Self> {
        self.gas_molecule_mass = mass;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("pressure", self.pressure)?;
        require_positive("temperature", self.temperature)?;
        require_positive("radius", self.radius)?;
        require_positive("mass", self.mass)?;
        require_positive("gas_molecule_mass", self.gas_molecule_mass)?;
        require_positive("omega", self.omega)?;
        Ok(())
    }
}

/// Driven optical cavity acting on a mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// rad/s
    pub laser_angular_frequency: f64,
    /// Laser minus cavity frequency, rad/s. Negative is red detuned.
    pub detuning: f64,
    /// Amplitude decay rate, rad/s.
    pub decay_rate: f64,
    /// m
    pub cavity_length: f64,
    pub input_transmittance: f64,
    /// W
    pub input_power: f64,
    /// kg
    pub mirror_mass: f64,
}

impl CavityParams {
    pub fn new(
        laser_angular_frequency: f64,
        detuning: f64,
        decay_rate: f64,
        cavity_length: f64,
        input_transmittance: f64,
        input_power: f64,
        mirror_mass: f64,
    ) -> Result<Self> {
        let c = Self {
            laser_angular_frequency,
            detuning,
            decay_rate,
            cavity_length,
            input_transmittance,
            input_power,
            mirror_mass,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("laser_angular_frequency", self.laser_angular_frequency)?;
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        require_positive("decay_rate", self.decay_rate)?;
        require_positive("cavity_length", self.cavity_length)?;
        let t = require_positive("input_transmittance", self.input_transmittance)?;
        if t > 1.0 {
            return Err(Error::invalid("input_transmittance", format!("must be <= 1, got {t}")));
        }
        require_non_negative("input_power", self.input_power)?;
        require_positive("mirror_mass", self.mirror_mass)?;
        Ok(())
    }

    /// `detuning / decay_rate`
    pub fn normalized_detuning(&self) -> f64 {
        self.detuning / self.decay_rate
    }

    /// `T_in (1 + (detuning/kappa)^2)`
    fn lorentzian_loss(&self) -> f64 {
        let x = self.normalized_detuning();
        self.input_transmittance * (1.0 + x * x)
    }

    /// Input transmittance of a cavity with this length and decay rate:
    /// `4 L kappa / c`.
    pub fn matched_transmittance(&self, constants: &Constants) -> f64 {
        4.0 * self.cavity_length * self.decay_rate / constants.speed_of_light
    }
}

/// Collisional decoherence parameter
/// `16 p R^2 / (3 hbar m omega^2) * sqrt(2 pi m_gas k_B T)`.
pub fn mu_air(constants: &Constants, e: &EnvironmentParams) -> f64 {
    let momentum = (2.0 * PI * e.gas_molecule_mass * constants.boltzmann * e.temperature).sqrt();
    16.0 * e.pressure * e.radius * e.radius / (3.0 * constants.hbar * e.mass * e.omega * e.omega) * momentum
}

fn collision_rate_per_pressure(constants: &Constants, e: &EnvironmentParams) -> f64 {
    let kt = constants.boltzmann * e.temperature;
    let velocity = (kt / e.gas_molecule_mass).sqrt();
    PI * e.radius * e.radius * velocity / kt
}

/// Mean time between gas collisions, s. Infinite at zero pressure.
pub fn tau_air(constants: &Constants, e: &EnvironmentParams) -> f64 {
    1.0 / (collision_rate_per_pressure(constants, e) * e.pressure)
}

/// Pressure (Pa) at which the mean collision time equals `tau_required`.
/// The `pressure` field of `e` is ignored.
pub fn max_pressure(constants: &Constants, e: &EnvironmentParams, tau_required: f64) -> Result<f64> {
    require_positive("tau_required", tau_required)?;
    Ok(1.0 / (collision_rate_per_pressure(constants, e) * tau_required))
}

/// `4 P_in / (T_in [1 + (detuning/kappa)^2])`, W.
pub fn intracavity_power(c: &CavityParams) -> f64 {
    4.0 * c.input_power / c.lorentzian_loss()
}

/// One-sided force PSD, N^2/Hz:
/// `32 hbar w_l P_cav / (c^2 T_in [1 + (detuning/kappa)^2])`.
pub fn shot_noise_psd(constants: &Constants, c: &CavityParams, p_cav: f64) -> f64 {
    let light = constants.speed_of_light;
    32.0 * constants.hbar * c.laser_angular_frequency * p_cav / (light * light * c.lorentzian_loss())
}

/// The same PSD built from the intracavity power fluctuation
/// `dP = sqrt(2 hbar w_l P_in) P_cav / P_in` as `(2 dP / c)^2`.
pub fn shot_noise_psd_from_fluctuation(constants: &Constants, c: &CavityParams, p_cav: f64) -> f64 {
    let gain = 4.0 / c.lorentzian_loss();
    let p_in = p_cav / gain;
    let dp = (2.0 * constants.hbar * c.laser_angular_frequency * p_in).sqrt() * gain;
    (2.0 * dp / constants.speed_of_light).powi(2)
}

/// `S_F / (2 hbar m omega^2)` for the cavity's own intracavity power.
pub fn mu_shot_detuned(constants: &Constants, c: &CavityParams, omega: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    let s = shot_noise_psd(constants, c, intracavity_power(c));
    Ok(s / (2.0 * constants.hbar * c.mirror_mass * omega * omega))
}

fn require_detuned(detuning: f64, decay_rate: f64) -> Result<f64> {
    require_positive("decay_rate", decay_rate)?;
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::invalid("detuning", "must be finite and non-zero"));
    }
    Ok((detuning / decay_rate).abs())
}

/// `kappa / |detuning|`
pub fn mu_shot_reduced(detuning: f64, decay_rate: f64) -> Result<f64> {
    require_detuned(detuning, decay_rate).map(|x| 1.0 / x)
}

/// `(1 + x^2) / |x|` with `x = detuning / kappa`: [`mu_shot_detuned`] with
/// `omega^2 = |omega_opt^2|` and `T_in = 4 L kappa / c` substituted. Tends to
/// [`mu_shot_reduced`] for `|detuning| << kappa`.
pub fn mu_shot_detuned_substituted(detuning: f64, decay_rate: f64) -> Result<f64> {
    require_detuned(detuning, decay_rate).map(|x| (1.0 + x * x) / x)
}

/// Width of an inverted-oscillator wavepacket at the entanglement time,
/// m. `tau_ent` is the dimensionless entanglement time for a release from
/// a trap of frequency `omega`; releasing from `omega_in = chi omega`
/// shrinks `e^tau` by `sqrt(2/chi)`.
pub fn wavefunction_spread(constants: &Constants, mass: f64, omega: f64, omega_in: f64, tau_ent: f64) -> Result<f64> {
    require_positive("mass", mass)?;
    require_positive("omega", omega)?;
    require_positive("omega_in", omega_in)?;
    require_non_negative("tau_ent", tau_ent)?;
    let chi = omega_in / omega;
    if chi < 1.0 {
        return Err(Error::invalid("omega_in", format!("must be >= omega (chi = {chi})")));
    }
    let zero_point = (constants.hbar / (2.0 * mass * omega_in)).sqrt();
    Ok((2.0 / chi).sqrt() * tau_ent.exp() * zero_point)
}

fn suppression(delta_x: f64, a_lower: f64) -> Result<f64> {
    require_non_negative("delta_x", delta_x)?;
    let ratio = delta_x / a_lower;
    if ratio > SUPPRESSION_LIMIT {
        return Err(Error::SuppressionInvalid { ratio });
    }
    Ok(ratio * ratio)
}

/// Upper-bound estimate of the shot noise felt by a horizontally displaced
/// sandwich mirror: `16 w_l P_L / (m omega^2 c^2 T_in) (dx / a_L)^2`.
pub fn mu_shot_horizontal(
    constants: &Constants,
    g: &SandwichGeometry,
    c: &CavityParams,
    delta_x: f64,
    omega: f64,
) -> Result<f64> {
    require_positive("omega", omega)?;
    let s = suppression(delta_x, g.a_lower)?;
    let light = constants.speed_of_light;
    Ok(16.0 * c.laser_angular_frequency * g.power_lower
        / (g.mirror_mass * omega * omega * light * light * c.input_transmittance)
        * s)
}

/// [`mu_shot_horizontal`] with `omega^2 = 2 P_L / (m c a_L)`:
/// `8 w_l dx^2 / (c a_L T_in)`.
pub fn mu_shot_horizontal_reduced(
    constants: &Constants,
    c: &CavityParams,
    a_lower: f64,
    delta_x: f64,
) -> Result<f64> {
    require_positive("a_lower", a_lower)?;
    suppression(delta_x, a_lower)?;
    Ok(8.0 * c.laser_angular_frequency * delta_x * delta_x
        / (constants.speed_of_light * a_lower * c.input_transmittance))
}
