//! Optomechanical design relations for the detuned cavity and the
//! three-mirror sandwich.

use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::decoherence::CavityParams;
use crate::error::{require_non_negative, require_positive, Error, Result};

pub const DEFAULT_GRAVITY: f64 = 9.81;

/// Relative tolerance on the levitation residual, in units of `m g`.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

/// Middle mirror held between a lower and an upper cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichGeometry {
    /// kg
    pub mirror_mass: f64,
    /// Intracavity power of the lower cavity, W.
    pub power_lower: f64,
    /// Intracavity power of the upper cavity, W.
    pub power_upper: f64,
    /// Distance between the centres of curvature, lower cavity, m.
    pub a_lower: f64,
    /// Same for the upper cavity, m.
    pub a_upper: f64,
    /// m/s^2
    pub gravity: f64,
}

impl SandwichGeometry {
    pub fn new(
        mirror_mass: f64,
        power_lower: f64,
        power_upper: f64,
        a_lower: f64,
        a_upper: f64,
        gravity: f64,
    ) -> Result<Self> {
        let g = Self {
            mirror_mass,
            power_lower,
            power_upper,
            a_lower,
            a_upper,
            gravity,
        };
        g.validate()?;
        Ok(g)
    }

    /// Geometry whose lower power exactly carries the weight:
    /// `P_L = P_U + m g c / 2`.
    pub fn balanced(
        constants: &Constants,
        mirror_mass: f64,
        power_upper: f64,
        a_lower: f64,
        a_upper: f64,
        gravity: f64,
    ) -> Result<Self> {
        let lift = mirror_mass * gravity * constants.speed_of_light / 2.0;
        Self::new(mirror_mass, power_upper + lift, power_upper, a_lower, a_upper, gravity)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("mirror_mass", self.mirror_mass)?;
        require_non_negative("power_lower", self.power_lower)?;
        require_non_negative("power_upper", self.power_upper)?;
        require_positive("a_lower", self.a_lower)?;
        require_positive("a_upper", self.a_upper)?;
        require_positive("gravity", self.gravity)?;
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.mirror_mass * self.gravity
    }
}

/// Squared optical-spring frequency of a detuned cavity (signed, rad^2/s^2):
/// `4 w_l P / (m c L kappa) * x / (1 + x^2)^2` with `x = detuning / kappa`.
pub fn optical_spring_detuned(constants: &Constants, c: &CavityParams, p_cav: f64) -> f64 {
    let x = c.normalized_detuning();
    let prefactor = 4.0 * c.laser_angular_frequency * p_cav
        / (c.mirror_mass * constants.speed_of_light * c.cavity_length * c.decay_rate);
    prefactor * x / (1.0 + x * x).powi(2)
}

/// `m g - (2/c)(P_L - P_U)`; zero when the mirror is levitated.
pub fn levitation_balance(constants: &Constants, g: &SandwichGeometry) -> f64 {
    g.weight() - 2.0 / constants.speed_of_light * (g.power_lower - g.power_upper)
}

/// `(2/(m c)) (P_U/a_U - P_L/a_L)`.
pub fn horizontal_frequency_sq(constants: &Constants, g: &SandwichGeometry) -> f64 {
    2.0 / (g.mirror_mass * constants.speed_of_light) * (g.power_upper / g.a_upper - g.power_lower / g.a_lower)
}

/// Coefficient of `P_L` once the upper power is eliminated through the
/// levitation balance.
pub fn lower_power_coefficient(constants: &Constants, g: &SandwichGeometry) -> f64 {
    2.0 * (g.a_lower - g.a_upper) / (g.mirror_mass * constants.speed_of_light * g.a_upper * g.a_lower)
}

/// `2 (a_L - a_U) P_L / (m c a_U a_L) - g / a_U`. Equals
/// [`horizontal_frequency_sq`] when the geometry is balanced.
pub fn horizontal_frequency_sq_balanced(constants: &Constants, g: &SandwichGeometry) -> f64 {
    lower_power_coefficient(constants, g) * g.power_lower - g.gravity / g.a_upper
}

/// `-2 P_L / (m c a_L)`: the upper cavity and gravity terms dropped.
pub fn horizontal_frequency_sq_approx(constants: &Constants, g: &SandwichGeometry) -> f64 {
    -2.0 * g.power_lower / (g.mirror_mass * constants.speed_of_light * g.a_lower)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchabilityReport {
    pub harmonic_omega_sq: f64,
    pub inverted_omega_sq: f64,
    pub harmonic_residual: f64,
    pub inverted_residual: f64,
    /// `a_U1 < a_L < a_U2`
    pub geometry_ordered: bool,
    pub switchable: bool,
}

/// Whether one mirror can be switched between a harmonic and an inverted
/// horizontal potential by changing only the upper cavity.
pub fn switchability_check(
    constants: &Constants,
    harmonic: &SandwichGeometry,
    inverted: &SandwichGeometry,
) -> Result<SwitchabilityReport> {
    harmonic.validate()?;
    inverted.validate()?;
    if harmonic.mirror_mass != inverted.mirror_mass {
        return Err(Error::GeometryMismatch("mirror mass differs between configurations"));
    }
    if harmonic.gravity != inverted.gravity {
        return Err(Error::GeometryMismatch("gravity differs between configurations"));
    }
    let harmonic_omega_sq = horizontal_frequency_sq(constants, harmonic);
    let inverted_omega_sq = horizontal_frequency_sq(constants, inverted);
    let harmonic_residual = levitation_balance(constants, harmonic);
    let inverted_residual = levitation_balance(constants, inverted);
    let limit = BALANCE_TOLERANCE * harmonic.weight();
    let geometry_ordered = harmonic.a_upper < harmonic.a_lower && inverted.a_lower < inverted.a_upper;
    let switchable = harmonic_omega_sq > 0.0
        && inverted_omega_sq < 0.0
        && harmonic_residual.abs() < limit
        && inverted_residual.abs() < limit;
    Ok(SwitchabilityReport {
        harmonic_omega_sq,
        inverted_omega_sq,
        harmonic_residual,
        inverted_residual,
        geometry_ordered,
        switchable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const C: Constants = Constants::CODATA_2018;

    fn cavity(detuning: f64) -> CavityParams {
        CavityParams::new(1.77e15, detuning, 1e5, 0.01, 0.1, 1.0, 1e-7).unwrap()
    }

    #[test]
    fn optical_spring_sign_and_peak() {
        assert!(optical_spring_detuned(&C, &cavity(-3e4), 10.0) < 0.0);
        assert_eq!(optical_spring_detuned(&C, &cavity(-3e4), 0.0), 0.0);
        let peak = optical_spring_detuned(&C, &cavity(1e5 / 3f64.sqrt()), 10.0);
        for x in [0.4, 0.55, 0.6, 0.7] {
            assert!(optical_spring_detuned(&C, &cavity(x * 1e5), 10.0) < peak);
        }
        let plus = optical_spring_detuned(&C, &cavity(2e4), 10.0);
        let minus = optical_spring_detuned(&C, &cavity(-2e4), 10.0);
        assert_eq!(plus, -minus);
    }

    #[test]
    fn levitation() {
        let g = SandwichGeometry::balanced(&C, 1e-7, 0.0, 2e-3, 2e-2, 9.81).unwrap();
        assert_relative_eq!(g.power_lower, 1e-7 * 9.81 * C.speed_of_light / 2.0, max_relative = 1e-15);
        assert_relative_eq!(g.power_lower, 147.0, max_relative = 1e-2);
        assert!(levitation_balance(&C, &g).abs() < 1e-12 * g.weight());
        let equal = SandwichGeometry::new(1e-7, 5.0, 5.0, 1e-3, 1e-3, 9.81).unwrap();
        assert_eq!(levitation_balance(&C, &equal), equal.weight());
    }

    #[test]
    fn horizontal_frequency_routes() {
        let approx = SandwichGeometry::new(1e-7, 3e4, 0.0, 2e-3, 2e-2, DEFAULT_GRAVITY).unwrap();
        assert_relative_eq!(horizontal_frequency_sq_approx(&C, &approx), -1e6, max_relative = 1e-3);

        let b = SandwichGeometry::balanced(&C, 1e-7, 3e4, 2e-3, 3e-3, 9.81).unwrap();
        assert_relative_eq!(
            horizontal_frequency_sq(&C, &b),
            horizontal_frequency_sq_balanced(&C, &b),
            max_relative = 1e-12
        );
        assert!(lower_power_coefficient(&C, &b) < 0.0);

        let flat = SandwichGeometry::new(1e-7, 2.0, 1.0, 2e-3, 1e-3, 9.81).unwrap();
        assert_eq!(horizontal_frequency_sq(&C, &flat), 0.0);
    }

    #[test]
    fn switching() {
        let h = SandwichGeometry::balanced(&C, 1e-7, 3e4, 2e-3, 1e-3, 9.81).unwrap();
        let i = SandwichGeometry::balanced(&C, 1e-7, 3e4, 2e-3, 4e-3, 9.81).unwrap();
        let r = switchability_check(&C, &h, &i).unwrap();
        assert!(r.switchable && r.geometry_ordered);

        let r = switchability_check(&C, &h, &h).unwrap();
        assert!(!r.switchable);

        let mut loose = i;
        loose.power_lower += 1.0;
        let r = switchability_check(&C, &h, &loose).unwrap();
        assert!(!r.switchable);
        assert!(r.inverted_residual.abs() > 1e-9);

        let mut heavy = i;
        heavy.mirror_mass = 2e-7;
        assert!(matches!(switchability_check(&C, &h, &heavy), Err(Error::GeometryMismatch(_))));
    }
}
