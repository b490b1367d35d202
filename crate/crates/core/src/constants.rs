use serde::{Deserialize, Serialize};

/// Physical constants in SI units.
///
/// Every calculator takes the constants explicitly so that reproduced
/// numbers are pinned to one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
    pub gravitational: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
    /// Speed of light in vacuum, m/s.
    pub speed_of_light: f64,
    /// Standard acceleration of gravity, m/s^2.
    pub g_earth: f64,
}

impl Constants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: Constants = Constants {
        gravitational: 6.674_30e-11,
        hbar: 1.054_571_817e-34,
        boltzmann: 1.380_649e-23,
        speed_of_light: 299_792_458.0,
        g_earth: 9.806_65,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Mass of an N2 molecule, kg.
pub const NITROGEN_MOLECULE_MASS: f64 = 4.7e-26;
