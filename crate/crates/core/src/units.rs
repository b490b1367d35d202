//! Conversion table between the user-facing units and SI.
//!
//! Frequencies quoted "in kHz" or "in MHz" are angular: `1 kHz` is
//! `1e3 rad/s`. This is the convention that reproduces the fiducial
//! numbers (for example `eta = 2.7e-13` at `omega = 1 kHz`).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    Milligram,
    Millimeter,
    Nanometer,
    KiloHertz,
    MegaHertz,
    Pascal,
    Watt,
    KiloWatt,
    Kelvin,
    Second,
    GramPerCubicCentimeter,
}

impl Unit {
    /// Multiplier taking a value in this unit to SI.
    pub const fn to_si(self) -> f64 {
        match self {
            Unit::Milligram => 1e-6,
            Unit::Millimeter => 1e-3,
            Unit::Nanometer => 1e-9,
            Unit::KiloHertz => 1e3,
            Unit::MegaHertz => 1e6,
            Unit::Pascal | Unit::Watt | Unit::Kelvin | Unit::Second => 1.0,
            Unit::KiloWatt => 1e3,
            Unit::GramPerCubicCentimeter => 1e3,
        }
    }

    pub fn si(self, value: f64) -> f64 {
        value * self.to_si()
    }

    pub fn from_si(self, value: f64) -> f64 {
        value / self.to_si()
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Unit::Milligram => "mg",
            Unit::Millimeter => "mm",
            Unit::Nanometer => "nm",
            Unit::KiloHertz => "kHz",
            Unit::MegaHertz => "MHz",
            Unit::Pascal => "Pa",
            Unit::Watt => "W",
            Unit::KiloWatt => "kW",
            Unit::Kelvin => "K",
            Unit::Second => "s",
            Unit::GramPerCubicCentimeter => "g/cm^3",
        }
    }
}

/// Laser angular frequency `2 pi c / wavelength`.
pub fn laser_angular_frequency(wavelength_m: f64, speed_of_light: f64) -> f64 {
    2.0 * std::f64::consts::PI * speed_of_light / wavelength_m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for u in [Unit::Milligram, Unit::KiloHertz, Unit::Nanometer, Unit::Pascal] {
            assert_eq!(u.from_si(u.si(3.5)), 3.5);
        }
        assert_eq!(Unit::Milligram.si(0.1), 1e-7);
        assert_eq!(Unit::KiloHertz.si(1.0), 1000.0);
        assert_eq!(Unit::GramPerCubicCentimeter.si(2.0), 2000.0);
    }
}
