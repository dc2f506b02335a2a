//! Unit-checked domain types shared by all modules, plus the derived
//! scalar quantities that hang directly off them.
//!
//! Everything is SI internally. Construction validates invariants and
//! rejects bad values with a diagnostic naming the offending field; after
//! construction the types are immutable and freely shareable.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::CONST;
use crate::error::{Error, Result};

/// Largest supported sphere radius, m.
pub const MAX_RADIUS: f64 = 1.2e-7;

/// Optically trapped dielectric nanosphere.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Particle {
    /// Sphere radius, m.
    pub radius: f64,
    /// Bulk density, kg/m^3.
    pub density: f64,
    /// Relative permittivity at the trap wavelength (dimensionless).
    #[serde(with = "crate::types::complex_serde")]
    pub eps_trap: Complex64,
    /// Relative permittivity averaged over the blackbody band.
    #[serde(with = "crate::types::complex_serde")]
    pub eps_bb: Complex64,
    /// Internal (bulk) temperature, K.
    pub internal_temp: f64,
}

pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::ser::SerializeStruct;

    pub fn serialize<S: serde::Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &v.re)?;
        st.serialize_field("im", &v.im)?;
        st.end()
    }
}

impl Particle {
    pub fn new(
        radius: f64,
        density: f64,
        eps_trap: Complex64,
        eps_bb: Complex64,
        internal_temp: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius <= MAX_RADIUS) {
            return Err(Error::invalid_field(
                "particle.radius",
                format!("must satisfy 0 < R <= {MAX_RADIUS:e} m"),
                radius,
            ));
        }
        if !(density > 0.0) {
            return Err(Error::invalid_field(
                "particle.density",
                "must be positive",
                density,
            ));
        }
        if !(eps_trap.im >= 0.0) {
            return Err(Error::invalid_field(
                "particle.eps_trap.im",
                "must be non-negative",
                eps_trap.im,
            ));
        }
        if !(eps_bb.im >= 0.0) {
            return Err(Error::invalid_field(
                "particle.eps_bb.im",
                "must be non-negative",
                eps_bb.im,
            ));
        }
        if !(internal_temp >= 0.0) {
            return Err(Error::invalid_field(
                "particle.internal_temp",
                "must be non-negative",
                internal_temp,
            ));
        }
        Ok(Particle {
            radius,
            density,
            eps_trap,
            eps_bb,
            internal_temp,
        })
    }

    /// Sphere mass (4/3) pi R^3 rho, kg.
    pub fn mass(&self) -> f64 {
        particle_mass(self.radius, self.density)
    }

    /// Geometric cross-section pi R^2, m^2.
    pub fn geometric_cross_section(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    /// Return a copy with a different internal temperature (used by sweeps
    /// and requirement inversion; revalidates).
    pub fn with_internal_temp(&self, t_i: f64) -> Result<Self> {
        Particle::new(self.radius, self.density, self.eps_trap, self.eps_bb, t_i)
    }
}

/// Mass of a uniform sphere, kg. Strictly positive for valid inputs.
pub fn particle_mass(radius: f64, density: f64) -> f64 {
    4.0 / 3.0 * std::f64::consts::PI * radius.powi(3) * density
}

/// Clausius-Mossotti factor (eps - 1)/(eps + 2).
pub fn clausius_mossotti(eps: Complex64) -> Complex64 {
    (eps - 1.0) / (eps + 2.0)
}

/// Characteristic blackbody wavelength scale hbar c / (k_B T), m.
pub fn thermal_wavelength(temp: f64) -> Result<f64> {
    if !(temp > 0.0) {
        return Err(Error::invalid_field(
            "temperature",
            "must be positive for a thermal wavelength",
            temp,
        ));
    }
    Ok(CONST.hbar * CONST.c / (CONST.k_b * temp))
}

/// Vacuum environment around the trap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Environment {
    /// Environment temperature, K.
    pub temp: f64,
    /// Residual gas pressure, Pa.
    pub pressure: f64,
    /// Gas molecular mass, kg.
    pub gas_mass: f64,
}

impl Environment {
    pub fn new(temp: f64, pressure: f64, gas_mass: f64) -> Result<Self> {
        if !(temp > 0.0) {
            return Err(Error::invalid_field(
                "environment.temp",
                "must be positive",
                temp,
            ));
        }
        if !(pressure >= 0.0) {
            return Err(Error::invalid_field(
                "environment.pressure",
                "must be non-negative",
                pressure,
            ));
        }
        if !(gas_mass > 0.0) {
            return Err(Error::invalid_field(
                "environment.gas_mass",
                "must be positive",
                gas_mass,
            ));
        }
        Ok(Environment {
            temp,
            pressure,
            gas_mass,
        })
    }

    pub fn with_temp(&self, temp: f64) -> Result<Self> {
        Environment::new(temp, self.pressure, self.gas_mass)
    }

    pub fn with_pressure(&self, pressure: f64) -> Result<Self> {
        Environment::new(self.temp, pressure, self.gas_mass)
    }
}

/// Optical trap parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Trap {
    /// Angular trap frequency, rad/s.
    pub omega: f64,
    /// Trap laser wavelength, m.
    pub wavelength: f64,
    /// Intracavity intensity at the particle, W/m^2.
    pub intensity: f64,
}

impl Trap {
    pub fn new(omega: f64, wavelength: f64, intensity: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::invalid_field("trap.omega", "must be positive", omega));
        }
        if !(wavelength > 0.0) {
            return Err(Error::invalid_field(
                "trap.wavelength",
                "must be positive",
                wavelength,
            ));
        }
        if !(intensity >= 0.0) {
            return Err(Error::invalid_field(
                "trap.intensity",
                "must be non-negative",
                intensity,
            ));
        }
        Ok(Trap {
            omega,
            wavelength,
            intensity,
        })
    }
}
