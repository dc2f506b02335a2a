//! Physical constants (CODATA 2018, SI units).
//!
//! Every module reads the same fixed values; nothing here is configurable.

/// Fixed set of fundamental constants used throughout the engine.
///
/// The values are CODATA 2018. `hbar`, `k_b` and `c` are exact under the
/// 2019 SI redefinition; `g` and `amu` carry experimental uncertainty well
/// below anything this engine resolves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Newtonian gravitational constant, m^3/(kg s^2).
    pub g: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
}

/// The one instance everything reads.
pub const CONST: Constants = Constants {
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    c: 299_792_458.0,
    g: 6.674_30e-11,
    amu: 1.660_539_066_60e-27,
};

/// Provenance string emitted by `--version` and report metadata.
pub const CONSTANTS_PROVENANCE: &str = "CODATA 2018";

/// hbar * c, J m. Used in every blackbody spectral scale.
pub const HBAR_C: f64 = CONST.hbar * CONST.c;

// Riemann zeta values entering the closed-form blackbody integrals
// (Gamma(n+1) * zeta(n+1) = integral of x^n/(e^x - 1)).
pub const ZETA_4: f64 = 1.082_323_233_711_138_2;
pub const ZETA_5: f64 = 1.036_927_755_143_369_9;
pub const ZETA_7: f64 = 1.008_349_277_381_922_8;
pub const ZETA_9: f64 = 1.002_008_392_826_082_2;
