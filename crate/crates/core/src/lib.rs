//! Simulation engine for a double-slit matter-wave experiment with an
//! optically trapped dielectric nanosphere.
//!
//! The crate propagates the particle's wavepacket through the full
//! release / expand / slit / expand / detect protocol, applies standard
//! environmental decoherence channels and macrorealistic collapse-model
//! channels, predicts the interference pattern and its visibility, and
//! inverts those predictions to recover environmental and engineering
//! requirements.

pub mod constants;
pub mod decoherence;
pub mod error;
pub mod gridprop;
pub mod numeric;
pub mod prepare;
pub mod types;
pub mod wavepacket;

pub use error::{Error, Result};
