//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type was constructed with a field violating its invariant.
    /// Carries the dotted field path so diagnostics can name it.
    #[error("invalid field `{field}`: {reason} (got {value})")]
    InvalidField {
        field: String,
        reason: String,
        value: String,
    },

    /// A quantity string could not be parsed or had the wrong unit.
    #[error("cannot parse quantity `{input}` for `{field}`: {reason}")]
    BadQuantity {
        field: String,
        input: String,
        reason: String,
    },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature for {context} did not converge (best estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence {
        context: String,
        estimate: f64,
        error: f64,
    },

    /// A bracketing root solve could not be completed.
    #[error("root solve for {context} failed: {reason} (bracket [{lo:e}, {hi:e}])")]
    RootSolve {
        context: String,
        reason: String,
        lo: f64,
        hi: f64,
    },

    /// Requirement inversion bracket does not straddle the threshold.
    #[error("bracket does not straddle threshold {threshold}: f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}")]
    NoStraddle {
        threshold: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Forward model is not monotone along the requested axis.
    #[error("forward model is not monotone over [{lo:e}, {hi:e}]; sampled values {samples:?}")]
    NotMonotone {
        lo: f64,
        hi: f64,
        samples: Vec<f64>,
    },

    /// Grid too narrow for the state it has to hold.
    #[error("grid [{x_min:e}, {x_max:e}] too narrow: {reason}; required half-width {required:e} m")]
    GridTooNarrow {
        x_min: f64,
        x_max: f64,
        required: f64,
        reason: String,
    },

    /// Scatter-slit beam outside the perturbative single-photon regime.
    #[error("peak scatter probability {p_peak} exceeds 1; beam too strong for the perturbative model")]
    BeamTooStrong { p_peak: f64 },

    /// The detected pattern carries no resolvable fringe.
    #[error("no resolvable fringe: {reason}")]
    DegenerateFringe { reason: String },

    /// Visibility fit failed or left too much structure unexplained.
    #[error("visibility fit failed: {reason} (relative residual {residual:e})")]
    FitFailure { reason: String, residual: f64 },

    /// Wraps an error with the protocol step in which it occurred.
    #[error("protocol step `{step}`: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid_field(
        field: impl Into<String>,
        reason: impl Into<String>,
        value: impl std::fmt::Display,
    ) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
            value: value.to_string(),
        }
    }

    /// Attach a protocol-step label, building a context chain.
    pub fn in_step(self, step: &'static str) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_field_names_the_field() {
        let e = Error::invalid_field("particle.radius", "must be positive", -1.0);
        let msg = e.to_string();
        assert!(msg.contains("particle.radius"));
        assert!(msg.contains("-1"));
    }

    #[test]
    fn step_chain_renders_both_layers() {
        let e = Error::invalid_field("x", "bad", 0).in_step("prepare");
        assert!(e.to_string().contains("prepare"));
    }
}
