use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    #[error("frequency grid with one point needs f_min == f_max (got {f_min} and {f_max})")]
    DegenerateGrid { f_min: f64, f_max: f64 },

    #[error("interface denominator vanished; Fresnel coefficients are undefined")]
    DegenerateInterface,

    #[error("thin-plate formulas require a non-magnetic plate (relative permeability {0})")]
    MagneticPlate(f64),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },

    #[error("spectra are not comparable: {0}")]
    GridMismatch(&'static str),

    #[error("spectrum cannot be inverted: {0}")]
    Unfittable(&'static str),

    #[error("at {frequency} Hz: {source}")]
    AtFrequency { frequency: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            reason,
            value,
        }
    }

    /// Strips any frequency annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtFrequency { source, .. } => source.root(),
            other => other,
        }
    }
}
