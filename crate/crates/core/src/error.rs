use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown channel label `{0}`")]
    UnknownChannel(String),

    #[error("time {t} lies outside the control schedule domain (starts at {start})")]
    OutsideSchedule { t: f64, start: f64 },

    #[error("degenerate dark-state normalization: all weights vanish")]
    DegenerateWeights,

    #[error("relaxation rate mu vanishes at t = {0}: no active control and gamma12 = 0")]
    ZeroMu(f64),

    #[error("configuration is not stationary: stopping residual {residual:e} exceeds gate {gate:e}")]
    NotStationary { residual: f64, gate: f64 },

    #[error("pulse does not fit the medium: {0}")]
    Localization(String),

    #[error("pulse width is not resolved: {0}")]
    Unresolved(String),

    #[error("complex envelope width (non-optimal detunings, Im/Re = {ratio:e}); use the spectral propagator")]
    ComplexWidth { ratio: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero-norm state: moments undefined")]
    ZeroNorm,

    #[error("CFL condition violated: c*dt = {cdt} > dz = {dz}")]
    Cfl { cdt: f64, dz: f64 },

    #[error("non-finite value at t = {t}, z = {z}")]
    NonFinite { t: f64, z: f64 },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("scenario error at `{key}`: {reason}")]
    Schema { key: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}
