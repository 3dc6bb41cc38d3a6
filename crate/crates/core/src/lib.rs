//! Adiabatic theory of multi-color (MC) slow and stationary light in multi-Λ
//! EIT media.
//!
//! The crate propagates a weak probe pulse through piecewise-constant control
//! schedules in the spectral domain, synthesizes every coupled field
//! component, evaluates dispersion and stopping design quantities, provides
//! closed forms for Gaussian and two-photon (EPR) probes, and carries a
//! semiclassical Maxwell–Bloch integrator used as a brute-force oracle.
//!
//! Units are natural simulation units with `c = 1`.

pub mod dispersion;
pub mod error;
pub mod gaussian;
pub mod mboracle;
pub mod medium;
pub mod numerics;
pub mod propagator;
pub mod scenario;
pub mod twophoton;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use medium::{
    Channel, ChannelCoeffs, ControlSchedule, ControlTable, DarkWeights, DerivedCoeffs, Direction,
    Medium, Setup,
};

/// Speed of light in simulation units.
pub const C_LIGHT: f64 = 1.0;
