//! Relative and centre-of-mass motion of two identical charges in a uniform
//! magnetic field, in dimensionless form.
//!
//! Radii are in units of the magnetic length, times in inverse cyclotron
//! frequencies. See [`units`] for conversion from physical inputs.

pub mod dynamics;
pub mod error;
pub mod polyroots;
pub mod potentials;
pub mod quadrature;
pub mod turning;
pub mod units;

pub use error::{ErrorClass, OrbitError, Result};
pub use potentials::{MotionConstants, PotentialKind, PotentialParams};
