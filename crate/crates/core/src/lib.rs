//! Solitary waves of the one-dimensional nonlinear Dirac equation with scalar
//! self-interaction, their linearizations, and numerical spectral stability via
//! Evans-function shooting and threshold-resonance phases.
//!
//! The default model is Gross-Neveu, `G(X) = X - X^2/2`. Everything is in units
//! where the Dirac mass is `m = g(0)`.

pub mod cli;
pub mod error;
pub mod evans;
pub mod linops;
pub mod model;
pub mod odeint;
pub mod resonance;
pub mod soliton;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, Nonlinearity};
pub use soliton::SolitonProfile;
