//! Finite-difference ideal MHD with a single-stage, single-step WENO scheme.
//!
//! The conserved variables are advanced with Picard-integral time-averaged
//! fluxes (a third-order Taylor expansion in time reconstructed by
//! characteristic WENO5). The magnetic field is kept discretely
//! divergence-free by evolving a vector potential with a Lax-Wendroff
//! Hamilton-Jacobi WENO scheme and replacing `B` by its fourth-order curl.
//! An optional flux limiter keeps density and pressure positive.

pub mod config;
pub mod ct;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod jet;
pub mod limiter;
pub mod mesh;
pub mod output;
pub mod physics;
pub mod pif;
pub mod problems;
pub mod weno;

pub use error::{MhdError, Result};
