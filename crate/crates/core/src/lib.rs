//! Two-component (spinor) slow light in a double-tripod EIT medium.
//!
//! Two of the four control beams carry optical vortices of opposite charge.
//! A probe entering in one component generates a second component that picks
//! up the vortex phase. This crate evaluates the transmissions in closed form
//! ([`transfer`]), checks them against an exact linear-response solve and a
//! numerical integrator ([`oracle`]), and derives scans, winding spectra and
//! validity reports ([`analysis`]).

// Negated comparisons such as `!(x > 0.0)` are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod medium;
pub mod oracle;
pub mod transfer;
pub mod units;

pub use error::{Error, Result};
pub use medium::{MediumParams, RabiMatrix, Regime, VelocityDecomposition};
pub use transfer::{KCoefficients, TransferResult};
