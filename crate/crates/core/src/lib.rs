//! Robust artificial-noise-aided beamforming and receive power splitting for
//! secure MISO cognitive radio with wireless energy harvesting.
//!
//! The crate covers the whole pipeline: scenario description and channel
//! sampling, ground-truth metrics, a small conic IR lowered to Clarabel, the
//! bounded-error and outage-constrained program builders, the outer
//! one-dimensional search, Monte Carlo validation and the sweep harness.

extern crate openblas_src;

pub mod design;
pub mod error;
pub mod harness;
pub mod hermitian;
pub mod conic;
pub mod metrics;
pub mod outage;
pub mod program;
pub mod scenario;
pub mod search;
pub mod validation;
pub mod worstcase;

#[cfg(test)]
mod testutil;

pub use design::{Design, DesignStatus, ErrorModel, Extraction, ProblemKind, Sense};
pub use error::{Error, Result};
pub use hermitian::{ComplexVector, HermitianMatrix, C64};
pub use scenario::{ChannelSet, ErrorSpec, Scenario};
