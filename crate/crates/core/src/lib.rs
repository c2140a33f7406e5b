//! Suitability analysis of a two-state polarization QKD link.

pub mod config;
pub mod error;
pub mod hilbert;
pub mod photon;
pub mod protocol;
pub mod qstate;
pub mod quadrature;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
