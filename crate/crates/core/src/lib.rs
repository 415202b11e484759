//! Joint subcarrier and power allocation for a multiuser OFDM downlink
//! sharing spectrum with an OFDM radar.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fp_solver;
pub mod model;
pub mod oracle;
pub mod scenario;

pub use error::{Error, Result};
