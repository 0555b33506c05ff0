//! Spectral analysis and boundary null control of two variable-coefficient
//! strings coupled by a point mass.

pub mod acceptance;
pub mod coefficients;
pub mod control;
pub mod error;
pub mod export;
pub mod gaps;
pub mod modes;
pub mod numerics;
pub mod observability;
pub mod shooting;
pub mod simulator;
pub mod spectrum;

pub use error::{Error, Result};
