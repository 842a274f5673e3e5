//! Simulation and verification toolkit for Beta(2 - alpha, alpha)
//! coalescents with 1 < alpha < 2.

pub mod coalescent;
pub mod coupling_lab;
pub mod error;
pub mod limits;
pub mod numerics;
pub mod rates;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use numerics::{AlphaParams, AlphaSpec, BoundaryTag};
