//! Outage probability of an intelligent-reflecting-surface link under
//! kappa-mu fading with quantized phase shifts.

pub mod error;
pub mod baselines;
pub mod exec;
pub mod fading;
pub mod geometry;
pub mod moments;
pub mod montecarlo;
pub mod outage;
pub mod quadrature;
pub mod specfun;
pub mod units;

pub use error::{Error, Result};
