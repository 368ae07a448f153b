//! Real-valued special functions: incomplete gamma, digamma, modified Bessel
//! function of the second kind, Kummer's confluent hypergeometric function
//! and the generalized Marcum-Q function of real order.
//!
//! Everything here is pure and reentrant.

mod bessel;
mod gamma;
mod hypergeometric;
mod marcum;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k_ladder};
pub use gamma::{
    digamma, digamma_minus_ln, gamma_pq, ln_gamma, pochhammer, reg_lower_gamma, reg_upper_gamma,
};
pub use hypergeometric::{kummer_1f1, kummer_1f1_da, kummer_1f1_series};
pub use marcum::{marcum_p, marcum_pq, marcum_q};

use crate::error::{Error, Result};

/// Truncation control for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = SeriesControl { rel_tol, max_terms };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::domain(
                "SeriesControl",
                format!("rel_tol must lie in (0, 1e-3], got {}", self.rel_tol),
            ));
        }
        if self.max_terms < 50 {
            return Err(Error::domain(
                "SeriesControl",
                format!("max_terms must be at least 50, got {}", self.max_terms),
            ));
        }
        Ok(())
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
