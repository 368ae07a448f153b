//! Outage probability `P[gamma_IRS < gamma]` by four routes: direct
//! integration for one or two elements, univariate dimension reduction, and
//! two Gamma approximations of the SNR.

mod exact;
mod gamma_fit;
mod univariate;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::quadrature::QuadratureControl;
use crate::specfun::SeriesControl;
use crate::units::db_to_linear;

pub use exact::op_exact_small_n;
pub use gamma_fit::{
    gamma_cdf_kummer, gamma_cdf_op, gamma_fit_kl, gamma_fit_kl_with_log_mean, gamma_fit_moments,
    op_gamma_kl, op_gamma_moments, op_kl_no_sd_no_phase, FitMethod, GammaFit,
};
pub use univariate::{
    op_univariate, op_univariate_nakagami, op_univariate_no_phase, op_univariate_rayleigh,
    UnivariateSolver,
};

/// SNR threshold `gamma`, linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    pub threshold: f64,
}

impl OutageQuery {
    pub fn new(threshold: f64) -> Result<Self> {
        check_finite("OutageQuery", "threshold", threshold)?;
        if threshold <= 0.0 {
            return Err(Error::domain("OutageQuery", format!("threshold must be positive, got {threshold}")));
        }
        Ok(OutageQuery { threshold })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(db_to_linear(db))
    }
}

/// Numerical controls shared by the integral methods.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OutageControl {
    pub quadrature: QuadratureControl,
    pub series: SeriesControl,
}

impl OutageControl {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.series.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Univariate,
    GammaMoments,
    GammaKl,
    Simulated,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Univariate => "univariate",
            Method::GammaMoments => "gamma-moments",
            Method::GammaKl => "gamma-kl",
            Method::Simulated => "simulated",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "univariate" | "uni" => Ok(Method::Univariate),
            "gamma-moments" | "mom" => Ok(Method::GammaMoments),
            "gamma-kl" | "kl" => Ok(Method::GammaKl),
            "simulated" | "mc" => Ok(Method::Simulated),
            _ => Err(Error::domain("Method", format!("unknown method `{s}`"))),
        }
    }
}

/// What a method did to produce its number.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_abs_error: Option<f64>,
    pub evaluations: usize,
    /// Raw value before clamping to `[0, 1]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pre_clamp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<GammaFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub probability: f64,
    pub diagnostics: Diagnostics,
}

impl OutageEstimate {
    fn clamped(raw: f64, mut diagnostics: Diagnostics) -> Self {
        let probability = raw.clamp(0.0, 1.0);
        if probability != raw {
            diagnostics.pre_clamp = Some(raw);
        }
        OutageEstimate {
            probability,
            diagnostics,
        }
    }
}
