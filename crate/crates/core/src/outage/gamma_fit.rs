//! Gamma approximations of the SNR law.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::fading::{double_km_log_mean, double_km_mean, DoubleKmParams};
use crate::moments::{snr_moments, Scenario, SnrMoments};
use crate::specfun::{digamma_minus_ln, kummer_1f1, ln_gamma, reg_lower_gamma};

use super::{Diagnostics, OutageEstimate, OutageQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    MomentMatch,
    Kl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
    pub method: FitMethod,
}

impl GammaFit {
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        reg_lower_gamma(self.shape, x / self.scale)
    }
}

/// Matches the first two moments: `theta = var / m1`, `k = m1 / theta`.
pub fn gamma_fit_moments(m: &SnrMoments) -> Result<GammaFit> {
    check_moments(m)?;
    let scale = m.variance() / m.m1;
    Ok(GammaFit {
        shape: m.m1 / scale,
        scale,
        method: FitMethod::MomentMatch,
    })
}

fn check_moments(m: &SnrMoments) -> Result<()> {
    check_finite("gamma_fit", "m1", m.m1)?;
    check_finite("gamma_fit", "m2", m.m2)?;
    if m.m1 <= 0.0 {
        return Err(Error::domain("gamma_fit", "first moment must be positive"));
    }
    if m.variance() <= 0.0 {
        return Err(Error::Degenerate(format!(
            "variance {} is not positive (m1 = {}, m2 = {})",
            m.variance(),
            m.m1,
            m.m2
        )));
    }
    Ok(())
}

/// Gamma CDF at `x` (in units of the scale) through
/// `x^k / Gamma(k+1) 1F1(k; k+1; -x)`, evaluated in logs.
pub fn gamma_cdf_kummer(shape: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let f = kummer_1f1(shape, shape + 1.0, -x)?;
    Ok((shape * x.ln() - ln_gamma(shape + 1.0) + f.ln()).exp().min(1.0))
}

/// Outage probability under a fitted Gamma law.
pub fn gamma_cdf_op(f: &GammaFit, q: &OutageQuery) -> Result<f64> {
    let x = q.threshold / f.scale;
    let p = reg_lower_gamma(f.shape, x)?;
    #[cfg(debug_assertions)]
    if x < 500.0 {
        let alt = gamma_cdf_kummer(f.shape, x)?;
        debug_assert!((alt - p).abs() <= 1e-10, "gamma cdf forms disagree: {alt} vs {p}");
    }
    Ok(p)
}

/// Matches `E[gamma]` and `E[ln gamma]`, with the log-moment taken from the
/// second-order expansion `ln m1 - var / (2 m1^2)`.
pub fn gamma_fit_kl(m: &SnrMoments) -> Result<GammaFit> {
    check_moments(m)?;
    let log_mean = m.m1.ln() - 0.5 * m.variance() / (m.m1 * m.m1);
    gamma_fit_kl_with_log_mean(m.m1, log_mean)
}

/// Solves `psi(k) - ln k = E[ln gamma] - ln E[gamma]` for `k`, then
/// `theta = E[gamma] / k`.
pub fn gamma_fit_kl_with_log_mean(mean: f64, log_mean: f64) -> Result<GammaFit> {
    check_finite("gamma_fit_kl", "mean", mean)?;
    check_finite("gamma_fit_kl", "log_mean", log_mean)?;
    if mean <= 0.0 {
        return Err(Error::domain("gamma_fit_kl", "mean must be positive"));
    }
    let target = log_mean - mean.ln();
    let f = |ln_k: f64| digamma_minus_ln(ln_k.exp());
    let (mut lo, mut hi) = (1e-6f64.ln(), 1e9f64.ln());
    if !(f(lo)? < target && target < f(hi)?) {
        return Err(Error::RootNotBracketed { func: "gamma_fit_kl" });
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shape = (0.5 * (lo + hi)).exp();
    Ok(GammaFit {
        shape,
        scale: mean / shape,
        method: FitMethod::Kl,
    })
}

fn estimate(fit: GammaFit, p: f64) -> OutageEstimate {
    OutageEstimate {
        probability: p,
        diagnostics: Diagnostics {
            fit: Some(fit),
            ..Diagnostics::default()
        },
    }
}

/// Moment-matched Gamma outage probability, using the moment formulas that
/// fit the scenario (with or without direct link and phase error).
pub fn op_gamma_moments(sc: &Scenario, q: &OutageQuery) -> Result<OutageEstimate> {
    let fit = gamma_fit_moments(&snr_moments(sc)?)?;
    Ok(estimate(fit, gamma_cdf_op(&fit, q)?))
}

/// KL-fitted Gamma outage probability from the SNR moments.
pub fn op_gamma_kl(sc: &Scenario, q: &OutageQuery) -> Result<OutageEstimate> {
    let fit = gamma_fit_kl(&snr_moments(sc)?)?;
    Ok(estimate(fit, gamma_cdf_op(&fit, q)?))
}

/// Without direct link and phase error, `sqrt(gamma) = sqrt(gamma_s) alpha
/// sum R_sr R_rd`. Each product is fitted by a Gamma law with its exact mean
/// and log-mean, so the sum is Gamma with `N` times the shape.
pub fn op_kl_no_sd_no_phase(sc: &Scenario, q: &OutageQuery) -> Result<OutageEstimate> {
    sc.validate()?;
    if sc.sd.is_some() || !sc.bits.is_infinite() {
        return Err(Error::domain(
            "op_kl_no_sd_no_phase",
            "needs a scenario without direct link and with continuous phases",
        ));
    }
    let product = DoubleKmParams::new(sc.sr, sc.rd, 1.0)?;
    let per = gamma_fit_kl_with_log_mean(double_km_mean(&product)?, double_km_log_mean(&product)?)?;
    let fit = GammaFit {
        shape: sc.n_elements as f64 * per.shape,
        scale: per.scale,
        method: FitMethod::Kl,
    };
    let x = (q.threshold / sc.gamma_s).sqrt() / sc.alpha;
    Ok(estimate(fit, fit.cdf(x)?))
}
