//! Comparison systems: a decode-and-forward relay placed where the IRS would
//! be, and a multi-antenna source using maximal ratio transmission.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::fading::{km_cdf, km_power_cdf, km_power_pdf, KappaMuParams, KappaMuSampler};
use crate::geometry::Links;
use crate::montecarlo::{simulate_with, McConfig};
use crate::outage::OutageQuery;
use crate::quadrature::{integrate_with_breaks, QuadratureControl};

/// DF relay with outage `P[min(|h_sr|^2, |h_sd|^2 + |h_rd|^2) < gamma / (f gamma_s)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfRelay {
    pub links: Links,
    pub gamma_s: f64,
    /// Fraction `f` of `gamma_s` available to each transmitting node. 1
    /// gives both source and relay the full budget; 0.5 is an even split.
    #[serde(default = "full_power")]
    pub power_fraction: f64,
    /// Replace the threshold `gamma` by `(1 + gamma)^2 - 1`, the SNR a
    /// two-slot half-duplex relay needs to carry the rate `log2(1 + gamma)`.
    #[serde(default)]
    pub half_duplex: bool,
}

fn full_power() -> f64 {
    1.0
}

impl DfRelay {
    pub fn new(links: Links, gamma_s: f64) -> Result<Self> {
        let r = DfRelay {
            links,
            gamma_s,
            power_fraction: 1.0,
            half_duplex: false,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn with_power_fraction(mut self, f: f64) -> Result<Self> {
        self.power_fraction = f;
        self.validate()?;
        Ok(self)
    }

    pub fn with_half_duplex(mut self, on: bool) -> Self {
        self.half_duplex = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("DfRelay", "gamma_s", self.gamma_s)?;
        check_finite("DfRelay", "power_fraction", self.power_fraction)?;
        if self.gamma_s <= 0.0 {
            return Err(Error::domain("DfRelay", "gamma_s must be positive"));
        }
        if !(self.power_fraction > 0.0 && self.power_fraction <= 1.0) {
            return Err(Error::domain("DfRelay", "power fraction must lie in (0, 1]"));
        }
        self.links.sd.validate()?;
        self.links.sr.validate()?;
        self.links.rd.validate()
    }

    fn channel_threshold(&self, q: &OutageQuery) -> f64 {
        let g = if self.half_duplex {
            q.threshold * (q.threshold + 2.0)
        } else {
            q.threshold
        };
        g / (self.gamma_s * self.power_fraction)
    }

    /// Monte Carlo estimate.
    pub fn op_monte_carlo(&self, q: &OutageQuery, mc: &McConfig) -> Result<f64> {
        self.validate()?;
        let t = self.channel_threshold(q);
        let sd = KappaMuSampler::new(&self.links.sd)?;
        let sr = KappaMuSampler::new(&self.links.sr)?;
        let rd = KappaMuSampler::new(&self.links.rd)?;
        let hits = simulate_with(mc, |rng| {
            let first = sr.sample_power(rng);
            let second = sd.sample_power(rng) + rd.sample_power(rng);
            if first.min(second) < t {
                1.0
            } else {
                0.0
            }
        })?;
        Ok(hits.iter().sum::<f64>() / hits.len() as f64)
    }

    /// `1 - (1 - F_sr(t)) (1 - F_sum(t))`, with the CDF of
    /// `|h_sd|^2 + |h_rd|^2` by convolution quadrature.
    pub fn op_semi_analytic(&self, q: &OutageQuery, ctl: &QuadratureControl) -> Result<f64> {
        self.validate()?;
        let t = self.channel_threshold(q);
        let f_sr = km_power_cdf(t, &self.links.sr)?;
        // put the density of the smoother (larger mu) term under the integral
        let (dens, dist) = if self.links.rd.mu >= self.links.sd.mu {
            (self.links.rd, self.links.sd)
        } else {
            (self.links.sd, self.links.rd)
        };
        let mut failure = None;
        let mut breaks = vec![0.0];
        if dens.power < t {
            breaks.push(dens.power);
        }
        breaks.push(t);
        let conv = integrate_with_breaks(
            |w| match (km_power_pdf(w, &dens), km_power_cdf((t - w).max(0.0), &dist)) {
                (Ok(a), Ok(b)) => a * b,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            &breaks,
            ctl,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let f_sum = conv.value.clamp(0.0, 1.0);
        Ok(1.0 - (1.0 - f_sr) * (1.0 - f_sum))
    }
}

/// Monte Carlo outage probability of the DF relay.
pub fn df_relay_op(relay: &DfRelay, q: &OutageQuery, mc: &McConfig) -> Result<f64> {
    relay.op_monte_carlo(q, mc)
}

/// Outage of MRT over `m` i.i.d. kappa-mu antennas,
/// `P[||h||^2 < gamma / gamma_s]`. The squared norm is itself a squared
/// kappa-mu envelope with parameters `(kappa, m mu)` and power `m` times the
/// per-antenna power.
pub fn miso_mrt_op(m: usize, sd: &KappaMuParams, gamma_s: f64, q: &OutageQuery) -> Result<f64> {
    sd.validate()?;
    check_finite("miso_mrt_op", "gamma_s", gamma_s)?;
    if m == 0 || gamma_s <= 0.0 {
        return Err(Error::domain("miso_mrt_op", "need at least one antenna and gamma_s > 0"));
    }
    let mf = m as f64;
    let total = KappaMuParams::new(sd.kappa, mf * sd.mu, mf * sd.power)?;
    km_cdf((q.threshold / gamma_s).sqrt(), &total)
}

/// Monte Carlo version of [`miso_mrt_op`], summing `m` independent draws.
pub fn miso_mrt_op_monte_carlo(
    m: usize,
    sd: &KappaMuParams,
    gamma_s: f64,
    q: &OutageQuery,
    mc: &McConfig,
) -> Result<f64> {
    if m == 0 || gamma_s <= 0.0 {
        return Err(Error::domain("miso_mrt_op", "need at least one antenna and gamma_s > 0"));
    }
    let s = KappaMuSampler::new(sd)?;
    let t = q.threshold / gamma_s;
    let hits = simulate_with(mc, |rng| {
        let norm: f64 = (0..m).map(|_| s.sample_power(rng)).sum();
        f64::from(u8::from(norm < t))
    })?;
    Ok(hits.iter().sum::<f64>() / hits.len() as f64)
}
