//! First and second moments of the received SNR.
//!
//! With `Y = R_sr R_rd` per element, the SNR is
//! `gamma_s |g_sd + alpha sum_n Y_n e^{j Phi_n}|^2`. The general case is
//! expanded term by term; the two no-SD variants go through the moments of the
//! complex sum `S = sum Y_n e^{j Phi_n}` and the no-phase variants through the
//! power sums of the real sum `T = sum Y_n`.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::fading::{km_moment, DoubleKmParams, KappaMuParams};

/// Phase-shift resolution of each element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseBits {
    Finite(u32),
    /// Continuous phases, no quantization error.
    Infinite,
}

impl PhaseBits {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PhaseBits::Infinite)
    }

    /// Half-width `pi / 2^b` of the uniform phase error, zero when infinite.
    pub fn half_width(&self) -> f64 {
        match *self {
            PhaseBits::Finite(b) => std::f64::consts::PI / 2f64.powi(b as i32),
            PhaseBits::Infinite => 0.0,
        }
    }
}

impl std::fmt::Display for PhaseBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhaseBits::Finite(b) => write!(f, "{b}"),
            PhaseBits::Infinite => write!(f, "inf"),
        }
    }
}

/// `s = E[cos Phi]` and `p = E[cos 2 Phi]` for the phase error `Phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactors {
    pub s: f64,
    pub p: f64,
    pub bits: PhaseBits,
}

pub fn phase_factors(bits: PhaseBits) -> Result<PhaseFactors> {
    match bits {
        PhaseBits::Finite(0) => Err(Error::domain("phase_factors", "need at least one bit")),
        PhaseBits::Finite(b) => {
            let levels = 2f64.powi(b as i32);
            let w = std::f64::consts::PI / levels;
            Ok(PhaseFactors {
                s: w.sin() / w,
                p: (2.0 * w).sin() / (2.0 * w),
                bits,
            })
        }
        PhaseBits::Infinite => Ok(PhaseFactors { s: 1.0, p: 1.0, bits }),
    }
}

/// One IRS-assisted link configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_elements: usize,
    pub bits: PhaseBits,
    /// Reflection amplitude.
    pub alpha: f64,
    /// Transmit SNR, linear.
    pub gamma_s: f64,
    /// Direct link; `None` when it is in permanent outage.
    pub sd: Option<KappaMuParams>,
    pub sr: KappaMuParams,
    pub rd: KappaMuParams,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        check_finite("Scenario", "alpha", self.alpha)?;
        check_finite("Scenario", "gamma_s", self.gamma_s)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain("Scenario", format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.gamma_s <= 0.0 {
            return Err(Error::domain("Scenario", "gamma_s must be positive"));
        }
        if self.n_elements == 0 && self.sd.is_none() {
            return Err(Error::domain("Scenario", "no elements and no direct link"));
        }
        if let PhaseBits::Finite(0) = self.bits {
            return Err(Error::domain("Scenario", "need at least one phase bit"));
        }
        if let Some(sd) = &self.sd {
            sd.validate()?;
        }
        self.sr.validate()?;
        self.rd.validate()
    }

    /// Cascaded per-element amplitude `sqrt(gamma_s) R_sr R_rd`.
    pub fn element(&self) -> DoubleKmParams {
        DoubleKmParams {
            sr: self.sr,
            rd: self.rd,
            snr_scale: self.gamma_s.sqrt(),
        }
    }

    pub fn with_elements(mut self, n: usize) -> Self {
        self.n_elements = n;
        self
    }

    pub fn with_bits(mut self, bits: PhaseBits) -> Self {
        self.bits = bits;
        self
    }

    pub fn without_sd(mut self) -> Self {
        self.sd = None;
        self
    }
}

/// `E[gamma]` and `E[gamma^2]`, linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrMoments {
    pub m1: f64,
    pub m2: f64,
}

impl SnrMoments {
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }
}

// m[k] = E[R^k] for k = 1..4, index 0 unused
fn link_moments(p: &KappaMuParams) -> Result<[f64; 5]> {
    Ok([
        1.0,
        km_moment(1.0, p)?,
        km_moment(2.0, p)?,
        km_moment(3.0, p)?,
        km_moment(4.0, p)?,
    ])
}

// y[k] = E[Y^k] for the per-element product
fn element_moments(sc: &Scenario) -> Result<[f64; 5]> {
    let a = link_moments(&sc.sr)?;
    let b = link_moments(&sc.rd)?;
    Ok([1.0, a[1] * b[1], a[2] * b[2], a[3] * b[3], a[4] * b[4]])
}

fn falling(n: f64) -> (f64, f64, f64) {
    (n * (n - 1.0), n * (n - 1.0) * (n - 2.0), n * (n - 1.0) * (n - 2.0) * (n - 3.0))
}

fn require_sd(sc: &Scenario, func: &'static str) -> Result<KappaMuParams> {
    sc.validate()?;
    sc.sd.ok_or_else(|| Error::domain(func, "scenario has no direct link"))
}

fn require_no_sd(sc: &Scenario, func: &'static str) -> Result<()> {
    sc.validate()?;
    if sc.sd.is_some() {
        return Err(Error::domain(func, "scenario has a direct link"));
    }
    Ok(())
}

/// Moments with direct link and quantized phases.
pub fn snr_moments_general(sc: &Scenario) -> Result<SnrMoments> {
    let sd = require_sd(sc, "snr_moments_general")?;
    let PhaseFactors { s, p, .. } = phase_factors(sc.bits)?;
    let d = link_moments(&sd)?;
    let r = link_moments(&sc.sr)?;
    let t = link_moments(&sc.rd)?;
    let n = sc.n_elements as f64;
    let al = sc.alpha;
    let (n2, n3, _) = falling(n);
    let m1 = d[2] + n * al * al * r[2] * t[2] + 2.0 * n * s * al * d[1] * r[1] * t[1]
        + n2 * al * al * (r[1] * t[1]).powi(2) * s * s;
    let (q1, q2, q3, q4) = (r[1] * t[1], r[2] * t[2], r[3] * t[3], r[4] * t[4]);
    let a2 = d[4] + 2.0 * al.powi(2) * n * q2 * d[2] + n * al.powi(4) * q4 + n2 * al.powi(4) * q2 * q2;
    let b2 = 4.0 * al.powi(2) * d[2] * (n * q2 * (1.0 + p) / 2.0 + n2 * s * s * q1 * q1);
    let c2 = n2
        * al.powi(4)
        * (2.0 * (n - 2.0) * s * s * (1.0 + p) * q2 * q1 * q1
            + q2 * q2 * (1.0 + p * p)
            + s.powi(4) * (n - 2.0) * (n - 3.0) * q1.powi(4));
    let ab = 4.0 * n * al * s * (d[3] * q1 + al * al * d[1] * q3 + (n - 1.0) * al * al * d[1] * q1 * q2);
    let bc = 4.0 * al.powi(3) * s * d[1] * (n3 * s * s * q1.powi(3) + n2 * (1.0 + p) * q2 * q1);
    let ac = 2.0 * al * al * n2 * s * s * q1 * (d[2] * q1 + al * al * (2.0 * q3 + q1 * q2 * (n - 2.0)));
    let m2 = a2 + b2 + c2 + ab + bc + ac;
    finish(sc.gamma_s * m1, sc.gamma_s * sc.gamma_s * m2)
}

// E[T^k] for T = sum of n i.i.d. copies with raw moments y
fn real_sum_moments(n: f64, y: &[f64; 5]) -> [f64; 5] {
    let (n2, n3, n4) = falling(n);
    [
        1.0,
        n * y[1],
        n * y[2] + n2 * y[1] * y[1],
        n * y[3] + 3.0 * n2 * y[2] * y[1] + n3 * y[1].powi(3),
        n * y[4] + 4.0 * n2 * y[3] * y[1] + 3.0 * n2 * y[2] * y[2] + 6.0 * n3 * y[2] * y[1] * y[1]
            + n4 * y[1].powi(4),
    ]
}

// E|S|^2 and E|S|^4 for S = sum of n i.i.d. Y e^{j Phi}
fn complex_sum_moments(n: f64, y: &[f64; 5], f: &PhaseFactors) -> (f64, f64) {
    let (s, p) = (f.s, f.p);
    let (n2, n3, n4) = falling(n);
    let abs2 = n * y[2] + n2 * y[1] * y[1] * s * s;
    let abs4 = n * y[4]
        + n2 * (y[2] * y[2] * (2.0 + p * p) + 4.0 * y[3] * y[1] * s * s)
        + n3 * y[2] * y[1] * y[1] * s * s * (4.0 + 2.0 * p)
        + n4 * (y[1] * s).powi(4);
    (abs2, abs4)
}

/// Moments with direct link and perfect phase alignment.
pub fn snr_moments_no_phase(sc: &Scenario) -> Result<SnrMoments> {
    let sd = require_sd(sc, "snr_moments_no_phase")?;
    let d = link_moments(&sd)?;
    let t = real_sum_moments(sc.n_elements as f64, &element_moments(sc)?);
    let al = sc.alpha;
    // (g + alpha T)^k by the binomial theorem
    let m1 = d[2] + 2.0 * al * d[1] * t[1] + al * al * t[2];
    let m2 = d[4]
        + 4.0 * al * d[3] * t[1]
        + 6.0 * al.powi(2) * d[2] * t[2]
        + 4.0 * al.powi(3) * d[1] * t[3]
        + al.powi(4) * t[4];
    finish(sc.gamma_s * m1, sc.gamma_s * sc.gamma_s * m2)
}

/// Moments without direct link, quantized phases.
pub fn snr_moments_no_sd(sc: &Scenario) -> Result<SnrMoments> {
    require_no_sd(sc, "snr_moments_no_sd")?;
    let f = phase_factors(sc.bits)?;
    let (abs2, abs4) = complex_sum_moments(sc.n_elements as f64, &element_moments(sc)?, &f);
    let g = sc.gamma_s * sc.alpha * sc.alpha;
    finish(g * abs2, g * g * abs4)
}

/// Moments without direct link and with perfect phase alignment.
pub fn snr_moments_no_sd_no_phase(sc: &Scenario) -> Result<SnrMoments> {
    require_no_sd(sc, "snr_moments_no_sd_no_phase")?;
    let t = real_sum_moments(sc.n_elements as f64, &element_moments(sc)?);
    let g = sc.gamma_s * sc.alpha * sc.alpha;
    finish(g * t[2], g * g * t[4])
}

/// Picks the variant matching the scenario's direct link and phase bits.
pub fn snr_moments(sc: &Scenario) -> Result<SnrMoments> {
    match (sc.sd.is_some(), sc.bits.is_infinite()) {
        (true, false) => snr_moments_general(sc),
        (true, true) => snr_moments_no_phase(sc),
        (false, false) => snr_moments_no_sd(sc),
        (false, true) => snr_moments_no_sd_no_phase(sc),
    }
}

fn finish(m1: f64, m2: f64) -> Result<SnrMoments> {
    if !(m1.is_finite() && m2.is_finite()) {
        return Err(Error::Overflow { func: "snr_moments" });
    }
    Ok(SnrMoments { m1, m2 })
}
