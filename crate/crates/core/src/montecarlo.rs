//! Monte Carlo oracle for the received SNR and goodness-of-fit tools.
//!
//! Draws are produced in chunks of `batch` samples. Chunk `i` uses a ChaCha8
//! generator seeded with `seed` on stream `i`, so the merged sample does not
//! depend on how chunks are scheduled.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fading::KappaMuSampler;
use crate::moments::Scenario;
use crate::outage::OutageQuery;

/// Generator family recorded in output metadata.
pub const GENERATOR: &str = "ChaCha8 (stream = chunk index)";

const FILE_MAGIC: &[u8; 8] = b"IRSSNR01";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub batch: usize,
    #[serde(default)]
    pub execution: Execution,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            batch: samples.clamp(1, 1 << 16),
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::domain("McConfig", "samples must be positive"));
        }
        if self.batch == 0 || self.batch > self.samples {
            return Err(Error::domain(
                "McConfig",
                format!("batch must lie in [1, {}], got {}", self.samples, self.batch),
            ));
        }
        Ok(())
    }
}

/// Runs `draw` `mc.samples` times over independent chunk streams and returns
/// the draws in chunk order.
pub fn simulate_with<F>(mc: &McConfig, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    mc.validate()?;
    let chunks = mc.samples.div_ceil(mc.batch);
    let parts = mc.execution.map(chunks, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        rng.set_stream(i as u64);
        let len = mc.batch.min(mc.samples - i * mc.batch);
        (0..len).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

/// Draws the received SNR of one scenario.
#[derive(Debug, Clone)]
pub struct SnrSampler {
    sd: Option<KappaMuSampler>,
    sr: KappaMuSampler,
    rd: KappaMuSampler,
    n: usize,
    half_width: f64,
    alpha: f64,
    gamma_s: f64,
}

impl SnrSampler {
    pub fn new(sc: &Scenario) -> Result<Self> {
        sc.validate()?;
        Ok(SnrSampler {
            sd: sc.sd.as_ref().map(KappaMuSampler::new).transpose()?,
            sr: KappaMuSampler::new(&sc.sr)?,
            rd: KappaMuSampler::new(&sc.rd)?,
            n: sc.n_elements,
            half_width: sc.bits.half_width(),
            alpha: sc.alpha,
            gamma_s: sc.gamma_s,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut re = self.sd.as_ref().map_or(0.0, |s| s.sample(rng));
        let mut im = 0.0;
        for _ in 0..self.n {
            let y = self.alpha * self.sr.sample(rng) * self.rd.sample(rng);
            if self.half_width > 0.0 {
                let phi = rng.random_range(-self.half_width..self.half_width);
                let (sin, cos) = phi.sin_cos();
                re += y * cos;
                im += y * sin;
            } else {
                re += y;
            }
        }
        self.gamma_s * (re * re + im * im)
    }
}

/// Sorted sample with step-function CDF evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("EmpiricalCdf", "empty sample"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("EmpiricalCdf", "sample contains NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Fraction of samples `< x`.
    pub fn fraction_below(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    /// Sample mean and second raw moment with their standard errors.
    pub fn raw_moments(&self) -> SampleMoments {
        let n = self.len() as f64;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for &v in &self.values {
            let v2 = v * v;
            s1 += v;
            s2 += v2;
            s4 += v2 * v2;
        }
        let (m1, m2) = (s1 / n, s2 / n);
        SampleMoments {
            m1,
            m2,
            se1: ((m2 - m1 * m1).max(0.0) / n).sqrt(),
            se2: ((s4 / n - m2 * m2).max(0.0) / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub m1: f64,
    pub m2: f64,
    pub se1: f64,
    pub se2: f64,
}

/// Simulated SNR sample of a scenario.
pub fn simulate_snr(sc: &Scenario, mc: &McConfig) -> Result<EmpiricalCdf> {
    let sampler = SnrSampler::new(sc)?;
    EmpiricalCdf::new(simulate_with(mc, |rng| sampler.sample(rng))?)
}

/// Fraction of simulated SNRs strictly below the threshold.
pub fn empirical_op(cdf: &EmpiricalCdf, q: &OutageQuery) -> f64 {
    cdf.fraction_below(q.threshold)
}

/// One-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub d_ks: f64,
    pub d_max: f64,
    pub tau: f64,
}

impl KsResult {
    pub fn accepts(&self) -> bool {
        self.d_ks < self.d_max
    }
}

/// Critical distance for `nu` samples at significance `tau`.
pub fn ks_critical(nu: usize, tau: f64) -> f64 {
    (-(tau / 2.0).ln() / (2.0 * nu as f64)).sqrt()
}

/// Largest gap between `model_cdf` and the empirical step function, checked
/// on both sides of every jump.
pub fn ks_statistic<F: Fn(f64) -> f64>(model_cdf: F, cdf: &EmpiricalCdf, tau: f64) -> Result<KsResult> {
    if cdf.is_empty() {
        return Err(Error::domain("ks_statistic", "empty sample"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("ks_statistic", format!("tau must lie in (0, 1), got {tau}")));
    }
    let n = cdf.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in cdf.values().iter().enumerate() {
        let f = model_cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult {
        d_ks: d,
        d_max: ks_critical(cdf.len(), tau),
        tau,
    })
}

/// Piecewise-linear interpolant of an expensive CDF on a log-spaced grid.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    ln_x: Vec<f64>,
    f: Vec<f64>,
}

impl TabulatedCdf {
    /// Tabulates `f` at `points` log-spaced abscissae in `[lo, hi]`. Values are
    /// clamped to `[0, 1]` and made nondecreasing.
    pub fn new<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || points < 2 {
            return Err(Error::domain("TabulatedCdf", "need 0 < lo < hi and at least two points"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (points - 1) as f64;
        let ln_x: Vec<f64> = (0..points).map(|i| a + step * i as f64).collect();
        let mut vals = Vec::with_capacity(points);
        let mut prev: f64 = 0.0;
        for &lx in &ln_x {
            let v = f(lx.exp())?.clamp(0.0, 1.0).max(prev);
            vals.push(v);
            prev = v;
        }
        Ok(TabulatedCdf { ln_x, f: vals })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lx = x.ln();
        let last = self.ln_x.len() - 1;
        if lx <= self.ln_x[0] {
            return self.f[0] * (lx - self.ln_x[0]).exp().min(1.0);
        }
        if lx >= self.ln_x[last] {
            return self.f[last];
        }
        let j = self.ln_x.partition_point(|&v| v <= lx) - 1;
        let t = (lx - self.ln_x[j]) / (self.ln_x[j + 1] - self.ln_x[j]);
        self.f[j] + t * (self.f[j + 1] - self.f[j])
    }
}

/// Writes samples as: 8-byte magic `IRSSNR01`, little-endian u64 seed,
/// little-endian u64 count, then `count` little-endian f64 values.
pub fn write_samples(path: &Path, seed: u64, values: &[f64]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(FILE_MAGIC)?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_samples`]; returns `(seed, values)`.
pub fn read_samples(path: &Path) -> Result<(u64, Vec<f64>)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FILE_MAGIC {
        return Err(Error::Io("not a sample file".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let seed = u64::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    Ok((seed, values))
}
