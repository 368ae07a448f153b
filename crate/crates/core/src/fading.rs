//! kappa-mu envelopes and the product of two independent kappa-mu envelopes.
//!
//! A kappa-mu power `R^2` with mean `power` is a Poisson mixture of Gammas:
//! with `a = mu (1 + kappa) / power`, `a R^2 ~ Gamma(mu + M, 1)` where
//! `M ~ Poisson(kappa mu)`. Most closed forms below follow from that.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::specfun::{
    digamma, kummer_1f1, kummer_1f1_da, ln_bessel_k_ladder, ln_gamma, marcum_pq, pochhammer,
    CompensatedSum, SeriesControl,
};

/// Fading law of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaMuParams {
    pub kappa: f64,
    pub mu: f64,
    /// Mean squared envelope `E[R^2]`.
    pub power: f64,
}

impl KappaMuParams {
    pub fn new(kappa: f64, mu: f64, power: f64) -> Result<Self> {
        let p = KappaMuParams { kappa, mu, power };
        p.validate()?;
        Ok(p)
    }

    pub fn rayleigh(power: f64) -> Result<Self> {
        Self::new(0.0, 1.0, power)
    }

    pub fn nakagami(m: f64, power: f64) -> Result<Self> {
        Self::new(0.0, m, power)
    }

    pub fn rician(k: f64, power: f64) -> Result<Self> {
        Self::new(k, 1.0, power)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("KappaMuParams", "kappa", self.kappa)?;
        check_finite("KappaMuParams", "mu", self.mu)?;
        check_finite("KappaMuParams", "power", self.power)?;
        if self.kappa < 0.0 || self.mu <= 0.0 || self.power <= 0.0 {
            return Err(Error::domain(
                "KappaMuParams",
                format!(
                    "need kappa >= 0, mu > 0, power > 0; got ({}, {}, {})",
                    self.kappa, self.mu, self.power
                ),
            ));
        }
        Ok(())
    }

    /// Rate `a` such that `a R^2` is a Poisson-Gamma mixture with unit scale.
    pub fn rate(&self) -> f64 {
        self.mu * (1.0 + self.kappa) / self.power
    }

    /// Poisson mean `kappa mu` of the mixture index.
    pub fn lambda(&self) -> f64 {
        self.kappa * self.mu
    }

    pub fn is_rayleigh(&self) -> bool {
        self.kappa == 0.0 && self.mu == 1.0
    }
}

/// CDF of the envelope, `P[R <= r]`.
pub fn km_cdf(r: f64, p: &KappaMuParams) -> Result<f64> {
    p.validate()?;
    check_finite("km_cdf", "r", r)?;
    if r < 0.0 {
        return Err(Error::domain("km_cdf", format!("envelope must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let a = (2.0 * p.lambda()).sqrt();
    let b = (2.0 * p.rate()).sqrt() * r;
    marcum_pq(p.mu, a, b, &SeriesControl::default()).map(|(pp, _)| pp)
}

/// CDF of the power `R^2`.
pub fn km_power_cdf(w: f64, p: &KappaMuParams) -> Result<f64> {
    if w < 0.0 {
        return Err(Error::domain("km_power_cdf", format!("power must be nonnegative, got {w}")));
    }
    km_cdf(w.sqrt(), p)
}

/// Density of the power `R^2`.
pub fn km_power_pdf(w: f64, p: &KappaMuParams) -> Result<f64> {
    p.validate()?;
    check_finite("km_power_pdf", "w", w)?;
    if w <= 0.0 {
        return Ok(0.0);
    }
    let a = p.rate();
    let lambda = p.lambda();
    let aw = a * w;
    let ctl = SeriesControl::default();
    let mut sum = CompensatedSum::default();
    for m in 0..ctl.max_terms {
        let fm = m as f64;
        let s = p.mu + fm;
        let ln_pois = if lambda == 0.0 {
            0.0
        } else {
            -lambda + fm * lambda.ln() - ln_gamma(fm + 1.0)
        };
        let term = (ln_pois + (s - 1.0) * aw.ln() - aw - ln_gamma(s)).exp() * a;
        sum.add(term);
        if lambda == 0.0 {
            return Ok(sum.value());
        }
        let r = lambda / (fm + 1.0);
        // Gamma densities of higher shape are bounded by their mode value
        if r < 0.5 && fm > aw && term <= ctl.rel_tol * sum.value() {
            return Ok(sum.value());
        }
    }
    Err(Error::SeriesNotConverged {
        func: "km_power_pdf",
        terms: ctl.max_terms,
    })
}

/// Raw moment `E[R^p]` of the envelope.
pub fn km_moment(p_order: f64, p: &KappaMuParams) -> Result<f64> {
    p.validate()?;
    check_finite("km_moment", "p_order", p_order)?;
    if p_order <= 0.0 {
        return Err(Error::domain("km_moment", format!("order must be positive, got {p_order}")));
    }
    let half = 0.5 * p_order;
    let lambda = p.lambda();
    let scale = (p.power / (p.mu * (1.0 + p.kappa))).powf(half);
    // even orders: the hypergeometric factor is a terminating polynomial
    let v = if half.fract() == 0.0 {
        scale * pochhammer(p.mu, half)? * kummer_1f1(-half, p.mu, -lambda)?
    } else {
        let ln_pref = ln_gamma(p.mu + half) - ln_gamma(p.mu) - lambda;
        scale * ln_pref.exp() * kummer_1f1(p.mu + half, p.mu, lambda)?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "km_moment" })
    }
}

/// `E[ln R]` of one envelope.
pub fn km_log_mean(p: &KappaMuParams) -> Result<f64> {
    p.validate()?;
    let da = if p.kappa == 0.0 {
        0.0
    } else {
        kummer_1f1_da(0.0, p.mu, -p.lambda())?
    };
    Ok(-0.5 * (p.rate().ln() - digamma(p.mu)? + da))
}

/// Draws envelopes (or powers) of one kappa-mu link.
#[derive(Debug, Clone)]
pub struct KappaMuSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    // sum of `count` squared normals, one of them shifted by `mean`
    Gaussian { count: usize, sigma: f64, mean: f64 },
    Mixture { mu: f64, inv_rate: f64, poisson: Option<Poisson<f64>> },
}

impl KappaMuSampler {
    pub fn new(p: &KappaMuParams) -> Result<Self> {
        p.validate()?;
        let two_mu = 2.0 * p.mu;
        let kind = if two_mu.fract() == 0.0 && two_mu <= 64.0 {
            SamplerKind::Gaussian {
                count: two_mu as usize,
                sigma: (p.power / (two_mu * (1.0 + p.kappa))).sqrt(),
                mean: (p.kappa * p.power / (1.0 + p.kappa)).sqrt(),
            }
        } else {
            let lambda = p.lambda();
            let poisson = if lambda > 0.0 {
                Some(Poisson::new(lambda).map_err(|e| Error::domain("KappaMuSampler", e.to_string()))?)
            } else {
                None
            };
            SamplerKind::Mixture {
                mu: p.mu,
                inv_rate: 1.0 / p.rate(),
                poisson,
            }
        };
        Ok(KappaMuSampler { kind })
    }

    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Gaussian { count, sigma, mean } => {
                let z: f64 = rng.sample(StandardNormal);
                let first = mean + sigma * z;
                let mut acc = first * first;
                for _ in 1..*count {
                    let z: f64 = rng.sample(StandardNormal);
                    acc += sigma * sigma * z * z;
                }
                acc
            }
            SamplerKind::Mixture { mu, inv_rate, poisson } => {
                let m = poisson.as_ref().map_or(0.0, |d| d.sample(rng));
                let g = Gamma::new(mu + m, 1.0).expect("positive shape");
                g.sample(rng) * inv_rate
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_power(rng).sqrt()
    }
}

/// `n` envelope draws from a generator seeded with `seed`.
pub fn km_sample(p: &KappaMuParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("km_sample", "need at least one draw"));
    }
    let sampler = KappaMuSampler::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}

/// Product of two independent envelopes scaled by `snr_scale`:
/// `X = snr_scale * R_sr * R_rd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleKmParams {
    pub sr: KappaMuParams,
    pub rd: KappaMuParams,
    pub snr_scale: f64,
}

impl DoubleKmParams {
    pub fn new(sr: KappaMuParams, rd: KappaMuParams, snr_scale: f64) -> Result<Self> {
        let p = DoubleKmParams { sr, rd, snr_scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.sr.validate()?;
        self.rd.validate()?;
        check_finite("DoubleKmParams", "snr_scale", self.snr_scale)?;
        if self.snr_scale <= 0.0 {
            return Err(Error::domain("DoubleKmParams", "snr_scale must be positive"));
        }
        Ok(())
    }

    /// Factor `c` with `c X = sqrt(G_sr G_rd)` for unit-scale Gamma mixtures.
    fn unit_factor(&self) -> f64 {
        (self.sr.rate() * self.rd.rate()).sqrt() / self.snr_scale
    }
}

/// Truncated double series for the density of a [`DoubleKmParams`] product.
///
/// Conditional on the two Poisson indices `(m, n)`, `c X` is the square root of
/// a product of Gammas with shapes `mu_sr + m`, `mu_rd + n`, whose density is
/// `4 z^(s1+s2-1) K_(s1-s2)(2z) / (Gamma(s1) Gamma(s2))`. Indices are kept up
/// to a total `m + n` chosen from the Poisson(`lambda_sr + lambda_rd`) tail.
#[derive(Debug, Clone)]
pub struct DoubleKmSeries {
    params: DoubleKmParams,
    c: f64,
    terms: Vec<SeriesTerm>,
    // Bessel orders are delta + m - n; ladders over the nonnegative ones and
    // over the absolute values of the negative ones
    pos_start: i64,
    pos_count: usize,
    neg_start: i64,
    neg_count: usize,
    delta: f64,
    max_m: usize,
    max_n: usize,
    truncated_mass: f64,
}

#[derive(Debug, Clone, Copy)]
struct SeriesTerm {
    diff: i64,
    exponent: f64,
    ln_coef: f64,
}

impl DoubleKmSeries {
    pub fn new(p: &DoubleKmParams, ctl: &SeriesControl) -> Result<Self> {
        p.validate()?;
        ctl.validate()?;
        let l1 = p.sr.lambda();
        let l2 = p.rd.lambda();
        let total = l1 + l2;
        // choose the largest diagonal index from the Poisson tail bound
        let mut max_t = 0usize;
        let mut mass = 0.0;
        let mut tail;
        loop {
            let ft = max_t as f64;
            let pmf = if total == 0.0 {
                if max_t == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-total + ft * total.ln() - ln_gamma(ft + 1.0)).exp()
            };
            mass += pmf;
            let r = total / (ft + 1.0);
            tail = if r < 1.0 { pmf * r / (1.0 - r) } else { f64::INFINITY };
            if tail <= ctl.rel_tol * mass {
                break;
            }
            max_t += 1;
            let pairs = (max_t + 1) * (max_t + 2) / 2;
            if pairs > ctl.max_terms {
                return Err(Error::SeriesNotConverged {
                    func: "double_km_pdf",
                    terms: pairs,
                });
            }
        }
        let max_m = if l1 == 0.0 { 0 } else { max_t };
        let max_n = if l2 == 0.0 { 0 } else { max_t };
        let (mu1, mu2) = (p.sr.mu, p.rd.mu);
        let mut terms = Vec::new();
        for m in 0..=max_m {
            let fm = m as f64;
            let ln_p1 = if l1 == 0.0 { 0.0 } else { -l1 + fm * l1.ln() - ln_gamma(fm + 1.0) };
            for n in 0..=max_n.min(max_t - m) {
                let fn_ = n as f64;
                let ln_p2 = if l2 == 0.0 { 0.0 } else { -l2 + fn_ * l2.ln() - ln_gamma(fn_ + 1.0) };
                let s1 = mu1 + fm;
                let s2 = mu2 + fn_;
                terms.push(SeriesTerm {
                    diff: m as i64 - n as i64,
                    exponent: s1 + s2 - 1.0,
                    ln_coef: ln_p1 + ln_p2 + 4f64.ln() - ln_gamma(s1) - ln_gamma(s2),
                });
            }
        }
        let delta = mu1 - mu2;
        let d_lo = -(max_n as i64);
        let d_hi = max_m as i64;
        // smallest d with delta + d >= 0, largest d with delta + d < 0
        let first_pos = ((-delta).ceil() as i64).max(d_lo);
        let (pos_start, pos_count) = if first_pos <= d_hi {
            (first_pos, (d_hi - first_pos + 1) as usize)
        } else {
            (0, 0)
        };
        let last_neg = (first_pos - 1).min(d_hi);
        let (neg_start, neg_count) = if last_neg >= d_lo {
            (last_neg, (last_neg - d_lo + 1) as usize)
        } else {
            (0, 0)
        };
        Ok(DoubleKmSeries {
            params: *p,
            c: p.unit_factor(),
            terms,
            pos_start,
            pos_count,
            neg_start,
            neg_count,
            delta,
            max_m,
            max_n,
            truncated_mass: tail,
        })
    }

    pub fn params(&self) -> &DoubleKmParams {
        &self.params
    }

    /// Number of retained `(m, n)` terms.
    pub fn terms_used(&self) -> usize {
        self.terms.len()
    }

    /// Upper bound on the probability mass dropped by truncation.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Density of `c X` (the unit-scale variable) at `z > 0`.
    fn unit_pdf(&self, z: f64) -> Result<f64> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let x = 2.0 * z;
        let pos = if self.pos_count > 0 {
            ln_bessel_k_ladder(self.delta + self.pos_start as f64, self.pos_count, x)?
        } else {
            Vec::new()
        };
        let neg = if self.neg_count > 0 {
            ln_bessel_k_ladder(self.delta + self.neg_start as f64, self.neg_count, x)?
        } else {
            Vec::new()
        };
        let ln_z = z.ln();
        let mut sum = CompensatedSum::default();
        for t in &self.terms {
            let ln_k = if t.diff >= self.pos_start && self.pos_count > 0 {
                pos[(t.diff - self.pos_start) as usize]
            } else {
                neg[(self.neg_start - t.diff) as usize]
            };
            sum.add((t.ln_coef + t.exponent * ln_z + ln_k).exp());
        }
        Ok(sum.value())
    }

    /// Density of `X` at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_finite("double_km_pdf", "x", x)?;
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.c * self.unit_pdf(self.c * x)?)
    }

    /// A point beyond which the density carries negligible mass.
    pub fn upper_support(&self) -> f64 {
        let q = |s: f64| s + 10.0 * s.sqrt() + 30.0;
        let g1 = q(self.params.sr.mu + self.max_m as f64);
        let g2 = q(self.params.rd.mu + self.max_n as f64);
        (g1 * g2).sqrt() / self.c
    }
}

/// Density of the scaled product envelope `snr_scale * R_sr * R_rd`.
pub fn double_km_pdf(x: f64, p: &DoubleKmParams, ctl: &SeriesControl) -> Result<f64> {
    DoubleKmSeries::new(p, ctl)?.pdf(x)
}

/// Mean of the scaled product envelope.
pub fn double_km_mean(p: &DoubleKmParams) -> Result<f64> {
    p.validate()?;
    let factor = |l: &KappaMuParams| -> Result<f64> {
        Ok(pochhammer(l.mu, 0.5)? * kummer_1f1(-0.5, l.mu, -l.lambda())? / l.rate().sqrt())
    };
    Ok(p.snr_scale * factor(&p.sr)? * factor(&p.rd)?)
}

/// `E[ln X]` of the scaled product envelope.
pub fn double_km_log_mean(p: &DoubleKmParams) -> Result<f64> {
    p.validate()?;
    Ok(p.snr_scale.ln() + km_log_mean(&p.sr)? + km_log_mean(&p.rd)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_with_breaks, QuadratureControl};
    use crate::specfun::bessel_k;
    use proptest::prelude::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    fn base_links() -> (KappaMuParams, KappaMuParams, KappaMuParams) {
        let d_sr = (30.0f64 * 30.0 + 100.0).sqrt();
        let d_rd = (60.0f64 * 60.0 + 100.0).sqrt();
        (
            KappaMuParams::new(0.5, 0.8, 90f64.powi(-4)).unwrap(),
            KappaMuParams::new(1.41, 2.0, d_sr.powi(-4)).unwrap(),
            KappaMuParams::new(1.52, 2.5, d_rd.powi(-4)).unwrap(),
        )
    }

    fn integrate_density(series: &DoubleKmSeries) -> f64 {
        let hi = series.upper_support();
        let mean = double_km_mean(series.params()).unwrap();
        let mut breaks = vec![0.0];
        let mut k = 0.25;
        while k * mean < hi {
            breaks.push(k * mean);
            k *= 2.0;
        }
        breaks.push(hi);
        let ctl = QuadratureControl {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 2000,
        };
        integrate_with_breaks(|x| series.pdf(x).unwrap(), &breaks, &ctl).unwrap().value
    }

    #[test]
    fn cdf_endpoints_and_rayleigh() {
        let (sd, sr, _) = base_links();
        assert_eq!(km_cdf(0.0, &sd).unwrap(), 0.0);
        assert!(km_cdf(1.0, &sr).unwrap() > 1.0 - 1e-12);
        let ray = KappaMuParams::rayleigh(1.0).unwrap();
        for i in 0..50 {
            let r = 0.1 * i as f64;
            assert!((km_cdf(r, &ray).unwrap() - (1.0 - (-r * r).exp())).abs() < 1e-13);
        }
        assert!(km_cdf(-0.1, &ray).is_err());
    }

    #[test]
    fn cdf_matches_sampled_frequency() {
        let p = KappaMuParams::new(1.41, 2.0, 1.0).unwrap();
        let n = 10_000_000;
        let draws = km_sample(&p, n, 11).unwrap();
        let hits = draws.iter().filter(|&&r| r <= 1.0).count() as f64 / n as f64;
        let want = km_cdf(1.0, &p).unwrap();
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((hits - want).abs() < 3.0 * sigma, "{hits} vs {want}");
    }

    #[test]
    fn mixture_sampler_matches_cdf() {
        // non-integer 2 mu takes the Poisson-Gamma path
        let p = KappaMuParams::new(0.5, 0.8, 2.0).unwrap();
        let n = 2_000_000;
        let draws = km_sample(&p, n, 5).unwrap();
        for &r in &[0.3, 0.9, 1.4, 2.5] {
            let hits = draws.iter().filter(|&&x| x <= r).count() as f64 / n as f64;
            let want = km_cdf(r, &p).unwrap();
            let sigma = (want * (1.0 - want) / n as f64).sqrt();
            assert!((hits - want).abs() < 3.5 * sigma, "r = {r}: {hits} vs {want}");
        }
    }

    #[test]
    fn moments_closed_forms() {
        let (sd, sr, rd) = base_links();
        for p in [sd, sr, rd] {
            let m2 = km_moment(2.0, &p).unwrap();
            assert!((m2 / p.power - 1.0).abs() < 4.0 * f64::EPSILON);
        }
        let ray = KappaMuParams::rayleigh(1.0).unwrap();
        let want = std::f64::consts::PI.sqrt() / 2.0;
        assert!((km_moment(1.0, &ray).unwrap() - want).abs() < 1e-14);
        assert!(km_moment(0.0, &ray).is_err());
    }

    #[test]
    fn third_moment_matches_sampling() {
        let p = KappaMuParams::new(1.52, 2.5, 1.0).unwrap();
        let draws = km_sample(&p, 10_000_000, 3).unwrap();
        let mean3 = draws.iter().map(|r| r * r * r).sum::<f64>() / draws.len() as f64;
        let want = km_moment(3.0, &p).unwrap();
        assert!((mean3 / want - 1.0).abs() < 1e-3, "{mean3} vs {want}");
    }

    #[test]
    fn sampler_exponential_power_and_determinism() {
        let p = KappaMuParams::rayleigh(2.0).unwrap();
        let a = km_sample(&p, 200_000, 9).unwrap();
        let b = km_sample(&p, 200_000, 9).unwrap();
        assert_eq!(a, b);
        // KS distance of squared draws from Exp(mean 2)
        let mut w: Vec<f64> = a.iter().map(|r| r * r).collect();
        w.sort_by(f64::total_cmp);
        let n = w.len() as f64;
        let d = w
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-x / 2.0).exp();
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max);
        assert!(d < 1.36 / n.sqrt() * 1.3, "D = {d}");
        let mean = a.iter().sum::<f64>() / n;
        let sd = (2.0 - mean * mean).sqrt();
        assert!((mean - km_moment(1.0, &p).unwrap()).abs() < 3.0 * sd / n.sqrt());
    }

    #[test]
    fn power_pdf_integrates_to_cdf() {
        let p = KappaMuParams::new(0.5, 0.8, 1.0).unwrap();
        let ctl = QuadratureControl {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 2000,
        };
        for &w in &[0.2, 1.0, 3.0] {
            let got = integrate_with_breaks(|t| km_power_pdf(t, &p).unwrap(), &[0.0, w], &ctl)
                .unwrap()
                .value;
            let want = km_power_cdf(w, &p).unwrap();
            assert!((got - want).abs() < 1e-8, "w = {w}: {got} vs {want}");
        }
    }

    #[test]
    fn double_rayleigh_reduces_to_k0() {
        let ray = KappaMuParams::rayleigh(1.0).unwrap();
        let p = DoubleKmParams::new(ray, ray, 1.0).unwrap();
        let series = DoubleKmSeries::new(&p, &SeriesControl::default()).unwrap();
        assert_eq!(series.terms_used(), 1);
        for &x in &[0.01, 0.2, 0.5, 1.0, 3.0] {
            let want = 4.0 * x * bessel_k(0.0, 2.0 * x).unwrap();
            let got = series.pdf(x).unwrap();
            assert!((got / want - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn double_density_normalized() {
        let (_, sr, rd) = base_links();
        let gamma_s = 10f64.powf(7.3);
        let cases = [
            DoubleKmParams::new(sr, rd, gamma_s.sqrt()).unwrap(),
            DoubleKmParams::new(rd, sr, 1.0).unwrap(),
            DoubleKmParams::new(
                KappaMuParams::new(0.0, 0.7, 1.0).unwrap(),
                KappaMuParams::new(3.0, 1.0, 2.0).unwrap(),
                1.0,
            )
            .unwrap(),
            DoubleKmParams::new(
                KappaMuParams::nakagami(2.0, 1.0).unwrap(),
                KappaMuParams::nakagami(2.0, 1.0).unwrap(),
                1.0,
            )
            .unwrap(),
        ];
        for p in &cases {
            let series = DoubleKmSeries::new(p, &SeriesControl::default()).unwrap();
            let mass = integrate_density(&series);
            assert!((mass - 1.0).abs() < 1e-6, "{p:?}: {mass}");
        }
    }

    #[test]
    fn double_density_matches_histogram() {
        let p = DoubleKmParams::new(
            KappaMuParams::new(1.41, 2.0, 1.0).unwrap(),
            KappaMuParams::new(1.52, 2.5, 1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let n = 10_000_000;
        let s1 = km_sample(&p.sr, n, 21).unwrap();
        let s2 = km_sample(&p.rd, n, 22).unwrap();
        let (lo, hi) = (0.48, 0.52);
        let hits = s1.iter().zip(&s2).filter(|(a, b)| (lo..hi).contains(&(*a * *b))).count();
        let hist = hits as f64 / n as f64 / (hi - lo);
        let got = double_km_pdf(0.5, &p, &SeriesControl::default()).unwrap();
        assert!((got / hist - 1.0).abs() < 0.02, "{got} vs {hist}");
    }

    #[test]
    fn double_mean_factorizes() {
        let (sd, sr, rd) = base_links();
        for (a, b, s) in [(sr, rd, 4466.8), (sd, rd, 1.0), (sr, sd, 0.3)] {
            let p = DoubleKmParams::new(a, b, s).unwrap();
            let want = s * km_moment(1.0, &a).unwrap() * km_moment(1.0, &b).unwrap();
            assert!((double_km_mean(&p).unwrap() / want - 1.0).abs() < 1e-10);
        }
        let ray = KappaMuParams::rayleigh(1.0).unwrap();
        let p = DoubleKmParams::new(ray, ray, 1.0).unwrap();
        assert!((double_km_mean(&p).unwrap() - std::f64::consts::PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn double_mean_matches_sampling() {
        let (_, sr, rd) = base_links();
        let p = DoubleKmParams::new(sr, rd, 1.0).unwrap();
        let n = 10_000_000;
        let a = km_sample(&sr, n, 31).unwrap();
        let b = km_sample(&rd, n, 32).unwrap();
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let mean = prods.iter().sum::<f64>() / n as f64;
        let var = prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let want = double_km_mean(&p).unwrap();
        assert!((mean - want).abs() < 3.0 * (var / n as f64).sqrt(), "{mean} vs {want}");
    }

    #[test]
    fn log_mean_closed_forms() {
        let ray = KappaMuParams::rayleigh(1.0).unwrap();
        assert!((km_log_mean(&ray).unwrap() + EULER / 2.0).abs() < 1e-14);
        let p = DoubleKmParams::new(ray, ray, 1.0).unwrap();
        assert!((double_km_log_mean(&p).unwrap() + EULER).abs() < 1e-14);
        // Poisson-mixture oracle: E[ln R] = (-ln a + sum_m Pois(m) psi(mu + m)) / 2
        let (sd, sr, rd) = base_links();
        for l in [sd, sr, rd] {
            let lambda = l.lambda();
            let mut acc = 0.0;
            for m in 0..200 {
                let fm = m as f64;
                let w = (-lambda + fm * lambda.ln() - ln_gamma(fm + 1.0)).exp();
                acc += w * digamma(l.mu + fm).unwrap();
            }
            let want = 0.5 * (acc - l.rate().ln());
            assert!((km_log_mean(&l).unwrap() - want).abs() < 1e-12);
        }
        let p = DoubleKmParams::new(sr, rd, 7.0).unwrap();
        let sum = 7f64.ln() + km_log_mean(&sr).unwrap() + km_log_mean(&rd).unwrap();
        assert_eq!(double_km_log_mean(&p).unwrap(), sum);
    }

    #[test]
    fn log_mean_matches_sampling() {
        let (_, sr, rd) = base_links();
        let p = DoubleKmParams::new(sr, rd, 1.0).unwrap();
        let n = 10_000_000;
        let a = km_sample(&sr, n, 41).unwrap();
        let b = km_sample(&rd, n, 42).unwrap();
        let mean = a.iter().zip(&b).map(|(x, y)| (x * y).ln()).sum::<f64>() / n as f64;
        let want = double_km_log_mean(&p).unwrap();
        assert!((mean - want).abs() < 1e-3, "{mean} vs {want}");
    }

    proptest! {
        #[test]
        fn cdf_nondecreasing(kappa in 0.0f64..6.0, mu in 0.2f64..5.0, r in 0.0f64..3.0, dr in 0.0f64..1.0) {
            let p = KappaMuParams::new(kappa, mu, 1.0).unwrap();
            let f1 = km_cdf(r, &p).unwrap();
            let f2 = km_cdf(r + dr, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&f1));
            prop_assert!(f2 >= f1 - 1e-14);
            prop_assert!(km_cdf(50.0, &p).unwrap() > 1.0 - 1e-12);
        }

        #[test]
        fn second_moment_is_power(kappa in 0.0f64..10.0, mu in 0.1f64..8.0, power in 1e-9f64..1e3) {
            let p = KappaMuParams::new(kappa, mu, power).unwrap();
            prop_assert!((km_moment(2.0, &p).unwrap() / power - 1.0).abs() < 1e-14);
        }
    }
}
