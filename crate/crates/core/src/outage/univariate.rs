//! Univariate dimension reduction.
//!
//! The outage event, conditioned on the cascaded amplitudes `X_n` and phase
//! errors `Phi_n`, has probability `F_sd(r)` with
//! `r = (sqrt(gamma - (Im v)^2) - Re v) / sqrt(gamma_s)` and
//! `v = alpha sum X_n e^{j Phi_n}`. The 2N-dimensional expectation is replaced
//! by the sum of the 2N one-dimensional expectations taken with the other
//! variables at their means (`X = mu`, `Phi = 0`), minus `2N - 1` copies of
//! the value at the mean point.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::fading::{double_km_mean, km_cdf, DoubleKmSeries, KappaMuParams};
use crate::moments::Scenario;
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureControl};
use crate::specfun::{ln_bessel_k_ladder, ln_gamma, reg_lower_gamma};

use super::{Diagnostics, OutageControl, OutageEstimate, OutageQuery};

#[derive(Debug, Clone)]
enum Kernel {
    Series(DoubleKmSeries),
    // single Bessel term when both cascaded links have kappa = 0
    Nakagami { c: f64, m1: f64, m2: f64, ln_norm: f64 },
}

impl Kernel {
    fn pdf(&self, x: f64) -> Result<f64> {
        match self {
            Kernel::Series(s) => s.pdf(x),
            Kernel::Nakagami { c, m1, m2, ln_norm } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                let z = c * x;
                let ln_k = ln_bessel_k_ladder(m1 - m2, 1, 2.0 * z)?[0];
                Ok((ln_norm + (m1 + m2 - 1.0) * z.ln() + ln_k).exp())
            }
        }
    }

    fn upper_support(&self) -> f64 {
        match self {
            Kernel::Series(s) => s.upper_support(),
            Kernel::Nakagami { c, m1, m2, .. } => {
                let q = |s: f64| s + 10.0 * s.sqrt() + 30.0;
                (q(*m1) * q(*m2)).sqrt() / c
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum DirectCdf {
    KappaMu(KappaMuParams),
    Rayleigh { power: f64 },
    Nakagami { m: f64, power: f64 },
}

impl DirectCdf {
    fn eval(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        match *self {
            DirectCdf::KappaMu(p) => km_cdf(r, &p),
            DirectCdf::Rayleigh { power } => Ok(-(-r * r / power).exp_m1()),
            DirectCdf::Nakagami { m, power } => reg_lower_gamma(m, m * r * r / power),
        }
    }
}

/// Evaluates the dimension-reduction approximation for one scenario at any
/// number of thresholds, building the density series once.
#[derive(Debug, Clone)]
pub struct UnivariateSolver {
    scenario: Scenario,
    kernel: Kernel,
    direct: DirectCdf,
    mean: f64,
    quadrature: QuadratureControl,
    no_phase: bool,
}

impl UnivariateSolver {
    /// General kappa-mu path.
    pub fn new(sc: &Scenario, ctl: &OutageControl) -> Result<Self> {
        let sd = Self::check(sc, ctl)?;
        let series = DoubleKmSeries::new(&sc.element(), &ctl.series)?;
        Self::build(sc, ctl, Kernel::Series(series), DirectCdf::KappaMu(sd))
    }

    /// Closed-form path for `kappa = 0` on every link.
    pub fn nakagami(sc: &Scenario, ctl: &OutageControl) -> Result<Self> {
        let sd = Self::check(sc, ctl)?;
        if sd.kappa != 0.0 || sc.sr.kappa != 0.0 || sc.rd.kappa != 0.0 {
            return Err(Error::domain("op_univariate_nakagami", "all links need kappa = 0"));
        }
        let (m1, m2) = (sc.sr.mu, sc.rd.mu);
        let c = (sc.sr.rate() * sc.rd.rate()).sqrt() / sc.gamma_s.sqrt();
        let kernel = Kernel::Nakagami {
            c,
            m1,
            m2,
            ln_norm: 4f64.ln() + c.ln() - ln_gamma(m1) - ln_gamma(m2),
        };
        let direct = if sd.mu == 1.0 {
            DirectCdf::Rayleigh { power: sd.power }
        } else {
            DirectCdf::Nakagami {
                m: sd.mu,
                power: sd.power,
            }
        };
        Self::build(sc, ctl, kernel, direct)
    }

    /// Closed-form path for Rayleigh fading on every link.
    pub fn rayleigh(sc: &Scenario, ctl: &OutageControl) -> Result<Self> {
        let sd = Self::check(sc, ctl)?;
        if !(sd.is_rayleigh() && sc.sr.is_rayleigh() && sc.rd.is_rayleigh()) {
            return Err(Error::domain("op_univariate_rayleigh", "all links need kappa = 0, mu = 1"));
        }
        Self::nakagami(sc, ctl)
    }

    /// Drops the phase-error terms regardless of the scenario's bit count.
    pub fn without_phase_error(mut self) -> Self {
        self.no_phase = true;
        self
    }

    fn check(sc: &Scenario, ctl: &OutageControl) -> Result<KappaMuParams> {
        sc.validate()?;
        ctl.validate()?;
        sc.sd
            .ok_or_else(|| Error::domain("op_univariate", "the approximation needs the direct link"))
    }

    fn build(sc: &Scenario, ctl: &OutageControl, kernel: Kernel, direct: DirectCdf) -> Result<Self> {
        Ok(UnivariateSolver {
            scenario: *sc,
            kernel,
            direct,
            mean: double_km_mean(&sc.element())?,
            quadrature: ctl.quadrature,
            no_phase: sc.bits.is_infinite(),
        })
    }

    /// Mean `mu` of one cascaded amplitude `sqrt(gamma_s) R_sr R_rd`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn eval(&self, q: &OutageQuery) -> Result<OutageEstimate> {
        let sc = &self.scenario;
        let n = sc.n_elements as f64;
        let alpha = sc.alpha;
        let root_g = q.threshold.sqrt();
        let root_s = sc.gamma_s.sqrt();
        let am = alpha * self.mean;
        let failure = RefCell::new(None::<Error>);
        let fsd = |r: f64| -> f64 {
            match self.direct.eval(r) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let mut diag = Diagnostics::default();
        if let Kernel::Series(s) = &self.kernel {
            diag.series_terms = Some(s.terms_used());
            diag.truncated_mass = Some(s.truncated_mass());
        }
        let mut abs_error = 0.0;

        // amplitude integral, gated at T1 = sqrt(gamma) - (N-1) alpha mu
        let t1 = root_g - (n - 1.0) * am;
        let mut part_x = 0.0;
        if t1 > 0.0 && n > 0.0 {
            let hi = (t1 / alpha).min(self.kernel.upper_support());
            let mut breaks = vec![0.0];
            for f in [0.5, 1.0, 2.0, 4.0] {
                if f * self.mean < hi {
                    breaks.push(f * self.mean);
                }
            }
            breaks.push(hi);
            let res = integrate_with_breaks(
                |x| {
                    let dens = match self.kernel.pdf(x) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    };
                    if dens == 0.0 {
                        return 0.0;
                    }
                    dens * fsd((t1 - alpha * x) / root_s)
                },
                &breaks,
                &self.quadrature,
            )?;
            part_x = n * res.value;
            abs_error += n * res.abs_error;
            diag.evaluations += res.evaluations;
        }

        let at_mean = fsd((root_g - n * am) / root_s);
        let w = sc.bits.half_width();
        let raw = if self.no_phase || w == 0.0 {
            part_x - (n - 1.0) * at_mean
        } else {
            // phase integral over [-w, w], folded onto [0, w]
            let res = integrate(
                |phi| {
                    let im = am * phi.sin();
                    let inner = q.threshold - im * im;
                    if inner < 0.0 {
                        return 0.0;
                    }
                    fsd((inner.sqrt() - am * phi.cos() - (n - 1.0) * am) / root_s)
                },
                0.0,
                w,
                &self.quadrature,
            )?;
            abs_error += n * res.abs_error / w;
            diag.evaluations += res.evaluations;
            part_x + n * res.value / w - (2.0 * n - 1.0) * at_mean
        };
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        diag.quad_abs_error = Some(abs_error);
        Ok(OutageEstimate::clamped(raw, diag))
    }
}

/// Dimension-reduction approximation of the outage probability.
pub fn op_univariate(sc: &Scenario, q: &OutageQuery, ctl: &OutageControl) -> Result<OutageEstimate> {
    UnivariateSolver::new(sc, ctl)?.eval(q)
}

/// The approximation with perfect phase alignment, whatever `sc.bits` says.
pub fn op_univariate_no_phase(sc: &Scenario, q: &OutageQuery, ctl: &OutageControl) -> Result<OutageEstimate> {
    UnivariateSolver::new(sc, ctl)?.without_phase_error().eval(q)
}

/// Rayleigh special case, with an exponential direct-link CDF and a single
/// `K_0` density term.
pub fn op_univariate_rayleigh(sc: &Scenario, q: &OutageQuery, ctl: &OutageControl) -> Result<OutageEstimate> {
    UnivariateSolver::rayleigh(sc, ctl)?.eval(q)
}

/// Nakagami-m special case, with a regularized-gamma direct-link CDF.
pub fn op_univariate_nakagami(sc: &Scenario, q: &OutageQuery, ctl: &OutageControl) -> Result<OutageEstimate> {
    UnivariateSolver::nakagami(sc, ctl)?.eval(q)
}
