//! Direct integration of the outage probability for one or two elements.
//!
//! The conditional outage probability given amplitudes and phases is
//! `F_sd((sqrt(gamma - (Im v)^2) - Re v) / sqrt(gamma_s))` on the event
//! `|v| < sqrt(gamma)` and zero outside it, with `v = alpha sum X_n e^{j Phi_n}`.
//! It is averaged against the product of the amplitude densities and the
//! uniform phase densities by nested adaptive quadrature. The integration
//! limits are cut to the event so no integrand has a jump.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::fading::{km_cdf, DoubleKmSeries, KappaMuParams};
use crate::moments::Scenario;
use crate::quadrature::{integrate, QuadratureControl};

use super::{Diagnostics, OutageControl, OutageEstimate, OutageQuery};

struct Ctx<'a> {
    sd: KappaMuParams,
    series: &'a DoubleKmSeries,
    alpha: f64,
    threshold: f64,
    root_s: f64,
    quad: QuadratureControl,
    failure: RefCell<Option<Error>>,
    evaluations: RefCell<usize>,
}

impl Ctx<'_> {
    fn record(&self, e: Error) {
        self.failure.borrow_mut().get_or_insert(e);
    }

    // conditional outage probability for v / alpha = (re, im)
    fn conditional(&self, re: f64, im: f64) -> f64 {
        let (re, im) = (self.alpha * re, self.alpha * im);
        let inner = self.threshold - im * im;
        if inner <= 0.0 {
            return 0.0;
        }
        let r = (inner.sqrt() - re) / self.root_s;
        if r <= 0.0 {
            return 0.0;
        }
        km_cdf(r, &self.sd).unwrap_or_else(|e| {
            self.record(e);
            0.0
        })
    }

    fn pdf(&self, x: f64) -> f64 {
        self.series.pdf(x).unwrap_or_else(|e| {
            self.record(e);
            0.0
        })
    }

    fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match integrate(f, a, b, &self.quad) {
            Ok(r) => {
                *self.evaluations.borrow_mut() += r.evaluations;
                r.value
            }
            Err(e) => {
                self.record(e);
                0.0
            }
        }
    }
}

/// Outage probability by direct 2N-fold integration, for `N <= 2`.
pub fn op_exact_small_n(sc: &Scenario, q: &OutageQuery, ctl: &OutageControl) -> Result<OutageEstimate> {
    sc.validate()?;
    ctl.validate()?;
    let sd = sc
        .sd
        .ok_or_else(|| Error::domain("op_exact_small_n", "the direct link is required"))?;
    if sc.n_elements > 2 {
        return Err(Error::domain(
            "op_exact_small_n",
            format!("only N <= 2 is supported, got {}", sc.n_elements),
        ));
    }
    let series = DoubleKmSeries::new(&sc.element(), &ctl.series)?;
    let cx = Ctx {
        sd,
        series: &series,
        alpha: sc.alpha,
        threshold: q.threshold,
        root_s: sc.gamma_s.sqrt(),
        quad: ctl.quadrature,
        failure: RefCell::new(None),
        evaluations: RefCell::new(0),
    };
    // radius of the event in the units of X
    let radius = q.threshold.sqrt() / sc.alpha;
    let upper = series.upper_support();
    let w = sc.bits.half_width();

    let raw = match (sc.n_elements, w > 0.0) {
        (0, _) => cx.conditional(0.0, 0.0),
        (1, false) => cx.integrate(|x| cx.pdf(x) * cx.conditional(x, 0.0), 0.0, radius.min(upper)),
        (1, true) => {
            let inner = |x: f64| cx.integrate(|phi| cx.conditional(x * phi.cos(), x * phi.sin()), 0.0, w) / w;
            cx.integrate(|x| cx.pdf(x) * inner(x), 0.0, radius.min(upper))
        }
        (_, false) => {
            let inner = |x1: f64| cx.integrate(|x2| cx.pdf(x2) * cx.conditional(x1 + x2, 0.0), 0.0, (radius - x1).min(upper));
            cx.integrate(|x1| cx.pdf(x1) * inner(x1), 0.0, radius.min(upper))
        }
        (_, true) => two_elements(&cx, radius, upper, w),
    };
    let mut diag = Diagnostics {
        series_terms: Some(series.terms_used()),
        truncated_mass: Some(series.truncated_mass()),
        evaluations: cx.evaluations.into_inner(),
        ..Diagnostics::default()
    };
    if let Some(e) = cx.failure.into_inner() {
        return Err(e);
    }
    diag.quad_abs_error = Some(ctl.quadrature.abs_tol.max(ctl.quadrature.rel_tol * raw.abs()));
    Ok(OutageEstimate::clamped(raw, diag))
}

fn two_elements(cx: &Ctx<'_>, radius: f64, upper: f64, w: f64) -> f64 {
    let g = radius * radius;
    // the widest phase difference decides how far out the event reaches
    let spread = (2.0 * w).min(std::f64::consts::PI);
    let (cmin, smax) = (spread.cos(), spread.sin());
    let x1_max = if cmin >= 0.0 {
        radius
    } else if smax > 1e-12 {
        radius / smax
    } else {
        f64::INFINITY
    };
    // phase pair density 1/(4w^2), folded by the symmetry Phi -> -Phi
    let phases = |x1: f64, x2: f64| -> f64 {
        let c = (g - x1 * x1 - x2 * x2) / (2.0 * x1 * x2);
        if c <= cmin {
            return 0.0;
        }
        let gap = if c >= 1.0 { 0.0 } else { c.acos() };
        let f = |p1: f64, p2: f64| cx.conditional(x1 * p1.cos() + x2 * p2.cos(), x1 * p1.sin() + x2 * p2.sin());
        let outer = |p1: f64| {
            if gap == 0.0 {
                cx.integrate(|p2| f(p1, p2), -w, w)
            } else {
                cx.integrate(|p2| f(p1, p2), -w, p1 - gap) + cx.integrate(|p2| f(p1, p2), p1 + gap, w)
            }
        };
        cx.integrate(outer, 0.0, w) / (2.0 * w * w)
    };
    let inner = |x1: f64| {
        let disc = g - x1 * x1 * (1.0 - cmin * cmin);
        if disc <= 0.0 {
            return 0.0;
        }
        let lo = (-x1 * cmin - disc.sqrt()).max(0.0);
        let hi = (-x1 * cmin + disc.sqrt()).min(upper);
        cx.integrate(|x2| cx.pdf(x2) * phases(x1, x2), lo, hi)
    };
    cx.integrate(|x1| cx.pdf(x1) * inner(x1), 0.0, x1_max.min(upper))
}
