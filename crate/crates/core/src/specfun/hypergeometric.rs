//! Kummer's confluent hypergeometric function 1F1(a; b; z) and its
//! derivative with respect to `a`.

use super::CompensatedSum;
use crate::error::{check_finite, Error, Result};

const EPS: f64 = 1e-17;
const MAX_TERMS: usize = 200_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn check_args(func: &'static str, a: f64, b: f64, z: f64) -> Result<()> {
    check_finite(func, "a", a)?;
    check_finite(func, "b", b)?;
    check_finite(func, "z", z)?;
    if is_nonpositive_integer(b) {
        return Err(Error::domain(func, format!("b = {b} is a pole")));
    }
    Ok(())
}

/// Plain Taylor series of 1F1 with compensated summation, no transformation.
/// Subject to cancellation for large negative `z`.
pub fn kummer_1f1_series(a: f64, b: f64, z: f64) -> Result<f64> {
    check_args("kummer_1f1", a, b, z)?;
    let mut sum = CompensatedSum::default();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..MAX_TERMS {
        let fk = k as f64;
        term *= (a + fk) / (b + fk) * z / (fk + 1.0);
        sum.add(term);
        if term == 0.0 {
            return Ok(sum.value());
        }
        // only stop once terms are monotonically shrinking
        let past_peak = ((a + fk + 1.0) / (b + fk + 1.0) * z / (fk + 2.0)).abs() < 1.0;
        if past_peak && term.abs() <= EPS * sum.value().abs() {
            return Ok(sum.value());
        }
    }
    Err(Error::SeriesNotConverged {
        func: "kummer_1f1",
        terms: MAX_TERMS,
    })
}

/// Confluent hypergeometric function of the first kind, 1F1(a; b; z).
///
/// Negative `z` goes through Kummer's transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)` so the summed series has no
/// alternating terms (terminating polynomials are summed directly).
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    check_args("kummer_1f1", a, b, z)?;
    if a == 0.0 || z == 0.0 {
        return Ok(1.0);
    }
    if a == b {
        return Ok(z.exp());
    }
    if is_nonpositive_integer(a) || z > 0.0 {
        return kummer_1f1_series(a, b, z);
    }
    Ok(z.exp() * kummer_1f1_series(b - a, b, -z)?)
}

/// Series for the a-derivative; returns the derivative only.
fn da_series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut dterm = 0.0;
    let mut fsum = CompensatedSum::default();
    let mut dsum = CompensatedSum::default();
    fsum.add(1.0);
    for k in 0..MAX_TERMS {
        let fk = k as f64;
        let step = z / ((b + fk) * (fk + 1.0));
        // product rule on (a)_k: d(a)_{k+1} = d(a)_k (a+k) + (a)_k
        dterm = dterm * (a + fk) * step + term * step;
        term *= (a + fk) * step;
        fsum.add(term);
        dsum.add(dterm);
        if term == 0.0 && dterm == 0.0 {
            break;
        }
        let ratio = ((a.abs() + fk + 2.0) / (b + fk + 1.0) * z / (fk + 2.0)).abs();
        let scale = dsum.value().abs().max(fsum.value().abs() * EPS);
        if ratio < 1.0 && dterm.abs() <= EPS * scale && term.abs() <= EPS * fsum.value().abs() {
            return Ok(dsum.value());
        }
        if k + 1 == MAX_TERMS {
            return Err(Error::SeriesNotConverged {
                func: "kummer_1f1_da",
                terms: MAX_TERMS,
            });
        }
    }
    Ok(dsum.value())
}

/// Partial derivative of 1F1(a; b; z) with respect to `a`.
pub fn kummer_1f1_da(a: f64, b: f64, z: f64) -> Result<f64> {
    check_args("kummer_1f1_da", a, b, z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z > 0.0 {
        return da_series(a, b, z);
    }
    // d/da [e^z 1F1(b - a; b; -z)] = -e^z d/da' 1F1(a'; b; -z) at a' = b - a
    Ok(-z.exp() * da_series(b - a, b, -z)?)
}
