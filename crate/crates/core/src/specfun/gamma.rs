use crate::error::{check_finite, Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `psi(x) - ln(x)`, accurate for large `x` where the two terms nearly cancel.
pub fn digamma_minus_ln(x: f64) -> Result<f64> {
    check_finite("digamma", "x", x)?;
    if x <= 0.0 {
        return Err(Error::domain("digamma", format!("x must be positive, got {x}")));
    }
    // shift into the asymptotic region
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    if y != x {
        shift += (y / x).ln();
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(shift - 0.5 * inv - tail)
}

/// Digamma function `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    Ok(digamma_minus_ln(x)? + x.ln())
}

/// Returns `(P(k, x), Q(k, x))`, the regularized lower and upper incomplete
/// gamma functions. Whichever of the two is small is computed directly so it
/// keeps full relative precision.
pub fn gamma_pq(k: f64, x: f64) -> Result<(f64, f64)> {
    check_finite("gamma_pq", "k", k)?;
    if x.is_nan() {
        return Err(Error::domain("gamma_pq", "x is NaN"));
    }
    if k <= 0.0 {
        return Err(Error::domain("gamma_pq", format!("shape must be positive, got {k}")));
    }
    if x < 0.0 {
        return Err(Error::domain("gamma_pq", format!("x must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let log_pref = k * x.ln() - x - ln_gamma(k);
    if x < k + 1.0 {
        let mut ap = k;
        let mut del = 1.0 / k;
        let mut sum = del;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                let p = (sum * log_pref.exp()).min(1.0);
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::SeriesNotConverged {
            func: "gamma_pq",
            terms: MAX_ITER,
        })
    } else {
        // modified Lentz on the continued fraction for Q
        let mut b = x + 1.0 - k;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            let an = -fi * (fi - k);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                let q = (h * log_pref.exp()).min(1.0);
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::SeriesNotConverged {
            func: "gamma_pq",
            terms: MAX_ITER,
        })
    }
}

/// Regularized lower incomplete gamma `P(k, x)`.
pub fn reg_lower_gamma(k: f64, x: f64) -> Result<f64> {
    gamma_pq(k, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma `Q(k, x) = 1 - P(k, x)`.
pub fn reg_upper_gamma(k: f64, x: f64) -> Result<f64> {
    gamma_pq(k, x).map(|(_, q)| q)
}

/// Rising factorial with real increment, `Gamma(x + s) / Gamma(x)`.
pub fn pochhammer(x: f64, s: f64) -> Result<f64> {
    check_finite("pochhammer", "x", x)?;
    check_finite("pochhammer", "s", s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    if x <= 0.0 || x + s <= 0.0 {
        return Err(Error::domain(
            "pochhammer",
            format!("gamma arguments must be positive (x = {x}, x + s = {})", x + s),
        ));
    }
    let v = if s.fract() == 0.0 && s > 0.0 && s <= 64.0 {
        (0..s as usize).map(|i| x + i as f64).product()
    } else {
        (ln_gamma(x + s) - ln_gamma(x)).exp()
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "pochhammer" })
    }
}
