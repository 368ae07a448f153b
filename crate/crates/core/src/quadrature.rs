//! Globally adaptive 15-point Gauss–Kronrod quadrature (QUADPACK QAG style).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0)
        {
            return Err(Error::domain(
                "QuadratureControl",
                "tolerances must be nonnegative and not both zero",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("QuadratureControl", "max_subdivisions must be positive"));
        }
        Ok(())
    }
}

impl Default for QuadratureControl {
    fn default() -> Self {
        QuadratureControl {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let tiny = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && error < tiny {
        error = tiny;
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    ctl: &QuadratureControl,
) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], ctl)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, seeding the adaptive
/// partition with the given interior points. `breaks` must be sorted.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    ctl: &QuadratureControl,
) -> Result<Integral> {
    if breaks.len() < 2 {
        return Err(Error::domain("integrate", "need at least two break points"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&mut f, w[0], w[1]));
            evaluations += 15;
        } else if w[1] < w[0] {
            return Err(Error::domain("integrate", "break points must be sorted"));
        }
    }
    let mut subdivisions = heap.len();
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        let target = ctl.abs_tol.max(ctl.rel_tol * total.abs());
        if err <= target || heap.is_empty() {
            return Ok(Integral {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if subdivisions >= ctl.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                func: "integrate",
                estimate: err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept what we have
            let total: f64 = heap.iter().map(|s| s.value).sum::<f64>() + worst.value;
            let err: f64 = heap.iter().map(|s| s.error).sum::<f64>() + worst.error;
            return Ok(Integral {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        heap.push(kronrod15(&mut f, worst.a, mid));
        heap.push(kronrod15(&mut f, mid, worst.b));
        evaluations += 30;
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadratureControl::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_and_singular_integrands() {
        let ctl = QuadratureControl {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        };
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &ctl).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        let r = integrate(|x| (-(x - 3.0).powi(2) * 100.0).exp(), 0.0, 10.0, &ctl).unwrap();
        assert!((r.value - (std::f64::consts::PI / 100.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence() {
        let ctl = QuadratureControl {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &ctl).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
