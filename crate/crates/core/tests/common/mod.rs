#![allow(dead_code)]

use irs_outage::geometry::{derive_links, FadingShape, GeometryConfig};
use irs_outage::moments::{PhaseBits, Scenario};
use irs_outage::units::db_to_linear;

pub type Shapes = [(f64, f64); 3];

/// (kappa, mu) for the SD, SR and RD links of the baseline setup.
pub const BASE_SHAPES: Shapes = [(0.5, 0.8), (1.41, 2.0), (1.52, 2.5)];
pub const GAMMA_S_DB: f64 = 73.0;

/// S at (0, 0), D at (90, 0), IRS at (d, 10), path-loss exponent 4, unit
/// reflection amplitude.
pub fn setup(n: usize, bits: PhaseBits, d: f64, shapes: Shapes) -> Scenario {
    let g = GeometryConfig {
        d,
        ..GeometryConfig::default()
    };
    let s = |i: usize| FadingShape {
        kappa: shapes[i].0,
        mu: shapes[i].1,
    };
    let links = derive_links(&g, s(0), s(1), s(2)).unwrap();
    Scenario {
        n_elements: n,
        bits,
        alpha: 1.0,
        gamma_s: db_to_linear(GAMMA_S_DB),
        sd: Some(links.sd),
        sr: links.sr,
        rd: links.rd,
    }
}

pub fn base(n: usize, bits: PhaseBits) -> Scenario {
    setup(n, bits, 30.0, BASE_SHAPES)
}
