mod common;

use common::{base, setup};
use irs_outage::moments::{snr_moments, PhaseBits};
use irs_outage::montecarlo::{empirical_op, simulate_snr, McConfig};
use irs_outage::outage::{op_exact_small_n, op_univariate, OutageControl, OutageQuery};
use proptest::prelude::*;

fn q(db: f64) -> OutageQuery {
    OutageQuery::from_db(db).unwrap()
}

// The univariate reduction is an approximation, but for these setups its
// error is far below the simulation noise allowed here.
#[test]
fn univariate_tracks_simulation() {
    let cases = [
        (base(8, PhaseBits::Finite(3)), 11),
        (setup(20, PhaseBits::Finite(2), 60.0, [(1.0, 1.5), (0.3, 1.0), (2.0, 3.0)]), 12),
    ];
    for (sc, seed) in cases {
        let cdf = simulate_snr(&sc, &McConfig::new(300_000, seed)).unwrap();
        for db in [-10.0, -5.0, -1.0, 2.0] {
            let p = op_univariate(&sc, &q(db), &OutageControl::default()).unwrap().probability;
            let e = empirical_op(&cdf, &q(db));
            assert!((p - e).abs() < 0.004, "{db} dB: {p} vs {e}");
        }
    }
}

#[test]
fn exact_single_element_matches_simulation() {
    let sc = base(1, PhaseBits::Finite(2));
    let nu = 500_000;
    let cdf = simulate_snr(&sc, &McConfig::new(nu, 5)).unwrap();
    for db in [-12.0, -6.0, -2.0] {
        let p = op_exact_small_n(&sc, &q(db), &OutageControl::default()).unwrap().probability;
        let e = empirical_op(&cdf, &q(db));
        let sigma = (p * (1.0 - p) / nu as f64).sqrt();
        assert!((p - e).abs() < 4.0 * sigma, "{db} dB: {p} vs {e}");
    }
}

#[test]
fn moments_match_sample_moments_without_direct_link() {
    let sc = base(30, PhaseBits::Finite(1)).without_sd();
    let m = snr_moments(&sc).unwrap();
    let s = simulate_snr(&sc, &McConfig::new(400_000, 8)).unwrap().raw_moments();
    assert!((m.m1 - s.m1).abs() < 4.0 * s.se1);
    assert!((m.m2 - s.m2).abs() < 4.0 * s.se2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn more_elements_never_hurt(n in 1usize..60, bits in 1u32..6, db in -12.0f64..3.0) {
        let ctl = OutageControl::default();
        let small = op_univariate(&base(n, PhaseBits::Finite(bits)), &q(db), &ctl).unwrap().probability;
        let large = op_univariate(&base(n + 10, PhaseBits::Finite(bits)), &q(db), &ctl).unwrap().probability;
        prop_assert!(large <= small + 1e-9);
    }

    #[test]
    fn finer_phases_never_hurt(n in 2usize..60, bits in 1u32..8, db in -12.0f64..3.0) {
        let ctl = OutageControl::default();
        let coarse = op_univariate(&base(n, PhaseBits::Finite(bits)), &q(db), &ctl).unwrap().probability;
        let fine = op_univariate(&base(n, PhaseBits::Finite(bits + 1)), &q(db), &ctl).unwrap().probability;
        prop_assert!(fine <= coarse + 1e-9);
    }
}
