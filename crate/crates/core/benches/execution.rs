use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use irs_outage::exec::Execution;
use irs_outage::geometry::{derive_links, FadingShape, GeometryConfig};
use irs_outage::moments::{PhaseBits, Scenario};
use irs_outage::montecarlo::{simulate_snr, McConfig};
use irs_outage::units::db_to_linear;

fn scenario(n: usize) -> Scenario {
    let shape = |kappa, mu| FadingShape { kappa, mu };
    let links = derive_links(
        &GeometryConfig::default(),
        shape(0.5, 0.8),
        shape(1.41, 2.0),
        shape(1.52, 2.5),
    )
    .unwrap();
    Scenario {
        n_elements: n,
        bits: PhaseBits::Finite(5),
        alpha: 1.0,
        gamma_s: db_to_linear(73.0),
        sd: Some(links.sd),
        sr: links.sr,
        rd: links.rd,
    }
}

fn snr_simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_snr");
    group.sample_size(10);
    for n in [5, 50] {
        let sc = scenario(n);
        for (name, mode) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            let mc = McConfig::new(50_000, 7).with_execution(mode);
            group.bench_with_input(BenchmarkId::new(name, n), &sc, |b, sc| {
                b.iter(|| black_box(simulate_snr(sc, &mc).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, snr_simulation);
criterion_main!(benches);
