//! Evaluates every grid point with every requested method.

use irs_outage::baselines::{df_relay_op, miso_mrt_op, DfRelay};
use irs_outage::geometry::Links;
use irs_outage::montecarlo::{empirical_op, simulate_snr, McConfig};
use irs_outage::outage::{
    op_exact_small_n, op_gamma_kl, op_gamma_moments, Diagnostics, Method, OutageEstimate, OutageQuery,
    UnivariateSolver,
};
use serde::Serialize;

use crate::config::{GridPoint, MethodSpec, RunSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub grid_index: usize,
    pub fading: String,
    pub n: usize,
    pub bits: String,
    pub d: f64,
    pub method: String,
    pub threshold_db: f64,
    pub probability: Option<f64>,
    pub seed: Option<u64>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "is_empty")]
    pub diagnostics: Diagnostics,
}

fn is_empty(d: &Diagnostics) -> bool {
    *d == Diagnostics::default()
}

impl Row {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Seed of the simulation at one grid point. Each point gets its own stream
/// so the output does not depend on scheduling.
pub fn point_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

pub fn run(spec: &RunSpec) -> anyhow::Result<Vec<Row>> {
    let grid = spec.grid()?;
    let per_point = spec
        .monte_carlo
        .execution
        .map(grid.len(), |i| evaluate_point(spec, &grid[i]));
    Ok(per_point.into_iter().flatten().collect())
}

fn evaluate_point(spec: &RunSpec, p: &GridPoint) -> Vec<Row> {
    let mut rows = Vec::with_capacity(spec.methods.len() * spec.thresholds_db.len());
    for &m in &spec.methods {
        let values = evaluate_method(spec, p, m);
        for (&db, value) in spec.thresholds_db.iter().zip(values) {
            let (probability, diagnostics, error) = match value {
                Ok(e) => (Some(e.probability), e.diagnostics, None),
                Err(e) => (None, Diagnostics::default(), Some(e.to_string())),
            };
            rows.push(Row {
                grid_index: p.index,
                fading: p.fading.clone(),
                n: p.n,
                bits: p.bits.to_string(),
                d: p.d,
                method: m.name().to_string(),
                threshold_db: db,
                probability,
                seed: diagnostics.seed,
                error,
                diagnostics,
            });
        }
    }
    rows
}

type Value = Result<OutageEstimate, String>;

fn plain(p: f64) -> OutageEstimate {
    OutageEstimate {
        probability: p,
        diagnostics: Diagnostics::default(),
    }
}

/// One result per threshold, in threshold order.
fn evaluate_method(spec: &RunSpec, p: &GridPoint, m: MethodSpec) -> Vec<Value> {
    let sc = &p.scenario;
    let queries: Vec<Result<OutageQuery, String>> = spec
        .thresholds_db
        .iter()
        .map(|&db| OutageQuery::from_db(db).map_err(|e| e.to_string()))
        .collect();
    let each = |f: &dyn Fn(&OutageQuery) -> Value| -> Vec<Value> {
        queries.iter().map(|q| q.clone().and_then(|q| f(&q))).collect()
    };
    let fail_all = |msg: String| -> Vec<Value> { queries.iter().map(|_| Err(msg.clone())).collect() };
    let ctl = &spec.control;
    match m {
        MethodSpec::Outage(Method::Exact) => each(&|q| op_exact_small_n(sc, q, ctl).map_err(|e| e.to_string())),
        MethodSpec::Outage(Method::Univariate) => {
            let all_nakagami = [sc.sd, Some(sc.sr), Some(sc.rd)].iter().flatten().all(|l| l.kappa == 0.0);
            let solver = if all_nakagami && sc.sd.is_some() {
                UnivariateSolver::nakagami(sc, ctl)
            } else {
                UnivariateSolver::new(sc, ctl)
            };
            match solver {
                Ok(s) => each(&|q| s.eval(q).map_err(|e| e.to_string())),
                Err(e) => fail_all(e.to_string()),
            }
        }
        MethodSpec::Outage(Method::GammaMoments) => each(&|q| op_gamma_moments(sc, q).map_err(|e| e.to_string())),
        MethodSpec::Outage(Method::GammaKl) => each(&|q| op_gamma_kl(sc, q).map_err(|e| e.to_string())),
        MethodSpec::Outage(Method::Simulated) => {
            let seed = point_seed(spec.monte_carlo.seed, p.index);
            let mc = McConfig::new(spec.monte_carlo.samples, seed).with_execution(spec.monte_carlo.execution);
            match simulate_snr(sc, &mc) {
                Ok(cdf) => each(&|q| {
                    Ok(OutageEstimate {
                        probability: empirical_op(&cdf, q),
                        diagnostics: Diagnostics {
                            evaluations: cdf.len(),
                            seed: Some(seed),
                            ..Diagnostics::default()
                        },
                    })
                }),
                Err(e) => fail_all(e.to_string()),
            }
        }
        MethodSpec::DfRelay => {
            let Some(sd) = sc.sd else {
                return fail_all("df-relay needs the direct link".into());
            };
            let links = Links { sd, sr: sc.sr, rd: sc.rd };
            let relay = DfRelay::new(links, sc.gamma_s)
                .and_then(|r| r.with_power_fraction(spec.relay.power_fraction))
                .map(|r| r.with_half_duplex(spec.relay.half_duplex));
            let relay = match relay {
                Ok(r) => r,
                Err(e) => return fail_all(e.to_string()),
            };
            let seed = point_seed(spec.monte_carlo.seed, p.index);
            let mc = McConfig::new(spec.monte_carlo.samples, seed).with_execution(spec.monte_carlo.execution);
            each(&|q| {
                df_relay_op(&relay, q, &mc).map_err(|e| e.to_string()).map(|v| OutageEstimate {
                    probability: v,
                    diagnostics: Diagnostics {
                        evaluations: mc.samples,
                        seed: Some(seed),
                        ..Diagnostics::default()
                    },
                })
            })
        }
        MethodSpec::Miso => match sc.sd {
            Some(sd) => each(&|q| {
                miso_mrt_op(spec.miso.antennas, &sd, sc.gamma_s, q)
                    .map(plain)
                    .map_err(|e| e.to_string())
            }),
            None => fail_all("miso needs the direct link".into()),
        },
    }
}

/// Value of the swept axis for a row.
pub fn axis_value(spec: &RunSpec, row: &Row) -> f64 {
    match spec.sweep.map(|s| s.axis) {
        Some(crate::config::SweepAxis::N) => row.n as f64,
        _ => row.d,
    }
}

#[cfg(test)]
pub fn bits_from_label(s: &str) -> Option<irs_outage::moments::PhaseBits> {
    use irs_outage::moments::PhaseBits;
    match s {
        "inf" => Some(PhaseBits::Infinite),
        _ => s.parse().ok().map(PhaseBits::Finite),
    }
}
