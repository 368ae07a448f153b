//! CSV and JSON emission.

use std::io::Write;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::config::{RunSpec, SweepAxis};
use crate::run::{axis_value, Row};

/// CSV record; the JSON output carries the full [`Row`] instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
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
}

impl From<&Row> for CsvRow {
    fn from(r: &Row) -> Self {
        CsvRow {
            grid_index: r.grid_index,
            fading: r.fading.clone(),
            n: r.n,
            bits: r.bits.clone(),
            d: r.d,
            method: r.method.clone(),
            threshold_db: r.threshold_db,
            probability: r.probability,
            seed: r.seed,
            error: r.error.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub threshold_db: f64,
    pub fading: String,
    pub n: usize,
    pub bits: String,
    pub d: f64,
    pub x: f64,
    pub probability: Option<f64>,
}

fn header(spec: &RunSpec) -> String {
    format!(
        "# run={} samples={} seed={}\n",
        if spec.name.is_empty() { "-" } else { &spec.name },
        spec.monte_carlo.samples,
        spec.monte_carlo.seed
    )
}

pub fn write_csv<W: Write>(mut out: W, spec: &RunSpec, rows: &[Row]) -> Result<()> {
    out.write_all(header(spec).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonReport<'a> {
    spec: &'a RunSpec,
    rows: &'a [Row],
}

pub fn write_json<W: Write>(mut out: W, spec: &RunSpec, rows: &[Row]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &JsonReport { spec, rows })?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Curves for plotting: one series per method, threshold and fixed
/// parameters, ordered along the swept axis.
pub fn sweep_rows(spec: &RunSpec, rows: &[Row]) -> Vec<SweepRow> {
    let mut out: Vec<SweepRow> = rows
        .iter()
        .map(|r| SweepRow {
            method: r.method.clone(),
            threshold_db: r.threshold_db,
            fading: r.fading.clone(),
            n: r.n,
            bits: r.bits.clone(),
            d: r.d,
            x: axis_value(spec, r),
            probability: r.probability,
        })
        .collect();
    let method_rank = |m: &str| spec.methods.iter().position(|s| s.name() == m);
    let axis = spec.sweep.map(|s| s.axis).unwrap_or(SweepAxis::D);
    // the swept coordinate itself must not split a series
    let key = |r: &SweepRow| match axis {
        SweepAxis::D => (r.n as f64, 0.0),
        SweepAxis::N => (0.0, r.d),
    };
    out.sort_by(|a, b| {
        method_rank(&a.method)
            .cmp(&method_rank(&b.method))
            .then(a.threshold_db.total_cmp(&b.threshold_db))
            .then(a.fading.cmp(&b.fading))
            .then(a.bits.cmp(&b.bits))
            .then(key(a).0.total_cmp(&key(b).0))
            .then(key(a).1.total_cmp(&key(b).1))
            .then(a.x.total_cmp(&b.x))
    });
    out
}

pub fn write_sweep_csv<W: Write>(mut out: W, spec: &RunSpec, rows: &[Row]) -> Result<()> {
    let axis = match spec.sweep.map(|s| s.axis).unwrap_or(SweepAxis::D) {
        SweepAxis::D => "d",
        SweepAxis::N => "n",
    };
    out.write_all(header(spec).as_bytes())?;
    out.write_all(format!("# x={axis}\n").as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    for r in sweep_rows(spec, rows) {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads CSV produced by [`write_csv`].
#[cfg(test)]
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::{bits_from_label, run};
    use std::collections::BTreeSet;

    const SPEC: &str = r#"
        name = "roundtrip"
        methods = ["univariate", "mom", "kl"]
        thresholds_db = [-5.0, 0.0, 2.5]
        [scenario]
        n = [4, 9]
        bits = [3, "inf"]
        d = [15.0, 75.0]
        gamma_s_db = 73.0
        [[scenario.fading]]
        name = "base"
        sd = [0.5, 0.8]
        sr = [1.41, 2.0]
        rd = [1.52, 2.5]
        [[scenario.fading]]
        name = "ray"
        sd = [0.0, 1.0]
        sr = [0.0, 1.0]
        rd = [0.0, 1.0]
        [sweep]
        axis = "d"
    "#;

    #[test]
    fn csv_round_trip_recovers_grid() {
        let spec = RunSpec::parse(SPEC).unwrap();
        let rows = run(&spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &spec, &rows).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());

        let parsed: BTreeSet<_> = back
            .iter()
            .map(|r| (r.grid_index, r.fading.clone(), r.n, format!("{:?}", bits_from_label(&r.bits)), r.d.to_bits()))
            .collect();
        let expected: BTreeSet<_> = spec
            .grid()
            .unwrap()
            .into_iter()
            .map(|p| (p.index, p.fading, p.n, format!("{:?}", Some(p.bits)), p.d.to_bits()))
            .collect();
        assert_eq!(parsed, expected);
        for (a, b) in back.iter().zip(&rows) {
            assert_eq!(a.probability, b.probability);
        }
    }

    #[test]
    fn sweep_series_are_ordered_along_axis() {
        let spec = RunSpec::parse(SPEC).unwrap();
        let rows = run(&spec).unwrap();
        let sweep = sweep_rows(&spec, &rows);
        assert_eq!(sweep.len(), rows.len());
        for pair in sweep.chunks(2) {
            assert_eq!(pair[0].method, pair[1].method);
            assert_eq!(pair[0].n, pair[1].n);
            assert!(pair[0].x < pair[1].x);
        }
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &spec, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# run=roundtrip samples=1000000 seed=1\n# x=d\n"));
    }

    #[test]
    fn json_carries_diagnostics() {
        let spec = RunSpec::parse(SPEC).unwrap();
        let rows = run(&spec).unwrap();
        let mut buf = Vec::new();
        write_json(&mut buf, &spec, &rows).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), rows.len());
        assert!(v["rows"][0]["diagnostics"]["series_terms"].as_u64().unwrap() > 0);
        assert_eq!(v["rows"][3]["diagnostics"]["fit"]["method"], "moment-match");
        assert_eq!(v["spec"]["name"], "roundtrip");
    }
}
