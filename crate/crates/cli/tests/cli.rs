use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irs-outage")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
name = "small"
methods = ["univariate", "gamma-moments", "simulated"]
thresholds_db = [-7.0, -2.0, 2.0]

[monte_carlo]
samples = 20000
seed = 11

[scenario]
n = [3, 12]
bits = [2, "inf"]
d = [30.0]
gamma_s_db = 73.0

[[scenario.fading]]
name = "base"
sd = [0.5, 0.8]
sr = [1.41, 2.0]
rd = [1.52, 2.5]
"#;

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let a = bin(&["run", &cfg]);
    let b = bin(&["run", &cfg]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# run=small samples=20000 seed=11\n"));
    assert_eq!(text.lines().count(), 2 + 4 * 3 * 3);
}

#[test]
fn table_preset_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("varyN.csv");
    let o = bin(&[
        "table",
        "table_varyN",
        "--samples",
        "5000",
        "--seed",
        "3",
        "--methods",
        "univariate,simulated",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let univariate: Vec<f64> = text
        .lines()
        .filter(|l| l.contains(",univariate,"))
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert_eq!(univariate.len(), 21);
    // N = 5 at -12 dB and N = 100 at -2 dB
    assert!((univariate[0] - 0.2164).abs() < 0.003);
    assert!((univariate[17] - 0.7771).abs() < 0.003);
    let seeds: Vec<u64> = text
        .lines()
        .filter(|l| l.contains(",simulated,"))
        .map(|l| l.split(',').nth(8).unwrap().parse().unwrap())
        .collect();
    assert_eq!(seeds, [[3; 7], [4; 7], [5; 7]].concat());

    let list = stdout(&bin(&["table", "list"]));
    assert!(list.lines().any(|l| l == "table_relay"));
    assert!(!bin(&["table", "no_such_table"]).status.success());
}

#[test]
fn json_output_has_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = bin(&["run", &cfg, "--format", "json", "--methods", "kl,mc"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4 * 2 * 3);
    assert!(rows[0]["diagnostics"]["fit"]["shape"].as_f64().unwrap() > 0.0);
    assert_eq!(rows[3]["diagnostics"]["seed"], 11);
}

#[test]
fn numeric_failures_give_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    // the exact method only covers up to two elements
    let o = bin(&["run", &cfg, "--methods", "exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed"));
}

#[test]
fn validate_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", SMALL);
    let o = bin(&["validate", &good]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("4 grid points"));

    let bad = write(dir.path(), "bad.toml", &SMALL.replace("d = [30.0]", "d = [30.0, \"far\"]"));
    let o = bin(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line") && err.contains("bad.toml"), "{err}");

    let empty = write(dir.path(), "empty.toml", &SMALL.replace(r#"["univariate", "gamma-moments", "simulated"]"#, "[]"));
    assert!(!bin(&["validate", &empty]).status.success());
}

#[test]
fn d_sweep_is_symmetric_about_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        &(SMALL
            .replace("d = [30.0]", "d = [0.0, 20.0, 45.0, 70.0, 90.0]")
            .replace(r#"["univariate", "gamma-moments", "simulated"]"#, r#"["univariate", "gamma-kl"]"#)
            .replace("n = [3, 12]", "n = [12]")
            .replace("bits = [2, \"inf\"]", "bits = [3]")
            + "\n[sweep]\naxis = \"d\"\n"),
    );
    let o = bin(&["sweep", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("seed=11") && text.contains("# x=d"));
    let series: Vec<Vec<(f64, f64)>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("method"))
        .collect::<Vec<_>>()
        .chunks(5)
        .map(|c| {
            c.iter()
                .map(|l| {
                    let f: Vec<&str> = l.split(',').collect();
                    (f[6].parse().unwrap(), f[7].parse().unwrap())
                })
                .collect()
        })
        .collect();
    assert_eq!(series.len(), 2 * 3);
    for s in &series {
        for i in 0..5 {
            assert_eq!(s[i].0 + s[4 - i].0, 90.0);
            assert!((s[i].1 - s[4 - i].1).abs() < 1e-6, "{s:?}");
        }
        // the surface helps most next to either terminal
        assert!(s[0].1 <= s[2].1);
    }
}

#[test]
fn n_sweep_is_monotone() {
    let o = bin(&["table", "sweep_n"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<String>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("method"))
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    for s in rows.chunks(9) {
        let p: Vec<f64> = s.iter().map(|r| r[7].parse().unwrap()).collect();
        assert!(p.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{p:?}");
    }
}
