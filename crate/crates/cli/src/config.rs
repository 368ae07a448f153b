//! Run specification: a TOML file describing a grid of scenarios, the
//! methods to apply and the thresholds to evaluate.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use irs_outage::exec::Execution;
use irs_outage::geometry::{derive_links, FadingShape, GeometryConfig};
use irs_outage::moments::{PhaseBits, Scenario};
use irs_outage::outage::{Method, OutageControl};
use irs_outage::units::db_to_linear;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub name: String,
    pub methods: Vec<MethodSpec>,
    pub thresholds_db: Vec<f64>,
    pub scenario: ScenarioGrid,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub monte_carlo: MonteCarloSpec,
    #[serde(default)]
    pub relay: RelaySpec,
    #[serde(default)]
    pub miso: MisoSpec,
    #[serde(default)]
    pub control: OutageControl,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGrid {
    pub n: Vec<usize>,
    pub bits: Vec<BitsSpec>,
    pub d: Vec<f64>,
    #[serde(default = "unit")]
    pub alpha: f64,
    pub gamma_s_db: f64,
    #[serde(default = "yes")]
    pub direct_link: bool,
    pub fading: Vec<FadingSet>,
}

/// Named (kappa, mu) pairs for the SD, SR and RD links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSet {
    pub name: String,
    pub sd: [f64; 2],
    pub sr: [f64; 2],
    pub rd: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub sd_distance: f64,
    pub height: f64,
    pub path_loss_exponent: f64,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        let g = GeometryConfig::default();
        GeometrySpec {
            sd_distance: g.sd_distance,
            height: g.height,
            path_loss_exponent: g.path_loss_exponent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSpec {
    pub samples: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        MonteCarloSpec {
            samples: 1_000_000,
            seed: 1,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaySpec {
    pub power_fraction: f64,
    pub half_duplex: bool,
}

impl Default for RelaySpec {
    fn default() -> Self {
        RelaySpec {
            power_fraction: 1.0,
            half_duplex: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisoSpec {
    pub antennas: usize,
}

impl Default for MisoSpec {
    fn default() -> Self {
        MisoSpec { antennas: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    D,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format `{s}` (expected csv or json)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Phase resolution as written in a config: an integer or `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BitsSpec {
    Finite(u32),
    Named(String),
}

impl BitsSpec {
    pub fn resolve(&self) -> Result<PhaseBits> {
        match self {
            BitsSpec::Finite(0) => bail!("bits must be at least 1"),
            BitsSpec::Finite(b) => Ok(PhaseBits::Finite(*b)),
            BitsSpec::Named(s) if s == "inf" => Ok(PhaseBits::Infinite),
            BitsSpec::Named(s) => bail!("bits must be a positive integer or \"inf\", got \"{s}\""),
        }
    }
}

/// Everything a row can be computed with: the IRS methods plus the two
/// comparison systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodSpec {
    Outage(Method),
    DfRelay,
    Miso,
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Outage(m) => m.name(),
            MethodSpec::DfRelay => "df-relay",
            MethodSpec::Miso => "miso",
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "df-relay" | "relay" => Ok(MethodSpec::DfRelay),
            "miso" => Ok(MethodSpec::Miso),
            other => Ok(MethodSpec::Outage(other.parse().map_err(|_| {
                anyhow::anyhow!(
                    "unknown method `{other}` (expected exact, univariate, gamma-moments, gamma-kl, simulated, df-relay or miso)"
                )
            })?)),
        }
    }
}

impl TryFrom<String> for MethodSpec {
    type Error = anyhow::Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodSpec> for String {
    fn from(m: MethodSpec) -> String {
        m.name().to_string()
    }
}

/// One point of the scenario grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub fading: String,
    pub n: usize,
    pub bits: PhaseBits,
    pub d: f64,
    pub geometry: GeometryConfig,
    pub scenario: Scenario,
}

fn unit() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn shape(pair: [f64; 2]) -> FadingShape {
    FadingShape {
        kappa: pair[0],
        mu: pair[1],
    }
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: RunSpec = toml::from_str(text).context("invalid run configuration")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("methods: at least one method is required");
        }
        if self.thresholds_db.is_empty() {
            bail!("thresholds_db: at least one threshold is required");
        }
        if let Some(t) = self.thresholds_db.iter().find(|t| !t.is_finite()) {
            bail!("thresholds_db: {t} is not finite");
        }
        let s = &self.scenario;
        for (field, empty) in [
            ("scenario.n", s.n.is_empty()),
            ("scenario.bits", s.bits.is_empty()),
            ("scenario.d", s.d.is_empty()),
            ("scenario.fading", s.fading.is_empty()),
        ] {
            if empty {
                bail!("{field}: list must not be empty");
            }
        }
        if s.n.contains(&0) {
            bail!("scenario.n: element counts must be at least 1");
        }
        for b in &s.bits {
            b.resolve().context("scenario.bits")?;
        }
        if !(s.alpha.is_finite() && s.alpha > 0.0) {
            bail!("scenario.alpha: must be positive, got {}", s.alpha);
        }
        if !s.gamma_s_db.is_finite() {
            bail!("scenario.gamma_s_db: must be finite");
        }
        for f in &s.fading {
            for (link, pair) in [("sd", f.sd), ("sr", f.sr), ("rd", f.rd)] {
                if !(pair[0] >= 0.0 && pair[1] > 0.0 && pair[0].is_finite() && pair[1].is_finite()) {
                    bail!(
                        "scenario.fading `{}`.{link}: need kappa >= 0 and mu > 0, got {:?}",
                        f.name,
                        pair
                    );
                }
            }
        }
        if self.monte_carlo.samples == 0 {
            bail!("monte_carlo.samples: must be positive");
        }
        if self.miso.antennas == 0 {
            bail!("miso.antennas: must be at least 1");
        }
        if !(self.relay.power_fraction > 0.0 && self.relay.power_fraction <= 1.0) {
            bail!("relay.power_fraction: must lie in (0, 1]");
        }
        self.control.validate().context("control")?;
        for &d in &s.d {
            self.geometry_at(d).validate().context("scenario.d")?;
        }
        Ok(())
    }

    pub fn geometry_at(&self, d: f64) -> GeometryConfig {
        GeometryConfig {
            sd_distance: self.geometry.sd_distance,
            d,
            height: self.geometry.height,
            path_loss_exponent: self.geometry.path_loss_exponent,
        }
    }

    /// Cartesian product in the order fading, d, n, bits (last varies
    /// fastest).
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        let s = &self.scenario;
        let mut out = Vec::new();
        for f in &s.fading {
            for &d in &s.d {
                let geometry = self.geometry_at(d);
                let links = derive_links(&geometry, shape(f.sd), shape(f.sr), shape(f.rd))
                    .with_context(|| format!("fading `{}` at d = {d}", f.name))?;
                for &n in &s.n {
                    for b in &s.bits {
                        let bits = b.resolve()?;
                        out.push(GridPoint {
                            index: out.len(),
                            fading: f.name.clone(),
                            n,
                            bits,
                            d,
                            geometry,
                            scenario: Scenario {
                                n_elements: n,
                                bits,
                                alpha: s.alpha,
                                gamma_s: db_to_linear(s.gamma_s_db),
                                sd: s.direct_link.then_some(links.sd),
                                sr: links.sr,
                                rd: links.rd,
                            },
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        methods = ["univariate", "mom"]
        thresholds_db = [-5.0, 0.0]

        [scenario]
        n = [5, 50]
        bits = [1, "inf"]
        d = [30.0]
        gamma_s_db = 73.0

        [[scenario.fading]]
        name = "base"
        sd = [0.5, 0.8]
        sr = [1.41, 2.0]
        rd = [1.52, 2.5]
    "#;

    #[test]
    fn parses_and_expands_grid() {
        let spec = RunSpec::parse(MINIMAL).unwrap();
        assert_eq!(spec.methods[1], MethodSpec::Outage(Method::GammaMoments));
        let grid = spec.grid().unwrap();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[1].bits, PhaseBits::Infinite);
        assert_eq!(grid[2].n, 50);
        assert_eq!(grid[3].index, 3);
        // 0 dB is unit SNR and 73 dB the transmit SNR
        assert!((grid[0].scenario.gamma_s - 10f64.powf(7.3)).abs() < 1e-6);
        assert!(grid[0].scenario.sd.is_some());
        assert!((grid[0].scenario.sr.power - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn empty_method_list_is_rejected() {
        let text = MINIMAL.replace(r#"["univariate", "mom"]"#, "[]");
        let err = RunSpec::parse(&text).unwrap_err();
        assert!(format!("{err:#}").contains("methods"));
    }

    #[test]
    fn parse_errors_name_the_location() {
        let text = MINIMAL.replace("n = [5, 50]", "n = [5, \"x\"]");
        let msg = format!("{:#}", RunSpec::parse(&text).unwrap_err());
        assert!(msg.contains("line"), "{msg}");
        let text = MINIMAL.replace("gamma_s_db", "gamma_db");
        let msg = format!("{:#}", RunSpec::parse(&text).unwrap_err());
        assert!(msg.contains("gamma_db"), "{msg}");
    }

    #[test]
    fn invalid_fields_are_reported() {
        for (from, to, field) in [
            ("bits = [1, \"inf\"]", "bits = [0]", "scenario.bits"),
            ("bits = [1, \"inf\"]", "bits = [\"many\"]", "scenario.bits"),
            ("d = [30.0]", "d = [95.0]", "scenario.d"),
            ("n = [5, 50]", "n = []", "scenario.n"),
            ("sd = [0.5, 0.8]", "sd = [0.5, 0.0]", "base"),
        ] {
            let msg = format!("{:#}", RunSpec::parse(&MINIMAL.replace(from, to)).unwrap_err());
            assert!(msg.contains(field), "{to}: {msg}");
        }
        assert!(RunSpec::parse(&MINIMAL.replace("\"mom\"", "\"magic\"")).is_err());
    }

    #[test]
    fn serializes_back_to_the_same_spec() {
        let spec = RunSpec::parse(MINIMAL).unwrap();
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(RunSpec::parse(&text).unwrap(), spec);
    }
}
