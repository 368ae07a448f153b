//! Run configurations bundled into the binary, one per reproduced table or
//! plotted sweep.

pub const PRESETS: &[(&str, &str)] = &[
    ("table_varyN", include_str!("../presets/table_varyN.toml")),
    ("table_varyb", include_str!("../presets/table_varyb.toml")),
    ("table_nosd_n61", include_str!("../presets/table_nosd_n61.toml")),
    ("table_nosd_n99", include_str!("../presets/table_nosd_n99.toml")),
    ("table_relay", include_str!("../presets/table_relay.toml")),
    ("table_miso", include_str!("../presets/table_miso.toml")),
    ("table_rayleigh", include_str!("../presets/table_rayleigh.toml")),
    ("table_nakagami", include_str!("../presets/table_nakagami.toml")),
    ("table_rician", include_str!("../presets/table_rician.toml")),
    ("table_kappa_mu", include_str!("../presets/table_kappa_mu.toml")),
    ("sweep_d", include_str!("../presets/sweep_d.toml")),
    ("sweep_n", include_str!("../presets/sweep_n.toml")),
];

pub fn find(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunSpec;

    #[test]
    fn every_preset_is_valid_and_named_after_itself() {
        for (name, text) in PRESETS {
            let spec = RunSpec::parse(text).unwrap_or_else(|e| panic!("{name}: {e:#}"));
            assert_eq!(&spec.name, name);
            assert!(!spec.grid().unwrap().is_empty());
        }
        assert!(find("table_varyN").is_some());
        assert!(find("nope").is_none());
    }
}
