//! Structured configuration.
//!
//! A config file is TOML with one table per section. Any subset of keys may
//! be given; the file is merged over [`Config::default`] so the resolved
//! configuration always has every value materialized.
//!
//! ```toml
//! [constants]
//! p_max_dbm = 20.0
//!
//! [model]
//! xi_convention = "half_width"        # or "full_width"
//! through_loss = "transmitted_fraction" # or "literal"
//!
//! [schemes.pam4_odac]
//! delta_f_ghz = 12.0
//! pp_er_at = { "6" = 3.5 }
//!
//! [energy]
//! mr_tuning_range_nm = 2.0
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    check_tabulated_er, db_to_linear, linear_to_db, GlobalConstants, PnocProfile, ProfileKind, SchemeKind,
    SignalingParams,
};
use crate::penalty::{ModelSwitches, LAMBDA_SET};
use crate::sensitivity::{SensitivityCurve, DEFAULT_RAW_ANCHORS};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "PNOC_DSE_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub constants: GlobalConstants,
    pub model: ModelSwitches,
    pub search: SearchConfig,
    pub sensitivity: SensitivityConfig,
    pub schemes: BTreeMap<SchemeKind, SchemeConfig>,
    pub profiles: BTreeMap<ProfileKind, PnocProfile>,
    pub energy: EnergyConfig,
    pub sim: SimDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErMode {
    /// Any positive extinction ratio.
    Free,
    /// Only the ratios the published tables sweep.
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub lambdas: Vec<u32>,
    pub baud_min_gbaud: f64,
    pub baud_max_gbaud: f64,
    pub baud_step_gbaud: f64,
    /// ε values within this many dB are ties.
    pub tie_tolerance_db: f64,
    pub er_mode: ErMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lambdas: LAMBDA_SET.to_vec(),
            baud_min_gbaud: 10.0,
            baud_max_gbaud: 30.0,
            baud_step_gbaud: 0.5,
            tie_tolerance_db: 1e-9,
            er_mode: ErMode::Free,
        }
    }
}

impl SearchConfig {
    pub fn bauds(&self) -> Vec<f64> {
        let n = ((self.baud_max_gbaud - self.baud_min_gbaud) / self.baud_step_gbaud).round() as usize;
        (0..=n).map(|k| self.baud_min_gbaud + k as f64 * self.baud_step_gbaud).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    /// Raw (baud Gbaud, sensitivity dBm) anchors before regularization.
    pub anchors: Vec<(f64, f64)>,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig { anchors: DEFAULT_RAW_ANCHORS.to_vec() }
    }
}

/// Per-scheme parameters at the scheme's reference extinction ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub extinction_ratio_db: f64,
    pub fwhm_ghz: f64,
    pub q0: f64,
    pub pp_pam_db: f64,
    pub pp_intrf_db: f64,
    pub pp_er_db: f64,
    pub q_ber: f64,
    pub delta_f_ghz: f64,
    pub e_mod_pj: f64,
    /// Explicit PP^ER values keyed by extinction ratio in dB.
    #[serde(default)]
    pub pp_er_at: BTreeMap<String, f64>,
}

impl SchemeConfig {
    pub fn defaults(kind: SchemeKind) -> Self {
        let p = SignalingParams::defaults(kind);
        SchemeConfig {
            extinction_ratio_db: p.extinction_ratio_db,
            fwhm_ghz: p.fwhm_ghz,
            q0: p.q0,
            pp_pam_db: p.pp_pam_db,
            pp_intrf_db: p.pp_intrf_db,
            pp_er_db: p.pp_er_db,
            q_ber: p.q_ber,
            delta_f_ghz: p.delta_f_ghz,
            e_mod_pj: p.e_mod_pj,
            pp_er_at: BTreeMap::new(),
        }
    }

    fn explicit_pp_er(&self, er_db: f64) -> Option<f64> {
        self.pp_er_at
            .iter()
            .find(|(k, _)| k.trim().parse::<f64>().map(|v| (v - er_db).abs() < 1e-9).unwrap_or(false))
            .map(|(_, v)| *v)
    }

    /// Parameters at `er_db`. PP^ER comes from `pp_er_at` when listed, else it
    /// is scaled from the reference value by the (r+1)/(r−1) factor.
    pub fn params(&self, kind: SchemeKind, er_db: Option<f64>) -> Result<SignalingParams> {
        let er = er_db.unwrap_or(self.extinction_ratio_db);
        if !(er > 0.0) || !er.is_finite() {
            return Err(Error::Config(format!("extinction ratio must be positive, got {er}")));
        }
        let factor = |e: f64| {
            let r = db_to_linear(e);
            linear_to_db((r + 1.0) / (r - 1.0))
        };
        let pp_er = match self.explicit_pp_er(er) {
            Some(v) => v,
            None => self.pp_er_db + factor(er) - factor(self.extinction_ratio_db),
        };
        let p = SignalingParams {
            kind,
            extinction_ratio_db: er,
            fwhm_ghz: self.fwhm_ghz,
            q0: self.q0,
            pp_pam_db: self.pp_pam_db,
            pp_intrf_db: self.pp_intrf_db,
            pp_er_db: pp_er,
            q_ber: self.q_ber,
            delta_f_ghz: self.delta_f_ghz,
            e_mod_pj: self.e_mod_pj,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub e_serdes_pj: f64,
    pub e_co_opamp_pj: f64,
    pub e_ti_opamp_pj: f64,
    pub p_tuning_control_uw: f64,
    pub p_heater_uw_per_nm: f64,
    /// Thermal tuning range per MR. Required for heater power; never defaulted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mr_tuning_range_nm: Option<f64>,
    pub electrical_power_per_router_mw: f64,
    pub gi_power_mw: f64,
    pub router_energy_pj_per_hop: f64,
    pub tsv_bundle_energy_pj: f64,
    pub tsv_bundles_per_block: u32,
    pub secded_event_energy_pj: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            e_serdes_pj: 0.5,
            e_co_opamp_pj: 0.21,
            e_ti_opamp_pj: 0.24,
            p_tuning_control_uw: 385.0,
            p_heater_uw_per_nm: 800.0,
            mr_tuning_range_nm: None,
            electrical_power_per_router_mw: 10.0,
            gi_power_mw: 5.0,
            router_energy_pj_per_hop: 20.0,
            tsv_bundle_energy_pj: 6.7,
            tsv_bundles_per_block: 8,
            secded_event_energy_pj: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficPattern {
    UniformRandom,
    Hotspot,
    Permutation,
}

impl std::str::FromStr for TrafficPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform_random" | "uniform" => Ok(TrafficPattern::UniformRandom),
            "hotspot" => Ok(TrafficPattern::Hotspot),
            "permutation" => Ok(TrafficPattern::Permutation),
            _ => Err(Error::Config(format!("unknown traffic pattern '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimDefaults {
    pub packet_bits: u32,
    pub router_cycles: u32,
    pub warmup_cycles: u64,
    pub measure_cycles: u64,
    pub traffic: TrafficPattern,
    /// Fraction of traffic sent to node 0 under the hotspot pattern.
    pub hotspot_fraction: f64,
    /// Default load ladder as fractions of the design's saturation rate.
    pub load_fractions: Vec<f64>,
    pub seed: u64,
    /// Per-waveguide queue bound; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_capacity: Option<usize>,
    /// Relative accepted-vs-offered gap that flags saturation.
    pub saturation_gap: f64,
}

impl Default for SimDefaults {
    fn default() -> Self {
        SimDefaults {
            packet_bits: 512,
            router_cycles: 2,
            warmup_cycles: 2_000,
            measure_cycles: 20_000,
            traffic: TrafficPattern::UniformRandom,
            hotspot_fraction: 0.2,
            load_fractions: vec![0.1, 0.25, 0.4, 0.55, 0.7, 0.85],
            seed: 1,
            queue_capacity: None,
            saturation_gap: 0.05,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            constants: GlobalConstants::default(),
            model: ModelSwitches::default(),
            search: SearchConfig::default(),
            sensitivity: SensitivityConfig::default(),
            schemes: SchemeKind::ALL.iter().map(|&k| (k, SchemeConfig::defaults(k))).collect(),
            profiles: ProfileKind::ALL.iter().map(|&k| (k, PnocProfile::defaults(k))).collect(),
            energy: EnergyConfig::default(),
            sim: SimDefaults::default(),
        }
    }
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let over: toml::Value = toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        let mut base = toml::Value::try_from(Config::default()).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, over);
        let cfg: Config = base.try_into().map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        for p in self.profiles.values() {
            p.validate()?;
        }
        for k in SchemeKind::ALL {
            self.scheme(k, None)?;
        }
        for k in ProfileKind::ALL {
            self.profile(k)?;
        }
        self.sensitivity_curve()?;
        let s = &self.search;
        if s.lambdas.is_empty() || s.lambdas.contains(&0) || !(s.baud_step_gbaud > 0.0) || !(s.baud_min_gbaud > 0.0) || s.baud_max_gbaud < s.baud_min_gbaud {
            return Err(Error::Config("search space is empty or malformed".into()));
        }
        if let Some(r) = self.energy.mr_tuning_range_nm {
            if !(r >= 0.0) {
                return Err(Error::Config("mr_tuning_range_nm must be non-negative".into()));
            }
        }
        if self.sim.packet_bits == 0 || self.sim.packet_bits % 64 != 0 {
            return Err(Error::Config("packet_bits must be a positive multiple of 64".into()));
        }
        Ok(())
    }

    pub fn scheme(&self, kind: SchemeKind, er_db: Option<f64>) -> Result<SignalingParams> {
        if let (Some(er), ErMode::Tabulated) = (er_db, self.search.er_mode) {
            check_tabulated_er(er)?;
        }
        self.schemes
            .get(&kind)
            .ok_or_else(|| Error::Config(format!("no parameters for scheme {kind}")))?
            .params(kind, er_db)
    }

    pub fn profile(&self, kind: ProfileKind) -> Result<&PnocProfile> {
        let p = self
            .profiles
            .get(&kind)
            .ok_or_else(|| Error::Config(format!("no profile {kind}")))?;
        if p.name != kind {
            return Err(Error::Config(format!("profile table '{kind}' declares name '{}'", p.name)));
        }
        Ok(p)
    }

    pub fn sensitivity_curve(&self) -> Result<SensitivityCurve> {
        SensitivityCurve::new(&self.sensitivity.anchors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let c = Config::default();
        let text = c.to_toml_string().unwrap();
        assert_eq!(Config::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn partial_override_merges() {
        let c = Config::from_toml_str(
            "[constants]\np_max_dbm = 10.0\n[schemes.pam4_odac]\ndelta_f_ghz = 7.5\npp_er_at = { \"6\" = 3.0 }\n[energy]\nmr_tuning_range_nm = 1.5\n",
        )
        .unwrap();
        assert_eq!(c.constants.p_max_dbm, 10.0);
        assert_eq!(c.constants.v_si_m_per_s, 8.6e7);
        let odac = c.scheme(SchemeKind::Pam4Odac, Some(6.0)).unwrap();
        assert_eq!((odac.delta_f_ghz, odac.pp_er_db, odac.fwhm_ghz), (7.5, 3.0, 36.0));
        assert_eq!(c.energy.mr_tuning_range_nm, Some(1.5));
        assert_eq!(c.energy.e_ti_opamp_pj, 0.24);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::from_toml_str("[constants]\nbogus = 1\n").is_err());
        assert!(Config::from_toml_str("[schemes.ook]\nfwhm_ghz = -1.0\n").is_err());
        assert!(Config::from_toml_str("[sim]\npacket_bits = 100\n").is_err());
        assert!(Config::from_toml_str("not toml [").is_err());
    }

    #[test]
    fn tabulated_er_mode() {
        let c = Config::from_toml_str("[search]\ner_mode = \"tabulated\"\n").unwrap();
        assert!(c.scheme(SchemeKind::Ook, Some(7.0)).is_err());
        assert!(c.scheme(SchemeKind::Ook, Some(9.0)).is_ok());
        assert!(Config::default().scheme(SchemeKind::Ook, Some(7.0)).is_ok());
    }

    #[test]
    fn search_grid_has_41_bauds() {
        let b = SearchConfig::default().bauds();
        assert_eq!(b.len(), 41);
        assert_eq!((b[0], b[40]), (10.0, 30.0));
    }

    #[test]
    fn heater_range_is_not_defaulted() {
        assert_eq!(Config::default().energy.mr_tuning_range_nm, None);
    }
}
