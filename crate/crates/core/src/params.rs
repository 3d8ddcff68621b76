//! Physical constants, signaling-scheme parameter sets and PNoC profiles.
//!
//! Values are stored in the units the literature publishes them in (dB, GHz,
//! nm, cm). Code that needs SI quantities converts through the helpers at the
//! bottom of this module.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Extinction ratios swept by the published result tables.
pub const TABULATED_ERS_DB: [f64; 5] = [2.0, 5.0, 6.0, 9.0, 12.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Ook,
    Pam4Ss,
    Pam4Edac,
    Pam4Odac,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Ook,
        SchemeKind::Pam4Ss,
        SchemeKind::Pam4Edac,
        SchemeKind::Pam4Odac,
    ];

    /// Amplitude levels per symbol (M).
    pub fn levels(self) -> u32 {
        match self {
            SchemeKind::Ook => 2,
            _ => 4,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            SchemeKind::Ook => 1,
            _ => 2,
        }
    }

    /// MR modulators per wavelength channel. 4-PAM-SS superposes two OOK rings.
    pub fn modulators_per_channel(self) -> u32 {
        match self {
            SchemeKind::Pam4Ss => 2,
            _ => 1,
        }
    }

    /// Modulator drivers per wavelength channel.
    pub fn drivers_per_channel(self) -> u32 {
        match self {
            SchemeKind::Pam4Ss | SchemeKind::Pam4Odac => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Ook => "ook",
            SchemeKind::Pam4Ss => "pam4_ss",
            SchemeKind::Pam4Edac => "pam4_edac",
            SchemeKind::Pam4Odac => "pam4_odac",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Ook => "OOK",
            SchemeKind::Pam4Ss => "4PAM-SS",
            SchemeKind::Pam4Edac => "4PAM-EDAC",
            SchemeKind::Pam4Odac => "4PAM-ODAC",
        }
    }

    pub fn default_er_db(self) -> f64 {
        match self {
            SchemeKind::Pam4Odac => 2.0,
            _ => 5.0,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "ook" => Ok(SchemeKind::Ook),
            "ss" | "pam4ss" | "4pamss" => Ok(SchemeKind::Pam4Ss),
            "edac" | "pam4edac" | "4pamedac" => Ok(SchemeKind::Pam4Edac),
            "odac" | "pam4odac" | "4pamodac" => Ok(SchemeKind::Pam4Odac),
            _ => Err(Error::Config(format!("unknown signaling scheme '{s}'"))),
        }
    }
}

/// Per-scheme physical constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingParams {
    pub kind: SchemeKind,
    pub extinction_ratio_db: f64,
    pub fwhm_ghz: f64,
    pub q0: f64,
    pub pp_pam_db: f64,
    pub pp_intrf_db: f64,
    pub pp_er_db: f64,
    /// Signal Q-parameter for BER = 1e-9 (dimensionless).
    pub q_ber: f64,
    /// Spacing between a modulator's OFF and ON resonances.
    pub delta_f_ghz: f64,
    /// Modulator driver energy, pJ/bit.
    pub e_mod_pj: f64,
}

impl SignalingParams {
    /// Published defaults at the scheme's default extinction ratio.
    pub fn defaults(kind: SchemeKind) -> Self {
        let (r, fwhm, pp_er, pp_pam, pp_intrf, q_ber, e_mod) = match kind {
            SchemeKind::Ook => (5.0, 30.0, 4.2, 0.0, 0.0, 6.0, 0.13),
            SchemeKind::Pam4Ss => (5.0, 45.0, 4.2, 3.3, 4.8, 12.5, 0.13),
            SchemeKind::Pam4Edac => (5.0, 18.0, 4.2, 3.3, 0.0, 12.5, 3.04),
            SchemeKind::Pam4Odac => (2.0, 36.0, 7.7, 3.3, 0.0, 12.5, 0.04),
        };
        SignalingParams {
            kind,
            extinction_ratio_db: r,
            fwhm_ghz: fwhm,
            q0: 0.04,
            pp_pam_db: pp_pam,
            pp_intrf_db: pp_intrf,
            pp_er_db: pp_er,
            q_ber,
            delta_f_ghz: 0.0,
            e_mod_pj: e_mod,
        }
    }

    pub fn levels(&self) -> u32 {
        self.kind.levels()
    }

    /// Linear extinction ratio.
    pub fn r_linear(&self) -> f64 {
        db_to_linear(self.extinction_ratio_db)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(format!("{} params: {m}", self.kind)));
        if !(self.fwhm_ghz > 0.0) {
            return fail("fwhm must be positive");
        }
        if !(self.q0 > 0.0 && self.q0 < 1.0) {
            return fail("q0 must lie in (0, 1)");
        }
        if !(self.extinction_ratio_db > 0.0) {
            return fail("extinction ratio must be positive");
        }
        if self.pp_pam_db < 0.0 || self.pp_intrf_db < 0.0 || self.pp_er_db < 0.0 {
            return fail("penalties must be non-negative");
        }
        if self.pp_intrf_db > 0.0 && self.kind != SchemeKind::Pam4Ss {
            return fail("interference penalty applies to 4PAM-SS only");
        }
        if (self.kind == SchemeKind::Ook) != (self.pp_pam_db == 0.0) {
            return fail("PAM penalty must be zero for OOK and positive for 4-PAM");
        }
        if !(self.q_ber > 0.0) || self.e_mod_pj < 0.0 {
            return fail("q_ber must be positive and e_mod non-negative");
        }
        Ok(())
    }
}

/// Extinction-ratio penalty at an arbitrary ER, anchored to the published
/// value at the scheme's default ER and scaled by the (r+1)/(r-1) factor.
pub fn anchored_pp_er_db(kind: SchemeKind, er_db: f64) -> f64 {
    let factor = |er: f64| {
        let r = db_to_linear(er);
        linear_to_db((r + 1.0) / (r - 1.0))
    };
    let base = SignalingParams::defaults(kind);
    base.pp_er_db + factor(er_db) - factor(kind.default_er_db())
}

/// Scheme parameters, optionally at a non-default extinction ratio.
///
/// Any positive ER is accepted; use [`check_tabulated_er`] to restrict to the
/// swept values.
pub fn scheme_params(kind: SchemeKind, er_override_db: Option<f64>) -> Result<SignalingParams> {
    let mut p = SignalingParams::defaults(kind);
    if let Some(er) = er_override_db {
        if !(er > 0.0) || !er.is_finite() {
            return Err(Error::Config(format!("extinction ratio must be positive, got {er}")));
        }
        p.extinction_ratio_db = er;
        p.pp_er_db = anchored_pp_er_db(kind, er);
    }
    p.validate()?;
    Ok(p)
}

pub fn check_tabulated_er(er_db: f64) -> Result<()> {
    if TABULATED_ERS_DB.iter().any(|&e| (e - er_db).abs() < 1e-12) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "extinction ratio {er_db} dB is not one of the tabulated values {TABULATED_ERS_DB:?}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Clos,
    Swift,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 2] = [ProfileKind::Clos, ProfileKind::Swift];

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Clos => "clos",
            ProfileKind::Swift => "swift",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clos" => Ok(ProfileKind::Clos),
            "swift" => Ok(ProfileKind::Swift),
            _ => Err(Error::Config(format!("unknown PNoC profile '{s}'"))),
        }
    }
}

/// Per-architecture link and topology constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnocProfile {
    pub name: ProfileKind,
    pub wg_length_cm: f64,
    pub wg_prop_loss_db_per_cm: f64,
    pub splitter_loss_total_db: f64,
    pub coupler_loss_db: f64,
    /// Loss per 90° bend.
    pub wg_bend_loss_db: f64,
    pub bend_count: u32,
    pub waveguide_count: u32,
    pub fsr_nm: f64,
    pub base_wavelength_nm: f64,
    pub photonic_clock_ghz: f64,
    pub core_clock_ghz: f64,
}

impl PnocProfile {
    pub fn defaults(name: ProfileKind) -> Self {
        let (len, sp, wgs) = match name {
            ProfileKind::Clos => (4.5, 5.6, 56),
            ProfileKind::Swift => (12.0, 1.2, 32),
        };
        PnocProfile {
            name,
            wg_length_cm: len,
            wg_prop_loss_db_per_cm: 1.0,
            splitter_loss_total_db: sp,
            coupler_loss_db: 0.9,
            wg_bend_loss_db: 0.005,
            bend_count: 4,
            waveguide_count: wgs,
            fsr_nm: 20.0,
            base_wavelength_nm: 1540.0,
            photonic_clock_ghz: 5.0,
            core_clock_ghz: 2.5,
        }
    }

    pub fn propagation_loss_db(&self) -> f64 {
        self.wg_length_cm * self.wg_prop_loss_db_per_cm
    }

    pub fn bend_loss_db(&self) -> f64 {
        self.bend_count as f64 * self.wg_bend_loss_db
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.wg_length_cm > 0.0
            && self.wg_prop_loss_db_per_cm >= 0.0
            && self.splitter_loss_total_db >= 0.0
            && self.coupler_loss_db >= 0.0
            && self.wg_bend_loss_db >= 0.0
            && self.waveguide_count > 0
            && self.fsr_nm > 0.0
            && self.base_wavelength_nm > 0.0
            && self.photonic_clock_ghz > 0.0
            && self.core_clock_ghz > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{} profile has out-of-range values", self.name)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalConstants {
    pub p_max_dbm: f64,
    /// Detector sensitivity at 10 Gbaud.
    pub s_baseline_dbm: f64,
    /// Group velocity in silicon waveguides, m/s.
    pub v_si_m_per_s: f64,
    pub wallplug_efficiency: f64,
}

impl Default for GlobalConstants {
    fn default() -> Self {
        GlobalConstants {
            p_max_dbm: 20.0,
            s_baseline_dbm: -22.5,
            v_si_m_per_s: 8.6e7,
            wallplug_efficiency: 0.15,
        }
    }
}

impl GlobalConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_si_m_per_s > 0.0) {
            return Err(Error::Config("v_si must be positive".into()));
        }
        if !(self.wallplug_efficiency > 0.0 && self.wallplug_efficiency <= 1.0) {
            return Err(Error::Config("wall-plug efficiency must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

pub const GHZ: f64 = 1e9;
pub const NM: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(db_to_linear(10.0), 10.0, max_relative = 1e-15);
        assert_relative_eq!(db_to_linear(4.8), 3.019951720402016, max_relative = 1e-14);
        assert_relative_eq!(dbm_to_mw(19.69), 93.110_787_546_783, max_relative = 1e-12);
    }

    #[test]
    fn odac_defaults() {
        let p = scheme_params(SchemeKind::Pam4Odac, None).unwrap();
        assert_eq!(p.extinction_ratio_db, 2.0);
        assert_eq!(p.fwhm_ghz, 36.0);
        assert_eq!(p.pp_er_db, 7.7);
    }

    #[test]
    fn ook_defaults() {
        let p = scheme_params(SchemeKind::Ook, None).unwrap();
        assert_eq!(p.q_ber, 6.0);
        assert_eq!(p.pp_pam_db, 0.0);
        assert_eq!(p.levels(), 2);
    }

    #[test]
    fn ss_er_override_keeps_interference() {
        let p = scheme_params(SchemeKind::Pam4Ss, Some(12.0)).unwrap();
        assert_eq!(p.extinction_ratio_db, 12.0);
        assert_eq!(p.pp_intrf_db, 4.8);
        assert_eq!(p.levels(), 4);
    }

    #[test]
    fn anchored_er_penalty_matches_default_and_falls_with_er() {
        for k in SchemeKind::ALL {
            let d = SignalingParams::defaults(k);
            assert_relative_eq!(anchored_pp_er_db(k, k.default_er_db()), d.pp_er_db, epsilon = 1e-12);
            assert!(anchored_pp_er_db(k, 12.0) < anchored_pp_er_db(k, 9.0));
        }
    }

    #[test]
    fn rejects_bad_er_and_scheme() {
        assert!(scheme_params(SchemeKind::Ook, Some(-1.0)).is_err());
        assert!("qam".parse::<SchemeKind>().is_err());
        assert!(check_tabulated_er(7.0).is_err());
        assert!(check_tabulated_er(6.0).is_ok());
        assert_eq!("4PAM-EDAC".parse::<SchemeKind>().unwrap(), SchemeKind::Pam4Edac);
    }

    #[test]
    fn profile_constants() {
        let c = PnocProfile::defaults(ProfileKind::Clos);
        assert_eq!((c.wg_length_cm, c.splitter_loss_total_db, c.waveguide_count), (4.5, 5.6, 56));
        assert_eq!(c.propagation_loss_db(), 4.5);
        let s = PnocProfile::defaults(ProfileKind::Swift);
        assert_eq!((s.wg_length_cm, s.splitter_loss_total_db, s.waveguide_count), (12.0, 1.2, 32));
        assert_eq!(s.fsr_nm, 20.0);
    }

    #[test]
    fn profiles_round_trip() {
        for k in ProfileKind::ALL {
            let p = PnocProfile::defaults(k);
            let back: PnocProfile = toml::from_str(&toml::to_string(&p).unwrap()).unwrap();
            assert_eq!(p, back);
            let back: PnocProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn all_defaults_validate() {
        for k in SchemeKind::ALL {
            SignalingParams::defaults(k).validate().unwrap();
            for er in TABULATED_ERS_DB {
                scheme_params(k, Some(er)).unwrap().validate().unwrap();
            }
        }
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -80.0f64..80.0) {
            let back = linear_to_db(db_to_linear(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn linear_round_trip(r in 1e-8f64..1e8) {
            let back = db_to_linear(linear_to_db(r));
            prop_assert!(((back - r) / r).abs() <= 1e-12);
        }
    }
}
