//! Hardware instance counts, dynamic energy per bit and static power of a
//! DWDM link, plus network-level power.

use serde::{Deserialize, Serialize};

use crate::config::EnergyConfig;
use crate::error::{Error, Result};
use crate::params::{dbm_to_mw, SchemeKind, SignalingParams};

/// Summed EPB of each component class, pJ/bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpbTotals {
    pub driver: f64,
    pub serdes: f64,
    pub co_opamp: f64,
    pub ti_opamp: f64,
}

impl EpbTotals {
    pub fn raw_total(&self) -> f64 {
        self.driver + self.serdes + self.co_opamp + self.ti_opamp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareLedger {
    pub scheme: SchemeKind,
    pub n_lambda: u32,
    pub packet_bits: u32,
    pub mr_modulators: u32,
    pub mr_filters: u32,
    pub photodetectors: u32,
    pub receiver_modules: u32,
    pub serializers: u32,
    pub deserializers: u32,
    pub modulator_drivers: u32,
    pub ti_opamps: u32,
    pub co_opamps: u32,
    pub total_mrs: u32,
    pub buffer_width_bits: u32,
    /// Buffer width was rounded up from a fractional value.
    pub buffer_width_rounded: bool,
    pub epb: EpbTotals,
    pub tuning_control_uw: f64,
    pub heater_uw_per_nm: f64,
    /// Heater power at the configured tuning range, if one is set.
    pub heater_uw: Option<f64>,
}

impl HardwareLedger {
    /// Static MR power in µW. Fails without a configured tuning range.
    pub fn static_uw(&self) -> Result<f64> {
        let heater = self
            .heater_uw
            .ok_or_else(|| Error::Config("energy.mr_tuning_range_nm must be set for heater power".into()))?;
        Ok(self.tuning_control_uw + heater)
    }
}

/// Instance counts and energy totals of one link.
pub fn ledger_for(params: &SignalingParams, n_lambda: u32, packet_bits: u32, energy: &EnergyConfig) -> HardwareLedger {
    let n = n_lambda;
    let kind = params.kind;
    let pam = kind != SchemeKind::Ook;
    let lanes = if pam { 2 * n } else { n };
    let mods = kind.modulators_per_channel() * n;
    let drivers = kind.drivers_per_channel() * n;
    let co = if pam { 3 * n } else { n };
    let total_mrs = n + mods;
    let (buffer_width_bits, buffer_width_rounded) = if lanes == 0 {
        (0, false)
    } else {
        (packet_bits.div_ceil(lanes), packet_bits % lanes != 0)
    };
    let nf = n as f64;
    let epb = EpbTotals {
        driver: params.e_mod_pj * kind.drivers_per_channel() as f64 * nf,
        serdes: energy.e_serdes_pj * if pam { 2.0 * nf } else { nf },
        co_opamp: energy.e_co_opamp_pj * if pam { 3.0 * nf } else { nf },
        ti_opamp: energy.e_ti_opamp_pj * nf,
    };
    let heater_uw_per_nm = energy.p_heater_uw_per_nm * total_mrs as f64;
    HardwareLedger {
        scheme: kind,
        n_lambda,
        packet_bits,
        mr_modulators: mods,
        mr_filters: n,
        photodetectors: n,
        receiver_modules: n,
        serializers: lanes,
        deserializers: lanes,
        modulator_drivers: drivers,
        ti_opamps: n,
        co_opamps: co,
        total_mrs,
        buffer_width_bits,
        buffer_width_rounded,
        epb,
        tuning_control_uw: energy.p_tuning_control_uw * total_mrs as f64,
        heater_uw_per_nm,
        heater_uw: energy.mr_tuning_range_nm.map(|r| heater_uw_per_nm * r),
    }
}

/// Link dynamic EPB: the raw sum over components, and the same spread over
/// the N_λ parallel channels so each transferred bit is charged once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEpb {
    pub raw_pj_per_bit: f64,
    pub per_transferred_bit_pj: f64,
}

pub fn link_epb(params: &SignalingParams, n_lambda: u32, energy: &EnergyConfig) -> LinkEpb {
    if n_lambda == 0 {
        return LinkEpb { raw_pj_per_bit: 0.0, per_transferred_bit_pj: 0.0 };
    }
    let raw = ledger_for(params, n_lambda, 64, energy).epb.raw_total();
    LinkEpb { raw_pj_per_bit: raw, per_transferred_bit_pj: raw / n_lambda as f64 }
}

/// Electrical power drawn by a laser source delivering `laser_power_dbm`.
pub fn laser_wallplug_mw(laser_power_dbm: f64, efficiency: f64) -> Result<f64> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(Error::Config(format!("wall-plug efficiency must be in (0, 1], got {efficiency}")));
    }
    Ok(dbm_to_mw(laser_power_dbm) / efficiency)
}

/// Wall-plug power of a network whose every waveguide needs the per-source
/// laser power of one link.
pub fn network_laser_wallplug_mw(laser_power_dbm: f64, waveguide_count: u32, efficiency: f64) -> Result<f64> {
    Ok(laser_wallplug_mw(laser_power_dbm, efficiency)? * waveguide_count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub laser_wallplug_mw: f64,
    pub mr_tuning_mw: f64,
    pub txrx_dynamic_mw: f64,
    pub electrical_mw: f64,
    pub total_mw: f64,
}

impl PowerBreakdown {
    pub fn new(laser_wallplug_mw: f64, mr_tuning_mw: f64, txrx_dynamic_mw: f64, electrical_mw: f64) -> Self {
        PowerBreakdown {
            laser_wallplug_mw,
            mr_tuning_mw,
            txrx_dynamic_mw,
            electrical_mw,
            total_mw: laser_wallplug_mw + mr_tuning_mw + txrx_dynamic_mw + electrical_mw,
        }
    }
}

/// Inputs for a network power estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkLoad {
    pub laser_power_dbm: f64,
    pub waveguide_count: u32,
    pub routers: u32,
    pub gateways: u32,
    /// Delivered payload throughput, Gb/s.
    pub throughput_gbps: f64,
}

pub fn power_breakdown(ledger: &HardwareLedger, params: &SignalingParams, load: &NetworkLoad, energy: &EnergyConfig, efficiency: f64) -> Result<PowerBreakdown> {
    let laser = network_laser_wallplug_mw(load.laser_power_dbm, load.waveguide_count, efficiency)?;
    let tuning = ledger.static_uw()? * load.waveguide_count as f64 / 1000.0;
    // pJ/bit × Gb/s = mW.
    let txrx = link_epb(params, ledger.n_lambda, energy).per_transferred_bit_pj * load.throughput_gbps;
    let electrical = load.routers as f64 * energy.electrical_power_per_router_mw + load.gateways as f64 * energy.gi_power_mw;
    Ok(PowerBreakdown::new(laser, tuning, txrx, electrical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::scheme_params;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> EnergyConfig {
        EnergyConfig::default()
    }

    fn ledger(kind: SchemeKind, n: u32) -> HardwareLedger {
        ledger_for(&scheme_params(kind, None).unwrap(), n, 512, &cfg())
    }

    #[test]
    fn counts_per_scheme() {
        for n in [16, 32, 64] {
            let o = ledger(SchemeKind::Ook, n);
            assert_eq!(
                [o.mr_modulators, o.mr_filters, o.photodetectors, o.receiver_modules, o.serializers, o.deserializers, o.modulator_drivers, o.ti_opamps, o.co_opamps, o.total_mrs],
                [n, n, n, n, n, n, n, n, n, 2 * n]
            );
            assert_eq!(o.buffer_width_bits, 512 / n);
            let expect = [
                (SchemeKind::Pam4Ss, 2 * n, 2 * n, 3 * n),
                (SchemeKind::Pam4Edac, n, n, 2 * n),
                (SchemeKind::Pam4Odac, n, 2 * n, 2 * n),
            ];
            for (kind, mods, drivers, mrs) in expect {
                let l = ledger(kind, n);
                assert_eq!((l.mr_modulators, l.modulator_drivers, l.total_mrs), (mods, drivers, mrs), "{kind}");
                assert_eq!(
                    [l.mr_filters, l.photodetectors, l.receiver_modules, l.serializers, l.deserializers, l.ti_opamps, l.co_opamps],
                    [n, n, n, 2 * n, 2 * n, n, 3 * n]
                );
                assert_eq!(l.buffer_width_bits, 512 / (2 * n));
                assert!(!l.buffer_width_rounded);
            }
        }
    }

    #[test]
    fn epb_products() {
        for n in [16u32, 32, 64] {
            let nf = n as f64;
            let rows = [
                (SchemeKind::Ook, 0.13 * nf, 0.5 * nf, 0.21 * nf),
                (SchemeKind::Pam4Ss, 0.13 * (2.0 * nf), 0.5 * (2.0 * nf), 0.21 * (3.0 * nf)),
                (SchemeKind::Pam4Edac, 3.04 * nf, 0.5 * (2.0 * nf), 0.21 * (3.0 * nf)),
                (SchemeKind::Pam4Odac, 0.04 * (2.0 * nf), 0.5 * (2.0 * nf), 0.21 * (3.0 * nf)),
            ];
            for (kind, driver, serdes, co) in rows {
                let l = ledger(kind, n);
                assert_eq!(l.epb.driver, driver, "{kind} driver");
                assert_eq!(l.epb.serdes, serdes, "{kind} serdes");
                assert_eq!(l.epb.co_opamp, co, "{kind} co");
                assert_eq!(l.epb.ti_opamp, 0.24 * nf, "{kind} ti");
                let mrs = l.total_mrs as f64;
                assert_eq!(l.tuning_control_uw, 385.0 * mrs);
                assert_eq!(l.heater_uw_per_nm, 800.0 * mrs);
            }
        }
    }

    #[test]
    fn table_examples() {
        let o = ledger(SchemeKind::Ook, 64);
        assert_eq!(o.epb.driver, 8.32);
        assert_relative_eq!(o.tuning_control_uw / 1000.0, 49.28, epsilon = 1e-12);
        let e = ledger(SchemeKind::Pam4Edac, 64);
        assert_relative_eq!(e.epb.driver, 194.56, epsilon = 1e-12);
        assert_eq!(e.epb.serdes, 64.0);
        let s = ledger(SchemeKind::Pam4Ss, 32);
        assert_eq!((s.total_mrs, s.heater_uw_per_nm), (96, 800.0 * 96.0));
        assert_eq!(s.heater_uw, None);
        assert!(s.static_uw().is_err());
    }

    #[test]
    fn link_epb_values() {
        let ook = scheme_params(SchemeKind::Ook, None).unwrap();
        let e = link_epb(&ook, 10, &cfg());
        assert_relative_eq!(e.raw_pj_per_bit, (0.13 + 0.5 + 0.21 + 0.24) * 10.0, epsilon = 1e-12);
        assert_relative_eq!(e.per_transferred_bit_pj, 1.08, epsilon = 1e-12);
        let odac = scheme_params(SchemeKind::Pam4Odac, None).unwrap();
        assert_relative_eq!(ledger_for(&odac, 10, 512, &cfg()).epb.driver, 0.8, epsilon = 1e-12);
        assert_eq!(link_epb(&ook, 0, &cfg()).raw_pj_per_bit, 0.0);
    }

    #[test]
    fn buffer_rounding() {
        let l = ledger(SchemeKind::Pam4Edac, 3);
        assert_eq!(l.buffer_width_bits, 86);
        assert!(l.buffer_width_rounded);
    }

    #[test]
    fn wallplug() {
        assert_relative_eq!(laser_wallplug_mw(19.69, 0.15).unwrap(), 620.738_583_645_220_4, max_relative = 1e-12);
        assert_relative_eq!(laser_wallplug_mw(0.0, 0.15).unwrap(), 1.0 / 0.15, max_relative = 1e-15);
        assert_eq!(laser_wallplug_mw(3.0, 1.0).unwrap(), dbm_to_mw(3.0));
        assert!(laser_wallplug_mw(0.0, 0.0).is_err());
        assert_relative_eq!(network_laser_wallplug_mw(0.0, 56, 1.0).unwrap(), 56.0, epsilon = 1e-12);
    }

    #[test]
    fn breakdown_sums() {
        let mut c = cfg();
        c.mr_tuning_range_nm = Some(1.0);
        let p = scheme_params(SchemeKind::Ook, None).unwrap();
        let l = ledger_for(&p, 16, 512, &c);
        let load = NetworkLoad { laser_power_dbm: 10.0, waveguide_count: 56, routers: 8, gateways: 0, throughput_gbps: 100.0 };
        let b = power_breakdown(&l, &p, &load, &c, 0.15).unwrap();
        assert_eq!(b.total_mw, b.laser_wallplug_mw + b.mr_tuning_mw + b.txrx_dynamic_mw + b.electrical_mw);
        assert_relative_eq!(b.mr_tuning_mw, (385.0 + 800.0) * 32.0 * 56.0 / 1000.0, epsilon = 1e-9);
        assert_relative_eq!(b.txrx_dynamic_mw, 108.0, epsilon = 1e-9);
        assert_relative_eq!(b.electrical_mw, 80.0);
    }

    proptest! {
        #[test]
        fn static_power_linear_in_n(n in 1u32..200, kind in 0usize..4) {
            let k = SchemeKind::ALL[kind];
            let l1 = ledger(k, 1);
            let ln = ledger(k, n);
            let mult = if k == SchemeKind::Pam4Ss { 3.0 } else { 2.0 };
            prop_assert!((ln.tuning_control_uw - n as f64 * l1.tuning_control_uw).abs() < 1e-6);
            prop_assert_eq!(l1.tuning_control_uw, 385.0 * mult);
        }

        #[test]
        fn edac_driver_dominates(n in 1u32..200) {
            let e = ledger(SchemeKind::Pam4Edac, n).epb.driver;
            for k in [SchemeKind::Ook, SchemeKind::Pam4Ss, SchemeKind::Pam4Odac] {
                prop_assert!(e > ledger(k, n).epb.driver);
            }
        }
    }
}
