//! Component counts, energy per bit and network power of an optimal design.

use pnoc_dse::config::Config;
use pnoc_dse::energy::{ledger_for, link_epb, power_breakdown, NetworkLoad};
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::search::Model;

fn main() -> pnoc_dse::error::Result<()> {
    let mut config = Config::default();
    // Heater power needs a tuning range; there is no built-in default.
    config.energy.mr_tuning_range_nm = Some(2.0);
    let model = Model::new(config)?;
    let profile = ProfileKind::Clos;
    let prof = model.profile(profile)?.clone();
    let energy = &model.config.energy;

    for scheme in SchemeKind::ALL {
        let d = model.search_optimal(scheme, profile, Goal::DrBerBalanced, None)?;
        let params = model.params(scheme, None)?;
        let ledger = ledger_for(&params, d.n_lambda, model.config.sim.packet_bits, energy);
        let epb = link_epb(&params, d.n_lambda, energy);
        let load = NetworkLoad {
            laser_power_dbm: d.laser_power_dbm,
            waveguide_count: prof.waveguide_count,
            routers: 64,
            gateways: 8,
            throughput_gbps: d.aggregate_gbps * prof.waveguide_count as f64,
        };
        let power = power_breakdown(&ledger, &params, &load, energy, model.config.constants.wallplug_efficiency)?;
        println!(
            "{:<10} N={:<3} MRs {:>3}+{:<3} PDs {:>3} TI {:>3} CO {:>3}  {:.3} pJ/bit  {:>8.1} mW",
            scheme.as_str(),
            d.n_lambda,
            ledger.mr_modulators,
            ledger.mr_filters,
            ledger.photodetectors,
            ledger.ti_opamps,
            ledger.co_opamps,
            epb.per_transferred_bit_pj,
            power.total_mw
        );
    }
    Ok(())
}
