//! Best duplet per scheme, plus the feasible frontier for one of them.

use pnoc_dse::config::Config;
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::search::Model;

fn main() -> pnoc_dse::error::Result<()> {
    let model = Model::new(Config::default())?;
    let profile = ProfileKind::Clos;
    for goal in Goal::ALL {
        println!("{profile} {goal}");
        for scheme in SchemeKind::ALL {
            let d = model.search_optimal(scheme, profile, goal, None)?;
            println!(
                "  {:<10} N={:<3} {:>5.1} Gb/s  aggregate {:>6.1} Gb/s  laser {:>6.2} dBm",
                scheme.as_str(),
                d.n_lambda,
                d.bitrate_gbps,
                d.aggregate_gbps,
                d.laser_power_dbm
            );
        }
    }

    let frontier = model.frontier(SchemeKind::Ook, profile, Goal::BerOptimal, None)?;
    let feasible: Vec<_> = frontier.iter().filter(|p| p.feasible).collect();
    println!("\nOOK frontier: {} of {} duplets feasible", feasible.len(), frontier.len());
    for n in model.lambdas() {
        if let Some(best) = feasible.iter().filter(|p| p.n_lambda == *n).map(|p| p.baud_gbaud).reduce(f64::max) {
            println!("  N={n:<3} fastest feasible {best} Gbaud");
        }
    }
    Ok(())
}
