//! Itemized penalty of each goal's optimal PAM4-SS duplet on SWIFT.

use pnoc_dse::config::Config;
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::search::Model;

fn main() -> pnoc_dse::error::Result<()> {
    let model = Model::new(Config::default())?;
    for goal in Goal::ALL {
        let p = model.search_optimal(SchemeKind::Pam4Ss, ProfileKind::Swift, goal, None)?;
        println!("{goal}: N={} at {} Gbaud, P_B {:.2} dB", p.n_lambda, p.baud_gbaud, p.power_budget_db);
        if let Some(b) = &p.penalty {
            let rows = [
                ("active MR", b.p_mr_act),
                ("inactive MR", b.p_mr_inact),
                ("wg propagation", b.p_wgp),
                ("wg bends", b.p_wgb),
                ("splitters", b.p_sp),
                ("coupler", b.p_c),
                ("modulator xtalk", b.pp_mod),
                ("filter xtalk", b.pp_fil),
                ("PAM4", b.pp_pam),
                ("interference", b.pp_intrf),
                ("extinction", b.pp_er),
            ];
            for (name, db) in rows {
                println!("  {name:<16} {db:>8.3}");
            }
            println!("  {:<16} {:>8.3}", "total", b.total);
        }
        println!("  slack {:.3} dB, laser {:.2} dBm\n", p.slack_db, p.laser_power_dbm);
    }
    Ok(())
}
