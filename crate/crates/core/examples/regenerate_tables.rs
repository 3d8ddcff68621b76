//! Regenerate both optimum tables as CSV on stdout.
//!
//! Pass a TOML config path to sweep under it, e.g. `configs/calibrated.toml`.

use pnoc_dse::config::Config;
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::report::write_table_csv;
use pnoc_dse::search::{table_cases, Model};

fn main() -> pnoc_dse::error::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => Config::load(path.as_ref())?,
        None => Config::default(),
    };
    let model = Model::new(config)?;
    for goal in Goal::ALL {
        let rows = model.sweep(&table_cases(&[goal], &ProfileKind::ALL, &SchemeKind::ALL));
        println!("# {goal}");
        write_table_csv(std::io::stdout().lock(), &rows)?;
        println!();
    }
    Ok(())
}
