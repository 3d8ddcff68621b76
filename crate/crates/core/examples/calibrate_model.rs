//! Fit the open model switches against the calibration rows.
//!
//! Runs the full grid; expect tens of seconds in release mode.

use pnoc_dse::calibrate::{calibrate, CalibrationGrid};
use pnoc_dse::config::Config;

fn main() -> pnoc_dse::error::Result<()> {
    let report = calibrate(&Config::default(), &CalibrationGrid::default())?;
    let c = &report.chosen;
    println!("chosen: {:?} / {:?}, score {:.3}", c.xi_convention, c.through_loss, c.score);
    for (scheme, df) in &c.delta_f_ghz {
        println!("  {:<10} delta_f {df} GHz", scheme.as_str());
    }
    let mut ranked = report.candidates.clone();
    ranked.sort_by(|a, b| a.score.total_cmp(&b.score));
    println!("runners-up:");
    for c in ranked.iter().skip(1).take(3) {
        println!("  {:?} / {:?} score {:.3}", c.xi_convention, c.through_loss, c.score);
    }
    let exact = report.rows.iter().filter(|r| r.score == 0.0).count();
    println!("{exact}/{} calibration rows reproduced exactly", report.rows.len());
    for a in &report.dropped_anchors {
        println!("dropped sensitivity anchor {} Gbaud {} dBm", a.0, a.1);
    }
    Ok(())
}
