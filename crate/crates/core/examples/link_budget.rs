//! Power budget and sensitivity across the baud range for one profile.

use pnoc_dse::config::Config;
use pnoc_dse::params::ProfileKind;
use pnoc_dse::search::Model;
use pnoc_dse::sensitivity::SensitivityCurve;

fn main() -> pnoc_dse::error::Result<()> {
    let config = Config::default();
    let curve = SensitivityCurve::new(&config.sensitivity.anchors)?;
    for a in curve.dropped() {
        println!("dropped non-monotone anchor {} Gbaud {} dBm", a.baud_gbaud, a.sensitivity_dbm);
    }
    let p_max = config.constants.p_max_dbm;
    let model = Model::new(config)?;
    let profile = model.profile(ProfileKind::Clos)?;
    // Channel spacing shown for 16 wavelengths; xi for a 30 GHz FWHM ring.
    println!("{:>6} {:>10} {:>10} {:>12} {:>8}", "Gbaud", "S (dBm)", "P_B (dB)", "spacing GHz", "xi");
    for baud in [10.0, 12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0] {
        let s = curve.sensitivity_at(baud)?;
        let geom = model.geometry(16, baud, profile)?;
        println!(
            "{:>6.1} {:>10.2} {:>10.2} {:>12.2} {:>8.3}",
            baud,
            s.dbm,
            p_max - s.dbm,
            geom.adjacent_spacing_hz() / 1e9,
            model.config.model.xi(30.0, baud)
        );
    }
    Ok(())
}
