//! Latency and energy ladder for one design, then a scheme comparison.

use pnoc_dse::config::Config;
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::search::Model;
use pnoc_dse::sim::{compare_variants, simulate, SimConfig};

fn main() -> pnoc_dse::error::Result<()> {
    let model = Model::new(Config::default())?;
    let profile = ProfileKind::Swift;
    let d = model.search_optimal(SchemeKind::Ook, profile, Goal::DrBerBalanced, None)?;
    let sat = SimConfig::from_model(&model, &d, 0.0, 0)?.saturation_rate();
    println!("OOK {} x {} Gb/s, saturation near {sat:.4} packets/core/cycle", d.n_lambda, d.bitrate_gbps);
    println!("{:>8} {:>10} {:>10} {:>10} {:>9}", "rate", "mean ns", "p99 ns", "accepted", "pJ/bit");
    for f in [0.1, 0.3, 0.5, 0.7, 0.9, 1.1] {
        let r = simulate(&SimConfig::from_model(&model, &d, f * sat, 1)?)?;
        let (mean, p99) = r.latency.as_ref().map_or((f64::NAN, f64::NAN), |l| (l.mean_ns, l.p99_ns));
        println!(
            "{:>8.5} {:>10.2} {:>10.2} {:>10.1} {:>9.2}{}",
            r.injection_rate,
            mean,
            p99,
            r.accepted_gbps,
            r.epb_pj_per_bit,
            if r.saturated { "  saturated" } else { "" }
        );
    }

    let designs = SchemeKind::ALL
        .iter()
        .map(|&s| model.search_optimal(s, profile, Goal::DrBerBalanced, None))
        .collect::<pnoc_dse::error::Result<Vec<_>>>()?;
    println!("\nrelative to OOK at {:.4}:", 0.3 * sat);
    for v in compare_variants(&model, &designs, 0.3 * sat, 1)? {
        let ratio = |x: Option<f64>| x.map_or("n/a".to_string(), |r| format!("x{r:.3}"));
        println!("  {:<10} latency {}  energy {}", v.scheme.as_str(), ratio(v.latency_ratio), ratio(v.epb_ratio));
    }
    Ok(())
}
