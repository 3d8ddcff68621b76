//! Crosstalk-limited BER of the optimal designs, and SECDED on a packet.

use pnoc_dse::config::Config;
use pnoc_dse::params::{ProfileKind, SchemeKind};
use pnoc_dse::penalty::Goal;
use pnoc_dse::reliability::{encode_packet, fec_threshold, secded_decode, DecodeStatus};
use pnoc_dse::search::Model;

fn main() -> pnoc_dse::error::Result<()> {
    let model = Model::new(Config::default())?;
    println!("correctable BER for a 512-bit packet: {:.3e}", fec_threshold(512)?);
    for goal in Goal::ALL {
        for scheme in SchemeKind::ALL {
            let d = model.search_optimal(scheme, ProfileKind::Swift, goal, None)?;
            let r = model.ber(&d)?;
            println!(
                "{goal:<12} {:<10} N={:<3} SNR {:>9.3}  BER {:.3e}  within SECDED: {}",
                scheme.as_str(),
                d.n_lambda,
                r.worst_snr,
                r.ber,
                r.passes_fec
            );
        }
    }

    let words: Vec<u64> = (0..8u64).map(|k| 0x0123_4567_89ab_cdef ^ (k << 40)).collect();
    let coded = encode_packet(&words);
    let mut corrected = 0;
    let mut flagged = 0;
    for (k, cw) in coded.iter().enumerate() {
        let one = secded_decode(cw.flip(k * 9 % 72));
        assert_eq!(one.data, words[k]);
        corrected += (one.status == DecodeStatus::Corrected) as u32;
        let two = secded_decode(cw.flip(k).flip(k + 30));
        flagged += (two.status == DecodeStatus::Uncorrectable) as u32;
    }
    println!("\n8 words: {corrected} single flips corrected, {flagged} double flips flagged");
    Ok(())
}
