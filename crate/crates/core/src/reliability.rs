//! Crosstalk-limited BER and the SECDED(72,64) codec.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::{gamma_bank, DetuneMode, LinkGeometry, ModelSwitches};
use crate::params::SignalingParams;

/// BER of an M-level intensity signal limited by Gaussian crosstalk:
/// (2(M−1) − log2 M)/(M·log2 M) · erfc(√SNR / ((M−1)√2)).
pub fn ber_from_snr(snr: f64, levels: u32) -> f64 {
    if snr.is_infinite() && snr > 0.0 {
        return 0.0;
    }
    let m = levels as f64;
    let lg = m.log2();
    let coeff = (2.0 * (m - 1.0) - lg) / (m * lg);
    coeff * libm::erfc(snr.max(0.0).sqrt() / ((m - 1.0) * std::f64::consts::SQRT_2))
}

/// SNR from the worst filter's collected crosstalk. Infinite when there is none.
pub fn snr_from_row_sums(row_sums: &[f64]) -> f64 {
    let worst = row_sums.iter().copied().fold(0.0, f64::max);
    if worst > 0.0 {
        1.0 / worst
    } else {
        f64::INFINITY
    }
}

pub fn worst_case_snr(params: &SignalingParams, geom: &LinkGeometry, switches: &ModelSwitches) -> Result<f64> {
    let xi = switches.xi(params.fwhm_ghz, geom.baud_gbaud);
    Ok(snr_from_row_sums(&gamma_bank(geom, xi, DetuneMode::Filter)?.row_sums()))
}

/// Residual BER a SECDED-coded packet of `packet_bits` payload can absorb:
/// one correctable error per coded packet.
pub fn fec_threshold(packet_bits: u32) -> Result<f64> {
    if packet_bits == 0 || packet_bits % 64 != 0 {
        return Err(Error::Domain(format!("packet of {packet_bits} bits is not a whole number of 64-bit words")));
    }
    Ok(1.0 / coded_bits(packet_bits) as f64)
}

/// Bits on the wire after SECDED(72,64) coding.
pub fn coded_bits(packet_bits: u32) -> u32 {
    packet_bits / 64 * 72
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    #[serde(with = "crate::report::float")]
    pub worst_snr: f64,
    pub ber: f64,
    pub levels: u32,
    pub fec_threshold: f64,
    pub passes_fec: bool,
}

impl BerReport {
    pub fn new(snr: f64, levels: u32, packet_bits: u32) -> Result<Self> {
        let ber = ber_from_snr(snr, levels);
        let fec_threshold = fec_threshold(packet_bits)?;
        Ok(BerReport { worst_snr: snr, ber, levels, fec_threshold, passes_fec: ber < fec_threshold })
    }
}

pub fn ber_report(params: &SignalingParams, geom: &LinkGeometry, switches: &ModelSwitches, packet_bits: u32) -> Result<BerReport> {
    BerReport::new(worst_case_snr(params, geom, switches)?, params.levels(), packet_bits)
}

/// Hamming positions (1..=71, skipping powers of two) of the 64 data bits.
const DATA_POS: [u8; 64] = data_positions();

const fn data_positions() -> [u8; 64] {
    let mut out = [0u8; 64];
    let mut pos = 1u8;
    let mut k = 0;
    while k < 64 {
        if pos & (pos - 1) != 0 {
            out[k] = pos;
            k += 1;
        }
        pos += 1;
    }
    out
}

/// Syndrome contribution of each data byte value, per byte lane.
const SYNDROME_LUT: [[u8; 256]; 8] = syndrome_lut();

const fn syndrome_lut() -> [[u8; 256]; 8] {
    let mut t = [[0u8; 256]; 8];
    let mut lane = 0;
    while lane < 8 {
        let mut v = 0;
        while v < 256 {
            let mut s = 0u8;
            let mut b = 0;
            while b < 8 {
                if v >> b & 1 == 1 {
                    s ^= DATA_POS[lane * 8 + b];
                }
                b += 1;
            }
            t[lane][v] = s;
            v += 1;
        }
        lane += 1;
    }
    t
}

fn data_syndrome(data: u64) -> u8 {
    let bytes = data.to_le_bytes();
    let mut s = 0;
    for (lane, &b) in bytes.iter().enumerate() {
        s ^= SYNDROME_LUT[lane][b as usize];
    }
    s
}

/// A 72-bit codeword in systematic form.
///
/// `check` bit 0 is the overall parity; bit k+1 is the Hamming check bit at
/// position 2^k. Codeword bit indices 0..64 address `data`, 64..72 `check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Codeword {
    pub data: u64,
    pub check: u8,
}

impl Codeword {
    pub const BITS: usize = 72;

    pub fn flip(self, bit: usize) -> Codeword {
        assert!(bit < Self::BITS, "codeword bit {bit} out of range");
        let mut c = self;
        if bit < 64 {
            c.data ^= 1 << bit;
        } else {
            c.check ^= 1 << (bit - 64);
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Clean,
    Corrected,
    Uncorrectable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub data: u64,
    pub status: DecodeStatus,
}

pub fn secded_encode(data: u64) -> Codeword {
    let hamming = data_syndrome(data) & 0x7f;
    let parity = ((data.count_ones() + hamming.count_ones()) & 1) as u8;
    Codeword { data, check: hamming << 1 | parity }
}

pub fn secded_decode(word: Codeword) -> Decoded {
    let syndrome = data_syndrome(word.data) ^ (word.check >> 1);
    let parity_odd = (word.data.count_ones() + word.check.count_ones()) & 1 == 1;
    match (syndrome, parity_odd) {
        (0, false) => Decoded { data: word.data, status: DecodeStatus::Clean },
        (_, false) => Decoded { data: word.data, status: DecodeStatus::Uncorrectable },
        (0, true) => Decoded { data: word.data, status: DecodeStatus::Corrected },
        (s, true) if s & (s - 1) == 0 => Decoded { data: word.data, status: DecodeStatus::Corrected },
        (s, true) => match DATA_POS.iter().position(|&p| p == s) {
            Some(bit) => Decoded { data: word.data ^ (1 << bit), status: DecodeStatus::Corrected },
            None => Decoded { data: word.data, status: DecodeStatus::Uncorrectable },
        },
    }
}

/// Encodes a packet of 64-bit words; the wire grows by 72/64.
pub fn encode_packet(words: &[u64]) -> Vec<Codeword> {
    words.iter().map(|&w| secded_encode(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // 30-digit mpmath values.
    const ERFC: [(f64, f64); 9] = [
        (0.1, 0.8875370839817151078),
        (0.5, 0.47950012218695346232),
        (1.0, 0.15729920705028513066),
        (2.0, 0.0046777349810472658379),
        (3.0, 0.000022090496998585441373),
        (4.242640687119285, 1.9731752900753987974e-9),
        (5.0, 1.5374597944280348502e-12),
        (6.0, 2.1519736712498913117e-17),
        (8.0, 1.122429717298292708e-29),
    ];

    #[test]
    fn erfc_accuracy() {
        for (x, want) in ERFC {
            assert_relative_eq!(libm::erfc(x), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn ber_examples() {
        assert_relative_eq!(ber_from_snr(36.0, 2), 9.865876450376981407e-10, max_relative = 1e-12);
        assert_relative_eq!(ber_from_snr(36.0, 4), 0.0227501319481792072, max_relative = 1e-12);
        assert_relative_eq!(ber_from_snr(100.0, 2), 7.619853024160526066e-24, max_relative = 1e-12);
        assert_eq!(ber_from_snr(f64::INFINITY, 2), 0.0);
        assert_eq!(ber_from_snr(0.0, 2), 0.5);
        assert_eq!(snr_from_row_sums(&[0.01, 0.002]), 100.0);
        assert_eq!(snr_from_row_sums(&[0.0]), f64::INFINITY);
    }

    #[test]
    fn fec_thresholds() {
        assert_eq!(fec_threshold(512).unwrap(), 1.0 / 576.0);
        assert_eq!(fec_threshold(64).unwrap(), 1.0 / 72.0);
        assert_eq!(fec_threshold(1024).unwrap(), 1.0 / 1152.0);
        assert!(fec_threshold(100).is_err());
        assert_eq!(coded_bits(512), 576);
        assert_relative_eq!(coded_bits(512) as f64 / 512.0, 1.125);
    }

    #[test]
    fn snr_matches_term_by_term_quadrature() {
        use crate::params::{PnocProfile, ProfileKind, SchemeKind};
        use crate::penalty::crosstalk_fraction;
        use crate::quadrature::Method;
        let g = LinkGeometry::new(8, 10.0, &PnocProfile::defaults(ProfileKind::Clos), 8.6e7).unwrap();
        let p = SignalingParams::defaults(SchemeKind::Ook);
        let sw = ModelSwitches::default();
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            let s: f64 = (0..8)
                .filter(|&j| j != i)
                .map(|j| crosstalk_fraction(i, j, &g, 1.5, DetuneMode::Filter, Method::ADAPTIVE).unwrap())
                .sum();
            worst = worst.max(s);
        }
        assert_relative_eq!(worst_case_snr(&p, &g, &sw).unwrap(), 1.0 / worst, max_relative = 1e-7);
    }

    #[test]
    fn zero_word() {
        let c = secded_encode(0);
        assert_eq!(c, Codeword { data: 0, check: 0 });
        assert_eq!(secded_decode(c).status, DecodeStatus::Clean);
    }

    #[test]
    fn every_single_flip_corrects() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w: u64 = rng.gen();
            let c = secded_encode(w);
            for bit in 0..72 {
                let d = secded_decode(c.flip(bit));
                assert_eq!(d, Decoded { data: w, status: DecodeStatus::Corrected }, "bit {bit}");
            }
        }
    }

    #[test]
    fn every_double_flip_detected() {
        let w = 0xDEAD_BEEF_0123_4567;
        let c = secded_encode(w);
        for a in 0..72 {
            for b in a + 1..72 {
                assert_eq!(secded_decode(c.flip(a).flip(b)).status, DecodeStatus::Uncorrectable, "bits {a},{b}");
            }
        }
    }

    #[test]
    fn data_positions_layout() {
        assert_eq!(DATA_POS[0], 3);
        assert_eq!(DATA_POS[63], 71);
        assert!(DATA_POS.iter().all(|p| p & (p - 1) != 0));
    }

    proptest! {
        #[test]
        fn round_trip(w in any::<u64>()) {
            prop_assert_eq!(secded_decode(secded_encode(w)), Decoded { data: w, status: DecodeStatus::Clean });
        }

        #[test]
        fn linear(a in any::<u64>(), b in any::<u64>()) {
            let (ca, cb, cx) = (secded_encode(a), secded_encode(b), secded_encode(a ^ b));
            prop_assert_eq!(Codeword { data: ca.data ^ cb.data, check: ca.check ^ cb.check }, cx);
        }

        #[test]
        fn ber_decreasing_in_snr(s in 0.01f64..200.0, ds in 0.01f64..10.0) {
            for m in [2, 4] {
                prop_assert!(ber_from_snr(s + ds, m) < ber_from_snr(s, m));
            }
            prop_assert!(ber_from_snr(s, 4) > ber_from_snr(s, 2));
        }
    }
}
