//! Synthetic traffic sources.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::topology::CORES;
use crate::config::TrafficPattern;

/// Per-core packet source. Inter-injection gaps and destinations come from
/// separate streams, so the k-th packet of a core keeps its destination and
/// only moves earlier as the rate rises.
#[derive(Debug, Clone)]
pub struct Source {
    core: usize,
    gaps: ChaCha8Rng,
    dests: ChaCha8Rng,
    rate: f64,
    pattern: TrafficPattern,
    hotspot_fraction: f64,
}

impl Source {
    pub fn new(core: usize, seed: u64, rate: f64, pattern: TrafficPattern, hotspot_fraction: f64) -> Self {
        let mut gaps = ChaCha8Rng::seed_from_u64(seed);
        gaps.set_stream(2 * core as u64);
        let mut dests = ChaCha8Rng::seed_from_u64(seed);
        dests.set_stream(2 * core as u64 + 1);
        Source { core, gaps, dests, rate, pattern, hotspot_fraction }
    }

    /// Cycles until the next injection (≥ 1), or `None` at zero rate.
    pub fn next_gap(&mut self) -> Option<u64> {
        if self.rate <= 0.0 {
            return None;
        }
        if self.rate >= 1.0 {
            return Some(1);
        }
        let u: f64 = 1.0 - self.gaps.gen::<f64>();
        Some((u.ln() / (1.0 - self.rate).ln()).floor() as u64 + 1)
    }

    pub fn next_destination(&mut self) -> usize {
        match self.pattern {
            TrafficPattern::UniformRandom => self.uniform_other(),
            TrafficPattern::Hotspot => {
                if self.core != 0 && self.dests.gen::<f64>() < self.hotspot_fraction {
                    0
                } else {
                    self.uniform_other()
                }
            }
            TrafficPattern::Permutation => CORES - 1 - self.core,
        }
    }

    fn uniform_other(&mut self) -> usize {
        let d = self.dests.gen_range(0..CORES - 1);
        if d >= self.core {
            d + 1
        } else {
            d
        }
    }
}

/// Destination distribution of `core`'s packets.
pub fn destination_weights(core: usize, pattern: TrafficPattern, hotspot_fraction: f64) -> Vec<f64> {
    let mut w = vec![0.0; CORES];
    let uniform = |w: &mut [f64], mass: f64| {
        for (d, x) in w.iter_mut().enumerate() {
            if d != core {
                *x += mass / (CORES - 1) as f64;
            }
        }
    };
    match pattern {
        TrafficPattern::UniformRandom => uniform(&mut w, 1.0),
        TrafficPattern::Hotspot if core != 0 => {
            w[0] += hotspot_fraction;
            uniform(&mut w, 1.0 - hotspot_fraction);
        }
        TrafficPattern::Hotspot => uniform(&mut w, 1.0),
        TrafficPattern::Permutation => w[CORES - 1 - core] = 1.0,
    }
    w
}
