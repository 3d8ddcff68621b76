//! Core-to-core routes of the CLOS and SWIFT networks.

use serde::{Deserialize, Serialize};

use crate::params::ProfileKind;

pub const CORES: usize = 256;

/// How a packet crosses the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Electrical only, through `hops` routers.
    Local { hops: u32 },
    /// Source router, a photonic waveguide written by `writer`, destination router.
    Photonic { writer: usize, waveguide: usize },
}

impl Route {
    pub fn router_hops(&self) -> u32 {
        match *self {
            Route::Local { hops } => hops,
            Route::Photonic { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: ProfileKind,
    pub routers: u32,
    /// Electrical/photonic interfaces: one per cluster or per four nodes.
    pub gateways: u32,
    pub waveguides: usize,
    /// Writers sharing each waveguide, in round-robin order.
    pub writers: Vec<Vec<usize>>,
}

impl Topology {
    pub fn new(kind: ProfileKind) -> Self {
        match kind {
            // 8 clusters of 32 cores; one waveguide per ordered cluster pair.
            ProfileKind::Clos => Topology {
                kind,
                routers: 8,
                gateways: 8,
                waveguides: 56,
                writers: (0..56).map(|w| vec![w / 7]).collect(),
            },
            // 64 four-core nodes, 16 GIs, 8 groups of 4 MWMR waveguides.
            // Waveguide k of group g is written by the GIs with index ≡ k mod 4
            // and read by GIs 2g and 2g+1.
            ProfileKind::Swift => Topology {
                kind,
                routers: 64,
                gateways: 16,
                waveguides: 32,
                writers: (0..32).map(|w| (0..16).filter(|gi| gi % 4 == w % 4).collect()).collect(),
            },
        }
    }

    pub fn route(&self, src: usize, dst: usize) -> Route {
        match self.kind {
            ProfileKind::Clos => {
                let (s, d) = (src / 32, dst / 32);
                if s == d {
                    Route::Local { hops: 1 }
                } else {
                    let slot = if d < s { d } else { d - 1 };
                    Route::Photonic { writer: s, waveguide: s * 7 + slot }
                }
            }
            ProfileKind::Swift => {
                let (sn, dn) = (src / 4, dst / 4);
                let (sg, dg) = (sn / 4, dn / 4);
                if sn == dn {
                    Route::Local { hops: 1 }
                } else if sg == dg {
                    Route::Local { hops: 2 }
                } else {
                    Route::Photonic { writer: sg, waveguide: (dg / 2) * 4 + sg % 4 }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clos_pairs_are_complete_and_distinct() {
        let t = Topology::new(ProfileKind::Clos);
        let mut seen = std::collections::HashSet::new();
        for s in 0..8 {
            for d in 0..8 {
                let r = t.route(s * 32, d * 32 + 5);
                match r {
                    Route::Local { hops } => assert!(s == d && hops == 1),
                    Route::Photonic { writer, waveguide } => {
                        assert_eq!(writer, s);
                        assert!(t.writers[waveguide].contains(&writer));
                        assert!(seen.insert(waveguide));
                    }
                }
            }
        }
        assert_eq!(seen.len(), 56);
    }

    #[test]
    fn swift_waveguides_are_shared_round_robin() {
        let t = Topology::new(ProfileKind::Swift);
        assert!(t.writers.iter().all(|w| w.len() == 4));
        let mut used = std::collections::HashSet::new();
        for src in (0..CORES).step_by(4) {
            for dst in (0..CORES).step_by(4) {
                if let Route::Photonic { writer, waveguide } = t.route(src, dst) {
                    assert!(t.writers[waveguide].contains(&writer));
                    used.insert(waveguide);
                }
            }
        }
        assert_eq!(used.len(), 32);
        assert_eq!(t.route(0, 1), Route::Local { hops: 1 });
        assert_eq!(t.route(0, 4), Route::Local { hops: 2 });
    }
}
