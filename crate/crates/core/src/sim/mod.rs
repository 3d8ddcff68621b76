//! Discrete-event simulation of a PNoC under synthetic traffic.
//!
//! A photonic packet takes the source router, waits for its waveguide,
//! serializes over the N_λ channels, flies the link, deserializes, is
//! optionally SECDED-decoded and takes the destination router. Routers are a
//! fixed pipeline delay; the only contention is at the waveguides.

pub mod topology;
pub mod traffic;

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::{EnergyConfig, TrafficPattern};
use crate::energy::{ledger_for, power_breakdown, NetworkLoad, PowerBreakdown};
use crate::error::{Error, Result};
use crate::params::{PnocProfile, ProfileKind, SchemeKind, SignalingParams};
use crate::penalty::Goal;
use crate::reliability::coded_bits;
use crate::search::{DesignPoint, Model};

pub use topology::{Route, Topology, CORES};
pub use traffic::{destination_weights, Source};

/// Everything one run needs. Build with [`SimConfig::from_model`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub profile: PnocProfile,
    pub params: SignalingParams,
    pub goal: Goal,
    pub n_lambda: u32,
    pub baud_gbaud: f64,
    pub laser_power_dbm: f64,
    pub packet_bits: u32,
    /// Packets per core per core cycle.
    pub injection_rate: f64,
    pub traffic: TrafficPattern,
    pub hotspot_fraction: f64,
    pub seed: u64,
    pub warmup_cycles: u64,
    pub measure_cycles: u64,
    pub router_cycles: u32,
    pub queue_capacity: Option<usize>,
    pub saturation_gap: f64,
    pub v_si_m_per_s: f64,
    pub wallplug_efficiency: f64,
    pub energy: EnergyConfig,
}

impl SimConfig {
    pub fn from_model(model: &Model, design: &DesignPoint, injection_rate: f64, seed: u64) -> Result<Self> {
        let c = &model.config;
        Ok(SimConfig {
            profile: model.profile(design.profile)?.clone(),
            params: model.params(design.scheme, Some(design.er_db))?,
            goal: design.goal,
            n_lambda: design.n_lambda,
            baud_gbaud: design.baud_gbaud,
            laser_power_dbm: design.laser_power_dbm,
            packet_bits: c.sim.packet_bits,
            injection_rate,
            traffic: c.sim.traffic,
            hotspot_fraction: c.sim.hotspot_fraction,
            seed,
            warmup_cycles: c.sim.warmup_cycles,
            measure_cycles: c.sim.measure_cycles,
            router_cycles: c.sim.router_cycles,
            queue_capacity: c.sim.queue_capacity,
            saturation_gap: c.sim.saturation_gap,
            v_si_m_per_s: c.constants.v_si_m_per_s,
            wallplug_efficiency: c.constants.wallplug_efficiency,
            energy: c.energy.clone(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.measure_cycles == 0 {
            return Err(Error::Config("measure_cycles must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.injection_rate) {
            return Err(Error::Config(format!("injection rate {} is not in [0, 1]", self.injection_rate)));
        }
        if self.n_lambda == 0 || !(self.baud_gbaud > 0.0) {
            return Err(Error::Config("design needs N_λ ≥ 1 and a positive baud rate".into()));
        }
        if self.packet_bits == 0 || self.packet_bits % 64 != 0 {
            return Err(Error::Config("packet_bits must be a positive multiple of 64".into()));
        }
        if self.queue_capacity == Some(0) {
            return Err(Error::Config("queue_capacity must be at least 1".into()));
        }
        Ok(())
    }

    pub fn secded(&self) -> bool {
        self.goal == Goal::DrBerBalanced
    }

    pub fn wire_bits(&self) -> u32 {
        if self.secded() {
            coded_bits(self.packet_bits)
        } else {
            self.packet_bits
        }
    }

    pub fn core_cycle_ns(&self) -> f64 {
        1.0 / self.profile.core_clock_ghz
    }

    pub fn photonic_cycle_ns(&self) -> f64 {
        1.0 / self.profile.photonic_clock_ghz
    }

    pub fn router_ns(&self) -> f64 {
        self.router_cycles as f64 * self.core_cycle_ns()
    }

    /// Symbols each channel carries for one packet.
    pub fn symbols_per_channel(&self) -> u64 {
        let per_symbol = (self.n_lambda * self.params.kind.bits_per_symbol()) as u64;
        (self.wire_bits() as u64).div_ceil(per_symbol)
    }

    pub fn serialization_ns(&self) -> f64 {
        self.symbols_per_channel() as f64 / self.baud_gbaud
    }

    pub fn flight_ns(&self) -> f64 {
        self.profile.wg_length_cm * 1e-2 / self.v_si_m_per_s * 1e9
    }

    /// Receiver-side delay after the last symbol arrives.
    pub fn receive_ns(&self) -> f64 {
        let decode = if self.secded() { 1.0 } else { 0.0 };
        (1.0 + decode) * self.photonic_cycle_ns()
    }

    /// Injection rate at which the busiest waveguide is fully occupied,
    /// capped at one packet per core per cycle.
    pub fn saturation_rate(&self) -> f64 {
        let topo = Topology::new(self.profile.name);
        let mut per_wg = vec![0.0; topo.waveguides];
        for src in 0..CORES {
            for (dst, w) in destination_weights(src, self.traffic, self.hotspot_fraction).into_iter().enumerate() {
                if w > 0.0 {
                    if let Route::Photonic { waveguide, .. } = topo.route(src, dst) {
                        per_wg[waveguide] += w;
                    }
                }
            }
        }
        let busiest = per_wg.into_iter().fold(0.0, f64::max);
        if busiest == 0.0 {
            return 1.0;
        }
        (self.core_cycle_ns() / (busiest * self.serialization_ns())).min(1.0)
    }

    /// Latency of a packet that meets no contention.
    pub fn zero_load_ns(&self, route: Route) -> f64 {
        match route {
            Route::Local { hops } => hops as f64 * self.router_ns(),
            Route::Photonic { .. } => 2.0 * self.router_ns() + self.serialization_ns() + self.flight_ns() + self.receive_ns(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: u64,
    pub mean_ns: f64,
    pub median_ns: f64,
    pub p99_ns: f64,
    pub min_ns: f64,
    pub max_ns: f64,
    pub mean_cycles: f64,
    pub median_cycles: f64,
    pub p99_cycles: f64,
}

impl LatencyStats {
    fn from_samples(mut v: Vec<f64>, core_clock_ghz: f64) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let pick = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let (median, p99) = (pick(0.5), pick(0.99));
        Some(LatencyStats {
            count: v.len() as u64,
            mean_ns: mean,
            median_ns: median,
            p99_ns: p99,
            min_ns: v[0],
            max_ns: v[v.len() - 1],
            mean_cycles: mean * core_clock_ghz,
            median_cycles: median * core_clock_ghz,
            p99_cycles: p99 * core_clock_ghz,
        })
    }
}

/// Dynamic energy as event counts times per-event charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTally {
    pub photonic_packets: u64,
    pub wire_bits: u64,
    pub driver_pj_per_bit: f64,
    pub serdes_pj_per_bit: f64,
    pub co_opamp_pj_per_bit: f64,
    pub ti_opamp_pj_per_bit: f64,
    pub tsv_crossings: u64,
    pub tsv_pj_per_crossing: f64,
    pub secded_events: u64,
    pub secded_pj_per_event: f64,
    pub router_hops: u64,
    pub router_pj_per_hop: f64,
    pub driver_pj: f64,
    pub serdes_pj: f64,
    pub co_opamp_pj: f64,
    pub ti_opamp_pj: f64,
    pub tsv_pj: f64,
    pub secded_pj: f64,
    pub router_pj: f64,
    pub total_pj: f64,
}

impl EnergyTally {
    fn new(cfg: &SimConfig) -> Self {
        let l = ledger_for(&cfg.params, cfg.n_lambda, cfg.packet_bits, &cfg.energy);
        let n = cfg.n_lambda as f64;
        EnergyTally {
            photonic_packets: 0,
            wire_bits: 0,
            driver_pj_per_bit: l.epb.driver / n,
            serdes_pj_per_bit: l.epb.serdes / n,
            co_opamp_pj_per_bit: l.epb.co_opamp / n,
            ti_opamp_pj_per_bit: l.epb.ti_opamp / n,
            tsv_crossings: 0,
            tsv_pj_per_crossing: cfg.energy.tsv_bundle_energy_pj,
            secded_events: 0,
            secded_pj_per_event: cfg.energy.secded_event_energy_pj,
            router_hops: 0,
            router_pj_per_hop: cfg.energy.router_energy_pj_per_hop,
            driver_pj: 0.0,
            serdes_pj: 0.0,
            co_opamp_pj: 0.0,
            ti_opamp_pj: 0.0,
            tsv_pj: 0.0,
            secded_pj: 0.0,
            router_pj: 0.0,
            total_pj: 0.0,
        }
    }

    fn finish(&mut self) {
        let bits = self.wire_bits as f64;
        self.driver_pj = bits * self.driver_pj_per_bit;
        self.serdes_pj = bits * self.serdes_pj_per_bit;
        self.co_opamp_pj = bits * self.co_opamp_pj_per_bit;
        self.ti_opamp_pj = bits * self.ti_opamp_pj_per_bit;
        self.tsv_pj = self.tsv_crossings as f64 * self.tsv_pj_per_crossing;
        self.secded_pj = self.secded_events as f64 * self.secded_pj_per_event;
        self.router_pj = self.router_hops as f64 * self.router_pj_per_hop;
        self.total_pj = self.components().iter().sum();
    }

    pub fn components(&self) -> [f64; 7] {
        [self.driver_pj, self.serdes_pj, self.co_opamp_pj, self.ti_opamp_pj, self.tsv_pj, self.secded_pj, self.router_pj]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub profile: ProfileKind,
    pub scheme: SchemeKind,
    pub goal: Goal,
    pub n_lambda: u32,
    pub bitrate_gbps: f64,
    pub injection_rate: f64,
    pub seed: u64,
    pub wire_bits_per_packet: u32,
    pub packets_injected: u64,
    pub packets_measured: u64,
    pub delivered_in_window: u64,
    pub in_flight_at_window_end: u64,
    pub offered_gbps: f64,
    pub accepted_gbps: f64,
    /// Analytic injection rate that fills the busiest waveguide.
    pub saturation_rate: f64,
    pub saturated: bool,
    pub latency: Option<LatencyStats>,
    /// Photonic-path latency with no contention.
    pub zero_load_photonic_ns: f64,
    /// Packets that beat the zero-load bound of their route (always 0).
    pub floor_violations: u64,
    pub energy: EnergyTally,
    #[serde(with = "crate::report::float")]
    pub epb_pj_per_bit: f64,
    pub power: Option<PowerBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_note: Option<String>,
}

/// A packet injected at an explicit time, for trace-driven runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePacket {
    pub cycle: u64,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    src: usize,
    inject_ns: f64,
    route: Route,
    measured: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    Inject { core: usize },
    Arrive { pkt: usize },
    TxDone { wg: usize },
    Deliver { pkt: usize },
}

#[derive(Debug, Clone, Copy)]
struct Timed {
    t: f64,
    seq: u64,
    ev: Event,
}

impl PartialEq for Timed {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Timed {}
impl PartialOrd for Timed {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Timed {
    fn cmp(&self, o: &Self) -> Ordering {
        self.t.total_cmp(&o.t).then(self.seq.cmp(&o.seq))
    }
}

struct Waveguide {
    queues: Vec<VecDeque<usize>>,
    /// Cores stalled on each writer queue.
    waiters: Vec<VecDeque<usize>>,
    busy: bool,
    last: usize,
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    topo: Topology,
    heap: BinaryHeap<Reverse<Timed>>,
    seq: u64,
    packets: Vec<Packet>,
    wgs: Vec<Waveguide>,
    blocked: Vec<VecDeque<usize>>,
    tally: EnergyTally,
    latencies: Vec<f64>,
    floor_violations: u64,
    window: (f64, f64),
    delivered_in_window: u64,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig) -> Self {
        let topo = Topology::new(cfg.profile.name);
        let wgs = topo
            .writers
            .iter()
            .map(|w| Waveguide {
                queues: vec![VecDeque::new(); w.len()],
                waiters: vec![VecDeque::new(); w.len()],
                busy: false,
                last: w.len() - 1,
            })
            .collect();
        let cyc = cfg.core_cycle_ns();
        Engine {
            cfg,
            topo,
            heap: BinaryHeap::new(),
            seq: 0,
            packets: Vec::new(),
            wgs,
            blocked: vec![VecDeque::new(); CORES],
            tally: EnergyTally::new(cfg),
            latencies: Vec::new(),
            floor_violations: 0,
            window: (cfg.warmup_cycles as f64 * cyc, (cfg.warmup_cycles + cfg.measure_cycles) as f64 * cyc),
            delivered_in_window: 0,
        }
    }

    fn push(&mut self, t: f64, ev: Event) {
        self.seq += 1;
        self.heap.push(Reverse(Timed { t, seq: self.seq, ev }));
    }

    fn new_packet(&mut self, t: f64, src: usize, dst: usize, measured: bool) {
        let route = self.topo.route(src, dst);
        let id = self.packets.len();
        self.packets.push(Packet { src, inject_ns: t, route, measured });
        match route {
            Route::Local { hops } => self.push(t + hops as f64 * self.cfg.router_ns(), Event::Deliver { pkt: id }),
            Route::Photonic { .. } => self.push(t + self.cfg.router_ns(), Event::Arrive { pkt: id }),
        }
    }

    fn slot(&self, pkt: usize) -> (usize, usize) {
        match self.packets[pkt].route {
            Route::Photonic { writer, waveguide } => {
                let pos = self.topo.writers[waveguide].iter().position(|&w| w == writer).expect("writer on waveguide");
                (waveguide, pos)
            }
            Route::Local { .. } => unreachable!("local packets never queue"),
        }
    }

    fn has_room(&self, wg: usize, pos: usize) -> bool {
        self.cfg.queue_capacity.is_none_or(|c| self.wgs[wg].queues[pos].len() < c)
    }

    fn arrive(&mut self, t: f64, pkt: usize) {
        let core = self.packets[pkt].src;
        if !self.blocked[core].is_empty() {
            self.blocked[core].push_back(pkt);
            return;
        }
        let (wg, pos) = self.slot(pkt);
        if self.has_room(wg, pos) {
            self.wgs[wg].queues[pos].push_back(pkt);
            self.try_start(t, wg);
        } else {
            self.blocked[core].push_back(pkt);
            self.wgs[wg].waiters[pos].push_back(core);
        }
    }

    /// Admits stalled packets of `core` until one blocks again.
    fn release(&mut self, t: f64, core: usize) {
        while let Some(&pkt) = self.blocked[core].front() {
            let (wg, pos) = self.slot(pkt);
            if !self.has_room(wg, pos) {
                self.wgs[wg].waiters[pos].push_back(core);
                return;
            }
            self.blocked[core].pop_front();
            self.wgs[wg].queues[pos].push_back(pkt);
            self.try_start(t, wg);
        }
    }

    fn try_start(&mut self, t: f64, wg: usize) {
        let w = &mut self.wgs[wg];
        if w.busy {
            return;
        }
        let k = w.queues.len();
        let Some(pos) = (1..=k).map(|d| (w.last + d) % k).find(|&p| !w.queues[p].is_empty()) else {
            return;
        };
        let pkt = w.queues[pos].pop_front().expect("non-empty queue");
        w.busy = true;
        w.last = pos;
        let waiter = w.waiters[pos].pop_front();
        let cfg = self.cfg;
        let done = t + cfg.serialization_ns();
        self.push(done, Event::TxDone { wg });
        self.push(done + cfg.flight_ns() + cfg.receive_ns() + cfg.router_ns(), Event::Deliver { pkt });
        self.tally.photonic_packets += 1;
        self.tally.wire_bits += cfg.wire_bits() as u64;
        self.tally.tsv_crossings += 2 * cfg.energy.tsv_bundles_per_block as u64;
        if cfg.secded() {
            self.tally.secded_events += 2;
        }
        if let Some(core) = waiter {
            self.release(t, core);
        }
    }

    fn deliver(&mut self, t: f64, pkt: usize) {
        let p = self.packets[pkt];
        self.tally.router_hops += p.route.router_hops() as u64;
        if t >= self.window.0 && t < self.window.1 {
            self.delivered_in_window += 1;
        }
        let lat = t - p.inject_ns;
        if lat < self.cfg.zero_load_ns(p.route) - 1e-9 {
            self.floor_violations += 1;
        }
        if p.measured {
            self.latencies.push(lat);
        }
    }

    fn run(&mut self, mut sources: Vec<Source>, trace: &[TracePacket]) -> u64 {
        let cyc = self.cfg.core_cycle_ns();
        let end_cycle = self.cfg.warmup_cycles + self.cfg.measure_cycles;
        let in_window = |c: u64| c >= self.cfg.warmup_cycles && c < end_cycle;
        let mut next_cycle = vec![0u64; sources.len()];
        for (core, s) in sources.iter_mut().enumerate() {
            if let Some(g) = s.next_gap() {
                let c = g - 1;
                if c < end_cycle {
                    next_cycle[core] = c;
                    self.push(c as f64 * cyc, Event::Inject { core });
                }
            }
        }
        for p in trace {
            let measured = in_window(p.cycle);
            self.new_packet(p.cycle as f64 * cyc, p.src, p.dst, measured);
        }
        let mut in_flight_at_end: Option<u64> = None;
        let mut delivered = 0u64;
        while let Some(Reverse(Timed { t, ev, .. })) = self.heap.pop() {
            if in_flight_at_end.is_none() && t >= self.window.1 {
                in_flight_at_end = Some(self.packets.len() as u64 - delivered);
            }
            match ev {
                Event::Inject { core } => {
                    let c = next_cycle[core];
                    let dst = sources[core].next_destination();
                    self.new_packet(t, core, dst, in_window(c));
                    if let Some(g) = sources[core].next_gap() {
                        let nc = c + g;
                        if nc < end_cycle {
                            next_cycle[core] = nc;
                            self.push(nc as f64 * cyc, Event::Inject { core });
                        }
                    }
                }
                Event::Arrive { pkt } => self.arrive(t, pkt),
                Event::TxDone { wg } => {
                    self.wgs[wg].busy = false;
                    self.try_start(t, wg);
                }
                Event::Deliver { pkt } => {
                    delivered += 1;
                    self.deliver(t, pkt);
                }
            }
        }
        in_flight_at_end.unwrap_or(self.packets.len() as u64 - delivered)
    }
}

fn run(cfg: &SimConfig, sources: Vec<Source>, trace: &[TracePacket]) -> Result<SimReport> {
    cfg.validate()?;
    for p in trace {
        if p.src >= CORES || p.dst >= CORES || p.src == p.dst {
            return Err(Error::Config(format!("trace packet {} → {} is not a core pair", p.src, p.dst)));
        }
    }
    let mut e = Engine::new(cfg);
    let in_flight = e.run(sources, trace);
    e.tally.finish();

    let window_ns = e.window.1 - e.window.0;
    let measured = e.packets.iter().filter(|p| p.measured).count() as u64;
    let bits = cfg.packet_bits as f64;
    let offered = measured as f64 * bits / window_ns;
    let accepted = e.delivered_in_window as f64 * bits / window_ns;
    let delivered_bits = e.packets.len() as f64 * bits;
    let throughput = accepted;

    let ledger = ledger_for(&cfg.params, cfg.n_lambda, cfg.packet_bits, &cfg.energy);
    let load = NetworkLoad {
        laser_power_dbm: cfg.laser_power_dbm,
        waveguide_count: cfg.profile.waveguide_count,
        routers: e.topo.routers,
        gateways: e.topo.gateways,
        throughput_gbps: throughput,
    };
    let (power, power_note) = match power_breakdown(&ledger, &cfg.params, &load, &cfg.energy, cfg.wallplug_efficiency) {
        Ok(p) => (Some(p), None),
        Err(Error::Config(m)) => (None, Some(m)),
        Err(err) => return Err(err),
    };

    Ok(SimReport {
        profile: cfg.profile.name,
        scheme: cfg.params.kind,
        goal: cfg.goal,
        n_lambda: cfg.n_lambda,
        bitrate_gbps: cfg.baud_gbaud * cfg.params.kind.bits_per_symbol() as f64,
        injection_rate: cfg.injection_rate,
        seed: cfg.seed,
        wire_bits_per_packet: cfg.wire_bits(),
        packets_injected: e.packets.len() as u64,
        packets_measured: measured,
        delivered_in_window: e.delivered_in_window,
        in_flight_at_window_end: in_flight,
        offered_gbps: offered,
        accepted_gbps: accepted,
        saturation_rate: cfg.saturation_rate(),
        saturated: offered > 0.0 && (offered - accepted) / offered > cfg.saturation_gap,
        latency: LatencyStats::from_samples(std::mem::take(&mut e.latencies), cfg.profile.core_clock_ghz),
        zero_load_photonic_ns: cfg.zero_load_ns(Route::Photonic { writer: 0, waveguide: 0 }),
        floor_violations: e.floor_violations,
        epb_pj_per_bit: if delivered_bits > 0.0 { e.tally.total_pj / delivered_bits } else { f64::NAN },
        energy: e.tally,
        power,
        power_note,
    })
}

/// Runs the synthetic-traffic simulation.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    let sources = (0..CORES)
        .map(|c| Source::new(c, cfg.seed, cfg.injection_rate, cfg.traffic, cfg.hotspot_fraction))
        .collect();
    run(cfg, sources, &[])
}

/// Runs with only the given packets and no synthetic sources.
pub fn simulate_trace(cfg: &SimConfig, trace: &[TracePacket]) -> Result<SimReport> {
    let mut c = cfg.clone();
    c.injection_rate = 0.0;
    run(&c, Vec::new(), trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub scheme: SchemeKind,
    pub n_lambda: u32,
    pub bitrate_gbps: f64,
    pub mean_latency_ns: Option<f64>,
    #[serde(with = "crate::report::float")]
    pub epb_pj_per_bit: f64,
    pub latency_ratio: Option<f64>,
    pub epb_ratio: Option<f64>,
    pub report: SimReport,
}

/// Runs each design at a shared load and seed. Ratios are relative to the
/// OOK variant, or to the first one when no OOK design is given.
pub fn compare_variants(model: &Model, designs: &[DesignPoint], load: f64, seed: u64) -> Result<Vec<VariantResult>> {
    let reports = designs
        .iter()
        .map(|d| simulate(&SimConfig::from_model(model, d, load, seed)?))
        .collect::<Result<Vec<_>>>()?;
    let base = designs.iter().position(|d| d.scheme == SchemeKind::Ook).unwrap_or(0);
    let base_lat = reports.get(base).and_then(|r| r.latency.as_ref().map(|l| l.mean_ns));
    let base_epb = reports.get(base).map(|r| r.epb_pj_per_bit);
    Ok(reports
        .into_iter()
        .map(|r| {
            let mean = r.latency.as_ref().map(|l| l.mean_ns);
            VariantResult {
                scheme: r.scheme,
                n_lambda: r.n_lambda,
                bitrate_gbps: r.bitrate_gbps,
                mean_latency_ns: mean,
                epb_pj_per_bit: r.epb_pj_per_bit,
                latency_ratio: mean.zip(base_lat).map(|(a, b)| a / b),
                epb_ratio: base_epb.filter(|b| b.is_finite()).map(|b| r.epb_pj_per_bit / b),
                report: r,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use approx::assert_relative_eq;

    fn cfg(profile: ProfileKind, scheme: SchemeKind, goal: Goal, n: u32, baud: f64, rate: f64) -> SimConfig {
        let model = Model::new(Config::default()).unwrap();
        let d = model.evaluate_duplet(n, baud, scheme, profile, goal, None).unwrap();
        let mut c = SimConfig::from_model(&model, &d, rate, 11).unwrap();
        c.warmup_cycles = 500;
        c.measure_cycles = 4_000;
        c
    }

    #[test]
    fn zero_rate_is_empty() {
        let r = simulate(&cfg(ProfileKind::Clos, SchemeKind::Ook, Goal::DrBerBalanced, 64, 17.0, 0.0)).unwrap();
        assert_eq!(r.packets_injected, 0);
        assert_eq!(r.energy.total_pj, 0.0);
        assert!(r.latency.is_none());
        assert!(!r.saturated);
    }

    #[test]
    fn lone_packet_matches_stage_sum() {
        let c = cfg(ProfileKind::Clos, SchemeKind::Ook, Goal::DrBerBalanced, 64, 17.0, 0.0);
        let r = simulate_trace(&c, &[TracePacket { cycle: 600, src: 0, dst: 255 }]).unwrap();
        // 0.8 ns router, 9 symbols at 17 Gbaud, 4.5 cm at 8.6e7 m/s, 2 photonic cycles, 0.8 ns router.
        let want = 0.8 + 9.0 / 17.0 + 0.045 / 8.6e7 * 1e9 + 0.4 + 0.8;
        assert_relative_eq!(r.latency.unwrap().mean_ns, want, epsilon = 1e-9);
        assert_eq!(r.energy.secded_events, 2);
        assert_eq!(r.energy.tsv_crossings, 16);
        assert_eq!(r.energy.wire_bits, 576);
    }

    #[test]
    fn secded_adds_an_eighth_and_a_cycle() {
        let bal = cfg(ProfileKind::Swift, SchemeKind::Ook, Goal::DrBerBalanced, 64, 16.0, 0.0);
        let mut opt = bal.clone();
        opt.goal = Goal::BerOptimal;
        let trace = [TracePacket { cycle: 700, src: 3, dst: 200 }];
        let a = simulate_trace(&bal, &trace).unwrap().latency.unwrap().mean_ns;
        let b = simulate_trace(&opt, &trace).unwrap().latency.unwrap().mean_ns;
        assert_relative_eq!(a - b, (576.0 / 512.0 - 1.0) * opt.serialization_ns() + 0.2, epsilon = 1e-9);
    }

    #[test]
    fn contention_serializes_on_a_waveguide() {
        let c = cfg(ProfileKind::Clos, SchemeKind::Ook, Goal::BerOptimal, 8, 10.0, 0.0);
        let trace = [TracePacket { cycle: 600, src: 0, dst: 40 }, TracePacket { cycle: 600, src: 1, dst: 41 }];
        let r = simulate_trace(&c, &trace).unwrap().latency.unwrap();
        assert_relative_eq!(r.max_ns - r.min_ns, c.serialization_ns(), epsilon = 1e-9);
    }

    #[test]
    fn conservation_and_floor() {
        let c = cfg(ProfileKind::Swift, SchemeKind::Pam4Edac, Goal::DrBerBalanced, 16, 15.0, 0.01);
        let r = simulate(&c).unwrap();
        assert!(r.packets_injected > 0);
        assert_eq!(r.floor_violations, 0);
        let delivered_before_end = r.packets_injected - r.in_flight_at_window_end;
        assert!(delivered_before_end >= r.delivered_in_window);
        let e = &r.energy;
        assert_eq!(e.total_pj, e.components().iter().sum::<f64>());
        assert_eq!(e.router_pj, e.router_hops as f64 * e.router_pj_per_hop);
    }

    #[test]
    fn bounded_queues_deliver_everything() {
        let mut c = cfg(ProfileKind::Swift, SchemeKind::Ook, Goal::BerOptimal, 8, 10.0, 0.02);
        c.queue_capacity = Some(1);
        let bounded = simulate(&c).unwrap();
        c.queue_capacity = None;
        let free = simulate(&c).unwrap();
        assert_eq!(bounded.packets_injected, free.packets_injected);
        assert_eq!(bounded.energy.photonic_packets, free.energy.photonic_packets);
        assert!(bounded.latency.unwrap().mean_ns >= free.latency.unwrap().mean_ns - 1e-9);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]
        #[test]
        fn conserves_packets_and_energy(seed in 0u64..1_000, frac in 0.05f64..1.2, swift in proptest::bool::ANY) {
            let profile = if swift { ProfileKind::Swift } else { ProfileKind::Clos };
            let mut c = cfg(profile, SchemeKind::Ook, Goal::BerOptimal, 8, 16.0, 0.0);
            c.injection_rate = frac * c.saturation_rate();
            c.seed = seed;
            c.measure_cycles = 1_500;
            let r = simulate(&c).unwrap();
            proptest::prop_assert_eq!(r.floor_violations, 0);
            proptest::prop_assert!(r.packets_injected - r.in_flight_at_window_end >= r.delivered_in_window);
            let e = &r.energy;
            proptest::prop_assert_eq!(e.total_pj, e.components().iter().sum::<f64>());
        }
    }

    #[test]
    fn saturation_rate_by_hand() {
        // CLOS uniform: each waveguide carries 32·32/255 packets per unit rate.
        let c = cfg(ProfileKind::Clos, SchemeKind::Ook, Goal::DrBerBalanced, 64, 17.0, 0.0);
        let want = 0.4 / (32.0 * 32.0 / 255.0 * 9.0 / 17.0);
        assert_relative_eq!(c.saturation_rate(), want, max_relative = 1e-12);
        // SWIFT: four 16-core writers send to the 32 cores of a group.
        let c = cfg(ProfileKind::Swift, SchemeKind::Ook, Goal::BerOptimal, 32, 16.0, 0.0);
        let want = 0.4 / (4.0 * 16.0 * 32.0 / 255.0 * 1.0);
        assert_relative_eq!(c.saturation_rate(), want, max_relative = 1e-12);
    }

    #[test]
    fn deterministic() {
        let c = cfg(ProfileKind::Clos, SchemeKind::Pam4Odac, Goal::BerOptimal, 32, 12.0, 0.004);
        let a = serde_json::to_string(&simulate(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&simulate(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_needs_tuning_range() {
        let mut c = cfg(ProfileKind::Clos, SchemeKind::Ook, Goal::BerOptimal, 8, 10.0, 0.001);
        let r = simulate(&c).unwrap();
        assert!(r.power.is_none() && r.power_note.is_some());
        c.energy.mr_tuning_range_nm = Some(1.0);
        let p = simulate(&c).unwrap().power.unwrap();
        assert_relative_eq!(p.total_mw, p.laser_wallplug_mw + p.mr_tuning_mw + p.txrx_dynamic_mw + p.electrical_mw);
    }
}
