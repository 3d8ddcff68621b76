//! Crosstalk and loss models of a DWDM microring link.
//!
//! The central quantity is Γ_ij, the fraction of channel j's power dropped by
//! ring i of a cascaded bank:
//!
//! ```text
//! Γ_ij = ∫ sinc²(F) · L_i(F) · Π_{k<i} H_k(F) dF
//! L_k(F) = 1 / (1 + ((F + o_kj)/ξ)²),   H_k = 1 − L_k
//! ```
//!
//! with o_kj the detuning between ring k and signal j normalized to the baud
//! rate. A whole bank is evaluated in closed form from the residues of the
//! integrand in the upper half plane; [`crosstalk_fraction`] evaluates single
//! entries by numerical quadrature and serves as the independent check.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{db_to_linear, PnocProfile, SignalingParams, GHZ, NM};
use crate::quadrature::{self, Method};

/// Wavelength counts the search may use.
pub const LAMBDA_SET: [u32; 8] = [1, 2, 4, 8, 16, 32, 64, 128];

/// Margin, in normalized frequency units, between the outermost ring and the
/// start of the mapped tails.
const CORE_MARGIN: f64 = 32.0;

/// Residue sums whose magnitude exceeds the result by this factor are
/// re-evaluated by quadrature.
const MAX_CANCELLATION: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuneMode {
    Filter,
    ActiveMr,
    InactiveMr,
}

impl DetuneMode {
    /// Signal offset from its own ring, in channel spacings.
    pub fn shift(self) -> f64 {
        match self {
            DetuneMode::InactiveMr => 0.5,
            _ => 0.0,
        }
    }
}

/// How the FWHM is normalized into the Lorentzian width ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiConvention {
    /// ξ = FWHM / (2·BaR), the half-width at half maximum.
    HalfWidth,
    /// ξ = FWHM / BaR.
    FullWidth,
}

/// Reading of the MR through-loss expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThroughLossMode {
    /// −10·log10(1 − ΣΓ): the power that is not dropped.
    TransmittedFraction,
    /// −10·log10(ΣΓ), as printed.
    Literal,
}

/// Model switches left open by the link equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSwitches {
    pub xi_convention: XiConvention,
    pub through_loss: ThroughLossMode,
    /// Fixed insertion loss added per MR unit on top of the crosstalk drop.
    pub extra_mr_loss_db: f64,
}

impl Default for ModelSwitches {
    fn default() -> Self {
        ModelSwitches {
            xi_convention: XiConvention::HalfWidth,
            through_loss: ThroughLossMode::TransmittedFraction,
            extra_mr_loss_db: 0.0,
        }
    }
}

impl ModelSwitches {
    pub fn xi(&self, fwhm_ghz: f64, baud_gbaud: f64) -> f64 {
        match self.xi_convention {
            XiConvention::HalfWidth => fwhm_ghz / (2.0 * baud_gbaud),
            XiConvention::FullWidth => fwhm_ghz / baud_gbaud,
        }
    }
}

/// Channel grid of one link: λ_i = base + i·FSR/(N+1), i = 1..N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub n_lambda: u32,
    pub baud_gbaud: f64,
    pub fsr_nm: f64,
    pub base_wavelength_nm: f64,
    pub v_si_m_per_s: f64,
}

impl LinkGeometry {
    pub fn new(n_lambda: u32, baud_gbaud: f64, profile: &PnocProfile, v_si_m_per_s: f64) -> Result<Self> {
        if n_lambda == 0 {
            return Err(Error::Domain("wavelength count must be at least 1".into()));
        }
        if !(baud_gbaud > 0.0) {
            return Err(Error::Domain(format!("baud rate must be positive, got {baud_gbaud}")));
        }
        Ok(LinkGeometry {
            n_lambda,
            baud_gbaud,
            fsr_nm: profile.fsr_nm,
            base_wavelength_nm: profile.base_wavelength_nm,
            v_si_m_per_s,
        })
    }

    pub fn in_search_space(&self) -> bool {
        LAMBDA_SET.contains(&self.n_lambda)
    }

    /// Channel spacing in metres.
    pub fn spacing_m(&self) -> f64 {
        self.fsr_nm * NM / (self.n_lambda as f64 + 1.0)
    }

    /// Wavelength of 0-based channel `k`, in metres.
    pub fn wavelength_m(&self, k: usize) -> f64 {
        self.base_wavelength_nm * NM + (k as f64 + 1.0) * self.spacing_m()
    }

    /// Adjacent-channel frequency spacing at the band centre, in Hz.
    pub fn adjacent_spacing_hz(&self) -> f64 {
        let centre = self.base_wavelength_nm * NM + 0.5 * self.fsr_nm * NM;
        let d = self.spacing_m();
        self.v_si_m_per_s * d / ((centre - 0.5 * d) * (centre + 0.5 * d))
    }

    /// Normalized detuning (f_k − f_signal)/BaR of ring k from signal j.
    pub fn offset(&self, k: usize, j: usize, shift: f64) -> f64 {
        let lk = self.wavelength_m(k);
        let ls = self.wavelength_m(j) + shift * self.spacing_m();
        self.v_si_m_per_s * (ls - lk) / (lk * ls * self.baud_gbaud * GHZ)
    }

    /// Integer core interval covering every ring of column `j` plus margin.
    pub fn core_interval(&self, j: usize, shift: f64) -> (i64, i64) {
        let n = self.n_lambda as usize;
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for k in 0..n {
            let c = -self.offset(k, j, shift);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        ((lo - CORE_MARGIN).floor() as i64, (hi + CORE_MARGIN).ceil() as i64)
    }
}

/// Integrand weight of Γ_ij: L_i · Π_{k<i} H_k.
fn gamma_weight(offsets: &[f64], i: usize, xi: f64) -> impl Fn(f64) -> f64 + '_ {
    move |f: f64| {
        let x = (f + offsets[i]) / xi;
        let mut v = 1.0 / (1.0 + x * x);
        for &o in &offsets[..i] {
            let y = (f + o) / xi;
            let y2 = y * y;
            v *= y2 / (1.0 + y2);
        }
        v
    }
}

/// Γ_ij by numerical quadrature (0-based indices).
pub fn crosstalk_fraction(i: usize, j: usize, geom: &LinkGeometry, xi: f64, mode: DetuneMode, method: Method) -> Result<f64> {
    let n = geom.n_lambda as usize;
    if i >= n || j >= n {
        return Err(Error::Domain(format!("channel index out of range for N={n}")));
    }
    if !(xi > 0.0) {
        return Err(Error::Domain("Lorentzian width must be positive".into()));
    }
    let shift = mode.shift();
    let offsets: Vec<f64> = (0..n).map(|k| geom.offset(k, j, shift)).collect();
    let (lo, hi) = geom.core_interval(j, shift);
    let v = quadrature::sinc2_integral(gamma_weight(&offsets, i, xi), lo, hi, method)?.value;
    Ok(v.clamp(0.0, 1.0))
}

/// Full Γ matrix of a bank, row `i` = dropping ring, column `j` = signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBank {
    pub n: usize,
    pub shift: f64,
    pub xi: f64,
    values: Vec<f64>,
    /// Entries that fell back to quadrature.
    pub fallbacks: usize,
}

impl GammaBank {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Σ_{j≠i} Γ_ij: crosstalk collected by ring i.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| j != i).map(|j| self.get(i, j)).sum())
            .collect()
    }

    /// Σ_i Γ_ij over the rings that are not channel j's own resonance.
    /// With a half-channel shift no ring sits on the signal, so all count.
    pub fn column_sums(&self) -> Vec<f64> {
        let include_own = self.shift != 0.0;
        (0..self.n)
            .map(|j| (0..self.n).filter(|&i| include_own || i != j).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

/// Evaluates every Γ_ij of a bank from the residues of the integrand.
///
/// With p_m = −o_mj + iξ and c(z) = (1 − e^{2πiz})/(2π²z²),
///
/// ```text
/// Γ_ij = R_i(0) + πξ·Re[ c(p_i)·D_i(p_i) − Σ_{m<i} c(p_m)·L_i(p_m)·D_{i,m}(p_m) ]
/// ```
///
/// where D are the H-products over k<i excluding k=m. L_i(p_m) only depends
/// on ring-to-ring spacing, so the products are shared by every column.
pub fn gamma_bank(geom: &LinkGeometry, xi: f64, mode: DetuneMode) -> Result<GammaBank> {
    if !(xi > 0.0) {
        return Err(Error::Domain("Lorentzian width must be positive".into()));
    }
    let n = geom.n_lambda as usize;
    let shift = mode.shift();
    let mut values = vec![0.0; n * n];
    let mut fallbacks = 0;
    if n == 1 && shift == 0.0 {
        return Ok(GammaBank { n, shift, xi, values, fallbacks });
    }

    // Ring-to-ring detuning in normalized units: o_i − o_m, independent of j.
    let ring = |a: usize, b: usize| geom.offset(a, b, 0.0);
    let xi2 = xi * xi;
    let l_at_pole = |delta: f64| -> Complex64 {
        // ξ² / (Δ(Δ + 2iξ))
        Complex64::new(xi2, 0.0) / (Complex64::new(delta, 0.0) * Complex64::new(delta, 2.0 * xi))
    };

    // e[i][m] for m ≤ i holds the j-independent coefficient of c(p_m).
    let mut e = vec![Complex64::new(0.0, 0.0); n * n];
    let mut d = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        for m in 0..i {
            e[i * n + m] = -l_at_pole(ring(i, m)) * d[m];
        }
        e[i * n + i] = d[i];
        for m in 0..n {
            if m != i {
                d[m] *= Complex64::new(1.0, 0.0) - l_at_pole(ring(i, m));
            }
        }
    }

    let two_pi2 = 2.0 * PI * PI;
    let mut offsets = vec![0.0; n];
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for k in 0..n {
            offsets[k] = geom.offset(k, j, shift);
            let p = Complex64::new(-offsets[k], xi);
            let ex = Complex64::from_polar((-2.0 * PI * xi).exp(), 2.0 * PI * p.re);
            c[k] = (Complex64::new(1.0, 0.0) - ex) / (p * p * two_pi2);
        }
        let mut h0 = 1.0;
        for i in 0..n {
            let x = offsets[i] / xi;
            let l0 = 1.0 / (1.0 + x * x);
            if i != j || shift != 0.0 {
                let r0 = l0 * h0;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut mag = 0.0;
                for m in 0..=i {
                    let t = e[i * n + m] * c[m];
                    acc += t;
                    mag += t.norm();
                }
                let v = r0 + PI * xi * acc.re;
                let scale = r0 + PI * xi * mag;
                let v = if !(v > 0.0) || scale > MAX_CANCELLATION * v || v > 1.0 + 1e-12 {
                    fallbacks += 1;
                    let (lo, hi) = geom.core_interval(j, shift);
                    quadrature::sinc2_integral(gamma_weight(&offsets, i, xi), lo, hi, Method::GRID)?.value
                } else {
                    v
                };
                values[i * n + j] = v.clamp(0.0, 1.0);
            }
            h0 *= 1.0 - l0;
        }
    }
    Ok(GammaBank { n, shift, xi, values, fallbacks })
}

/// Row and column sums of a bank: all the search needs from Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct BankSums {
    pub row_sums: Vec<f64>,
    pub column_sums: Vec<f64>,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BankKey {
    n: u32,
    baud: u64,
    xi: u64,
    shift: u64,
    fsr: u64,
    base: u64,
    v: u64,
}

/// Memoizes bank sums across schemes, profiles and goals sharing a geometry.
#[derive(Debug, Default)]
pub struct GammaCache {
    map: Mutex<HashMap<BankKey, Arc<BankSums>>>,
}

impl GammaCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sums(&self, geom: &LinkGeometry, xi: f64, mode: DetuneMode) -> Result<Arc<BankSums>> {
        let key = BankKey {
            n: geom.n_lambda,
            baud: geom.baud_gbaud.to_bits(),
            xi: xi.to_bits(),
            shift: mode.shift().to_bits(),
            fsr: geom.fsr_nm.to_bits(),
            base: geom.base_wavelength_nm.to_bits(),
            v: geom.v_si_m_per_s.to_bits(),
        };
        if let Some(s) = self.map.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let bank = gamma_bank(geom, xi, mode)?;
        let sums = Arc::new(BankSums {
            row_sums: bank.row_sums(),
            column_sums: bank.column_sums(),
            fallbacks: bank.fallbacks,
        });
        self.map.lock().unwrap().insert(key, sums.clone());
        Ok(sums)
    }
}

/// PP^Mod from the adjacent-channel spacing and Δf.
pub fn modulator_penalty(params: &SignalingParams, geom: &LinkGeometry) -> Result<f64> {
    if !(params.fwhm_ghz > 0.0) {
        return Err(Error::Domain("FWHM must be positive".into()));
    }
    if geom.n_lambda < 2 {
        return Ok(0.0);
    }
    let f_delta = geom.adjacent_spacing_hz() / GHZ;
    Ok(modulator_penalty_from_spacing(f_delta, params.delta_f_ghz, params.fwhm_ghz, params.q0))
}

/// −5·log10(((2K/FWHM)² + q0)/((2K/FWHM)² + 1)), K = f_Δ − Δf for f_Δ > 0.
pub fn modulator_penalty_from_spacing(f_delta_ghz: f64, delta_f_ghz: f64, fwhm_ghz: f64, q0: f64) -> f64 {
    let k = if f_delta_ghz > 0.0 { f_delta_ghz - delta_f_ghz } else { f_delta_ghz };
    let x2 = (2.0 * k / fwhm_ghz).powi(2);
    -5.0 * ((x2 + q0) / (x2 + 1.0)).log10()
}

/// PP^Fil for a ring collecting total crosstalk fraction `sum_gamma`.
pub fn filter_penalty_from_sum(sum_gamma: f64, params: &SignalingParams) -> Result<f64> {
    let r = db_to_linear(params.extinction_ratio_db);
    let arg = 1.0 - 0.5 * params.q_ber * sum_gamma * (r + 1.0) / (r - 1.0);
    if !(arg > 0.0) {
        return Err(Error::Infeasible(format!(
            "filter crosstalk ΣΓ = {sum_gamma:.4} exceeds what Q = {} tolerates",
            params.q_ber
        )));
    }
    Ok(-10.0 * arg.log10())
}

/// PP^Fil of every filter in the bank.
pub fn filter_penalties(params: &SignalingParams, geom: &LinkGeometry, switches: &ModelSwitches) -> Result<Vec<f64>> {
    let xi = switches.xi(params.fwhm_ghz, geom.baud_gbaud);
    let bank = gamma_bank(geom, xi, DetuneMode::Filter)?;
    bank.row_sums().into_iter().map(|s| filter_penalty_from_sum(s, params)).collect()
}

pub fn worst_filter_penalty(params: &SignalingParams, geom: &LinkGeometry, switches: &ModelSwitches) -> Result<f64> {
    Ok(filter_penalties(params, geom, switches)?.into_iter().fold(0.0, f64::max))
}

/// Through loss for a channel whose power is dropped by fraction `sum_gamma`.
pub fn through_loss_from_sum(sum_gamma: f64, mode: ThroughLossMode) -> Result<f64> {
    match mode {
        ThroughLossMode::TransmittedFraction => {
            if sum_gamma >= 1.0 {
                return Err(Error::Infeasible(format!("MR bank drops ΣΓ = {sum_gamma:.4} of the signal")));
            }
            Ok(-10.0 * (1.0 - sum_gamma).log10())
        }
        ThroughLossMode::Literal => {
            if !(sum_gamma > 0.0) {
                return Err(Error::Infeasible("literal through loss is unbounded for zero crosstalk".into()));
            }
            Ok(-10.0 * sum_gamma.log10())
        }
    }
}

/// Worst per-channel through loss of a bank from its column sums. A single
/// active ring has nothing to pass through.
pub fn through_loss_from_columns(column_sums: &[f64], n_lambda: u32, active: bool, mode: ThroughLossMode) -> Result<f64> {
    if n_lambda == 1 && active {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for &s in column_sums {
        worst = worst.max(through_loss_from_sum(s, mode)?);
    }
    Ok(worst)
}

/// Worst per-channel through loss of an active or inactive MR bank.
pub fn mr_through_loss(geom: &LinkGeometry, fwhm_ghz: f64, active: bool, switches: &ModelSwitches) -> Result<f64> {
    let mode = if active { DetuneMode::ActiveMr } else { DetuneMode::InactiveMr };
    let bank = gamma_bank(geom, switches.xi(fwhm_ghz, geom.baud_gbaud), mode)?;
    through_loss_from_columns(&bank.column_sums(), geom.n_lambda, active, switches.through_loss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// Every penalty term included; BER held at the design target.
    BerOptimal,
    /// Crosstalk penalties dropped; residual errors left to SECDED.
    #[serde(alias = "balanced")]
    DrBerBalanced,
}

impl Goal {
    pub const ALL: [Goal; 2] = [Goal::DrBerBalanced, Goal::BerOptimal];

    pub fn as_str(self) -> &'static str {
        match self {
            Goal::BerOptimal => "ber_optimal",
            Goal::DrBerBalanced => "balanced",
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ber_optimal" | "optimal" | "bero" | "opt" => Ok(Goal::BerOptimal),
            "balanced" | "dr_ber_balanced" | "bal" => Ok(Goal::DrBerBalanced),
            _ => Err(Error::Config(format!("unknown design goal '{s}'"))),
        }
    }
}

/// Itemized dB contributions. Terms a goal excludes are reported as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    pub goal: Goal,
    pub p_mr_act: f64,
    pub p_mr_inact: f64,
    pub p_wgp: f64,
    pub p_wgb: f64,
    pub p_sp: f64,
    pub p_c: f64,
    pub pp_mod: f64,
    pub pp_fil: f64,
    pub pp_pam: f64,
    pub pp_intrf: f64,
    pub pp_er: f64,
    pub total: f64,
}

impl PenaltyBreakdown {
    /// Terms shared by both goals, in summation order.
    pub fn common_terms(&self) -> [f64; 8] {
        [self.p_wgp, self.p_sp, self.p_c, self.p_wgb, self.pp_pam, self.pp_er, self.p_mr_act, self.p_mr_inact]
    }

    pub fn crosstalk_terms(&self) -> [f64; 3] {
        [self.pp_mod, self.pp_fil, self.pp_intrf]
    }

    fn sum(&self) -> f64 {
        let common: f64 = self.common_terms().iter().sum();
        match self.goal {
            Goal::DrBerBalanced => common,
            Goal::BerOptimal => common + self.crosstalk_terms().iter().sum::<f64>(),
        }
    }
}

/// Inputs a penalty evaluation needs beyond the scheme and profile.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyContext<'a> {
    pub switches: &'a ModelSwitches,
    pub cache: &'a GammaCache,
}

pub fn total_penalty(
    goal: Goal,
    params: &SignalingParams,
    profile: &PnocProfile,
    geom: &LinkGeometry,
    ctx: PenaltyContext<'_>,
) -> Result<PenaltyBreakdown> {
    let sw = ctx.switches;
    let xi = sw.xi(params.fwhm_ghz, geom.baud_gbaud);
    let units = params.kind.modulators_per_channel() as f64;

    let shared = ctx.cache.sums(geom, xi, DetuneMode::Filter)?;
    let inactive = ctx.cache.sums(geom, xi, DetuneMode::InactiveMr)?;
    let act = through_loss_from_columns(&shared.column_sums, geom.n_lambda, true, sw.through_loss)?;
    let inact = through_loss_from_columns(&inactive.column_sums, geom.n_lambda, false, sw.through_loss)?;

    let (pp_mod, pp_fil, pp_intrf) = match goal {
        Goal::DrBerBalanced => (0.0, 0.0, 0.0),
        Goal::BerOptimal => {
            let mut worst: f64 = 0.0;
            for &s in &shared.row_sums {
                worst = worst.max(filter_penalty_from_sum(s, params)?);
            }
            (modulator_penalty(params, geom)?, worst, params.pp_intrf_db)
        }
    };

    let mut b = PenaltyBreakdown {
        goal,
        p_mr_act: units * (act + sw.extra_mr_loss_db),
        p_mr_inact: units * (inact + sw.extra_mr_loss_db),
        p_wgp: profile.propagation_loss_db(),
        p_wgb: profile.bend_loss_db(),
        p_sp: profile.splitter_loss_total_db,
        p_c: profile.coupler_loss_db,
        pp_mod,
        pp_fil,
        pp_pam: params.pp_pam_db,
        pp_intrf,
        pp_er: params.pp_er_db,
        total: 0.0,
    };
    b.total = b.sum();
    Ok(b)
}
