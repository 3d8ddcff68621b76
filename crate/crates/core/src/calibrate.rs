//! Fits the open model switches against the designated calibration rows of
//! the golden tables.
//!
//! The free parameters are the ξ convention, the through-loss reading and
//! Δf per scheme. Δf only enters the BER-optimal penalty, so it is fitted per
//! scheme against that scheme's BER-optimal calibration row.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::Result;
use crate::params::SchemeKind;
use crate::penalty::{Goal, ThroughLossMode, XiConvention};
use crate::search::{DesignPoint, Model};
use crate::tables::{GoldenRow, GoldenTable};

/// Score of a row with no feasible duplet.
const MISS_SCORE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    pub xi_conventions: Vec<XiConvention>,
    pub through_loss_modes: Vec<ThroughLossMode>,
    pub delta_f_ghz: Vec<f64>,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        CalibrationGrid {
            xi_conventions: vec![XiConvention::HalfWidth, XiConvention::FullWidth],
            through_loss_modes: vec![ThroughLossMode::TransmittedFraction, ThroughLossMode::Literal],
            delta_f_ghz: (0..=40).map(|k| k as f64 * 2.5).collect(),
        }
    }
}

/// Mismatch of a search result against a golden row: 1 for a different N_λ,
/// up to 0.5 for the bitrate gap, plus a small penalty-column term.
pub fn row_score(row: &GoldenRow, point: Option<&DesignPoint>) -> f64 {
    let Some(p) = point else { return MISS_SCORE };
    let n_miss = if p.n_lambda == row.n_lambda { 0.0 } else { 1.0 };
    let br = 0.5 * ((p.bitrate_gbps - row.bitrate_gbps).abs() / 3.0).min(1.0);
    let pp = p
        .penalty_plus_split_db()
        .map(|v| 0.01 * (v - row.penalty_plus_10logn_db).abs())
        .unwrap_or(0.0);
    n_miss + br + pp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFit {
    pub goal: Goal,
    pub row: GoldenRow,
    pub point: Option<DesignPoint>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub xi_convention: XiConvention,
    pub through_loss: ThroughLossMode,
    pub delta_f_ghz: BTreeMap<SchemeKind, f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub chosen: Candidate,
    pub candidates: Vec<Candidate>,
    pub rows: Vec<RowFit>,
    /// Sensitivity anchors removed by monotone regularization, (baud, dBm).
    pub dropped_anchors: Vec<(f64, f64)>,
    pub config: Config,
}

fn search_row(model: &Model, goal: Goal, row: &GoldenRow) -> Result<Option<DesignPoint>> {
    match model.search_optimal(row.scheme, row.profile, goal, Some(row.er_db)) {
        Ok(p) => Ok(Some(p)),
        Err(crate::Error::NoFeasibleDuplet { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn with_switches(base: &Config, xi: XiConvention, tl: ThroughLossMode) -> Config {
    let mut c = base.clone();
    c.model.xi_convention = xi;
    c.model.through_loss = tl;
    c
}

/// Grid-searches the switches. Ties keep the earlier grid entry, so smaller
/// Δf wins.
pub fn calibrate(base: &Config, grid: &CalibrationGrid) -> Result<CalibrationReport> {
    let balanced = GoldenTable::bundled(Goal::DrBerBalanced);
    let optimal = GoldenTable::bundled(Goal::BerOptimal);
    let mut candidates = Vec::new();
    let mut best: Option<(Candidate, Vec<RowFit>)> = None;

    for &xi in &grid.xi_conventions {
        for &tl in &grid.through_loss_modes {
            let cfg = with_switches(base, xi, tl);
            let mut model = Model::new(cfg.clone())?;
            let mut fits = Vec::new();
            for row in balanced.calibration_rows() {
                let point = search_row(&model, Goal::DrBerBalanced, row)?;
                fits.push(RowFit { goal: Goal::DrBerBalanced, row: row.clone(), score: row_score(row, point.as_ref()), point });
            }
            let mut delta_f = BTreeMap::new();
            for scheme in SchemeKind::ALL {
                let rows: Vec<&GoldenRow> = optimal.calibration_rows().filter(|r| r.scheme == scheme).collect();
                let mut chosen: Option<(f64, f64, Vec<RowFit>)> = None;
                for &df in &grid.delta_f_ghz {
                    if let Some(s) = model.config.schemes.get_mut(&scheme) {
                        s.delta_f_ghz = df;
                    }
                    let mut total = 0.0;
                    let mut row_fits = Vec::new();
                    for row in &rows {
                        let point = search_row(&model, Goal::BerOptimal, row)?;
                        let score = row_score(row, point.as_ref());
                        total += score;
                        row_fits.push(RowFit { goal: Goal::BerOptimal, row: (*row).clone(), point, score });
                    }
                    if chosen.as_ref().is_none_or(|c| total < c.1 - 1e-12) {
                        chosen = Some((df, total, row_fits));
                    }
                }
                let (df, _, row_fits) = chosen.unwrap_or((base.schemes[&scheme].delta_f_ghz, 0.0, Vec::new()));
                if let Some(s) = model.config.schemes.get_mut(&scheme) {
                    s.delta_f_ghz = df;
                }
                delta_f.insert(scheme, df);
                fits.extend(row_fits);
            }
            let score = fits.iter().map(|f| f.score).sum();
            let cand = Candidate { xi_convention: xi, through_loss: tl, delta_f_ghz: delta_f, score };
            if best.as_ref().is_none_or(|(b, _)| score < b.score - 1e-12) {
                best = Some((cand.clone(), fits));
            }
            candidates.push(cand);
        }
    }

    let (chosen, rows) = best.ok_or_else(|| crate::Error::Config("calibration grid is empty".into()))?;
    let config = apply(base, &chosen);
    let dropped_anchors = config
        .sensitivity_curve()?
        .dropped()
        .iter()
        .map(|a| (a.baud_gbaud, a.sensitivity_dbm))
        .collect();
    Ok(CalibrationReport { chosen, candidates, rows, dropped_anchors, config })
}

/// Config with a candidate's switches applied.
pub fn apply(base: &Config, cand: &Candidate) -> Config {
    let mut c = with_switches(base, cand.xi_convention, cand.through_loss);
    for (kind, df) in &cand.delta_f_ghz {
        if let Some(s) = c.schemes.get_mut(kind) {
            s.delta_f_ghz = *df;
        }
    }
    c
}
