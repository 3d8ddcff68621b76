//! Exhaustive search over (N_λ, baud) duplets for the operating point that
//! uses the power budget most fully.
//!
//! For each duplet the slack is
//!
//! ```text
//! ε = P_B − PP − 10·log10(N_λ),   P_B = P_max − S(baud)
//! ```
//!
//! and the search returns the feasible duplet with the smallest ε ≥ 0.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::params::{PnocProfile, ProfileKind, SchemeKind, SignalingParams};
use crate::penalty::{total_penalty, DetuneMode, GammaCache, Goal, LinkGeometry, PenaltyBreakdown, PenaltyContext};
use crate::reliability::{snr_from_row_sums, BerReport};
use crate::sensitivity::{bitrate, SensitivityCurve};

/// One evaluated duplet. Infeasible points carry `slack_db = -inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub scheme: SchemeKind,
    pub profile: ProfileKind,
    pub goal: Goal,
    pub er_db: f64,
    pub n_lambda: u32,
    pub baud_gbaud: f64,
    pub bitrate_gbps: f64,
    pub aggregate_gbps: f64,
    pub sensitivity_dbm: f64,
    pub sensitivity_extrapolated: bool,
    pub power_budget_db: f64,
    pub penalty: Option<PenaltyBreakdown>,
    #[serde(with = "crate::report::float")]
    pub slack_db: f64,
    #[serde(with = "crate::report::float")]
    pub laser_power_dbm: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasible_reason: Option<String>,
}

impl DesignPoint {
    /// PP + 10·log10(N_λ), the tables' penalty column.
    pub fn penalty_plus_split_db(&self) -> Option<f64> {
        self.penalty.as_ref().map(|p| p.total + 10.0 * (self.n_lambda as f64).log10())
    }
}

/// Shared state for evaluating duplets under one configuration.
#[derive(Debug)]
pub struct Model {
    pub config: Config,
    pub curve: SensitivityCurve,
    pub cache: GammaCache,
}

impl Model {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        let curve = config.sensitivity_curve()?;
        Ok(Model { config, curve, cache: GammaCache::new() })
    }

    pub fn lambdas(&self) -> &[u32] {
        &self.config.search.lambdas
    }

    pub fn bauds(&self) -> Vec<f64> {
        self.config.search.bauds()
    }

    pub fn params(&self, scheme: SchemeKind, er_db: Option<f64>) -> Result<SignalingParams> {
        self.config.scheme(scheme, er_db)
    }

    pub fn profile(&self, profile: ProfileKind) -> Result<&PnocProfile> {
        self.config.profile(profile)
    }

    pub fn geometry(&self, n_lambda: u32, baud: f64, profile: &PnocProfile) -> Result<LinkGeometry> {
        LinkGeometry::new(n_lambda, baud, profile, self.config.constants.v_si_m_per_s)
    }

    /// Evaluates any duplet, on the grid or not.
    pub fn evaluate(&self, n_lambda: u32, baud: f64, params: &SignalingParams, profile: &PnocProfile, goal: Goal) -> Result<DesignPoint> {
        let geom = self.geometry(n_lambda, baud, profile)?;
        let s = self.curve.sensitivity_at(baud)?;
        let br = bitrate(baud, params.levels());
        let budget = self.config.constants.p_max_dbm - s.dbm;
        let split = 10.0 * (n_lambda as f64).log10();
        let ctx = PenaltyContext { switches: &self.config.model, cache: &self.cache };
        let mut point = DesignPoint {
            scheme: params.kind,
            profile: profile.name,
            goal,
            er_db: params.extinction_ratio_db,
            n_lambda,
            baud_gbaud: baud,
            bitrate_gbps: br,
            aggregate_gbps: n_lambda as f64 * br,
            sensitivity_dbm: s.dbm,
            sensitivity_extrapolated: s.extrapolated,
            power_budget_db: budget,
            penalty: None,
            slack_db: f64::NEG_INFINITY,
            laser_power_dbm: f64::INFINITY,
            feasible: false,
            infeasible_reason: None,
        };
        match total_penalty(goal, params, profile, &geom, ctx) {
            Ok(pb) => {
                point.slack_db = budget - pb.total - split;
                point.laser_power_dbm = pb.total + split + s.dbm;
                point.feasible = point.slack_db >= 0.0;
                point.penalty = Some(pb);
            }
            Err(Error::Infeasible(msg)) => point.infeasible_reason = Some(msg),
            Err(e) => return Err(e),
        }
        Ok(point)
    }

    pub fn evaluate_duplet(&self, n_lambda: u32, baud: f64, scheme: SchemeKind, profile: ProfileKind, goal: Goal, er_db: Option<f64>) -> Result<DesignPoint> {
        let params = self.params(scheme, er_db)?;
        self.evaluate(n_lambda, baud, &params, self.profile(profile)?, goal)
    }

    /// Every duplet of the search space, in (N_λ, baud) index order.
    pub fn enumerate(&self, scheme: SchemeKind, profile: ProfileKind, goal: Goal, er_db: Option<f64>) -> Result<Vec<DesignPoint>> {
        let params = self.params(scheme, er_db)?;
        let prof = self.profile(profile)?;
        let bauds = self.bauds();
        let duplets: Vec<(u32, f64)> = self
            .lambdas()
            .iter()
            .flat_map(|&n| bauds.iter().map(move |&b| (n, b)))
            .collect();
        duplets
            .par_iter()
            .map(|&(n, b)| self.evaluate(n, b, &params, prof, goal))
            .collect()
    }

    /// Picks the optimum from an enumeration.
    pub fn select(&self, points: &[DesignPoint]) -> Result<DesignPoint> {
        let tol = self.config.search.tie_tolerance_db;
        let best = points
            .iter()
            .filter(|p| p.feasible)
            .min_by(|a, b| rank(a, b, tol));
        if let Some(p) = best {
            return Ok(p.clone());
        }
        let closest = points
            .iter()
            .max_by(|a, b| a.slack_db.partial_cmp(&b.slack_db).unwrap_or(Ordering::Equal));
        match closest {
            Some(p) => Err(Error::NoFeasibleDuplet { n_lambda: p.n_lambda, baud: p.baud_gbaud, deficit_db: -p.slack_db }),
            None => Err(Error::Config("search space is empty".into())),
        }
    }

    pub fn search_optimal(&self, scheme: SchemeKind, profile: ProfileKind, goal: Goal, er_db: Option<f64>) -> Result<DesignPoint> {
        self.select(&self.enumerate(scheme, profile, goal, er_db)?)
    }

    /// All duplets ranked: feasible by the selection order, then infeasible
    /// by decreasing ε.
    pub fn frontier(&self, scheme: SchemeKind, profile: ProfileKind, goal: Goal, er_db: Option<f64>) -> Result<Vec<DesignPoint>> {
        let tol = self.config.search.tie_tolerance_db;
        let mut pts = self.enumerate(scheme, profile, goal, er_db)?;
        pts.sort_by(|a, b| match (a.feasible, b.feasible) {
            (true, true) => rank(a, b, tol),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => b.slack_db.partial_cmp(&a.slack_db).unwrap_or(Ordering::Equal),
        });
        Ok(pts)
    }

    /// Neighbours one step up in N_λ and in baud. Steps past the grid edge
    /// are evaluated off-grid.
    pub fn step_up(&self, point: &DesignPoint) -> Result<[DesignPoint; 2]> {
        let params = self.params(point.scheme, Some(point.er_db))?;
        let prof = self.profile(point.profile)?;
        let lambdas = self.lambdas();
        let next_n = lambdas
            .iter()
            .copied()
            .filter(|&n| n > point.n_lambda)
            .min()
            .unwrap_or(point.n_lambda * 2);
        let next_baud = point.baud_gbaud + self.config.search.baud_step_gbaud;
        Ok([
            self.evaluate(next_n, point.baud_gbaud, &params, prof, point.goal)?,
            self.evaluate(point.n_lambda, next_baud, &params, prof, point.goal)?,
        ])
    }

    /// Crosstalk-limited BER of a design point's worst filter.
    pub fn ber(&self, point: &DesignPoint) -> Result<BerReport> {
        let params = self.params(point.scheme, Some(point.er_db))?;
        let geom = self.geometry(point.n_lambda, point.baud_gbaud, self.profile(point.profile)?)?;
        let xi = self.config.model.xi(params.fwhm_ghz, geom.baud_gbaud);
        let sums = self.cache.sums(&geom, xi, DetuneMode::Filter)?;
        BerReport::new(snr_from_row_sums(&sums.row_sums), params.levels(), self.config.sim.packet_bits)
    }

    /// Runs one search per (profile, scheme, goal, ER). Failures are kept in
    /// the row and the sweep continues.
    pub fn sweep(&self, cases: &[SweepCase]) -> Vec<SweepRow> {
        cases
            .iter()
            .map(|c| {
                let result = self.search_optimal(c.scheme, c.profile, c.goal, Some(c.er_db));
                let (point, ber, error) = match result {
                    Ok(p) => {
                        let ber = if c.goal == Goal::DrBerBalanced { self.ber(&p).ok() } else { None };
                        (Some(p), ber, None)
                    }
                    Err(e) => (None, None, Some(e.to_string())),
                };
                SweepRow { case: *c, point, ber, error }
            })
            .collect()
    }
}

/// Selection order among feasible points: smaller ε, then larger aggregate
/// datarate, then larger N_λ, then lower baud.
fn rank(a: &DesignPoint, b: &DesignPoint, tol: f64) -> Ordering {
    if (a.slack_db - b.slack_db).abs() > tol {
        return a.slack_db.partial_cmp(&b.slack_db).unwrap_or(Ordering::Equal);
    }
    b.aggregate_gbps
        .partial_cmp(&a.aggregate_gbps)
        .unwrap_or(Ordering::Equal)
        .then(b.n_lambda.cmp(&a.n_lambda))
        .then(a.baud_gbaud.partial_cmp(&b.baud_gbaud).unwrap_or(Ordering::Equal))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub profile: ProfileKind,
    pub scheme: SchemeKind,
    pub goal: Goal,
    pub er_db: f64,
}

/// Extinction ratios each scheme is swept over in the published tables.
pub fn table_ers(scheme: SchemeKind) -> [f64; 3] {
    match scheme {
        SchemeKind::Pam4Odac => [2.0, 6.0, 9.0],
        _ => [5.0, 9.0, 12.0],
    }
}

/// Cases in table order (profile, scheme, ER) for the given filters.
pub fn table_cases(goals: &[Goal], profiles: &[ProfileKind], schemes: &[SchemeKind]) -> Vec<SweepCase> {
    let mut out = Vec::new();
    for &goal in goals {
        for &profile in profiles {
            for &scheme in schemes {
                for er_db in table_ers(scheme) {
                    out.push(SweepCase { profile, scheme, goal, er_db });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub case: SweepCase,
    pub point: Option<DesignPoint>,
    pub ber: Option<BerReport>,
    pub error: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model() -> Model {
        Model::new(Config::default()).unwrap()
    }

    #[test]
    fn point_arithmetic() {
        let m = model();
        let p = m.evaluate_duplet(64, 17.0, SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, Some(5.0)).unwrap();
        assert_relative_eq!(p.power_budget_db, 38.6, epsilon = 1e-9);
        assert_relative_eq!(p.sensitivity_dbm, -18.6, epsilon = 1e-9);
        let pb = p.penalty.clone().unwrap();
        let split = 10.0 * 64f64.log10();
        assert_relative_eq!(p.slack_db, p.power_budget_db - pb.total - split, epsilon = 1e-12);
        assert_relative_eq!(p.laser_power_dbm, pb.total + split + p.sensitivity_dbm, epsilon = 1e-12);
        assert_eq!((p.bitrate_gbps, p.aggregate_gbps), (17.0, 1088.0));
    }

    #[test]
    fn pam_bitrate_doubles_baud() {
        let m = model();
        let p = m.evaluate_duplet(32, 23.0, SchemeKind::Pam4Edac, ProfileKind::Clos, Goal::BerOptimal, Some(9.0)).unwrap();
        assert_eq!((p.bitrate_gbps, p.aggregate_gbps), (46.0, 1472.0));
    }

    #[test]
    fn single_channel_has_no_split_term() {
        let m = model();
        let p = m.evaluate_duplet(1, 10.0, SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, None).unwrap();
        assert_relative_eq!(p.slack_db, p.power_budget_db - p.penalty.unwrap().total, epsilon = 1e-12);
    }

    #[test]
    fn optimum_is_minimal_nonnegative_slack() {
        let m = model();
        let pts = m.enumerate(SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, Some(5.0)).unwrap();
        assert_eq!(pts.len(), 328);
        let best = m.select(&pts).unwrap();
        assert!(best.slack_db >= 0.0);
        for p in pts.iter().filter(|p| p.feasible) {
            assert!(best.slack_db <= p.slack_db + 1e-9);
        }
        let frontier = m.frontier(SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, Some(5.0)).unwrap();
        assert_eq!(frontier[0], best);
        assert_eq!(frontier.len(), 328);
    }

    #[test]
    fn ties_prefer_throughput_then_width_then_low_baud() {
        let m = model();
        let mk = |n: u32, baud: f64, slack: f64| {
            let mut p = m.evaluate_duplet(n, baud, SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, None).unwrap();
            p.slack_db = slack;
            p.feasible = true;
            p
        };
        let pts = vec![mk(8, 25.0, 0.5), mk(16, 10.0, 0.5), mk(4, 10.0, 0.7)];
        let best = m.select(&pts).unwrap();
        assert_eq!((best.n_lambda, best.baud_gbaud), (8, 25.0));
        let pts = vec![mk(8, 20.0, 0.5), mk(16, 10.0, 0.5)];
        assert_eq!(m.select(&pts).unwrap().n_lambda, 16);
        let pts = vec![mk(8, 20.0, 0.5), mk(8, 10.0, 0.5)];
        assert_eq!(m.select(&pts).unwrap().baud_gbaud, 20.0);
        let pts = vec![mk(8, 25.0, 0.5), mk(16, 10.0, 0.5 - 1e-6)];
        assert_eq!(m.select(&pts).unwrap().n_lambda, 16);
    }

    #[test]
    fn unreachable_budget_reports_closest() {
        let mut cfg = Config::default();
        cfg.constants.p_max_dbm = -30.0;
        let m = Model::new(cfg).unwrap();
        match m.search_optimal(SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, None) {
            Err(Error::NoFeasibleDuplet { n_lambda, deficit_db, .. }) => {
                assert_eq!(n_lambda, 1);
                assert!(deficit_db > 0.0);
            }
            other => panic!("expected infeasible design, got {other:?}"),
        }
    }

    #[test]
    fn step_up_goes_off_grid_at_the_edge() {
        let m = model();
        let p = m.evaluate_duplet(128, 30.0, SchemeKind::Ook, ProfileKind::Clos, Goal::DrBerBalanced, None).unwrap();
        let [wider, faster] = m.step_up(&p).unwrap();
        assert_eq!((wider.n_lambda, wider.baud_gbaud), (256, 30.0));
        assert_eq!((faster.n_lambda, faster.baud_gbaud), (128, 30.5));
    }

    #[test]
    fn sweep_records_errors_in_row() {
        let mut cfg = Config::default();
        cfg.constants.p_max_dbm = -30.0;
        let m = Model::new(cfg).unwrap();
        let rows = m.sweep(&table_cases(&[Goal::BerOptimal], &[ProfileKind::Swift], &[SchemeKind::Ook]));
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.point.is_none() && r.error.is_some()));
        assert!(m.sweep(&[]).is_empty());
    }

    #[test]
    fn design_point_json_round_trip() {
        let m = model();
        let p = m.evaluate_duplet(128, 30.0, SchemeKind::Pam4Ss, ProfileKind::Swift, Goal::BerOptimal, None).unwrap();
        let back: DesignPoint = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
