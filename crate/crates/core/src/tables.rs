//! Bundled golden copies of the published optimum tables.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::params::{ProfileKind, SchemeKind};
use crate::penalty::Goal;
use crate::search::SweepCase;

const BALANCED_CSV: &str = include_str!("../data/table5.csv");
const BER_OPTIMAL_CSV: &str = include_str!("../data/table6.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub profile: ProfileKind,
    pub scheme: SchemeKind,
    pub er_db: f64,
    pub power_budget_db: f64,
    pub sensitivity_dbm: f64,
    pub n_lambda: u32,
    pub bitrate_gbps: f64,
    pub aggregate_gbps: f64,
    pub penalty_plus_10logn_db: f64,
    pub laser_dbm: f64,
    #[serde(default)]
    pub ber: Option<f64>,
    /// Row reserved for fitting the open model parameters.
    #[serde(deserialize_with = "yes_no")]
    pub calibration: bool,
}

fn yes_no<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
    match String::deserialize(d)?.as_str() {
        "yes" => Ok(true),
        "no" => Ok(false),
        other => Err(serde::de::Error::custom(format!("expected yes/no, got '{other}'"))),
    }
}

impl GoldenRow {
    pub fn baud_gbaud(&self) -> f64 {
        self.bitrate_gbps / (self.scheme.levels() as f64 / 2.0)
    }

    pub fn case(&self, goal: Goal) -> SweepCase {
        SweepCase { profile: self.profile, scheme: self.scheme, goal, er_db: self.er_db }
    }
}

/// Golden rows for one design goal.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTable {
    pub goal: Goal,
    pub rows: Vec<GoldenRow>,
}

impl GoldenTable {
    pub fn parse(goal: Goal, text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<GoldenRow>, _>>()
            .map_err(|e| Error::Config(format!("golden table: {e}")))?;
        Ok(GoldenTable { goal, rows })
    }

    pub fn bundled(goal: Goal) -> Self {
        let text = match goal {
            Goal::DrBerBalanced => BALANCED_CSV,
            Goal::BerOptimal => BER_OPTIMAL_CSV,
        };
        Self::parse(goal, text).expect("bundled golden table parses")
    }

    pub fn calibration_rows(&self) -> impl Iterator<Item = &GoldenRow> {
        self.rows.iter().filter(|r| r.calibration)
    }

    pub fn holdout_rows(&self) -> impl Iterator<Item = &GoldenRow> {
        self.rows.iter().filter(|r| !r.calibration)
    }

    pub fn cases(&self) -> Vec<SweepCase> {
        self.rows.iter().map(|r| r.case(self.goal)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        for goal in Goal::ALL {
            let t = GoldenTable::bundled(goal);
            assert_eq!(t.rows.len(), 24);
            assert_eq!(t.calibration_rows().count(), 4);
            assert_eq!(t.holdout_rows().count(), 20);
            for r in &t.rows {
                assert!((r.power_budget_db - (20.0 - r.sensitivity_dbm)).abs() < 1e-9);
                assert!((r.aggregate_gbps - r.n_lambda as f64 * r.bitrate_gbps).abs() < 1e-9);
            }
        }
        let t5 = GoldenTable::bundled(Goal::DrBerBalanced);
        assert!(t5.rows.iter().all(|r| r.ber.is_some()));
        assert_eq!(t5.rows[0].baud_gbaud(), 17.0);
    }
}
