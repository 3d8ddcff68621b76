//! Output records: CSV tables, JSON documents and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::params::SchemeKind;
use crate::penalty::{Goal, ThroughLossMode, XiConvention};
use crate::search::SweepRow;
use crate::sim::SimReport;

/// Columns of the published optimum tables.
pub const TABLE_COLUMNS: [&str; 10] = [
    "profile",
    "scheme",
    "er_db",
    "power_budget_db",
    "sensitivity_dbm",
    "n_lambda",
    "bitrate_gbps",
    "aggregate_gbps",
    "penalty_plus_10logn_db",
    "laser_dbm",
];

pub const LADDER_COLUMNS: [&str; 14] = [
    "profile",
    "scheme",
    "goal",
    "injection_rate",
    "seed",
    "packets_measured",
    "mean_ns",
    "median_ns",
    "p99_ns",
    "mean_cycles",
    "offered_gbps",
    "accepted_gbps",
    "saturated",
    "epb_pj_per_bit",
];

fn db(v: f64) -> String {
    format!("{v:.2}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Header for a sweep. The BER column appears when any row is balanced; a
/// leading goal column appears when both goals are present.
pub fn table_header(rows: &[SweepRow]) -> Vec<&'static str> {
    let mixed = rows.iter().any(|r| r.case.goal != rows[0].case.goal);
    let with_ber = rows.iter().any(|r| r.case.goal == Goal::DrBerBalanced);
    let mut h = Vec::new();
    if mixed {
        h.push("goal");
    }
    h.extend(TABLE_COLUMNS);
    if with_ber {
        h.push("ber");
    }
    h
}

/// Writes sweep results in the table layout, dB values to 2 decimals. Rows
/// without a design keep their case columns and leave the rest empty.
pub fn write_table_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(TABLE_COLUMNS).map_err(csv_err)?;
        return out.flush().map_err(Error::Io);
    }
    let header = table_header(rows);
    out.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = Vec::with_capacity(header.len());
        if header[0] == "goal" {
            rec.push(r.case.goal.as_str().to_string());
        }
        rec.push(r.case.profile.as_str().to_string());
        rec.push(r.case.scheme.as_str().to_string());
        rec.push(r.case.er_db.to_string());
        match &r.point {
            Some(p) => {
                rec.push(db(p.power_budget_db));
                rec.push(db(p.sensitivity_dbm));
                rec.push(p.n_lambda.to_string());
                rec.push(p.bitrate_gbps.to_string());
                rec.push(p.aggregate_gbps.to_string());
                rec.push(p.penalty_plus_split_db().map(db).unwrap_or_default());
                rec.push(db(p.laser_power_dbm));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 7)),
        }
        if header.last() == Some(&"ber") {
            rec.push(r.ber.as_ref().map(|b| format!("{:.2e}", b.ber)).unwrap_or_default());
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush().map_err(Error::Io)
}

/// One line per simulated load.
pub fn write_ladder_csv<W: Write>(w: W, reports: &[SimReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(LADDER_COLUMNS).map_err(csv_err)?;
    for r in reports {
        let lat = r.latency.as_ref();
        let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        out.write_record([
            r.profile.as_str().to_string(),
            r.scheme.as_str().to_string(),
            r.goal.as_str().to_string(),
            r.injection_rate.to_string(),
            r.seed.to_string(),
            r.packets_measured.to_string(),
            f(lat.map(|l| l.mean_ns)),
            f(lat.map(|l| l.median_ns)),
            f(lat.map(|l| l.p99_ns)),
            f(lat.map(|l| l.mean_cycles)),
            format!("{:.4}", r.offered_gbps),
            format!("{:.4}", r.accepted_gbps),
            r.saturated.to_string(),
            f(Some(r.epb_pj_per_bit).filter(|v| v.is_finite())),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(Error::Io)
}

/// Artifact encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Open model switches a result depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSwitches {
    pub xi_convention: XiConvention,
    pub through_loss: ThroughLossMode,
    pub extra_mr_loss_db: f64,
    pub delta_f_ghz: BTreeMap<SchemeKind, f64>,
    pub sensitivity_anchors: Vec<(f64, f64)>,
}

impl CalibrationSwitches {
    pub fn of(config: &Config) -> Self {
        CalibrationSwitches {
            xi_convention: config.model.xi_convention,
            through_loss: config.model.through_loss,
            extra_mr_loss_db: config.model.extra_mr_loss_db,
            delta_f_ghz: config.schemes.iter().map(|(k, s)| (*k, s.delta_f_ghz)).collect(),
            sensitivity_anchors: config.sensitivity.anchors.clone(),
        }
    }
}

/// Provenance of a run. Holds no timestamps so reruns are bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub verb: String,
    /// Parsed verb arguments; `--config` and `--out` are not recorded.
    pub args: serde_json::Value,
    pub format: Option<Format>,
    pub config: Config,
    pub switches: CalibrationSwitches,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(verb: &str, args: serde_json::Value, config: &Config) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            verb: verb.to_string(),
            args,
            format: None,
            config: config.clone(),
            switches: CalibrationSwitches::of(config),
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("manifest: {e}")))
    }

    /// Sidecar path for a CSV artifact.
    pub fn sidecar(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

/// A JSON artifact with its manifest embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub manifest: RunManifest,
    pub result: T,
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Domain(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes all files or none: each goes to a temporary sibling first and is
/// renamed into place only after every write succeeded.
pub fn write_all_or_nothing(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged: Vec<PathBuf> = Vec::new();
    let cleanup = |staged: &[PathBuf]| {
        for t in staged {
            let _ = fs::remove_file(t);
        }
    };
    for (path, bytes) in files {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".partial");
        let tmp = PathBuf::from(tmp);
        let made_dir = match path.parent().filter(|d| !d.as_os_str().is_empty()) {
            Some(dir) => fs::create_dir_all(dir),
            None => Ok(()),
        };
        if let Err(e) = made_dir.and_then(|_| fs::write(&tmp, bytes)) {
            cleanup(&staged);
            return Err(e.into());
        }
        staged.push(tmp);
    }
    for (tmp, (path, _)) in staged.iter().zip(files) {
        fs::rename(tmp, path)?;
    }
    Ok(())
}

/// Serde adapter writing non-finite floats as the strings "inf", "-inf" and
/// "nan" so JSON output stays valid and round-trips.
pub mod float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(de::Error::custom(format!("invalid float '{s}'"))),
            },
        }
    }
}
