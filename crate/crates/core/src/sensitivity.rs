//! Baud-rate dependent detector sensitivity and the baud/bit-rate relation.
//!
//! The curve is a monotone piecewise-linear interpolation over calibration
//! anchors. Anchors that would make sensitivity improve with baud rate are
//! dropped during construction and kept in [`SensitivityCurve::dropped`].

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// BaR = BR / (M/2).
pub fn baud_rate(bitrate_gbps: f64, levels: u32) -> Result<f64> {
    if !(bitrate_gbps > 0.0) {
        return Err(Error::Domain(format!("bitrate must be positive, got {bitrate_gbps}")));
    }
    match levels {
        2 | 4 => Ok(bitrate_gbps / (levels as f64 / 2.0)),
        _ => Err(Error::Domain(format!("unsupported level count {levels}"))),
    }
}

pub fn bitrate(baud_gbaud: f64, levels: u32) -> f64 {
    baud_gbaud * levels as f64 / 2.0
}

/// Raw (BaR, S) anchors read off the published tables, including the one
/// non-monotone point that regularization removes.
pub const DEFAULT_RAW_ANCHORS: [(f64, f64); 20] = [
    (10.0, -22.5),
    (10.5, -22.3),
    (11.0, -22.1),
    (12.0, -21.7),
    (13.5, -21.0),
    (15.0, -20.35),
    (16.0, -19.1),
    (16.5, -18.5),
    (17.0, -18.6),
    (17.5, -17.9),
    (18.0, -17.8),
    (19.0, -17.1),
    (20.0, -16.1),
    (21.0, -15.3),
    (23.0, -13.4),
    (24.0, -12.3),
    (25.0, -11.5),
    (27.0, -10.1),
    (30.0, -8.2),
    (32.0, -6.6),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub baud_gbaud: f64,
    pub sensitivity_dbm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub dbm: f64,
    /// Set when the baud rate lies above the last anchor.
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    anchors: Vec<Anchor>,
    dropped: Vec<Anchor>,
}

impl SensitivityCurve {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("sensitivity calibration set is empty".into()));
        }
        let mut pts: Vec<Anchor> = points
            .iter()
            .map(|&(b, s)| Anchor { baud_gbaud: b, sensitivity_dbm: s })
            .collect();
        if pts.iter().any(|a| !(a.baud_gbaud > 0.0) || !a.sensitivity_dbm.is_finite()) {
            return Err(Error::Config("sensitivity anchors need positive baud and finite dBm".into()));
        }
        pts.sort_by(|a, b| a.baud_gbaud.total_cmp(&b.baud_gbaud));
        if pts.windows(2).any(|w| w[0].baud_gbaud == w[1].baud_gbaud) {
            return Err(Error::Config("duplicate baud rate in sensitivity anchors".into()));
        }

        // Backward pass: keep a point only if it does not exceed every later kept point.
        let mut kept = Vec::with_capacity(pts.len());
        let mut dropped = Vec::new();
        let mut running_min = f64::INFINITY;
        for a in pts.into_iter().rev() {
            if a.sensitivity_dbm <= running_min {
                running_min = a.sensitivity_dbm;
                kept.push(a);
            } else {
                dropped.push(a);
            }
        }
        kept.reverse();
        dropped.reverse();
        Ok(SensitivityCurve { anchors: kept, dropped })
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn dropped(&self) -> &[Anchor] {
        &self.dropped
    }

    pub fn sensitivity_at(&self, baud_gbaud: f64) -> Result<Sensitivity> {
        if !(baud_gbaud > 0.0) {
            return Err(Error::Domain(format!("baud rate must be positive, got {baud_gbaud}")));
        }
        let a = &self.anchors;
        let first = a[0];
        let last = a[a.len() - 1];
        if baud_gbaud <= first.baud_gbaud {
            return Ok(Sensitivity { dbm: first.sensitivity_dbm, extrapolated: false });
        }
        if baud_gbaud > last.baud_gbaud {
            let dbm = if a.len() == 1 {
                last.sensitivity_dbm
            } else {
                lerp(a[a.len() - 2], last, baud_gbaud)
            };
            return Ok(Sensitivity { dbm, extrapolated: true });
        }
        let k = a.partition_point(|p| p.baud_gbaud < baud_gbaud);
        if a[k].baud_gbaud == baud_gbaud {
            return Ok(Sensitivity { dbm: a[k].sensitivity_dbm, extrapolated: false });
        }
        Ok(Sensitivity { dbm: lerp(a[k - 1], a[k], baud_gbaud), extrapolated: false })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut pts = Vec::new();
        for rec in rdr.deserialize::<Anchor>() {
            let a = rec.map_err(|e| Error::Config(format!("sensitivity csv: {e}")))?;
            pts.push((a.baud_gbaud, a.sensitivity_dbm));
        }
        Self::new(&pts)
    }

    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for a in &self.anchors {
            w.serialize(a).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Default for SensitivityCurve {
    fn default() -> Self {
        SensitivityCurve::new(&DEFAULT_RAW_ANCHORS).expect("default anchors are valid")
    }
}

fn lerp(a: Anchor, b: Anchor, x: f64) -> f64 {
    let t = (x - a.baud_gbaud) / (b.baud_gbaud - a.baud_gbaud);
    a.sensitivity_dbm + t * (b.sensitivity_dbm - a.sensitivity_dbm)
}
