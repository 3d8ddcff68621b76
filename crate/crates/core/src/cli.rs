//! Command-line front end.
//!
//! Every verb resolves a [`Config`], runs, and writes its artifacts in one
//! all-or-nothing step. JSON artifacts embed a [`RunManifest`]; CSV artifacts
//! get a `.manifest.json` sidecar. `report --from` reruns a manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{calibrate, CalibrationGrid, CalibrationReport};
use crate::config::{Config, TrafficPattern, CONFIG_ENV};
use crate::energy::{ledger_for, link_epb, power_breakdown, HardwareLedger, LinkEpb, NetworkLoad, PowerBreakdown};
use crate::error::{Error, Result};
use crate::params::{ProfileKind, SchemeKind};
use crate::penalty::Goal;
use crate::reliability::BerReport;
pub use crate::report::Format;
use crate::report::{to_json, write_all_or_nothing, write_ladder_csv, write_table_csv, Envelope, RunManifest};
use crate::search::{table_cases, DesignPoint, Model, SweepCase, SweepRow};
use crate::sim::{compare_variants, simulate, SimConfig, SimReport, Topology, VariantResult};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const IO: i32 = 5;
    pub const NUMERIC: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "pnoc-dse", version, about = "Link-budget search, reliability, energy and network simulation for DWDM photonic NoCs")]
pub struct Cli {
    /// TOML overrides merged over the built-in defaults.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Artifact path. Without it the artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    /// Best (N_λ, bitrate) duplet for one scheme, profile, goal and ER.
    Optimize(OptimizeArgs),
    /// Regenerate the optimum tables.
    Sweep(SweepArgs),
    /// Crosstalk-limited BER of a design.
    Ber(DesignArgs),
    /// Hardware counts, energy per bit and power of a design.
    Ledger(DesignArgs),
    /// Network simulation over a load ladder.
    Simulate(SimulateArgs),
    /// Rerun the verb recorded in a manifest or JSON artifact.
    Report(ReportArgs),
    /// Fit the open model switches against the calibration rows.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DesignArgs {
    #[arg(long)]
    pub scheme: SchemeKind,
    #[arg(long)]
    pub profile: ProfileKind,
    #[arg(long, default_value = "balanced")]
    pub goal: Goal,
    /// Extinction ratio in dB; the scheme default when absent.
    #[arg(long)]
    pub er: Option<f64>,
    /// Force N_λ instead of searching (needs --baud).
    #[arg(long, requires = "baud")]
    pub n: Option<u32>,
    /// Force the baud rate in Gbaud (needs --n).
    #[arg(long, requires = "n")]
    pub baud: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub design: DesignArgs,
    /// Emit every evaluated duplet, infeasible ones included.
    #[arg(long)]
    pub frontier: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub goal: Option<Goal>,
    #[arg(long)]
    pub profile: Option<ProfileKind>,
    #[arg(long)]
    pub scheme: Option<SchemeKind>,
    #[arg(long)]
    pub er: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub design: DesignArgs,
    /// Injection rates in packets per core per cycle.
    #[arg(long, value_delimiter = ',', conflicts_with = "load_fraction")]
    pub load: Vec<f64>,
    /// Injection rates as fractions of the design's saturation rate. The
    /// configured fractions are used when neither flag is given.
    #[arg(long, value_delimiter = ',')]
    pub load_fraction: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<u64>,
    #[arg(long)]
    pub traffic: Option<TrafficPattern>,
    #[arg(long)]
    pub queue_capacity: Option<usize>,
    /// Run every scheme's optimum at each load and normalize to OOK.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub from: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Δf grid step in GHz.
    #[arg(long, default_value_t = 2.5)]
    pub delta_f_step: f64,
    #[arg(long, default_value_t = 100.0)]
    pub delta_f_max: f64,
    /// Also write the calibrated configuration as TOML.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Optimize(_) => "optimize",
            Verb::Sweep(_) => "sweep",
            Verb::Ber(_) => "ber",
            Verb::Ledger(_) => "ledger",
            Verb::Simulate(_) => "simulate",
            Verb::Report(_) => "report",
            Verb::Calibrate(_) => "calibrate",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Verb::Sweep(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Failure with its exit code and a stable kind tag.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: exit::USAGE, kind: "usage", message: message.into() }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind, "code": self.code, "message": self.message } }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Config(_) => (exit::CONFIG, "config"),
            Error::NoFeasibleDuplet { .. } | Error::Infeasible(_) => (exit::INFEASIBLE, "infeasible"),
            Error::Io(_) => (exit::IO, "io"),
            Error::Domain(_) | Error::Quadrature { .. } => (exit::NUMERIC, "numeric"),
        };
        CliError { code, kind, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Files to write plus the text for stdout.
struct Outcome {
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerOutput {
    pub design: DesignPoint,
    pub ber: BerReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerOutput {
    pub design: DesignPoint,
    pub ledger: HardwareLedger,
    pub link_epb: LinkEpb,
    /// Network power at full link utilization; absent without a tuning range.
    pub power: Option<PowerBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSet {
    pub injection_rate: f64,
    pub seed: u64,
    pub variants: Vec<VariantResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub design: Option<DesignPoint>,
    pub reports: Vec<SimReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<VariantSet>,
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { exit::USAGE } else { exit::OK };
            }
            let err = CliError::usage(e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return err.code;
        }
    };
    match execute(&cli) {
        Ok(()) => exit::OK,
        Err(err) => {
            eprintln!("{}", err.record());
            err.code
        }
    }
}

fn load_config(path: Option<&Path>) -> CliResult<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let (config, verb, format) = match &cli.verb {
        Verb::Report(r) => {
            let m = read_manifest(&r.from)?;
            let verb: Verb = serde_json::from_value(m.args.clone())
                .map_err(|e| CliError::from(Error::Config(format!("manifest arguments: {e}"))))?;
            if matches!(verb, Verb::Report(_)) {
                return Err(Error::Config("a manifest cannot record the report verb".into()).into());
            }
            let format = cli.format.or(m.format).unwrap_or(verb.default_format());
            (m.config, verb, format)
        }
        v => (load_config(cli.config.as_deref())?, v.clone(), cli.format.unwrap_or(v.default_format())),
    };
    let outcome = dispatch(&config, &verb, format, cli.out.as_deref())?;
    write_all_or_nothing(&outcome.files).map_err(CliError::from)?;
    let mut so = std::io::stdout().lock();
    so.write_all(outcome.stdout.as_bytes()).map_err(|e| CliError::from(Error::Io(e)))?;
    Ok(())
}

fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let m = value.get("manifest").cloned().unwrap_or(value);
    let m: RunManifest = serde_json::from_value(m).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    m.config.validate()?;
    Ok(m)
}

fn manifest(config: &Config, verb: &Verb, format: Format) -> RunManifest {
    let mut m = RunManifest::new(verb.name(), serde_json::to_value(verb).expect("verb arguments serialize"), config);
    m.format = Some(format);
    m
}

/// Lays out artifacts: JSON with the manifest embedded, or CSV with a sidecar.
fn emit_json<T: Serialize>(mut m: RunManifest, out: Option<&Path>, result: T, summary: String) -> CliResult<Outcome> {
    if let Some(p) = out {
        m.outputs.push(p.to_path_buf());
    }
    let text = to_json(&Envelope { manifest: m, result })?;
    Ok(match out {
        Some(p) => Outcome { files: vec![(p.to_path_buf(), text.into_bytes())], stdout: summary },
        None => Outcome { files: Vec::new(), stdout: text },
    })
}

fn emit_csv(mut m: RunManifest, out: Option<&Path>, csv: Vec<u8>, summary: String) -> CliResult<Outcome> {
    Ok(match out {
        Some(p) => {
            let side = RunManifest::sidecar(p);
            m.outputs = vec![p.to_path_buf(), side.clone()];
            let files = vec![(p.to_path_buf(), csv), (side, m.to_json()?.into_bytes())];
            Outcome { files, stdout: summary }
        }
        None => Outcome { files: Vec::new(), stdout: String::from_utf8(csv).expect("csv is utf-8") },
    })
}

fn design(model: &Model, a: &DesignArgs) -> Result<DesignPoint> {
    match (a.n, a.baud) {
        (Some(n), Some(baud)) => {
            let p = model.evaluate_duplet(n, baud, a.scheme, a.profile, a.goal, a.er)?;
            if !p.feasible {
                return Err(Error::Infeasible(format!(
                    "N={n} at {baud} Gbaud: {}",
                    p.infeasible_reason.clone().unwrap_or_else(|| format!("slack {:.3} dB", p.slack_db))
                )));
            }
            Ok(p)
        }
        _ => model.search_optimal(a.scheme, a.profile, a.goal, a.er),
    }
}

fn point_line(p: &DesignPoint) -> String {
    format!(
        "{:<6} {:<10} {:<11} ER {:>5} dB  N={:<3} BR={:>5} Gb/s  agg={:>6} Gb/s  slack={:.3} dB  laser={:.2} dBm\n",
        p.profile.as_str(),
        p.scheme.as_str(),
        p.goal.as_str(),
        p.er_db,
        p.n_lambda,
        p.bitrate_gbps,
        p.aggregate_gbps,
        p.slack_db,
        p.laser_power_dbm
    )
}

fn rows_csv(rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_table_csv(&mut buf, rows)?;
    Ok(buf)
}

fn row_of(model: &Model, p: DesignPoint) -> SweepRow {
    let case = SweepCase { profile: p.profile, scheme: p.scheme, goal: p.goal, er_db: p.er_db };
    let ber = if p.goal == Goal::DrBerBalanced && p.feasible { model.ber(&p).ok() } else { None };
    SweepRow { case, point: Some(p), ber, error: None }
}

fn dispatch(config: &Config, verb: &Verb, format: Format, out: Option<&Path>) -> CliResult<Outcome> {
    let m = manifest(config, verb, format);
    match verb {
        Verb::Optimize(a) => {
            let model = Model::new(config.clone())?;
            if a.frontier {
                let points = model.frontier(a.design.scheme, a.design.profile, a.design.goal, a.design.er)?;
                let summary = format!("{} duplets evaluated, {} feasible\n", points.len(), points.iter().filter(|p| p.feasible).count());
                return match format {
                    Format::Json => emit_json(m, out, points, summary),
                    Format::Csv => {
                        let rows: Vec<SweepRow> = points.into_iter().map(|p| row_of(&model, p)).collect();
                        emit_csv(m, out, rows_csv(&rows)?, summary)
                    }
                };
            }
            let p = design(&model, &a.design)?;
            let summary = point_line(&p);
            match format {
                Format::Json => emit_json(m, out, p, summary),
                Format::Csv => emit_csv(m, out, rows_csv(&[row_of(&model, p)])?, summary),
            }
        }
        Verb::Sweep(a) => {
            let model = Model::new(config.clone())?;
            let goals = a.goal.map(|g| vec![g]).unwrap_or(Goal::ALL.to_vec());
            let profiles = a.profile.map(|p| vec![p]).unwrap_or(ProfileKind::ALL.to_vec());
            let schemes = a.scheme.map(|s| vec![s]).unwrap_or(SchemeKind::ALL.to_vec());
            let mut cases = table_cases(&goals, &profiles, &schemes);
            if let Some(er) = a.er {
                cases.retain(|c| c.er_db == er);
                if cases.is_empty() {
                    return Err(Error::Config(format!("no swept case has ER {er} dB")).into());
                }
            }
            let rows = model.sweep(&cases);
            let summary: String = rows
                .iter()
                .map(|r| match &r.point {
                    Some(p) => point_line(p),
                    None => format!("{} {} ER {}: {}\n", r.case.profile, r.case.scheme, r.case.er_db, r.error.as_deref().unwrap_or("no result")),
                })
                .collect();
            match format {
                Format::Json => emit_json(m, out, rows, summary),
                Format::Csv => emit_csv(m, out, rows_csv(&rows)?, summary),
            }
        }
        Verb::Ber(a) => {
            let model = Model::new(config.clone())?;
            let p = design(&model, a)?;
            let ber = model.ber(&p)?;
            let summary = format!("{}BER {:.3e}  SNR {:.3}  SECDED threshold {:.3e}  {}\n", point_line(&p), ber.ber, ber.worst_snr, ber.fec_threshold, if ber.passes_fec { "pass" } else { "fail" });
            match format {
                Format::Json => emit_json(m, out, BerOutput { design: p, ber }, summary),
                Format::Csv => Err(CliError::usage("ber emits JSON only")),
            }
        }
        Verb::Ledger(a) => {
            let model = Model::new(config.clone())?;
            let p = design(&model, a)?;
            let params = model.params(p.scheme, Some(p.er_db))?;
            let prof = model.profile(p.profile)?;
            let ledger = ledger_for(&params, p.n_lambda, config.sim.packet_bits, &config.energy);
            let epb = link_epb(&params, p.n_lambda, &config.energy);
            let topo = Topology::new(p.profile);
            let load = NetworkLoad {
                laser_power_dbm: p.laser_power_dbm,
                waveguide_count: prof.waveguide_count,
                routers: topo.routers,
                gateways: topo.gateways,
                throughput_gbps: p.aggregate_gbps * prof.waveguide_count as f64,
            };
            let (power, power_note) = match power_breakdown(&ledger, &params, &load, &config.energy, config.constants.wallplug_efficiency) {
                Ok(pw) => (Some(pw), None),
                Err(Error::Config(msg)) => (None, Some(msg)),
                Err(e) => return Err(e.into()),
            };
            let summary = format!(
                "{}MRs {}  EPB {:.4} pJ/bit raw, {:.5} pJ per transferred bit  power {}\n",
                point_line(&p),
                ledger.total_mrs,
                epb.raw_pj_per_bit,
                epb.per_transferred_bit_pj,
                power.map(|pw| format!("{:.1} mW", pw.total_mw)).unwrap_or_else(|| "n/a (set mr_tuning_range_nm)".into())
            );
            let result = LedgerOutput { design: p, ledger, link_epb: epb, power, power_note };
            match format {
                Format::Json => emit_json(m, out, result, summary),
                Format::Csv => Err(CliError::usage("ledger emits JSON only")),
            }
        }
        Verb::Simulate(a) => simulate_verb(config, a, m, format, out),
        Verb::Calibrate(a) => {
            if !(a.delta_f_step > 0.0) || a.delta_f_max < 0.0 {
                return Err(CliError::usage("Δf grid needs a positive step and a non-negative maximum"));
            }
            let steps = (a.delta_f_max / a.delta_f_step + 1e-9).floor() as usize;
            let grid = CalibrationGrid { delta_f_ghz: (0..=steps).map(|k| k as f64 * a.delta_f_step).collect(), ..CalibrationGrid::default() };
            let report = calibrate(config, &grid)?;
            let c = &report.chosen;
            let summary = format!(
                "ξ {:?}  through-loss {:?}  Δf {:?}  score {:.3}\n",
                c.xi_convention, c.through_loss, c.delta_f_ghz, c.score
            );
            let toml = report.config.to_toml_string()?;
            let mut o = match format {
                Format::Json => emit_json(m, out, &report, summary)?,
                Format::Csv => emit_csv(m, out, fits_csv(&report)?, summary)?,
            };
            if let Some(p) = &a.config_out {
                o.files.push((p.clone(), toml.into_bytes()));
            }
            Ok(o)
        }
        Verb::Report(_) => Err(CliError::usage("report cannot be nested")),
    }
}

fn fits_csv(report: &CalibrationReport) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::from(Error::Io(std::io::Error::other(e)));
    w.write_record(["goal", "profile", "scheme", "er_db", "table_n_lambda", "table_bitrate_gbps", "model_n_lambda", "model_bitrate_gbps", "score"])
        .map_err(io)?;
    for f in &report.rows {
        let (n, br) = f.point.as_ref().map(|p| (p.n_lambda.to_string(), p.bitrate_gbps.to_string())).unwrap_or_default();
        w.write_record([
            f.goal.as_str().to_string(),
            f.row.profile.as_str().to_string(),
            f.row.scheme.as_str().to_string(),
            f.row.er_db.to_string(),
            f.row.n_lambda.to_string(),
            f.row.bitrate_gbps.to_string(),
            n,
            br,
            format!("{:.4}", f.score),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::from(Error::Io(e.into_error())))
}

fn simulate_verb(base: &Config, a: &SimulateArgs, m: RunManifest, format: Format, out: Option<&Path>) -> CliResult<Outcome> {
    let mut config = base.clone();
    if let Some(t) = a.traffic {
        config.sim.traffic = t;
    }
    if a.queue_capacity.is_some() {
        config.sim.queue_capacity = a.queue_capacity;
    }
    let seeds = if a.seed.is_empty() { vec![config.sim.seed] } else { a.seed.clone() };
    let model = Model::new(config)?;
    let designs = if a.compare {
        SchemeKind::ALL
            .iter()
            .map(|&s| model.search_optimal(s, a.design.profile, a.design.goal, None))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![design(&model, &a.design)?]
    };
    let loads = if !a.load.is_empty() {
        a.load.clone()
    } else {
        // Fractions of the slowest design's saturation so variants share one ladder.
        let mut sat = 1.0f64;
        for d in &designs {
            sat = sat.min(SimConfig::from_model(&model, d, 0.0, 0)?.saturation_rate());
        }
        let fractions = if a.load_fraction.is_empty() { &model.config.sim.load_fractions } else { &a.load_fraction };
        fractions.iter().map(|f| f * sat).collect()
    };
    let runs: Vec<(u64, f64)> = seeds.iter().flat_map(|&s| loads.iter().map(move |&l| (s, l))).collect();

    let output = if a.compare {
        let comparisons = runs
            .par_iter()
            .map(|&(seed, load)| Ok(VariantSet { injection_rate: load, seed, variants: compare_variants(&model, &designs, load, seed)? }))
            .collect::<Result<Vec<_>>>()?;
        let reports = comparisons.iter().flat_map(|c| c.variants.iter().map(|v| v.report.clone())).collect();
        SimOutput { design: None, reports, comparisons }
    } else {
        let d = designs.into_iter().next().expect("one design");
        let reports = runs
            .par_iter()
            .map(|&(seed, load)| simulate(&SimConfig::from_model(&model, &d, load, seed)?))
            .collect::<Result<Vec<_>>>()?;
        SimOutput { design: Some(d), reports, comparisons: Vec::new() }
    };

    let mut ladder = Vec::new();
    write_ladder_csv(&mut ladder, &output.reports)?;
    let summary = String::from_utf8(ladder.clone()).expect("csv is utf-8");
    match format {
        Format::Csv => emit_csv(m, out, ladder, summary),
        Format::Json => {
            let mut o = emit_json(m, out, &output, summary.clone())?;
            if let Some(p) = out {
                let lp = p.with_extension("ladder.csv");
                o.files.push((lp, ladder));
            }
            Ok(o)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_flags() {
        let cli = Cli::try_parse_from([
            "pnoc-dse", "optimize", "--scheme", "ook", "--profile", "swift", "--goal", "ber_optimal", "--er", "12",
        ])
        .unwrap();
        let Verb::Optimize(a) = &cli.verb else { panic!() };
        assert_eq!(a.design.scheme, SchemeKind::Ook);
        assert_eq!(a.design.goal, Goal::BerOptimal);
        assert_eq!(a.design.er, Some(12.0));
        let cli = Cli::try_parse_from(["pnoc-dse", "simulate", "--scheme", "pam4_edac", "--profile", "clos", "--load", "0.001,0.002", "--seed", "3"]).unwrap();
        let Verb::Simulate(s) = &cli.verb else { panic!() };
        assert_eq!(s.load, vec![0.001, 0.002]);
        assert_eq!(s.seed, vec![3]);
    }

    #[test]
    fn verb_round_trips_through_json() {
        let cli = Cli::try_parse_from(["pnoc-dse", "ledger", "--scheme", "pam4_ss", "--profile", "clos", "--n", "16", "--baud", "12"]).unwrap();
        let v = serde_json::to_value(&cli.verb).unwrap();
        assert_eq!(serde_json::from_value::<Verb>(v).unwrap(), cli.verb);
    }

    #[test]
    fn error_kinds_map_to_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).code, exit::CONFIG);
        assert_eq!(CliError::from(Error::NoFeasibleDuplet { n_lambda: 1, baud: 10.0, deficit_db: 1.0 }).code, exit::INFEASIBLE);
        let r: serde_json::Value = serde_json::from_str(&CliError::usage("bad").record()).unwrap();
        assert_eq!(r["error"]["code"], exit::USAGE);
    }
}
