//! `seldpc`: build split-extended codes, compute thresholds and capacity
//! limits, and simulate the relay channel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod code;
mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use seldpc::channel::delta_from_db;
use seldpc::decoder::DEFAULT_MAX_ITER;
use seldpc::ga::PhiMode;
use seldpc::sim::{snr_contour, ContourOptions, RelayMode, Scenario, ScenarioConfig, SimCode, Simulator};
use seldpc::*;
use serde::{Deserialize, Serialize};

use code::{build_plan, load_code, read_text, CodeSource, SplitSpec, Strategy};
use manifest::{manifest_path, RunManifest};

const THRESHOLD_HEADER: [&str; 4] = ["delta_db", "sigma_star", "snr_sd_db", "snr_rd_db"];
const SIM_HEADER: [&str; 5] = ["snr_sd_db", "snr_rd_db", "fer", "ci", "frames"];

#[derive(Parser)]
#[command(
    name = "seldpc",
    version,
    about = "Split-extended LDPC codes for decode-and-forward relaying"
)]
struct Cli {
    /// Worker threads (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split-extend a parity-check matrix.
    Split(SplitArgs),
    /// Multi-edge GA thresholds over a grid of channel discrepancies.
    Threshold(ThresholdArgs),
    /// Capacity function over a grid of channel discrepancies.
    Capacity(CapacityArgs),
    /// Monte-Carlo FER at fixed SNR points.
    #[command(after_help = SIM_CONFIG_HELP)]
    Simulate(SimArgs),
    /// Required SNR_RD for a target FER over a grid of SNR_SD.
    #[command(after_help = SIM_CONFIG_HELP)]
    Contour(ContourArgs),
}

const SIM_CONFIG_HELP: &str = "\
Config file (JSON) fields and defaults:
  code          {\"wimax\": {\"code\": \"1/2\" | \"2/3a\", \"z\": 96}} | {\"alist\": PATH} | {\"base\": PATH}
  split         {\"theta\": N | \"plan\": PATH, \"strategy\": \"cycle_breaking\" | \"regular\", \"seed\": 0}
                (required for the split_extend scenario)
  scenario      split_extend | repetition | no_cooperation
  relay_mode    real (default) | genie
  decoder       scms (default) | bp
  max_iter      100
  seed          0
  all_zero      false
  snr_sr_db     source-relay SNR in dB (required)
  points        [[snr_sd_db, snr_rd_db], ...]        (simulate)
  snr_sd_grid   [snr_sd_db, ...]                     (contour)
  target_fer    0.01                                 (contour)
  bounds_db     [-10, 20]  SNR_RD search range      (contour)
  min_errors    200
  max_frames    200000
  bracket_db    0.1                                  (contour)

SNRs are Es/N0 per BPSK dimension. The contour CSV reports the bracket
midpoint and the estimate at its upper end; unreachable points have an
empty snr_rd_db.";

#[derive(Args, Serialize)]
struct CodeArgs {
    /// Built-in WiMAX code: 1/2 or 2/3a.
    #[arg(long)]
    wimax: Option<String>,
    /// WiMAX expansion factor (24..=96, multiple of 4).
    #[arg(long, default_value_t = seldpc::qc::WIMAX_DEFAULT_Z)]
    z: usize,
    /// Parity-check matrix in alist format.
    #[arg(long)]
    alist: Option<PathBuf>,
    /// QC base matrix in text format.
    #[arg(long)]
    base: Option<PathBuf>,
}

impl CodeArgs {
    fn source(&self) -> Result<CodeSource> {
        match (&self.wimax, &self.alist, &self.base) {
            (Some(code), None, None) => Ok(CodeSource::Wimax {
                code: code.clone(),
                z: self.z,
            }),
            (None, Some(p), None) => Ok(CodeSource::Alist(p.clone())),
            (None, None, Some(p)) => Ok(CodeSource::Base(p.clone())),
            _ => bail!("give exactly one of --wimax, --alist, --base"),
        }
    }
}

#[derive(Args, Serialize)]
struct SplitArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Splitting degree of every row.
    #[arg(long, conflicts_with = "plan")]
    theta: Option<usize>,
    /// Split plan file, instead of --theta.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Row-splitting strategy used with --theta.
    #[arg(long, value_enum, default_value_t = Strategy::CycleBreaking)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix: writes PREFIX.alist, PREFIX.plan and PREFIX.report.json.
    #[arg(long)]
    out: PathBuf,
    /// Manifest path [default: PREFIX.manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GridOut {
    /// CSV output [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path [default: OUT.manifest.json, or stderr without --out].
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ThresholdArgs {
    /// Degree-distribution file ("lambda: d:frac, ..." and "rho: d:frac, ..."
    /// lines) [default: the built-in rate-1/2 irregular ensemble].
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Splitting degree.
    #[arg(long, default_value_t = 2)]
    theta: usize,
    /// Discrepancy grid in dB: START:STOP:STEP or a comma-separated list.
    #[arg(long, default_value = "0:8.5:0.5", value_parser = parse_grid)]
    #[serde(serialize_with = "ser_grid")]
    delta_db: Grid,
    /// Bisection tolerance on sigma.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Target error probability for convergence.
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// phi evaluation: exact or approx.
    #[arg(long, default_value = "exact")]
    phi: PhiMode,
    #[command(flatten)]
    output: GridOut,
}

#[derive(Args, Serialize)]
struct CapacityArgs {
    /// Source rate K/N1.
    #[arg(long, default_value_t = 0.5)]
    r1: f64,
    /// Relay rate K/N2 ("inf" for no relay).
    #[arg(long, default_value_t = 1.0)]
    r2: f64,
    /// Discrepancy grid in dB: START:STOP:STEP or a comma-separated list.
    #[arg(long, default_value = "0:8.5:0.5", value_parser = parse_grid)]
    #[serde(serialize_with = "ser_grid")]
    delta_db: Grid,
    /// Bisection tolerance on sigma.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[command(flatten)]
    output: GridOut,
}

#[derive(Args, Serialize)]
struct SimArgs {
    /// JSON config file.
    config: PathBuf,
    #[command(flatten)]
    output: GridOut,
}

#[derive(Args, Serialize)]
struct ContourArgs {
    /// JSON config file.
    config: PathBuf,
    /// Target FER, overriding the config [default: 0.01].
    #[arg(long)]
    target_fer: Option<f64>,
    #[command(flatten)]
    output: GridOut,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn ser_grid<S: serde::Serializer>(g: &Grid, s: S) -> std::result::Result<S::Ok, S::Error> {
    g.0.serialize(s)
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("expected START:STOP:STEP, got {s:?}"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(format!("empty grid {s:?}"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + step * i as f64).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(format!("invalid grid {s:?}"));
    }
    Ok(Grid(values))
}

fn default_decoder() -> DecoderKind {
    DecoderKind::Scms
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_bounds() -> (f64, f64) {
    (-10.0, 20.0)
}
fn default_min_errors() -> u64 {
    ContourOptions::default().min_errors
}
fn default_max_frames() -> u64 {
    ContourOptions::default().max_frames
}
fn default_bracket() -> f64 {
    ContourOptions::default().bracket_db
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimConfig {
    code: CodeSource,
    #[serde(default)]
    split: Option<SplitSpec>,
    scenario: Scenario,
    #[serde(default)]
    relay_mode: RelayMode,
    #[serde(default = "default_decoder")]
    decoder: DecoderKind,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    all_zero: bool,
    snr_sr_db: f64,
    #[serde(default)]
    points: Vec<(f64, f64)>,
    #[serde(default)]
    snr_sd_grid: Vec<f64>,
    #[serde(default)]
    target_fer: Option<f64>,
    #[serde(default = "default_bounds")]
    bounds_db: (f64, f64),
    #[serde(default = "default_min_errors")]
    min_errors: u64,
    #[serde(default = "default_max_frames")]
    max_frames: u64,
    #[serde(default = "default_bracket")]
    bracket_db: f64,
}

impl SimConfig {
    fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_text(path)?).with_context(|| format!("in {}", path.display()))
    }

    fn code(&self) -> Result<SimCode> {
        let loaded = load_code(&self.code)?;
        match &self.split {
            Some(spec) => Ok(SimCode::new(&split_extend(&loaded.h1, &build_plan(&loaded, spec)?)?)?),
            None if self.scenario == Scenario::SplitExtend => {
                bail!("the split_extend scenario needs a \"split\" entry")
            }
            None => Ok(SimCode::point_to_point(&loaded.h1)?),
        }
    }

    fn scenario(&self, snr_sd_db: f64, snr_rd_db: f64) -> Result<ScenarioConfig> {
        let channel = RelayChannelParams::from_snr_db(sigma_from_snr_db(self.snr_sr_db), snr_sd_db, snr_rd_db)?;
        let mut cfg = ScenarioConfig::new(self.scenario, channel);
        cfg.relay_mode = self.relay_mode;
        cfg.decoder = self.decoder;
        cfg.max_iter = self.max_iter;
        cfg.seed = self.seed;
        cfg.all_zero = self.all_zero;
        Ok(cfg)
    }
}

fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct CycleSummary {
    four: u64,
    six: u64,
}

impl CycleSummary {
    fn of(h: &SparseBinaryMatrix) -> Result<Self> {
        let c = enumerate_short_cycles(h, 6)?;
        Ok(CycleSummary {
            four: c.global_count(4),
            six: c.global_count(6),
        })
    }
}

#[derive(Serialize)]
struct SplitReport {
    r1: f64,
    r2: f64,
    r: f64,
    extended_bits: usize,
    rows_before: usize,
    rows_after: usize,
    cycles_before: CycleSummary,
    cycles_after: CycleSummary,
}

fn cmd_split(args: &SplitArgs) -> Result<()> {
    let loaded = load_code(&args.code.source()?)?;
    let spec = SplitSpec {
        theta: args.theta,
        plan: args.plan.clone(),
        strategy: args.strategy,
        seed: args.seed,
    };
    let manifest = RunManifest::start("split", args, vec![args.seed])?;
    let plan = build_plan(&loaded, &spec)?;
    let se = split_extend(&loaded.h1, &plan)?;
    let rate = se.distributed_rate();
    let report = SplitReport {
        r1: rate.r1,
        r2: rate.r2,
        r: rate.overall(),
        extended_bits: se.n_extended(),
        rows_before: loaded.h1.n_rows(),
        rows_after: se.h().n_rows(),
        cycles_before: CycleSummary::of(&loaded.h1)?,
        cycles_after: CycleSummary::of(se.h())?,
    };

    let with_ext = |ext: &str| {
        let mut s = args.out.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    let outputs = [
        (with_ext(".alist"), se.h().to_alist()),
        (with_ext(".plan"), plan.to_string()),
        (with_ext(".report.json"), serde_json::to_string_pretty(&report)? + "\n"),
    ];
    for (path, text) in &outputs {
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    println!("r1 = {:.6}  r2 = {:.6}  r = {:.6}", report.r1, report.r2, report.r);
    println!("extended bits: {}", report.extended_bits);
    println!("checks: {} -> {}", report.rows_before, report.rows_after);
    println!(
        "4-cycles: {} -> {}  6-cycles: {} -> {}",
        report.cycles_before.four, report.cycles_after.four, report.cycles_before.six, report.cycles_after.six
    );

    let mut manifest = manifest;
    manifest.outputs = outputs.into_iter().map(|(p, _)| p).collect();
    manifest.finish(manifest_path(args.manifest.as_deref(), Some(&with_ext(""))).as_deref())
}

fn write_curve(
    rows: impl Iterator<Item = (f64, seldpc::Result<f64>, f64)>,
    output: &GridOut,
    mut manifest: RunManifest,
) -> Result<()> {
    let mut w = csv_writer(output.out.as_deref())?;
    w.write_record(THRESHOLD_HEADER)?;
    for (delta_db, sigma, delta) in rows {
        let sigma = match sigma {
            Ok(s) => Some(s),
            Err(e) => {
                log::warn!("Delta = {delta_db} dB: {e}");
                None
            }
        };
        w.write_record([
            delta_db.to_string(),
            opt(sigma),
            opt(sigma.map(|s| snr_db_from_sigma(delta * s))),
            opt(sigma.map(snr_db_from_sigma)),
        ])?;
    }
    w.flush()?;
    manifest.outputs.extend(output.out.clone());
    manifest.finish(manifest_path(output.manifest.as_deref(), output.out.as_deref()).as_deref())
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<()> {
    let dist = match &args.dist {
        Some(p) => read_text(p)?
            .parse::<DegreeDistribution>()
            .with_context(|| format!("in {}", p.display()))?,
        None => DegreeDistribution::rate_half_irregular(),
    };
    let manifest = RunManifest::start("threshold", args, Vec::new())?;
    let me = multi_edge_transform(&dist, args.theta)?;
    let opts = DeOptions {
        eps: args.eps,
        max_iter: args.max_iter,
        tol: args.tol,
        phi_mode: args.phi,
    };
    let deltas: Vec<f64> = args.delta_db.0.iter().map(|&d| delta_from_db(d)).collect();
    let curve = threshold_curve(&me, &deltas, &opts);
    let rows = args.delta_db.0.iter().zip(curve).map(|(&d, p)| (d, p.sigma, p.delta));
    write_curve(rows, &args.output, manifest)
}

fn cmd_capacity(args: &CapacityArgs) -> Result<()> {
    let rate = DistributedRate::try_new(args.r1, args.r2)?;
    let manifest = RunManifest::start("capacity", args, Vec::new())?;
    let deltas: Vec<f64> = args.delta_db.0.iter().map(|&d| delta_from_db(d)).collect();
    let curve = capacity_curve(rate, &deltas, args.tol);
    let rows = args.delta_db.0.iter().zip(curve).map(|(&d, p)| (d, p.sigma, p.delta));
    write_curve(rows, &args.output, manifest)
}

fn cmd_simulate(args: &SimArgs) -> Result<()> {
    let cfg = SimConfig::load(&args.config)?;
    if cfg.points.is_empty() {
        bail!("config has no \"points\"");
    }
    let mut manifest = RunManifest::start("simulate", &cfg, vec![cfg.seed])?;
    let code = cfg.code()?;
    let results = cfg
        .points
        .par_iter()
        .map(|&(sd, rd)| {
            let sim = Simulator::new(&code, &cfg.scenario(sd, rd)?)?;
            Ok(sim.run_until(cfg.max_frames, |r| r.frame_errors >= cfg.min_errors))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv_writer(args.output.out.as_deref())?;
    w.write_record(SIM_HEADER)?;
    for (&(sd, rd), r) in cfg.points.iter().zip(&results) {
        w.write_record([
            sd.to_string(),
            rd.to_string(),
            r.fer().to_string(),
            r.fer_ci().to_string(),
            r.frames.to_string(),
        ])?;
    }
    w.flush()?;
    manifest.outputs.extend(args.output.out.clone());
    manifest.finish(manifest_path(args.output.manifest.as_deref(), args.output.out.as_deref()).as_deref())
}

fn cmd_contour(args: &ContourArgs) -> Result<()> {
    let mut cfg = SimConfig::load(&args.config)?;
    if cfg.snr_sd_grid.is_empty() {
        bail!("config has no \"snr_sd_grid\"");
    }
    let target = args.target_fer.or(cfg.target_fer).unwrap_or(1e-2);
    cfg.target_fer = Some(target);
    let mut manifest = RunManifest::start("contour", &cfg, vec![cfg.seed])?;
    let code = cfg.code()?;
    // the channel of the template is replaced at every search point
    let template = cfg.scenario(cfg.snr_sd_grid[0], cfg.bounds_db.1)?;
    let opts = ContourOptions {
        min_errors: cfg.min_errors,
        max_frames: cfg.max_frames,
        bracket_db: cfg.bracket_db,
    };
    let points = snr_contour(&code, &template, target, &cfg.snr_sd_grid, cfg.bounds_db, &opts)?;
    let mut w = csv_writer(args.output.out.as_deref())?;
    w.write_record(SIM_HEADER)?;
    for p in &points {
        if !p.is_reachable() {
            log::warn!(
                "SNR_SD = {} dB: target FER not met below {} dB",
                p.snr_sd_db,
                cfg.bounds_db.1
            );
        }
        let r = p.at_hi.unwrap_or_default();
        w.write_record([
            p.snr_sd_db.to_string(),
            opt(p.snr_rd_db()),
            r.fer().to_string(),
            r.fer_ci().to_string(),
            r.frames.to_string(),
        ])?;
    }
    w.flush()?;
    manifest.outputs.extend(args.output.out.clone());
    manifest.finish(manifest_path(args.output.manifest.as_deref(), args.output.out.as_deref()).as_deref())
}

fn run(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("cannot start worker threads")?;
    match &cli.command {
        Command::Split(a) => cmd_split(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Capacity(a) => cmd_capacity(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Contour(a) => cmd_contour(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
