//! Batch front end for Kloosterman path experiments.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 violated
//! hypothesis of an implemented estimate.

mod config;
mod manifest;
mod plot;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use klpath_core::{
    bounds, compare_laws, log_gap_grid, moment_report_for_pairs, salie_reference, tightness_scan,
    LimitSeriesSample, MuSampler, PathFunction, PathMarginal, PrimePowerModulus, RationalTime,
    Report, SumContext, TightnessScanConfig, UnitResidue,
};

use config::{require, sig12, FileConfig};

/// Exact averaging over the unit group is refused above this modulus.
const EXACT_AVERAGE_LIMIT: u64 = 1_000_000;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Hypothesis(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Hypothesis(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Hypothesis(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<klpath_core::Error> for CliError {
    fn from(e: klpath_core::Error) -> Self {
        if e.is_hypothesis_violation() {
            CliError::Hypothesis(e.to_string())
        } else if matches!(e, klpath_core::Error::Io(_)) {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "klpath",
    version,
    about = "Kloosterman partial-sum paths modulo odd prime powers: sums, paths, moments, limit-law sampling, bound tables, and figures"
)]
struct Cli {
    /// Plain-text key=value configuration file; explicit flags win on conflict
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base seed for every randomized component
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: KLPATH_THREADS, then all cores); outputs never depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for artifacts and the run manifest
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one normalized full sum
    Sum(SumArgs),
    /// Build one partial-sum path and export its knots
    Path(PathArgs),
    /// Exact moment averages for explicit (s, t) pairs
    Moments(MomentsArgs),
    /// Moment scaling scan over a gap grid
    ScanTightness(ScanArgs),
    /// Compare path marginals against the limiting series
    CompareLaw(CompareArgs),
    /// Short-sum bound calculator and empirical scan
    Bounds(BoundsArgs),
    /// Sample the truncated limiting series
    SampleLimit(SampleArgs),
    /// Render a CSV or report JSON as a standalone SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct SumArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    /// Also evaluate the closed-form reference (n >= 2) and print the gap
    #[arg(long)]
    crosscheck: bool,
}

#[derive(Args)]
struct PathArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    /// Knot CSV destination (header j,t,re,im)
    #[arg(long, value_name = "FILE")]
    export: Option<PathBuf>,
    /// Evaluate the path at one time in [0, 1]
    #[arg(long)]
    eval: Option<f64>,
    /// Times are rationalized with denominator (phi - 1) * this factor
    #[arg(long)]
    grid_factor: Option<u64>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    b0: Option<u64>,
    /// Even moment order >= 2
    #[arg(long)]
    alpha: Option<u32>,
    /// Left endpoints, repeatable or comma list in a config file
    #[arg(long = "s", value_name = "S")]
    s: Vec<f64>,
    /// Right endpoints, zipped with --s
    #[arg(long = "t", value_name = "T")]
    t: Vec<f64>,
    #[arg(long)]
    grid_factor: Option<u64>,
    /// Write the full report JSON here
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    b0: Option<u64>,
    #[arg(long)]
    alpha: Option<u32>,
    #[arg(long)]
    gap_min: Option<f64>,
    #[arg(long)]
    gap_max: Option<f64>,
    #[arg(long)]
    gap_count: Option<usize>,
    #[arg(long)]
    samples_per_gap: Option<u32>,
    #[arg(long)]
    grid_factor: Option<u64>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    b0: Option<u64>,
    /// Comparison times in [0, 1], repeatable
    #[arg(long = "t", value_name = "T")]
    t: Vec<f64>,
    /// Series truncation H (default: q)
    #[arg(long)]
    truncation: Option<u64>,
    /// Monte Carlo sample count (default: 10000)
    #[arg(long)]
    mc: Option<usize>,
    /// Path marginal: step (default; preserves the limit's atoms) or interpolated
    #[arg(long)]
    marginal: Option<String>,
    #[arg(long)]
    grid_factor: Option<u64>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    /// Explicit interval lengths for the bound table
    #[arg(long = "length", value_name = "N")]
    lengths: Vec<u64>,
    #[arg(long)]
    length_min: Option<u64>,
    #[arg(long)]
    length_max: Option<u64>,
    #[arg(long)]
    length_count: Option<usize>,
    /// Use the prefactor-4 unconditional variant (requires n >= 31)
    #[arg(long)]
    factor4: bool,
    /// Print the admissible delta window (requires n >= 31)
    #[arg(long)]
    delta_window: bool,
    /// Check the exponent chain at this delta
    #[arg(long)]
    chain_delta: Option<f64>,
    /// Table format: text (default) or csv
    #[arg(long)]
    format: Option<String>,
    /// Run the empirical short-sum scan
    #[arg(long)]
    scan: bool,
    #[arg(long)]
    scan_length: Option<u64>,
    #[arg(long = "scan-start", value_name = "C")]
    scan_starts: Vec<u64>,
    /// Units sampled for the scan (default 64; larger than phi means all)
    #[arg(long)]
    scan_units: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of independent sample paths
    #[arg(long)]
    samples: Option<u64>,
    /// Series truncation H
    #[arg(long)]
    truncation: Option<u64>,
    /// Evaluation grid size on [0, 1]
    #[arg(long)]
    t_count: Option<u64>,
    /// CSV destination (header seed,t,re,im)
    #[arg(long, value_name = "FILE")]
    export: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Path CSV or report JSON
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// SVG destination
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes instead of panicking mid-table
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = file.fill(cli.seed, "seed")?.unwrap_or(1);
    let threads = match file.fill(cli.threads, "threads")? {
        Some(t) => Some(t),
        None => std::env::var("KLPATH_THREADS").ok().and_then(|v| v.parse().ok()),
    };
    if let Some(t) = threads.filter(|&t| t > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out_dir = file.fill(cli.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let env = RunEnv { file, seed, out_dir, started };
    match cli.command {
        Command::Sum(args) => cmd_sum(args, &env),
        Command::Path(args) => cmd_path(args, &env),
        Command::Moments(args) => cmd_moments(args, &env),
        Command::ScanTightness(args) => cmd_scan(args, &env),
        Command::CompareLaw(args) => cmd_compare(args, &env),
        Command::Bounds(args) => cmd_bounds(args, &env),
        Command::SampleLimit(args) => cmd_sample(args, &env),
        Command::Plot(args) => cmd_plot(args, &env),
    }
}

struct RunEnv {
    file: FileConfig,
    seed: u64,
    out_dir: PathBuf,
    started: Instant,
}

impl RunEnv {
    fn resolve_out(&self, path: PathBuf) -> PathBuf {
        if path.is_absolute() {
            path
        } else {
            self.out_dir.join(path)
        }
    }

    fn finish(
        &self,
        command: &str,
        cfg: serde_json::Value,
        outputs: &[PathBuf],
    ) -> Result<(), CliError> {
        if outputs.is_empty() {
            return Ok(());
        }
        let manifest = manifest::write_manifest(&self.out_dir, command, cfg, outputs, self.started)?;
        println!("manifest: {}", manifest.display());
        Ok(())
    }
}

fn modulus_from(
    env: &RunEnv,
    p: Option<u64>,
    n: Option<u32>,
) -> Result<PrimePowerModulus, CliError> {
    let p = require(env.file.fill(p, "p")?, "p")?;
    let n = require(env.file.fill(n, "n")?, "n")?;
    Ok(PrimePowerModulus::new(p, n)?)
}

fn check_average_scale(m: &PrimePowerModulus) -> Result<(), CliError> {
    if m.q() > EXACT_AVERAGE_LIMIT {
        return Err(CliError::Config(format!(
            "exact averaging over all units is refused for q = {} > 10^6; \
             subsampling would change the averaged object",
            m.q()
        )));
    }
    Ok(())
}

fn rational_times(
    values: &[f64],
    m: &PrimePowerModulus,
    grid_factor: u64,
) -> Result<Vec<RationalTime>, CliError> {
    let den = (m.phi() - 1)
        .checked_mul(grid_factor)
        .ok_or_else(|| CliError::Config("grid factor overflow".into()))?;
    values.iter().map(|&t| Ok(RationalTime::from_f64(t, den)?)).collect()
}

fn cmd_sum(args: SumArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    let a = UnitResidue::new(require(env.file.fill(args.a, "a")?, "a")?, &m)?;
    let b = UnitResidue::new(require(env.file.fill(args.b, "b")?, "b")?, &m)?;
    let ctx = SumContext::new(&m)?;
    let value = ctx.full_sum(&a, &b)?;
    println!(
        "Kl_{{{}^{}}}({}, {}) = {}",
        m.p(),
        m.n(),
        a.value(),
        b.value(),
        sig12(value)
    );
    if args.crosscheck {
        let reference = salie_reference(&a, &b, &m)?;
        println!("closed-form reference  = {}", sig12(reference));
        println!("difference             = {}", sig12(value - reference));
    }
    Ok(())
}

fn cmd_path(args: PathArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    let a_val = require(env.file.fill(args.a, "a")?, "a")?;
    let b_val = require(env.file.fill(args.b, "b")?, "b")?;
    let a = UnitResidue::new(a_val, &m)?;
    let b = UnitResidue::new(b_val, &m)?;
    let grid_factor = env.file.fill(args.grid_factor, "grid_factor")?.unwrap_or(64);
    let ctx = SumContext::new(&m)?;
    let path = PathFunction::from_context(&ctx, &a, &b)?;
    println!(
        "path for (a, b) = ({}, {}) mod {}^{}: {} knots, endpoint {}",
        a.value(),
        b.value(),
        m.p(),
        m.n(),
        m.phi(),
        sig12(path.series().full().re)
    );
    if let Some(t) = env.file.fill(args.eval, "eval")? {
        let rt = rational_times(&[t], &m, grid_factor)?[0];
        let v = path.eval(rt)?;
        println!("value at t = {}: {} + {} i", t, sig12(v.re), sig12(v.im));
    }
    let mut outputs = Vec::new();
    if let Some(export) = env.file.fill(args.export, "export")? {
        let target = env.resolve_out(export);
        let mut buf = Vec::new();
        path.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&target, buf)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
        println!("knots: {}", target.display());
        outputs.push(target);
    }
    env.finish(
        "path",
        json!({
            "p": m.p(), "n": m.n(), "a": a.value(), "b": b.value(),
            "grid_factor": grid_factor, "seed": env.seed,
        }),
        &outputs,
    )
}

fn cmd_moments(args: MomentsArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    check_average_scale(&m)?;
    let b0 = UnitResidue::new(env.file.fill(args.b0, "b0")?.unwrap_or(1), &m)?;
    let alpha = require(env.file.fill(args.alpha, "alpha")?, "alpha")?;
    let grid_factor = env.file.fill(args.grid_factor, "grid_factor")?.unwrap_or(64);
    let s_list = require(env.file.fill_list(&args.s, "s")?, "s")?;
    let t_list = require(env.file.fill_list(&args.t, "t")?, "t")?;
    if s_list.len() != t_list.len() {
        return Err(CliError::Config(format!(
            "--s and --t must pair up ({} vs {} values)",
            s_list.len(),
            t_list.len()
        )));
    }
    let s_times = rational_times(&s_list, &m, grid_factor)?;
    let t_times = rational_times(&t_list, &m, grid_factor)?;
    let pairs: Vec<(RationalTime, RationalTime)> =
        s_times.into_iter().zip(t_times).collect();
    let ctx = SumContext::new(&m)?;
    let report = moment_report_for_pairs(&ctx, &b0, alpha, &pairs, env.seed)?;
    for entry in &report.moments {
        println!(
            "M_{}({}, {}) = {}",
            alpha,
            sig12(entry.s),
            sig12(entry.t),
            sig12(entry.m_alpha)
        );
    }
    if !report.violations.is_empty() {
        println!("small-gap bound violations: {}", report.violations.len());
    }
    let mut outputs = Vec::new();
    if let Some(json_path) = env.file.fill(args.json, "json")? {
        let target = env.resolve_out(json_path);
        let report: Report = report.into();
        std::fs::write(&target, report.to_json())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
        println!("report: {}", target.display());
        outputs.push(target);
    }
    env.finish(
        "moments",
        json!({
            "p": m.p(), "n": m.n(), "b0": b0.value(), "alpha": alpha,
            "s": s_list, "t": t_list, "grid_factor": grid_factor, "seed": env.seed,
        }),
        &outputs,
    )
}

fn cmd_scan(args: ScanArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    check_average_scale(&m)?;
    let b0 = UnitResidue::new(env.file.fill(args.b0, "b0")?.unwrap_or(1), &m)?;
    let alpha = env.file.fill(args.alpha, "alpha")?.unwrap_or(4);
    let gap_max = env.file.fill(args.gap_max, "gap_max")?.unwrap_or(0.1);
    // ten segments above the small-gap window, clamped inside the grid for
    // small moduli
    let gap_min = env
        .file
        .fill(args.gap_min, "gap_min")?
        .unwrap_or_else(|| (10.0 / m.phi() as f64).min(gap_max / 2.0));
    let gap_count = env.file.fill(args.gap_count, "gap_count")?.unwrap_or(12);
    if !(gap_min > 0.0 && gap_max >= gap_min && gap_max <= 1.0) {
        return Err(CliError::Config(format!(
            "gap range [{gap_min}, {gap_max}] must satisfy 0 < min <= max <= 1"
        )));
    }
    let cfg = TightnessScanConfig {
        alpha,
        gaps: log_gap_grid(gap_min, gap_max, gap_count),
        samples_per_gap: env.file.fill(args.samples_per_gap, "samples_per_gap")?.unwrap_or(32),
        grid_factor: env.file.fill(args.grid_factor, "grid_factor")?.unwrap_or(64),
        seed: env.seed,
    };
    let ctx = SumContext::new(&m)?;
    let report = tightness_scan(&ctx, &b0, &cfg)?;
    for g in &report.gaps {
        match g.mean_m_alpha {
            Some(mean) => println!("gap {:<22} mean M_{} = {}", sig12(g.gap), alpha, sig12(mean)),
            None => println!("gap {:<22} degenerate (all placements zero)", sig12(g.gap)),
        }
    }
    match report.fitted_slope {
        Some(slope) => println!("fitted log-log slope: {}", sig12(slope)),
        None => println!("fitted log-log slope: undefined (fewer than two usable gaps)"),
    }
    println!("small-gap violations: {}", report.violations.len());
    let mut outputs = Vec::new();
    if let Some(json_path) = env.file.fill(args.json, "json")? {
        let target = env.resolve_out(json_path);
        let report: Report = report.into();
        std::fs::write(&target, report.to_json())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
        println!("report: {}", target.display());
        outputs.push(target);
    }
    env.finish(
        "scan-tightness",
        json!({
            "p": m.p(), "n": m.n(), "b0": b0.value(), "alpha": alpha,
            "gap_min": gap_min, "gap_max": gap_max, "gap_count": gap_count,
            "samples_per_gap": cfg.samples_per_gap, "grid_factor": cfg.grid_factor,
            "seed": env.seed,
        }),
        &outputs,
    )
}

fn cmd_compare(args: CompareArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    check_average_scale(&m)?;
    let b0 = UnitResidue::new(env.file.fill(args.b0, "b0")?.unwrap_or(1), &m)?;
    let truncation = env.file.fill(args.truncation, "truncation")?.unwrap_or(m.q());
    let mc = env.file.fill(args.mc, "mc")?.unwrap_or(10_000);
    let grid_factor = env.file.fill(args.grid_factor, "grid_factor")?.unwrap_or(64);
    let marginal = match env
        .file
        .fill(args.marginal, "marginal")?
        .unwrap_or_else(|| "step".to_string())
        .as_str()
    {
        "step" => PathMarginal::Step,
        "path" | "interpolated" => PathMarginal::Interpolated,
        other => {
            return Err(CliError::Config(format!(
                "unknown marginal `{other}` (expected step or interpolated)"
            )))
        }
    };
    let t_list = require(env.file.fill_list(&args.t, "t")?, "t")?;
    let t_points = rational_times(&t_list, &m, grid_factor)?;
    let ctx = SumContext::new(&m)?;
    let report = compare_laws(&ctx, &b0, &t_points, truncation, mc, env.seed, marginal)?;
    for point in &report.ks {
        println!(
            "t = {:<18} KS re = {:<18} im = {}",
            sig12(point.t),
            sig12(point.re),
            sig12(point.im)
        );
    }
    println!("vanishing fraction at t = 1: {}", sig12(report.zero_mass_fraction));
    let mut outputs = Vec::new();
    if let Some(json_path) = env.file.fill(args.json, "json")? {
        let target = env.resolve_out(json_path);
        let report: Report = report.into();
        std::fs::write(&target, report.to_json())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
        println!("report: {}", target.display());
        outputs.push(target);
    }
    env.finish(
        "compare-law",
        json!({
            "p": m.p(), "n": m.n(), "b0": b0.value(), "t": t_list,
            "truncation": truncation, "mc": mc, "grid_factor": grid_factor,
            "seed": env.seed,
        }),
        &outputs,
    )
}

fn cmd_bounds(args: BoundsArgs, env: &RunEnv) -> Result<(), CliError> {
    let m = modulus_from(env, args.p, args.n)?;
    let format = env.file.fill(args.format, "format")?.unwrap_or_else(|| "text".to_string());
    if format != "text" && format != "csv" {
        return Err(CliError::Config(format!("unknown format `{format}` (expected text or csv)")));
    }

    if env.file.fill(if args.delta_window { Some(true) } else { None }, "delta_window")?
        == Some(true)
    {
        let window = bounds::delta_admissible(&m)?;
        println!("admissible delta window for n = {}: (0, {}]", window.n, sig12(window.delta_max));
    }
    if let Some(delta) = env.file.fill(args.chain_delta, "chain_delta")? {
        let ok = bounds::exponent_chain_check(delta, &m);
        println!("exponent chain at delta = {}: {}", sig12(delta), if ok { "holds" } else { "fails" });
    }

    let lengths = match env.file.fill_list(&args.lengths, "length")? {
        Some(list) => list,
        None => {
            let lo = env.file.fill(args.length_min, "length_min")?.unwrap_or(10);
            let hi = env.file.fill(args.length_max, "length_max")?.unwrap_or(1_000_000_000_000);
            let count = env.file.fill(args.length_count, "length_count")?.unwrap_or(12);
            if lo == 0 || hi < lo || count == 0 {
                return Err(CliError::Config("invalid length grid".into()));
            }
            let mut out: Vec<u64> = log_gap_grid(lo as f64, hi as f64, count)
                .into_iter()
                .map(|v| v.round() as u64)
                .collect();
            out.dedup();
            out
        }
    };
    let factor4 = args.factor4
        || env.file.fill(None::<bool>, "factor4")?.unwrap_or(false);
    let sep = if format == "csv" { "," } else { "  " };
    if format == "csv" {
        println!("length,condition,bound,bound_over_length,trivial,sqrt_length");
    } else {
        println!(
            "{:>14}{sep}{:>9}{sep}{:>20}{sep}{:>20}{sep}{:>14}{sep}{:>16}",
            "N", "condition", "bound", "bound/N", "trivial", "sqrt(N)"
        );
    }
    for &len in &lengths {
        let condition = bounds::korolev_condition(len, &m);
        let bound = bounds::korolev_bound(len, &m, factor4)?;
        let row = [
            len.to_string(),
            condition.to_string(),
            sig12(bound),
            sig12(bound / len as f64),
            len.to_string(),
            sig12((len as f64).sqrt()),
        ];
        if format == "csv" {
            println!("{}", row.join(","));
        } else {
            println!(
                "{:>14}{sep}{:>9}{sep}{:>20}{sep}{:>20}{sep}{:>14}{sep}{:>16}",
                row[0], row[1], row[2], row[3], row[4], row[5]
            );
        }
    }

    if args.scan || env.file.fill(None::<bool>, "scan")?.unwrap_or(false) {
        check_average_scale(&m)?;
        let b = UnitResidue::new(env.file.fill(args.b, "b")?.unwrap_or(1), &m)?;
        let length = require(env.file.fill(args.scan_length, "scan_length")?, "scan-length")?;
        let starts = env
            .file
            .fill_list(&args.scan_starts, "scan_start")?
            .unwrap_or_else(|| vec![0]);
        let units = env.file.fill(args.scan_units, "scan_units")?.unwrap_or(64);
        let ctx = SumContext::new(&m)?;
        let report = bounds::short_sum_scan(&ctx, &b, length, &starts, units, env.seed)?;
        println!(
            "scan: N = {}, {} starts, {} units: max |S| = {}, mean = {}, max/N = {}, max/sqrt(N) = {}",
            report.length,
            report.starts.len(),
            report.units_sampled,
            sig12(report.max_abs),
            sig12(report.mean_abs),
            sig12(report.ratio_to_trivial),
            sig12(report.ratio_to_sqrt)
        );
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs, env: &RunEnv) -> Result<(), CliError> {
    let samples = env.file.fill(args.samples, "samples")?.unwrap_or(8);
    let truncation = env.file.fill(args.truncation, "truncation")?.unwrap_or(1000);
    let t_count = env.file.fill(args.t_count, "t_count")?.unwrap_or(101).max(2);
    let mut csv = String::from("seed,t,re,im\n");
    for i in 0..samples {
        let seed = env.seed.wrapping_add(i);
        let sample = LimitSeriesSample::new(&MuSampler::new(seed), truncation);
        for g in 0..t_count {
            let t = g as f64 / (t_count - 1) as f64;
            let v = sample.eval(t);
            csv.push_str(&format!("{seed},{t},{},{}\n", v.re, v.im));
        }
    }
    let mut outputs = Vec::new();
    match env.file.fill(args.export, "export")? {
        Some(export) => {
            let target = env.resolve_out(export);
            std::fs::write(&target, csv)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", target.display())))?;
            println!("samples: {}", target.display());
            outputs.push(target);
        }
        None => print!("{csv}"),
    }
    env.finish(
        "sample-limit",
        json!({
            "samples": samples, "truncation": truncation, "t_count": t_count,
            "seed": env.seed,
        }),
        &outputs,
    )
}

fn cmd_plot(args: PlotArgs, env: &RunEnv) -> Result<(), CliError> {
    let output = env.resolve_out(args.output);
    plot::plot_file(&args.input, &output)?;
    println!("figure: {}", output.display());
    env.finish(
        "plot",
        json!({ "input": args.input.display().to_string(), "seed": env.seed }),
        &[output],
    )
}
