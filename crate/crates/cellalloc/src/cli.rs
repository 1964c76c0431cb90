//! Command-line front end: flag and config-file parsing, resolved-config
//! provenance, and the experiment driver the binary runs.
//!
//! Resolution order is defaults, then config-file values, then flags. The
//! fully resolved configuration is echoed to `<out>/resolved_config.txt` in
//! the same `key = value` format the config file uses.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use crate::report::{
    compare_against_reference, read_summary_csv, run_experiment, ExperimentSpec, ReferenceTable,
    Tolerances,
};
use crate::sim::AllocatorKind;
use crate::vga::FitnessWeights;

/// Sweep host counts and allocation strategies over a hexagonal cellular
/// grid and report blocked-host statistics as CSV files.
#[derive(Debug, Parser)]
#[command(name = "cellalloc", version, disable_help_subcommand = true)]
pub struct CliArgs {
    /// Grid rows.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Grid columns.
    #[arg(long)]
    pub cols: Option<usize>,
    /// Channels owned by each cell.
    #[arg(long = "channels-per-cell")]
    pub channels_per_cell: Option<u32>,
    /// Iterations per run.
    #[arg(long)]
    pub iterations: Option<u32>,
    /// Independent runs to average over.
    #[arg(long)]
    pub runs: Option<u32>,
    /// Host count to sweep; repeat for several counts.
    #[arg(long = "hosts")]
    pub hosts: Vec<u32>,
    /// Allocator to run (fca, sb, vga); repeat for several.
    #[arg(long = "allocator")]
    pub allocators: Vec<AllocatorKind>,
    /// Root RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fitness reward per borrowed channel.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fitness penalty per lender host.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Fitness penalty per lender cell-type unit.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Upper bound of the fitness noise term.
    #[arg(long = "gamma-max")]
    pub gamma_max: Option<f64>,
    /// Generation guard for the genetic search.
    #[arg(long = "max-generations")]
    pub max_generations: Option<u32>,
    /// Output directory for CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compare the produced summary against a reference CSV
    /// (`allocator,hosts,avg_blocked`); without a value, the built-in
    /// reference table is used.
    #[arg(long, num_args = 0..=1)]
    pub compare: Option<Option<PathBuf>>,
    /// Read defaults from a `key = value` config file before applying flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Where the comparison reference comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CompareSource {
    Builtin,
    File(PathBuf),
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub spec: ExperimentSpec,
    pub compare: Option<CompareSource>,
}

#[derive(Debug, Default)]
struct FileConfig {
    rows: Option<usize>,
    cols: Option<usize>,
    channels_per_cell: Option<u32>,
    iterations: Option<u32>,
    runs: Option<u32>,
    hosts: Option<Vec<u32>>,
    allocators: Option<Vec<AllocatorKind>>,
    seed: Option<u64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    mu: Option<f64>,
    gamma_max: Option<f64>,
    max_generations: Option<u32>,
    out: Option<PathBuf>,
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse value '{}'", value.trim())))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|item| parse_scalar(key, item))
        .collect()
}

/// Parses a flat `key = value` config file. Keys mirror the long flag names;
/// `hosts` and `allocator` accept comma-separated lists. Unknown keys are
/// rejected.
fn parse_config_file(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)?;
    let mut config = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected 'key = value', got '{line}'",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim();
        match key {
            "rows" => config.rows = Some(parse_scalar(key, value)?),
            "cols" => config.cols = Some(parse_scalar(key, value)?),
            "channels-per-cell" => config.channels_per_cell = Some(parse_scalar(key, value)?),
            "iterations" => config.iterations = Some(parse_scalar(key, value)?),
            "runs" => config.runs = Some(parse_scalar(key, value)?),
            "hosts" => config.hosts = Some(parse_list(key, value)?),
            "allocator" => config.allocators = Some(parse_list(key, value)?),
            "seed" => config.seed = Some(parse_scalar(key, value)?),
            "alpha" => config.alpha = Some(parse_scalar(key, value)?),
            "beta" => config.beta = Some(parse_scalar(key, value)?),
            "mu" => config.mu = Some(parse_scalar(key, value)?),
            "gamma-max" => config.gamma_max = Some(parse_scalar(key, value)?),
            "max-generations" => config.max_generations = Some(parse_scalar(key, value)?),
            "out" => config.out = Some(PathBuf::from(value.trim())),
            _ => {
                return Err(Error::Config(format!(
                    "{}:{}: unknown key '{key}'",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok(config)
}

/// Resolves flags and the optional config file into an [`Invocation`]:
/// flags override file values, file values override defaults, and the
/// result is validated.
pub fn parse_config<I, S>(args: I) -> Result<Invocation>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = CliArgs::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    resolve(cli)
}

/// Applies the defaults < file < flags precedence and validates the result.
pub fn resolve(cli: CliArgs) -> Result<Invocation> {
    let file = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => FileConfig::default(),
    };
    let mut spec = ExperimentSpec::default();
    let base = &mut spec.base;
    if let Some(rows) = cli.rows.or(file.rows) {
        base.rows = rows;
    }
    if let Some(cols) = cli.cols.or(file.cols) {
        base.cols = cols;
    }
    if let Some(channels) = cli.channels_per_cell.or(file.channels_per_cell) {
        base.channels_per_cell = channels;
    }
    if let Some(iterations) = cli.iterations.or(file.iterations) {
        base.iterations = iterations;
    }
    if let Some(runs) = cli.runs.or(file.runs) {
        base.runs = runs;
    }
    if let Some(seed) = cli.seed.or(file.seed) {
        base.rng_seed = seed;
    }
    if let Some(max_generations) = cli.max_generations.or(file.max_generations) {
        if max_generations == 0 {
            return Err(Error::Config("max-generations must be at least 1".into()));
        }
        base.vga.max_generations = max_generations;
    }
    let defaults = FitnessWeights::default();
    base.vga.weights = FitnessWeights::new(
        cli.alpha.or(file.alpha).unwrap_or(defaults.alpha()),
        cli.beta.or(file.beta).unwrap_or(defaults.beta()),
        cli.mu.or(file.mu).unwrap_or(defaults.mu()),
        cli.gamma_max
            .or(file.gamma_max)
            .unwrap_or(defaults.gamma_max()),
    )?;
    if !cli.hosts.is_empty() {
        spec.host_counts = cli.hosts.clone();
    } else if let Some(hosts) = file.hosts {
        spec.host_counts = hosts;
    }
    if !cli.allocators.is_empty() {
        spec.allocators = cli.allocators.clone();
    } else if let Some(allocators) = file.allocators {
        spec.allocators = allocators;
    }
    if let Some(out) = cli.out.or(file.out) {
        spec.out_dir = out;
    }
    spec.validate()?;
    let compare = cli.compare.map(|path| match path {
        Some(path) => CompareSource::File(path),
        None => CompareSource::Builtin,
    });
    Ok(Invocation { spec, compare })
}

/// Renders the resolved experiment in config-file syntax.
pub fn render_resolved(spec: &ExperimentSpec) -> String {
    let join = |items: Vec<String>| items.join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "rows = {}", spec.base.rows);
    let _ = writeln!(out, "cols = {}", spec.base.cols);
    let _ = writeln!(out, "channels-per-cell = {}", spec.base.channels_per_cell);
    let _ = writeln!(out, "iterations = {}", spec.base.iterations);
    let _ = writeln!(out, "runs = {}", spec.base.runs);
    let _ = writeln!(
        out,
        "hosts = {}",
        join(spec.host_counts.iter().map(u32::to_string).collect())
    );
    let _ = writeln!(
        out,
        "allocator = {}",
        join(spec.allocators.iter().map(|a| a.token().to_string()).collect())
    );
    let _ = writeln!(out, "seed = {}", spec.base.rng_seed);
    let _ = writeln!(out, "alpha = {}", spec.base.vga.weights.alpha());
    let _ = writeln!(out, "beta = {}", spec.base.vga.weights.beta());
    let _ = writeln!(out, "mu = {}", spec.base.vga.weights.mu());
    let _ = writeln!(out, "gamma-max = {}", spec.base.vga.weights.gamma_max());
    let _ = writeln!(out, "max-generations = {}", spec.base.vga.max_generations);
    out
}

/// Echoes the resolved configuration into the output directory for
/// provenance; doubles as the writability probe.
pub fn echo_resolved_config(spec: &ExperimentSpec) -> Result<PathBuf> {
    fs::create_dir_all(&spec.out_dir)?;
    let path = spec.out_dir.join("resolved_config.txt");
    fs::write(&path, render_resolved(spec))?;
    Ok(path)
}

/// Process exit status of a CLI run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Success,
    ComparisonFailed,
}

/// Full CLI flow: parse, run the experiment, optionally compare, print the
/// verdicts.
pub fn run<I, S>(args: I) -> Result<RunOutcome>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let invocation = parse_config(args)?;
    echo_resolved_config(&invocation.spec)?;
    run_experiment(&invocation.spec)?;
    let summary_path = invocation.spec.out_dir.join("summary.csv");
    println!("wrote {}", summary_path.display());
    if let Some(source) = invocation.compare {
        let reference = match &source {
            CompareSource::Builtin => ReferenceTable::builtin(),
            CompareSource::File(path) => ReferenceTable::from_csv_file(path)?,
        };
        let summary = read_summary_csv(&summary_path)?;
        let report = compare_against_reference(&summary, &reference, &Tolerances::default());
        print!("{report}");
        if !report.all_passed() {
            return Ok(RunOutcome::ComparisonFailed);
        }
    }
    Ok(RunOutcome::Success)
}
