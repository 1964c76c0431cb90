//! Experiment orchestration and CSV reporting.
//!
//! An experiment sweeps host counts and allocators over a shared base
//! configuration, runs each combination through the simulator, and writes
//! one per-iteration series file per combination plus a single summary.
//! `compare_against_reference` checks a summary against a reference table of
//! expected average blocked-host counts.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::{run_simulation, AllocatorKind, RunMetrics, SimConfig};

/// A sweep over host counts and allocators.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub host_counts: Vec<u32>,
    pub allocators: Vec<AllocatorKind>,
    pub base: SimConfig,
    pub out_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            host_counts: vec![200, 210, 220, 230, 240, 250],
            allocators: AllocatorKind::ALL.to_vec(),
            base: SimConfig::default(),
            out_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.host_counts.is_empty() {
            return Err(Error::Config("hosts: at least one host count required".into()));
        }
        if self.allocators.is_empty() {
            return Err(Error::Config(
                "allocator: at least one allocator required".into(),
            ));
        }
        for &hosts in &self.host_counts {
            let config = SimConfig {
                hosts,
                ..self.base.clone()
            };
            config.validate()?;
        }
        Ok(())
    }

    fn config_for(&self, allocator: AllocatorKind, hosts: u32) -> SimConfig {
        SimConfig {
            allocator,
            hosts,
            ..self.base.clone()
        }
    }
}

/// Results of one (allocator, host count) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCell {
    pub allocator: AllocatorKind,
    pub hosts: u32,
    pub metrics: RunMetrics,
}

/// All combinations of an experiment, in execution order (allocator outer,
/// host count inner).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub cells: Vec<ExperimentCell>,
}

impl ResultsTable {
    pub fn get(&self, allocator: AllocatorKind, hosts: u32) -> Option<&RunMetrics> {
        self.cells
            .iter()
            .find(|c| c.allocator == allocator && c.hosts == hosts)
            .map(|c| &c.metrics)
    }
}

/// Runs every combination and writes `summary.csv` plus one
/// `series_<allocator>_<hosts>.csv` per combination into the output
/// directory. The directory is created (and probed for writability) before
/// any simulation starts.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultsTable> {
    spec.validate()?;
    fs::create_dir_all(&spec.out_dir)?;
    probe_writable(&spec.out_dir)?;
    let mut table = ResultsTable::default();
    for &allocator in &spec.allocators {
        for &hosts in &spec.host_counts {
            let metrics = run_simulation(&spec.config_for(allocator, hosts))?;
            write_series(&spec.out_dir, allocator, hosts, &metrics)?;
            table.cells.push(ExperimentCell {
                allocator,
                hosts,
                metrics,
            });
        }
    }
    write_summary(&spec.out_dir, &table)?;
    Ok(table)
}

fn probe_writable(dir: &Path) -> Result<()> {
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"ok")?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn series_file_name(allocator: AllocatorKind, hosts: u32) -> String {
    format!("series_{}_{hosts}.csv", allocator.token())
}

fn write_series(
    dir: &Path,
    allocator: AllocatorKind,
    hosts: u32,
    metrics: &RunMetrics,
) -> Result<()> {
    let mut out = String::from("iteration,blocked,hot_cells\n");
    for (t, (blocked, hot)) in metrics
        .blocked_series
        .iter()
        .zip(&metrics.hot_series)
        .enumerate()
    {
        out.push_str(&format!("{},{blocked:.6},{hot:.6}\n", t + 1));
    }
    fs::write(dir.join(series_file_name(allocator, hosts)), out)?;
    Ok(())
}

fn write_summary(dir: &Path, table: &ResultsTable) -> Result<()> {
    let mut file = fs::File::create(dir.join("summary.csv"))?;
    writeln!(file, "allocator,hosts,avg_blocked,avg_hot_cells,blocking_pct")?;
    for cell in &table.cells {
        writeln!(
            file,
            "{},{},{:.6},{:.6},{:.6}",
            cell.allocator,
            cell.hosts,
            cell.metrics.avg_blocked,
            cell.metrics.avg_hot_cells,
            cell.metrics.blocking_pct
        )?;
    }
    Ok(())
}

/// One parsed row of a summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub allocator: AllocatorKind,
    pub hosts: u32,
    pub avg_blocked: f64,
    pub avg_hot_cells: f64,
    pub blocking_pct: f64,
}

fn csv_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::CsvParse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a summary written by [`run_experiment`].
pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "allocator,hosts,avg_blocked,avg_hot_cells,blocking_pct")) => {}
        Some((_, header)) => {
            return Err(csv_error(path, 1, format!("unexpected header '{header}'")))
        }
        None => return Err(csv_error(path, 1, "empty file")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(csv_error(
                path,
                idx + 1,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let parse_f64 = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| csv_error(path, idx + 1, format!("invalid {what} '{s}'")))
        };
        rows.push(SummaryRow {
            allocator: fields[0]
                .parse()
                .map_err(|_| csv_error(path, idx + 1, format!("unknown allocator '{}'", fields[0])))?,
            hosts: fields[1]
                .parse()
                .map_err(|_| csv_error(path, idx + 1, format!("invalid host count '{}'", fields[1])))?,
            avg_blocked: parse_f64(fields[2], "avg_blocked")?,
            avg_hot_cells: parse_f64(fields[3], "avg_hot_cells")?,
            blocking_pct: parse_f64(fields[4], "blocking_pct")?,
        });
    }
    Ok(rows)
}

/// Expected average blocked hosts per (allocator, host count).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub entries: Vec<(AllocatorKind, u32, f64)>,
}

impl ReferenceTable {
    /// The reference results shipped with the crate: average blocked hosts
    /// for 200..=250 hosts in steps of 10 under the standard 25-cell,
    /// 10-channel setup.
    pub fn builtin() -> Self {
        let hosts = [200u32, 210, 220, 230, 240, 250];
        let fca = [8.7, 12.15, 17.85, 19.6, 24.6, 27.8];
        let sb = [0.45, 1.6, 4.0, 4.8, 9.55, 12.5];
        let vga = [0.0, 0.9, 3.25, 2.0, 5.3, 3.75];
        let mut entries = Vec::new();
        for (values, allocator) in [
            (fca, AllocatorKind::Fca),
            (sb, AllocatorKind::Sb),
            (vga, AllocatorKind::Vga),
        ] {
            for (&hosts, &value) in hosts.iter().zip(&values) {
                entries.push((allocator, hosts, value));
            }
        }
        ReferenceTable { entries }
    }

    /// Loads a reference from a CSV with header `allocator,hosts,avg_blocked`.
    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "allocator,hosts,avg_blocked")) => {}
            Some((_, header)) => {
                return Err(csv_error(path, 1, format!("unexpected header '{header}'")))
            }
            None => return Err(csv_error(path, 1, "empty file")),
        }
        let mut entries = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(csv_error(
                    path,
                    idx + 1,
                    format!("expected 3 fields, found {}", fields.len()),
                ));
            }
            let allocator: AllocatorKind = fields[0]
                .parse()
                .map_err(|_| csv_error(path, idx + 1, format!("unknown allocator '{}'", fields[0])))?;
            let hosts: u32 = fields[1]
                .parse()
                .map_err(|_| csv_error(path, idx + 1, format!("invalid host count '{}'", fields[1])))?;
            let value: f64 = fields[2]
                .parse()
                .map_err(|_| csv_error(path, idx + 1, format!("invalid avg_blocked '{}'", fields[2])))?;
            entries.push((allocator, hosts, value));
        }
        Ok(ReferenceTable { entries })
    }

    fn get(&self, allocator: AllocatorKind, hosts: u32) -> Option<f64> {
        self.entries
            .iter()
            .find(|(a, h, _)| *a == allocator && *h == hosts)
            .map(|(_, _, v)| *v)
    }
}

/// Tolerance bands for the stochastic comparison: a relative band around the
/// benchmark and heuristic values, and an absolute allowance above the
/// genetic allocator's value (doing better than the reference always
/// passes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub relative: f64,
    pub vga_absolute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relative: 0.40,
            vga_absolute: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Band check of one summary value against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CellVerdict {
    pub allocator: AllocatorKind,
    pub hosts: u32,
    pub measured: f64,
    pub reference: f64,
    pub lo: f64,
    pub hi: f64,
    pub verdict: Verdict,
}

/// Ordering check `vga <= sb <= fca` for one host count.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingVerdict {
    pub hosts: u32,
    pub fca: f64,
    pub sb: f64,
    pub vga: f64,
    pub verdict: Verdict,
}

/// Outcome of [`compare_against_reference`]; `Display` renders the per-cell
/// verdict table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub cell_verdicts: Vec<CellVerdict>,
    pub ordering_verdicts: Vec<OrderingVerdict>,
}

impl ComparisonReport {
    pub fn all_passed(&self) -> bool {
        self.cell_verdicts.iter().all(|v| v.verdict == Verdict::Pass)
            && self
                .ordering_verdicts
                .iter()
                .all(|v| v.verdict == Verdict::Pass)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "allocator  hosts  measured   reference  band                verdict")?;
        for v in &self.cell_verdicts {
            writeln!(
                f,
                "{:<9}  {:<5}  {:<9.3}  {:<9.3}  [{:.3}, {:.3}]{}  {}",
                v.allocator.token(),
                v.hosts,
                v.measured,
                v.reference,
                v.lo,
                if v.hi.is_finite() { v.hi } else { f64::NAN },
                if v.hi.is_finite() { "" } else { " (upper only)" },
                v.verdict
            )?;
        }
        for v in &self.ordering_verdicts {
            writeln!(
                f,
                "ordering   {:<5}  vga {:.3} <= sb {:.3} <= fca {:.3}  {}",
                v.hosts, v.vga, v.sb, v.fca, v.verdict
            )?;
        }
        Ok(())
    }
}

/// Checks a summary against a reference: per-value tolerance bands
/// (relative for `fca`/`sb`, absolute upper allowance for `vga`) and the
/// `vga <= sb <= fca` ordering per host count.
pub fn compare_against_reference(
    summary: &[SummaryRow],
    reference: &ReferenceTable,
    tolerances: &Tolerances,
) -> ComparisonReport {
    let mut cell_verdicts = Vec::new();
    for row in summary {
        let Some(expected) = reference.get(row.allocator, row.hosts) else {
            continue;
        };
        let (lo, hi) = match row.allocator {
            AllocatorKind::Vga => (0.0, expected + tolerances.vga_absolute),
            _ => (
                expected * (1.0 - tolerances.relative),
                expected * (1.0 + tolerances.relative),
            ),
        };
        let verdict = if row.avg_blocked >= lo && row.avg_blocked <= hi {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        cell_verdicts.push(CellVerdict {
            allocator: row.allocator,
            hosts: row.hosts,
            measured: row.avg_blocked,
            reference: expected,
            lo,
            hi,
            verdict,
        });
    }
    let mut hosts_seen: Vec<u32> = summary.iter().map(|r| r.hosts).collect();
    hosts_seen.sort_unstable();
    hosts_seen.dedup();
    let mut ordering_verdicts = Vec::new();
    for hosts in hosts_seen {
        let value = |allocator| {
            summary
                .iter()
                .find(|r| r.allocator == allocator && r.hosts == hosts)
                .map(|r| r.avg_blocked)
        };
        let (Some(fca), Some(sb), Some(vga)) = (
            value(AllocatorKind::Fca),
            value(AllocatorKind::Sb),
            value(AllocatorKind::Vga),
        ) else {
            continue;
        };
        let verdict = if vga <= sb && sb <= fca {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ordering_verdicts.push(OrderingVerdict {
            hosts,
            fca,
            sb,
            vga,
            verdict,
        });
    }
    ComparisonReport {
        cell_verdicts,
        ordering_verdicts,
    }
}
