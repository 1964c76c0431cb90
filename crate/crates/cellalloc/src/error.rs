use std::path::PathBuf;

use thiserror::Error;

use crate::topology::CellId;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by grid construction, simulation, and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must have at least one row and one column (got {rows}x{cols})")]
    EmptyGrid { rows: usize, cols: usize },

    #[error("cell {cell} is out of range for a grid of {cell_count} cells")]
    InvalidCell { cell: CellId, cell_count: usize },

    #[error("sigma must be positive and finite (got {sigma})")]
    InvalidSigma { sigma: f64 },

    #[error(
        "{n_groups} channel group(s) cannot label the grid: adjacent cells {a} and {b} \
         would both get group {group}"
    )]
    InfeasibleGroups {
        n_groups: u32,
        a: CellId,
        b: CellId,
        group: u32,
    },

    #[error("{hosts} hosts exceed the max supported host count {max} ({cells} cells x {channels} channels per cell)")]
    TooManyHosts {
        hosts: u32,
        max: u64,
        cells: usize,
        channels: u32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown allocator '{0}' (expected fca, sb or vga)")]
    UnknownAllocator(String),

    #[error("cell {cell} has no blocked hosts; borrow requests require unmet demand")]
    CellNotHot { cell: CellId },

    #[error("stale borrow plan: lender {lender} has {available} free channel(s), plan needs {requested}")]
    StalePlan {
        lender: CellId,
        requested: u32,
        available: u32,
    },

    #[error("borrow ledger already holds an active loan for requester {requester}")]
    DuplicateBorrow { requester: CellId },

    #[error("borrow ledger inconsistency: {0}")]
    LedgerInconsistency(String),

    #[error("invalid population member: {0}")]
    InvalidMember(String),

    #[error("crossover parents disagree with the original request: {0}")]
    MismatchedParents(String),

    #[error("exhaustive search over {combinations} lending vectors exceeds the {limit} limit")]
    OracleUnavailable { combinations: u128, limit: u64 },

    #[error("{path}:{line}: {message}")]
    CsvParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
