//! Discrete-time simulator for channel borrowing in hexagonal cellular
//! networks.
//!
//! A rectangular hex grid of cells serves mobile hosts that random-walk from
//! iteration to iteration. Each cell owns a fixed set of channels; when more
//! hosts land in a cell than it can serve, the cell may borrow spare channels
//! from its direct neighbors for the duration of one iteration. Three
//! allocation strategies are provided:
//!
//! * fixed channel allocation (`fca`) - no borrowing, the benchmark;
//! * a greedy heuristic (`sb`) - repeatedly takes one channel from the
//!   richest neighbor;
//! * a vector genetic algorithm (`vga`) - searches borrowing plans encoded
//!   as 7x4 integer matrices with seeding, restrictive single-cut crossover
//!   and fitness-noise mutation.
//!
//! Runs are fully deterministic for a given seed, and experiment sweeps are
//! written out as flat CSV files. See the `report` module and the `cellalloc`
//! binary for the experiment driver.

pub mod allocators;
pub mod cli;
pub mod error;
pub mod report;
pub mod sim;
pub mod topology;
pub mod vga;

pub use allocators::{fca_blocked, greedy_borrow, BorrowLedger, BorrowPlan, BorrowRequest};
pub use error::{Error, Result};
pub use report::{compare_against_reference, run_experiment, ExperimentSpec, ResultsTable};
pub use sim::{
    run_simulation, AllocatorKind, CellState, MobilityModel, RunMetrics, SimConfig,
};
pub use topology::{assign_channel_groups, reuse_factor, CellId, ReuseParams, Topology};
pub use vga::{brute_force_oracle, vga_solve, FitnessWeights, Member, VgaParams};
