//! Host placement, the random-walk mobility model, per-iteration channel
//! accounting, and the outer simulation loop.
//!
//! One iteration is: release every borrow from the previous iteration, move
//! every host one step, then settle allocation under the configured strategy
//! and record blocked hosts and hot cells. Borrowed channels live for exactly
//! one iteration.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocators::{greedy_borrow, BorrowLedger, BorrowRequest};
use crate::error::{Error, Result};
use crate::topology::{CellId, Topology, DIRECTIONS};
use crate::vga::{vga_solve, VgaParams};

/// Per-cell channel and host accounting.
///
/// `available = owned_capacity - lent_out + borrowed_in` never goes negative
/// because a cell only ever lends from its free pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellState {
    pub owned_capacity: u32,
    pub lent_out: u32,
    pub borrowed_in: u32,
    pub hosts: u32,
    pub blocked: u32,
}

impl CellState {
    pub fn new(owned_capacity: u32) -> Self {
        CellState {
            owned_capacity,
            lent_out: 0,
            borrowed_in: 0,
            hosts: 0,
            blocked: 0,
        }
    }

    /// Channels this cell can currently serve hosts with.
    pub fn available(&self) -> u32 {
        self.owned_capacity + self.borrowed_in - self.lent_out
    }

    /// Channels not consumed by the cell's own hosts.
    pub fn free_channels(&self) -> u32 {
        self.available().saturating_sub(self.hosts)
    }
}

/// Allocation strategy identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocatorKind {
    Fca,
    Sb,
    Vga,
}

impl AllocatorKind {
    pub const ALL: [AllocatorKind; 3] = [AllocatorKind::Fca, AllocatorKind::Sb, AllocatorKind::Vga];

    pub fn token(self) -> &'static str {
        match self {
            AllocatorKind::Fca => "fca",
            AllocatorKind::Sb => "sb",
            AllocatorKind::Vga => "vga",
        }
    }
}

impl fmt::Display for AllocatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for AllocatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fca" => Ok(AllocatorKind::Fca),
            "sb" => Ok(AllocatorKind::Sb),
            "vga" => Ok(AllocatorKind::Vga),
            _ => Err(Error::UnknownAllocator(s.to_string())),
        }
    }
}

/// How a host picks its next cell each iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityModel {
    /// One of the six hex directions or "stay", each with probability 1/7;
    /// a step off the grid edge keeps the host in place. This transition is
    /// symmetric, so a uniform host distribution stays uniform in
    /// expectation.
    DirectionUniform,
    /// Uniform over the current cell and its neighbors: probability
    /// 1/(degree+1) each. Hosts drift toward high-degree (interior) cells.
    NeighborUniform,
    /// Stay with the given probability, otherwise step in one of the six hex
    /// directions uniformly (off-grid steps keep the host in place). Like
    /// [`MobilityModel::DirectionUniform`] - which this generalizes, with
    /// stay probability 1/7 - the transition is symmetric and preserves a
    /// uniform host distribution in expectation.
    StayBiased(f64),
}

/// Parameters of a single simulation (one allocator, one host count).
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rows: usize,
    pub cols: usize,
    pub channels_per_cell: u32,
    pub iterations: u32,
    pub runs: u32,
    pub hosts: u32,
    pub allocator: AllocatorKind,
    pub rng_seed: u64,
    pub vga: VgaParams,
    pub mobility: MobilityModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            rows: 5,
            cols: 5,
            channels_per_cell: 10,
            iterations: 20,
            runs: 10,
            hosts: 200,
            allocator: AllocatorKind::Vga,
            rng_seed: 7,
            vga: VgaParams::default(),
            mobility: MobilityModel::StayBiased(0.88),
        }
    }
}

impl SimConfig {
    /// Hosts the whole network can serve at once: cells x channels per cell.
    pub fn max_supported_hosts(&self) -> u64 {
        self.rows as u64 * self.cols as u64 * self.channels_per_cell as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyGrid {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if u64::from(self.hosts) > self.max_supported_hosts() {
            return Err(Error::TooManyHosts {
                hosts: self.hosts,
                max: self.max_supported_hosts(),
                cells: self.rows * self.cols,
                channels: self.channels_per_cell,
            });
        }
        if let MobilityModel::StayBiased(p) = self.mobility {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Config(format!(
                    "stay probability must be within [0, 1] (got {p})"
                )));
            }
        }
        Ok(())
    }
}

/// Blocked hosts and hot cells of one settled iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationMetrics {
    pub blocked_hosts: u32,
    pub hot_cells: u32,
}

/// Everything a simulation records: raw per-run series plus the averages
/// reported in the summary tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub hosts: u32,
    pub iterations: u32,
    pub runs: u32,
    /// Blocked hosts per run and iteration: `per_run_blocked[run][iteration]`.
    pub per_run_blocked: Vec<Vec<u32>>,
    pub per_run_hot: Vec<Vec<u32>>,
    /// Per-iteration means across runs.
    pub blocked_series: Vec<f64>,
    pub hot_series: Vec<f64>,
    /// Grand means across iterations and runs.
    pub avg_blocked: f64,
    pub avg_hot_cells: f64,
    /// `avg_blocked / hosts x 100`, zero for an empty network.
    pub blocking_pct: f64,
}

impl RunMetrics {
    fn from_series(hosts: u32, per_run_blocked: Vec<Vec<u32>>, per_run_hot: Vec<Vec<u32>>) -> Self {
        let runs = per_run_blocked.len() as u32;
        let iterations = per_run_blocked.first().map_or(0, Vec::len) as u32;
        let mean_across_runs = |series: &[Vec<u32>], t: usize| {
            series.iter().map(|run| run[t] as f64).sum::<f64>() / series.len() as f64
        };
        let blocked_series: Vec<f64> = (0..iterations as usize)
            .map(|t| mean_across_runs(&per_run_blocked, t))
            .collect();
        let hot_series: Vec<f64> = (0..iterations as usize)
            .map(|t| mean_across_runs(&per_run_hot, t))
            .collect();
        let mean = |s: &[f64]| {
            if s.is_empty() {
                0.0
            } else {
                s.iter().sum::<f64>() / s.len() as f64
            }
        };
        let avg_blocked = mean(&blocked_series);
        let avg_hot_cells = mean(&hot_series);
        let blocking_pct = if hosts > 0 {
            avg_blocked / hosts as f64 * 100.0
        } else {
            0.0
        };
        RunMetrics {
            hosts,
            iterations,
            runs,
            per_run_blocked,
            per_run_hot,
            blocked_series,
            hot_series,
            avg_blocked,
            avg_hot_cells,
            blocking_pct,
        }
    }
}

/// Initial uniform placement: `hosts / cells` per cell, with the remainder
/// assigned one extra host each to the lowest-numbered cells.
pub fn init_hosts(config: &SimConfig) -> Result<Vec<u32>> {
    config.validate()?;
    let cell_count = config.rows * config.cols;
    let base = config.hosts / cell_count as u32;
    let remainder = (config.hosts % cell_count as u32) as usize;
    Ok((0..cell_count)
        .map(|idx| base + u32::from(idx < remainder))
        .collect())
}

/// Moves every host one step. Hosts are processed cell-ascending and
/// host-index-ascending, so a fixed seed yields a fixed placement.
pub fn step_mobility<R: Rng>(
    placement: &[u32],
    topo: &Topology,
    mobility: MobilityModel,
    rng: &mut R,
) -> Vec<u32> {
    let mut next = vec![0u32; placement.len()];
    for (idx, &count) in placement.iter().enumerate() {
        let cell = CellId(idx + 1);
        for _ in 0..count {
            let dest = match mobility {
                MobilityModel::DirectionUniform => {
                    let slots = topo.direction_slots(cell).expect("valid cell");
                    match rng.random_range(0..=DIRECTIONS) {
                        d if d < DIRECTIONS => slots[d].unwrap_or(cell),
                        _ => cell,
                    }
                }
                MobilityModel::NeighborUniform => {
                    let neighbors = topo.neighbors(cell).expect("valid cell");
                    if neighbors.is_empty() {
                        cell
                    } else {
                        match rng.random_range(0..=neighbors.len()) {
                            0 => cell,
                            d => neighbors[d - 1],
                        }
                    }
                }
                MobilityModel::StayBiased(p) => {
                    if rng.random_bool(p) {
                        cell
                    } else {
                        let slots = topo.direction_slots(cell).expect("valid cell");
                        slots[rng.random_range(0..DIRECTIONS)].unwrap_or(cell)
                    }
                }
            };
            next[dest.index()] += 1;
        }
    }
    next
}

/// Recomputes blocked counts and, for the borrowing allocators, lets every
/// hot cell (ascending id) borrow against live neighbor state.
pub fn settle_allocation<R: Rng>(
    cells: &mut [CellState],
    ledger: &mut BorrowLedger,
    allocator: AllocatorKind,
    topo: &Topology,
    vga: &VgaParams,
    rng: &mut R,
) -> Result<IterationMetrics> {
    if !ledger.is_empty() {
        return Err(Error::LedgerInconsistency(
            "settle called while previous borrows are still active".into(),
        ));
    }
    for state in cells.iter_mut() {
        state.blocked = state.hosts.saturating_sub(state.available());
    }
    if allocator != AllocatorKind::Fca {
        for idx in 0..cells.len() {
            if cells[idx].blocked == 0 {
                continue;
            }
            let request = BorrowRequest::capture(cells, topo, CellId(idx + 1))?;
            let plan = match allocator {
                AllocatorKind::Sb => greedy_borrow(&request),
                AllocatorKind::Vga => vga_solve(&request, vga, rng),
                AllocatorKind::Fca => unreachable!(),
            };
            if plan.total_lent > 0 {
                ledger.apply(cells, &plan)?;
            }
        }
    }
    Ok(IterationMetrics {
        blocked_hosts: cells.iter().map(|c| c.blocked).sum(),
        hot_cells: cells.iter().filter(|c| c.blocked > 0).count() as u32,
    })
}

/// Returns every borrowed channel to its owner.
pub fn release_borrows(cells: &mut [CellState], ledger: &mut BorrowLedger) -> Result<()> {
    ledger.release_all(cells)
}

/// Snapshot handed to observers after each settled iteration.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub run: u32,
    /// 1-based iteration number.
    pub iteration: u32,
    pub cells: &'a [CellState],
    pub metrics: IterationMetrics,
}

/// Independent RNG streams for one run: mobility draws must not depend on
/// the allocator's own randomness, so that every allocator sees the same
/// placement sequence for a given seed.
fn run_streams(seed: u64, run: u32) -> (ChaCha8Rng, ChaCha8Rng) {
    let base = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run as u64));
    let mut mobility = base.clone();
    mobility.set_stream(0);
    let mut alloc = base;
    alloc.set_stream(1);
    (mobility, alloc)
}

/// Runs the configured number of independent runs and aggregates metrics.
pub fn run_simulation(config: &SimConfig) -> Result<RunMetrics> {
    run_simulation_observed(config, |_| {})
}

/// Like [`run_simulation`], invoking `observer` after every settled
/// iteration. Used by invariant checks and tests.
pub fn run_simulation_observed<F>(config: &SimConfig, mut observer: F) -> Result<RunMetrics>
where
    F: FnMut(&IterationView<'_>),
{
    config.validate()?;
    let topo = Topology::build(config.rows, config.cols)?;
    let mut per_run_blocked = Vec::with_capacity(config.runs as usize);
    let mut per_run_hot = Vec::with_capacity(config.runs as usize);
    for run in 0..config.runs {
        let (mut mobility_rng, mut alloc_rng) = run_streams(config.rng_seed, run);
        let mut placement = init_hosts(config)?;
        let mut cells: Vec<CellState> = placement
            .iter()
            .map(|&hosts| {
                let mut state = CellState::new(config.channels_per_cell);
                state.hosts = hosts;
                state
            })
            .collect();
        let mut ledger = BorrowLedger::new();
        let mut blocked_series = Vec::with_capacity(config.iterations as usize);
        let mut hot_series = Vec::with_capacity(config.iterations as usize);
        for iteration in 1..=config.iterations {
            release_borrows(&mut cells, &mut ledger)?;
            placement = step_mobility(&placement, &topo, config.mobility, &mut mobility_rng);
            for (state, &hosts) in cells.iter_mut().zip(&placement) {
                state.hosts = hosts;
            }
            let metrics = settle_allocation(
                &mut cells,
                &mut ledger,
                config.allocator,
                &topo,
                &config.vga,
                &mut alloc_rng,
            )?;
            blocked_series.push(metrics.blocked_hosts);
            hot_series.push(metrics.hot_cells);
            observer(&IterationView {
                run,
                iteration,
                cells: &cells,
                metrics,
            });
        }
        per_run_blocked.push(blocked_series);
        per_run_hot.push(hot_series);
    }
    Ok(RunMetrics::from_series(
        config.hosts,
        per_run_blocked,
        per_run_hot,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_distribution_spreads_hosts_evenly() {
        let config = SimConfig {
            hosts: 200,
            ..SimConfig::default()
        };
        assert_eq!(init_hosts(&config).unwrap(), vec![8; 25]);
    }

    #[test]
    fn empty_network_has_no_hosts() {
        let config = SimConfig {
            hosts: 0,
            ..SimConfig::default()
        };
        assert_eq!(init_hosts(&config).unwrap(), vec![0; 25]);
    }

    #[test]
    fn remainder_hosts_go_to_the_lowest_numbered_cells() {
        let config = SimConfig {
            hosts: 210,
            ..SimConfig::default()
        };
        let placement = init_hosts(&config).unwrap();
        assert!(placement[..10].iter().all(|&h| h == 9));
        assert!(placement[10..].iter().all(|&h| h == 8));
        assert_eq!(placement.iter().sum::<u32>(), 210);
    }

    #[test]
    fn overfull_network_is_rejected() {
        let config = SimConfig {
            hosts: 300,
            ..SimConfig::default()
        };
        assert!(matches!(
            init_hosts(&config),
            Err(Error::TooManyHosts {
                hosts: 300,
                max: 250,
                ..
            })
        ));
    }

    #[test]
    fn mobility_on_a_single_cell_grid_is_identity() {
        use rand::SeedableRng;
        let topo = Topology::build(1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for mobility in [
            MobilityModel::DirectionUniform,
            MobilityModel::NeighborUniform,
            MobilityModel::StayBiased(0.5),
        ] {
            assert_eq!(step_mobility(&[37], &topo, mobility, &mut rng), vec![37]);
        }
    }

    #[test]
    fn mobility_step_matches_golden_vector() {
        use rand::SeedableRng;
        let golden: Vec<u32> = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/tests/golden/mobility_5x5_200_seed42.csv"
        ))
        .unwrap()
        .trim()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
        let config = SimConfig {
            hosts: 200,
            ..SimConfig::default()
        };
        let topo = Topology::build(5, 5).unwrap();
        let placement = init_hosts(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let after = step_mobility(&placement, &topo, config.mobility, &mut rng);
        assert_eq!(after, golden);
    }

    fn settle_with(
        allocator: AllocatorKind,
        cells: &mut [CellState],
        topo: &Topology,
    ) -> IterationMetrics {
        use rand::SeedableRng;
        let mut ledger = BorrowLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        settle_allocation(cells, &mut ledger, allocator, topo, &VgaParams::default(), &mut rng)
            .unwrap()
    }

    #[test]
    fn fca_settle_blocks_demand_beyond_capacity() {
        let topo = Topology::build(5, 5).unwrap();
        let mut cells = vec![CellState::new(10); 25];
        cells[0].hosts = 17;
        let metrics = settle_with(AllocatorKind::Fca, &mut cells, &topo);
        assert_eq!(cells[0].blocked, 7);
        assert_eq!(cells[0].free_channels(), 0);
        assert_eq!(metrics.blocked_hosts, 7);
        assert_eq!(metrics.hot_cells, 1);
    }

    #[test]
    fn settle_without_demand_is_quiet() {
        let topo = Topology::build(5, 5).unwrap();
        let mut cells = vec![CellState::new(10); 25];
        for (idx, state) in cells.iter_mut().enumerate() {
            state.hosts = (idx % 10) as u32;
        }
        let metrics = settle_with(AllocatorKind::Vga, &mut cells, &topo);
        assert_eq!(metrics.blocked_hosts, 0);
        assert_eq!(metrics.hot_cells, 0);
        assert!(cells.iter().all(|c| c.borrowed_in == 0 && c.lent_out == 0));
    }

    #[test]
    fn genetic_settle_borrows_five_channels_for_the_sample_neighborhood() {
        // Cell 17 needs 5; its neighbors (16, 22, 23, 18, 13, 12 in
        // anticlockwise order) hold the free profile [1, 6, 0, 0, 5, 0].
        let topo = Topology::build(5, 5).unwrap();
        let mut cells = vec![CellState::new(10); 25];
        for state in cells.iter_mut() {
            state.hosts = 10;
        }
        cells[16].hosts = 15;
        cells[15].hosts = 9;
        cells[21].hosts = 4;
        cells[12].hosts = 5;
        let metrics = settle_with(AllocatorKind::Vga, &mut cells, &topo);
        assert_eq!(cells[16].blocked, 0);
        assert_eq!(cells[16].borrowed_in, 5);
        assert_eq!(metrics.blocked_hosts, 0);
        // The loan is drawn from the two rich neighbors, levelled.
        assert_eq!(cells[21].lent_out, 3);
        assert_eq!(cells[12].lent_out, 2);
        assert_eq!(cells[15].lent_out, 0);
    }

    #[test]
    fn release_restores_owned_capacity_everywhere() {
        use rand::SeedableRng;
        let topo = Topology::build(5, 5).unwrap();
        let mut cells = vec![CellState::new(10); 25];
        for state in cells.iter_mut() {
            state.hosts = 10;
        }
        cells[16].hosts = 15;
        cells[21].hosts = 4;
        cells[12].hosts = 5;
        let mut ledger = BorrowLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        settle_allocation(
            &mut cells,
            &mut ledger,
            AllocatorKind::Sb,
            &topo,
            &VgaParams::default(),
            &mut rng,
        )
        .unwrap();
        assert!(cells.iter().any(|c| c.lent_out > 0));
        release_borrows(&mut cells, &mut ledger).unwrap();
        assert!(cells.iter().all(|c| c.available() == c.owned_capacity));
    }

    #[test]
    fn settle_refuses_to_run_with_active_borrows() {
        use rand::SeedableRng;
        let topo = Topology::build(5, 5).unwrap();
        let mut cells = vec![CellState::new(10); 25];
        for state in cells.iter_mut() {
            state.hosts = 10;
        }
        cells[16].hosts = 12;
        cells[21].hosts = 4;
        let mut ledger = BorrowLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        settle_allocation(
            &mut cells,
            &mut ledger,
            AllocatorKind::Sb,
            &topo,
            &VgaParams::default(),
            &mut rng,
        )
        .unwrap();
        assert!(matches!(
            settle_allocation(
                &mut cells,
                &mut ledger,
                AllocatorKind::Sb,
                &topo,
                &VgaParams::default(),
                &mut rng,
            ),
            Err(Error::LedgerInconsistency(_))
        ));
    }

    #[test]
    fn same_seed_reproduces_metrics_bit_for_bit() {
        let config = SimConfig {
            hosts: 240,
            runs: 3,
            iterations: 8,
            ..SimConfig::default()
        };
        assert_eq!(run_simulation(&config).unwrap(), run_simulation(&config).unwrap());
    }

    #[test]
    fn empty_network_yields_zero_metrics() {
        let config = SimConfig {
            hosts: 0,
            runs: 2,
            iterations: 4,
            ..SimConfig::default()
        };
        let metrics = run_simulation(&config).unwrap();
        assert_eq!(metrics.avg_blocked, 0.0);
        assert_eq!(metrics.avg_hot_cells, 0.0);
        assert_eq!(metrics.blocking_pct, 0.0);
        assert!(metrics.per_run_blocked.iter().flatten().all(|&b| b == 0));
    }

    #[test]
    fn borrowing_never_blocks_more_than_fca_on_the_same_placements() {
        for allocator in [AllocatorKind::Sb, AllocatorKind::Vga] {
            let fca = run_simulation(&SimConfig {
                hosts: 245,
                runs: 3,
                allocator: AllocatorKind::Fca,
                ..SimConfig::default()
            })
            .unwrap();
            let other = run_simulation(&SimConfig {
                hosts: 245,
                runs: 3,
                allocator,
                ..SimConfig::default()
            })
            .unwrap();
            for (fca_run, other_run) in fca.per_run_blocked.iter().zip(&other.per_run_blocked) {
                for (f, o) in fca_run.iter().zip(other_run) {
                    assert!(o <= f, "{allocator} blocked {o} > fca {f}");
                }
            }
        }
    }

    #[test]
    fn averages_recompute_from_the_recorded_series() {
        let metrics = run_simulation(&SimConfig {
            hosts: 230,
            runs: 4,
            iterations: 6,
            allocator: AllocatorKind::Sb,
            ..SimConfig::default()
        })
        .unwrap();
        for (t, &mean) in metrics.blocked_series.iter().enumerate() {
            let recomputed = metrics
                .per_run_blocked
                .iter()
                .map(|run| run[t] as f64)
                .sum::<f64>()
                / metrics.runs as f64;
            assert!((mean - recomputed).abs() < 1e-12);
        }
        let grand = metrics.blocked_series.iter().sum::<f64>() / metrics.iterations as f64;
        assert!((metrics.avg_blocked - grand).abs() < 1e-12);
        assert!(
            (metrics.blocking_pct - metrics.avg_blocked / 230.0 * 100.0).abs() < 1e-12
        );
    }

    #[test]
    fn allocator_tokens_round_trip() {
        for allocator in AllocatorKind::ALL {
            assert_eq!(allocator.token().parse::<AllocatorKind>().unwrap(), allocator);
        }
        assert!(matches!(
            "dsa".parse::<AllocatorKind>(),
            Err(Error::UnknownAllocator(_))
        ));
    }

    #[test]
    fn invalid_stay_probability_is_rejected() {
        let config = SimConfig {
            mobility: MobilityModel::StayBiased(1.5),
            ..SimConfig::default()
        };
        assert!(matches!(config.validate(), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn mobility_conserves_hosts(
            rows in 1usize..7,
            cols in 1usize..7,
            hosts in 0u32..120,
            seed in 0u64..500,
            model in prop::sample::select(vec![
                MobilityModel::DirectionUniform,
                MobilityModel::NeighborUniform,
                MobilityModel::StayBiased(0.3),
                MobilityModel::StayBiased(0.88),
            ]),
        ) {
            use rand::SeedableRng;
            let topo = Topology::build(rows, cols).unwrap();
            let cell_count = rows * cols;
            let base = hosts / cell_count as u32;
            let rem = (hosts % cell_count as u32) as usize;
            let placement: Vec<u32> = (0..cell_count)
                .map(|idx| base + u32::from(idx < rem))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut current = placement;
            for _ in 0..4 {
                current = step_mobility(&current, &topo, model, &mut rng);
                prop_assert_eq!(current.iter().sum::<u32>(), hosts);
            }
        }
    }
}
