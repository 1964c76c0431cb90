//! Vector genetic algorithm over borrowing plans.
//!
//! A candidate borrowing decision is a [`Member`]: a 7x4 integer matrix whose
//! first row describes the requesting cell and whose remaining rows describe
//! its (up to six) neighbors, each as `(free, blocked, hosts, cell_type)`.
//! Rows for absent neighbors are zero-padded. Candidates only ever differ
//! from the original request in the neighbor `free` column: lowering a
//! neighbor's free count by `k` means borrowing `k` channels from it.
//!
//! The search is deliberately restrictive so that every operator maps
//! feasible members to feasible members:
//!
//! * seeding enumerates single-neighbor loans (`k = 1..=min(need, free)`)
//!   plus a no-borrow identity member;
//! * crossover has one fixed cut point after the requester row and merges
//!   two parents by taking the lower free value per neighbor row, i.e. the
//!   bigger loan, clipping if the merge would over-serve the request;
//! * mutation perturbs only the fitness score with a small uniform noise
//!   term, never the genes.
//!
//! Each generation removes both parents and re-inserts their single child,
//! so the population shrinks by one until a termination condition fires.
//! `brute_force_oracle` provides an independent exhaustive check for small
//! instances.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::allocators::{BorrowPlan, BorrowRequest, MAX_LENDERS};
use crate::error::{Error, Result};
use crate::sim::CellState;
use crate::topology::{CellId, Topology};

/// Rows in a member matrix: the requester plus up to six neighbors.
pub const MEMBER_ROWS: usize = 1 + MAX_LENDERS;

/// Fitness score assigned to infeasible members so they are never selected.
pub const PRUNED_FITNESS: f64 = f64::NEG_INFINITY;

/// Cap on the lending-vector count `brute_force_oracle` will enumerate.
pub const ORACLE_COMBINATION_LIMIT: u64 = 10_000_000;

/// One row of a member matrix; the four genes of the encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Chromosome {
    /// Free channels (the only gene the search mutates, via borrowing).
    pub free: u32,
    /// Blocked hosts; on the requester row this is the unmet need.
    pub blocked: u32,
    /// Hosts currently in the cell.
    pub hosts: u32,
    /// Cell type 0..=4 (6 minus the neighbor count).
    pub cell_type: u32,
}

/// A population member: the 7x4 matrix plus the bookkeeping needed to tell
/// how much each row lends relative to the original request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    rows: [Chromosome; MEMBER_ROWS],
    /// The original request's free column; row j lends
    /// `original_free[j] - rows[j].free`.
    original_free: [u32; MEMBER_ROWS],
    /// The original request's need (requester blocked count).
    original_need: u32,
    /// True for zero-padded rows of absent neighbors.
    padded: [bool; MEMBER_ROWS],
}

impl Member {
    /// Builds a member and validates every invariant: padded rows all zero,
    /// no row lending more than the original free count, requester blocked
    /// consistent with the total loan.
    pub fn new(
        rows: [Chromosome; MEMBER_ROWS],
        original_free: [u32; MEMBER_ROWS],
        original_need: u32,
        padded: [bool; MEMBER_ROWS],
    ) -> Result<Member> {
        let member = Member {
            rows,
            original_free,
            original_need,
            padded,
        };
        member.check_invariants()?;
        Ok(member)
    }

    /// Encodes a borrow request as the all-original (no borrowing yet)
    /// member.
    pub fn from_request(request: &BorrowRequest) -> Member {
        let mut rows = [Chromosome::default(); MEMBER_ROWS];
        let mut original_free = [0u32; MEMBER_ROWS];
        let mut padded = [false; MEMBER_ROWS];
        rows[0] = Chromosome {
            free: request.requester_free,
            blocked: request.need,
            hosts: request.requester_hosts,
            cell_type: request.requester_type,
        };
        original_free[0] = request.requester_free;
        for (j, slot) in request.lenders.iter().enumerate() {
            match slot.cell {
                Some(_) => {
                    rows[j + 1] = Chromosome {
                        free: slot.free,
                        blocked: slot.blocked,
                        hosts: slot.hosts,
                        cell_type: slot.cell_type,
                    };
                    original_free[j + 1] = slot.free;
                }
                None => padded[j + 1] = true,
            }
        }
        Member {
            rows,
            original_free,
            original_need: request.need,
            padded,
        }
    }

    /// A copy of `original` lending `lend[j]` channels from neighbor row
    /// `j + 1`. The requester row's blocked count becomes the residual need.
    pub fn with_lending(original: &Member, lend: &[u32; MAX_LENDERS]) -> Member {
        let mut member = original.clone();
        let mut total = 0u32;
        for (j, &k) in lend.iter().enumerate() {
            debug_assert!(k <= original.rows[j + 1].free || original.padded[j + 1]);
            member.rows[j + 1].free = original.rows[j + 1].free - k;
            total += k;
        }
        debug_assert!(total <= original.original_need);
        member.rows[0].blocked = original.original_need - total;
        member
    }

    pub fn rows(&self) -> &[Chromosome; MEMBER_ROWS] {
        &self.rows
    }

    pub fn requester(&self) -> &Chromosome {
        &self.rows[0]
    }

    pub fn is_padded(&self, row: usize) -> bool {
        self.padded[row]
    }

    pub fn original_free(&self) -> &[u32; MEMBER_ROWS] {
        &self.original_free
    }

    pub fn original_need(&self) -> u32 {
        self.original_need
    }

    /// Channels still missing after this member's borrowing.
    pub fn residual_blocked(&self) -> u32 {
        self.rows[0].blocked
    }

    /// Channels row `j` lends (original free minus current free).
    pub fn lent(&self, row: usize) -> u32 {
        self.original_free[row] - self.rows[row].free
    }

    /// Total channels borrowed across all neighbor rows.
    pub fn total_lent(&self) -> u32 {
        (1..MEMBER_ROWS).map(|j| self.lent(j)).sum()
    }

    /// Non-padded neighbor rows as `(row_index, chromosome)`.
    pub fn neighbor_rows(&self) -> impl Iterator<Item = (usize, &Chromosome)> {
        self.rows
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(j, _)| !self.padded[*j])
    }

    /// Validates all member invariants.
    pub fn check_invariants(&self) -> Result<()> {
        if self.padded[0] {
            return Err(Error::InvalidMember("requester row cannot be padded".into()));
        }
        let mut total = 0u32;
        for j in 1..MEMBER_ROWS {
            let row = &self.rows[j];
            if self.padded[j] {
                if *row != Chromosome::default() || self.original_free[j] != 0 {
                    return Err(Error::InvalidMember(format!(
                        "padded row {j} carries non-zero genes"
                    )));
                }
                continue;
            }
            if row.free > self.original_free[j] {
                return Err(Error::InvalidMember(format!(
                    "row {j} has more free channels ({}) than the original request ({})",
                    row.free, self.original_free[j]
                )));
            }
            if row.cell_type > 4 {
                return Err(Error::InvalidMember(format!(
                    "row {j} has cell type {} outside 0..=4",
                    row.cell_type
                )));
            }
            total += self.original_free[j] - row.free;
        }
        if self.rows[0].cell_type > 4 {
            return Err(Error::InvalidMember(
                "requester cell type outside 0..=4".into(),
            ));
        }
        if total > self.original_need {
            return Err(Error::InvalidMember(format!(
                "total loan {total} exceeds the original need {}",
                self.original_need
            )));
        }
        if self.rows[0].blocked != self.original_need - total {
            return Err(Error::InvalidMember(format!(
                "requester blocked {} inconsistent with need {} minus loan {total}",
                self.rows[0].blocked, self.original_need
            )));
        }
        Ok(())
    }

    /// Decodes this member into a plan against the request it came from.
    pub fn to_plan(&self, request: &BorrowRequest) -> BorrowPlan {
        let mut lent = [0u32; MAX_LENDERS];
        for (j, k) in lent.iter_mut().enumerate() {
            if !self.padded[j + 1] {
                *k = self.lent(j + 1);
            }
        }
        BorrowPlan::new(request, lent)
    }
}

/// Fitness weights. The four terms are of strictly decreasing magnitude:
/// `alpha` rewards serving the request, `beta` penalizes borrowing from
/// crowded cells, `mu` penalizes borrowing from high-type (edge) cells, and
/// `gamma_max` bounds the random noise used to break ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessWeights {
    alpha: f64,
    beta: f64,
    mu: f64,
    gamma_max: f64,
}

impl FitnessWeights {
    pub fn new(alpha: f64, beta: f64, mu: f64, gamma_max: f64) -> Result<FitnessWeights> {
        let ordered = alpha > beta && beta > mu && mu > gamma_max && gamma_max > 0.0;
        if !ordered || !alpha.is_finite() {
            return Err(Error::Config(format!(
                "fitness weights must satisfy alpha > beta > mu > gamma-max > 0 \
                 (got alpha={alpha}, beta={beta}, mu={mu}, gamma-max={gamma_max})"
            )));
        }
        Ok(FitnessWeights {
            alpha,
            beta,
            mu,
            gamma_max,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }
}

impl Default for FitnessWeights {
    fn default() -> Self {
        FitnessWeights {
            alpha: 0.1,
            beta: 0.01,
            mu: 0.001,
            gamma_max: 0.0001,
        }
    }
}

/// Whether the fitness noise term applies to every evaluation or only to
/// crossover children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMode {
    #[default]
    EveryEvaluation,
    ChildrenOnly,
}

/// Knobs of the genetic search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgaParams {
    pub weights: FitnessWeights,
    /// Hard guard on generations; termination conditions normally fire much
    /// earlier (the population shrinks by one per generation).
    pub max_generations: u32,
    pub gamma_mode: GammaMode,
}

impl Default for VgaParams {
    fn default() -> Self {
        VgaParams {
            weights: FitnessWeights::default(),
            max_generations: 100,
            gamma_mode: GammaMode::default(),
        }
    }
}

/// A member together with its (noise-included) fitness score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredMember {
    pub member: Member,
    pub fitness: f64,
}

/// Encodes a hot cell and its neighborhood as the original request member.
pub fn encode_request(cells: &[CellState], topo: &Topology, cell: CellId) -> Result<Member> {
    Ok(Member::from_request(&BorrowRequest::capture(
        cells, topo, cell,
    )?))
}

/// Initial population: for every neighbor row `j` and every loan size
/// `k = 1..=min(need, free_j)` one member borrowing exactly `k` channels
/// from `j` alone, plus the no-borrow identity member.
pub fn seed_population(original: &Member) -> Vec<Member> {
    let need = original.original_need();
    let mut population = Vec::new();
    for j in 0..MAX_LENDERS {
        if original.is_padded(j + 1) {
            continue;
        }
        let cap = original.rows()[j + 1].free.min(need);
        for k in 1..=cap {
            let mut lend = [0u32; MAX_LENDERS];
            lend[j] = k;
            population.push(Member::with_lending(original, &lend));
        }
    }
    population.push(Member::with_lending(original, &[0; MAX_LENDERS]));
    population
}

/// Deterministic part of the fitness score: summed over non-padded neighbor
/// rows, free channels left after borrowing plus `alpha` times the channels
/// borrowed, minus `beta` times the cell population and `mu` times the cell
/// type, minus the residual unmet need. Members that serve more of the need
/// therefore always outrank members that serve less; the weighted terms
/// shape ties. Infeasible members score [`PRUNED_FITNESS`].
pub fn deterministic_fitness(member: &Member, weights: &FitnessWeights) -> f64 {
    if member.check_invariants().is_err() {
        return PRUNED_FITNESS;
    }
    let mut score = 0.0;
    for (j, row) in member.neighbor_rows() {
        score += row.free as f64;
        score += weights.alpha() * member.lent(j) as f64;
        score -= weights.beta() * row.hosts as f64;
        score -= weights.mu() * row.cell_type as f64;
    }
    score - member.residual_blocked() as f64
}

/// Full fitness: the deterministic score plus a uniform noise draw from
/// `[0, gamma_max)`. The noise affects only the score, never the genes.
pub fn fitness<R: Rng>(member: &Member, weights: &FitnessWeights, rng: &mut R) -> f64 {
    let noise = rng.random::<f64>() * weights.gamma_max();
    let base = deterministic_fitness(member, weights);
    if base == PRUNED_FITNESS {
        base
    } else {
        base + noise
    }
}

/// Single-cut-point crossover. The cut sits after the requester row; for
/// every neighbor row the child takes the lower of the parents' free values
/// (the larger loan). The requester row's blocked count becomes the original
/// need minus the merged loan. A merge that strictly over-serves the need is
/// repaired by re-leveling the whole loan across the request's lenders (see
/// [`water_fill`]), so no lender is drained further than necessary. Columns
/// other than `free` are copied from the original request. Produces exactly
/// one child.
pub fn crossover(a: &Member, b: &Member, original: &Member) -> Result<Member> {
    for (name, parent) in [("first", a), ("second", b)] {
        if parent.padded != original.padded
            || parent.original_free != original.original_free
            || parent.original_need != original.original_need
        {
            return Err(Error::MismatchedParents(format!(
                "{name} parent was not derived from this request"
            )));
        }
        parent.check_invariants()?;
    }
    let mut lend = [0u32; MAX_LENDERS];
    for (j, k) in lend.iter_mut().enumerate() {
        if !original.padded[j + 1] {
            let merged_free = a.rows[j + 1].free.min(b.rows[j + 1].free);
            *k = original.rows[j + 1].free - merged_free;
        }
    }
    if lend.iter().sum::<u32>() > original.original_need {
        lend = water_fill(original, None);
    }
    Ok(Member::with_lending(original, &lend))
}

/// Levels a loan of up to the original need across the request's lenders:
/// one channel at a time from the row with the most free channels left.
/// Rich lenders are drained down to a common level and poor lenders below
/// that level are left alone. Ties go to the lowest lender cell id when ids
/// are given, otherwise to the lowest row index.
fn water_fill(
    original: &Member,
    lender_ids: Option<&[Option<CellId>; MAX_LENDERS]>,
) -> [u32; MAX_LENDERS] {
    let mut remaining: [u32; MAX_LENDERS] = core::array::from_fn(|j| {
        if original.padded[j + 1] {
            0
        } else {
            original.rows[j + 1].free
        }
    });
    let tie_rank = |j: usize| match lender_ids {
        Some(ids) => ids[j].map_or(usize::MAX, |cell| cell.0),
        None => j,
    };
    let mut lend = [0u32; MAX_LENDERS];
    for _ in 0..original.original_need {
        let Some(pick) = (0..MAX_LENDERS)
            .filter(|&j| remaining[j] > 0)
            .max_by_key(|&j| (remaining[j], std::cmp::Reverse(tie_rank(j))))
        else {
            break;
        };
        remaining[pick] -= 1;
        lend[pick] += 1;
    }
    lend
}

/// Per-solve diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveStats {
    pub initial_population: usize,
    pub generations: u32,
}

/// Runs the genetic search and decodes the fittest member into a borrow
/// plan.
pub fn vga_solve<R: Rng>(request: &BorrowRequest, params: &VgaParams, rng: &mut R) -> BorrowPlan {
    vga_solve_traced(request, params, rng).0
}

/// [`vga_solve`] with generation-count diagnostics.
///
/// Each generation crosses the two fittest members (by cached, noise-included
/// fitness), removes them and re-inserts their child, then checks the
/// termination conditions: the recombined population's fittest member needs
/// nothing more (that member is returned), population down to one, population
/// of two identical members, or the generation guard. A child that fails the
/// fitness test (pruned as infeasible) is discarded and the fitter parent is
/// re-inserted instead, so the population still shrinks by one per generation
/// and the search always terminates.
///
/// A child that fully serves the need is re-leveled across all lenders
/// before re-insertion ([`water_fill`] with cell-id ties): its loan total and
/// therefore its fitness are unchanged, but no lender is drained deeper than
/// the borrowing level requires.
pub fn vga_solve_traced<R: Rng>(
    request: &BorrowRequest,
    params: &VgaParams,
    rng: &mut R,
) -> (BorrowPlan, SolveStats) {
    let original = Member::from_request(request);
    let seeds = seed_population(&original);
    let initial_population = seeds.len();
    let mut population: Vec<ScoredMember> = seeds
        .into_iter()
        .map(|member| {
            let fitness = match params.gamma_mode {
                GammaMode::EveryEvaluation => fitness(&member, &params.weights, rng),
                GammaMode::ChildrenOnly => deterministic_fitness(&member, &params.weights),
            };
            ScoredMember { member, fitness }
        })
        .collect();
    let lender_ids: [Option<CellId>; MAX_LENDERS] =
        core::array::from_fn(|i| request.lenders[i].cell);
    let mut generations = 0u32;
    while population.len() >= 2 && generations < params.max_generations {
        let (first, second) = top_two(&population);
        let mut child = crossover(
            &population[first].member,
            &population[second].member,
            &original,
        )
        .expect("population members share the original request");
        if child.residual_blocked() == 0 {
            child = Member::with_lending(&original, &water_fill(&original, Some(&lender_ids)));
        }
        let child_fitness = fitness(&child, &params.weights, rng);
        let replacement = if child_fitness == PRUNED_FITNESS {
            population[first].clone()
        } else {
            ScoredMember {
                member: child,
                fitness: child_fitness,
            }
        };
        let (hi, lo) = if first > second {
            (first, second)
        } else {
            (second, first)
        };
        population.remove(hi);
        population.remove(lo);
        generations += 1;
        let served_in_full = replacement.member.residual_blocked() == 0;
        population.push(replacement);
        if served_in_full {
            let member = &population.last().unwrap().member;
            return (
                member.to_plan(request),
                SolveStats {
                    initial_population,
                    generations,
                },
            );
        }
        if population.len() == 2 && population[0].member == population[1].member {
            break;
        }
    }
    let best = rank_best(&population);
    (
        population[best].member.to_plan(request),
        SolveStats {
            initial_population,
            generations,
        },
    )
}

/// Index of the fittest member; ties go to the earliest inserted.
fn rank_best(population: &[ScoredMember]) -> usize {
    let mut best = 0;
    for (idx, candidate) in population.iter().enumerate().skip(1) {
        if candidate.fitness > population[best].fitness {
            best = idx;
        }
    }
    best
}

/// Indices of the two fittest members (ties by insertion order).
fn top_two(population: &[ScoredMember]) -> (usize, usize) {
    debug_assert!(population.len() >= 2);
    let first = rank_best(population);
    let mut second = usize::MAX;
    for (idx, candidate) in population.iter().enumerate() {
        if idx == first {
            continue;
        }
        if second == usize::MAX || candidate.fitness > population[second].fitness {
            second = idx;
        }
    }
    (first, second)
}

/// Exhaustively enumerates every lending vector `0 <= lent_j <= free_j` with
/// total at most the need, and returns the vector maximizing the
/// deterministic fitness (ties: lexicographically smallest vector) together
/// with its score. Errs when the search box exceeds
/// [`ORACLE_COMBINATION_LIMIT`].
pub fn brute_force_oracle(
    request: &BorrowRequest,
    weights: &FitnessWeights,
) -> Result<(BorrowPlan, f64)> {
    let original = Member::from_request(request);
    let combinations: u128 = original
        .neighbor_rows()
        .map(|(_, row)| row.free as u128 + 1)
        .product();
    if combinations > ORACLE_COMBINATION_LIMIT as u128 {
        return Err(Error::OracleUnavailable {
            combinations,
            limit: ORACLE_COMBINATION_LIMIT,
        });
    }
    let need = original.original_need();
    let caps: [u32; MAX_LENDERS] =
        core::array::from_fn(|j| if original.is_padded(j + 1) { 0 } else { original.rows()[j + 1].free });
    let mut lend = [0u32; MAX_LENDERS];
    let mut best: Option<([u32; MAX_LENDERS], f64)> = None;
    loop {
        if lend.iter().sum::<u32>() <= need {
            let member = Member::with_lending(&original, &lend);
            let score = deterministic_fitness(&member, weights);
            if best.as_ref().is_none_or(|(_, s)| score > *s) {
                best = Some((lend, score));
            }
        }
        // Odometer in lexicographic order: the last slot spins fastest, so
        // the first strict improvement is the lexicographically smallest
        // optimum.
        let mut pos = MAX_LENDERS;
        loop {
            if pos == 0 {
                let (vector, score) = best.expect("zero vector is always evaluated");
                let member = Member::with_lending(&original, &vector);
                return Ok((member.to_plan(request), score));
            }
            pos -= 1;
            if lend[pos] < caps[pos] {
                lend[pos] += 1;
                lend[pos + 1..].fill(0);
                break;
            }
        }
    }
}

/// Size bound of the full solution space when every neighbor can lend up to
/// `n` channels: `(5 n^2)^7`, as an arbitrary-precision integer.
pub fn solution_space_bound(n: u64) -> BigUint {
    (BigUint::from(n) * n * 5u32).pow(7)
}

/// Iteration budget within which an efficient genetic search is expected to
/// converge: `r^m / m - 1` for population size `m` and branching base `r`.
/// Reported as a diagnostic; never used as the loop guard.
pub fn efficiency_budget(population: u32, branching: u32) -> f64 {
    let power = BigUint::from(branching).pow(population);
    power.to_f64().unwrap_or(f64::INFINITY) / population as f64 - 1.0
}
