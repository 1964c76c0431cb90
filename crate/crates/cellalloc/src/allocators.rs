//! Baseline allocation strategies and the borrow-ledger primitives shared by
//! every borrowing path.
//!
//! `fca_blocked` is the no-borrowing benchmark. `greedy_borrow` is the simple
//! borrowing heuristic: one channel at a time from whichever neighbor
//! currently has the most free channels. Both the heuristic and the genetic
//! search produce a [`BorrowPlan`] that is applied to live cell state through
//! the [`BorrowLedger`], which records every transfer so it can be reverted
//! at the start of the next iteration.

use crate::error::{Error, Result};
use crate::sim::CellState;
use crate::topology::{CellId, Topology, DIRECTIONS};

/// Maximum number of lender slots in a request (one per hex direction).
pub const MAX_LENDERS: usize = DIRECTIONS;

/// One potential lender in a borrow request. Padding slots (absent
/// neighbors) carry `cell: None` and all-zero counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LenderSlot {
    pub cell: Option<CellId>,
    pub free: u32,
    pub blocked: u32,
    pub hosts: u32,
    pub cell_type: u32,
}

/// A hot cell's snapshot of itself and its neighborhood, taken against live
/// state at the moment the request is issued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorrowRequest {
    pub requester: CellId,
    /// Channels still needed; equals the requester's blocked-host count.
    pub need: u32,
    pub requester_free: u32,
    pub requester_hosts: u32,
    pub requester_type: u32,
    /// Neighbors in anticlockwise order starting from the left neighbor,
    /// padded to six slots.
    pub lenders: [LenderSlot; MAX_LENDERS],
}

impl BorrowRequest {
    /// Snapshots the neighborhood of a hot cell. Refuses cells without
    /// blocked hosts.
    pub fn capture(cells: &[CellState], topo: &Topology, cell: CellId) -> Result<BorrowRequest> {
        let requester = &cells[cell.index()];
        if requester.blocked == 0 {
            return Err(Error::CellNotHot { cell });
        }
        let mut lenders = [LenderSlot::default(); MAX_LENDERS];
        for (slot, &n) in lenders.iter_mut().zip(topo.neighbors(cell)?) {
            let state = &cells[n.index()];
            *slot = LenderSlot {
                cell: Some(n),
                free: state.free_channels(),
                blocked: state.blocked,
                hosts: state.hosts,
                cell_type: topo.cell_type(n)? as u32,
            };
        }
        Ok(BorrowRequest {
            requester: cell,
            need: requester.blocked,
            requester_free: requester.free_channels(),
            requester_hosts: requester.hosts,
            requester_type: topo.cell_type(cell)? as u32,
            lenders,
        })
    }

    /// Total free channels across all lender slots.
    pub fn lendable(&self) -> u32 {
        self.lenders.iter().map(|l| l.free).sum()
    }
}

/// A resolved borrowing decision: how many channels each lender slot gives
/// up and how much of the request remains unserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorrowPlan {
    pub requester: CellId,
    /// Channels lent per slot, aligned with the request's lender order.
    pub lent: [u32; MAX_LENDERS],
    /// Lender cell ids, aligned with `lent`; `None` on padding slots.
    pub lenders: [Option<CellId>; MAX_LENDERS],
    pub total_lent: u32,
    pub residual_blocked: u32,
}

impl BorrowPlan {
    /// A plan lending the given amounts per slot of `request`.
    pub fn new(request: &BorrowRequest, lent: [u32; MAX_LENDERS]) -> BorrowPlan {
        let total_lent: u32 = lent.iter().sum();
        debug_assert!(total_lent <= request.need);
        debug_assert!(lent
            .iter()
            .zip(&request.lenders)
            .all(|(&k, slot)| k <= slot.free));
        BorrowPlan {
            requester: request.requester,
            lent,
            lenders: core::array::from_fn(|i| request.lenders[i].cell),
            total_lent,
            residual_blocked: request.need - total_lent,
        }
    }

    /// Plan that lends nothing.
    pub fn empty(request: &BorrowRequest) -> BorrowPlan {
        BorrowPlan::new(request, [0; MAX_LENDERS])
    }

    /// (lender, amount) pairs for slots that actually lend.
    pub fn transfers(&self) -> impl Iterator<Item = (CellId, u32)> + '_ {
        self.lenders
            .iter()
            .zip(&self.lent)
            .filter_map(|(&cell, &k)| match (cell, k) {
                (Some(cell), k) if k > 0 => Some((cell, k)),
                _ => None,
            })
    }
}

/// Blocked hosts under fixed channel allocation: demand beyond capacity.
pub fn fca_blocked(hosts: u32, capacity: u32) -> u32 {
    hosts.saturating_sub(capacity)
}

/// Greedy borrowing: one channel at a time from the lender with the most
/// free channels (ties go to the lowest cell id) until the need is met or
/// every lender is dry.
pub fn greedy_borrow(request: &BorrowRequest) -> BorrowPlan {
    let mut remaining = [0u32; MAX_LENDERS];
    for (r, slot) in remaining.iter_mut().zip(&request.lenders) {
        *r = slot.free;
    }
    let mut lent = [0u32; MAX_LENDERS];
    for _ in 0..request.need {
        let pick = (0..MAX_LENDERS)
            .filter(|&i| request.lenders[i].cell.is_some() && remaining[i] > 0)
            .max_by(|&a, &b| {
                remaining[a]
                    .cmp(&remaining[b])
                    .then_with(|| request.lenders[b].cell.cmp(&request.lenders[a].cell))
            });
        match pick {
            Some(i) => {
                remaining[i] -= 1;
                lent[i] += 1;
            }
            None => break,
        }
    }
    BorrowPlan::new(request, lent)
}

#[derive(Debug, Clone)]
struct LedgerEntry {
    requester: CellId,
    total: u32,
    transfers: Vec<(CellId, u32)>,
}

/// Records applied borrow plans so they can be reverted wholesale. All
/// channel transfers go through the ledger; releasing restores every cell to
/// its owned capacity.
#[derive(Debug, Default)]
pub struct BorrowLedger {
    active: Vec<LedgerEntry>,
}

impl BorrowLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Applies a plan to live state after re-validating feasibility: every
    /// lender must still hold the promised free channels, and a requester may
    /// hold at most one active loan.
    pub fn apply(&mut self, cells: &mut [CellState], plan: &BorrowPlan) -> Result<()> {
        if self.active.iter().any(|e| e.requester == plan.requester) {
            return Err(Error::DuplicateBorrow {
                requester: plan.requester,
            });
        }
        let transfers: Vec<(CellId, u32)> = plan.transfers().collect();
        for &(lender, k) in &transfers {
            let free = cells[lender.index()].free_channels();
            if free < k {
                return Err(Error::StalePlan {
                    lender,
                    requested: k,
                    available: free,
                });
            }
        }
        let requester = &cells[plan.requester.index()];
        if requester.blocked < plan.total_lent {
            return Err(Error::StalePlan {
                lender: plan.requester,
                requested: plan.total_lent,
                available: requester.blocked,
            });
        }
        for &(lender, k) in &transfers {
            cells[lender.index()].lent_out += k;
        }
        let requester = &mut cells[plan.requester.index()];
        requester.borrowed_in += plan.total_lent;
        requester.blocked -= plan.total_lent;
        self.active.push(LedgerEntry {
            requester: plan.requester,
            total: plan.total_lent,
            transfers,
        });
        Ok(())
    }

    /// Reverts every recorded transfer and checks that the network is back to
    /// owned capacity everywhere (no stray lent/borrowed channels).
    pub fn release_all(&mut self, cells: &mut [CellState]) -> Result<()> {
        for entry in self.active.drain(..) {
            let requester = &mut cells[entry.requester.index()];
            requester.borrowed_in = requester.borrowed_in.checked_sub(entry.total).ok_or_else(|| {
                Error::LedgerInconsistency(format!(
                    "cell {} holds fewer borrowed channels than the ledger recorded",
                    entry.requester
                ))
            })?;
            for (lender, k) in entry.transfers {
                let state = &mut cells[lender.index()];
                state.lent_out = state.lent_out.checked_sub(k).ok_or_else(|| {
                    Error::LedgerInconsistency(format!(
                        "cell {lender} holds fewer lent channels than the ledger recorded"
                    ))
                })?;
            }
        }
        if let Some(idx) = cells
            .iter()
            .position(|c| c.lent_out != 0 || c.borrowed_in != 0)
        {
            return Err(Error::LedgerInconsistency(format!(
                "cell {} still carries lent/borrowed channels after release",
                CellId(idx + 1)
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn request(need: u32, frees: [u32; MAX_LENDERS]) -> BorrowRequest {
        let mut lenders = [LenderSlot::default(); MAX_LENDERS];
        for (i, (slot, &free)) in lenders.iter_mut().zip(&frees).enumerate() {
            *slot = LenderSlot {
                cell: Some(CellId(i + 2)),
                free,
                blocked: 0,
                hosts: 0,
                cell_type: 0,
            };
        }
        BorrowRequest {
            requester: CellId(1),
            need,
            requester_free: 0,
            requester_hosts: 0,
            requester_type: 0,
            lenders,
        }
    }

    #[test]
    fn fca_blocked_is_demand_beyond_capacity() {
        assert_eq!(fca_blocked(17, 10), 7);
        assert_eq!(fca_blocked(5, 10), 0);
        assert_eq!(fca_blocked(10, 10), 0);
    }

    #[test]
    fn greedy_takes_from_richest_one_channel_at_a_time() {
        let req = request(5, [1, 6, 0, 0, 5, 0]);
        let plan = greedy_borrow(&req);
        assert_eq!(plan.lent, [0, 3, 0, 0, 2, 0]);
        assert_eq!(plan.total_lent, 5);
        assert_eq!(plan.residual_blocked, 0);
    }

    #[test]
    fn greedy_with_no_need_is_empty() {
        let plan = greedy_borrow(&request(0, [3, 3, 3, 3, 3, 3]));
        assert_eq!(plan.total_lent, 0);
        assert_eq!(plan.residual_blocked, 0);
        assert_eq!(plan.lent, [0; MAX_LENDERS]);
    }

    #[test]
    fn greedy_on_dry_neighborhood_leaves_residual() {
        let plan = greedy_borrow(&request(3, [0; MAX_LENDERS]));
        assert_eq!(plan.total_lent, 0);
        assert_eq!(plan.residual_blocked, 3);
    }

    fn five_lender_cells() -> Vec<CellState> {
        // Cell 1 is the requester (hot by 5), cells 2..=7 mirror the
        // free-channel profile [1, 6, 0, 0, 5, 0].
        let mut cells = vec![CellState::new(10); 7];
        cells[0].hosts = 15;
        cells[0].blocked = 5;
        for (idx, hosts) in [(1, 9), (2, 4), (3, 10), (4, 10), (5, 5), (6, 10)] {
            cells[idx].hosts = hosts;
        }
        cells
    }

    #[test]
    fn apply_plan_moves_channels_and_reduces_blocked() {
        let mut cells = five_lender_cells();
        let req = request(5, [1, 6, 0, 0, 5, 0]);
        let plan = greedy_borrow(&req);
        let mut ledger = BorrowLedger::new();
        ledger.apply(&mut cells, &plan).unwrap();
        assert_eq!(cells[1].free_channels(), 1);
        assert_eq!(cells[2].free_channels(), 3); // 6 -> 3
        assert_eq!(cells[5].free_channels(), 3); // 5 -> 3
        assert_eq!(cells[0].blocked, 0);
        assert_eq!(cells[0].borrowed_in, 5);
    }

    #[test]
    fn double_apply_of_same_plan_is_rejected() {
        let mut cells = five_lender_cells();
        let plan = greedy_borrow(&request(5, [1, 6, 0, 0, 5, 0]));
        let mut ledger = BorrowLedger::new();
        ledger.apply(&mut cells, &plan).unwrap();
        assert!(matches!(
            ledger.apply(&mut cells, &plan),
            Err(Error::DuplicateBorrow { .. })
        ));
    }

    #[test]
    fn stale_plan_is_rejected_at_apply_time() {
        let mut cells = five_lender_cells();
        let plan = greedy_borrow(&request(5, [1, 6, 0, 0, 5, 0]));
        cells[2].hosts = 10; // lender 3 no longer has 3 free channels
        let mut ledger = BorrowLedger::new();
        assert!(matches!(
            ledger.apply(&mut cells, &plan),
            Err(Error::StalePlan { .. })
        ));
    }

    #[test]
    fn empty_plan_changes_nothing() {
        let mut cells = five_lender_cells();
        let before = cells.clone();
        let req = request(5, [1, 6, 0, 0, 5, 0]);
        let mut ledger = BorrowLedger::new();
        ledger.apply(&mut cells, &BorrowPlan::empty(&req)).unwrap();
        assert_eq!(cells, before);
    }

    #[test]
    fn release_restores_cells_bit_for_bit() {
        let mut cells = five_lender_cells();
        let before = cells.clone();
        let plan = greedy_borrow(&request(5, [1, 6, 0, 0, 5, 0]));
        let mut ledger = BorrowLedger::new();
        ledger.apply(&mut cells, &plan).unwrap();
        // blocked is rewritten by the next settle; restore it manually to
        // compare the full state.
        ledger.release_all(&mut cells).unwrap();
        cells[0].blocked = 5;
        assert_eq!(cells, before);
    }

    #[test]
    fn release_with_no_borrows_is_a_noop() {
        let mut cells = five_lender_cells();
        let before = cells.clone();
        BorrowLedger::new().release_all(&mut cells).unwrap();
        assert_eq!(cells, before);
    }

    proptest! {
        #[test]
        fn greedy_is_feasible_and_maximal(
            need in 0u32..20,
            frees in proptest::array::uniform6(0u32..8),
        ) {
            let req = request(need, frees);
            let plan = greedy_borrow(&req);
            for (k, slot) in plan.lent.iter().zip(&req.lenders) {
                prop_assert!(*k <= slot.free);
            }
            prop_assert_eq!(plan.total_lent, need.min(req.lendable()));
            prop_assert_eq!(plan.residual_blocked, need - plan.total_lent);
            // Deterministic: same request, same plan.
            prop_assert_eq!(greedy_borrow(&req), plan);
        }

        #[test]
        fn apply_release_cycles_conserve_channels(
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cells: Vec<CellState> = (0..7).map(|_| {
                let mut c = CellState::new(10);
                c.hosts = rng.random_range(0..16);
                c.blocked = fca_blocked(c.hosts, c.owned_capacity);
                c
            }).collect();
            let baseline = cells.clone();
            let owned_total: u32 = cells.iter().map(|c| c.owned_capacity).sum();
            let mut ledger = BorrowLedger::new();
            for _ in 0..100 {
                // Re-derive blocked as a settle phase would.
                for c in cells.iter_mut() {
                    c.blocked = c.hosts.saturating_sub(c.available());
                }
                if cells[0].blocked > 0 {
                    let mut lenders = [LenderSlot::default(); MAX_LENDERS];
                    for (i, slot) in lenders.iter_mut().enumerate() {
                        slot.cell = Some(CellId(i + 2));
                        slot.free = cells[i + 1].free_channels();
                    }
                    let req = BorrowRequest {
                        requester: CellId(1),
                        need: cells[0].blocked,
                        requester_free: 0,
                        requester_hosts: cells[0].hosts,
                        requester_type: 0,
                        lenders,
                    };
                    ledger.apply(&mut cells, &greedy_borrow(&req)).unwrap();
                }
                let lent: u32 = cells.iter().map(|c| c.lent_out).sum();
                let borrowed: u32 = cells.iter().map(|c| c.borrowed_in).sum();
                prop_assert_eq!(lent, borrowed);
                prop_assert_eq!(cells.iter().map(|c| c.owned_capacity).sum::<u32>(), owned_total);
                ledger.release_all(&mut cells).unwrap();
                for (c, b) in cells.iter().zip(&baseline) {
                    prop_assert_eq!(c.available(), b.owned_capacity);
                }
            }
        }
    }
}
