//! Hexagonal cell grid: neighbor lookup table, cell types, and
//! frequency-reuse channel groups.
//!
//! The network is a rectangular arrangement of hexagonal cells laid out in
//! offset coordinates: rows are indexed from the top, odd-indexed rows are
//! shifted right by half a cell. Cells are numbered left-to-right,
//! top-to-bottom starting at 1, so the corners of a 5x5 grid are 1, 5, 21
//! and 25. The neighbor table is computed once at construction and read-only
//! afterwards.

use std::fmt;

use crate::error::{Error, Result};

/// 1-based identifier of a grid cell, numbered left-to-right, top-to-bottom.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub usize);

impl CellId {
    /// Zero-based index into per-cell tables.
    pub fn index(self) -> usize {
        debug_assert!(self.0 >= 1, "cell ids are 1-based");
        self.0 - 1
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellId({})", self.0)
    }
}

/// Number of hex directions; also the maximum neighbor count of any cell.
pub const DIRECTIONS: usize = 6;

/// Per-row offset deltas `(dr, dc)` in anticlockwise order starting from the
/// left neighbor: W, SW, SE, E, NE, NW.
const EVEN_ROW_DELTAS: [(isize, isize); DIRECTIONS] = [
    (0, -1),  // W
    (1, -1),  // SW
    (1, 0),   // SE
    (0, 1),   // E
    (-1, 0),  // NE
    (-1, -1), // NW
];

const ODD_ROW_DELTAS: [(isize, isize); DIRECTIONS] = [
    (0, -1), // W
    (1, 0),  // SW
    (1, 1),  // SE
    (0, 1),  // E
    (-1, 1), // NE
    (-1, 0), // NW
];

/// Frequency-reuse parameters derived from the co-channel distance ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReuseParams {
    /// Ratio of co-channel center distance to cell radius.
    pub sigma: f64,
    /// Cluster size: the nearest member of the rhombic series i^2 + ij + j^2.
    pub reuse_n: u64,
}

/// Immutable grid topology: neighbor table, cell types, channel groups.
///
/// Construction validates every invariant (neighbor symmetry, no self loops,
/// adjacent cells in distinct channel groups); afterwards the topology can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct Topology {
    rows: usize,
    cols: usize,
    /// Per-cell neighbor slot per hex direction (W, SW, SE, E, NE, NW);
    /// `None` where the grid edge cuts the direction off.
    slots: Vec<[Option<CellId>; DIRECTIONS]>,
    /// Per-cell compact neighbor list, anticlockwise from the left neighbor,
    /// absent directions skipped.
    neighbors: Vec<Vec<CellId>>,
    cell_types: Vec<u8>,
    channel_groups: Vec<u32>,
}

impl Topology {
    /// Builds the grid, its neighbor lookup table, cell types and the
    /// seven-group channel labeling.
    pub fn build(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        let cell_count = rows * cols;
        let mut slots = Vec::with_capacity(cell_count);
        let mut neighbors = Vec::with_capacity(cell_count);
        let mut cell_types = Vec::with_capacity(cell_count);
        for r in 0..rows {
            for c in 0..cols {
                let deltas = if r % 2 == 0 {
                    &EVEN_ROW_DELTAS
                } else {
                    &ODD_ROW_DELTAS
                };
                let mut cell_slots = [None; DIRECTIONS];
                for (slot, (dr, dc)) in cell_slots.iter_mut().zip(deltas) {
                    let nr = r as isize + dr;
                    let nc = c as isize + dc;
                    if nr >= 0 && nr < rows as isize && nc >= 0 && nc < cols as isize {
                        *slot = Some(CellId(nr as usize * cols + nc as usize + 1));
                    }
                }
                let compact: Vec<CellId> = cell_slots.iter().flatten().copied().collect();
                // 6 - degree, clamped into 0..=4 for degenerate 1xN grids.
                let cell_type = (DIRECTIONS - compact.len()).min(4) as u8;
                slots.push(cell_slots);
                neighbors.push(compact);
                cell_types.push(cell_type);
            }
        }
        let channel_groups: Vec<u32> = (0..cell_count)
            .map(|idx| reuse_pattern_label(idx / cols, idx % cols))
            .collect();
        let topo = Topology {
            rows,
            cols,
            slots,
            neighbors,
            cell_types,
            channel_groups,
        };
        debug_assert!(topo.check_symmetry());
        Ok(topo)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Iterates all cell ids in ascending order.
    pub fn cells(&self) -> impl Iterator<Item = CellId> {
        (1..=self.cell_count()).map(CellId)
    }

    fn checked_index(&self, cell: CellId) -> Result<usize> {
        if cell.0 >= 1 && cell.0 <= self.cell_count() {
            Ok(cell.0 - 1)
        } else {
            Err(Error::InvalidCell {
                cell,
                cell_count: self.cell_count(),
            })
        }
    }

    /// Neighbors in anticlockwise order starting from the left neighbor,
    /// absent directions skipped.
    pub fn neighbors(&self, cell: CellId) -> Result<&[CellId]> {
        Ok(&self.neighbors[self.checked_index(cell)?])
    }

    /// Neighbor per hex direction (W, SW, SE, E, NE, NW); `None` off-grid.
    pub fn direction_slots(&self, cell: CellId) -> Result<&[Option<CellId>; DIRECTIONS]> {
        Ok(&self.slots[self.checked_index(cell)?])
    }

    pub fn degree(&self, cell: CellId) -> Result<usize> {
        Ok(self.neighbors[self.checked_index(cell)?].len())
    }

    /// Cell type in 0..=4: `6 - degree`, so interior cells are type 0 and
    /// two-neighbor corners are type 4.
    pub fn cell_type(&self, cell: CellId) -> Result<u8> {
        Ok(self.cell_types[self.checked_index(cell)?])
    }

    /// Channel group label under the built-in seven-group reuse pattern.
    pub fn channel_group(&self, cell: CellId) -> Result<u32> {
        Ok(self.channel_groups[self.checked_index(cell)?])
    }

    fn check_symmetry(&self) -> bool {
        self.cells().all(|cell| {
            self.neighbors[cell.index()].iter().all(|&n| {
                n != cell && self.neighbors[n.index()].contains(&cell)
            })
        })
    }
}

/// Canonical reuse-7 shift-pattern label for offset coordinates `(row, col)`.
///
/// In axial coordinates `q = col - row/2`, `r = row` the label `(q + 3r) mod 7`
/// differs on every pair of adjacent hexes, which is exactly the classic
/// seven-cell cluster tiling.
fn reuse_pattern_label(row: usize, col: usize) -> u32 {
    let q = col as i64 - (row / 2) as i64;
    let r = row as i64;
    (q + 3 * r).rem_euclid(7) as u32
}

/// Labels every cell with a channel group so that no two adjacent cells share
/// a group, using the reuse-7 shift pattern folded into `n_groups` labels.
///
/// Seven groups always succeed on hex grids; fewer groups fail with the first
/// violating edge unless the grid has no conflicting adjacency.
pub fn assign_channel_groups(topo: &Topology, n_groups: u32) -> Result<Vec<u32>> {
    if n_groups == 0 {
        return Err(Error::Config(
            "n-groups: at least one channel group is required".into(),
        ));
    }
    let labels: Vec<u32> = (0..topo.cell_count())
        .map(|idx| reuse_pattern_label(idx / topo.cols(), idx % topo.cols()) % n_groups)
        .collect();
    for cell in topo.cells() {
        for &n in topo.neighbors(cell)? {
            if n > cell && labels[cell.index()] == labels[n.index()] {
                return Err(Error::InfeasibleGroups {
                    n_groups,
                    a: cell,
                    b: n,
                    group: labels[cell.index()],
                });
            }
        }
    }
    Ok(labels)
}

/// Computes the reuse factor for a co-channel distance ratio `sigma`:
/// `sigma^2 / 3` snapped to the nearest member of the rhombic series
/// `i^2 + ij + j^2` (1, 3, 4, 7, 9, 12, 13, ...), ties resolved upward.
pub fn reuse_factor(sigma: f64) -> Result<ReuseParams> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma { sigma });
    }
    Ok(ReuseParams {
        sigma,
        reuse_n: nearest_rhombic(sigma * sigma / 3.0),
    })
}

/// Nearest series member (>= 1) to `raw`, ties resolved upward.
fn nearest_rhombic(raw: f64) -> u64 {
    let below = (1..=raw.floor() as u64).rev().find(|&v| is_rhombic(v));
    let above = ((raw.ceil() as u64).max(1)..)
        .find(|&v| is_rhombic(v))
        .unwrap();
    match below {
        Some(lo) if lo != above => {
            let (d_lo, d_hi) = (raw - lo as f64, above as f64 - raw);
            if d_lo < d_hi {
                lo
            } else {
                above
            }
        }
        _ => above,
    }
}

/// True when `v = i^2 + ij + j^2` for some integers `i, j >= 0`.
fn is_rhombic(v: u64) -> bool {
    if v == 0 {
        return true;
    }
    let mut i = 0u64;
    while i * i <= v {
        // Solve j^2 + ij + (i^2 - v) = 0: discriminant 4v - 3i^2 must be a
        // perfect square s^2 with s >= i and s - i even.
        let disc = 4 * v - 3 * i * i;
        let s = integer_sqrt(disc);
        if s * s == disc && s >= i && (s - i).is_multiple_of(2) {
            return true;
        }
        i += 1;
    }
    false
}

fn integer_sqrt(v: u64) -> u64 {
    let mut s = (v as f64).sqrt() as u64;
    while s * s > v {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= v {
        s += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn five_by_five_has_25_cells_with_corner_numbering() {
        let topo = Topology::build(5, 5).unwrap();
        assert_eq!(topo.cell_count(), 25);
        // Corners by construction: first/last cell of first/last row.
        assert_eq!(topo.cells().next(), Some(CellId(1)));
        assert_eq!(topo.cells().last(), Some(CellId(25)));
        assert_eq!(topo.cell_type(CellId(1)).unwrap(), 4);
        assert_eq!(topo.cell_type(CellId(25)).unwrap(), 3);
    }

    #[test]
    fn corner_cell_one_borders_two_and_six() {
        let topo = Topology::build(5, 5).unwrap();
        let mut n: Vec<usize> = topo.neighbors(CellId(1)).unwrap().iter().map(|c| c.0).collect();
        n.sort_unstable();
        assert_eq!(n, vec![2, 6]);
    }

    #[test]
    fn interior_neighbor_order_is_anticlockwise_from_west() {
        let topo = Topology::build(5, 5).unwrap();
        // Cell 13 sits at (row 2, col 2); W, SW, SE, E, NE, NW.
        let n: Vec<usize> = topo.neighbors(CellId(13)).unwrap().iter().map(|c| c.0).collect();
        assert_eq!(n, vec![12, 17, 18, 14, 8, 7]);
        assert_eq!(topo.cell_type(CellId(13)).unwrap(), 0);
    }

    #[test]
    fn top_row_interior_cell_is_type_two() {
        let topo = Topology::build(5, 5).unwrap();
        assert_eq!(topo.degree(CellId(3)).unwrap(), 4);
        assert_eq!(topo.cell_type(CellId(3)).unwrap(), 2);
    }

    #[test]
    fn single_cell_grid_is_clamped_to_type_four() {
        let topo = Topology::build(1, 1).unwrap();
        assert_eq!(topo.cell_count(), 1);
        assert!(topo.neighbors(CellId(1)).unwrap().is_empty());
        assert_eq!(topo.cell_type(CellId(1)).unwrap(), 4);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(matches!(
            Topology::build(0, 5),
            Err(Error::EmptyGrid { rows: 0, cols: 5 })
        ));
        assert!(matches!(Topology::build(5, 0), Err(Error::EmptyGrid { .. })));
    }

    #[test]
    fn invalid_cell_lookups_error() {
        let topo = Topology::build(2, 2).unwrap();
        assert!(matches!(
            topo.cell_type(CellId(5)),
            Err(Error::InvalidCell { .. })
        ));
        assert!(matches!(
            topo.neighbors(CellId(0)),
            Err(Error::InvalidCell { .. })
        ));
    }

    #[test]
    fn reuse_factor_matches_known_values() {
        assert_eq!(reuse_factor(4.45).unwrap().reuse_n, 7);
        assert_eq!(reuse_factor(3.0).unwrap().reuse_n, 3);
        assert_eq!(reuse_factor(21f64.sqrt()).unwrap().reuse_n, 7);
    }

    #[test]
    fn reuse_factor_rejects_non_positive_sigma() {
        assert!(matches!(reuse_factor(0.0), Err(Error::InvalidSigma { .. })));
        assert!(matches!(reuse_factor(-2.0), Err(Error::InvalidSigma { .. })));
        assert!(matches!(
            reuse_factor(f64::NAN),
            Err(Error::InvalidSigma { .. })
        ));
    }

    #[test]
    fn nearest_rhombic_ties_resolve_upward() {
        // raw = 2 sits exactly between series members 1 and 3.
        assert_eq!(nearest_rhombic(2.0), 3);
        assert_eq!(nearest_rhombic(6.60), 7);
        assert_eq!(nearest_rhombic(0.2), 1);
        assert_eq!(nearest_rhombic(12.0), 12);
    }

    #[test]
    fn seven_groups_label_5x5_without_conflicts() {
        let topo = Topology::build(5, 5).unwrap();
        let labels = assign_channel_groups(&topo, 7).unwrap();
        for cell in topo.cells() {
            for &n in topo.neighbors(cell).unwrap() {
                assert_ne!(
                    labels[cell.index()],
                    labels[n.index()],
                    "cells {cell} and {n} share a group"
                );
            }
        }
        assert!(labels.iter().all(|&g| g < 7));
    }

    #[test]
    fn two_groups_are_infeasible_on_5x5() {
        let topo = Topology::build(5, 5).unwrap();
        assert!(matches!(
            assign_channel_groups(&topo, 2),
            Err(Error::InfeasibleGroups { n_groups: 2, .. })
        ));
    }

    #[test]
    fn single_cell_grid_labels_as_group_zero() {
        let topo = Topology::build(1, 1).unwrap();
        assert_eq!(assign_channel_groups(&topo, 1).unwrap(), vec![0]);
        assert_eq!(assign_channel_groups(&topo, 9).unwrap(), vec![0]);
    }

    proptest! {
        #[test]
        fn neighbor_relation_is_symmetric_without_self_loops(
            rows in 1usize..9,
            cols in 1usize..9,
        ) {
            let topo = Topology::build(rows, cols).unwrap();
            for cell in topo.cells() {
                let ns = topo.neighbors(cell).unwrap();
                let mut seen = ns.to_vec();
                seen.sort_unstable();
                seen.dedup();
                prop_assert_eq!(seen.len(), ns.len(), "duplicate neighbor at {}", cell);
                for &n in ns {
                    prop_assert_ne!(n, cell, "self loop at {}", cell);
                    prop_assert!(topo.neighbors(n).unwrap().contains(&cell));
                }
            }
        }

        #[test]
        fn degree_and_type_sum_to_six_on_proper_grids(
            rows in 2usize..9,
            cols in 2usize..9,
        ) {
            let topo = Topology::build(rows, cols).unwrap();
            for cell in topo.cells() {
                let deg = topo.degree(cell).unwrap();
                prop_assert!((2..=6).contains(&deg));
                prop_assert_eq!(topo.cell_type(cell).unwrap() as usize + deg, 6);
            }
        }

        #[test]
        fn seven_group_labeling_never_conflicts(
            rows in 1usize..9,
            cols in 1usize..9,
        ) {
            let topo = Topology::build(rows, cols).unwrap();
            let labels = assign_channel_groups(&topo, 7).unwrap();
            for cell in topo.cells() {
                for &n in topo.neighbors(cell).unwrap() {
                    prop_assert_ne!(labels[cell.index()], labels[n.index()]);
                }
            }
        }

        #[test]
        fn reuse_factor_returns_series_members(sigma in 0.1f64..60.0) {
            let params = reuse_factor(sigma).unwrap();
            prop_assert!(is_rhombic(params.reuse_n));
            prop_assert!(params.reuse_n >= 1);
        }

        #[test]
        fn reuse_factor_is_exact_on_series_members(k in 1u64..500) {
            prop_assume!(is_rhombic(k));
            let sigma = (3.0 * k as f64).sqrt();
            prop_assert_eq!(reuse_factor(sigma).unwrap().reuse_n, k);
        }
    }
}
