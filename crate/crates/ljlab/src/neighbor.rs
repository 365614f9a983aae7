//! Cell-based pair registration and the counting-sorted per-atom form.
//!
//! Pairs are stored once, under their smaller index (half list). The sorted
//! form is a prefix array plus a flattened partner array, built by a stable
//! counting sort; partners of one atom are therefore distinct and keep
//! their registration order.

use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::system::ParticleSystem;

/// Uniform cell grid over the box. Open boundaries: edge cells simply have
/// fewer neighbors.
#[derive(Clone, Debug)]
pub struct CellIndex {
    pub cells_per_edge: usize,
    /// Cell edge length; at least the search radius by construction.
    pub cell_edge: f64,
    /// Linear cell id of each atom.
    pub cell_of_atom: Vec<usize>,
    /// Atom ids per cell, ascending within each cell.
    pub atoms_in_cell: Vec<Vec<u32>>,
}

/// Interacting pairs `(i, j)` with `i < j`, registered at squared distance
/// strictly below the search radius squared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairList {
    pub pairs: Vec<(u32, u32)>,
}

impl PairList {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Pair list grouped by the smaller index: `j_indices[offsets[i]..offsets[i+1]]`
/// are the partners of atom `i`, in registration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedList {
    pub offsets: Vec<usize>,
    /// Flattened partner indices. Carries [`SortedList::LANE_PAD`] trailing
    /// sentinel slots past `offsets[n]` so eight-wide index loads never read
    /// out of bounds; the logical content ends at `offsets[n]`.
    pub j_indices: Vec<u32>,
}

impl SortedList {
    /// Trailing sentinel slots appended after the logical content.
    pub const LANE_PAD: usize = 8;

    pub fn n_atoms(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_pairs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn group(&self, i: usize) -> &[u32] {
        &self.j_indices[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Assign every atom to the cell containing it.
///
/// Needs at least three cells per edge so a cell plus its 26 neighbors
/// covers the search sphere without wraparound.
pub fn build_cell_index(system: &ParticleSystem, r_s: f64) -> Result<CellIndex> {
    let box_edge = system.params.box_edge;
    if !(r_s > 0.0) || !r_s.is_finite() {
        return Err(Error::InvalidParams(format!("search radius must be positive, got {r_s}")));
    }
    let mut cells_per_edge = (box_edge / r_s).floor() as usize;
    // The division can round up across an integer, leaving cells a hair
    // narrower than the search radius; one fewer cell restores the
    // adjacent-cell coverage guarantee.
    if cells_per_edge > 1 && box_edge / (cells_per_edge as f64) < r_s {
        cells_per_edge -= 1;
    }
    if cells_per_edge < 3 {
        return Err(Error::SearchRadiusTooLarge { r_s, box_edge });
    }
    let cell_edge = box_edge / cells_per_edge as f64;
    debug_assert!(cell_edge >= r_s);

    let n_cells = cells_per_edge * cells_per_edge * cells_per_edge;
    let mut atoms_in_cell = vec![Vec::new(); n_cells];
    let mut cell_of_atom = Vec::with_capacity(system.n());
    let coord = |c: f64| ((c / cell_edge) as usize).min(cells_per_edge - 1);
    for (i, q) in system.positions.iter().enumerate() {
        let (cx, cy, cz) = (coord(q.x), coord(q.y), coord(q.z));
        let cell = (cx * cells_per_edge + cy) * cells_per_edge + cz;
        cell_of_atom.push(cell);
        atoms_in_cell[cell].push(i as u32);
    }
    Ok(CellIndex { cells_per_edge, cell_edge, cell_of_atom, atoms_in_cell })
}

/// The 13 neighbor offsets with lexicographically positive (dx, dy, dz);
/// scanning a cell against itself and these covers every cell pair once.
const FORWARD_OFFSETS: [(isize, isize, isize); 13] = [
    (0, 0, 1),
    (0, 1, -1),
    (0, 1, 0),
    (0, 1, 1),
    (1, -1, -1),
    (1, -1, 0),
    (1, -1, 1),
    (1, 0, -1),
    (1, 0, 0),
    (1, 0, 1),
    (1, 1, -1),
    (1, 1, 0),
    (1, 1, 1),
];

/// Register every pair within the search radius by scanning each cell
/// against itself and its forward neighbors. Equals the all-pairs
/// enumeration as a set, at O(N) cost for bounded density.
pub fn build_pair_list(system: &ParticleSystem, cells: &CellIndex, r_s: f64) -> PairList {
    let rs2 = r_s * r_s;
    let q = &system.positions;
    let cpe = cells.cells_per_edge as isize;
    let mut pairs = Vec::new();

    let within = |a: u32, b: u32| (q[b as usize] - q[a as usize]).norm_sq() < rs2;

    for cx in 0..cpe {
        for cy in 0..cpe {
            for cz in 0..cpe {
                let cell = ((cx * cpe + cy) * cpe + cz) as usize;
                let own = &cells.atoms_in_cell[cell];
                if own.is_empty() {
                    continue;
                }
                for (ai, &a) in own.iter().enumerate() {
                    for &b in &own[ai + 1..] {
                        if within(a, b) {
                            pairs.push((a, b));
                        }
                    }
                }
                for (dx, dy, dz) in FORWARD_OFFSETS {
                    let (nx, ny, nz) = (cx + dx, cy + dy, cz + dz);
                    if nx < 0 || ny < 0 || nz < 0 || nx >= cpe || ny >= cpe || nz >= cpe {
                        continue;
                    }
                    let other = &cells.atoms_in_cell[((nx * cpe + ny) * cpe + nz) as usize];
                    for &a in own {
                        for &b in other {
                            if within(a, b) {
                                pairs.push((a.min(b), a.max(b)));
                            }
                        }
                    }
                }
            }
        }
    }
    PairList { pairs }
}

/// Group the pair list by its smaller index with a stable counting sort.
pub fn sort_pair_list(list: &PairList, n: usize) -> SortedList {
    debug_assert!(n <= (i32::MAX as usize) >> 3, "indices must stay gather-safe");
    let mut offsets = vec![0usize; n + 1];
    for &(i, _) in &list.pairs {
        debug_assert!((i as usize) < n);
        offsets[i as usize + 1] += 1;
    }
    for k in 0..n {
        offsets[k + 1] += offsets[k];
    }
    let total = offsets[n];
    let mut j_indices = vec![0u32; total + SortedList::LANE_PAD];
    let mut cursor = offsets[..n].to_vec();
    for &(i, j) in &list.pairs {
        debug_assert!((j as usize) < n && i < j);
        j_indices[cursor[i as usize]] = j;
        cursor[i as usize] += 1;
    }
    SortedList { offsets, j_indices }
}

/// Convenience: cell index, pair list, and sorted list from a system's own
/// parameters.
pub fn build_lists(system: &ParticleSystem) -> Result<(PairList, SortedList)> {
    let r_s = system.params.search_radius;
    let cells = build_cell_index(system, r_s)?;
    let pairs = build_pair_list(system, &cells, r_s);
    let sorted = sort_pair_list(&pairs, system.n());
    Ok((pairs, sorted))
}

/// Validity tracking for a pair list reused across steps.
///
/// The list stays valid while twice the accumulated per-step maximum
/// displacement is strictly below the margin `r_s - r_c` (two atoms may
/// close head-on).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BookkeepingState {
    pub margin: f64,
    pub consumed: f64,
}

impl BookkeepingState {
    pub fn new(params: &SimParams) -> Self {
        Self::with_margin(params.search_radius - params.cutoff)
    }

    pub fn with_margin(margin: f64) -> Self {
        BookkeepingState { margin, consumed: 0.0 }
    }

    /// Account for one step where the fastest atom moved `vmax_dt`.
    pub fn record_displacement(&mut self, vmax_dt: f64) {
        debug_assert!(vmax_dt >= 0.0);
        self.consumed += vmax_dt;
    }

    pub fn is_list_valid(&self) -> bool {
        2.0 * self.consumed < self.margin
    }

    pub fn reset(&mut self) {
        self.consumed = 0.0;
    }
}
