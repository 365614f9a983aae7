//! The force-sweep kernel matrix.
//!
//! Every kernel applies the same physics — truncated pair impulses over a
//! registered pair list — and differs only in loop structure, data layout,
//! and vector width. The registry enumerates them; [`run_sweep`] dispatches
//! one sweep over a layout view.

pub mod lanes;
pub mod scalar;
pub mod v4;
pub mod v8;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::{LayoutTag, LayoutView, Storage};
use crate::neighbor::{PairList, SortedList};
use crate::params::SimParams;

pub use lanes::{transpose4, LaneMask, LaneVec};
pub use scalar::{oracle_sweep, pair_sweep, sorted_sweep, sorted_swp_sweep};
pub use v4::{v4_sweep, v4_sweep_portable, PaddedStore};
pub use v8::{
    element_index, gather_momenta, gather_positions, scatter_momenta, v8_sweep,
    v8_sweep_portable, AtomField, GatherStore,
};

/// Counters a sweep reports for equivalence and structure tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// List entries visited (masked-off lanes past a group end not included).
    pub pairs_visited: u64,
    /// Visited entries that passed the cutoff test.
    pub pairs_within_cutoff: u64,
    /// Vector blocks executed (width-4 or width-8).
    pub lane_blocks: u64,
    /// Scalar tail iterations executed after vector blocks.
    pub scalar_tail_iters: u64,
}

/// Which code path a sweep executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecPath {
    /// Plain scalar kernel; no vector abstraction involved.
    Scalar,
    /// Portable lane emulation of a vector kernel.
    Portable,
    /// Hardware intrinsics (256-bit for width 4, 512-bit for width 8).
    Intrinsic,
}

impl fmt::Display for ExecPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecPath::Scalar => "scalar",
            ExecPath::Portable => "portable",
            ExecPath::Intrinsic => "intrinsic",
        })
    }
}

/// Every kernel variant, named after its layout, vector width, and loop
/// optimizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelId {
    Oracle,
    Pair,
    Sorted,
    SortedSwp,
    Aos4V4,
    Aos4V4Swp,
    SoaV8Rle,
    SoaV8RleSwp,
    Aos8V8RleSwp,
    Aos8V4Swp,
}

impl KernelId {
    pub const ALL: [KernelId; 10] = [
        KernelId::Oracle,
        KernelId::Pair,
        KernelId::Sorted,
        KernelId::SortedSwp,
        KernelId::Aos4V4,
        KernelId::Aos4V4Swp,
        KernelId::SoaV8Rle,
        KernelId::SoaV8RleSwp,
        KernelId::Aos8V8RleSwp,
        KernelId::Aos8V4Swp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Oracle => "Oracle",
            KernelId::Pair => "Pair",
            KernelId::Sorted => "Sorted",
            KernelId::SortedSwp => "SortedSWP",
            KernelId::Aos4V4 => "AoS4_V4",
            KernelId::Aos4V4Swp => "AoS4_V4_SWP",
            KernelId::SoaV8Rle => "SoA_V8_RLE",
            KernelId::SoaV8RleSwp => "SoA_V8_RLE_SWP",
            KernelId::Aos8V8RleSwp => "AoS8_V8_RLE_SWP",
            KernelId::Aos8V4Swp => "AoS8_V4_SWP",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// Which list a kernel consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListRequirement {
    None,
    Pair,
    Sorted,
}

/// Registry entry: the layout the benchmark converts to, the list the
/// kernel reads, and a one-line description.
#[derive(Clone, Copy, Debug)]
pub struct KernelInfo {
    pub id: KernelId,
    pub layout: LayoutTag,
    pub list: ListRequirement,
    pub description: &'static str,
}

static REGISTRY: [KernelInfo; 10] = [
    KernelInfo {
        id: KernelId::Oracle,
        layout: LayoutTag::SoA,
        list: ListRequirement::None,
        description: "all-pairs double loop; ground truth for equivalence checks",
    },
    KernelInfo {
        id: KernelId::Pair,
        layout: LayoutTag::SoA,
        list: ListRequirement::Pair,
        description: "scalar loop over the flat pair list",
    },
    KernelInfo {
        id: KernelId::Sorted,
        layout: LayoutTag::SoA,
        list: ListRequirement::Sorted,
        description: "scalar loop grouped by i-atom; i-data held in registers",
    },
    KernelInfo {
        id: KernelId::SortedSwp,
        layout: LayoutTag::SoA,
        list: ListRequirement::Sorted,
        description: "sorted loop retimed to overlap partner loads with force math",
    },
    KernelInfo {
        id: KernelId::Aos4V4,
        layout: LayoutTag::AoS4,
        list: ListRequirement::Sorted,
        description: "4-wide: whole-record loads, register transpose, cutoff mask, scalar tail",
    },
    KernelInfo {
        id: KernelId::Aos4V4Swp,
        layout: LayoutTag::AoS4,
        list: ListRequirement::Sorted,
        description: "4-wide record kernel with the block loop retimed",
    },
    KernelInfo {
        id: KernelId::SoaV8Rle,
        layout: LayoutTag::SoA,
        list: ListRequirement::Sorted,
        description: "8-wide gather/scatter; group tails folded in by lane masks",
    },
    KernelInfo {
        id: KernelId::SoaV8RleSwp,
        layout: LayoutTag::SoA,
        list: ListRequirement::Sorted,
        description: "8-wide masked kernel with the block loop retimed",
    },
    KernelInfo {
        id: KernelId::Aos8V8RleSwp,
        layout: LayoutTag::AoS8,
        list: ListRequirement::Sorted,
        description: "8-wide masked kernel on 8-member records (shifted gather indices), retimed",
    },
    KernelInfo {
        id: KernelId::Aos8V4Swp,
        layout: LayoutTag::AoS8,
        list: ListRequirement::Sorted,
        description: "4-wide record kernel on 8-member records, retimed",
    },
];

/// Stable enumeration of every kernel variant.
pub fn list_kernels() -> &'static [KernelInfo] {
    &REGISTRY
}

pub fn kernel_info(id: KernelId) -> &'static KernelInfo {
    REGISTRY.iter().find(|k| k.id == id).expect("every id is registered")
}

fn layout_mismatch(id: KernelId, required: LayoutTag, got: LayoutTag) -> Error {
    Error::LayoutMismatch { kernel: id.name(), required, got }
}

/// Run one force sweep of `id` over `view`, using whichever of the lists the
/// kernel consumes. `force_portable` pins vector kernels to the lane
/// emulation; otherwise intrinsics run when the host supports them.
pub fn run_sweep(
    id: KernelId,
    view: &mut LayoutView,
    pair_list: &PairList,
    sorted_list: &SortedList,
    params: &SimParams,
    force_portable: bool,
) -> Result<(SweepStats, ExecPath)> {
    match id {
        KernelId::Oracle => {
            // Ground truth is layout-independent: evaluate over the view's
            // canonical contents and add the deltas in place.
            let mut system = crate::layout::from_layout(view);
            system.params = *params;
            let (deltas, stats) = scalar::oracle_sweep_with_stats(&system)?;
            for (i, d) in deltas.into_iter().enumerate() {
                let p = view.momentum(i);
                view.set_momentum(i, p + d);
            }
            Ok((stats, ExecPath::Scalar))
        }
        KernelId::Pair => match &mut view.storage {
            Storage::SoA(s) => Ok((pair_sweep(s, pair_list, params), ExecPath::Scalar)),
            other => Err(layout_mismatch(id, LayoutTag::SoA, tag_of(other))),
        },
        KernelId::Sorted => {
            let stats = match &mut view.storage {
                Storage::SoA(s) => sorted_sweep(s, sorted_list, params),
                Storage::AoS4(s) => sorted_sweep(s, sorted_list, params),
                Storage::AoS8(s) => sorted_sweep(s, sorted_list, params),
            };
            Ok((stats, ExecPath::Scalar))
        }
        KernelId::SortedSwp => {
            let stats = match &mut view.storage {
                Storage::SoA(s) => sorted_swp_sweep(s, sorted_list, params),
                Storage::AoS4(s) => sorted_swp_sweep(s, sorted_list, params),
                Storage::AoS8(s) => sorted_swp_sweep(s, sorted_list, params),
            };
            Ok((stats, ExecPath::Scalar))
        }
        KernelId::Aos4V4 | KernelId::Aos4V4Swp => match &mut view.storage {
            Storage::AoS4(s) => Ok(v4_sweep(
                s,
                sorted_list,
                params,
                id == KernelId::Aos4V4Swp,
                force_portable,
            )),
            other => Err(layout_mismatch(id, LayoutTag::AoS4, tag_of(other))),
        },
        KernelId::Aos8V4Swp => match &mut view.storage {
            Storage::AoS8(s) => Ok(v4_sweep(s, sorted_list, params, true, force_portable)),
            other => Err(layout_mismatch(id, LayoutTag::AoS8, tag_of(other))),
        },
        KernelId::SoaV8Rle | KernelId::SoaV8RleSwp => match &mut view.storage {
            Storage::SoA(s) => Ok(v8_sweep(
                s,
                sorted_list,
                params,
                id == KernelId::SoaV8RleSwp,
                force_portable,
            )),
            other => Err(layout_mismatch(id, LayoutTag::SoA, tag_of(other))),
        },
        KernelId::Aos8V8RleSwp => match &mut view.storage {
            Storage::AoS8(s) => Ok(v8_sweep(s, sorted_list, params, true, force_portable)),
            other => Err(layout_mismatch(id, LayoutTag::AoS8, tag_of(other))),
        },
    }
}

fn tag_of(storage: &Storage) -> LayoutTag {
    match storage {
        Storage::SoA(_) => LayoutTag::SoA,
        Storage::AoS4(_) => LayoutTag::AoS4,
        Storage::AoS8(_) => LayoutTag::AoS8,
    }
}
