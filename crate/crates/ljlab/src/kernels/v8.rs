//! Width-8 kernels: masked gather/scatter over SoA or AoS8, with every
//! group tail folded into the main loop by lane masking.
//!
//! Each block covers eight list entries. A lane-counter vector starts at
//! `(0..7)` and advances by eight per block; comparing it against the group
//! size yields the loop mask, so no scalar remainder loop exists. The
//! cutoff mask comes from the distance test, impulses are zeroed under the
//! conjunction of the two, and the momentum scatter is masked by the loop
//! mask alone — a lane past the group end never writes. Partners of one
//! i-atom are distinct by list construction, so no scatter-conflict
//! detection is performed.
//!
//! Gather element indices are the atom indices shifted by a layout-dependent
//! amount: zero for SoA (unit stride per field array), three for AoS8
//! (eight-element records), plus the field offset within the record.

use crate::kernels::lanes::{LaneMask, LaneVec};
use crate::kernels::{ExecPath, SweepStats};
use crate::layout::{Aos8Storage, AtomStore, SoaStorage};
use crate::neighbor::SortedList;
use crate::params::SimParams;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomField {
    X,
    Y,
    Z,
    Px,
    Py,
    Pz,
}

impl AtomField {
    pub const MOMENTA: [AtomField; 3] = [AtomField::Px, AtomField::Py, AtomField::Pz];
}

/// Per-field base pointers for the intrinsic path. For SoA these are six
/// distinct arrays; for AoS8 they all point at the one record array and the
/// field offsets select the member.
#[derive(Clone, Copy)]
pub struct RawFields {
    pub pos: [*const f64; 3],
    pub mom: [*mut f64; 3],
}

/// Storage a width-8 kernel can gather from and scatter to.
pub trait GatherStore: AtomStore {
    /// Atom index to element index shift: records of `2^INDEX_SHIFT` elements.
    const INDEX_SHIFT: u32;
    /// Element offset of each field after the shift, indexed by `AtomField`.
    const FIELD_OFFSETS: [u32; 6];
    fn field(&self, field: AtomField) -> &[f64];
    fn field_mut(&mut self, field: AtomField) -> &mut [f64];
    fn raw_fields(&mut self) -> RawFields;
}

/// Element index of `field` of atom `j` inside the field's base array.
#[inline(always)]
pub fn element_index<S: GatherStore>(j: u32, field: AtomField) -> usize {
    ((j as usize) << S::INDEX_SHIFT) + S::FIELD_OFFSETS[field as usize] as usize
}

impl GatherStore for SoaStorage {
    const INDEX_SHIFT: u32 = 0;
    const FIELD_OFFSETS: [u32; 6] = [0; 6];

    fn field(&self, field: AtomField) -> &[f64] {
        match field {
            AtomField::X => &self.x,
            AtomField::Y => &self.y,
            AtomField::Z => &self.z,
            AtomField::Px => &self.px,
            AtomField::Py => &self.py,
            AtomField::Pz => &self.pz,
        }
    }

    fn field_mut(&mut self, field: AtomField) -> &mut [f64] {
        match field {
            AtomField::X => &mut self.x,
            AtomField::Y => &mut self.y,
            AtomField::Z => &mut self.z,
            AtomField::Px => &mut self.px,
            AtomField::Py => &mut self.py,
            AtomField::Pz => &mut self.pz,
        }
    }

    fn raw_fields(&mut self) -> RawFields {
        RawFields {
            pos: [self.x.as_ptr(), self.y.as_ptr(), self.z.as_ptr()],
            mom: [
                self.px.as_mut_ptr(),
                self.py.as_mut_ptr(),
                self.pz.as_mut_ptr(),
            ],
        }
    }
}

impl GatherStore for Aos8Storage {
    const INDEX_SHIFT: u32 = 3;
    const FIELD_OFFSETS: [u32; 6] = [0, 1, 2, 4, 5, 6];

    fn field(&self, _field: AtomField) -> &[f64] {
        &self.data
    }

    fn field_mut(&mut self, _field: AtomField) -> &mut [f64] {
        &mut self.data
    }

    fn raw_fields(&mut self) -> RawFields {
        let base = self.data.as_mut_ptr();
        RawFields {
            pos: [base as *const f64; 3],
            mom: [base; 3],
        }
    }
}

fn gather_field<S: GatherStore>(
    store: &S,
    field: AtomField,
    idx: &[u32; 8],
    mask: LaneMask<8>,
    miss: f64,
) -> LaneVec<8> {
    let data = store.field(field);
    LaneVec(std::array::from_fn(|k| {
        if mask.0[k] {
            data[element_index::<S>(idx[k], field)]
        } else {
            miss
        }
    }))
}

/// Gather the positions of up to eight atoms. Masked-off lanes read nothing
/// and yield `miss` instead; callers pick a sentinel the cutoff test rejects.
pub fn gather_positions<S: GatherStore>(
    store: &S,
    idx: &[u32; 8],
    mask: LaneMask<8>,
    miss: Vec3,
) -> (LaneVec<8>, LaneVec<8>, LaneVec<8>) {
    (
        gather_field(store, AtomField::X, idx, mask, miss.x),
        gather_field(store, AtomField::Y, idx, mask, miss.y),
        gather_field(store, AtomField::Z, idx, mask, miss.z),
    )
}

/// Gather the momenta of up to eight atoms; masked-off lanes yield zero.
pub fn gather_momenta<S: GatherStore>(
    store: &S,
    idx: &[u32; 8],
    mask: LaneMask<8>,
) -> (LaneVec<8>, LaneVec<8>, LaneVec<8>) {
    (
        gather_field(store, AtomField::Px, idx, mask, 0.0),
        gather_field(store, AtomField::Py, idx, mask, 0.0),
        gather_field(store, AtomField::Pz, idx, mask, 0.0),
    )
}

#[cfg(debug_assertions)]
fn assert_no_scatter_conflicts(idx: &[u32; 8], mask: LaneMask<8>) {
    for a in 0..8 {
        for b in (a + 1)..8 {
            if mask.0[a] && mask.0[b] {
                assert_ne!(idx[a], idx[b], "duplicate scatter index under active mask");
            }
        }
    }
}

/// Scatter momenta back under `mask`; masked-off lanes leave memory
/// untouched. Active lanes must carry distinct indices (checked in debug
/// builds).
pub fn scatter_momenta<S: GatherStore>(
    store: &mut S,
    idx: &[u32; 8],
    mask: LaneMask<8>,
    px: LaneVec<8>,
    py: LaneVec<8>,
    pz: LaneVec<8>,
) {
    #[cfg(debug_assertions)]
    assert_no_scatter_conflicts(idx, mask);
    for (field, v) in AtomField::MOMENTA.into_iter().zip([px, py, pz]) {
        let data = store.field_mut(field);
        for k in 0..8 {
            if mask.0[k] {
                data[element_index::<S>(idx[k], field)] = v.0[k];
            }
        }
    }
}

/// Horizontal sum in fixed lane order, shared by both paths.
#[inline(always)]
fn hsum8(a: [f64; 8]) -> f64 {
    let mut acc = a[0];
    for v in &a[1..] {
        acc += v;
    }
    acc
}

struct Block8 {
    idx: [u32; 8],
    m_loop: LaneMask<8>,
    dx: LaneVec<8>,
    dy: LaneVec<8>,
    dz: LaneVec<8>,
    r2: LaneVec<8>,
}

/// Loop mask from the lane counters, masked index load (the list padding
/// keeps the raw read in bounds), masked position gather, distances.
#[inline(always)]
fn load_block<S: GatherStore>(
    store: &S,
    qi: Vec3,
    miss: Vec3,
    js: &[u32],
    counter: &[i64; 8],
    n_group: i64,
) -> Block8 {
    let m_loop = LaneMask(std::array::from_fn(|k| counter[k] < n_group));
    let idx: [u32; 8] = js[..8].try_into().unwrap();
    let (x, y, z) = gather_positions(store, &idx, m_loop, miss);
    let dx = x - LaneVec::splat(qi.x);
    let dy = y - LaneVec::splat(qi.y);
    let dz = z - LaneVec::splat(qi.z);
    let r2 = dx * dx + dy * dy + dz * dz;
    Block8 { idx, m_loop, dx, dy, dz, r2 }
}

/// Impulses, cutoff and total masks, momentum gather/update/scatter, and
/// accumulation of the i-atom's share.
#[inline(always)]
fn apply_block<S: GatherStore>(
    store: &mut S,
    blk: &Block8,
    rc2: LaneVec<8>,
    dtv: LaneVec<8>,
    acc: &mut [LaneVec<8>; 3],
    stats: &mut SweepStats,
) {
    let r6 = (blk.r2 * blk.r2) * blk.r2;
    let r14 = (r6 * r6) * blk.r2;
    let df = (LaneVec::splat(48.0) - LaneVec::splat(24.0) * r6) * dtv / r14;
    let m_cutoff = blk.r2.lt(rc2);
    let m_total = m_cutoff.and(blk.m_loop);
    let df = df.zero_inactive(m_total);

    stats.lane_blocks += 1;
    stats.pairs_visited += blk.m_loop.count() as u64;
    stats.pairs_within_cutoff += m_total.count() as u64;

    let fx = df * blk.dx;
    let fy = df * blk.dy;
    let fz = df * blk.dz;
    acc[0] += fx;
    acc[1] += fy;
    acc[2] += fz;

    let (px, py, pz) = gather_momenta(store, &blk.idx, blk.m_loop);
    scatter_momenta(store, &blk.idx, blk.m_loop, px + fx, py + fy, pz + fz);
}

pub fn v8_sweep_portable<S: GatherStore, const SWP: bool>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
) -> SweepStats {
    debug_assert_eq!(store.n(), list.n_atoms());
    let rc2 = LaneVec::splat(params.cutoff_sq());
    let dtv = LaneVec::splat(params.dt);
    let r_c = params.cutoff;
    let mut stats = SweepStats::default();

    for i in 0..list.n_atoms() {
        let (start, end) = (list.offsets[i], list.offsets[i + 1]);
        let n_group = end - start;
        if n_group == 0 {
            continue;
        }
        let qi = store.position(i);
        // Sentinel for masked-off position lanes: far enough from the
        // i-atom that the cutoff mask rejects them too.
        let miss = qi + Vec3::splat(2.0 * r_c);
        let mut counter: [i64; 8] = std::array::from_fn(|k| k as i64);
        let mut acc = [LaneVec::<8>::ZERO; 3];
        let nblocks = n_group.div_ceil(8);
        let js = |b: usize| &list.j_indices[start + 8 * b..start + 8 * b + 8];
        let advance = |c: &mut [i64; 8]| c.iter_mut().for_each(|v| *v += 8);

        if SWP {
            let mut blk = load_block(store, qi, miss, js(0), &counter, n_group as i64);
            advance(&mut counter);
            for b in 1..nblocks {
                apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
                blk = load_block(store, qi, miss, js(b), &counter, n_group as i64);
                advance(&mut counter);
            }
            apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
        } else {
            for b in 0..nblocks {
                let blk = load_block(store, qi, miss, js(b), &counter, n_group as i64);
                advance(&mut counter);
                apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
            }
        }

        let mut pi = store.momentum(i);
        pi.x -= hsum8(acc[0].0);
        pi.y -= hsum8(acc[1].0);
        pi.z -= hsum8(acc[2].0);
        store.set_momentum(i, pi);
    }
    stats
}

#[cfg(target_arch = "x86_64")]
mod avx512 {
    use std::arch::x86_64::*;

    use super::{element_index, hsum8, AtomField, GatherStore, RawFields};
    use crate::kernels::SweepStats;
    use crate::neighbor::SortedList;
    use crate::params::SimParams;

    /// f64 element width in bytes; gather/scatter use element indices.
    const SCALE: i32 = 8;

    #[inline(always)]
    unsafe fn shifted_idx<S: GatherStore>(idx: __m256i) -> __m256i {
        if S::INDEX_SHIFT == 0 {
            idx
        } else {
            _mm256_sll_epi32(idx, _mm_cvtsi32_si128(S::INDEX_SHIFT as i32))
        }
    }

    #[inline(always)]
    unsafe fn field_vidx<S: GatherStore>(shifted: __m256i, field: AtomField) -> __m256i {
        let off = S::FIELD_OFFSETS[field as usize];
        if off == 0 {
            shifted
        } else {
            _mm256_add_epi32(shifted, _mm256_set1_epi32(off as i32))
        }
    }

    struct Block8 {
        /// Shifted atom indices (element-index base before field offsets).
        vidx: __m256i,
        m_loop: __mmask8,
        dx: __m512d,
        dy: __m512d,
        dz: __m512d,
        r2: __m512d,
    }

    struct Broadcast {
        qix: __m512d,
        qiy: __m512d,
        qiz: __m512d,
        missx: __m512d,
        missy: __m512d,
        missz: __m512d,
    }

    #[inline(always)]
    unsafe fn load_block<S: GatherStore>(
        raw: &RawFields,
        bc: &Broadcast,
        jptr: *const u32,
        d: __m512i,
        nvec: __m512i,
    ) -> Block8 {
        let m_loop = _mm512_cmplt_epi64_mask(d, nvec);
        // The list's trailing pad keeps this full-width read in bounds.
        let idx = _mm256_loadu_si256(jptr as *const __m256i);
        let vidx = shifted_idx::<S>(idx);
        let x = _mm512_mask_i32gather_pd::<SCALE>(
            bc.missx,
            m_loop,
            field_vidx::<S>(vidx, AtomField::X),
            raw.pos[0],
        );
        let y = _mm512_mask_i32gather_pd::<SCALE>(
            bc.missy,
            m_loop,
            field_vidx::<S>(vidx, AtomField::Y),
            raw.pos[1],
        );
        let z = _mm512_mask_i32gather_pd::<SCALE>(
            bc.missz,
            m_loop,
            field_vidx::<S>(vidx, AtomField::Z),
            raw.pos[2],
        );
        let dx = _mm512_sub_pd(x, bc.qix);
        let dy = _mm512_sub_pd(y, bc.qiy);
        let dz = _mm512_sub_pd(z, bc.qiz);
        let r2 = _mm512_add_pd(
            _mm512_add_pd(_mm512_mul_pd(dx, dx), _mm512_mul_pd(dy, dy)),
            _mm512_mul_pd(dz, dz),
        );
        Block8 { vidx, m_loop, dx, dy, dz, r2 }
    }

    #[inline(always)]
    unsafe fn apply_block<S: GatherStore>(
        raw: &RawFields,
        blk: &Block8,
        rc2: __m512d,
        dtv: __m512d,
        acc: &mut [__m512d; 3],
        stats: &mut SweepStats,
    ) {
        let r6 = _mm512_mul_pd(_mm512_mul_pd(blk.r2, blk.r2), blk.r2);
        let r14 = _mm512_mul_pd(_mm512_mul_pd(r6, r6), blk.r2);
        let num = _mm512_sub_pd(_mm512_set1_pd(48.0), _mm512_mul_pd(_mm512_set1_pd(24.0), r6));
        let df = _mm512_div_pd(_mm512_mul_pd(num, dtv), r14);
        let m_cutoff = _mm512_cmp_pd_mask::<_CMP_LT_OS>(blk.r2, rc2);
        let m_total = m_cutoff & blk.m_loop;
        let df = _mm512_maskz_mov_pd(m_total, df);

        stats.lane_blocks += 1;
        stats.pairs_visited += blk.m_loop.count_ones() as u64;
        stats.pairs_within_cutoff += m_total.count_ones() as u64;

        let fx = _mm512_mul_pd(df, blk.dx);
        let fy = _mm512_mul_pd(df, blk.dy);
        let fz = _mm512_mul_pd(df, blk.dz);
        acc[0] = _mm512_add_pd(acc[0], fx);
        acc[1] = _mm512_add_pd(acc[1], fy);
        acc[2] = _mm512_add_pd(acc[2], fz);

        #[cfg(debug_assertions)]
        {
            let mut lanes = [0i32; 8];
            _mm256_storeu_si256(lanes.as_mut_ptr() as *mut __m256i, blk.vidx);
            for a in 0..8 {
                for b in (a + 1)..8 {
                    if blk.m_loop & (1 << a) != 0 && blk.m_loop & (1 << b) != 0 {
                        assert_ne!(lanes[a], lanes[b], "duplicate scatter index under active mask");
                    }
                }
            }
        }

        // Gather the momenta, add the impulses, scatter them back; all
        // under the loop mask so a lane past the group never writes.
        let zero = _mm512_setzero_pd();
        let forces = [fx, fy, fz];
        for (c, field) in AtomField::MOMENTA.into_iter().enumerate() {
            let vidx = field_vidx::<S>(blk.vidx, field);
            let p = _mm512_mask_i32gather_pd::<SCALE>(zero, blk.m_loop, vidx, raw.mom[c] as *const f64);
            let p = _mm512_add_pd(p, forces[c]);
            _mm512_mask_i32scatter_pd::<SCALE>(raw.mom[c], blk.m_loop, vidx, p);
        }
    }

    #[target_feature(enable = "avx512f")]
    pub unsafe fn v8_sweep<S: GatherStore, const SWP: bool>(
        store: &mut S,
        list: &SortedList,
        params: &SimParams,
    ) -> SweepStats {
        debug_assert_eq!(store.n(), list.n_atoms());
        let raw = store.raw_fields();
        let rc2 = _mm512_set1_pd(params.cutoff_sq());
        let dtv = _mm512_set1_pd(params.dt);
        let r_c = params.cutoff;
        let lane_init = _mm512_set_epi64(7, 6, 5, 4, 3, 2, 1, 0);
        let eight = _mm512_set1_epi64(8);
        let mut stats = SweepStats::default();

        for i in 0..list.n_atoms() {
            let (start, end) = (list.offsets[i], list.offsets[i + 1]);
            let n_group = end - start;
            if n_group == 0 {
                continue;
            }
            let iu = i as u32;
            let qx = *raw.pos[0].add(element_index::<S>(iu, AtomField::X));
            let qy = *raw.pos[1].add(element_index::<S>(iu, AtomField::Y));
            let qz = *raw.pos[2].add(element_index::<S>(iu, AtomField::Z));
            let bc = Broadcast {
                qix: _mm512_set1_pd(qx),
                qiy: _mm512_set1_pd(qy),
                qiz: _mm512_set1_pd(qz),
                missx: _mm512_set1_pd(qx + 2.0 * r_c),
                missy: _mm512_set1_pd(qy + 2.0 * r_c),
                missz: _mm512_set1_pd(qz + 2.0 * r_c),
            };
            let nvec = _mm512_set1_epi64(n_group as i64);
            let mut d = lane_init;
            let mut acc = [_mm512_setzero_pd(); 3];
            let jbase = list.j_indices.as_ptr().add(start);
            let nblocks = n_group.div_ceil(8);

            if SWP {
                let mut blk = load_block::<S>(&raw, &bc, jbase, d, nvec);
                d = _mm512_add_epi64(d, eight);
                for b in 1..nblocks {
                    apply_block::<S>(&raw, &blk, rc2, dtv, &mut acc, &mut stats);
                    blk = load_block::<S>(&raw, &bc, jbase.add(8 * b), d, nvec);
                    d = _mm512_add_epi64(d, eight);
                }
                apply_block::<S>(&raw, &blk, rc2, dtv, &mut acc, &mut stats);
            } else {
                for b in 0..nblocks {
                    let blk = load_block::<S>(&raw, &bc, jbase.add(8 * b), d, nvec);
                    d = _mm512_add_epi64(d, eight);
                    apply_block::<S>(&raw, &blk, rc2, dtv, &mut acc, &mut stats);
                }
            }

            for (c, field) in AtomField::MOMENTA.into_iter().enumerate() {
                let mut lanes = [0.0f64; 8];
                _mm512_storeu_pd(lanes.as_mut_ptr(), acc[c]);
                let ptr = raw.mom[c].add(element_index::<S>(iu, field));
                *ptr -= hsum8(lanes);
            }
        }
        stats
    }
}

/// Width-8 sweep with masked tails.
///
/// Runs the 512-bit intrinsic path when the host supports it (unless
/// `force_portable`), otherwise the portable lane emulation; both produce
/// identical bits.
pub fn v8_sweep<S: GatherStore>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
    swp: bool,
    force_portable: bool,
) -> (SweepStats, ExecPath) {
    #[cfg(target_arch = "x86_64")]
    if !force_portable && std::arch::is_x86_feature_detected!("avx512f") {
        let stats = unsafe {
            if swp {
                avx512::v8_sweep::<S, true>(store, list, params)
            } else {
                avx512::v8_sweep::<S, false>(store, list, params)
            }
        };
        return (stats, ExecPath::Intrinsic);
    }
    let stats = if swp {
        v8_sweep_portable::<S, true>(store, list, params)
    } else {
        v8_sweep_portable::<S, false>(store, list, params)
    };
    (stats, ExecPath::Portable)
}
