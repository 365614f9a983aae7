//! Width-4 kernels over padded records.
//!
//! One position record `(x, y, z, pad)` is a single 256-bit load. Four such
//! loads, four subtractions against the i-atom record, and a 4x4 transpose
//! yield per-component lane vectors for four pairs at once; impulses on
//! out-of-range lanes are zeroed. Momentum write-back is a per-lane
//! read-modify-write of whole records — no scatter primitive is assumed at
//! this width. The trailing `n % 4` partners of each group run scalar
//! iterations.

use crate::force::pair_force_terms;
use crate::kernels::lanes::{transpose4, LaneVec};
use crate::kernels::{ExecPath, SweepStats};
use crate::layout::{Aos4Storage, Aos8Storage, AtomStore};
use crate::neighbor::SortedList;
use crate::params::SimParams;
use crate::vec3::Vec3;

/// Storage whose positions and momenta are padded records, one whole record
/// per 256-bit register. Record `i` starts `STRIDE * i` elements past the
/// respective base; the first four elements are `(x, y, z, pad)`.
pub trait PaddedStore: AtomStore {
    const STRIDE: usize;
    fn pos_record(&self, i: usize) -> [f64; 4];
    fn mom_record(&self, i: usize) -> [f64; 4];
    fn set_mom_record(&mut self, i: usize, rec: [f64; 4]);
    /// Position and momentum base pointers for the intrinsic path.
    fn raw_parts(&mut self) -> (*const f64, *mut f64);
}

impl PaddedStore for Aos4Storage {
    const STRIDE: usize = 4;

    fn pos_record(&self, i: usize) -> [f64; 4] {
        self.pos[4 * i..4 * i + 4].try_into().unwrap()
    }
    fn mom_record(&self, i: usize) -> [f64; 4] {
        self.mom[4 * i..4 * i + 4].try_into().unwrap()
    }
    fn set_mom_record(&mut self, i: usize, rec: [f64; 4]) {
        self.mom[4 * i..4 * i + 4].copy_from_slice(&rec);
    }
    fn raw_parts(&mut self) -> (*const f64, *mut f64) {
        (self.pos.as_ptr(), self.mom.as_mut_ptr())
    }
}

impl PaddedStore for Aos8Storage {
    const STRIDE: usize = 8;

    fn pos_record(&self, i: usize) -> [f64; 4] {
        self.data[8 * i..8 * i + 4].try_into().unwrap()
    }
    fn mom_record(&self, i: usize) -> [f64; 4] {
        self.data[8 * i + 4..8 * i + 8].try_into().unwrap()
    }
    fn set_mom_record(&mut self, i: usize, rec: [f64; 4]) {
        self.data[8 * i + 4..8 * i + 8].copy_from_slice(&rec);
    }
    fn raw_parts(&mut self) -> (*const f64, *mut f64) {
        let base = self.data.as_mut_ptr();
        // Momentum records live four elements into each 8-wide record.
        (base as *const f64, unsafe { base.add(4) })
    }
}

/// Horizontal sum in fixed lane order, shared by both paths.
#[inline(always)]
fn hsum4(a: [f64; 4]) -> f64 {
    ((a[0] + a[1]) + a[2]) + a[3]
}

/// Scalar iterations for the `n % 4` tail of a group; also shared between
/// the portable and intrinsic paths so their results agree bitwise.
#[inline(always)]
fn scalar_tail<S: PaddedStore>(
    store: &mut S,
    qi: [f64; 4],
    tail: &[u32],
    rc2: f64,
    dt: f64,
    pi: &mut Vec3,
    stats: &mut SweepStats,
) {
    for &j in tail {
        stats.pairs_visited += 1;
        stats.scalar_tail_iters += 1;
        let j = j as usize;
        let rec = store.pos_record(j);
        let dq = Vec3::new(rec[0] - qi[0], rec[1] - qi[1], rec[2] - qi[2]);
        let r2 = dq.norm_sq();
        if r2 < rc2 {
            stats.pairs_within_cutoff += 1;
            let f = dq * pair_force_terms(r2, dt).df;
            let mut mom = store.mom_record(j);
            mom[0] += f.x;
            mom[1] += f.y;
            mom[2] += f.z;
            store.set_mom_record(j, mom);
            *pi -= f;
        }
    }
}

struct Block4 {
    j: [u32; 4],
    /// Whole-record relative vectors, pad lane included.
    dq: [LaneVec<4>; 4],
    x: LaneVec<4>,
    y: LaneVec<4>,
    z: LaneVec<4>,
    r2: LaneVec<4>,
}

/// Load four partner records and form per-component lane vectors.
#[inline(always)]
fn load_block<S: PaddedStore>(store: &S, qi: [f64; 4], js: &[u32]) -> Block4 {
    let mut j = [0u32; 4];
    let mut dq = [LaneVec::<4>::ZERO; 4];
    for k in 0..4 {
        j[k] = js[k];
        let rec = store.pos_record(js[k] as usize);
        dq[k] = LaneVec(std::array::from_fn(|c| rec[c] - qi[c]));
    }
    let (x, y, z) = transpose4(dq);
    let r2 = x * x + y * y + z * z;
    Block4 { j, dq, x, y, z, r2 }
}

/// Impulses, cutoff mask, per-lane momentum write-back, and accumulation of
/// the i-atom's share into the lane accumulators.
#[inline(always)]
fn apply_block<S: PaddedStore>(
    store: &mut S,
    blk: &Block4,
    rc2: LaneVec<4>,
    dtv: LaneVec<4>,
    acc: &mut [LaneVec<4>; 3],
    stats: &mut SweepStats,
) {
    let r6 = (blk.r2 * blk.r2) * blk.r2;
    let r14 = (r6 * r6) * blk.r2;
    let df = (LaneVec::splat(48.0) - LaneVec::splat(24.0) * r6) * dtv / r14;
    let in_range = blk.r2.lt(rc2);
    let df = df.zero_inactive(in_range);

    stats.lane_blocks += 1;
    stats.pairs_visited += 4;
    stats.pairs_within_cutoff += in_range.count() as u64;

    acc[0] += df * blk.x;
    acc[1] += df * blk.y;
    acc[2] += df * blk.z;

    for k in 0..4 {
        let j = blk.j[k] as usize;
        let dfk = df.lane(k);
        let mut rec = store.mom_record(j);
        for c in 0..4 {
            rec[c] += dfk * blk.dq[k].0[c];
        }
        store.set_mom_record(j, rec);
    }
}

pub fn v4_sweep_portable<S: PaddedStore, const SWP: bool>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
) -> SweepStats {
    debug_assert_eq!(store.n(), list.n_atoms());
    let rc2s = params.cutoff_sq();
    let rc2 = LaneVec::splat(rc2s);
    let dtv = LaneVec::splat(params.dt);
    let mut stats = SweepStats::default();

    for i in 0..list.n_atoms() {
        let group = list.group(i);
        if group.is_empty() {
            continue;
        }
        let qi = store.pos_record(i);
        let mut acc = [LaneVec::<4>::ZERO; 3];
        let nblocks = group.len() / 4;
        let (vec_part, tail) = group.split_at(nblocks * 4);

        if SWP {
            if nblocks > 0 {
                let mut blk = load_block(store, qi, &vec_part[..4]);
                for b in 1..nblocks {
                    apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
                    blk = load_block(store, qi, &vec_part[4 * b..4 * b + 4]);
                }
                apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
            }
        } else {
            for b in 0..nblocks {
                let blk = load_block(store, qi, &vec_part[4 * b..4 * b + 4]);
                apply_block(store, &blk, rc2, dtv, &mut acc, &mut stats);
            }
        }

        let mut pi = store.momentum(i);
        pi.x -= hsum4(acc[0].0);
        pi.y -= hsum4(acc[1].0);
        pi.z -= hsum4(acc[2].0);
        scalar_tail(store, qi, tail, rc2s, params.dt, &mut pi, &mut stats);
        store.set_momentum(i, pi);
    }
    stats
}

#[cfg(target_arch = "x86_64")]
mod avx2 {
    use std::arch::x86_64::*;

    use super::{hsum4, PaddedStore};
    use crate::force::pair_force_terms;
    use crate::kernels::SweepStats;
    use crate::neighbor::SortedList;
    use crate::params::SimParams;

    struct Block4 {
        j: [u32; 4],
        dq: [__m256d; 4],
        x: __m256d,
        y: __m256d,
        z: __m256d,
        r2: __m256d,
    }

    /// Rows are `(x, y, z, pad)` records; outputs gather one component each.
    #[inline(always)]
    unsafe fn transpose4_pd(
        r0: __m256d,
        r1: __m256d,
        r2: __m256d,
        r3: __m256d,
    ) -> (__m256d, __m256d, __m256d) {
        let t0 = _mm256_unpacklo_pd(r0, r1); // x0 x1 z0 z1
        let t1 = _mm256_unpackhi_pd(r0, r1); // y0 y1 . .
        let t2 = _mm256_unpacklo_pd(r2, r3); // x2 x3 z2 z3
        let t3 = _mm256_unpackhi_pd(r2, r3); // y2 y3 . .
        let x = _mm256_permute2f128_pd::<0x20>(t0, t2);
        let y = _mm256_permute2f128_pd::<0x20>(t1, t3);
        let z = _mm256_permute2f128_pd::<0x31>(t0, t2);
        (x, y, z)
    }

    #[inline(always)]
    unsafe fn load_block<S: PaddedStore>(pos: *const f64, qi: __m256d, js: &[u32]) -> Block4 {
        let mut j = [0u32; 4];
        let mut dq = [_mm256_setzero_pd(); 4];
        for k in 0..4 {
            j[k] = js[k];
            let rec = _mm256_loadu_pd(pos.add(S::STRIDE * js[k] as usize));
            dq[k] = _mm256_sub_pd(rec, qi);
        }
        let (x, y, z) = transpose4_pd(dq[0], dq[1], dq[2], dq[3]);
        let r2 = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)),
            _mm256_mul_pd(z, z),
        );
        Block4 { j, dq, x, y, z, r2 }
    }

    #[inline(always)]
    unsafe fn apply_block<S: PaddedStore>(
        mom: *mut f64,
        blk: &Block4,
        rc2: __m256d,
        dtv: __m256d,
        acc: &mut [__m256d; 3],
        stats: &mut SweepStats,
    ) {
        let r6 = _mm256_mul_pd(_mm256_mul_pd(blk.r2, blk.r2), blk.r2);
        let r14 = _mm256_mul_pd(_mm256_mul_pd(r6, r6), blk.r2);
        let num = _mm256_sub_pd(_mm256_set1_pd(48.0), _mm256_mul_pd(_mm256_set1_pd(24.0), r6));
        let df = _mm256_div_pd(_mm256_mul_pd(num, dtv), r14);
        // Zero the impulses of pairs outside the cutoff.
        let in_range = _mm256_cmp_pd::<_CMP_LT_OS>(blk.r2, rc2);
        let df = _mm256_and_pd(df, in_range);

        stats.lane_blocks += 1;
        stats.pairs_visited += 4;
        stats.pairs_within_cutoff += (_mm256_movemask_pd(in_range) as u32).count_ones() as u64;

        acc[0] = _mm256_add_pd(acc[0], _mm256_mul_pd(df, blk.x));
        acc[1] = _mm256_add_pd(acc[1], _mm256_mul_pd(df, blk.y));
        acc[2] = _mm256_add_pd(acc[2], _mm256_mul_pd(df, blk.z));

        let mut dfs = [0.0f64; 4];
        _mm256_storeu_pd(dfs.as_mut_ptr(), df);
        for k in 0..4 {
            let ptr = mom.add(S::STRIDE * blk.j[k] as usize);
            let rec = _mm256_loadu_pd(ptr);
            let f = _mm256_mul_pd(_mm256_set1_pd(dfs[k]), blk.dq[k]);
            _mm256_storeu_pd(ptr, _mm256_add_pd(rec, f));
        }
    }

    #[target_feature(enable = "avx2")]
    pub unsafe fn v4_sweep<S: PaddedStore, const SWP: bool>(
        store: &mut S,
        list: &SortedList,
        params: &SimParams,
    ) -> SweepStats {
        debug_assert_eq!(store.n(), list.n_atoms());
        let (pos, mom) = store.raw_parts();
        let rc2s = params.cutoff_sq();
        let rc2 = _mm256_set1_pd(rc2s);
        let dtv = _mm256_set1_pd(params.dt);
        let dt = params.dt;
        let mut stats = SweepStats::default();

        for i in 0..list.n_atoms() {
            let group = list.group(i);
            if group.is_empty() {
                continue;
            }
            let qi = _mm256_loadu_pd(pos.add(S::STRIDE * i));
            let mut acc = [_mm256_setzero_pd(); 3];
            let nblocks = group.len() / 4;
            let (vec_part, tail) = group.split_at(nblocks * 4);

            if SWP {
                if nblocks > 0 {
                    let mut blk = load_block::<S>(pos, qi, &vec_part[..4]);
                    for b in 1..nblocks {
                        apply_block::<S>(mom, &blk, rc2, dtv, &mut acc, &mut stats);
                        blk = load_block::<S>(pos, qi, &vec_part[4 * b..4 * b + 4]);
                    }
                    apply_block::<S>(mom, &blk, rc2, dtv, &mut acc, &mut stats);
                }
            } else {
                for b in 0..nblocks {
                    let blk = load_block::<S>(pos, qi, &vec_part[4 * b..4 * b + 4]);
                    apply_block::<S>(mom, &blk, rc2, dtv, &mut acc, &mut stats);
                }
            }

            let mut sums = [[0.0f64; 4]; 3];
            for (c, a) in acc.iter().enumerate() {
                _mm256_storeu_pd(sums[c].as_mut_ptr(), *a);
            }
            let pi_ptr = mom.add(S::STRIDE * i);
            let mut pi = [*pi_ptr, *pi_ptr.add(1), *pi_ptr.add(2)];
            for c in 0..3 {
                pi[c] -= hsum4(sums[c]);
            }

            // Scalar tail, raw-pointer flavor of `scalar_tail`.
            let mut qi_rec = [0.0f64; 4];
            _mm256_storeu_pd(qi_rec.as_mut_ptr(), qi);
            for &j in tail {
                stats.pairs_visited += 1;
                stats.scalar_tail_iters += 1;
                let p = pos.add(S::STRIDE * j as usize);
                let dq = [*p - qi_rec[0], *p.add(1) - qi_rec[1], *p.add(2) - qi_rec[2]];
                let r2 = dq[0] * dq[0] + dq[1] * dq[1] + dq[2] * dq[2];
                if r2 < rc2s {
                    stats.pairs_within_cutoff += 1;
                    let df = pair_force_terms(r2, dt).df;
                    let m = mom.add(S::STRIDE * j as usize);
                    for c in 0..3 {
                        let f = dq[c] * df;
                        *m.add(c) += f;
                        pi[c] -= f;
                    }
                }
            }

            *pi_ptr = pi[0];
            *pi_ptr.add(1) = pi[1];
            *pi_ptr.add(2) = pi[2];
        }
        stats
    }
}

/// Width-4 sweep over a padded-record layout.
///
/// Runs the 256-bit intrinsic path when the host supports it (unless
/// `force_portable`), otherwise the portable lane emulation; both produce
/// identical bits.
pub fn v4_sweep<S: PaddedStore>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
    swp: bool,
    force_portable: bool,
) -> (SweepStats, ExecPath) {
    #[cfg(target_arch = "x86_64")]
    if !force_portable && std::arch::is_x86_feature_detected!("avx2") {
        let stats = unsafe {
            if swp {
                avx2::v4_sweep::<S, true>(store, list, params)
            } else {
                avx2::v4_sweep::<S, false>(store, list, params)
            }
        };
        return (stats, ExecPath::Intrinsic);
    }
    let stats = if swp {
        v4_sweep_portable::<S, true>(store, list, params)
    } else {
        v4_sweep_portable::<S, false>(store, list, params)
    };
    (stats, ExecPath::Portable)
}
