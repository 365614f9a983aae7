//! Scalar force sweeps: the all-pairs reference, the flat pair-list loop,
//! and the sorted loop with and without software pipelining.

use crate::error::{Error, Result};
use crate::force::pair_force_terms;
use crate::kernels::SweepStats;
use crate::layout::AtomStore;
use crate::neighbor::{PairList, SortedList};
use crate::params::SimParams;
use crate::system::ParticleSystem;
use crate::vec3::Vec3;

/// Momentum deltas from evaluating every pair `i < j` in ascending order.
///
/// Ignores any pair list; this is the ground truth the other kernels are
/// checked against.
pub fn oracle_sweep(system: &ParticleSystem) -> Result<Vec<Vec3>> {
    oracle_sweep_with_stats(system).map(|(deltas, _)| deltas)
}

pub(crate) fn oracle_sweep_with_stats(
    system: &ParticleSystem,
) -> Result<(Vec<Vec3>, SweepStats)> {
    let rc2 = system.params.cutoff_sq();
    let dt = system.params.dt;
    let q = &system.positions;
    let n = system.n();
    let mut deltas = vec![Vec3::ZERO; n];
    let mut stats = SweepStats::default();
    for i in 0..n {
        for j in (i + 1)..n {
            stats.pairs_visited += 1;
            let rvec = q[j] - q[i];
            let r2 = rvec.norm_sq();
            if r2 >= rc2 {
                continue;
            }
            if r2 == 0.0 {
                return Err(Error::CoincidentAtoms { i, j });
            }
            stats.pairs_within_cutoff += 1;
            let f = rvec * pair_force_terms(r2, dt).df;
            deltas[i] -= f;
            deltas[j] += f;
        }
    }
    Ok((deltas, stats))
}

/// Flat loop over the pair list: loads both atoms per pair, momenta touched
/// only inside the cutoff branch.
pub fn pair_sweep<S: AtomStore>(store: &mut S, list: &PairList, params: &SimParams) -> SweepStats {
    let rc2 = params.cutoff_sq();
    let dt = params.dt;
    let mut stats = SweepStats::default();
    for &(i, j) in &list.pairs {
        let (i, j) = (i as usize, j as usize);
        stats.pairs_visited += 1;
        let rvec = store.position(j) - store.position(i);
        let r2 = rvec.norm_sq();
        if r2 < rc2 {
            stats.pairs_within_cutoff += 1;
            let pi = store.momentum(i);
            let pj = store.momentum(j);
            let f = rvec * pair_force_terms(r2, dt).df;
            store.set_momentum(i, pi - f);
            store.set_momentum(j, pj + f);
        }
    }
    stats
}

/// Load stage of one sorted-loop iteration: partner position and distance.
#[inline(always)]
fn load_pair<S: AtomStore>(store: &S, qi: Vec3, j: u32) -> (Vec3, f64) {
    let dq = store.position(j as usize) - qi;
    (dq, dq.norm_sq())
}

/// Compute-and-store stage: cutoff test, impulse, partner write-back, and
/// accumulation into the register-held `p_i`.
#[inline(always)]
fn apply_pair<S: AtomStore>(
    store: &mut S,
    j: u32,
    dq: Vec3,
    r2: f64,
    rc2: f64,
    dt: f64,
    pi: &mut Vec3,
    stats: &mut SweepStats,
) {
    stats.pairs_visited += 1;
    if r2 < rc2 {
        stats.pairs_within_cutoff += 1;
        // One rounded product serves both updates, so the pair cancels
        // exactly in the total momentum.
        let f = dq * pair_force_terms(r2, dt).df;
        let j = j as usize;
        let pj = store.momentum(j);
        store.set_momentum(j, pj + f);
        *pi -= f;
    }
}

/// Grouped loop: the i-atom's position and momentum stay in locals across
/// its group; only partner data is touched inside, and `p_i` is stored once
/// at the end.
pub fn sorted_sweep<S: AtomStore>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
) -> SweepStats {
    let rc2 = params.cutoff_sq();
    let dt = params.dt;
    let mut stats = SweepStats::default();
    for i in 0..list.n_atoms() {
        let (start, end) = (list.offsets[i], list.offsets[i + 1]);
        if start == end {
            continue;
        }
        let qi = store.position(i);
        let mut pi = store.momentum(i);
        for k in start..end {
            let j = list.j_indices[k];
            let (dq, r2) = load_pair(store, qi, j);
            apply_pair(store, j, dq, r2, rc2, dt, &mut pi, &mut stats);
        }
        store.set_momentum(i, pi);
    }
    stats
}

/// [`sorted_sweep`] with the inner loop retimed from `{ABCD}^n` to
/// `AB{CDAB}^(n-1)CD`: each iteration overlaps the previous pair's
/// compute-and-store with the next pair's load. Same operations in the same
/// per-pair order, so the momenta are bit-identical to the plain loop.
pub fn sorted_swp_sweep<S: AtomStore>(
    store: &mut S,
    list: &SortedList,
    params: &SimParams,
) -> SweepStats {
    let rc2 = params.cutoff_sq();
    let dt = params.dt;
    let mut stats = SweepStats::default();
    for i in 0..list.n_atoms() {
        let (start, end) = (list.offsets[i], list.offsets[i + 1]);
        if start == end {
            continue;
        }
        let qi = store.position(i);
        let mut pi = store.momentum(i);

        // Prologue: load the first pair.
        let mut j = list.j_indices[start];
        let (mut dq, mut r2) = load_pair(store, qi, j);
        // Steady state: store pair k, load pair k+1.
        for k in (start + 1)..end {
            let next = list.j_indices[k];
            apply_pair(store, j, dq, r2, rc2, dt, &mut pi, &mut stats);
            j = next;
            (dq, r2) = load_pair(store, qi, j);
        }
        // Epilogue: store the last pair.
        apply_pair(store, j, dq, r2, rc2, dt, &mut pi, &mut stats);

        store.set_momentum(i, pi);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{to_layout, LayoutTag, Storage};
    use crate::neighbor::{build_lists, sort_pair_list};
    use crate::system::build_fcc;

    fn tiny_system(positions: Vec<Vec3>) -> ParticleSystem {
        let params = SimParams { box_edge: 20.0, ..SimParams::default() };
        let momenta = vec![Vec3::ZERO; positions.len()];
        ParticleSystem { positions, momenta, params }
    }

    #[test]
    fn oracle_two_atoms_at_minimum_distance() {
        let r = 2.0_f64.powf(1.0 / 6.0);
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(5.0 + r, 5.0, 5.0)]);
        let deltas = oracle_sweep(&s).unwrap();
        for d in deltas {
            assert!(d.max_abs() < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn oracle_two_atoms_at_unit_distance() {
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(6.0, 5.0, 5.0)]);
        let deltas = oracle_sweep(&s).unwrap();
        assert_eq!(deltas[0], Vec3::new(-24.0, 0.0, 0.0));
        assert_eq!(deltas[1], Vec3::new(24.0, 0.0, 0.0));
    }

    #[test]
    fn oracle_equilateral_triangle() {
        // Unit side: both incident pairs push each vertex outward with
        // |dp| = 24 * sqrt(3); the three deltas cancel.
        let h = 3.0_f64.sqrt() / 2.0;
        let s = tiny_system(vec![
            Vec3::new(5.0, 5.0, 5.0),
            Vec3::new(6.0, 5.0, 5.0),
            Vec3::new(5.5, 5.0 + h, 5.0),
        ]);
        let deltas = oracle_sweep(&s).unwrap();
        let expect = 41.569219381653056; // 24 * sqrt(3)
        let mut total = Vec3::ZERO;
        for d in &deltas {
            assert!((d.norm_sq().sqrt() - expect).abs() < 1e-12, "{d:?}");
            total += *d;
        }
        assert!(total.max_abs() < 1e-13, "{total:?}");
    }

    #[test]
    fn oracle_rejects_coincident_atoms() {
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::splat(5.0)]);
        assert!(matches!(
            oracle_sweep(&s),
            Err(Error::CoincidentAtoms { i: 0, j: 1 })
        ));
    }

    #[test]
    fn pair_sweep_empty_list_is_identity() {
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(9.0, 5.0, 5.0)]);
        let mut view = to_layout(&s, LayoutTag::SoA);
        let before = view.clone();
        let Storage::SoA(store) = &mut view.storage else { panic!() };
        let stats = pair_sweep(store, &PairList::default(), &s.params);
        assert_eq!(stats.pairs_visited, 0);
        assert_eq!(view, before);
    }

    #[test]
    fn single_pair_matches_oracle_bitwise() {
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(7.1, 5.3, 4.2)]);
        let deltas = oracle_sweep(&s).unwrap();

        let (pairs, sorted) = build_lists(&s).unwrap();
        assert_eq!(pairs.pairs, vec![(0, 1)]);

        let mut view = to_layout(&s, LayoutTag::SoA);
        {
            let Storage::SoA(store) = &mut view.storage else { panic!() };
            pair_sweep(store, &pairs, &s.params);
        }
        for i in 0..2 {
            let got = view.momentum(i);
            assert_eq!(got.x.to_bits(), deltas[i].x.to_bits());
            assert_eq!(got.y.to_bits(), deltas[i].y.to_bits());
            assert_eq!(got.z.to_bits(), deltas[i].z.to_bits());
        }

        // The sorted kernel performs the identical operations on one pair.
        let mut view2 = to_layout(&s, LayoutTag::SoA);
        {
            let Storage::SoA(store) = &mut view2.storage else { panic!() };
            sorted_sweep(store, &sorted, &s.params);
        }
        assert_eq!(view, view2);
    }

    #[test]
    fn sorted_skips_out_of_range_partner() {
        // Within the search radius but beyond the cutoff: registered in the
        // list, must contribute nothing.
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(8.2, 5.0, 5.0)]);
        let (_, sorted) = build_lists(&s).unwrap();
        assert_eq!(sorted.total_pairs(), 1);
        let mut view = to_layout(&s, LayoutTag::SoA);
        let Storage::SoA(store) = &mut view.storage else { panic!() };
        let stats = sorted_sweep(store, &sorted, &s.params);
        assert_eq!(stats.pairs_visited, 1);
        assert_eq!(stats.pairs_within_cutoff, 0);
        assert_eq!(store.momentum(0), Vec3::ZERO);
        assert_eq!(store.momentum(1), Vec3::ZERO);
    }

    #[test]
    fn swp_handles_empty_and_singleton_groups() {
        // Empty list: no group runs at all.
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(9.0, 5.0, 5.0)]);
        let sorted = sort_pair_list(&PairList::default(), 2);
        let mut view = to_layout(&s, LayoutTag::SoA);
        let before = view.clone();
        {
            let Storage::SoA(store) = &mut view.storage else { panic!() };
            sorted_swp_sweep(store, &sorted, &s.params);
        }
        assert_eq!(view, before);

        // Singleton group: prologue + epilogue only, identical to the plain loop.
        let s = tiny_system(vec![Vec3::splat(5.0), Vec3::new(6.4, 5.7, 5.2)]);
        let (_, sorted) = build_lists(&s).unwrap();
        let mut a = to_layout(&s, LayoutTag::SoA);
        let mut b = to_layout(&s, LayoutTag::SoA);
        {
            let Storage::SoA(store) = &mut a.storage else { panic!() };
            sorted_sweep(store, &sorted, &s.params);
        }
        {
            let Storage::SoA(store) = &mut b.storage else { panic!() };
            sorted_swp_sweep(store, &sorted, &s.params);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn swp_is_bit_identical_on_a_lattice() {
        let s = build_fcc(3, 4.0_f64.cbrt(), Vec3::splat(40.0), SimParams::default()).unwrap();
        let (_, sorted) = build_lists(&s).unwrap();
        let mut a = to_layout(&s, LayoutTag::SoA);
        let mut b = to_layout(&s, LayoutTag::SoA);
        let (sa, sb);
        {
            let Storage::SoA(store) = &mut a.storage else { panic!() };
            sa = sorted_sweep(store, &sorted, &s.params);
        }
        {
            let Storage::SoA(store) = &mut b.storage else { panic!() };
            sb = sorted_swp_sweep(store, &sorted, &s.params);
        }
        assert_eq!(sa, sb);
        assert_eq!(a, b);
    }
}
