//! Cross-kernel invariants on randomized systems: reference agreement for
//! every kernel and path, padding independence, cutoff-mask soundness, and
//! momentum conservation at full benchmark scale.

mod common;

use common::{bits_equal, jittered_system, max_component_deviation, total_momentum, Prepared};
use ljlab::kernels::{kernel_info, list_kernels, oracle_sweep, run_sweep, KernelId};
use ljlab::layout::{from_layout, to_layout, Storage};
use ljlab::system::paper_benchmark_system;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_kernel_matches_the_reference_on_jittered_systems() {
    for seed in [1, 2, 3] {
        let prep = Prepared::new(jittered_system(5, 0.1, seed));
        let expected = oracle_sweep(&prep.system).unwrap();
        for info in list_kernels() {
            for force_portable in [true, false] {
                let (got, _, path) = prep.sweep_once(info.id, force_portable);
                let dev = max_component_deviation(&got, &expected);
                assert!(
                    dev <= 1e-9,
                    "seed {seed}, kernel {} ({path}): deviation {dev:e}",
                    info.id
                );
            }
        }
    }
}

#[test]
fn every_kernel_matches_the_reference_at_two_thousand_atoms() {
    let prep = Prepared::new(jittered_system(8, 0.1, 17));
    assert_eq!(prep.system.n(), 2048);
    let expected = oracle_sweep(&prep.system).unwrap();
    for info in list_kernels() {
        let (got, _, _) = prep.sweep_once(info.id, false);
        let dev = max_component_deviation(&got, &expected);
        assert!(dev <= 1e-9, "kernel {}: deviation {dev:e}", info.id);
    }
}

#[test]
fn lane_widths_agree_with_each_other() {
    let prep = Prepared::new(jittered_system(5, 0.1, 11));
    let (v4, _, _) = prep.sweep_once(KernelId::Aos4V4, false);
    let (v8, _, _) = prep.sweep_once(KernelId::SoaV8Rle, false);
    let dev = max_component_deviation(&v4, &v8);
    assert!(dev <= 1e-9, "width-4 vs width-8 deviation {dev:e}");
}

/// Scrambling every padding slot must not change a single output bit.
#[test]
fn padding_slots_never_affect_results() {
    let prep = Prepared::new(jittered_system(4, 0.1, 7));
    let padded_ids = [
        KernelId::Aos4V4,
        KernelId::Aos4V4Swp,
        KernelId::Aos8V8RleSwp,
        KernelId::Aos8V4Swp,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for id in padded_ids {
        for force_portable in [true, false] {
            let info = kernel_info(id);
            let mut clean = to_layout(&prep.system, info.layout);
            let mut dirty = clean.clone();
            match &mut dirty.storage {
                Storage::AoS4(s) => {
                    for k in (3..s.pos.len()).step_by(4) {
                        s.pos[k] = rng.gen_range(-1e6..1e6);
                        s.mom[k] = rng.gen_range(-1e6..1e6);
                    }
                }
                Storage::AoS8(s) => {
                    for k in (0..s.data.len()).step_by(8) {
                        s.data[k + 3] = rng.gen_range(-1e6..1e6);
                        s.data[k + 7] = rng.gen_range(-1e6..1e6);
                    }
                }
                Storage::SoA(_) => unreachable!("padded kernels only"),
            }
            for view in [&mut clean, &mut dirty] {
                run_sweep(id, view, &prep.pairs, &prep.sorted, &prep.system.params, force_portable)
                    .unwrap();
            }
            let a = from_layout(&clean).momenta;
            let b = from_layout(&dirty).momenta;
            assert!(bits_equal(&a, &b), "{id} output depends on padding");
        }
    }
}

/// Pairs registered beyond the cutoff contribute exactly zero: deleting
/// them from the list (rebuilding with the search radius at the cutoff)
/// changes per-atom momenta only through block repartitioning, bounded by
/// 1e-12.
#[test]
fn masked_pairs_contribute_nothing() {
    let mut system = jittered_system(4, 0.1, 21);
    let full = Prepared::new(system.clone());
    system.params.search_radius = system.params.cutoff * (1.0 + 1e-12);
    let trimmed = Prepared::new(system);
    assert!(trimmed.sorted.total_pairs() < full.sorted.total_pairs());

    for info in list_kernels() {
        if info.id == KernelId::Oracle {
            continue;
        }
        let (a, sa, _) = full.sweep_once(info.id, false);
        let (b, sb, _) = trimmed.sweep_once(info.id, false);
        assert_eq!(sa.pairs_within_cutoff, sb.pairs_within_cutoff, "{}", info.id);
        let dev = max_component_deviation(&a, &b);
        assert!(dev <= 1e-12, "{}: deleted-pair deviation {dev:e}", info.id);
    }
}

#[test]
fn momentum_is_conserved_at_benchmark_scale() {
    let prep = Prepared::new(paper_benchmark_system());
    for info in list_kernels() {
        if info.id == KernelId::Oracle {
            continue; // the all-pairs reference is quadratic at this size
        }
        let (momenta, stats, _) = prep.sweep_once(info.id, false);
        assert_eq!(stats.pairs_visited as usize, prep.sorted.total_pairs(), "{}", info.id);
        let total = total_momentum(&momenta);
        assert!(
            total.max_abs() <= 1e-8,
            "{}: net momentum {total:?} after one sweep of {} atoms",
            info.id,
            prep.system.n()
        );
    }
}

/// Doubling the atom count at fixed density should scale the list build
/// roughly linearly. Informative: printed, not asserted, since wall-clock
/// ratios are noisy on shared machines.
#[test]
fn pair_list_build_scales_linearly_informative() {
    use ljlab::bench::measure;
    use ljlab::neighbor::build_lists;
    use ljlab::system::scaled_system;

    let small = scaled_system(10).unwrap();
    let large = scaled_system(13).unwrap(); // 8788 atoms, about 2.2x the 4000 above
    let t_small = measure(|| {
        build_lists(&small).unwrap();
    });
    let t_large = measure(|| {
        build_lists(&large).unwrap();
    });
    let n_ratio = large.n() as f64 / small.n() as f64;
    println!(
        "list build: n {} -> {} ({n_ratio:.2}x atoms), time {t_small:.4}s -> {t_large:.4}s ({:.2}x)",
        small.n(),
        large.n(),
        t_large / t_small
    );
}
