#![allow(dead_code)]

use ljlab::kernels::{kernel_info, run_sweep, ExecPath, KernelId, SweepStats};
use ljlab::layout::{from_layout, to_layout};
use ljlab::neighbor::{build_lists, PairList, SortedList};
use ljlab::system::scaled_system;
use ljlab::{ParticleSystem, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// FCC block at unit density with every coordinate jittered uniformly by
/// `±jitter`. Small jitter keeps pairs well separated, so absolute
/// tolerances on momenta stay meaningful.
pub fn jittered_system(cells: usize, jitter: f64, seed: u64) -> ParticleSystem {
    let mut sys = scaled_system(cells).expect("scaled system fits the box");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for q in &mut sys.positions {
        q.x += rng.gen_range(-jitter..jitter);
        q.y += rng.gen_range(-jitter..jitter);
        q.z += rng.gen_range(-jitter..jitter);
    }
    sys
}

/// A system with its lists built once, ready to sweep kernels over.
pub struct Prepared {
    pub system: ParticleSystem,
    pub pairs: PairList,
    pub sorted: SortedList,
}

impl Prepared {
    pub fn new(system: ParticleSystem) -> Self {
        let (pairs, sorted) = build_lists(&system).expect("list construction");
        Prepared { system, pairs, sorted }
    }

    /// One sweep from zero momenta; returns the resulting momenta.
    pub fn sweep_once(&self, id: KernelId, force_portable: bool) -> (Vec<Vec3>, SweepStats, ExecPath) {
        self.sweep_n(id, 1, force_portable)
    }

    /// `n_sweeps` consecutive sweeps from zero momenta.
    pub fn sweep_n(
        &self,
        id: KernelId,
        n_sweeps: usize,
        force_portable: bool,
    ) -> (Vec<Vec3>, SweepStats, ExecPath) {
        let info = kernel_info(id);
        let mut view = to_layout(&self.system, info.layout);
        let mut last = None;
        for _ in 0..n_sweeps {
            let out = run_sweep(
                id,
                &mut view,
                &self.pairs,
                &self.sorted,
                &self.system.params,
                force_portable,
            )
            .expect("kernel dispatch");
            last = Some(out);
        }
        let (stats, path) = last.expect("at least one sweep");
        (from_layout(&view).momenta, stats, path)
    }
}

pub fn max_component_deviation(a: &[Vec3], b: &[Vec3]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).max_abs())
        .fold(0.0, f64::max)
}

pub fn bits_equal(a: &[Vec3], b: &[Vec3]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.x.to_bits() == y.x.to_bits()
                && x.y.to_bits() == y.y.to_bits()
                && x.z.to_bits() == y.z.to_bits()
        })
}

pub fn total_momentum(momenta: &[Vec3]) -> Vec3 {
    let mut sum = Vec3::ZERO;
    for p in momenta {
        sum += *p;
    }
    sum
}
