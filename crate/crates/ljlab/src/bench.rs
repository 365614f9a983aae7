//! Benchmark harness: time `n_sweeps` consecutive force sweeps per kernel.
//!
//! List construction and layout conversion happen outside the timed region;
//! only the sweeps themselves are measured. Momenta are reset before every
//! repeat so each repeat performs identical arithmetic, and the minimum
//! over repeats is the headline number (the mean and standard deviation are
//! reported alongside).

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_info, run_sweep, ExecPath, KernelId, SweepStats};
use crate::layout::{to_layout, LayoutTag, LayoutView};
use crate::neighbor::build_lists;
use crate::system::{paper_benchmark_system, read_xyz, scaled_system, ParticleSystem};

/// Where the benchmark system comes from.
#[derive(Clone, Debug)]
pub enum SystemSource {
    /// The reference configuration (119164 atoms in a 100-edge box).
    Paper,
    /// `cells^3` FCC cells at unit density in the default box.
    Scaled(usize),
    /// A dump previously written by `gen`.
    File(PathBuf),
}

impl SystemSource {
    pub fn build(&self) -> Result<ParticleSystem> {
        match self {
            SystemSource::Paper => Ok(paper_benchmark_system()),
            SystemSource::Scaled(cells) => scaled_system(*cells),
            SystemSource::File(path) => read_xyz(BufReader::new(File::open(path)?)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub kernels: Vec<KernelId>,
    pub source: SystemSource,
    /// Timed runs per kernel; at least 1.
    pub repeats: usize,
    /// Untimed full runs before the timed ones.
    pub warmup: usize,
    /// Override of the system's search radius.
    pub search_radius: Option<f64>,
    /// Override of the system's impulse scale.
    pub dt: Option<f64>,
    /// Pin vector kernels to the portable path.
    pub force_portable: bool,
}

impl BenchConfig {
    pub fn new(kernels: Vec<KernelId>, source: SystemSource) -> Self {
        BenchConfig {
            kernels,
            source,
            repeats: 3,
            warmup: 1,
            search_radius: None,
            dt: None,
            force_portable: false,
        }
    }
}

/// Timing record for one kernel under the sweep protocol.
#[derive(Clone, Debug)]
pub struct BenchResult {
    pub kernel: KernelId,
    pub layout: LayoutTag,
    pub path: ExecPath,
    pub n: usize,
    /// Seconds per full `n_sweeps` run, one sample per repeat.
    pub samples_s: Vec<f64>,
    pub min_s: f64,
    pub mean_s: f64,
    pub stddev_s: f64,
    pub pairs_within_cutoff: u64,
    /// Sum of the absolute momentum components after the final repeat; a
    /// deterministic fingerprint for cross-kernel agreement checks.
    pub checksum: f64,
}

/// Fingerprint of a view's momenta: the L1 norm over all components.
pub fn momentum_checksum(view: &LayoutView) -> f64 {
    let mut sum = 0.0;
    for i in 0..view.n() {
        let p = view.momentum(i);
        sum += p.x.abs() + p.y.abs() + p.z.abs();
    }
    sum
}

/// Wall-clock seconds spent in `f`, monotonic clock.
pub fn measure<F: FnOnce()>(f: F) -> f64 {
    let start = Instant::now();
    f();
    start.elapsed().as_secs_f64()
}

fn sample_stats(samples: &[f64]) -> (f64, f64, f64) {
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let stddev = if samples.len() > 1 {
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
            / (samples.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    (min, mean, stddev)
}

/// Run the configured kernels over one freshly built system.
///
/// The system, pair list, sorted list, and layout conversions are all built
/// outside the timed region; timing covers exactly `n_sweeps` consecutive
/// sweeps per sample.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchResult>> {
    if config.repeats < 1 {
        return Err(Error::InvalidParams("repeats must be at least 1".into()));
    }
    let mut system = config.source.build()?;
    if let Some(rs) = config.search_radius {
        system.params.search_radius = rs;
    }
    if let Some(dt) = config.dt {
        system.params.dt = dt;
    }
    system.params.validate()?;
    let params = system.params;
    let (pair_list, sorted_list) = build_lists(&system)?;

    let mut results = Vec::with_capacity(config.kernels.len());
    for &id in &config.kernels {
        let info = kernel_info(id);
        let mut view = to_layout(&system, info.layout);

        let mut last: Option<(SweepStats, ExecPath)> = None;
        for _ in 0..config.warmup {
            view.zero_momenta();
            for _ in 0..params.n_sweeps {
                run_sweep(id, &mut view, &pair_list, &sorted_list, &params, config.force_portable)?;
            }
        }

        let mut samples = Vec::with_capacity(config.repeats);
        for _ in 0..config.repeats {
            view.zero_momenta();
            let start = Instant::now();
            for _ in 0..params.n_sweeps {
                let out = run_sweep(
                    id,
                    &mut view,
                    &pair_list,
                    &sorted_list,
                    &params,
                    config.force_portable,
                )?;
                last = Some(out);
            }
            samples.push(start.elapsed().as_secs_f64());
        }

        let (stats, path) = last.expect("at least one timed sweep ran");
        let (min_s, mean_s, stddev_s) = sample_stats(&samples);
        results.push(BenchResult {
            kernel: id,
            layout: info.layout,
            path,
            n: system.n(),
            samples_s: samples,
            min_s,
            mean_s,
            stddev_s,
            pairs_within_cutoff: stats.pairs_within_cutoff,
            checksum: momentum_checksum(&view),
        });
    }
    Ok(results)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "kernel,layout,path,n,min_s,mean_s,stddev_s,pairs_in_cutoff,checksum";

/// One machine-readable row; the JSON report mirrors the CSV columns.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub kernel: String,
    pub layout: String,
    pub path: String,
    pub n: usize,
    pub min_s: f64,
    pub mean_s: f64,
    pub stddev_s: f64,
    pub pairs_in_cutoff: u64,
    pub checksum: f64,
}

impl From<&BenchResult> for ReportRow {
    fn from(r: &BenchResult) -> Self {
        ReportRow {
            kernel: r.kernel.to_string(),
            layout: r.layout.to_string(),
            path: r.path.to_string(),
            n: r.n,
            min_s: r.min_s,
            mean_s: r.mean_s,
            stddev_s: r.stddev_s,
            pairs_in_cutoff: r.pairs_within_cutoff,
            checksum: r.checksum,
        }
    }
}

/// Render results, ordered by kernel id.
pub fn report(results: &[BenchResult], format: ReportFormat) -> String {
    let mut ordered: Vec<&BenchResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.kernel);
    let rows: Vec<ReportRow> = ordered.iter().map(|r| ReportRow::from(*r)).collect();
    match format {
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.kernel,
                    r.layout,
                    r.path,
                    r.n,
                    r.min_s,
                    r.mean_s,
                    r.stddev_s,
                    r.pairs_in_cutoff,
                    r.checksum
                ));
            }
            out
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(&rows).expect("plain data serializes");
            out.push('\n');
            out
        }
    }
}
