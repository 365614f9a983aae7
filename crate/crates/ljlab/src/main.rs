//! Command-line front end: generate systems, verify kernels against the
//! reference, benchmark, and list the kernel registry.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ljlab::bench::{report, run_bench, BenchConfig, ReportFormat, SystemSource};
use ljlab::kernels::{kernel_info, list_kernels, oracle_sweep, run_sweep, KernelId};
use ljlab::layout::{from_layout, to_layout};
use ljlab::neighbor::build_lists;
use ljlab::system::{build_fcc, scaled_system, unit_density_lattice_constant, write_xyz};
use ljlab::{Result, SimParams, Vec3};

#[derive(Parser)]
#[command(name = "ljlab", about = "Truncated Lennard-Jones force-kernel laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an FCC system and write it as a text dump.
    Gen {
        /// FCC cells per box edge; the system holds 4 * cells^3 atoms.
        #[arg(long, default_value_t = 16)]
        cells: usize,
        /// Lattice constant; the default gives number density 1.0.
        #[arg(long)]
        lattice_const: Option<f64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare one kernel against the all-pairs reference.
    Verify {
        /// Kernel name as printed by `list-kernels`.
        #[arg(long)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        /// Maximum allowed per-component deviation.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Pin vector kernels to the portable path.
        #[arg(long)]
        portable: bool,
    },
    /// Time repeated force sweeps for a set of kernels.
    Bench {
        /// Comma-separated kernel names, or `all`.
        #[arg(long, default_value = "all")]
        kernels: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Untimed warmup runs per kernel.
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        /// Use the reference configuration (119164 atoms).
        #[arg(long, conflicts_with_all = ["cells", "file"])]
        paper: bool,
        /// FCC cells per edge for a scaled system.
        #[arg(long, conflicts_with = "file")]
        cells: Option<usize>,
        /// Benchmark a previously generated dump.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Override the search radius.
        #[arg(long)]
        rs: Option<f64>,
        /// Override the impulse scale.
        #[arg(long)]
        dt: Option<f64>,
        /// Pin vector kernels to the portable path.
        #[arg(long)]
        portable: bool,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the kernel registry.
    ListKernels,
}

/// Clap adapter for kernel names.
#[derive(Clone, Copy)]
struct KernelArg(KernelId);

impl std::str::FromStr for KernelArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.parse::<KernelId>().map(KernelArg).map_err(|e| e.to_string())
    }
}

fn parse_kernel_set(names: &str) -> Result<Vec<KernelId>> {
    if names.trim() == "all" {
        return Ok(KernelId::ALL.to_vec());
    }
    names
        .split(',')
        .map(|name| name.trim().parse::<KernelId>())
        .collect()
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(text.as_bytes())?;
            f.flush()?;
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_gen(cells: usize, lattice_const: Option<f64>, out: Option<PathBuf>) -> Result<()> {
    let params = SimParams::default();
    let a = lattice_const.unwrap_or_else(unit_density_lattice_constant);
    let extent = cells as f64 * a;
    let origin = Vec3::splat((params.box_edge - extent) / 2.0);
    let system = build_fcc(cells, a, origin, params)?;
    match out {
        Some(p) => write_xyz(&system, BufWriter::new(File::create(p)?)),
        None => write_xyz(&system, io::stdout().lock()),
    }
}

fn cmd_verify(kernel: KernelId, cells: usize, tol: f64, portable: bool) -> Result<bool> {
    let system = scaled_system(cells)?;
    let expected = oracle_sweep(&system)?;
    let (pair_list, sorted_list) = build_lists(&system)?;

    let info = kernel_info(kernel);
    let mut view = to_layout(&system, info.layout);
    let (_, path) = run_sweep(kernel, &mut view, &pair_list, &sorted_list, &system.params, portable)?;
    let got = from_layout(&view).momenta;

    let mut max_dev = 0.0f64;
    for (g, e) in got.iter().zip(&expected) {
        max_dev = max_dev.max((*g - *e).max_abs());
    }
    let ok = max_dev <= tol;
    println!(
        "kernel={} layout={} path={} n={} max_deviation={:e} tol={:e} => {}",
        kernel,
        info.layout,
        path,
        system.n(),
        max_dev,
        tol,
        if ok { "OK" } else { "FAIL" }
    );
    Ok(ok)
}

fn cmd_bench(
    kernels: &str,
    repeats: usize,
    warmup: usize,
    paper: bool,
    cells: Option<usize>,
    file: Option<PathBuf>,
    format: OutputFormat,
    rs: Option<f64>,
    dt: Option<f64>,
    portable: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let source = if paper {
        SystemSource::Paper
    } else if let Some(path) = file {
        SystemSource::File(path)
    } else {
        SystemSource::Scaled(cells.unwrap_or(16))
    };
    let mut config = BenchConfig::new(parse_kernel_set(kernels)?, source);
    config.repeats = repeats;
    config.warmup = warmup;
    config.search_radius = rs;
    config.dt = dt;
    config.force_portable = portable;

    let results = run_bench(&config)?;
    let text = report(
        &results,
        match format {
            OutputFormat::Csv => ReportFormat::Csv,
            OutputFormat::Json => ReportFormat::Json,
        },
    );
    write_output(out.as_ref(), &text)
}

fn cmd_list_kernels() {
    for info in list_kernels() {
        println!(
            "{:16} layout={:5} list={:7} {}",
            info.id.to_string(),
            info.layout.to_string(),
            format!("{:?}", info.list).to_lowercase(),
            info.description
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen { cells, lattice_const, out } => cmd_gen(cells, lattice_const, out).map(|_| true),
        Command::Verify { kernel, cells, tol, portable } => cmd_verify(kernel.0, cells, tol, portable),
        Command::Bench {
            kernels,
            repeats,
            warmup,
            paper,
            cells,
            file,
            format,
            rs,
            dt,
            portable,
            out,
        } => cmd_bench(
            &kernels, repeats, warmup, paper, cells, file, format, rs, dt, portable, out,
        )
        .map(|_| true),
        Command::ListKernels => {
            cmd_list_kernels();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
