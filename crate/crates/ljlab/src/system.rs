//! Canonical particle state, lattice generation, and the text dump format.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::vec3::Vec3;

/// Canonical particle state; the source of truth for layout conversions.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSystem {
    pub positions: Vec<Vec3>,
    pub momenta: Vec<Vec3>,
    pub params: SimParams,
}

impl ParticleSystem {
    /// Validating constructor for externally supplied data.
    pub fn new(positions: Vec<Vec3>, momenta: Vec<Vec3>, params: SimParams) -> Result<Self> {
        params.validate()?;
        if positions.len() != momenta.len() {
            return Err(Error::InvalidSystem(format!(
                "{} positions but {} momenta",
                positions.len(),
                momenta.len()
            )));
        }
        for (i, q) in positions.iter().enumerate() {
            if !q.is_finite() {
                return Err(Error::InvalidSystem(format!("position {i} is not finite")));
            }
            let inside = |c: f64| (0.0..params.box_edge).contains(&c);
            if !(inside(q.x) && inside(q.y) && inside(q.z)) {
                return Err(Error::InvalidSystem(format!(
                    "position {i} lies outside the box [0, {})^3",
                    params.box_edge
                )));
            }
        }
        if momenta.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSystem("non-finite momentum".into()));
        }
        Ok(ParticleSystem { positions, momenta, params })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn zero_momenta(&mut self) {
        self.momenta.fill(Vec3::ZERO);
    }
}

/// The four-point basis of the face-centered-cubic cell, in cell units.
const FCC_BASIS: [Vec3; 4] = [
    Vec3 { x: 0.0, y: 0.0, z: 0.0 },
    Vec3 { x: 0.0, y: 0.5, z: 0.5 },
    Vec3 { x: 0.5, y: 0.0, z: 0.5 },
    Vec3 { x: 0.5, y: 0.5, z: 0.0 },
];

/// Place `4 * cells_per_side^3` atoms on an FCC lattice starting at `origin`.
///
/// All momenta are zero. The whole block (`cells_per_side * lattice_constant`
/// per edge) must fit inside the box.
pub fn build_fcc(
    cells_per_side: usize,
    lattice_constant: f64,
    origin: Vec3,
    params: SimParams,
) -> Result<ParticleSystem> {
    params.validate()?;
    if cells_per_side == 0 {
        return Err(Error::InvalidParams("cells_per_side must be at least 1".into()));
    }
    if !(lattice_constant > 0.0) || !lattice_constant.is_finite() {
        return Err(Error::InvalidParams(format!(
            "lattice constant must be positive, got {lattice_constant}"
        )));
    }
    let extent = cells_per_side as f64 * lattice_constant;
    let fits = |o: f64| o >= 0.0 && o + extent <= params.box_edge;
    if !(fits(origin.x) && fits(origin.y) && fits(origin.z)) {
        return Err(Error::LatticeOutsideBox { extent, box_edge: params.box_edge });
    }

    let n = 4 * cells_per_side * cells_per_side * cells_per_side;
    let mut positions = Vec::with_capacity(n);
    for cx in 0..cells_per_side {
        for cy in 0..cells_per_side {
            for cz in 0..cells_per_side {
                let cell = Vec3::new(cx as f64, cy as f64, cz as f64);
                for basis in FCC_BASIS {
                    positions.push(origin + (cell + basis) * lattice_constant);
                }
            }
        }
    }
    let momenta = vec![Vec3::ZERO; n];
    Ok(ParticleSystem { positions, momenta, params })
}

/// Lattice constant for number density 1.0: `(4 / rho)^(1/3)` with four
/// atoms per cell.
pub fn unit_density_lattice_constant() -> f64 {
    4.0_f64.cbrt()
}

/// FCC block of `cells^3` cells at local density 1.0, centered in the
/// default box. Zero momenta.
pub fn scaled_system(cells: usize) -> Result<ParticleSystem> {
    let params = SimParams::default();
    let a = unit_density_lattice_constant();
    let extent = cells as f64 * a;
    if extent > params.box_edge {
        return Err(Error::LatticeOutsideBox { extent, box_edge: params.box_edge });
    }
    let o = (params.box_edge - extent) / 2.0;
    build_fcc(cells, a, Vec3::splat(o), params)
}

/// The reference benchmark configuration: box edge 100, cutoff 3.0, and a
/// centered block of 31^3 FCC cells at local density 1.0, which gives
/// 119164 atoms.
pub fn paper_benchmark_system() -> ParticleSystem {
    scaled_system(31).expect("31 cells at unit density fit the default box")
}

/// Write the dump format: count line, `key=value` comment line, then
/// `x y z px py pz` per atom with 17 significant digits so parsing is
/// lossless.
pub fn write_xyz<W: Write>(system: &ParticleSystem, mut w: W) -> Result<()> {
    writeln!(w, "{}", system.n())?;
    let p = &system.params;
    writeln!(
        w,
        "box_edge={:.16e} cutoff={:.16e} search_radius={:.16e} dt={:.16e} n_sweeps={}",
        p.box_edge, p.cutoff, p.search_radius, p.dt, p.n_sweeps
    )?;
    for (q, m) in system.positions.iter().zip(&system.momenta) {
        writeln!(
            w,
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            q.x, q.y, q.z, m.x, m.y, m.z
        )?;
    }
    Ok(())
}

/// Parse the dump format written by [`write_xyz`]. Unknown comment keys are
/// ignored; missing keys fall back to the defaults.
pub fn read_xyz<R: BufRead>(r: R) -> Result<ParticleSystem> {
    let mut lines = r.lines().enumerate();
    let bad = |line: usize, reason: &str| Error::MalformedXyz {
        line: line + 1,
        reason: reason.to_string(),
    };

    let (ln, first) = lines.next().ok_or_else(|| bad(0, "empty input"))?;
    let n: usize = first?
        .trim()
        .parse()
        .map_err(|_| bad(ln, "expected an atom count"))?;

    let (ln, comment) = lines.next().ok_or_else(|| bad(1, "missing comment line"))?;
    let comment = comment?;
    let mut params = SimParams::default();
    for token in comment.split_whitespace() {
        let Some((key, value)) = token.split_once('=') else { continue };
        let parse = |v: &str| -> Result<f64> {
            v.parse().map_err(|_| bad(ln, &format!("bad value for {key}")))
        };
        match key {
            "box_edge" => params.box_edge = parse(value)?,
            "cutoff" => params.cutoff = parse(value)?,
            "search_radius" => params.search_radius = parse(value)?,
            "dt" => params.dt = parse(value)?,
            "n_sweeps" => {
                params.n_sweeps =
                    value.parse().map_err(|_| bad(ln, "bad value for n_sweeps"))?
            }
            _ => {}
        }
    }

    let mut positions = Vec::with_capacity(n);
    let mut momenta = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| bad(2 + positions.len(), "fewer atom lines than the count"))?;
        let line = line?;
        let mut fields = line.split_whitespace();
        let mut vals = [0.0f64; 6];
        for v in vals.iter_mut() {
            let tok = fields
                .next()
                .ok_or_else(|| bad(ln, "expected six decimal fields"))?;
            *v = tok
                .parse()
                .map_err(|_| bad(ln, "expected six decimal fields"))?;
        }
        positions.push(Vec3::new(vals[0], vals[1], vals[2]));
        momenta.push(Vec3::new(vals[3], vals[4], vals[5]));
    }
    ParticleSystem::new(positions, momenta, params)
}
