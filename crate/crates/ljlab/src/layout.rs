//! Memory layouts for particle data and lossless conversions between them.
//!
//! Three arrangements are supported:
//!
//! * `SoA` — six contiguous arrays `x, y, z, px, py, pz`, one element per
//!   atom. Gather element indices equal atom indices.
//! * `AoS4` — padded four-member records `(x, y, z, pad)`, positions and
//!   momenta in separate arrays. Every record starts on a four-element
//!   boundary, so one whole record is a single 256-bit load.
//! * `AoS8` — one padded eight-member record `(x, y, z, pad, px, py, pz,
//!   pad)` per atom, so everything about an atom shares one cache line.
//!   Records start on eight-element boundaries.
//!
//! Padding slots are storage only. Conversions write zeros into them, but
//! their contents are contractually unspecified and no kernel result may
//! depend on them.

use std::fmt;

use crate::params::SimParams;
use crate::system::ParticleSystem;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayoutTag {
    SoA,
    AoS4,
    AoS8,
}

impl fmt::Display for LayoutTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutTag::SoA => "SoA",
            LayoutTag::AoS4 => "AoS4",
            LayoutTag::AoS8 => "AoS8",
        })
    }
}

/// Uniform per-atom access; what the scalar kernels and conversions use.
pub trait AtomStore {
    fn n(&self) -> usize;
    fn position(&self, i: usize) -> Vec3;
    fn momentum(&self, i: usize) -> Vec3;
    fn set_momentum(&mut self, i: usize, p: Vec3);
}

/// Six per-component arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct SoaStorage {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub pz: Vec<f64>,
}

impl AtomStore for SoaStorage {
    fn n(&self) -> usize {
        self.x.len()
    }
    fn position(&self, i: usize) -> Vec3 {
        Vec3::new(self.x[i], self.y[i], self.z[i])
    }
    fn momentum(&self, i: usize) -> Vec3 {
        Vec3::new(self.px[i], self.py[i], self.pz[i])
    }
    fn set_momentum(&mut self, i: usize, p: Vec3) {
        self.px[i] = p.x;
        self.py[i] = p.y;
        self.pz[i] = p.z;
    }
}

/// Four-member records `(x, y, z, pad)`; positions and momenta separate.
#[derive(Clone, Debug, PartialEq)]
pub struct Aos4Storage {
    pub pos: Vec<f64>,
    pub mom: Vec<f64>,
}

impl Aos4Storage {
    pub const STRIDE: usize = 4;
}

impl AtomStore for Aos4Storage {
    fn n(&self) -> usize {
        self.pos.len() / Self::STRIDE
    }
    fn position(&self, i: usize) -> Vec3 {
        let b = Self::STRIDE * i;
        Vec3::new(self.pos[b], self.pos[b + 1], self.pos[b + 2])
    }
    fn momentum(&self, i: usize) -> Vec3 {
        let b = Self::STRIDE * i;
        Vec3::new(self.mom[b], self.mom[b + 1], self.mom[b + 2])
    }
    fn set_momentum(&mut self, i: usize, p: Vec3) {
        let b = Self::STRIDE * i;
        self.mom[b] = p.x;
        self.mom[b + 1] = p.y;
        self.mom[b + 2] = p.z;
    }
}

/// Eight-member records `(x, y, z, pad, px, py, pz, pad)` in one array.
#[derive(Clone, Debug, PartialEq)]
pub struct Aos8Storage {
    pub data: Vec<f64>,
}

impl Aos8Storage {
    pub const STRIDE: usize = 8;
    pub const MOM_OFFSET: usize = 4;
}

impl AtomStore for Aos8Storage {
    fn n(&self) -> usize {
        self.data.len() / Self::STRIDE
    }
    fn position(&self, i: usize) -> Vec3 {
        let b = Self::STRIDE * i;
        Vec3::new(self.data[b], self.data[b + 1], self.data[b + 2])
    }
    fn momentum(&self, i: usize) -> Vec3 {
        let b = Self::STRIDE * i + Self::MOM_OFFSET;
        Vec3::new(self.data[b], self.data[b + 1], self.data[b + 2])
    }
    fn set_momentum(&mut self, i: usize, p: Vec3) {
        let b = Self::STRIDE * i + Self::MOM_OFFSET;
        self.data[b] = p.x;
        self.data[b + 1] = p.y;
        self.data[b + 2] = p.z;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    SoA(SoaStorage),
    AoS4(Aos4Storage),
    AoS8(Aos8Storage),
}

/// A concrete memory arrangement of one system, plus the parameters needed
/// to convert back.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutView {
    pub params: SimParams,
    pub storage: Storage,
}

impl LayoutView {
    pub fn tag(&self) -> LayoutTag {
        match self.storage {
            Storage::SoA(_) => LayoutTag::SoA,
            Storage::AoS4(_) => LayoutTag::AoS4,
            Storage::AoS8(_) => LayoutTag::AoS8,
        }
    }

    pub fn n(&self) -> usize {
        match &self.storage {
            Storage::SoA(s) => s.n(),
            Storage::AoS4(s) => s.n(),
            Storage::AoS8(s) => s.n(),
        }
    }

    pub fn position(&self, i: usize) -> Vec3 {
        match &self.storage {
            Storage::SoA(s) => s.position(i),
            Storage::AoS4(s) => s.position(i),
            Storage::AoS8(s) => s.position(i),
        }
    }

    pub fn momentum(&self, i: usize) -> Vec3 {
        match &self.storage {
            Storage::SoA(s) => s.momentum(i),
            Storage::AoS4(s) => s.momentum(i),
            Storage::AoS8(s) => s.momentum(i),
        }
    }

    pub fn set_momentum(&mut self, i: usize, p: Vec3) {
        match &mut self.storage {
            Storage::SoA(s) => s.set_momentum(i, p),
            Storage::AoS4(s) => s.set_momentum(i, p),
            Storage::AoS8(s) => s.set_momentum(i, p),
        }
    }

    pub fn zero_momenta(&mut self) {
        let n = self.n();
        for i in 0..n {
            self.set_momentum(i, Vec3::ZERO);
        }
    }
}

/// Copy a system into the requested arrangement. Padding slots are written
/// as zero.
pub fn to_layout(system: &ParticleSystem, tag: LayoutTag) -> LayoutView {
    let n = system.n();
    let storage = match tag {
        LayoutTag::SoA => {
            let mut s = SoaStorage {
                x: Vec::with_capacity(n),
                y: Vec::with_capacity(n),
                z: Vec::with_capacity(n),
                px: Vec::with_capacity(n),
                py: Vec::with_capacity(n),
                pz: Vec::with_capacity(n),
            };
            for (q, m) in system.positions.iter().zip(&system.momenta) {
                s.x.push(q.x);
                s.y.push(q.y);
                s.z.push(q.z);
                s.px.push(m.x);
                s.py.push(m.y);
                s.pz.push(m.z);
            }
            Storage::SoA(s)
        }
        LayoutTag::AoS4 => {
            let mut pos = Vec::with_capacity(4 * n);
            let mut mom = Vec::with_capacity(4 * n);
            for (q, m) in system.positions.iter().zip(&system.momenta) {
                pos.extend_from_slice(&[q.x, q.y, q.z, 0.0]);
                mom.extend_from_slice(&[m.x, m.y, m.z, 0.0]);
            }
            Storage::AoS4(Aos4Storage { pos, mom })
        }
        LayoutTag::AoS8 => {
            let mut data = Vec::with_capacity(8 * n);
            for (q, m) in system.positions.iter().zip(&system.momenta) {
                data.extend_from_slice(&[q.x, q.y, q.z, 0.0, m.x, m.y, m.z, 0.0]);
            }
            Storage::AoS8(Aos8Storage { data })
        }
    };
    LayoutView { params: system.params, storage }
}

/// Recover the canonical system. Exact: positions and momenta come back
/// bit-for-bit; padding is dropped.
pub fn from_layout(view: &LayoutView) -> ParticleSystem {
    let n = view.n();
    let mut positions = Vec::with_capacity(n);
    let mut momenta = Vec::with_capacity(n);
    for i in 0..n {
        positions.push(view.position(i));
        momenta.push(view.momentum(i));
    }
    ParticleSystem { positions, momenta, params: view.params }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::build_fcc;
    use proptest::prelude::*;

    fn one_atom_system() -> ParticleSystem {
        ParticleSystem {
            positions: vec![Vec3::new(1.0, 2.0, 3.0)],
            momenta: vec![Vec3::new(4.0, 5.0, 6.0)],
            params: SimParams::default(),
        }
    }

    #[test]
    fn aos4_single_atom_records() {
        let view = to_layout(&one_atom_system(), LayoutTag::AoS4);
        let Storage::AoS4(s) = &view.storage else { panic!() };
        assert_eq!(s.pos, vec![1.0, 2.0, 3.0, 0.0]);
        assert_eq!(s.mom, vec![4.0, 5.0, 6.0, 0.0]);
    }

    #[test]
    fn aos8_single_atom_record() {
        let view = to_layout(&one_atom_system(), LayoutTag::AoS8);
        let Storage::AoS8(s) = &view.storage else { panic!() };
        assert_eq!(s.data, vec![1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 6.0, 0.0]);
    }

    #[test]
    fn aos8_storage_length() {
        let s = build_fcc(1, 1.0, Vec3::ZERO, SimParams::default()).unwrap();
        let mut sys = s;
        sys.positions.push(Vec3::new(9.0, 9.0, 9.0));
        sys.momenta.push(Vec3::ZERO);
        assert_eq!(sys.n(), 5);
        let view = to_layout(&sys, LayoutTag::AoS8);
        let Storage::AoS8(st) = &view.storage else { panic!() };
        assert_eq!(st.data.len(), 40);
    }

    fn assert_round_trip(sys: &ParticleSystem, tag: LayoutTag) {
        let back = from_layout(&to_layout(sys, tag));
        assert_eq!(back.params, sys.params);
        assert_eq!(back.n(), sys.n());
        for (a, b) in back.positions.iter().zip(&sys.positions) {
            assert_eq!(
                [a.x.to_bits(), a.y.to_bits(), a.z.to_bits()],
                [b.x.to_bits(), b.y.to_bits(), b.z.to_bits()]
            );
        }
        for (a, b) in back.momenta.iter().zip(&sys.momenta) {
            assert_eq!(
                [a.x.to_bits(), a.y.to_bits(), a.z.to_bits()],
                [b.x.to_bits(), b.y.to_bits(), b.z.to_bits()]
            );
        }
    }

    proptest! {
        #[test]
        fn round_trip_identity(
            coords in proptest::collection::vec((0.0..100.0f64, 0.0..100.0f64, 0.0..100.0f64), 0..40),
            moms in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64), 0..40),
        ) {
            let n = coords.len().min(moms.len());
            let sys = ParticleSystem {
                positions: coords[..n].iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect(),
                momenta: moms[..n].iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect(),
                params: SimParams::default(),
            };
            for tag in [LayoutTag::SoA, LayoutTag::AoS4, LayoutTag::AoS8] {
                assert_round_trip(&sys, tag);
            }
        }
    }
}
