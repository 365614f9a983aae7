//! A laboratory for truncated Lennard-Jones force kernels.
//!
//! One physical problem — an FCC cluster of atoms with a truncated pair
//! potential — swept by a matrix of force kernels: scalar pair/sorted
//! loops, software-pipelined variants, and 4- and 8-wide vector kernels
//! over three memory layouts (SoA, padded 4-member AoS, padded 8-member
//! AoS). Every kernel is checked against a brute-force reference, and a
//! harness times repeated force sweeps and reports CSV or JSON.
//!
//! Vector kernels carry two build paths with identical semantics: hardware
//! intrinsics (AVX2 at width 4, AVX-512 at width 8) picked up at runtime,
//! and a portable lane emulation that runs anywhere. All data types are
//! plain values; kernels are single-threaded over their views.

pub mod bench;
pub mod error;
pub mod force;
pub mod kernels;
pub mod layout;
pub mod neighbor;
pub mod params;
pub mod system;
pub mod vec3;

pub use error::{Error, Result};
pub use params::SimParams;
pub use system::ParticleSystem;
pub use vec3::Vec3;
