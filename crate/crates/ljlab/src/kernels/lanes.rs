//! Portable lane vectors: the scalar-emulation path of the vector kernels.
//!
//! Arithmetic is elementwise and uses the same IEEE operations in the same
//! order as the hardware-intrinsic path, so the two paths produce identical
//! bits.

use std::ops::{Add, AddAssign, Div, Mul, Sub};

/// `W` parallel f64 lanes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaneVec<const W: usize>(pub [f64; W]);

/// Per-lane on/off flags. An off lane of a store writes nothing; an off
/// lane of a gather yields a caller-chosen substitute that must be
/// annihilated before it can influence a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaneMask<const W: usize>(pub [bool; W]);

impl<const W: usize> LaneVec<W> {
    pub const ZERO: LaneVec<W> = LaneVec([0.0; W]);

    pub fn splat(v: f64) -> Self {
        LaneVec([v; W])
    }

    pub fn lane(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// Lanes compare strictly below the other operand.
    pub fn lt(self, rhs: LaneVec<W>) -> LaneMask<W> {
        LaneMask(std::array::from_fn(|k| self.0[k] < rhs.0[k]))
    }

    /// Keep active lanes, zero the rest.
    pub fn zero_inactive(self, m: LaneMask<W>) -> Self {
        LaneVec(std::array::from_fn(|k| if m.0[k] { self.0[k] } else { 0.0 }))
    }

    /// Horizontal sum in fixed lane order 0..W, for reproducibility.
    pub fn reduce_add_ordered(self) -> f64 {
        let mut acc = self.0[0];
        for k in 1..W {
            acc += self.0[k];
        }
        acc
    }
}

impl<const W: usize> LaneMask<W> {
    pub const ALL: LaneMask<W> = LaneMask([true; W]);
    pub const NONE: LaneMask<W> = LaneMask([false; W]);

    pub fn and(self, rhs: LaneMask<W>) -> Self {
        LaneMask(std::array::from_fn(|k| self.0[k] && rhs.0[k]))
    }

    pub fn count(self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn any(self) -> bool {
        self.0.iter().any(|&b| b)
    }
}

macro_rules! lanewise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<const W: usize> $trait for LaneVec<W> {
            type Output = LaneVec<W>;
            fn $method(self, rhs: LaneVec<W>) -> LaneVec<W> {
                LaneVec(std::array::from_fn(|k| self.0[k] $op rhs.0[k]))
            }
        }
    };
}

lanewise!(Add, add, +);
lanewise!(Sub, sub, -);
lanewise!(Mul, mul, *);
lanewise!(Div, div, /);

impl<const W: usize> AddAssign for LaneVec<W> {
    fn add_assign(&mut self, rhs: LaneVec<W>) {
        *self = *self + rhs;
    }
}

/// Turn four `(x, y, z, pad)` records into per-component lane vectors; the
/// pad component is dropped.
pub fn transpose4(r: [LaneVec<4>; 4]) -> (LaneVec<4>, LaneVec<4>, LaneVec<4>) {
    let col = |c: usize| LaneVec([r[0].0[c], r[1].0[c], r[2].0[c], r[3].0[c]]);
    (col(0), col(1), col(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_components() {
        let rows: [LaneVec<4>; 4] = std::array::from_fn(|k| {
            let k = k as f64;
            LaneVec([k, 10.0 * k, 100.0 * k, f64::NAN])
        });
        let (x, y, z) = transpose4(rows);
        assert_eq!(x, LaneVec([0.0, 1.0, 2.0, 3.0]));
        assert_eq!(y, LaneVec([0.0, 10.0, 20.0, 30.0]));
        assert_eq!(z, LaneVec([0.0, 100.0, 200.0, 300.0]));
    }

    #[test]
    fn transpose_zero() {
        let (x, y, z) = transpose4([LaneVec::ZERO; 4]);
        assert_eq!(x, LaneVec::ZERO);
        assert_eq!(y, LaneVec::ZERO);
        assert_eq!(z, LaneVec::ZERO);
    }

    #[test]
    fn transpose_repack_recovers_rows() {
        let rows: [LaneVec<4>; 4] =
            std::array::from_fn(|k| LaneVec(std::array::from_fn(|c| (4 * k + c) as f64)));
        let (x, y, z) = transpose4(rows);
        for k in 0..4 {
            assert_eq!(
                [x.0[k], y.0[k], z.0[k]],
                [rows[k].0[0], rows[k].0[1], rows[k].0[2]]
            );
        }
    }

    #[test]
    fn mask_and_reduction() {
        let v = LaneVec([1.0, 2.0, 3.0, 4.0]);
        let m = v.lt(LaneVec::splat(2.5));
        assert_eq!(m, LaneMask([true, true, false, false]));
        assert_eq!(v.zero_inactive(m), LaneVec([1.0, 2.0, 0.0, 0.0]));
        assert_eq!(m.count(), 2);
        assert_eq!(v.reduce_add_ordered(), 10.0);
    }
}
