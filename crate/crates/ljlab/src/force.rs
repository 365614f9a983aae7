//! Scalar pair-force math shared by every kernel.
//!
//! In reduced units (well depth and diameter both 1) the pair impulse
//! coefficient is `df = (48 - 24 r^6) * dt / r^14`, applied as
//! `p_i -= df * r` and `p_j += df * r` with `r = q_j - q_i`. The cutoff is
//! never applied here; masking out-of-range pairs is the caller's job.

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Intermediate powers and the impulse coefficient for one pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairForceTerms {
    pub r2: f64,
    pub r6: f64,
    pub r14: f64,
    pub df: f64,
}

/// Powers of the squared distance and the impulse coefficient.
///
/// Kept as the single source of the arithmetic sequence so scalar and
/// vector kernels agree operation-for-operation.
#[inline(always)]
pub fn pair_force_terms(r2: f64, dt: f64) -> PairForceTerms {
    let r6 = (r2 * r2) * r2;
    let r14 = (r6 * r6) * r2;
    let df = (48.0 - 24.0 * r6) * dt / r14;
    PairForceTerms { r2, r6, r14, df }
}

/// Impulse coefficient and relative vector `q_j - q_i` for one pair.
///
/// Errors on coincident points, where the force diverges.
pub fn compute_pair_force(qi: Vec3, qj: Vec3, dt: f64) -> Result<(f64, Vec3)> {
    let rvec = qj - qi;
    let r2 = rvec.norm_sq();
    if r2 == 0.0 {
        return Err(Error::ZeroSeparation);
    }
    Ok((pair_force_terms(r2, dt).df, rvec))
}

#[inline]
fn lj_unshifted(r2: f64) -> f64 {
    let inv_r6 = 1.0 / ((r2 * r2) * r2);
    4.0 * (inv_r6 * inv_r6 - inv_r6)
}

/// Truncated-and-shifted pair potential at squared distance `r2`.
///
/// The shift makes the value exactly zero at and beyond the cutoff.
/// Diagnostic only; the benchmark sweeps never evaluate it.
pub fn potential_energy(r2: f64, r_c: f64) -> Result<f64> {
    if !(r2 > 0.0) {
        return Err(Error::NonPositiveDistance(r2));
    }
    if r2 < r_c * r_c {
        Ok(lj_unshifted(r2) - lj_unshifted(r_c * r_c))
    } else {
        Ok(0.0)
    }
}
