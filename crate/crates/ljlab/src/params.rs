//! Global simulation parameters.

use crate::error::{Error, Result};

/// Parameters shared by list construction, kernels, and the benchmark.
///
/// Invariants: `search_radius > cutoff > 0` and `box_edge > 2 * search_radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams {
    /// Edge of the cubic simulation box, in units of the atom diameter.
    pub box_edge: f64,
    /// Interaction cutoff; a pair contributes iff its squared distance is
    /// strictly below `cutoff^2`.
    pub cutoff: f64,
    /// Pair-list registration radius; the margin `search_radius - cutoff`
    /// is what lets a list be reused across steps.
    pub search_radius: f64,
    /// Impulse scale applied to every pair force.
    pub dt: f64,
    /// Force sweeps per benchmark run.
    pub n_sweeps: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            box_edge: 100.0,
            cutoff: 3.0,
            search_radius: 3.3,
            dt: 1.0,
            n_sweeps: 100,
        }
    }
}

impl SimParams {
    pub fn new(
        box_edge: f64,
        cutoff: f64,
        search_radius: f64,
        dt: f64,
        n_sweeps: usize,
    ) -> Result<Self> {
        let p = SimParams { box_edge, cutoff, search_radius, dt, n_sweeps };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0) {
            return Err(Error::InvalidParams(format!(
                "cutoff must be positive, got {}",
                self.cutoff
            )));
        }
        if !(self.search_radius > self.cutoff) {
            return Err(Error::InvalidParams(format!(
                "search radius {} must exceed cutoff {}",
                self.search_radius, self.cutoff
            )));
        }
        if !(self.box_edge > 2.0 * self.search_radius) {
            return Err(Error::InvalidParams(format!(
                "box edge {} must exceed twice the search radius {}",
                self.box_edge, self.search_radius
            )));
        }
        if !self.dt.is_finite() {
            return Err(Error::InvalidParams(format!("dt must be finite, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn cutoff_sq(&self) -> f64 {
        self.cutoff * self.cutoff
    }

    pub fn search_radius_sq(&self) -> f64 {
        self.search_radius * self.search_radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = SimParams::default();
        assert_eq!(p.box_edge, 100.0);
        assert_eq!(p.cutoff, 3.0);
        assert_eq!(p.search_radius, 3.3);
        assert_eq!(p.n_sweeps, 100);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_bad_ordering() {
        assert!(SimParams::new(100.0, 3.0, 3.0, 1.0, 100).is_err());
        assert!(SimParams::new(100.0, 0.0, 3.3, 1.0, 100).is_err());
        assert!(SimParams::new(6.0, 3.0, 3.3, 1.0, 100).is_err());
    }
}
