//! Periodic 1D grids and physical constants.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A uniform periodic grid with a power-of-two point count. The origin must
/// sit on the spacing lattice (an integer multiple of `dz`); this keeps the
/// discrete momentum lattice consistent under bin wrap-around, which the
/// momentum-kernel convolution identity relies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    dz: f64,
    origin: f64,
}

impl Grid1D {
    pub fn new(n: usize, dz: f64, origin: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadGridSize(n));
        }
        if !(dz.is_finite() && dz > 0.0) {
            return Err(Error::BadGridSpacing(dz));
        }
        let steps = origin / dz;
        if !origin.is_finite() || (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::BadGridOrigin { origin, dz });
        }
        Ok(Self { n, dz, origin })
    }

    /// Grid of `n` points covering `[-length/2, length/2)`.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        let dz = length / n as f64;
        Self::new(n, dz, -(n as f64 / 2.0) * dz)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dz
    }

    pub fn z(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.dz
    }

    pub fn zs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.z(j)).collect()
    }

    /// Node index of an on-grid coordinate.
    pub fn index_of(&self, z: f64) -> Result<usize> {
        let steps = (z - self.origin) / self.dz;
        let j = steps.round();
        if (steps - j).abs() > 1e-6 || j < 0.0 || j >= self.n as f64 {
            return Err(Error::OffGrid(z));
        }
        Ok(j as usize)
    }

    /// Signed frequency index of an FFT bin: `0..n/2` then `-n/2..0`.
    pub fn frequency(&self, bin: usize) -> i64 {
        debug_assert!(bin < self.n);
        if bin < self.n / 2 {
            bin as i64
        } else {
            bin as i64 - self.n as i64
        }
    }

    /// Momentum at an FFT bin: `2 pi hbar k / L` with `k` in `[-n/2, n/2)`.
    pub fn momentum(&self, bin: usize, hbar: f64) -> f64 {
        2.0 * PI * hbar * self.frequency(bin) as f64 / self.length()
    }

    /// Same span with twice the resolution.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            n: self.n * 2,
            dz: self.dz / 2.0,
            origin: self.origin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && mass > 0.0 && mass.is_finite()) {
            return Err(Error::BadConstants);
        }
        Ok(Self { hbar, mass })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(Grid1D::new(6, 0.1, 0.0), Err(Error::BadGridSize(6))));
        assert!(matches!(Grid1D::new(12, 0.1, 0.0), Err(Error::BadGridSize(12))));
        assert!(matches!(
            Grid1D::new(16, -1.0, 0.0),
            Err(Error::BadGridSpacing(_))
        ));
        assert!(matches!(
            Grid1D::new(16, 0.5, 0.3),
            Err(Error::BadGridOrigin { .. })
        ));
    }

    #[test]
    fn centered_grid_is_on_lattice() {
        let g = Grid1D::centered(512, 32.0).unwrap();
        assert_eq!(g.dz(), 0.0625);
        assert_eq!(g.origin(), -16.0);
        assert_eq!(g.z(0), -16.0);
        assert_eq!(g.index_of(0.0).unwrap(), 256);
        assert!(g.index_of(16.0).is_err());
        assert_eq!(g.length(), 32.0);
    }

    #[test]
    fn frequencies_wrap_at_the_nyquist_bin() {
        let g = Grid1D::centered(8, 8.0).unwrap();
        let freqs: Vec<i64> = (0..8).map(|b| g.frequency(b)).collect();
        assert_eq!(freqs, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.momentum(1, 1.0), 2.0 * PI / 8.0);
    }

    #[test]
    fn refinement_halves_spacing_only() {
        let g = Grid1D::centered(8, 8.0).unwrap();
        let f = g.refined();
        assert_eq!(f.len(), 16);
        assert_eq!(f.dz(), 0.5);
        assert_eq!(f.origin(), g.origin());
        assert_eq!(f.length(), g.length());
    }
}
