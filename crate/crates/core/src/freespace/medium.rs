use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Length and homogeneous decay of the absorbing medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    length: f64,
    gamma: f64,
    light_speed: f64,
}

impl MediumParams {
    pub fn new(length: f64, gamma: f64) -> Result<Self> {
        Self::with_light_speed(length, gamma, SPEED_OF_LIGHT)
    }

    /// Same, with a custom propagation constant `c`; handy for
    /// dimensionless studies where `c = 1`.
    pub fn with_light_speed(length: f64, gamma: f64, light_speed: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::param(
                "length",
                format!("must be positive, got {length}"),
            ));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::param(
                "gamma",
                format!("must be non-negative, got {gamma}"),
            ));
        }
        if !(light_speed > 0.0) || !light_speed.is_finite() {
            return Err(Error::param("light_speed", "must be positive"));
        }
        Ok(Self {
            length,
            gamma,
            light_speed,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    /// Instantaneous optical depth `D = g^2 L / (gamma c)`.
    pub fn optical_depth(&self, g: f64) -> f64 {
        g * g * self.length / (self.gamma * self.light_speed)
    }

    /// Coupling whose optical depth is `d`.
    pub fn coupling_for_depth(&self, d: f64) -> Result<f64> {
        if !(self.gamma > 0.0) {
            return Err(Error::param(
                "gamma",
                "optical depth is undefined for gamma = 0",
            ));
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::param("d", format!("must be non-negative, got {d}")));
        }
        Ok((d * self.gamma * self.light_speed / self.length).sqrt())
    }
}

/// Uniform samples `z_i = i L / (n - 1)` on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    length: f64,
    n: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::param("length", "must be positive"));
        }
        if n < 2 {
            return Err(Error::param("nz", "need at least 2 points"));
        }
        Ok(Self { length, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.n - 1) as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        i as f64 * self.dz()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.position(i))
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.dz(); self.n];
        w[0] *= 0.5;
        w[self.n - 1] *= 0.5;
        w
    }
}

/// Atomic polarization profile `sigma(z)` along the medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinWave {
    grid: SpatialGrid,
    samples: Vec<C64>,
}

impl SpinWave {
    pub fn new(grid: SpatialGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::param(
                "spin wave",
                "sample count does not match the z grid",
            ));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::param("spin wave", "non-finite sample"));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// Excitation number `(1/c) int |sigma|^2 dz`.
    pub fn excitation(&self, light_speed: f64) -> f64 {
        self.grid
            .trapezoid_weights()
            .iter()
            .zip(&self.samples)
            .map(|(w, s)| w * s.norm_sqr())
            .sum::<f64>()
            / light_speed
    }

    /// Mirror image `sigma(z) -> sigma(L - z)`.
    pub fn reversed(&self) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().rev().copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_round_trip() {
        let m = MediumParams::new(0.01, 5e4).unwrap();
        let g = m.coupling_for_depth(30.0).unwrap();
        assert!((m.optical_depth(g) - 30.0).abs() < 1e-12);
        let lossless = MediumParams::new(0.01, 0.0).unwrap();
        assert!(lossless.coupling_for_depth(1.0).is_err());
    }

    #[test]
    fn rejects_bad_medium() {
        assert!(MediumParams::new(0.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, -1.0).is_err());
        assert!(SpatialGrid::new(1.0, 1).is_err());
    }

    #[test]
    fn excitation_of_uniform_wave() {
        let grid = SpatialGrid::new(2.0, 11).unwrap();
        let w = SpinWave::new(grid, vec![C64::new(0.0, 3.0); 11]).unwrap();
        assert!((w.excitation(2.0) - 9.0).abs() < 1e-12);
        assert_eq!(w.reversed().reversed(), w);
    }
}
