use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use crate::error::{Error, Result};

/// Complex field amplitude sampled on a uniform [`TimeGrid`].
///
/// Units are s^(-1/2), so `norm()` is a photon number. An optional index
/// support `[first, last]` marks the closed window outside which the field is
/// exactly zero; steps outside it contribute nothing even when the boundary
/// sample is non-zero, which keeps pulses with hard edges second-order
/// accurate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldEnvelope {
    grid: TimeGrid,
    samples: Vec<C64>,
    support: Option<(usize, usize)>,
}

/// Per-step field values used inside integrator stages.
#[derive(Debug, Clone)]
pub struct EnvelopeSteps {
    pub start: Vec<C64>,
    pub mid: Vec<C64>,
    pub end: Vec<C64>,
}

impl FieldEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::param(
                "samples",
                format!("expected {} samples, got {}", grid.len(), samples.len()),
            ));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::param("samples", "non-finite field sample"));
        }
        Ok(Self {
            grid,
            samples,
            support: None,
        })
    }

    /// Field confined to the closed index window `[first, last]`; samples
    /// outside are forced to zero.
    pub fn with_support(
        grid: TimeGrid,
        mut samples: Vec<C64>,
        first: usize,
        last: usize,
    ) -> Result<Self> {
        if !(first < last && last < grid.len()) {
            return Err(Error::param(
                "support",
                format!(
                    "window [{first}, {last}] does not fit a grid of {}",
                    grid.len()
                ),
            ));
        }
        for (k, s) in samples.iter_mut().enumerate() {
            if k < first || k > last {
                *s = C64::new(0.0, 0.0);
            }
        }
        let mut env = Self::new(grid, samples)?;
        env.support = Some((first, last));
        Ok(env)
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.len()],
            support: None,
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let samples = grid.times().map(f).collect();
        Self::new(grid, samples)
    }

    /// Normalized Gaussian with amplitude profile `exp(-(t-center)^2 / (2 width^2))`.
    pub fn gaussian(grid: TimeGrid, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::param("width", "must be positive"));
        }
        Self::from_fn(grid, |t| {
            let x = (t - center) / width;
            C64::new((-0.5 * x * x).exp(), 0.0)
        })?
        .normalized()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn support(&self) -> Option<(usize, usize)> {
        self.support
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.norm_sqr() == 0.0)
    }

    fn step_active(&self, k: usize) -> bool {
        match self.support {
            Some((a, b)) => k >= a && k < b,
            None => true,
        }
    }

    /// Trapezoid integral of `|E|^2` over the grid (photon number).
    pub fn norm(&self) -> f64 {
        let h = 0.5 * self.grid.dt();
        (0..self.grid.steps())
            .filter(|&k| self.step_active(k))
            .map(|k| h * (self.samples[k].norm_sqr() + self.samples[k + 1].norm_sqr()))
            .sum()
    }

    /// Cumulative trapezoid of `|E|^2`, zero at the first grid point.
    pub fn cumulative_energy(&self) -> Vec<f64> {
        let h = 0.5 * self.grid.dt();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.samples.len());
        out.push(0.0);
        for k in 0..self.grid.steps() {
            if self.step_active(k) {
                acc += h * (self.samples[k].norm_sqr() + self.samples[k + 1].norm_sqr());
            }
            out.push(acc);
        }
        out
    }

    /// Trapezoid weights consistent with [`norm`](Self::norm).
    pub fn weights(&self) -> Vec<f64> {
        let h = 0.5 * self.grid.dt();
        let mut w = vec![0.0; self.samples.len()];
        for k in 0..self.grid.steps() {
            if self.step_active(k) {
                w[k] += h;
                w[k + 1] += h;
            }
        }
        w
    }

    pub fn peak_power(&self) -> f64 {
        self.samples
            .iter()
            .map(|z| z.norm_sqr())
            .fold(0.0, f64::max)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::param(
                "envelope",
                "cannot normalize a zero-norm field",
            ));
        }
        Ok(self.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
            support: self.support,
        }
    }

    /// Pointwise product with a phase or any other factor sampled on the grid.
    pub fn modulated(&self, factors: &[C64]) -> Result<Self> {
        if factors.len() != self.samples.len() {
            return Err(Error::param("factors", "length mismatch"));
        }
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(factors)
                .map(|(a, b)| a * b)
                .collect(),
            support: self.support,
        })
    }

    /// Values used by integrator stages: one-sided at the step edges,
    /// linear interpolation at the midpoint.
    pub fn step_samples(&self) -> EnvelopeSteps {
        let steps = self.grid.steps();
        let zero = C64::new(0.0, 0.0);
        let mut out = EnvelopeSteps {
            start: Vec::with_capacity(steps),
            mid: Vec::with_capacity(steps),
            end: Vec::with_capacity(steps),
        };
        for k in 0..steps {
            if self.step_active(k) {
                let a = self.samples[k];
                let b = self.samples[k + 1];
                out.start.push(a);
                out.mid.push(0.5 * (a + b));
                out.end.push(b);
            } else {
                out.start.push(zero);
                out.mid.push(zero);
                out.end.push(zero);
            }
        }
        out
    }

    /// Linear interpolation at an arbitrary time; zero off the grid.
    pub fn value_at(&self, t: f64) -> C64 {
        let x = (t - self.grid.t0()) / self.grid.dt();
        if x < 0.0 || x > (self.grid.len() - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let k = (x.floor() as usize).min(self.grid.len() - 2);
        if !self.step_active(k) {
            return C64::new(0.0, 0.0);
        }
        let s = x - k as f64;
        self.samples[k] * (1.0 - s) + self.samples[k + 1] * s
    }

    /// Re-express this field on a larger grid with the same step and an
    /// aligned origin; zero outside the original span.
    pub fn embed(&self, grid: &TimeGrid) -> Result<Self> {
        let offset = grid.offset_of(&self.grid).ok_or_else(|| {
            Error::param("grid", "target grid is not aligned with the field grid")
        })?;
        if offset < 0 || offset as usize + self.grid.len() > grid.len() {
            return Err(Error::param("grid", "target grid does not cover the field"));
        }
        let off = offset as usize;
        let mut samples = vec![C64::new(0.0, 0.0); grid.len()];
        samples[off..off + self.samples.len()].copy_from_slice(&self.samples);
        let (first, last) = self.support.unwrap_or((0, self.grid.len() - 1));
        Self::with_support(*grid, samples, first + off, last + off)
    }

    /// Samples restricted to a contiguous index window, on the matching sub-grid.
    pub fn window(&self, first: usize, last: usize) -> Result<Self> {
        if !(first < last && last < self.grid.len()) {
            return Err(Error::param("window", "invalid index window"));
        }
        let grid = TimeGrid::new(self.grid.time(first), self.grid.dt(), last - first + 1)?;
        let samples = self.samples[first..=last].to_vec();
        let mut env = Self::new(grid, samples)?;
        if let Some((a, b)) = self.support {
            let a = a.max(first);
            let b = b.min(last);
            if a < b {
                env = Self::with_support(grid, env.samples, a - first, b - first)?;
            } else {
                env = Self::zeros(grid);
            }
        }
        Ok(env)
    }
}

/// Conjugate-linear overlap `|<a, b>| / (|a| |b|)` with shared weights.
pub fn overlap(a: &[C64], b: &[C64], weights: &[f64]) -> f64 {
    let mut ab = C64::new(0.0, 0.0);
    let mut aa = 0.0;
    let mut bb = 0.0;
    for ((x, y), w) in a.iter().zip(b).zip(weights) {
        ab += x.conj() * y * w;
        aa += x.norm_sqr() * w;
        bb += y.norm_sqr() * w;
    }
    if aa == 0.0 || bb == 0.0 {
        return 0.0;
    }
    ab.norm() / (aa * bb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 0.1, 11).unwrap()
    }

    #[test]
    fn support_excludes_edge_steps() {
        let s = vec![C64::new(1.0, 0.0); 11];
        let env = FieldEnvelope::with_support(grid(), s, 2, 5).unwrap();
        // Three interior steps of unit power.
        assert!((env.norm() - 0.3).abs() < 1e-15);
        let st = env.step_samples();
        assert_eq!(st.end[1], C64::new(0.0, 0.0));
        assert_eq!(st.start[2], C64::new(1.0, 0.0));
        assert_eq!(st.start[5], C64::new(0.0, 0.0));
        let w = env.weights();
        let from_w: f64 = w
            .iter()
            .zip(env.samples())
            .map(|(w, z)| w * z.norm_sqr())
            .sum();
        assert!((from_w - env.norm()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_is_normalized() {
        let g = TimeGrid::spanning(-10.0, 10.0, 0.01).unwrap();
        let e = FieldEnvelope::gaussian(g, 0.0, 1.0).unwrap();
        assert!((e.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_cannot_normalize() {
        assert!(FieldEnvelope::zeros(grid()).normalized().is_err());
    }

    #[test]
    fn embed_and_window_round_trip() {
        let e = FieldEnvelope::from_fn(grid(), |t| C64::new(t, -t)).unwrap();
        let big = TimeGrid::new(-1.0, 0.1, 40).unwrap();
        let emb = e.embed(&big).unwrap();
        assert!((emb.norm() - e.norm()).abs() < 1e-14);
        let back = emb.window(10, 20).unwrap();
        for (a, b) in back.samples().iter().zip(e.samples()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn overlap_is_phase_blind() {
        let a = vec![C64::new(1.0, 0.0), C64::new(2.0, 1.0)];
        let b: Vec<C64> = a.iter().map(|z| z * C64::new(0.0, 3.0)).collect();
        assert!((overlap(&a, &b, &[1.0, 1.0]) - 1.0).abs() < 1e-15);
    }
}
