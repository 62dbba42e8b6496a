use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid `t0 + k*dt`, `k in [0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param(
                "dt",
                format!("must be positive and finite, got {dt}"),
            ));
        }
        if n < 2 {
            return Err(Error::param(
                "n",
                format!("need at least 2 points, got {n}"),
            ));
        }
        if !t0.is_finite() {
            return Err(Error::param("t0", "must be finite"));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid covering `[start, end]` with step as close to `dt` as an integer
    /// number of intervals allows.
    pub fn spanning(start: f64, end: f64, dt: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::param("end", "grid end must exceed start"));
        }
        if !(dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        let intervals = ((end - start) / dt).round().max(1.0) as usize;
        Self::new(start, (end - start) / intervals as f64, intervals + 1)
    }

    /// Grid with `n` points on `[start, end]`.
    pub fn with_points(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", "need at least 2 points"));
        }
        if !(end > start) {
            return Err(Error::param("end", "grid end must exceed start"));
        }
        Self::new(start, (end - start) / (n - 1) as f64, n)
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn steps(&self) -> usize {
        self.n - 1
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.time(k))
    }

    /// Index of the grid point nearest to `t`, clamped to the grid.
    pub fn nearest_index(&self, t: f64) -> usize {
        let k = ((t - self.t0) / self.dt).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n - 1)
        }
    }

    /// Integer offset of `other`'s origin on this grid, if both share the
    /// same step and are aligned to within a millionth of a step.
    pub fn offset_of(&self, other: &TimeGrid) -> Option<isize> {
        if ((self.dt - other.dt) / self.dt).abs() > 1e-9 {
            return None;
        }
        let shift = (other.t0 - self.t0) / self.dt;
        let k = shift.round();
        if (shift - k).abs() > 1e-6 {
            return None;
        }
        Some(k as isize)
    }

    /// Trapezoid weights over the whole grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.dt; self.n];
        w[0] = 0.5 * self.dt;
        w[self.n - 1] = 0.5 * self.dt;
        w
    }
}

/// Cumulative trapezoid of uniformly spaced samples, starting at zero.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, -1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(f64::NAN, 1.0, 3).is_err());
    }

    #[test]
    fn spanning_hits_both_ends() {
        let g = TimeGrid::spanning(-1e-6, 2e-6, 1e-9).unwrap();
        assert_eq!(g.len(), 3001);
        assert!((g.end() - 2e-6).abs() < 1e-18);
    }

    #[test]
    fn offsets() {
        let a = TimeGrid::new(0.0, 0.5, 10).unwrap();
        let b = TimeGrid::new(1.5, 0.5, 4).unwrap();
        assert_eq!(a.offset_of(&b), Some(3));
        let c = TimeGrid::new(1.25, 0.5, 4).unwrap();
        assert_eq!(a.offset_of(&c), None);
    }

    #[test]
    fn cumulative_of_constant_is_linear() {
        let c = cumulative_trapezoid(&[2.0; 5], 0.5);
        assert_eq!(c, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }
}
