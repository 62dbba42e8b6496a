use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::envelope::FieldEnvelope;
use super::grid::TimeGrid;
use super::schedule::{Schedule, ZERO_COUPLING_FRACTION};
use crate::error::{Error, Result};

/// Tabulated effective time on a grid, `tau(t0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTime {
    pub grid: TimeGrid,
    pub tau: Vec<f64>,
}

impl EffectiveTime {
    pub fn total(&self) -> f64 {
        *self.tau.last().unwrap()
    }

    /// Elapsed effective time between two grid indices.
    pub fn between(&self, from: usize, to: usize) -> f64 {
        self.tau[to] - self.tau[from]
    }
}

/// Trapezoid integral of `g(t)^2 / rate_scale` with one-sided edge values.
pub(crate) fn cumulative_square(g: &Schedule, rate_scale: f64, grid: &TimeGrid) -> Vec<f64> {
    let steps = g.step_samples(grid);
    let h = 0.5 * grid.dt() / rate_scale;
    let mut tau = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    tau.push(0.0);
    for k in 0..grid.steps() {
        acc += h * (steps.start[k] * steps.start[k] + steps.end[k] * steps.end[k]);
        tau.push(acc);
    }
    tau
}

/// Effective time `tau(t) = int_{t0}^{t} g^2 / kappa dt'`.
pub fn effective_time(g: &Schedule, kappa: f64, grid: &TimeGrid) -> Result<EffectiveTime> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(
            "kappa",
            format!("must be positive, got {kappa}"),
        ));
    }
    Ok(EffectiveTime {
        grid: *grid,
        tau: cumulative_square(g, kappa, grid),
    })
}

/// Which physical field an effective envelope rescales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldRole {
    Input,
    Output,
    Cavity,
}

impl FieldRole {
    fn factor(self, kappa: f64) -> f64 {
        match self {
            FieldRole::Input | FieldRole::Output => kappa.sqrt(),
            FieldRole::Cavity => kappa,
        }
    }
}

/// A field expressed in effective variables: `(tau_k, value_k)` pairs
/// carried alongside the real-time grid they came from.
///
/// Points where the coupling is off keep a repeated `tau` and a zero value.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveEnvelope {
    pub grid: TimeGrid,
    pub tau: Vec<f64>,
    pub samples: Vec<C64>,
    pub role: FieldRole,
    support: Option<(usize, usize)>,
}

impl EffectiveEnvelope {
    /// Real time to effective variables: `sqrt(kappa)/g * E` for input and
    /// output fields, `kappa/g * E` for the cavity field.
    pub fn forward(
        field: &FieldEnvelope,
        g: &Schedule,
        kappa: f64,
        role: FieldRole,
    ) -> Result<Self> {
        let grid = *field.grid();
        let tau = effective_time(g, kappa, &grid)?.tau;
        let gs = g.sample(&grid);
        let threshold = ZERO_COUPLING_FRACTION * g.max_abs();
        let factor = role.factor(kappa);
        let mut samples = Vec::with_capacity(gs.len());
        for (k, (&gk, &e)) in gs.iter().zip(field.samples()).enumerate() {
            if gk > threshold && gk > 0.0 {
                samples.push(e * (factor / gk));
            } else if e.norm_sqr() != 0.0 {
                return Err(Error::SingularTransform { time: grid.time(k) });
            } else {
                samples.push(C64::new(0.0, 0.0));
            }
        }
        Ok(Self {
            grid,
            tau,
            samples,
            role,
            support: field.support(),
        })
    }

    /// Back to real time; undoes [`forward`](Self::forward) wherever `g > 0`.
    pub fn inverse(&self, g: &Schedule, kappa: f64) -> Result<FieldEnvelope> {
        if !(kappa > 0.0) {
            return Err(Error::param("kappa", "must be positive"));
        }
        let gs = g.sample(&self.grid);
        let factor = self.role.factor(kappa);
        let samples: Vec<C64> = gs
            .iter()
            .zip(&self.samples)
            .map(|(&gk, &e)| e * (gk / factor))
            .collect();
        match self.support {
            Some((a, b)) => FieldEnvelope::with_support(self.grid, samples, a, b),
            None => FieldEnvelope::new(self.grid, samples),
        }
    }

    /// Trapezoid integral of `|value|^2 d tau` over the non-uniform tau samples.
    pub fn norm(&self) -> f64 {
        self.samples
            .windows(2)
            .zip(self.tau.windows(2))
            .map(|(s, t)| 0.5 * (t[1] - t[0]) * (s[0].norm_sqr() + s[1].norm_sqr()))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Segment;

    #[test]
    fn zero_coupling_gives_zero_tau() {
        let grid = TimeGrid::new(0.0, 0.01, 101).unwrap();
        let tau = effective_time(&Schedule::zero(), 1.0, &grid).unwrap();
        assert!(tau.tau.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn square_pulse_tau_is_exact() {
        let (g0, kappa, t1) = (3.0, 2.0, 0.37);
        let grid = TimeGrid::new(-0.13, 0.01, 101).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, t1, g0)]).unwrap();
        let tau = effective_time(&g, kappa, &grid).unwrap();
        let k1 = grid.nearest_index(t1);
        let exact = g0 * g0 * t1 / kappa;
        assert!((tau.tau[k1] - exact).abs() < 1e-12);
        // No spurious half step after the pulse switches off.
        assert!((tau.total() - exact).abs() < 1e-12);
    }

    #[test]
    fn non_positive_kappa_is_rejected() {
        let grid = TimeGrid::new(0.0, 0.01, 3).unwrap();
        assert!(effective_time(&Schedule::zero(), 0.0, &grid).is_err());
        assert!(effective_time(&Schedule::zero(), -1.0, &grid).is_err());
    }

    #[test]
    fn constant_field_under_square_coupling() {
        let grid = TimeGrid::new(0.0, 0.1, 11).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, 1.0, 4.0)]).unwrap();
        let e = FieldEnvelope::from_fn(grid, |_| C64::new(0.5, 0.0)).unwrap();
        let eff = EffectiveEnvelope::forward(&e, &g, 9.0, FieldRole::Input).unwrap();
        for s in &eff.samples {
            assert!((s - C64::new(0.5 * 3.0 / 4.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_transform_names_time() {
        let grid = TimeGrid::new(0.0, 0.1, 11).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, 0.5, 1.0)]).unwrap();
        let e = FieldEnvelope::from_fn(grid, |_| C64::new(1.0, 0.0)).unwrap();
        match EffectiveEnvelope::forward(&e, &g, 1.0, FieldRole::Output) {
            Err(Error::SingularTransform { time }) => assert!((time - 0.6).abs() < 1e-12),
            other => panic!("expected singular transform, got {other:?}"),
        }
    }
}
