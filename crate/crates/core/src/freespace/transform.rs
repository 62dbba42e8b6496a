use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::MediumParams;
use crate::control::accumulated_phase;
use crate::error::Result;
use crate::schedules::{cumulative_square, Schedule, TimeGrid};

/// Tabulated variables that remove decay, detuning and the coupling
/// profile from the free-space equations:
///
/// ```text
/// chi(t) = int (Delta - i gamma) dt'      S = e^{i chi} sigma
/// tau(t) = int g^2 / c dt'                E^ = e^{i chi} E
/// ```
///
/// after which `dS/dt = i g E^` and `dE^/dz = i (g/c) S`. Both integrals
/// start at the first grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeSpaceTransform {
    pub grid: TimeGrid,
    pub chi: Vec<C64>,
    /// `chi` at the midpoint of every step.
    pub chi_mid: Vec<C64>,
    pub tau: Vec<f64>,
}

impl FreeSpaceTransform {
    pub fn new(
        g: &Schedule,
        delta: &Schedule,
        medium: &MediumParams,
        grid: &TimeGrid,
    ) -> Result<Self> {
        let phase = accumulated_phase(delta, grid);
        let d = delta.step_samples(grid);
        let gamma = medium.gamma();
        let dt = grid.dt();
        let chi = phase
            .iter()
            .enumerate()
            .map(|(k, &p)| C64::new(p, -gamma * (grid.time(k) - grid.t0())))
            .collect();
        let chi_mid = (0..grid.steps())
            .map(|k| {
                // Quadratic through start, mid and end, integrated over half a step.
                let p = phase[k] + dt / 24.0 * (5.0 * d.start[k] + 8.0 * d.mid[k] - d.end[k]);
                C64::new(p, -gamma * (grid.time(k) + 0.5 * dt - grid.t0()))
            })
            .collect();
        Ok(Self {
            grid: *grid,
            chi,
            chi_mid,
            tau: cumulative_square(g, medium.light_speed(), grid),
        })
    }

    /// `e^{i chi(t_k)}`; its modulus is `e^{gamma (t_k - t0)}`.
    pub fn factor(&self, k: usize) -> C64 {
        (C64::new(0.0, 1.0) * self.chi[k]).exp()
    }

    pub fn factor_mid(&self, k: usize) -> C64 {
        (C64::new(0.0, 1.0) * self.chi_mid[k]).exp()
    }

    /// Largest per-step increment of `tau`.
    pub fn max_step(&self) -> f64 {
        self.tau.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        *self.tau.last().unwrap()
    }
}
