use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    analytic_evolution, numeric_trace, EvolutionTrace, MediumParams, SpatialGrid, SpinWave,
    MAX_KERNEL_STEP,
};
use crate::error::{Error, Result};
use crate::schedules::{FieldEnvelope, Schedule, TimeGrid};

/// Minimum number of grid points above half the peak input power.
pub const MIN_PULSE_SAMPLES: usize = 8;

/// Safety margin applied to [`MAX_KERNEL_STEP`] when refining the time grid.
const REFINE_MARGIN: f64 = 0.8;

/// A free-space write followed by an immediate read.
///
/// The input envelope defines the write window `[t0, t_s]`. The coupling
/// shape is rescaled for each optical depth; the read coupling is its mirror
/// image about `t_s`, and so is the detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpaceScenario {
    pub medium: MediumParams,
    pub input: FieldEnvelope,
    pub coupling: Schedule,
    pub delta: Schedule,
    /// Minimum number of z samples; raised automatically for dense media.
    pub nz: usize,
    pub solver: Solver,
}

/// Which free-space integrator evaluates each leg of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    Numeric,
    /// Bessel-kernel quadrature; exact in the grid limit but `O(nt^2 nz)`.
    Analytic,
}

impl Solver {
    fn trace(
        self,
        boundary: &FieldEnvelope,
        s0: &SpinWave,
        g: &Schedule,
        delta: &Schedule,
        medium: &MediumParams,
    ) -> Result<EvolutionTrace> {
        match self {
            Solver::Numeric => numeric_trace(boundary, s0, g, delta, medium),
            Solver::Analytic => {
                let f = analytic_evolution(boundary, s0, g, delta, medium)?;
                Ok(EvolutionTrace {
                    output: f.output(),
                    final_wave: f.spin_wave(f.tgrid.len() - 1),
                    ledger: f.ledger(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub eta_write: f64,
    pub eta_forward: f64,
    pub eta_backward: f64,
}

/// Full outcome of one optical depth, including the retrieved pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalRun {
    pub row: SweepRow,
    pub stored: SpinWave,
    pub forward_output: FieldEnvelope,
    pub backward_output: FieldEnvelope,
    pub write_closure: f64,
}

impl FreeSpaceScenario {
    fn check(&self) -> Result<()> {
        if self.nz < 2 {
            return Err(Error::param("nz", "need at least 2 z samples"));
        }
        if !self.coupling.is_nonnegative() {
            return Err(Error::param("coupling", "must be non-negative"));
        }
        let peak = self.input.peak_power();
        if !(peak > 0.0) {
            return Err(Error::param("input", "input field is zero"));
        }
        let resolved = self
            .input
            .samples()
            .iter()
            .filter(|z| z.norm_sqr() >= 0.5 * peak)
            .count();
        if resolved < MIN_PULSE_SAMPLES {
            return Err(Error::Resolution(format!(
                "input pulse spans {resolved} samples above half power; need {MIN_PULSE_SAMPLES}"
            )));
        }
        Ok(())
    }

    /// Couplings, grids and input for optical depth `d`.
    fn setup(&self, d: f64) -> Result<(Schedule, FieldEnvelope, SpatialGrid)> {
        let peak = self.coupling.max_abs();
        let g = if d == 0.0 || peak == 0.0 {
            Schedule::zero()
        } else {
            self.coupling
                .scaled(self.medium.coupling_for_depth(d)? / peak)?
        };
        let grid = *self.input.grid();
        let g_max = g.max_abs();
        let rate = g_max * g_max / self.medium.light_speed() * self.medium.length();
        let limit = REFINE_MARGIN * MAX_KERNEL_STEP;
        let factor = ((rate * grid.dt()) / limit).ceil().max(1.0) as usize;
        let input = if factor > 1 {
            let fine = TimeGrid::new(
                grid.t0(),
                grid.dt() / factor as f64,
                grid.steps() * factor + 1,
            )?;
            let samples = fine.times().map(|t| self.input.value_at(t)).collect();
            FieldEnvelope::new(fine, samples)?
        } else {
            self.input.clone()
        };
        let tau_l = rate * (grid.end() - grid.t0());
        let nz = self.nz.max((8.0 * tau_l).ceil() as usize + 1);
        Ok((g, input, SpatialGrid::new(self.medium.length(), nz)?))
    }

    /// Write, then read forward and (after inverting the spin wave) backward.
    pub fn run(&self, d: f64) -> Result<RetrievalRun> {
        self.check()?;
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::param("d", format!("must be non-negative, got {d}")));
        }
        let (g, input, zgrid) = self.setup(d)?;
        let grid = *input.grid();
        let t_s = grid.end();
        let write = self.solver.trace(
            &input,
            &SpinWave::zeros(zgrid),
            &g,
            &self.delta,
            &self.medium,
        )?;
        let q_in = *write.ledger.input.last().unwrap();
        let stored = write.final_wave;

        let read_grid = TimeGrid::new(t_s, grid.dt(), grid.len())?;
        let g_read = g.reflected(t_s);
        let delta_read = self.delta.reflected(t_s);
        let empty = FieldEnvelope::zeros(read_grid);
        let forward = self
            .solver
            .trace(&empty, &stored, &g_read, &delta_read, &self.medium)?;
        let backward = self.solver.trace(
            &empty,
            &stored.reversed(),
            &g_read,
            &delta_read,
            &self.medium,
        )?;
        let emitted = |l: &super::FreeSpaceLedger| *l.output.last().unwrap() / q_in;
        Ok(RetrievalRun {
            row: SweepRow {
                d,
                eta_write: stored.excitation(self.medium.light_speed()) / q_in,
                eta_forward: emitted(&forward.ledger),
                eta_backward: emitted(&backward.ledger),
            },
            stored,
            forward_output: forward.output,
            backward_output: backward.output,
            write_closure: write.ledger.closure(),
        })
    }
}

/// Forward and backward retrieval efficiency for each optical depth,
/// evaluated in parallel and returned in input order.
pub fn storage_retrieval_sweep(
    scenario: &FreeSpaceScenario,
    d_values: &[f64],
) -> Result<Vec<SweepRow>> {
    if d_values.is_empty() {
        return Err(Error::param("d_values", "empty sweep"));
    }
    scenario.check()?;
    d_values
        .par_iter()
        .map(|&d| scenario.run(d).map(|r| r.row))
        .collect()
}

/// Unit-norm Gaussian amplitude whose full width at a tenth of the maximum
/// amplitude is `fwtm`.
pub fn gaussian_fwtm(grid: TimeGrid, center: f64, fwtm: f64) -> Result<FieldEnvelope> {
    let width = fwtm / (2.0 * (2.0 * 10f64.ln()).sqrt());
    FieldEnvelope::gaussian(grid, center, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Segment;

    fn scenario(gamma: f64) -> FreeSpaceScenario {
        let grid = TimeGrid::spanning(-4.0, 4.0, 0.02).unwrap();
        FreeSpaceScenario {
            medium: MediumParams::with_light_speed(1.0, gamma, 1.0).unwrap(),
            input: FieldEnvelope::gaussian(grid, 0.0, 0.6).unwrap(),
            coupling: Schedule::coupling(vec![Segment::gaussian(-4.0, 4.0, 1.0, 0.5, 1.2)])
                .unwrap(),
            delta: Schedule::zero(),
            nz: 60,
            solver: Solver::Numeric,
        }
    }

    #[test]
    fn zero_depth_retrieves_nothing() {
        let rows = storage_retrieval_sweep(&scenario(0.1), &[0.0]).unwrap();
        assert_eq!(rows[0].eta_forward, 0.0);
        assert_eq!(rows[0].eta_backward, 0.0);
    }

    #[test]
    fn sweep_preserves_order_and_rejects_empty() {
        let s = scenario(0.1);
        assert!(storage_retrieval_sweep(&s, &[]).is_err());
        let rows = storage_retrieval_sweep(&s, &[3.0, 1.0, 2.0]).unwrap();
        let ds: Vec<f64> = rows.iter().map(|r| r.d).collect();
        assert_eq!(ds, vec![3.0, 1.0, 2.0]);
        for r in rows {
            assert!(r.eta_backward > 0.0 && r.eta_backward < 1.0);
            assert!(r.eta_forward > 0.0 && r.eta_forward < 1.0);
        }
    }

    #[test]
    fn coarse_input_is_a_resolution_error() {
        let mut s = scenario(0.1);
        let grid = TimeGrid::spanning(-4.0, 4.0, 0.5).unwrap();
        s.input = FieldEnvelope::gaussian(grid, 0.0, 0.6).unwrap();
        assert!(matches!(s.run(1.0), Err(Error::Resolution(_))));
    }

    #[test]
    fn fwtm_width() {
        let grid = TimeGrid::spanning(-1.0, 1.0, 1e-4).unwrap();
        let e = gaussian_fwtm(grid, 0.0, 0.6).unwrap();
        let peak = e.samples()[grid.nearest_index(0.0)].norm();
        let edge = e.samples()[grid.nearest_index(0.3)].norm();
        assert!((edge / peak - 0.1).abs() < 1e-12);
    }
}
