use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{InputSpec, ModelKind, Scenario, SegmentSpec, SweepAxis};
use super::table::Table;
use crate::cavity::{simulate_adiabatic, simulate_full, CavityParams, CavityState, SimResult};
use crate::control::{compensate_detuning, optimal_write_input};
use crate::error::{Error, Result};
use crate::freespace::{FreeSpaceScenario, RetrievalRun, Solver};
use crate::schedules::{effective_time, FieldEnvelope, Schedule, TimeGrid};

/// Headline numbers of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Summary {
    Cavity {
        eta_w: Option<f64>,
        eta_r: Option<f64>,
        eta_tot: Option<f64>,
        leakage: Option<f64>,
        decay_loss: Option<f64>,
        tau_w: f64,
        tau_r: f64,
    },
    FreeSpace {
        d: f64,
        eta_write: f64,
        eta_forward: f64,
        eta_backward: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Per-step continuity violation (cavity models only).
    pub continuity_residual: Option<f64>,
    /// `| int |E_in|^2 dt - 1 |` on the simulation grid.
    pub normalization_drift: f64,
    /// Worst relative imbalance of the energy ledger.
    pub ledger_closure: f64,
}

/// Identity and results of one run, written as `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    /// SHA-256 of the canonical config text and every file it references.
    pub scenario_hash: String,
    pub version: String,
    pub model: ModelKind,
    pub wall_time_s: f64,
    pub summary: Summary,
    pub diagnostics: Diagnostics,
}

/// Record plus the tables destined for the run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub record: RunRecord,
    pub e_out: Table,
    pub spinwave: Table,
    pub sweep: Option<Table>,
}

pub fn scenario_hash(s: &Scenario) -> Result<String> {
    let mut h = Sha256::new();
    h.update(s.to_toml()?.as_bytes());
    let tabulated = s
        .write
        .iter()
        .chain(&s.read)
        .chain(&s.detuning)
        .filter_map(|seg| match seg {
            SegmentSpec::Tabulated { path } => Some(path),
            _ => None,
        })
        .chain(match &s.input {
            InputSpec::Tabulated { path } => Some(path),
            _ => None,
        });
    for path in tabulated {
        let full = if path.is_absolute() {
            path.clone()
        } else {
            s.base_dir.join(path)
        };
        h.update(std::fs::read(&full)?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Solver inputs of a cavity scenario, in SI units.
#[derive(Debug, Clone)]
pub(crate) struct CavitySetup {
    pub model: ModelKind,
    pub params: CavityParams,
    pub grid: TimeGrid,
    pub g_w: Schedule,
    /// Read coupling relative to the read start.
    pub g_r: Schedule,
    pub storage_time: f64,
    pub delta: Schedule,
    /// `None` requests the optimal input for `g_w`.
    pub input: Option<FieldEnvelope>,
    pub compensate: bool,
}

pub(crate) struct CavityOutcome {
    pub result: SimResult,
    pub tau_w: f64,
    pub tau_r: f64,
}

impl CavitySetup {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        let grid = s.time_grid()?;
        Ok(Self {
            model: s.model,
            params: s.cavity_params()?,
            grid,
            g_w: s.write_coupling()?,
            g_r: s.read_coupling()?,
            storage_time: s.storage_time.si(),
            delta: s.detuning_schedule()?,
            input: s.explicit_input(grid)?,
            compensate: s.compensate_detuning,
        })
    }

    /// End of the write coupling, or the grid start without one.
    pub fn write_end(&self) -> f64 {
        self.g_w.support().map_or(self.grid.t0(), |(_, end)| end)
    }

    pub fn read_absolute(&self) -> Schedule {
        self.g_r.shifted(self.write_end() + self.storage_time)
    }

    pub fn run(&self) -> Result<CavityOutcome> {
        let grid = self.grid;
        let g_r = self.read_absolute();
        let g = self.g_w.merged(&g_r)?;
        let mut input = match &self.input {
            Some(e) => e.clone(),
            None => optimal_write_input(&self.g_w, &self.params, &grid)?,
        };
        if self.compensate {
            input = compensate_detuning(&input, &self.delta, self.write_end())?;
        }
        let initial = CavityState::default();
        let result = match self.model {
            ModelKind::CavityFull => simulate_full(&input, &g, &self.delta, &self.params, initial)?,
            ModelKind::CavityAdiabatic => {
                simulate_adiabatic(&input, &g, &self.delta, &self.params, initial)?
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "{other:?} is not a cavity model"
                )))
            }
        };
        // The merged schedule may be one contiguous window when the read
        // starts right at the write end, so split at the write coupling.
        let ks = self
            .g_w
            .first_window(&grid)
            .map_or(grid.len() - 1, |(_, last)| last);
        let kappa = self.params.kappa();
        Ok(CavityOutcome {
            result: result.with_write_end(ks)?,
            tau_w: effective_time(&self.g_w, kappa, &grid)?.total(),
            tau_r: effective_time(&g_r, kappa, &grid)?.total(),
        })
    }
}

impl CavityOutcome {
    pub fn summary(&self) -> Summary {
        let e = self.result.efficiencies;
        Summary::Cavity {
            eta_w: e.eta_w,
            eta_r: e.eta_r,
            eta_tot: e.eta_tot,
            leakage: e.leakage,
            decay_loss: e.decay_loss,
            tau_w: self.tau_w,
            tau_r: self.tau_r,
        }
    }

    pub fn sweep_row(&self, value: f64) -> Vec<f64> {
        let e = self.result.efficiencies;
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        vec![
            value,
            v(e.eta_w),
            v(e.eta_r),
            v(e.eta_tot),
            v(e.leakage),
            v(e.decay_loss),
            self.tau_w,
            self.tau_r,
        ]
    }
}

pub(crate) const CAVITY_SWEEP_HEADER: [&str; 8] = [
    "value",
    "eta_w",
    "eta_r",
    "eta_tot",
    "leakage",
    "decay_loss",
    "tau_w",
    "tau_r",
];
pub(crate) const FREESPACE_SWEEP_HEADER: [&str; 4] =
    ["d", "eta_write", "eta_forward", "eta_backward"];

/// Free-space protocol and the optical depth of the base run.
pub(crate) fn freespace_setup(s: &Scenario) -> Result<(FreeSpaceScenario, f64)> {
    let grid = s.time_grid()?;
    let medium = s.medium_params()?;
    let section = s.medium.as_ref().expect("validated");
    let input = s.explicit_input(grid)?.ok_or_else(|| {
        Error::Unsupported(
            "free-space models have no closed-form optimal input; give an explicit shape".into(),
        )
    })?;
    let coupling = s.write_coupling()?;
    let depth = match section.depth {
        Some(d) => d,
        None => medium.optical_depth(coupling.max_abs()),
    };
    let delta = s.detuning_schedule()?;
    let mut input = input;
    if s.compensate_detuning {
        input = compensate_detuning(&input, &delta, grid.end())?;
    }
    let solver = match s.model {
        ModelKind::FreespaceAnalytic => Solver::Analytic,
        _ => Solver::Numeric,
    };
    Ok((
        FreeSpaceScenario {
            medium,
            input,
            coupling,
            delta,
            nz: section.nz,
            solver,
        },
        depth,
    ))
}

fn cavity_tables(out: &CavityOutcome) -> (Table, Table) {
    let r = &out.result;
    let times: Vec<f64> = r.grid.times().collect();
    let mut e_out = Table::new(&["time_s", "e_in_re", "e_in_im", "e_out_re", "e_out_im"]);
    let mut spin = Table::new(&["time_s", "sigma_re", "sigma_im"]);
    for (k, &t) in times.iter().enumerate() {
        let (a, b) = (r.e_in.samples()[k], r.e_out.samples()[k]);
        e_out.push(vec![t, a.re, a.im, b.re, b.im]);
        spin.push(vec![t, r.sigma[k].re, r.sigma[k].im]);
    }
    (e_out, spin)
}

fn freespace_tables(run: &RetrievalRun) -> (Table, Table) {
    let mut e_out = Table::new(&[
        "time_s",
        "forward_re",
        "forward_im",
        "backward_re",
        "backward_im",
    ]);
    let grid = run.forward_output.grid();
    for (k, t) in grid.times().enumerate() {
        let (f, b): (C64, C64) = (
            run.forward_output.samples()[k],
            run.backward_output.samples()[k],
        );
        e_out.push(vec![t, f.re, f.im, b.re, b.im]);
    }
    let mut spin = Table::new(&["z_m", "s_re", "s_im"]);
    for (z, s) in run.stored.grid().positions().zip(run.stored.samples()) {
        spin.push(vec![z, s.re, s.im]);
    }
    (e_out, spin)
}

/// Execute a scenario, including its `[sweep]` section if present.
pub fn run(s: &Scenario) -> Result<RunOutput> {
    let clock = Instant::now();
    let hash = scenario_hash(s)?;
    let (summary, diagnostics, e_out, spinwave) = if s.model.is_cavity() {
        let setup = CavitySetup::from_scenario(s)?;
        let out = setup.run()?;
        let r = &out.result;
        let (e_out, spin) = cavity_tables(&out);
        let diag = Diagnostics {
            continuity_residual: Some(r.continuity_residual),
            normalization_drift: if r.e_in.is_zero() {
                0.0
            } else {
                (r.e_in.norm() - 1.0).abs()
            },
            ledger_closure: r.ledger_closure(),
        };
        (out.summary(), diag, e_out, spin)
    } else {
        let (fs, depth) = freespace_setup(s)?;
        let run = fs.run(depth)?;
        let (e_out, spin) = freespace_tables(&run);
        let diag = Diagnostics {
            continuity_residual: None,
            normalization_drift: (fs.input.norm() - 1.0).abs(),
            ledger_closure: run.write_closure,
        };
        let row = run.row;
        let summary = Summary::FreeSpace {
            d: row.d,
            eta_write: row.eta_write,
            eta_forward: row.eta_forward,
            eta_backward: row.eta_backward,
        };
        (summary, diag, e_out, spin)
    };
    let sweep = match &s.sweep {
        Some(sec) => Some(super::sweep::sweep(s, sec.axis, &sec.values)?),
        None => None,
    };
    Ok(RunOutput {
        record: RunRecord {
            scenario: s.name.clone(),
            scenario_hash: hash,
            version: crate::VERSION.to_string(),
            model: s.model,
            wall_time_s: clock.elapsed().as_secs_f64(),
            summary,
            diagnostics,
        },
        e_out,
        spinwave,
        sweep,
    })
}

/// Cavity setup with one sweep parameter applied.
pub(crate) fn apply_axis(base: &CavitySetup, axis: SweepAxis, value: f64) -> Result<CavitySetup> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::param(
            "value",
            format!("sweep values must be non-negative, got {value}"),
        ));
    }
    let mut s = base.clone();
    let kappa = s.params.kappa();
    let rescale =
        |g: &Schedule, target: f64, current: f64, what: &'static str| -> Result<Schedule> {
            if current <= 0.0 {
                return Err(Error::param(what, "coupling is zero; nothing to rescale"));
            }
            g.scaled((target / current).sqrt())
        };
    match axis {
        SweepAxis::TauW => {
            let tau = effective_time(&s.g_w, kappa, &s.grid)?.total();
            s.g_w = rescale(&s.g_w, value, tau, "write")?;
        }
        SweepAxis::TauR => {
            let tau = effective_time(&s.read_absolute(), kappa, &s.grid)?.total();
            s.g_r = rescale(&s.g_r, value, tau, "read")?;
        }
        SweepAxis::Cooperativity => {
            let gamma = s.params.gamma();
            if gamma == 0.0 {
                return Err(Error::Unsupported(
                    "a cooperativity sweep needs gamma > 0".into(),
                ));
            }
            // Both couplings are set to the same peak g with g^2 = C kappa gamma.
            let target = value * kappa * gamma;
            let (pw, pr) = (s.g_w.max_abs(), s.g_r.max_abs());
            s.g_w = rescale(&s.g_w, target, pw * pw, "write")?;
            if pr > 0.0 {
                s.g_r = rescale(&s.g_r, target, pr * pr, "read")?;
            }
        }
        SweepAxis::PulseDuration => {
            if !(value > 0.0) {
                return Err(Error::param("value", "pulse duration must be positive"));
            }
            let (_, end, a) = s.g_w.as_square().ok_or_else(|| {
                Error::Unsupported("pulse-duration sweeps need a square write coupling".into())
            })?;
            s.g_w =
                Schedule::coupling(vec![crate::schedules::Segment::square(end - value, end, a)])?;
            if !s.g_r.is_zero() {
                let (start, _, b) = s.g_r.as_square().ok_or_else(|| {
                    Error::Unsupported("pulse-duration sweeps need a square read coupling".into())
                })?;
                s.g_r = Schedule::coupling(vec![crate::schedules::Segment::square(
                    start,
                    start + value,
                    b,
                )])?;
            }
        }
        SweepAxis::OpticalDepth => {
            return Err(Error::Unsupported(
                "optical-depth sweeps apply to free-space models; use cooperativity for a cavity"
                    .into(),
            ))
        }
    }
    Ok(s)
}
