use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::config::Scenario;
use super::run::scenario_hash;
use super::table::Table;
use crate::cavity::{simulate_adiabatic, CavityState};
use crate::control::{synthesize_couplings, verify_synthesis, SynthesisReport};
use crate::error::{Error, Result};
use crate::schedules::{Schedule, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub scenario: String,
    pub scenario_hash: String,
    pub version: String,
    pub wall_time_s: f64,
    pub eta_w: f64,
    pub eta_r: f64,
    pub delay_s: f64,
    pub report: SynthesisReport,
}

/// Synthesized schedules as `(time_s, value)` tables, and a verification
/// run comparing `E_out(t)` with `E_in(t - T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutput {
    pub record: DesignRecord,
    pub g_w: Schedule,
    pub g_r: Schedule,
    pub g_w_table: Table,
    pub g_r_table: Table,
    pub verification: Table,
}

pub fn design(s: &Scenario) -> Result<DesignOutput> {
    let clock = Instant::now();
    if !s.model.is_cavity() {
        return Err(Error::Unsupported(
            "coupling synthesis is defined for cavity models".into(),
        ));
    }
    let spec = s.design.as_ref().ok_or_else(|| {
        Error::Config("design needs a [design] section with eta_w, eta_r and delay".into())
    })?;
    let params = s.cavity_params()?;
    let grid = s.time_grid()?;
    let input = s
        .explicit_input(grid)?
        .filter(|e| !e.is_zero())
        .ok_or_else(|| Error::Config("design needs an explicit, non-zero target [input]".into()))?;
    let delay = spec.delay.si();
    let (g_w, g_r) = synthesize_couplings(&input, delay, spec.eta_w, spec.eta_r, &params)?;
    let report = verify_synthesis(&input, &g_w, &g_r, delay, &params)?;

    let table = |g: &Schedule, offset: f64| {
        let mut t = Table::new(&["time_s", "value"]);
        for time in grid.times() {
            t.push(vec![time + offset, g.value(time + offset)]);
        }
        t
    };
    let extra = (delay / grid.dt() - 1e-9).ceil() as usize;
    let ext = TimeGrid::new(grid.t0(), grid.dt(), grid.len() + extra)?;
    let run = simulate_adiabatic(
        &input.embed(&ext)?,
        &g_w.merged(&g_r)?,
        &Schedule::zero(),
        &params,
        CavityState::default(),
    )?;
    let mut verification = Table::new(&[
        "time_s",
        "e_out_re",
        "e_out_im",
        "e_in_delayed_re",
        "e_in_delayed_im",
    ]);
    for (k, t) in ext.times().enumerate() {
        let out = run.e_out.samples()[k];
        let target: C64 = input.value_at(t - delay);
        verification.push(vec![t, out.re, out.im, target.re, target.im]);
    }
    Ok(DesignOutput {
        record: DesignRecord {
            scenario: s.name.clone(),
            scenario_hash: scenario_hash(s)?,
            version: crate::VERSION.to_string(),
            wall_time_s: clock.elapsed().as_secs_f64(),
            eta_w: spec.eta_w,
            eta_r: spec.eta_r,
            delay_s: delay,
            report,
        },
        g_w_table: table(&g_w, 0.0),
        g_r_table: table(&g_r, delay),
        g_w,
        g_r,
        verification,
    })
}
