use rayon::prelude::*;

use super::config::{Scenario, SweepAxis};
use super::run::{
    apply_axis, freespace_setup, CavitySetup, CAVITY_SWEEP_HEADER, FREESPACE_SWEEP_HEADER,
};
use super::table::Table;
use crate::error::{Error, Result};
use crate::freespace::storage_retrieval_sweep;

/// One row per value, evaluated in parallel and returned in input order.
///
/// Cavity axes rescale the couplings of the base scenario: `tau-w` and
/// `tau-r` set the effective time of one coupling, `cooperativity` sets the
/// peak of both to `g^2 = C kappa gamma`, and `pulse-duration` resizes
/// square pulses about the write end and read start. Free-space scenarios
/// sweep the optical depth.
pub fn sweep(s: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<Table> {
    if values.is_empty() {
        return Err(Error::param("values", "empty sweep"));
    }
    if s.model.is_cavity() {
        let base = CavitySetup::from_scenario(s)?;
        let rows: Vec<Vec<f64>> = values
            .par_iter()
            .map(|&v| apply_axis(&base, axis, v)?.run().map(|o| o.sweep_row(v)))
            .collect::<Result<_>>()?;
        let mut t = Table::new(&CAVITY_SWEEP_HEADER);
        rows.into_iter().for_each(|r| t.push(r));
        Ok(t)
    } else {
        if axis != SweepAxis::OpticalDepth {
            return Err(Error::Unsupported(format!(
                "free-space scenarios sweep optical-depth only, not {axis:?}"
            )));
        }
        let (fs, _) = freespace_setup(s)?;
        let mut t = Table::new(&FREESPACE_SWEEP_HEADER);
        for r in storage_retrieval_sweep(&fs, values)? {
            t.push(vec![r.d, r.eta_write, r.eta_forward, r.eta_backward]);
        }
        Ok(t)
    }
}
