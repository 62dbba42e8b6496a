//! A quick self-check of the solvers against closed forms, run by
//! `dipmem verify`.

use serde::{Deserialize, Serialize};

use super::presets::{load_preset, PRESETS};
use super::Scenario;
use crate::cavity::{simulate_adiabatic, square_pulse_efficiency, CavityParams, CavityState};
use crate::control::{
    optimal_write_input, synthesize_couplings, verify_synthesis, write_efficiency_of,
};
use crate::error::Result;
use crate::freespace::{
    entire_bessel_kernel, numeric_trace, BesselOrder, MediumParams, SpatialGrid, SpinWave,
};
use crate::schedules::{FieldEnvelope, Schedule, Segment, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Measured error or figure of merit.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn read_law() -> Result<f64> {
    let p = CavityParams::new(1.0, 0.0)?;
    let grid = TimeGrid::spanning(0.0, 3.0, 1e-3)?;
    let g = Schedule::coupling(vec![Segment::gaussian(0.0, 3.0, 1.2, 1.2, 0.5)])?;
    let tau = crate::schedules::effective_time(&g, 1.0, &grid)?.total();
    let r = simulate_adiabatic(
        &FieldEnvelope::zeros(grid),
        &g,
        &Schedule::zero(),
        &p,
        CavityState::excited(1.0.into()),
    )?;
    Ok(rel(
        r.efficiencies.eta_r.unwrap_or(f64::NAN),
        -(-2.0 * tau).exp_m1(),
    ))
}

fn write_optimality() -> Result<f64> {
    let p = CavityParams::new(1.0, 0.0)?;
    let grid = TimeGrid::spanning(-1.0, 0.0, 1e-3)?;
    let g = Schedule::coupling(vec![Segment::square(-1.0, 0.0, 1.0)])?;
    let e = optimal_write_input(&g, &p, &grid)?;
    Ok(rel(write_efficiency_of(&e, &g, &p)?, -(-2.0f64).exp_m1()))
}

fn square_pulse() -> Result<f64> {
    // C = 1, two effective-time constants of writing and reading.
    let (kappa, gamma, g0, t) = (1.0, 1.0, 1.0, 2.0);
    let p = CavityParams::new(kappa, gamma)?;
    let grid = TimeGrid::spanning(-t, t, 1e-3)?;
    let g = Schedule::coupling(vec![
        Segment::square(-t, 0.0, g0),
        Segment::square(0.0, t, g0),
    ])?;
    let e = optimal_write_input(
        &Schedule::coupling(vec![Segment::square(-t, 0.0, g0)])?,
        &p,
        &grid,
    )?;
    let r = simulate_adiabatic(&e, &g, &Schedule::zero(), &p, CavityState::default())?;
    let expected = square_pulse_efficiency(g0, kappa, gamma, t)?;
    let e = r.with_write_end(grid.nearest_index(0.0))?.efficiencies;
    let w = rel(e.eta_w.unwrap_or(f64::NAN), expected);
    Ok(w.max(rel(e.eta_r.unwrap_or(f64::NAN), expected)))
}

fn synthesis() -> Result<f64> {
    let p = CavityParams::new(1.0, 0.0)?;
    let grid = TimeGrid::spanning(-2.4, 2.4, 2e-3)?;
    let e = FieldEnvelope::gaussian(grid, 0.0, 1.0 / (2.0 * 2f64.ln().sqrt()))?;
    let (gw, gr) = synthesize_couplings(&e, 5.0, 0.9, 0.9, &p)?;
    Ok(1.0 - verify_synthesis(&e, &gw, &gr, 5.0, &p)?.overlap)
}

fn bessel_identity() -> f64 {
    // K0(a) = K1(a) + a K1'(a), with K1' by central differences.
    [-30.0, -2.5, 0.3, 4.0, 150.0]
        .iter()
        .map(|&a: &f64| {
            let h = 1e-5 * a.abs().max(1.0);
            let k1 = |x| entire_bessel_kernel(BesselOrder::One, x);
            let d = (k1(a + h) - k1(a - h)) / (2.0 * h);
            let k0 = entire_bessel_kernel(BesselOrder::Zero, a);
            (k0 - k1(a) - a * d).abs() / k0.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn freespace_ledger() -> Result<f64> {
    let m = MediumParams::with_light_speed(1.0, 0.2, 1.0)?;
    let grid = TimeGrid::spanning(-4.0, 4.0, 0.01)?;
    let e = FieldEnvelope::gaussian(grid, 0.0, 0.6)?;
    let g = Schedule::coupling(vec![Segment::gaussian(-4.0, 4.0, 1.5, 0.0, 1.5)])?;
    let z = SpatialGrid::new(1.0, 201)?;
    Ok(
        numeric_trace(&e, &SpinWave::zeros(z), &g, &Schedule::zero(), &m)?
            .ledger
            .closure(),
    )
}

fn presets_round_trip() -> Result<f64> {
    let mut bad = 0.0;
    for (name, _) in PRESETS {
        let s = load_preset(name)?;
        if Scenario::from_toml(&s.to_toml()?)? != s {
            bad += 1.0;
        }
    }
    Ok(bad)
}

/// Run every check. Errors inside a check count as failures.
pub fn verify_suite() -> Vec<Check> {
    let wrap = |name: &str, r: Result<f64>, tol: f64| match r {
        Ok(v) => Check::below(name, v, tol),
        Err(_) => Check::below(name, f64::NAN, tol),
    };
    vec![
        wrap("read law eta_r = 1 - exp(-2 tau_r)", read_law(), 1e-6),
        wrap(
            "optimal write eta_w = 1 - exp(-2 tau_w)",
            write_optimality(),
            1e-6,
        ),
        wrap("square pulses with decay", square_pulse(), 1e-5),
        wrap(
            "coupling synthesis shape overlap deficit",
            synthesis(),
            1e-3,
        ),
        Check::below("Bessel kernel recurrence", bessel_identity(), 1e-7),
        wrap("free-space energy ledger closure", freespace_ledger(), 1e-4),
        wrap(
            "preset config round trip failures",
            presets_round_trip(),
            0.5,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_suite_passes() {
        for c in verify_suite() {
            assert!(c.passed, "{c:?}");
        }
    }
}
