use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cavity::{simulate_adiabatic, CavityParams, CavityState};
use crate::error::{Error, Result};
use crate::schedules::{overlap, FieldEnvelope, Schedule, Segment, TimeGrid};

/// Tolerance on the input normalization and on the relative power left at
/// the grid edges.
pub const INPUT_TOLERANCE: f64 = 1e-6;

fn check_fraction(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must lie strictly inside (0, 1), got {v}"),
        ))
    }
}

/// Write and read couplings that store `input` with efficiency `eta_w` and
/// re-emit it `delay` later, with the same temporal shape, with read
/// efficiency `eta_r`:
///
/// ```text
/// g_w(t)^2 = kappa eta_w |E(t)|^2   / (2 (1 - eta_w + eta_w F(t)))
/// g_r(t)^2 = kappa eta_r |E(t-T)|^2 / (2 (1 - eta_r F(t-T)))
/// ```
///
/// where `F` is the running input energy from the first grid point. Both
/// schedules are monotone-cubic tables with a knot on every grid point.
pub fn synthesize_couplings(
    input: &FieldEnvelope,
    delay: f64,
    eta_w: f64,
    eta_r: f64,
    params: &CavityParams,
) -> Result<(Schedule, Schedule)> {
    check_fraction("eta_w", eta_w)?;
    check_fraction("eta_r", eta_r)?;
    if !(delay > 0.0) || !delay.is_finite() {
        return Err(Error::param(
            "delay",
            format!("must be positive, got {delay}"),
        ));
    }
    let norm = input.norm();
    if (norm - 1.0).abs() > INPUT_TOLERANCE {
        return Err(Error::param(
            "input",
            format!("must be normalized, norm is {norm}"),
        ));
    }
    let s = input.samples();
    let peak = input.peak_power();
    let edge = s[0].norm_sqr().max(s[s.len() - 1].norm_sqr());
    if edge > INPUT_TOLERANCE * peak {
        return Err(Error::param(
            "input",
            "pulse has not decayed at the grid edges; widen the grid",
        ));
    }

    let grid = input.grid();
    let energy = input.cumulative_energy();
    let kappa = params.kappa();
    let mut w = Vec::with_capacity(s.len());
    let mut r = Vec::with_capacity(s.len());
    for (e, f) in s.iter().zip(&energy) {
        let p = e.norm_sqr();
        let f = f.min(1.0);
        w.push((kappa * eta_w * p / (2.0 * (1.0 - eta_w + eta_w * f))).sqrt());
        r.push((kappa * eta_r * p / (2.0 * (1.0 - eta_r * f))).sqrt());
    }
    let times: Vec<f64> = grid.times().collect();
    let shifted: Vec<f64> = times.iter().map(|t| t + delay).collect();
    let g_w = Schedule::coupling(vec![Segment::tabulated(times, w)?])?;
    let g_r = Schedule::coupling(vec![Segment::tabulated(shifted, r)?])?;
    Ok((g_w, g_r))
}

/// Outcome of simulating a synthesized write/read pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    /// Shape overlap between `E_out(t + T)` and `E_in(t)`.
    pub overlap: f64,
    /// Delay of the cross-correlation peak, in seconds.
    pub lag: f64,
    /// Read-window output energy over input energy.
    pub energy_ratio: f64,
    pub eta_w: f64,
    pub eta_r: f64,
}

/// Run the adiabatic model on a grid extended by `delay` and measure how
/// faithfully the output reproduces the input shape.
pub fn verify_synthesis(
    input: &FieldEnvelope,
    g_w: &Schedule,
    g_r: &Schedule,
    delay: f64,
    params: &CavityParams,
) -> Result<SynthesisReport> {
    let grid = *input.grid();
    let (_, w_end) = g_w
        .support()
        .ok_or_else(|| Error::param("g_w", "empty write schedule"))?;
    let (r_start, _) = g_r
        .support()
        .ok_or_else(|| Error::param("g_r", "empty read schedule"))?;
    if r_start < w_end + grid.dt() {
        return Err(Error::param(
            "delay",
            "read coupling starts before the write coupling ends; delay must exceed the input span by a grid step",
        ));
    }
    let extra = (delay / grid.dt() - 1e-9).ceil() as usize;
    let ext = TimeGrid::new(grid.t0(), grid.dt(), grid.len() + extra)?;
    let e_in = input.embed(&ext)?;
    let g = g_w.merged(g_r)?;
    let run = simulate_adiabatic(&e_in, &g, &Schedule::zero(), params, CavityState::default())?;

    let q_in = run.ledger.input[ext.len() - 1];
    let read_from = ext.nearest_index(r_start).min(ext.len() - 1);
    let write_to = ext.nearest_index(w_end);
    let stored = run.sigma[write_to].norm_sqr();
    let read_out = run.ledger.output[ext.len() - 1] - run.ledger.output[read_from];

    let shifted: Vec<C64> = grid
        .times()
        .map(|t| run.e_out.value_at(t + delay))
        .collect();
    let ov = overlap(input.samples(), &shifted, &input.weights());

    let out = run.e_out.samples();
    let n = grid.len();
    let best = (0..=extra)
        .map(|l| {
            let c: C64 = input
                .samples()
                .iter()
                .zip(&out[l..l + n])
                .map(|(a, b)| a.conj() * b)
                .sum();
            (l, c.norm())
        })
        .fold((0, -1.0), |m, x| if x.1 > m.1 { x } else { m });

    Ok(SynthesisReport {
        overlap: ov,
        lag: best.0 as f64 * grid.dt(),
        energy_ratio: read_out / q_in,
        eta_w: stored / q_in,
        eta_r: if stored > 0.0 { read_out / stored } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::effective_time;

    fn gaussian_input() -> FieldEnvelope {
        // Intensity FWHM of 1 (amplitude width a = 1/(2 sqrt(ln 2))).
        let a = 1.0 / (2.0 * 2f64.ln().sqrt());
        let grid = TimeGrid::spanning(-2.4, 2.4, 1e-3).unwrap();
        FieldEnvelope::gaussian(grid, 0.0, a).unwrap()
    }

    #[test]
    fn rejects_out_of_range_efficiencies() {
        let e = gaussian_input();
        let p = CavityParams::new(1e3, 0.0).unwrap();
        for (w, r) in [(1.0, 0.5), (0.0, 0.5), (0.5, 1.0), (0.5, -0.1)] {
            assert!(synthesize_couplings(&e, 5.0, w, r, &p).is_err());
        }
    }

    #[test]
    fn implied_write_time_matches_target() {
        let e = gaussian_input();
        let kappa = 1e3;
        let p = CavityParams::new(kappa, 0.0).unwrap();
        let (g_w, g_r) = synthesize_couplings(&e, 5.0, 0.9, 0.8, &p).unwrap();
        let grid = TimeGrid::spanning(-2.4, 7.4, 1e-4).unwrap();
        let tau = effective_time(&g_w, kappa, &grid).unwrap().total();
        assert!((1.0 - (-2.0 * tau).exp() - 0.9).abs() < 1e-7, "tau = {tau}");
        let tau = effective_time(&g_r, kappa, &grid).unwrap().total();
        assert!((1.0 - (-2.0 * tau).exp() - 0.8).abs() < 1e-7);
        for s in [&g_w, &g_r] {
            for &t in &[-2.0, -0.3, 0.0, 1.1, 5.0, 6.0] {
                assert!(s.value(t) >= 0.0);
            }
        }
    }

    #[test]
    fn flat_input_closed_form() {
        let t0 = 1.0;
        let grid = TimeGrid::new(-1.5, 1e-3, 2001).unwrap();
        let first = grid.nearest_index(-t0);
        let last = grid.nearest_index(0.0);
        let e = FieldEnvelope::with_support(
            grid,
            vec![C64::new(1.0 / t0.sqrt(), 0.0); grid.len()],
            first,
            last,
        )
        .unwrap();
        let (kappa, eta) = (50.0, 0.7);
        let p = CavityParams::new(kappa, 0.0).unwrap();
        let (g_w, _) = synthesize_couplings(&e, 3.0, eta, 0.5, &p).unwrap();
        for &t in &[-0.9, -0.5, -0.123, -0.001] {
            let exact = (kappa * eta / (2.0 * t0 * (1.0 - eta + eta * (t + t0) / t0))).sqrt();
            let k = grid.nearest_index(t);
            assert!(
                (g_w.value(grid.time(k)) - exact).abs() < 1e-9 * exact,
                "t={t}"
            );
        }
    }

    #[test]
    fn gaussian_round_trip() {
        let e = gaussian_input();
        let p = CavityParams::new(1e3, 0.0).unwrap();
        let delay = 5.0;
        let (g_w, g_r) = synthesize_couplings(&e, delay, 0.9, 0.9, &p).unwrap();
        let rep = verify_synthesis(&e, &g_w, &g_r, delay, &p).unwrap();
        assert!(rep.overlap > 0.999, "{rep:?}");
        assert!((rep.lag - delay).abs() < 2e-3, "{rep:?}");
        assert!((rep.energy_ratio - 0.81).abs() < 1e-4, "{rep:?}");
    }
}
