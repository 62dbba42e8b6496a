use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::schedules::{FieldEnvelope, Schedule, TimeGrid};

/// Running integral `int_{t0}^{t_k} Delta dt` with per-step Simpson using
/// one-sided edge values.
pub fn accumulated_phase(delta: &Schedule, grid: &TimeGrid) -> Vec<f64> {
    let s = delta.step_samples(grid);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    for k in 0..grid.steps() {
        acc += grid.dt() / 6.0 * (s.start[k] + 4.0 * s.mid[k] + s.end[k]);
        out.push(acc);
    }
    out
}

/// Multiply `input` by `exp(i int_t^{t_ref} Delta dt')`, which cancels the
/// phase a detuned polarization picks up before `t_ref`.
///
/// `t_ref` is normally the end of the write window; it only sets a global
/// phase, so values between grid points are interpolated linearly.
pub fn compensate_detuning(
    input: &FieldEnvelope,
    delta: &Schedule,
    t_ref: f64,
) -> Result<FieldEnvelope> {
    let grid = input.grid();
    if !t_ref.is_finite() {
        return Err(Error::param("t_ref", "must be finite"));
    }
    let phi = accumulated_phase(delta, grid);
    let x = ((t_ref - grid.t0()) / grid.dt()).clamp(0.0, grid.steps() as f64);
    let k = (x.floor() as usize).min(grid.steps() - 1);
    let frac = x - k as f64;
    let phi_ref = phi[k] * (1.0 - frac) + phi[k + 1] * frac;
    let factors: Vec<C64> = phi
        .iter()
        .map(|p| C64::from_polar(1.0, phi_ref - p))
        .collect();
    input.modulated(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Segment;

    #[test]
    fn constant_detuning_gives_linear_phase() {
        let grid = TimeGrid::new(-1.0, 0.01, 101).unwrap();
        let d0 = 3.0;
        let delta = Schedule::signed(vec![Segment::square(-5.0, 5.0, d0)]).unwrap();
        let e = FieldEnvelope::from_fn(grid, |_| C64::new(1.0, 0.0)).unwrap();
        let c = compensate_detuning(&e, &delta, 0.0).unwrap();
        for (k, z) in c.samples().iter().enumerate() {
            let t = grid.time(k);
            let expected = C64::from_polar(1.0, -d0 * t);
            assert!((z - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_detuning_is_identity() {
        let grid = TimeGrid::new(0.0, 0.1, 11).unwrap();
        let e = FieldEnvelope::from_fn(grid, |t| C64::new(t, 1.0)).unwrap();
        let c = compensate_detuning(&e, &Schedule::zero(), 0.5).unwrap();
        assert_eq!(c, e);
    }
}
