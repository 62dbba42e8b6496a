use num_complex::Complex64 as C64;

use super::{Efficiencies, EnergyLedger, SimResult};
use crate::error::{Error, Result};

/// Closed-form efficiency of a square read pulse, or of a square write
/// pulse fed its optimal input, with `r = g0^2 / kappa`:
///
/// `eta = r / (r + gamma) * (1 - exp(-2 (r + gamma) T))`.
pub fn square_pulse_efficiency(g0: f64, kappa: f64, gamma: f64, duration: f64) -> Result<f64> {
    if !(g0 >= 0.0) || !g0.is_finite() {
        return Err(Error::param(
            "g0",
            format!("must be non-negative, got {g0}"),
        ));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(
            "kappa",
            format!("must be positive, got {kappa}"),
        ));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::param(
            "gamma",
            format!("must be non-negative, got {gamma}"),
        ));
    }
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::param(
            "duration",
            format!("must be non-negative, got {duration}"),
        ));
    }
    let r = g0 * g0 / kappa;
    let total = r + gamma;
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(r / total * -(-2.0 * total * duration).exp_m1())
}

/// Largest per-step violation of `d(stored) = d(input) - d(output) - d(decay)`,
/// relative to `dt` times the peak in- or outgoing power. Zero for runs with
/// no field at all.
pub fn continuity_residual(result: &SimResult) -> f64 {
    let peak = result.e_in.peak_power().max(result.e_out.peak_power());
    if peak == 0.0 {
        return 0.0;
    }
    let l = &result.ledger;
    let scale = result.grid.dt() * peak;
    (0..result.grid.steps())
        .map(|k| {
            let d = |v: &[f64]| v[k + 1] - v[k];
            (d(&l.stored) - d(&l.input) + d(&l.output) + d(&l.decay)).abs() / scale
        })
        .fold(0.0, f64::max)
}

pub(super) fn split_efficiencies(sigma: &[C64], ledger: &EnergyLedger, ks: usize) -> Efficiencies {
    let end = sigma.len() - 1;
    let q_in = ledger.input[end];
    let stored = sigma[ks].norm_sqr();
    let read_out = ledger.output[end] - ledger.output[ks];
    let per_input = |x: f64| (q_in > 0.0).then(|| x / q_in);
    let eta_r = if stored > 0.0 {
        Some(read_out / stored)
    } else if q_in > 0.0 {
        Some(0.0)
    } else {
        None
    };
    Efficiencies {
        eta_w: per_input(stored),
        eta_r,
        eta_tot: per_input(read_out),
        leakage: per_input(ledger.output[ks]),
        decay_loss: per_input(ledger.decay[ks]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_formula_limits() {
        // Lossless, long pulse: unit efficiency.
        assert!((square_pulse_efficiency(10.0, 1.0, 0.0, 10.0).unwrap() - 1.0).abs() < 1e-12);
        // r = 1, gamma = 0, T = 0.5 -> 1 - e^-1
        let v = square_pulse_efficiency(1.0, 1.0, 0.0, 0.5).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        // r = gamma: bounded by one half.
        let v = square_pulse_efficiency(1.0, 1.0, 1.0, 100.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(square_pulse_efficiency(0.0, 1.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(square_pulse_efficiency(2.0, 1.0, 0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn square_formula_rejects_bad_input() {
        assert!(square_pulse_efficiency(-1.0, 1.0, 0.0, 1.0).is_err());
        assert!(square_pulse_efficiency(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(square_pulse_efficiency(1.0, 1.0, -0.1, 1.0).is_err());
        assert!(square_pulse_efficiency(1.0, 1.0, 0.0, -1.0).is_err());
        assert!(square_pulse_efficiency(f64::NAN, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn split_without_input_is_read_only() {
        let sigma = vec![C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
        let ledger = EnergyLedger {
            stored: vec![1.0, 0.25],
            input: vec![0.0, 0.0],
            output: vec![0.0, 0.75],
            decay: vec![0.0, 0.0],
        };
        let e = split_efficiencies(&sigma, &ledger, 0);
        assert_eq!(e.eta_r, Some(0.75));
        assert_eq!(e.eta_w, None);
        assert_eq!(e.eta_tot, None);
    }

    #[test]
    fn split_with_nothing_at_all() {
        let sigma = vec![C64::new(0.0, 0.0); 3];
        let ledger = EnergyLedger {
            stored: vec![0.0; 3],
            input: vec![0.0; 3],
            output: vec![0.0; 3],
            decay: vec![0.0; 3],
        };
        assert_eq!(
            split_efficiencies(&sigma, &ledger, 0),
            Efficiencies::default()
        );
    }
}
