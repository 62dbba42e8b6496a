use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(1 - e^{-2 tau_w})(1 - e^{-2 tau_r})`: write times read efficiency with
/// no loss during storage.
pub fn total_efficiency(tau_w: f64, tau_r: f64) -> Result<f64> {
    for (name, v) in [("tau_w", tau_w), ("tau_r", tau_r)] {
        if !(v >= 0.0) {
            return Err(Error::param(name, format!("must be non-negative, got {v}")));
        }
    }
    let leg = |tau: f64| -(-2.0 * tau).exp_m1();
    Ok(leg(tau_w) * leg(tau_r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CooperativityBound {
    pub cooperativity: f64,
    /// Long-pulse efficiency limit `C / (C + 1)`.
    pub efficiency_bound: f64,
}

/// Cavity cooperativity of a medium of single-pass optical depth `d` inside
/// a cavity of finesse `F`: `C ≈ d F`.
pub fn cooperativity_from_depth(depth: f64, finesse: f64) -> Result<CooperativityBound> {
    if !(depth >= 0.0) || !depth.is_finite() {
        return Err(Error::param(
            "depth",
            format!("must be non-negative, got {depth}"),
        ));
    }
    if !(finesse >= 1.0) || !finesse.is_finite() {
        return Err(Error::param(
            "finesse",
            format!("must be at least 1, got {finesse}"),
        ));
    }
    let c = depth * finesse;
    Ok(CooperativityBound {
        cooperativity: c,
        efficiency_bound: c / (c + 1.0),
    })
}
