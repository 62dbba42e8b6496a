use num_complex::Complex64 as C64;

use super::efficiency::{continuity_residual, split_efficiencies};
use super::{CavityModel, CavityParams, CavityState, EnergyLedger, SimResult};
use crate::error::{Error, Result};
use crate::integrate::{rk4_step, Stage};
use crate::schedules::{effective_time, FieldEnvelope, Schedule, TimeGrid};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest `dt * kappa` accepted by the full model.
pub const FULL_MODEL_MAX_STEP: f64 = 0.1;

/// Largest `dt * (g^2/kappa + gamma + |Delta|)` accepted by the adiabatic model.
pub const ADIABATIC_MAX_STEP: f64 = 1.0;

struct Drive {
    g: crate::schedules::StepSamples,
    delta: crate::schedules::StepSamples,
    e: crate::schedules::EnvelopeSteps,
}

impl Drive {
    fn new(input: &FieldEnvelope, g: &Schedule, delta: &Schedule) -> Result<Self> {
        if !g.is_nonnegative() {
            return Err(Error::param("g", "coupling schedule must be non-negative"));
        }
        let grid = input.grid();
        Ok(Self {
            g: g.step_samples(grid),
            delta: delta.step_samples(grid),
            e: input.step_samples(),
        })
    }

    #[inline]
    fn at(&self, k: usize, stage: Stage) -> (f64, f64, C64) {
        match stage {
            Stage::Start => (self.g.start[k], self.delta.start[k], self.e.start[k]),
            Stage::Mid => (self.g.mid[k], self.delta.mid[k], self.e.mid[k]),
            Stage::End => (self.g.end[k], self.delta.end[k], self.e.end[k]),
        }
    }
}

/// Integrate the full cavity model
///
/// ```text
/// sigma' = -i Delta sigma - gamma sigma + i g E
/// E'     = i g sigma - kappa E + sqrt(2 kappa) E_in
/// E_out  = -E_in + sqrt(2 kappa) E
/// ```
///
/// on the input's grid with classical RK4. Requires `dt * kappa <= 0.1`.
pub fn simulate_full(
    input: &FieldEnvelope,
    g: &Schedule,
    delta: &Schedule,
    params: &CavityParams,
    initial: CavityState,
) -> Result<SimResult> {
    let grid = *input.grid();
    let (kappa, gamma) = (params.kappa(), params.gamma());
    if grid.dt() * kappa > FULL_MODEL_MAX_STEP * (1.0 + 1e-9) {
        return Err(Error::Stability(format!(
            "full model needs dt <= {FULL_MODEL_MAX_STEP}/kappa = {:e} s, grid has dt = {:e} s",
            FULL_MODEL_MAX_STEP / kappa,
            grid.dt()
        )));
    }
    let drive = Drive::new(input, g, delta)?;
    let root = (2.0 * kappa).sqrt();

    let n = grid.len();
    let mut sigma = Vec::with_capacity(n);
    let mut e_cav = Vec::with_capacity(n);
    let mut ledger = EnergyLedger::with_capacity(n);

    // [sigma, E, Q_in, Q_out, Q_decay]
    let mut y = [
        initial.sigma,
        initial.e_cav,
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    let record =
        |y: &[C64; 5], sigma: &mut Vec<C64>, e_cav: &mut Vec<C64>, l: &mut EnergyLedger| {
            sigma.push(y[0]);
            e_cav.push(y[1]);
            l.push(y[0].norm_sqr() + y[1].norm_sqr(), y[2].re, y[3].re, y[4].re);
        };
    record(&y, &mut sigma, &mut e_cav, &mut ledger);
    for k in 0..grid.steps() {
        y = rk4_step(&y, grid.dt(), |stage, s| {
            let (gk, dk, ek) = drive.at(k, stage);
            let out = -ek + root * s[1];
            [
                -(I * dk + gamma) * s[0] + I * gk * s[1],
                I * gk * s[0] - kappa * s[1] + root * ek,
                C64::new(ek.norm_sqr(), 0.0),
                C64::new(out.norm_sqr(), 0.0),
                C64::new(2.0 * gamma * s[0].norm_sqr(), 0.0),
            ]
        });
        record(&y, &mut sigma, &mut e_cav, &mut ledger);
    }

    let e_out: Vec<C64> = input
        .samples()
        .iter()
        .zip(&e_cav)
        .map(|(&ein, &e)| -ein + root * e)
        .collect();
    finish(CavityModel::Full, input, g, sigma, e_cav, e_out, ledger)
}

/// Integrate the cavity model with the cavity field adiabatically
/// eliminated:
///
/// ```text
/// sigma' = -(i Delta + gamma) sigma - (g^2/kappa) sigma + i sqrt(2/kappa) g E_in
/// E_out  = E_in + i sqrt(2/kappa) g sigma
/// E      = (i g sigma + sqrt(2 kappa) E_in) / kappa
/// ```
pub fn simulate_adiabatic(
    input: &FieldEnvelope,
    g: &Schedule,
    delta: &Schedule,
    params: &CavityParams,
    initial: CavityState,
) -> Result<SimResult> {
    let grid = *input.grid();
    let (kappa, gamma) = (params.kappa(), params.gamma());
    let drive = Drive::new(input, g, delta)?;
    let gmax = drive.g.max_abs();
    let stiffness = gmax * gmax / kappa + gamma + drive.delta.max_abs();
    if grid.dt() * stiffness > ADIABATIC_MAX_STEP {
        return Err(Error::Stability(format!(
            "adiabatic model needs dt * (g^2/kappa + gamma + |Delta|) <= {ADIABATIC_MAX_STEP}, got {:.3}",
            grid.dt() * stiffness
        )));
    }
    let c = (2.0 / kappa).sqrt();

    let n = grid.len();
    let mut sigma = Vec::with_capacity(n);
    let mut ledger = EnergyLedger::with_capacity(n);
    let mut y = [
        initial.sigma,
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    sigma.push(y[0]);
    ledger.push(y[0].norm_sqr(), 0.0, 0.0, 0.0);
    for k in 0..grid.steps() {
        y = rk4_step(&y, grid.dt(), |stage, s| {
            let (gk, dk, ek) = drive.at(k, stage);
            let out = ek + I * c * gk * s[0];
            [
                -(I * dk + gamma + gk * gk / kappa) * s[0] + I * c * gk * ek,
                C64::new(ek.norm_sqr(), 0.0),
                C64::new(out.norm_sqr(), 0.0),
                C64::new(2.0 * gamma * s[0].norm_sqr(), 0.0),
            ]
        });
        sigma.push(y[0]);
        ledger.push(y[0].norm_sqr(), y[1].re, y[2].re, y[3].re);
    }

    let gs = g.sample(&grid);
    let root = (2.0 * kappa).sqrt();
    let e_out: Vec<C64> = input
        .samples()
        .iter()
        .zip(&sigma)
        .zip(&gs)
        .map(|((&ein, &s), &gk)| ein + I * c * gk * s)
        .collect();
    let e_cav: Vec<C64> = input
        .samples()
        .iter()
        .zip(&sigma)
        .zip(&gs)
        .map(|((&ein, &s), &gk)| (I * gk * s + root * ein) / kappa)
        .collect();
    finish(
        CavityModel::Adiabatic,
        input,
        g,
        sigma,
        e_cav,
        e_out,
        ledger,
    )
}

/// Closed-form read: `sigma(t) = sigma0 exp(-tau(t) - gamma (t - t0))`,
/// `E_out = i sqrt(2/kappa) g sigma`.
pub fn read_analytic(
    sigma0: C64,
    g: &Schedule,
    params: &CavityParams,
    grid: &TimeGrid,
) -> Result<SimResult> {
    let (kappa, gamma) = (params.kappa(), params.gamma());
    let tau = effective_time(g, kappa, grid)?.tau;
    let gs = g.sample(grid);
    let steps = g.step_samples(grid);
    let c = (2.0 / kappa).sqrt();
    let p0 = sigma0.norm_sqr();

    let sigma: Vec<C64> = (0..grid.len())
        .map(|k| sigma0 * (-tau[k] - gamma * (grid.time(k) - grid.t0())).exp())
        .collect();
    let e_out: Vec<C64> = sigma
        .iter()
        .zip(&gs)
        .map(|(&s, &gk)| I * c * gk * s)
        .collect();
    let e_cav: Vec<C64> = sigma
        .iter()
        .zip(&gs)
        .map(|(&s, &gk)| I * gk * s / kappa)
        .collect();

    let mut ledger = EnergyLedger::with_capacity(grid.len());
    let (mut out, mut dec) = (0.0, 0.0);
    ledger.push(p0, 0.0, 0.0, 0.0);
    let h = 0.5 * grid.dt();
    for k in 0..grid.steps() {
        let (a, b) = (sigma[k].norm_sqr(), sigma[k + 1].norm_sqr());
        if gamma == 0.0 {
            out = p0 * (1.0 - (-2.0 * tau[k + 1]).exp());
        } else {
            out += h * 2.0 / kappa * (steps.start[k].powi(2) * a + steps.end[k].powi(2) * b);
            dec += h * 2.0 * gamma * (a + b);
        }
        ledger.push(b, 0.0, out, dec);
    }

    let input = FieldEnvelope::zeros(*grid);
    finish(
        CavityModel::Analytic,
        &input,
        g,
        sigma,
        e_cav,
        e_out,
        ledger,
    )
}

fn finish(
    model: CavityModel,
    input: &FieldEnvelope,
    g: &Schedule,
    sigma: Vec<C64>,
    e_cav: Vec<C64>,
    e_out: Vec<C64>,
    ledger: EnergyLedger,
) -> Result<SimResult> {
    let grid = *input.grid();
    let write_end = write_window_end(g, &grid, ledger.input[grid.len() - 1] > 0.0);
    let efficiencies = split_efficiencies(&sigma, &ledger, write_end);
    let mut result = SimResult {
        model,
        grid,
        sigma,
        e_cav,
        e_in: input.clone(),
        e_out: FieldEnvelope::new(grid, e_out)?,
        ledger,
        write_end,
        efficiencies,
        continuity_residual: 0.0,
    };
    result.continuity_residual = continuity_residual(&result);
    Ok(result)
}

/// End of the first contiguous coupling window. Runs without input are
/// pure reads and store from the first grid point.
fn write_window_end(g: &Schedule, grid: &TimeGrid, has_input: bool) -> usize {
    if !has_input {
        return 0;
    }
    g.first_window(grid)
        .map_or(grid.len() - 1, |(_, last)| last)
}

impl EnergyLedger {
    fn with_capacity(n: usize) -> Self {
        Self {
            stored: Vec::with_capacity(n),
            input: Vec::with_capacity(n),
            output: Vec::with_capacity(n),
            decay: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, stored: f64, input: f64, output: f64, decay: f64) {
        self.stored.push(stored);
        self.input.push(input);
        self.output.push(output);
        self.decay.push(decay);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Segment;

    fn zero() -> Schedule {
        Schedule::zero()
    }

    #[test]
    fn zero_input_zero_state_stays_zero() {
        let grid = TimeGrid::new(0.0, 1e-3, 200).unwrap();
        let p = CavityParams::new(100.0, 0.0).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, 0.1, 3.0)]).unwrap();
        let input = FieldEnvelope::zeros(grid);
        for r in [
            simulate_full(&input, &g, &zero(), &p, CavityState::default()).unwrap(),
            simulate_adiabatic(&input, &g, &zero(), &p, CavityState::default()).unwrap(),
        ] {
            assert!(r.sigma.iter().all(|s| s.norm() == 0.0));
            assert!(r.e_out.is_zero());
            assert_eq!(r.continuity_residual, 0.0);
        }
    }

    #[test]
    fn full_model_rejects_coarse_grid() {
        let grid = TimeGrid::new(0.0, 1e-2, 100).unwrap();
        let p = CavityParams::new(100.0, 0.0).unwrap();
        let err = simulate_full(
            &FieldEnvelope::zeros(grid),
            &zero(),
            &zero(),
            &p,
            CavityState::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Stability(_)));
    }

    #[test]
    fn adiabatic_rejects_coarse_grid() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let p = CavityParams::new(1.0, 0.0).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, 5.0, 2.0)]).unwrap();
        assert!(matches!(
            simulate_adiabatic(
                &FieldEnvelope::zeros(grid),
                &g,
                &zero(),
                &p,
                CavityState::default()
            ),
            Err(Error::Stability(_))
        ));
    }

    #[test]
    fn decoupled_detuned_decay() {
        let (gamma, d0) = (0.7, 5.0);
        let grid = TimeGrid::new(0.0, 1e-3, 2001).unwrap();
        let p = CavityParams::new(10.0, gamma).unwrap();
        let delta = Schedule::signed(vec![Segment::square(-1.0, 10.0, d0)]).unwrap();
        let s0 = C64::new(0.6, 0.8);
        let r = simulate_adiabatic(
            &FieldEnvelope::zeros(grid),
            &zero(),
            &delta,
            &p,
            CavityState::excited(s0),
        )
        .unwrap();
        for (k, s) in r.sigma.iter().enumerate() {
            let t = grid.time(k);
            let exact = s0 * (-(gamma + I * d0) * t).exp();
            assert!((s - exact).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn analytic_read_matches_closed_form() {
        let kappa = 50.0;
        let g0 = (kappa * 2.0_f64).sqrt(); // g^2/kappa = 2
        let grid = TimeGrid::new(0.0, 1e-3, 1001).unwrap();
        let g = Schedule::coupling(vec![Segment::square(0.0, 0.5, g0)]).unwrap();
        let p = CavityParams::new(kappa, 0.0).unwrap();
        let r = read_analytic(C64::new(1.0, 0.0), &g, &p, &grid).unwrap();
        // tau_r = 1
        let eta = r.efficiencies.eta_r.unwrap();
        assert!((eta - (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert!(r.continuity_residual < 1e-8);
    }

    #[test]
    fn empty_cavity_reflects_everything() {
        let kappa = 1e3;
        let grid = TimeGrid::new(-0.1, 5e-5, 4001).unwrap();
        let input = FieldEnvelope::gaussian(grid, 0.0, 0.02).unwrap();
        let p = CavityParams::new(kappa, 0.0).unwrap();
        let r = simulate_full(&input, &zero(), &zero(), &p, CavityState::default()).unwrap();
        assert!(r.efficiencies.eta_w.unwrap() < 1e-30);
        assert!((r.efficiencies.leakage.unwrap() - 1.0).abs() < 1e-6);
        // An empty one-sided cavity is an all-pass filter: to leading order
        // the reflected pulse is the input delayed by 2/kappa.
        let peak = input.peak_power().sqrt();
        for k in 0..grid.len() {
            let delayed = input.value_at(grid.time(k) - 2.0 / kappa).norm();
            let d = (r.e_out.samples()[k].norm() - delayed).abs();
            assert!(d < 0.01 * peak, "k={k} d={d}");
        }
    }
}
