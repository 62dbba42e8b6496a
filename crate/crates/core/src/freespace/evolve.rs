use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::bessel::{k0, k1};
use super::{FreeSpaceTransform, MediumParams, SpatialGrid, SpinWave};
use crate::error::{Error, Result};
use crate::schedules::{
    cumulative_trapezoid, EnvelopeSteps, FieldEnvelope, Schedule, StepSamples, TimeGrid,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest `Delta tau * L` per time step and `tau * dz` per cell.
pub const MAX_KERNEL_STEP: f64 = 0.5;

/// Field and polarization on the full `(t, z)` grid, in physical variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeSpaceFields {
    pub tgrid: TimeGrid,
    pub zgrid: SpatialGrid,
    pub transform: FreeSpaceTransform,
    /// `E(z_i, t_k)` at index `k * nz + i`.
    pub field: Vec<C64>,
    /// `sigma(z_i, t_k)` at index `k * nz + i`.
    pub polarization: Vec<C64>,
    input: FieldEnvelope,
    light_speed: f64,
    gamma: f64,
}

/// Cumulative energy bookkeeping of a free-space run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeSpaceLedger {
    /// `int |E(0,t)|^2 dt`
    pub input: Vec<f64>,
    /// `int |E(L,t)|^2 dt`
    pub output: Vec<f64>,
    /// `(1/c) int |sigma|^2 dz`
    pub stored: Vec<f64>,
    /// `2 gamma int stored dt`
    pub decay: Vec<f64>,
}

impl FreeSpaceLedger {
    /// Worst relative violation of `input = output + stored + decay`
    /// (counting the initial excitation as input).
    pub fn closure(&self) -> f64 {
        let scale = self.stored[0] + self.input[self.input.len() - 1];
        if scale == 0.0 {
            return 0.0;
        }
        (0..self.stored.len())
            .map(|k| {
                (self.stored[k] - self.stored[0] + self.output[k] + self.decay[k] - self.input[k])
                    .abs()
            })
            .fold(0.0, f64::max)
            / scale
    }
}

impl FreeSpaceFields {
    pub fn field_at(&self, k: usize, i: usize) -> C64 {
        self.field[k * self.zgrid.len() + i]
    }

    pub fn polarization_at(&self, k: usize, i: usize) -> C64 {
        self.polarization[k * self.zgrid.len() + i]
    }

    /// Field leaving the medium, `E(L, t)`.
    pub fn output(&self) -> FieldEnvelope {
        let nz = self.zgrid.len();
        let samples = (0..self.tgrid.len())
            .map(|k| self.field[k * nz + nz - 1])
            .collect();
        FieldEnvelope::new(self.tgrid, samples).expect("finite fields on a matching grid")
    }

    pub fn spin_wave(&self, k: usize) -> SpinWave {
        let nz = self.zgrid.len();
        SpinWave::new(self.zgrid, self.polarization[k * nz..(k + 1) * nz].to_vec())
            .expect("finite polarization")
    }

    pub fn ledger(&self) -> FreeSpaceLedger {
        let stored: Vec<f64> = (0..self.tgrid.len())
            .map(|k| self.spin_wave(k).excitation(self.light_speed))
            .collect();
        let out: Vec<f64> = self
            .output()
            .samples()
            .iter()
            .map(|z| z.norm_sqr())
            .collect();
        build_ledger(&self.input, &out, stored, self.gamma)
    }

    /// Largest relative discrepancy of field and polarization against
    /// another solution on the same grids, each scaled by its own peak.
    pub fn max_relative_difference(&self, other: &FreeSpaceFields) -> f64 {
        let rel = |a: &[C64], b: &[C64]| {
            let peak = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if peak == 0.0 {
                return b.iter().map(|z| z.norm()).fold(0.0, f64::max);
            }
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                / peak
        };
        rel(&self.field, &other.field).max(rel(&self.polarization, &other.polarization))
    }
}

fn build_ledger(
    input: &FieldEnvelope,
    out_power: &[f64],
    stored: Vec<f64>,
    gamma: f64,
) -> FreeSpaceLedger {
    let dt = input.grid().dt();
    let decay = cumulative_trapezoid(&stored, dt)
        .into_iter()
        .map(|v| 2.0 * gamma * v)
        .collect();
    FreeSpaceLedger {
        input: input.cumulative_energy(),
        output: cumulative_trapezoid(out_power, dt),
        stored,
        decay,
    }
}

/// Inputs shared by both solvers, in transformed variables.
struct Problem {
    grid: TimeGrid,
    zgrid: SpatialGrid,
    tr: FreeSpaceTransform,
    g: StepSamples,
    g_points: Vec<f64>,
    e0: EnvelopeSteps,
    input: FieldEnvelope,
    s0: Vec<C64>,
    c: f64,
    gamma: f64,
}

impl Problem {
    fn new(
        boundary: &FieldEnvelope,
        s0: &SpinWave,
        g: &Schedule,
        delta: &Schedule,
        medium: &MediumParams,
    ) -> Result<Self> {
        if !g.is_nonnegative() {
            return Err(Error::param("g", "coupling schedule must be non-negative"));
        }
        let zgrid = *s0.grid();
        if ((zgrid.length() - medium.length()) / medium.length()).abs() > 1e-12 {
            return Err(Error::param(
                "spin wave",
                "z grid does not span the medium length",
            ));
        }
        let grid = *boundary.grid();
        Ok(Self {
            grid,
            zgrid,
            tr: FreeSpaceTransform::new(g, delta, medium, &grid)?,
            g: g.step_samples(&grid),
            g_points: g.sample(&grid),
            e0: boundary.step_samples(),
            input: boundary.clone(),
            s0: s0.samples().to_vec(),
            c: medium.light_speed(),
            gamma: medium.gamma(),
        })
    }

    fn max_time_kernel_step(&self) -> f64 {
        self.tr.max_step() * self.zgrid.length()
    }

    /// Transformed boundary field at a grid point.
    fn e0_hat(&self, k: usize) -> C64 {
        self.input.samples()[k] * self.tr.factor(k)
    }

    /// Assemble physical fields from transformed `S` and `E^` rows.
    fn fields(self, s_hat: Vec<C64>, e_hat: Vec<C64>) -> FreeSpaceFields {
        let nz = self.zgrid.len();
        let mut field = e_hat;
        let mut polarization = s_hat;
        for k in 0..self.grid.len() {
            let inv = 1.0 / self.tr.factor(k);
            for i in 0..nz {
                field[k * nz + i] *= inv;
                polarization[k * nz + i] *= inv;
            }
        }
        FreeSpaceFields {
            tgrid: self.grid,
            zgrid: self.zgrid,
            transform: self.tr,
            field,
            polarization,
            input: self.input,
            light_speed: self.c,
            gamma: self.gamma,
        }
    }
}

fn cumulative_into(s: &[C64], dz: f64, out: &mut [C64]) {
    let mut acc = C64::new(0.0, 0.0);
    out[0] = acc;
    for i in 1..s.len() {
        acc += 0.5 * dz * (s[i - 1] + s[i]);
        out[i] = acc;
    }
}

/// Explicit midpoint march in time; `observe(k, S, cumulative S)` sees
/// every grid point including the first.
fn march(p: &Problem, mut observe: impl FnMut(usize, &[C64], &[C64])) -> Result<()> {
    let step = p.max_time_kernel_step();
    if step > MAX_KERNEL_STEP {
        return Err(Error::Stability(format!(
            "free-space step needs Delta tau * L <= {MAX_KERNEL_STEP}, got {step:.3}; refine the time grid"
        )));
    }
    let nz = p.zgrid.len();
    let dz = p.zgrid.dz();
    let dt = p.grid.dt();
    let mut s = p.s0.clone();
    let mut half = vec![C64::new(0.0, 0.0); nz];
    let mut cum = vec![C64::new(0.0, 0.0); nz];
    cumulative_into(&s, dz, &mut cum);
    observe(0, &s, &cum);
    for k in 0..p.grid.steps() {
        let (g, e) = (p.g.start[k], p.e0.start[k] * p.tr.factor(k));
        for i in 0..nz {
            half[i] = s[i] + 0.5 * dt * (I * g * e - g * g / p.c * cum[i]);
        }
        cumulative_into(&half, dz, &mut cum);
        let (g, e) = (p.g.mid[k], p.e0.mid[k] * p.tr.factor_mid(k));
        for i in 0..nz {
            s[i] += dt * (I * g * e - g * g / p.c * cum[i]);
        }
        cumulative_into(&s, dz, &mut cum);
        observe(k + 1, &s, &cum);
    }
    Ok(())
}

/// Integrate the free-space equations numerically.
///
/// Time advances by the explicit midpoint rule; at every stage the field
/// along `z` is rebuilt from the polarization by cumulative trapezoid.
/// `boundary` is `E(0, t)` and fixes the time grid; `s0` is `sigma(z, t0)`
/// and fixes the `z` grid.
pub fn numeric_evolution(
    boundary: &FieldEnvelope,
    s0: &SpinWave,
    g: &Schedule,
    delta: &Schedule,
    medium: &MediumParams,
) -> Result<FreeSpaceFields> {
    let p = Problem::new(boundary, s0, g, delta, medium)?;
    let nz = p.zgrid.len();
    let n = p.grid.len() * nz;
    let mut s_hat = Vec::with_capacity(n);
    let mut e_hat = Vec::with_capacity(n);
    march(&p, |k, s, cum| {
        let (g, e0) = (p.g_points[k], p.e0_hat(k));
        s_hat.extend_from_slice(s);
        e_hat.extend(cum.iter().map(|q| e0 + I * g / p.c * q));
    })?;
    Ok(p.fields(s_hat, e_hat))
}

/// Boundary output and final spin wave of a numeric run, without storing
/// the full fields.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub output: FieldEnvelope,
    pub final_wave: SpinWave,
    pub ledger: FreeSpaceLedger,
}

pub fn numeric_trace(
    boundary: &FieldEnvelope,
    s0: &SpinWave,
    g: &Schedule,
    delta: &Schedule,
    medium: &MediumParams,
) -> Result<EvolutionTrace> {
    let p = Problem::new(boundary, s0, g, delta, medium)?;
    let nt = p.grid.len();
    let weights = p.zgrid.trapezoid_weights();
    let mut out = Vec::with_capacity(nt);
    let mut stored = Vec::with_capacity(nt);
    let mut last = Vec::new();
    march(&p, |k, s, cum| {
        let inv = 1.0 / p.tr.factor(k);
        let q = cum[cum.len() - 1];
        out.push((p.e0_hat(k) + I * p.g_points[k] / p.c * q) * inv);
        let scale = inv.norm_sqr() / p.c;
        stored.push(
            scale
                * s.iter()
                    .zip(&weights)
                    .map(|(z, w)| w * z.norm_sqr())
                    .sum::<f64>(),
        );
        if k + 1 == nt {
            last = s.iter().map(|z| z * inv).collect();
        }
    })?;
    let out_power: Vec<f64> = out.iter().map(|z| z.norm_sqr()).collect();
    let ledger = build_ledger(&p.input, &out_power, stored, p.gamma);
    Ok(EvolutionTrace {
        output: FieldEnvelope::new(p.grid, out)?,
        final_wave: SpinWave::new(p.zgrid, last)?,
        ledger,
    })
}

/// Evaluate the closed-form Bessel-kernel solution on the grid, with
/// `F(t) = i g(t) E^(0, t)`:
///
/// ```text
/// E^(z,t) = E^(0,t) + i g/c [ int_0^z S(z',0) K0(-tau (z - z')) dz'
///                             + z int_t0^t F(t') K1(-(tau - tau') z) dt' ]
/// S(z,t)  = S(z,0) - tau int_0^z S(z',0) K1(-tau (z - z')) dz'
///                  + int_t0^t F(t') K0(-(tau - tau') z) dt'
/// ```
///
/// Both integrals use the trapezoid rule on the solution grids.
pub fn analytic_evolution(
    boundary: &FieldEnvelope,
    s0: &SpinWave,
    g: &Schedule,
    delta: &Schedule,
    medium: &MediumParams,
) -> Result<FreeSpaceFields> {
    let p = Problem::new(boundary, s0, g, delta, medium)?;
    let (nt, nz) = (p.grid.len(), p.zgrid.len());
    let dz = p.zgrid.dz();
    let tau = &p.tr.tau;
    let per_step = p.max_time_kernel_step();
    let per_cell = p.tr.total() * dz;
    if per_step.max(per_cell) > MAX_KERNEL_STEP {
        return Err(Error::Resolution(format!(
            "kernel argument changes by {:.3} per cell (limit {MAX_KERNEL_STEP}); refine the grids",
            per_step.max(per_cell)
        )));
    }

    let h = 0.5 * p.grid.dt();
    let f_start: Vec<C64> = (0..nt - 1)
        .map(|k| I * p.g.start[k] * p.e0.start[k] * p.tr.factor(k))
        .collect();
    let f_end: Vec<C64> = (0..nt - 1)
        .map(|k| I * p.g.end[k] * p.e0.end[k] * p.tr.factor(k + 1))
        .collect();
    let has_input = f_start.iter().chain(&f_end).any(|z| z.norm_sqr() > 0.0);
    let has_wave = p.s0.iter().any(|z| z.norm_sqr() > 0.0);

    let mut s_hat = vec![C64::new(0.0, 0.0); nt * nz];
    let mut e_hat = vec![C64::new(0.0, 0.0); nt * nz];
    let mut kz0 = vec![0.0; nz];
    let mut kz1 = vec![0.0; nz];
    let mut kt0 = vec![0.0; nt];
    let mut kt1 = vec![0.0; nt];
    for j in 0..nt {
        let tj = tau[j];
        if has_wave {
            for q in 0..nz {
                let a = -tj * q as f64 * dz;
                kz0[q] = k0(a);
                kz1[q] = k1(a);
            }
        }
        let prefactor = I * p.g_points[j] / p.c;
        let e0 = p.e0_hat(j);
        for i in 0..nz {
            let z = p.zgrid.position(i);
            let (mut zs0, mut zs1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            if has_wave && i > 0 {
                for m in 0..=i {
                    let w = if m == 0 || m == i { 0.5 * dz } else { dz };
                    zs0 += w * p.s0[m] * kz0[i - m];
                    zs1 += w * p.s0[m] * kz1[i - m];
                }
            }
            let (mut ts0, mut ts1) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            if has_input && j > 0 {
                for l in 0..=j {
                    let a = -(tj - tau[l]) * z;
                    kt0[l] = k0(a);
                    kt1[l] = k1(a);
                }
                for k in 0..j {
                    ts0 += h * (f_start[k] * kt0[k] + f_end[k] * kt0[k + 1]);
                    ts1 += h * (f_start[k] * kt1[k] + f_end[k] * kt1[k + 1]);
                }
            }
            e_hat[j * nz + i] = e0 + prefactor * (zs0 + z * ts1);
            s_hat[j * nz + i] = p.s0[i] - tj * zs1 + ts0;
        }
    }
    Ok(p.fields(s_hat, e_hat))
}
