use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cavity::CavityParams;
use crate::error::{Error, Result};
use crate::schedules::{effective_time, FieldEnvelope, Schedule, TimeGrid};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Iteration cap and stopping tolerance of [`variational_optimize`].
pub const MAX_ITERATIONS: usize = 200;
pub const TOLERANCE: f64 = 1e-13;

/// The linear map from an input field to the stored polarization at the
/// end of the write window, `sigma(t_s) = sum_j c_j E_j`.
///
/// The kernel comes from the adjoint equation `psi' = (i Delta + gamma +
/// g^2/kappa) psi`, `psi(t_s) = 1`, integrated backward with exponential
/// Simpson steps; `c` is its trapezoid quadrature against `i sqrt(2/kappa) g`
/// using the one-sided coupling values at every step edge.
#[derive(Debug, Clone)]
pub struct WriteFunctional {
    grid: TimeGrid,
    window: (usize, usize),
    start: Vec<C64>,
    end: Vec<C64>,
}

impl WriteFunctional {
    pub fn new(
        g: &Schedule,
        delta: &Schedule,
        params: &CavityParams,
        grid: &TimeGrid,
    ) -> Result<Self> {
        if !g.is_nonnegative() {
            return Err(Error::param("g", "coupling schedule must be non-negative"));
        }
        let window = g.first_window(grid).ok_or_else(|| {
            Error::param("g", "coupling is zero on the whole grid: no write window")
        })?;
        let (kappa, gamma) = (params.kappa(), params.gamma());
        let gs = g.step_samples(grid);
        let ds = delta.step_samples(grid);
        let rate = |g: f64, d: f64| C64::new(gamma + g * g / kappa, d);
        let c = (2.0 / kappa).sqrt();

        let (first, last) = window;
        let mut psi = vec![C64::new(0.0, 0.0); grid.len()];
        psi[last] = C64::new(1.0, 0.0);
        for k in (first..last).rev() {
            let integral = grid.dt() / 6.0
                * (rate(gs.start[k], ds.start[k])
                    + 4.0 * rate(gs.mid[k], ds.mid[k])
                    + rate(gs.end[k], ds.end[k]));
            psi[k] = psi[k + 1] * (-integral).exp();
        }
        let mut start = vec![C64::new(0.0, 0.0); grid.steps()];
        let mut end = vec![C64::new(0.0, 0.0); grid.steps()];
        for k in first..last {
            start[k] = I * c * gs.start[k] * psi[k];
            end[k] = I * c * gs.end[k] * psi[k + 1];
        }
        Ok(Self {
            grid: *grid,
            window,
            start,
            end,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Grid indices of the write window; storage is read at the second.
    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    /// Polarization stored at the end of the write window.
    pub fn stored(&self, input: &FieldEnvelope) -> Result<C64> {
        self.check_grid(input)?;
        let e = input.step_samples();
        let h = 0.5 * self.grid.dt();
        let (first, last) = self.window;
        Ok((first..last)
            .map(|k| h * (self.start[k] * e.start[k] + self.end[k] * e.end[k]))
            .sum())
    }

    /// `|sigma(t_s)|^2 / int |E|^2 dt`.
    pub fn efficiency(&self, input: &FieldEnvelope) -> Result<f64> {
        let norm = input.norm();
        if !(norm > 0.0) {
            return Err(Error::param("input", "zero-norm input field"));
        }
        Ok(self.stored(input)?.norm_sqr() / norm)
    }

    /// Per-point coefficients `c_j` and trapezoid weights `w_j` over the window.
    fn coefficients(&self) -> (Vec<C64>, Vec<f64>) {
        let n = self.grid.len();
        let h = 0.5 * self.grid.dt();
        let mut c = vec![C64::new(0.0, 0.0); n];
        let mut w = vec![0.0; n];
        let (first, last) = self.window;
        for k in first..last {
            c[k] += h * self.start[k];
            c[k + 1] += h * self.end[k];
            w[k] += h;
            w[k + 1] += h;
        }
        (c, w)
    }

    fn envelope(&self, samples: Vec<C64>) -> Result<FieldEnvelope> {
        let (first, last) = self.window;
        FieldEnvelope::with_support(self.grid, samples, first, last)?.normalized()
    }

    fn check_grid(&self, input: &FieldEnvelope) -> Result<()> {
        if input.grid() != &self.grid {
            return Err(Error::param(
                "input",
                "field grid differs from the functional's grid",
            ));
        }
        Ok(())
    }
}

/// Write efficiency of an arbitrary input under coupling `g_w`, without
/// detuning. The input need not be normalized.
pub fn write_efficiency_of(
    input: &FieldEnvelope,
    g_w: &Schedule,
    params: &CavityParams,
) -> Result<f64> {
    WriteFunctional::new(g_w, &Schedule::zero(), params, input.grid())?.efficiency(input)
}

/// Closed-form optimal write input, normalized.
///
/// For `gamma = 0` any coupling shape is allowed and
/// `E(t) ∝ g(t) exp(tau(t))`. For `gamma > 0` only a single square pulse is
/// supported, with `E(t) ∝ exp((g0^2/kappa + gamma)(t - t_s))`.
pub fn optimal_write_input(
    g_w: &Schedule,
    params: &CavityParams,
    grid: &TimeGrid,
) -> Result<FieldEnvelope> {
    if !g_w.is_nonnegative() {
        return Err(Error::param(
            "g_w",
            "coupling schedule must be non-negative",
        ));
    }
    let (first, last) = g_w.first_window(grid).ok_or_else(|| {
        Error::param("g_w", "coupling is zero on the whole grid: no write window")
    })?;
    let samples: Vec<C64> = if params.gamma() == 0.0 {
        let tau = effective_time(g_w, params.kappa(), grid)?.tau;
        let steps = g_w.step_samples(grid);
        (0..grid.len())
            .map(|k| {
                let g = if k == first {
                    steps.start[k]
                } else if k == last || (k > first && k < last) {
                    steps.end[k - 1]
                } else {
                    0.0
                };
                // Shift the exponent so the largest sample is O(1).
                C64::new(g * (tau[k] - tau[last]).exp(), 0.0)
            })
            .collect()
    } else {
        let (_, _, g0) = g_w.as_square().ok_or_else(|| {
            Error::Unsupported(
                "closed-form optimal input with gamma > 0 exists only for a single square coupling pulse; use variational_optimize".into(),
            )
        })?;
        let rate = g0 * g0 / params.kappa() + params.gamma();
        let ts = grid.time(last);
        grid.times()
            .map(|t| C64::new((rate * (t - ts)).exp(), 0.0))
            .collect()
    };
    FieldEnvelope::with_support(*grid, samples, first, last)?.normalized()
}

/// Numerically maximize `|sigma(t_s)|^2` over unit-norm inputs.
///
/// The stored polarization is a linear functional of the input, so the
/// constrained objective is the Rayleigh quotient of the rank-one operator
/// `conj(c) c^T` in the trapezoid inner product. Power iteration from a
/// fixed pseudo-random start converges to its top eigenvector, the
/// normalized adjoint kernel. The returned envelope has its largest sample
/// real and positive.
pub fn variational_optimize(
    g_w: &Schedule,
    delta: &Schedule,
    params: &CavityParams,
    grid: &TimeGrid,
) -> Result<FieldEnvelope> {
    let functional = WriteFunctional::new(g_w, delta, params, grid)?;
    let (c, w) = functional.coefficients();
    let (first, last) = functional.window();
    let inner = |a: &[C64], b: &[C64]| -> C64 {
        a.iter()
            .zip(b)
            .zip(&w)
            .map(|((x, y), wk)| x.conj() * y * wk)
            .sum()
    };
    let unit = |v: Vec<C64>| -> Option<Vec<C64>> {
        let n = inner(&v, &v).re.sqrt();
        (n > 0.0).then(|| v.into_iter().map(|z| z / n).collect())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<C64> = (0..grid.len())
        .map(|k| {
            if k >= first && k <= last {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    v = unit(v).ok_or_else(|| Error::param("g_w", "empty write window"))?;

    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // M v = conj(c)/w * (c . v); lambda = <v, M v> is the efficiency.
        let projection: C64 = c.iter().zip(&v).map(|(ck, vk)| ck * vk).sum();
        let mv: Vec<C64> = c
            .iter()
            .zip(&w)
            .map(|(ck, wk)| {
                if *wk > 0.0 {
                    ck.conj() / wk * projection
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let next = match unit(mv) {
            Some(next) => next,
            None => {
                return Err(Error::Convergence {
                    iterations: 0,
                    residual,
                })
            }
        };
        let phase = inner(&v, &next);
        let aligned = if phase.norm() > 0.0 {
            phase / phase.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let diff: Vec<C64> = next.iter().zip(&v).map(|(a, b)| a - b * aligned).collect();
        residual = inner(&diff, &diff).re.sqrt();
        v = next;
        if residual < TOLERANCE {
            let peak = v.iter().copied().fold(C64::new(0.0, 0.0), |m, z| {
                if z.norm_sqr() > m.norm_sqr() {
                    z
                } else {
                    m
                }
            });
            let rotate = peak.conj() / peak.norm();
            return functional.envelope(v.into_iter().map(|z| z * rotate).collect());
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{overlap, Segment};

    fn setup(tau_w: f64) -> (Schedule, CavityParams, TimeGrid) {
        let kappa = 100.0;
        let duration = 1.0;
        let g0 = (tau_w * kappa / duration).sqrt();
        let g = Schedule::coupling(vec![Segment::square(-duration, 0.0, g0)]).unwrap();
        let grid = TimeGrid::new(-1.2, 1e-3, 1401).unwrap();
        (g, CavityParams::new(kappa, 0.0).unwrap(), grid)
    }

    #[test]
    fn optimum_reaches_closed_form() {
        let (g, p, grid) = setup(1.0);
        let e = optimal_write_input(&g, &p, &grid).unwrap();
        assert!((e.norm() - 1.0).abs() < 1e-12);
        let eta = write_efficiency_of(&e, &g, &p).unwrap();
        assert!((eta - (1.0 - (-2.0f64).exp())).abs() < 1e-6, "eta = {eta}");
    }

    #[test]
    fn time_reversed_optimum_is_worse() {
        // E ∝ e^{-tau} in effective time; with square g this is e^{-r t}
        // on the window. Oracle: |int_0^1 e^{tau} e^{-tau} dtau|^2 * 2 /
        // int_0^1 e^{-2 tau} dtau * e^{-2}, i.e. 4 e^{-2} / (1 - e^{-2}).
        let (g, p, grid) = setup(1.0);
        let r = 1.0;
        let e = FieldEnvelope::with_support(
            grid,
            grid.times()
                .map(|t| C64::new((-r * (t + 1.0)).exp(), 0.0))
                .collect(),
            grid.nearest_index(-1.0),
            grid.nearest_index(0.0),
        )
        .unwrap();
        let eta = write_efficiency_of(&e, &g, &p).unwrap();
        let e2 = (-2.0f64).exp();
        let oracle = 4.0 * e2 / (1.0 - e2);
        assert!((eta - oracle).abs() < 1e-6, "{eta} vs {oracle}");
        assert!(eta < 1.0 - e2);
    }

    #[test]
    fn orthogonal_input_stores_nothing() {
        let (g, p, grid) = setup(1.0);
        let opt = optimal_write_input(&g, &p, &grid).unwrap();
        // Remove the optimum's component from a ramp, in the functional's metric.
        let functional = WriteFunctional::new(&g, &Schedule::zero(), &p, &grid).unwrap();
        let (first, last) = functional.window();
        let ramp = FieldEnvelope::with_support(
            grid,
            grid.times().map(|t| C64::new(t, 0.3)).collect(),
            first,
            last,
        )
        .unwrap();
        let s_ramp = functional.stored(&ramp).unwrap();
        let s_opt = functional.stored(&opt).unwrap();
        let orth = FieldEnvelope::with_support(
            grid,
            ramp.samples()
                .iter()
                .zip(opt.samples())
                .map(|(a, b)| a - b * (s_ramp / s_opt))
                .collect(),
            first,
            last,
        )
        .unwrap();
        assert!(functional.efficiency(&orth).unwrap() < 1e-24);
    }

    #[test]
    fn zero_coupling_has_no_window() {
        let (_, p, grid) = setup(1.0);
        assert!(optimal_write_input(&Schedule::zero(), &p, &grid).is_err());
        assert!(variational_optimize(&Schedule::zero(), &Schedule::zero(), &p, &grid).is_err());
    }

    #[test]
    fn lossy_non_square_is_unsupported() {
        let grid = TimeGrid::new(-1.0, 1e-3, 1001).unwrap();
        let p = CavityParams::new(100.0, 0.5).unwrap();
        let g = Schedule::coupling(vec![Segment::gaussian(-1.0, 0.0, 10.0, -0.5, 0.2)]).unwrap();
        assert!(matches!(
            optimal_write_input(&g, &p, &grid),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn variational_matches_closed_form() {
        let (g, p, grid) = setup(1.3);
        let num = variational_optimize(&g, &Schedule::zero(), &p, &grid).unwrap();
        let ana = optimal_write_input(&g, &p, &grid).unwrap();
        let ov = overlap(num.samples(), ana.samples(), &ana.weights());
        assert!(ov > 1.0 - 1e-8, "overlap {ov}");
    }

    #[test]
    fn variational_matches_lossy_square() {
        let grid = TimeGrid::new(-1.2, 1e-3, 1401).unwrap();
        let p = CavityParams::new(100.0, 0.4).unwrap();
        let g = Schedule::coupling(vec![Segment::square(-1.0, 0.0, 8.0)]).unwrap();
        let num = variational_optimize(&g, &Schedule::zero(), &p, &grid).unwrap();
        let ana = optimal_write_input(&g, &p, &grid).unwrap();
        assert!(overlap(num.samples(), ana.samples(), &ana.weights()) > 1.0 - 1e-8);
        let eta = write_efficiency_of(&ana, &g, &p).unwrap();
        let expected = crate::cavity::square_pulse_efficiency(8.0, 100.0, 0.4, 1.0).unwrap();
        assert!((eta - expected).abs() < 1e-6);
    }
}
