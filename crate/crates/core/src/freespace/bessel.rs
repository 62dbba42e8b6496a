//! Entire Bessel kernels
//!
//! ```text
//! K_n(a) = sum_k a^k / (k! (k+n)!)
//! ```
//!
//! For `a >= 0` this is `I_n(2 sqrt a) / sqrt(a)^n`; for `a < 0` it is
//! `J_n(2 sqrt(-a)) / sqrt(-a)^n`. Both orders are real and smooth across
//! `a = 0`, and `d K_0 / da = K_1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    One,
}

/// Switch from the power series to the large-argument expansion of `I_n`.
const MODIFIED_ASYMPTOTIC_X: f64 = 40.0;
/// Switch from the alternating series to Miller's recurrence for `J_n`.
const OSCILLATORY_SERIES_X: f64 = 8.0;

pub fn entire_bessel_kernel(order: BesselOrder, a: f64) -> f64 {
    let n = match order {
        BesselOrder::Zero => 0,
        BesselOrder::One => 1,
    };
    if a == 0.0 {
        return 1.0;
    }
    let x = 2.0 * a.abs().sqrt();
    if a > 0.0 {
        if x <= MODIFIED_ASYMPTOTIC_X {
            series(n, a)
        } else {
            scale(n, x, modified_asymptotic(n, x))
        }
    } else if x <= OSCILLATORY_SERIES_X {
        series(n, a)
    } else {
        let (j0, j1) = miller_j01(x);
        scale(n, x, if n == 0 { j0 } else { j1 })
    }
}

#[inline]
pub fn k0(a: f64) -> f64 {
    entire_bessel_kernel(BesselOrder::Zero, a)
}

#[inline]
pub fn k1(a: f64) -> f64 {
    entire_bessel_kernel(BesselOrder::One, a)
}

// Divide by (x/2)^n.
fn scale(n: u32, x: f64, v: f64) -> f64 {
    if n == 0 {
        v
    } else {
        v / (0.5 * x)
    }
}

fn series(n: u32, a: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= a / (k * (k + n as f64));
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() || k > 500.0 {
            break;
        }
    }
    sum
}

fn modified_asymptotic(n: u32, x: f64) -> f64 {
    // I_n(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k prod_{j=1..k} (4n^2 - (2j-1)^2) / (k! (8x)^k)
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let j = (2 * k - 1) as f64;
        let next = -term * (mu - j * j) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * sum
}

/// `J_0(x)` and `J_1(x)` by downward recurrence, normalized with
/// `J_0 + 2 sum J_2k = 1`.
fn miller_j01(x: f64) -> (f64, f64) {
    let start = {
        let m = (x + 15.0 * x.powf(1.0 / 3.0) + 40.0) as usize;
        m + (m & 1)
    };
    let (mut above, mut cur) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let (mut j0, mut j1) = (0.0, 0.0);
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * cur;
        }
        if idx == 1 {
            j1 = cur;
        }
        if idx == 0 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
            j0 *= 1e-250;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Periodic-trapezoid integral representations, spectrally accurate.
    fn bessel_j(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * f(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / PI
    }

    fn bessel_i(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |t: f64| (x * t.cos()).exp() * (n as f64 * t).cos();
        (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * f(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / PI
    }

    fn oracle(n: u32, a: f64) -> f64 {
        let x = 2.0 * a.abs().sqrt();
        let v = if a >= 0.0 {
            bessel_i(n, x)
        } else {
            bessel_j(n, x)
        };
        if n == 0 {
            v
        } else {
            v / (0.5 * x)
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(k0(0.0), 1.0);
        assert_eq!(k1(0.0), 1.0);
        assert!((k0(1.0) - 2.279_585_302_336_067).abs() < 1e-14);
        assert!((k0(-1.0) - 0.223_890_779_141_235_7).abs() < 1e-14);
    }

    #[test]
    fn matches_integral_representation() {
        for &a in &[
            -2500.0, -900.0, -150.0, -40.0, -17.0, -16.0, -15.9, -3.3, -0.2, 1e-3, 0.4, 7.0, 399.0,
            400.0, 401.0, 900.0, 2000.0,
        ] {
            for (order, n) in [(BesselOrder::Zero, 0), (BesselOrder::One, 1)] {
                let got = entire_bessel_kernel(order, a);
                let want = oracle(n, a);
                let scale = if a > 0.0 { want.abs() } else { 1.0 };
                assert!(
                    (got - want).abs() <= 1e-12 * scale,
                    "K{n}({a}) = {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn continuous_across_switchovers() {
        for &a in &[16.0_f64, -16.0, 400.0] {
            for f in [k0, k1] {
                let lo = f(a * (1.0 - 1e-12));
                let hi = f(a * (1.0 + 1e-12));
                assert!((lo - hi).abs() < 1e-10 * lo.abs().max(1.0));
            }
        }
    }
}
