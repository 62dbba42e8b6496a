//! Fixed-step classical Runge-Kutta for small complex state vectors.

use num_complex::Complex64 as C64;

/// Where inside a step the right-hand side is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stage {
    Start,
    Mid,
    End,
}

pub(crate) fn rk4_step<const N: usize>(
    y: &[C64; N],
    h: f64,
    mut f: impl FnMut(Stage, &[C64; N]) -> [C64; N],
) -> [C64; N] {
    let k1 = f(Stage::Start, y);
    let k2 = f(Stage::Mid, &axpy(y, 0.5 * h, &k1));
    let k3 = f(Stage::Mid, &axpy(y, 0.5 * h, &k2));
    let k4 = f(Stage::End, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[C64; N], a: f64, x: &[C64; N]) -> [C64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_linear_decay() {
        // y' = -y, y(0) = 1, integrate to t = 1.
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [C64::new(1.0, 0.0)];
            for _ in 0..n {
                y = rk4_step(&y, h, |_, s| [-s[0]]);
            }
            (y[0].re - (-1f64).exp()).abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!(order > 3.9 && order < 4.1, "order {order}");
    }
}
