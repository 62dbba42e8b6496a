use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use crate::error::{Error, Result};

/// Values below this fraction of a schedule's peak count as "off".
pub const ZERO_COUPLING_FRACTION: f64 = 1e-12;

/// Membership tolerance for grid points near a segment edge, as a fraction
/// of the grid step. Absorbs the rounding in `t0 + k*dt`.
const EDGE_TOLERANCE: f64 = 1e-6;

/// Monotone piecewise-cubic interpolant (Fritsch-Butland slopes).
///
/// Between two knots the interpolant stays inside the interval spanned by
/// the knot values, so non-negative data never interpolates negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCubic {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param(
                "tabulated",
                "time and value columns differ in length",
            ));
        }
        if times.len() < 2 {
            return Err(Error::param("tabulated", "need at least two knots"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param(
                "tabulated",
                "knot times must be strictly increasing",
            ));
        }
        if values.iter().chain(times.iter()).any(|v| !v.is_finite()) {
            return Err(Error::param("tabulated", "non-finite knot"));
        }
        let n = times.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (values[i + 1] - values[i]) / (times[i + 1] - times[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = secants[0];
            slopes[1] = secants[0];
        } else {
            for i in 1..n - 1 {
                let (a, b) = (secants[i - 1], secants[i]);
                slopes[i] = if a * b <= 0.0 {
                    0.0
                } else {
                    let h0 = times[i] - times[i - 1];
                    let h1 = times[i + 1] - times[i];
                    let w1 = 2.0 * h1 + h0;
                    let w2 = h1 + 2.0 * h0;
                    (w1 + w2) / (w1 / a + w2 / b)
                };
            }
            slopes[0] = end_slope(
                times[1] - times[0],
                times[2] - times[1],
                secants[0],
                secants[1],
            );
            slopes[n - 1] = end_slope(
                times[n - 1] - times[n - 2],
                times[n - 2] - times[n - 3],
                secants[n - 2],
                secants[n - 3],
            );
        }
        Ok(Self {
            times,
            values,
            slopes,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            slopes: self.slopes.iter().map(|v| v * factor).collect(),
        }
    }

    fn shifted(&self, dt: f64) -> Self {
        Self {
            times: self.times.iter().map(|t| t + dt).collect(),
            values: self.values.clone(),
            slopes: self.slopes.clone(),
        }
    }

    fn reflected(&self, about: f64) -> Self {
        Self {
            times: self.times.iter().rev().map(|t| 2.0 * about - t).collect(),
            values: self.values.iter().rev().copied().collect(),
            slopes: self.slopes.iter().rev().map(|s| -s).collect(),
        }
    }
}

// Three-point end slope, limited to preserve shape.
fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// One primitive shape of a [`Schedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Square {
        amplitude: f64,
    },
    /// `amplitude * exp(-(t - center)^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    PiecewiseLinear {
        points: Vec<(f64, f64)>,
    },
    Tabulated(MonotoneCubic),
}

impl Shape {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Shape::Square { amplitude } => *amplitude,
            Shape::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let x = (t - center) / width;
                amplitude * (-0.5 * x * x).exp()
            }
            Shape::PiecewiseLinear { points } => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[points.len() - 1].1
                } else {
                    let (t0, v0) = points[i - 1];
                    let (t1, v1) = points[i];
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
            Shape::Tabulated(table) => table.eval(t),
        }
    }

    fn min_max(&self, start: f64, end: f64) -> (f64, f64) {
        match self {
            Shape::Square { amplitude } => (*amplitude, *amplitude),
            Shape::Gaussian { center, .. } => {
                let a = self.eval(start);
                let b = self.eval(end);
                let c = self.eval(center.clamp(start, end));
                (a.min(b).min(c), a.max(b).max(c))
            }
            Shape::PiecewiseLinear { points } => points
                .iter()
                .map(|p| p.1)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                }),
            Shape::Tabulated(table) => table
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                }),
        }
    }
}

/// A primitive shape active on the closed interval `[start, end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub shape: Shape,
}

impl Segment {
    pub fn square(start: f64, end: f64, amplitude: f64) -> Self {
        Self {
            start,
            end,
            shape: Shape::Square { amplitude },
        }
    }

    /// Gaussian centred in `[start, end]`.
    pub fn gaussian(start: f64, end: f64, amplitude: f64, center: f64, width: f64) -> Self {
        Self {
            start,
            end,
            shape: Shape::Gaussian {
                amplitude,
                center,
                width,
            },
        }
    }

    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::param("piecewise-linear", "need at least two points"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::param(
                "piecewise-linear",
                "times must be strictly increasing",
            ));
        }
        Ok(Self {
            start: points[0].0,
            end: points[points.len() - 1].0,
            shape: Shape::PiecewiseLinear { points },
        })
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let table = MonotoneCubic::new(times, values)?;
        Ok(Self {
            start: table.times()[0],
            end: *table.times().last().unwrap(),
            shape: Shape::Tabulated(table),
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::param(
                "segment",
                format!(
                    "support [{}, {}] is empty or non-finite",
                    self.start, self.end
                ),
            ));
        }
        match &self.shape {
            Shape::Gaussian { width, .. } if !(*width > 0.0) => {
                Err(Error::param("gaussian", "width must be positive"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Closed,
    Left,
    Right,
}

/// Piecewise time-dependent control built from primitive segments.
///
/// Outside every segment the schedule is exactly zero. Segments are sorted
/// and may touch but not overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    segments: Vec<Segment>,
    nonnegative: bool,
}

/// Schedule values at the start, midpoint and end of every grid step.
///
/// Start and end values are the one-sided limits from inside the step, so a
/// discontinuity that falls on a grid point is seen correctly by both
/// neighbouring steps.
#[derive(Debug, Clone)]
pub struct StepSamples {
    pub start: Vec<f64>,
    pub mid: Vec<f64>,
    pub end: Vec<f64>,
}

impl StepSamples {
    pub fn max_abs(&self) -> f64 {
        self.start
            .iter()
            .chain(&self.mid)
            .chain(&self.end)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Schedule {
    /// A schedule that is zero everywhere.
    pub fn zero() -> Self {
        Self {
            segments: Vec::new(),
            nonnegative: true,
        }
    }

    /// A coupling schedule: every segment must be non-negative.
    pub fn coupling(segments: Vec<Segment>) -> Result<Self> {
        let s = Self::build(segments, true)?;
        for seg in &s.segments {
            let (lo, _) = seg.shape.min_max(seg.start, seg.end);
            if lo < 0.0 {
                return Err(Error::param(
                    "coupling",
                    "coupling schedules must be non-negative",
                ));
            }
        }
        Ok(s)
    }

    /// A real schedule of arbitrary sign, e.g. a detuning.
    pub fn signed(segments: Vec<Segment>) -> Result<Self> {
        Self::build(segments, false)
    }

    fn build(mut segments: Vec<Segment>, nonnegative: bool) -> Result<Self> {
        for s in &segments {
            s.validate()?;
        }
        segments.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        for w in segments.windows(2) {
            if w[1].start < w[0].end {
                return Err(Error::param(
                    "segments",
                    format!("supports overlap at t = {:e} s", w[1].start),
                ));
            }
        }
        Ok(Self {
            segments,
            nonnegative,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty() || self.max_abs() == 0.0
    }

    /// `[first start, last end]`, or `None` for an empty schedule.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.start, self.segments.last()?.end))
    }

    pub fn max_abs(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let (lo, hi) = s.shape.min_max(s.start, s.end);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
    }

    /// The single square amplitude, if the schedule is one square segment.
    pub fn as_square(&self) -> Option<(f64, f64, f64)> {
        match self.segments.as_slice() {
            [Segment {
                start,
                end,
                shape: Shape::Square { amplitude },
            }] => Some((*start, *end, *amplitude)),
            _ => None,
        }
    }

    fn locate(&self, t: f64, tol: f64, side: Side) -> f64 {
        // Segments are sorted and disjoint: only the first with start <= t + tol
        // from the right can contain t.
        let idx = self.segments.partition_point(|s| s.start - tol <= t);
        for s in self.segments[..idx].iter().rev() {
            let inside = match side {
                Side::Closed => s.start - tol <= t && t <= s.end + tol,
                Side::Left => s.start + tol < t && t <= s.end + tol,
                Side::Right => s.start - tol <= t && t < s.end - tol,
            };
            if inside {
                return s.shape.eval(t.clamp(s.start, s.end));
            }
            if s.end + tol < t {
                break;
            }
        }
        0.0
    }

    /// Value at `t`; zero outside every segment.
    pub fn value(&self, t: f64) -> f64 {
        self.locate(t, 0.0, Side::Closed)
    }

    /// Limit approaching `t` from below.
    pub fn value_from_left(&self, t: f64) -> f64 {
        self.locate(t, 0.0, Side::Left)
    }

    /// Limit approaching `t` from above.
    pub fn value_from_right(&self, t: f64) -> f64 {
        self.locate(t, 0.0, Side::Right)
    }

    /// Point samples on a grid (closed supports, edge-tolerant).
    pub fn sample(&self, grid: &TimeGrid) -> Vec<f64> {
        let tol = EDGE_TOLERANCE * grid.dt();
        grid.times()
            .map(|t| self.locate(t, tol, Side::Closed))
            .collect()
    }

    pub fn step_samples(&self, grid: &TimeGrid) -> StepSamples {
        let tol = EDGE_TOLERANCE * grid.dt();
        let steps = grid.steps();
        let mut out = StepSamples {
            start: Vec::with_capacity(steps),
            mid: Vec::with_capacity(steps),
            end: Vec::with_capacity(steps),
        };
        for k in 0..steps {
            let a = grid.time(k);
            let b = grid.time(k + 1);
            out.start.push(self.locate(a, tol, Side::Right));
            out.mid.push(self.locate(0.5 * (a + b), 0.0, Side::Closed));
            out.end.push(self.locate(b, tol, Side::Left));
        }
        out
    }

    /// Per-step on/off flags using the midpoint value against the
    /// zero-coupling threshold.
    pub fn active_steps(&self, grid: &TimeGrid) -> Vec<bool> {
        let threshold = ZERO_COUPLING_FRACTION * self.max_abs();
        let tol = EDGE_TOLERANCE * grid.dt();
        (0..grid.steps())
            .map(|k| {
                let m = 0.5 * (grid.time(k) + grid.time(k + 1));
                let v = self.locate(m, tol, Side::Closed).abs();
                v > threshold && v > 0.0
            })
            .collect()
    }

    /// Grid indices `[first, last]` bounding the first contiguous run of
    /// active steps, or `None` if the schedule is off on the whole grid.
    pub fn first_window(&self, grid: &TimeGrid) -> Option<(usize, usize)> {
        let active = self.active_steps(grid);
        let first = active.iter().position(|&a| a)?;
        let last = active[first..]
            .iter()
            .position(|&a| !a)
            .map_or(grid.len() - 1, |off| first + off);
        Some((first, last))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if self.nonnegative && factor < 0.0 {
            return Err(Error::param("factor", "cannot flip the sign of a coupling"));
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                start: s.start,
                end: s.end,
                shape: match &s.shape {
                    Shape::Square { amplitude } => Shape::Square {
                        amplitude: amplitude * factor,
                    },
                    Shape::Gaussian {
                        amplitude,
                        center,
                        width,
                    } => Shape::Gaussian {
                        amplitude: amplitude * factor,
                        center: *center,
                        width: *width,
                    },
                    Shape::PiecewiseLinear { points } => Shape::PiecewiseLinear {
                        points: points.iter().map(|&(t, v)| (t, v * factor)).collect(),
                    },
                    Shape::Tabulated(t) => Shape::Tabulated(t.scaled(factor)),
                },
            })
            .collect();
        Ok(Self {
            segments,
            nonnegative: self.nonnegative,
        })
    }

    pub fn shifted(&self, dt: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                start: s.start + dt,
                end: s.end + dt,
                shape: match &s.shape {
                    Shape::Gaussian {
                        amplitude,
                        center,
                        width,
                    } => Shape::Gaussian {
                        amplitude: *amplitude,
                        center: center + dt,
                        width: *width,
                    },
                    Shape::PiecewiseLinear { points } => Shape::PiecewiseLinear {
                        points: points.iter().map(|&(t, v)| (t + dt, v)).collect(),
                    },
                    Shape::Tabulated(t) => Shape::Tabulated(t.shifted(dt)),
                    sq @ Shape::Square { .. } => sq.clone(),
                },
            })
            .collect();
        Self {
            segments,
            nonnegative: self.nonnegative,
        }
    }

    /// Mirror image `t -> 2*about - t`.
    pub fn reflected(&self, about: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                start: 2.0 * about - s.end,
                end: 2.0 * about - s.start,
                shape: match &s.shape {
                    Shape::Gaussian {
                        amplitude,
                        center,
                        width,
                    } => Shape::Gaussian {
                        amplitude: *amplitude,
                        center: 2.0 * about - center,
                        width: *width,
                    },
                    Shape::PiecewiseLinear { points } => Shape::PiecewiseLinear {
                        points: points
                            .iter()
                            .rev()
                            .map(|&(t, v)| (2.0 * about - t, v))
                            .collect(),
                    },
                    Shape::Tabulated(t) => Shape::Tabulated(t.reflected(about)),
                    sq @ Shape::Square { .. } => sq.clone(),
                },
            })
            .collect();
        Self {
            segments,
            nonnegative: self.nonnegative,
        }
    }

    /// Union of two schedules with disjoint supports.
    pub fn merged(&self, other: &Schedule) -> Result<Self> {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        let s = Self::build(segments, self.nonnegative && other.nonnegative)?;
        Ok(s)
    }
}
