use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::units::{Length, Rate, Time};
use crate::cavity::CavityParams;
use crate::error::{Error, Result};
use crate::freespace::MediumParams;
use crate::schedules::{FieldEnvelope, Schedule, Segment, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    CavityFull,
    CavityAdiabatic,
    FreespaceAnalytic,
    FreespaceNumeric,
}

impl ModelKind {
    pub fn is_cavity(self) -> bool {
        matches!(self, ModelKind::CavityFull | ModelKind::CavityAdiabatic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub kappa: Rate,
    pub gamma: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub length: Length,
    pub gamma: Rate,
    /// Peak optical depth; when given, the write coupling is rescaled to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    /// Minimum number of z samples.
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start: Time,
    pub end: Time,
    pub step: Time,
}

/// One coupling or detuning primitive. Amplitudes are rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SegmentSpec {
    Square {
        start: Time,
        end: Time,
        amplitude: Rate,
    },
    Gaussian {
        start: Time,
        end: Time,
        amplitude: Rate,
        center: Time,
        width: Time,
    },
    PiecewiseLinear {
        times: Vec<Time>,
        values: Vec<Rate>,
    },
    /// Two-column CSV `(time_s, value)` with value in rad/s.
    Tabulated {
        path: PathBuf,
    },
}

/// Input field shape; every shape is normalized to one photon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSpec {
    None,
    /// Optimal write input for the write coupling (cavity models).
    Optimal,
    /// Amplitude `exp(-(t - center)^2 / (2 width^2))`.
    Gaussian {
        center: Time,
        width: Time,
    },
    /// Gaussian amplitude with the given full width at a tenth of maximum.
    GaussianFwtm {
        center: Time,
        fwtm: Time,
    },
    Square {
        start: Time,
        end: Time,
    },
    /// Three-column CSV `(time_s, re, im)`, linearly interpolated.
    Tabulated {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    OpticalDepth,
    Cooperativity,
    TauW,
    TauR,
    PulseDuration,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "optical-depth" | "d" => SweepAxis::OpticalDepth,
            "cooperativity" | "C" => SweepAxis::Cooperativity,
            "tau-w" => SweepAxis::TauW,
            "tau-r" => SweepAxis::TauR,
            "pulse-duration" => SweepAxis::PulseDuration,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep axis `{other}`; expected optical-depth, cooperativity, tau-w, tau-r or pulse-duration"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub eta_w: f64,
    pub eta_r: f64,
    pub delay: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "yes")]
    pub e_out: bool,
    #[serde(default = "yes")]
    pub spinwave: bool,
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            e_out: true,
            spinwave: true,
        }
    }
}

fn zero_time() -> Time {
    Time::from_si(0.0)
}

/// A complete, declarative description of one run.
///
/// Write couplings use absolute times. Read couplings are written relative
/// to the read start, which is the end of the write coupling plus
/// `storage_time`. Free-space models read with the mirror image of the
/// write coupling and take no `read` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelKind,
    #[serde(default = "zero_time")]
    pub storage_time: Time,
    #[serde(default)]
    pub compensate_detuning: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumSection>,
    pub grid: GridSection,
    pub input: InputSpec,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub write: Vec<SegmentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub read: Vec<SegmentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub detuning: Vec<SegmentSpec>,
    /// Directory that relative CSV paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Parse a file; relative data paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut s = Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn validate(&self) -> Result<()> {
        match (self.model.is_cavity(), &self.cavity, &self.medium) {
            (true, None, _) => {
                return Err(Error::Config(
                    "cavity models need a [cavity] section".into(),
                ))
            }
            (false, _, None) => {
                return Err(Error::Config(
                    "free-space models need a [medium] section".into(),
                ))
            }
            _ => {}
        }
        if !self.model.is_cavity() {
            if !self.read.is_empty() {
                return Err(Error::Config(
                    "free-space models read with the mirrored write coupling; remove [[read]]"
                        .into(),
                ));
            }
            if self.storage_time.si() != 0.0 {
                return Err(Error::Config(
                    "free-space models read immediately; storage_time must be 0".into(),
                ));
            }
        }
        if self.storage_time.si() < 0.0 {
            return Err(Error::Config("storage_time must be non-negative".into()));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::spanning(
            self.grid.start.si(),
            self.grid.end.si(),
            self.grid.step.si(),
        )
        .map_err(|e| Error::Config(format!("[grid]: {e}")))
    }

    pub fn cavity_params(&self) -> Result<CavityParams> {
        let c = self
            .cavity
            .as_ref()
            .ok_or_else(|| Error::Config("missing [cavity] section".into()))?;
        CavityParams::new(c.kappa.si(), c.gamma.si())
    }

    pub fn medium_params(&self) -> Result<MediumParams> {
        let m = self
            .medium
            .as_ref()
            .ok_or_else(|| Error::Config("missing [medium] section".into()))?;
        MediumParams::new(m.length.si(), m.gamma.si())
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    fn segments(&self, specs: &[SegmentSpec], what: &str) -> Result<Vec<Segment>> {
        specs
            .iter()
            .map(|spec| {
                spec.to_segment(self)
                    .map_err(|e| Error::Config(format!("[[{what}]]: {e}")))
            })
            .collect()
    }

    /// Write coupling in absolute time.
    pub fn write_coupling(&self) -> Result<Schedule> {
        Schedule::coupling(self.segments(&self.write, "write")?)
    }

    /// Read coupling relative to the read start.
    pub fn read_coupling(&self) -> Result<Schedule> {
        Schedule::coupling(self.segments(&self.read, "read")?)
    }

    pub fn detuning_schedule(&self) -> Result<Schedule> {
        Schedule::signed(self.segments(&self.detuning, "detuning")?)
    }

    /// Input envelope on `grid` for every shape except `optimal`, which
    /// depends on the model and is built by the runner.
    pub fn explicit_input(&self, grid: TimeGrid) -> Result<Option<FieldEnvelope>> {
        let e = match &self.input {
            InputSpec::None => FieldEnvelope::zeros(grid),
            InputSpec::Optimal => return Ok(None),
            InputSpec::Gaussian { center, width } => {
                FieldEnvelope::gaussian(grid, center.si(), width.si())?
            }
            InputSpec::GaussianFwtm { center, fwtm } => {
                crate::freespace::gaussian_fwtm(grid, center.si(), fwtm.si())?
            }
            InputSpec::Square { start, end } => {
                // Hard-edged window snapped to the nearest grid points.
                let index = |t: f64| {
                    ((t - grid.t0()) / grid.dt())
                        .round()
                        .clamp(0.0, grid.steps() as f64) as usize
                };
                let (first, last) = (index(start.si()), index(end.si()));
                if first >= last {
                    return Err(Error::Config(format!(
                        "square input [{start}, {end}] covers less than one grid step"
                    )));
                }
                FieldEnvelope::with_support(
                    grid,
                    vec![C64::new(1.0, 0.0); grid.len()],
                    first,
                    last,
                )?
                .normalized()?
            }
            InputSpec::Tabulated { path } => {
                let (times, cols) = read_columns(&self.resolve(path), 3)?;
                let (re, im) = (&cols[0], &cols[1]);
                let table = Interpolator { times: &times };
                FieldEnvelope::from_fn(grid, |t| {
                    C64::new(table.linear(re, t), table.linear(im, t))
                })?
                .normalized()?
            }
        };
        Ok(Some(e))
    }
}

impl SegmentSpec {
    fn to_segment(&self, scenario: &Scenario) -> Result<Segment> {
        Ok(match self {
            SegmentSpec::Square {
                start,
                end,
                amplitude,
            } => Segment::square(start.si(), end.si(), amplitude.si()),
            SegmentSpec::Gaussian {
                start,
                end,
                amplitude,
                center,
                width,
            } => Segment::gaussian(
                start.si(),
                end.si(),
                amplitude.si(),
                center.si(),
                width.si(),
            ),
            SegmentSpec::PiecewiseLinear { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::Config(format!(
                        "piecewise-linear has {} times but {} values",
                        times.len(),
                        values.len()
                    )));
                }
                Segment::piecewise_linear(
                    times
                        .iter()
                        .zip(values)
                        .map(|(t, v)| (t.si(), v.si()))
                        .collect(),
                )?
            }
            SegmentSpec::Tabulated { path } => {
                let (times, mut cols) = read_columns(&scenario.resolve(path), 2)?;
                Segment::tabulated(times, cols.remove(0))?
            }
        })
    }
}

/// Read a headered CSV with `n` numeric columns; returns the first column
/// and the rest.
pub(crate) fn read_columns(path: &Path, n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut first = Vec::new();
    let mut rest = vec![Vec::new(); n - 1];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != n {
            return Err(Error::Config(format!(
                "{} line {}: expected {n} columns, found {}",
                path.display(),
                row + 2,
                record.len()
            )));
        }
        let mut values = record.iter().map(|f| {
            f.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "{} line {}: `{f}` is not a number",
                    path.display(),
                    row + 2
                ))
            })
        });
        first.push(values.next().unwrap()?);
        for col in rest.iter_mut() {
            col.push(values.next().unwrap()?);
        }
    }
    if first.len() < 2 {
        return Err(Error::Config(format!(
            "{} needs at least two rows",
            path.display()
        )));
    }
    if first.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(format!(
            "{}: times must be strictly increasing",
            path.display()
        )));
    }
    Ok((first, rest))
}

struct Interpolator<'a> {
    times: &'a [f64],
}

impl Interpolator<'_> {
    /// Linear interpolation, zero outside the table.
    fn linear(&self, values: &[f64], t: f64) -> f64 {
        let ts = self.times;
        if t < ts[0] || t > ts[ts.len() - 1] {
            return 0.0;
        }
        let i = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
        let (t0, t1) = (ts[i - 1], ts[i]);
        values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
model = "cavity-adiabatic"

[cavity]
kappa = "100 MHz_angular"
gamma = "0 Hz_angular"

[grid]
start = "-1 us"
end = "1 us"
step = "1 ns"

[input]
kind = "optimal"

[[write]]
kind = "square"
start = "-1 us"
end = "0 s"
amplitude = "10 MHz_angular"
"#;

    #[test]
    fn parses_and_round_trips() {
        let s = Scenario::from_toml(MINIMAL).unwrap();
        assert_eq!(s.write.len(), 1);
        assert!(s.read.is_empty());
        let again = Scenario::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(s, again);
        let g = s.write_coupling().unwrap();
        assert_eq!(g.value(-0.5e-6), 1e7);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = MINIMAL.replace("\"1 ns\"", "\"1 parsec\"");
        let msg = Scenario::from_toml(&bad).unwrap_err().to_string();
        assert!(msg.contains("parsec") && msg.contains("line"), "{msg}");
        let bad = MINIMAL.replace("amplitude", "amplitud");
        let msg = Scenario::from_toml(&bad).unwrap_err().to_string();
        assert!(msg.contains("amplitud"), "{msg}");
        let bad = MINIMAL.replace("[cavity]", "[cavityy]");
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn free_space_rejects_read_section() {
        let text = r#"
name = "f"
model = "freespace-numeric"
[medium]
length = "1 cm"
gamma = "50 kHz_angular"
nz = 50
[grid]
start = "0 s"
end = "1 us"
step = "1 ns"
[input]
kind = "none"
[[read]]
kind = "square"
start = "0 s"
end = "1 us"
amplitude = "1 MHz_angular"
"#;
        assert!(matches!(Scenario::from_toml(text), Err(Error::Config(_))));
    }

    #[test]
    fn tabulated_files_resolve_relative_to_the_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.csv"), "time_s,value\n0,1\n1e-6,3\n").unwrap();
        let text = MINIMAL.replace(
            "kind = \"square\"\nstart = \"-1 us\"\nend = \"0 s\"\namplitude = \"10 MHz_angular\"",
            "kind = \"tabulated\"\npath = \"g.csv\"",
        );
        let cfg = dir.path().join("s.toml");
        std::fs::write(&cfg, text).unwrap();
        let s = Scenario::load(&cfg).unwrap();
        let g = s.write_coupling().unwrap();
        assert!((g.value(0.5e-6) - 2.0).abs() < 1e-12);
    }
}
