//! Declarative scenarios and the machinery behind the `dipmem` CLI.
//!
//! A scenario is a TOML file naming a model, its parameters, a time grid,
//! the coupling and detuning schedules and the input field. Every physical
//! quantity carries a unit suffix (`"300 ns"`, `"50 kHz_angular"`,
//! `"1 cm"`). Schedules and inputs are tagged primitives:
//!
//! ```toml
//! [[write]]
//! kind = "square"
//! start = "-1 us"
//! end = "0 s"
//! amplitude = "10 MHz_angular"
//! ```
//!
//! A run writes one directory with fixed filenames: `result.json`,
//! `e_out.csv`, `spinwave.csv` and, when a sweep is requested, `sweep.csv`.

mod config;
mod design;
mod presets;
mod run;
mod sweep;
mod table;
pub mod units;
mod verify;

use std::path::Path;

pub use config::{
    CavitySection, DesignSection, GridSection, InputSpec, MediumSection, ModelKind, Outputs,
    Scenario, SegmentSpec, SweepAxis, SweepSection,
};
pub use design::{design, DesignOutput, DesignRecord};
pub use presets::{load_preset, preset_text, PRESETS};
pub use run::{run, scenario_hash, Diagnostics, RunOutput, RunRecord, Summary};
pub use sweep::sweep;
pub use table::Table;
pub use verify::{verify_suite, Check};

use crate::error::Result;

/// A preset name or a path to a config file.
pub fn resolve_scenario(name_or_path: &str) -> Result<Scenario> {
    let path = Path::new(name_or_path);
    if path.exists() {
        Scenario::load(path)
    } else if preset_text(name_or_path).is_some() {
        load_preset(name_or_path)
    } else {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        Err(crate::Error::Config(format!(
            "`{name_or_path}` is neither a config file nor a preset ({})",
            names.join(", ")
        )))
    }
}

/// Write the artifacts of a run into `dir`, creating it if needed.
pub fn write_run(dir: &Path, output: &RunOutput, outputs: &Outputs) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("result.json"),
        serde_json::to_string_pretty(&output.record)?,
    )?;
    if outputs.e_out {
        output.e_out.write(&dir.join("e_out.csv"))?;
    }
    if outputs.spinwave {
        output.spinwave.write(&dir.join("spinwave.csv"))?;
    }
    if let Some(sweep) = &output.sweep {
        sweep.write(&dir.join("sweep.csv"))?;
    }
    Ok(())
}

/// Write the artifacts of a design into `dir`.
pub fn write_design(dir: &Path, output: &DesignOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("result.json"),
        serde_json::to_string_pretty(&output.record)?,
    )?;
    output.g_w_table.write(&dir.join("g_w.csv"))?;
    output.g_r_table.write(&dir.join("g_r.csv"))?;
    output.verification.write(&dir.join("e_out.csv"))?;
    Ok(())
}
