use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dipole_memory::scenarios::{
    design, resolve_scenario, run, sweep, verify_suite, write_design, write_run, Summary,
    SweepAxis, PRESETS,
};
use dipole_memory::Error;

/// Simulate and design controllable-dipole quantum memories.
#[derive(Parser)]
#[command(name = "dipmem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (config path or preset name) and write its artifacts.
    Run {
        scenario: String,
        /// Output directory [default: runs/<scenario name>]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize write/read couplings for the scenario's target input.
    Design {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter and write sweep.csv.
    Sweep {
        scenario: String,
        /// optical-depth, cooperativity, tau-w, tau-r or pulse-duration
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Verify,
    /// List the built-in presets.
    Presets,
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
    ExitCode::FAILURE
}

fn fmt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}

fn print_summary(summary: &Summary) {
    match summary {
        Summary::Cavity {
            eta_w,
            eta_r,
            eta_tot,
            leakage,
            decay_loss,
            tau_w,
            tau_r,
        } => {
            println!("tau_w       {tau_w:.6}");
            println!("tau_r       {tau_r:.6}");
            println!("eta_w       {}", fmt(*eta_w));
            println!("eta_r       {}", fmt(*eta_r));
            println!("eta_tot     {}", fmt(*eta_tot));
            println!("leakage     {}", fmt(*leakage));
            println!("decay_loss  {}", fmt(*decay_loss));
        }
        Summary::FreeSpace {
            d,
            eta_write,
            eta_forward,
            eta_backward,
        } => {
            println!("d             {d:.6}");
            println!("eta_write     {eta_write:.6}");
            println!("eta_forward   {eta_forward:.6}");
            println!("eta_backward  {eta_backward:.6}");
        }
    }
}

fn execute(command: Command) -> Result<bool, Error> {
    match command {
        Command::Run { scenario, out } => {
            let s = resolve_scenario(&scenario)?;
            let output = run(&s)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(&s.name));
            write_run(&dir, &output, &s.outputs)?;
            print_summary(&output.record.summary);
            let d = &output.record.diagnostics;
            if let Some(r) = d.continuity_residual {
                println!("continuity  {r:.3e}");
            }
            println!("closure     {:.3e}", d.ledger_closure);
            println!("artifacts   {}", dir.display());
        }
        Command::Design { scenario, out } => {
            let s = resolve_scenario(&scenario)?;
            let output = design(&s)?;
            let dir =
                out.unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-design", s.name)));
            write_design(&dir, &output)?;
            let r = &output.record.report;
            println!("overlap       {:.6}", r.overlap);
            println!("lag_s         {:.6e}", r.lag);
            println!("energy_ratio  {:.6}", r.energy_ratio);
            println!("eta_w         {:.6}", r.eta_w);
            println!("eta_r         {:.6}", r.eta_r);
            println!("artifacts     {}", dir.display());
        }
        Command::Sweep {
            scenario,
            axis,
            values,
            out,
        } => {
            let s = resolve_scenario(&scenario)?;
            let axis: SweepAxis = axis.parse()?;
            let table = sweep(&s, axis, &values)?;
            let dir =
                out.unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-sweep", s.name)));
            std::fs::create_dir_all(&dir)?;
            table.write(&dir.join("sweep.csv"))?;
            print!("{}", table.to_csv()?);
        }
        Command::Verify => {
            let checks = verify_suite();
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{tag}  {:<45} {:.3e} (tol {:.0e})",
                    c.name, c.value, c.tolerance
                );
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
        Command::Presets => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail("usage", e.to_string().trim().to_string()),
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => fail("verify", "one or more invariant checks failed".into()),
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
