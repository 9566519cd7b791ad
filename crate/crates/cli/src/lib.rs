//! Command-line driver for the `sccnn-logic` simulator.
//!
//! Every run writes `config.json` beside its outputs. That snapshot holds
//! the resolved operating point and the exact input bits, so feeding it
//! back through `--config` reproduces every file in the directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sccnn_logic::experiments::{run_latch_experiment, simulate_program, write_phase_csv};
use sccnn_logic::seed::derive_seed;
use sccnn_logic::{
    export_phase_portrait, random_program, score_trial, sweep, GateKind, LogicProgram, SweepGrid, TrialOutcome,
};

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "sccnn-logic", version, about = "Logic gates and an SR latch in the SC-CNN MLC circuit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Integrate one program and write trajectory.csv
    Simulate,
    /// Run one program through a gate and write outcome.json
    Gate,
    /// Estimate P(logic) over a range of f or D and write plogic.csv/json
    Sweep,
    /// Write the post-settle (x1, x2) cloud labeled by input tuple
    Phase,
    /// Read one latch run from both variables and write latch.json
    Latch,
}

/// How a completed run turned out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    LogicFailure,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::LogicFailure => 1,
        }
    }

    fn from_success(ok: bool) -> Self {
        if ok {
            Status::Success
        } else {
            Status::LogicFailure
        }
    }
}

fn program_seed(c: &RunConfig) -> u64 {
    derive_seed(c.seed, "program", 0)
}

fn noise_seed(c: &RunConfig) -> u64 {
    derive_seed(c.seed, "noise", 0)
}

/// The program named by `bits`, else by `program`, else a random one.
fn build_program(c: &RunConfig) -> CliResult<LogicProgram> {
    let spec = c.gate_spec();
    let arity = spec.combiner.arity();
    let (delta, timing) = (spec.operating_delta, c.timing());
    if let Some(bits) = &c.bits {
        if bits.len() % arity != 0 {
            return Err(CliError::Config(format!(
                "{} bits do not split into {arity}-input tuples for {}",
                bits.len(),
                c.gate
            )));
        }
        let tuples: Vec<Vec<bool>> = bits.chunks(arity).map(|t| t.iter().map(|&b| b == 1).collect()).collect();
        return Ok(LogicProgram::from_tuples(&tuples, spec.combiner, delta, timing)?);
    }
    if let Some(path) = &c.program {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        return Ok(LogicProgram::read_csv(BufReader::new(file), spec.combiner, delta, timing)?);
    }
    Ok(random_program(c.n_bits, spec.combiner, program_seed(c), delta, timing)?)
}

/// Pins the program into the snapshot so the run no longer depends on
/// external files or on the program seed.
fn pin_program(c: &mut RunConfig, program: &LogicProgram) {
    c.bits = Some(program.tuples().flatten().map(u8::from).collect());
    c.program = None;
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let mut out = create(path)?;
    f(&mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    write_text(path, &text)
}

#[derive(Serialize)]
struct LatchReport<'a> {
    active_high: &'a TrialOutcome,
    active_low: &'a TrialOutcome,
    complementary: bool,
}

/// Resolves the configuration, runs `command` and writes its files.
pub fn run(command: Command, overrides: &Overrides) -> CliResult<Status> {
    let mut c = RunConfig::from_overrides(overrides)?;
    if matches!(command, Command::Latch) && !c.gate.is_latch() {
        c.gate = GateKind::SrLow;
    }
    let mut c = c.resolved();
    c.validate()?;
    fs::create_dir_all(&c.out).map_err(|e| CliError::io(&c.out, e))?;
    let out = c.out.clone();
    let params = c.params();
    let settings = c.trial_settings();

    let status = match command {
        Command::Simulate => {
            let program = build_program(&c)?;
            pin_program(&mut c, &program);
            write_text(&out.join("config.json"), &c.to_json())?;
            write_with(&out.join("program.csv"), |w| program.write_csv(w))?;
            let traj = simulate_program(&params, &program, &settings, noise_seed(&c))?;
            write_with(&out.join("trajectory.csv"), |w| traj.write_csv(w))?;
            Status::Success
        }
        Command::Gate => {
            let program = build_program(&c)?;
            pin_program(&mut c, &program);
            write_text(&out.join("config.json"), &c.to_json())?;
            write_with(&out.join("program.csv"), |w| program.write_csv(w))?;
            let traj = simulate_program(&params, &program, &settings, noise_seed(&c))?;
            let outcome = score_trial(&traj, &program, &c.gate_spec(), &settings.decode)?;
            write_text(&out.join("outcome.json"), &(outcome.to_json() + "\n"))?;
            Status::from_success(outcome.success)
        }
        Command::Sweep => {
            write_text(&out.join("config.json"), &c.to_json())?;
            let grid = SweepGrid::linspace(c.axis, c.from, c.to, c.points, params, c.plan())?;
            let report = sweep(&grid, &c.gate_spec(), &settings, c.seed, c.execution)?;
            write_with(&out.join("plogic.csv"), |w| report.write_csv(w))?;
            write_text(&out.join("plogic.json"), &(report.to_json() + "\n"))?;
            Status::Success
        }
        Command::Phase => {
            let program = build_program(&c)?;
            pin_program(&mut c, &program);
            write_text(&out.join("config.json"), &c.to_json())?;
            let cloud = export_phase_portrait(&params, &program, &settings, noise_seed(&c))?;
            let arity = program.combiner.arity();
            write_with(&out.join("phase.csv"), |w| write_phase_csv(&cloud, arity, w))?;
            Status::Success
        }
        Command::Latch => {
            let program = build_program(&c)?;
            pin_program(&mut c, &program);
            write_text(&out.join("config.json"), &c.to_json())?;
            write_with(&out.join("program.csv"), |w| program.write_csv(w))?;
            let (high, low) = run_latch_experiment(&params, &program, &settings, noise_seed(&c))?;
            let complementary = high
                .bits
                .iter()
                .zip(&low.bits)
                .all(|(h, l)| h.decoded.is_some() && h.decoded.map(|v| !v) == l.decoded);
            write_json(
                &out.join("latch.json"),
                &LatchReport {
                    active_high: &high,
                    active_low: &low,
                    complementary,
                },
            )?;
            Status::from_success(high.success && low.success)
        }
    };
    Ok(status)
}
