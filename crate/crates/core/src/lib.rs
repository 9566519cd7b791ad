//! Logic gates, three-input gates and a Set-Reset latch realized in a
//! two-cell state-controlled CNN form of the driven Murali-Lakshmanan-Chua
//! circuit, with Monte Carlo estimation of the probability of correct logic
//! response.
//!
//! The pipeline is: build a [`LogicProgram`], integrate the circuit under
//! the resulting square-wave input, then decode each bit interval with a
//! [`GateSpec`] and compare against its truth table.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decode;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod seed;
pub mod signal;

pub use decode::{
    decode_bit, oracle, score_trial, BitRecord, DecodeRule, DecodeSettings, DecodeVar, GateKind, GateSpec,
    TrialOutcome,
};
pub use dynamics::{derive_weights, drift_mlc, drift_sccnn, CircuitParams, SccnnWeights, SystemState};
pub use error::{Error, Result};
pub use experiments::{
    estimate_plogic, export_phase_portrait, run_latch_experiment, run_trial, sweep, Axis, Execution, PLogicReport,
    PointEstimate, RunPlan, SweepGrid, TrialSettings,
};
pub use integrator::{integrate, IntegratorConfig, Sample, Scheme, Trajectory};
pub use signal::{random_program, Combiner, LogicProgram, Timing};
