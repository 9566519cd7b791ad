//! Reading Boolean outputs off a trajectory.
//!
//! Each gate is read from one state variable with a region rule: the sign
//! of the variable for the OR/AND families and the latch, or membership in
//! a band around the origin for XOR/XNOR. A bit is decoded from the samples
//! left after discarding the first `settle_fraction` of its interval, and
//! only counts as 0 or 1 when at least `agreement_threshold` of them agree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::CircuitParams;
use crate::error::{Error, Result};
use crate::integrator::{Sample, Trajectory};
use crate::signal::{Combiner, LogicProgram};

/// Half-width of the XOR band on `x1`.
pub const XOR_BAND_HALF_WIDTH: f64 = 1.5;

/// Half-width of the XNOR band on `x2`, from
/// [`crate::experiments::calibrate_xnor_band`] at the XOR operating point.
pub const XNOR_BAND_HALF_WIDTH: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    Or,
    And,
    Nor,
    Nand,
    Xor,
    Xnor,
    Or3,
    And3,
    /// Latch read from `x2`; outputs the complement of the stored state.
    SrHigh,
    /// Latch read from `x1`; outputs the stored state.
    SrLow,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::Or,
        GateKind::And,
        GateKind::Nor,
        GateKind::Nand,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Or3,
        GateKind::And3,
        GateKind::SrHigh,
        GateKind::SrLow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Or => "or",
            GateKind::And => "and",
            GateKind::Nor => "nor",
            GateKind::Nand => "nand",
            GateKind::Xor => "xor",
            GateKind::Xnor => "xnor",
            GateKind::Or3 => "or3",
            GateKind::And3 => "and3",
            GateKind::SrHigh => "sr-high",
            GateKind::SrLow => "sr-low",
        }
    }

    pub fn combiner(self) -> Combiner {
        match self {
            GateKind::Or3 | GateKind::And3 => Combiner::Sum3,
            GateKind::SrHigh | GateKind::SrLow => Combiner::Diff2,
            _ => Combiner::Sum2,
        }
    }

    pub fn arity(self) -> usize {
        self.combiner().arity()
    }

    pub fn is_latch(self) -> bool {
        matches!(self, GateKind::SrHigh | GateKind::SrLow)
    }

    /// The gate read in parallel from the other state variable.
    pub fn complement(self) -> Option<GateKind> {
        Some(match self {
            GateKind::Or => GateKind::Nor,
            GateKind::Nor => GateKind::Or,
            GateKind::And => GateKind::Nand,
            GateKind::Nand => GateKind::And,
            GateKind::Xor => GateKind::Xnor,
            GateKind::Xnor => GateKind::Xor,
            GateKind::SrHigh => GateKind::SrLow,
            GateKind::SrLow => GateKind::SrHigh,
            GateKind::Or3 | GateKind::And3 => return None,
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('_', "-");
        GateKind::ALL
            .into_iter()
            .find(|g| g.name() == lower)
            .ok_or_else(|| Error::invalid(format!("unknown gate `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeVar {
    X1,
    X2,
}

impl DecodeVar {
    #[inline]
    pub fn read(self, s: &Sample) -> f64 {
        match self {
            DecodeVar::X1 => s.x1,
            DecodeVar::X2 => s.x2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecodeRule {
    /// 1 when `v > 0`.
    SignPos,
    /// 1 when `v < 0`.
    SignNeg,
    /// 1 when `lo <= v <= hi`.
    Band { lo: f64, hi: f64 },
    /// 1 outside `[lo, hi]`.
    BandComplement { lo: f64, hi: f64 },
}

impl DecodeRule {
    pub fn symmetric_band(half_width: f64) -> Self {
        DecodeRule::Band {
            lo: -half_width,
            hi: half_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DecodeRule::Band { lo, hi } | DecodeRule::BandComplement { lo, hi } if !(lo < hi) => {
                Err(Error::invalid(format!("band [{lo}, {hi}] is empty")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            DecodeRule::SignPos => v > 0.0,
            DecodeRule::SignNeg => v < 0.0,
            DecodeRule::Band { lo, hi } => lo <= v && v <= hi,
            DecodeRule::BandComplement { lo, hi } => !(lo <= v && v <= hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub decode_var: DecodeVar,
    pub rule: DecodeRule,
    pub operating_bias: f64,
    pub operating_f: f64,
    /// Input amplitude the gate is run at.
    pub operating_delta: f64,
    pub combiner: Combiner,
}

impl GateSpec {
    /// The published operating point and read-out for `kind`.
    pub fn canonical(kind: GateKind) -> Self {
        use GateKind::*;
        let (decode_var, rule, bias, f, delta) = match kind {
            Or => (DecodeVar::X1, DecodeRule::SignPos, 0.01, 0.1, 0.2),
            Nor => (DecodeVar::X2, DecodeRule::SignPos, 0.01, 0.1, 0.2),
            And => (DecodeVar::X1, DecodeRule::SignPos, -0.01, 0.1, 0.2),
            Nand => (DecodeVar::X2, DecodeRule::SignPos, -0.01, 0.1, 0.2),
            Xor => (DecodeVar::X1, DecodeRule::symmetric_band(XOR_BAND_HALF_WIDTH), 0.01, 0.16, 0.2),
            Xnor => (
                DecodeVar::X2,
                DecodeRule::BandComplement {
                    lo: -XNOR_BAND_HALF_WIDTH,
                    hi: XNOR_BAND_HALF_WIDTH,
                },
                0.01,
                0.16,
                0.2,
            ),
            Or3 => (DecodeVar::X1, DecodeRule::SignPos, 0.25, 0.1, 0.2),
            And3 => (DecodeVar::X1, DecodeRule::SignPos, -0.25, 0.1, 0.2),
            // Latch levels are I = +-0.1, i.e. delta = 0.05.
            SrHigh => (DecodeVar::X2, DecodeRule::SignPos, 0.0, 0.1, 0.05),
            SrLow => (DecodeVar::X1, DecodeRule::SignPos, 0.0, 0.1, 0.05),
        };
        Self {
            kind,
            decode_var,
            rule,
            operating_bias: bias,
            operating_f: f,
            operating_delta: delta,
            combiner: kind.combiner(),
        }
    }

    /// `params` with the bias, forcing and input amplitude of this gate.
    pub fn at_operating_point(&self, params: &CircuitParams) -> CircuitParams {
        CircuitParams {
            bias: self.operating_bias,
            f: self.operating_f,
            delta: self.operating_delta,
            ..*params
        }
    }

    /// Same operating point and combiner, read as `kind` from `var` with `rule`.
    pub fn read_as(&self, kind: GateKind, decode_var: DecodeVar, rule: DecodeRule) -> Self {
        Self {
            kind,
            decode_var,
            rule,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeSettings {
    pub settle_fraction: f64,
    pub agreement_threshold: f64,
}

impl Default for DecodeSettings {
    fn default() -> Self {
        Self {
            settle_fraction: 0.5,
            agreement_threshold: 0.9,
        }
    }
}

impl DecodeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.settle_fraction) {
            return Err(Error::invalid(format!(
                "settle_fraction = {} must lie in [0, 1)",
                self.settle_fraction
            )));
        }
        if !(self.agreement_threshold > 0.5 && self.agreement_threshold <= 1.0) {
            return Err(Error::invalid(format!(
                "agreement_threshold = {} must lie in (0.5, 1]",
                self.agreement_threshold
            )));
        }
        Ok(())
    }
}

/// Truth table of `kind`. For latches `prev` is the previous output of the
/// same gate; `Ok(None)` means a hold whose state is not yet known.
pub fn oracle(kind: GateKind, bits: &[bool], prev: Option<bool>) -> Result<Option<bool>> {
    if bits.len() != kind.arity() {
        return Err(Error::ArityMismatch {
            expected: kind.arity(),
            got: bits.len(),
        });
    }
    let any = bits.iter().any(|&b| b);
    let all = bits.iter().all(|&b| b);
    Ok(Some(match kind {
        GateKind::Or | GateKind::Or3 => any,
        GateKind::And | GateKind::And3 => all,
        GateKind::Nor => !any,
        GateKind::Nand => !all,
        GateKind::Xor => bits[0] != bits[1],
        GateKind::Xnor => bits[0] == bits[1],
        GateKind::SrHigh | GateKind::SrLow => {
            let stored = match (bits[0], bits[1]) {
                (true, true) => return Err(Error::ForbiddenInput { bit_index: None }),
                (false, false) => return Ok(prev),
                (set, _) => set,
            };
            if kind == GateKind::SrHigh {
                !stored
            } else {
                stored
            }
        }
    }))
}

/// Decodes one bit from the samples of its interval.
///
/// Returns the decoded value (`None` when neither level reaches the
/// agreement threshold) and the fraction of retained samples satisfying
/// `rule`.
pub fn decode_bit(segment: &[f64], rule: &DecodeRule, settings: &DecodeSettings) -> Result<(Option<bool>, f64)> {
    let skip = (segment.len() as f64 * settings.settle_fraction).floor() as usize;
    let kept = &segment[skip.min(segment.len())..];
    if kept.is_empty() {
        return Err(Error::EmptySegment { bit_index: 0 });
    }
    let hits = kept.iter().filter(|&&v| rule.holds(v)).count();
    let residence = hits as f64 / kept.len() as f64;
    let decoded = if residence >= settings.agreement_threshold {
        Some(true)
    } else if 1.0 - residence >= settings.agreement_threshold {
        Some(false)
    } else {
        None
    };
    Ok((decoded, residence))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitRecord {
    pub index: usize,
    pub inputs: Vec<bool>,
    /// Oracle output; `None` only for a latch hold before any state is known.
    pub expected: Option<bool>,
    /// `None` when the bit was indeterminate.
    pub decoded: Option<bool>,
    pub residence: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub gate: GateKind,
    pub bits: Vec<BitRecord>,
    pub success: bool,
}

impl TrialOutcome {
    pub fn decoded(&self) -> Vec<Option<bool>> {
        self.bits.iter().map(|b| b.decoded).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

/// Samples of `traj` inside `[start, end)`.
pub(crate) fn samples_in(traj: &Trajectory, start: f64, end: f64) -> &[Sample] {
    let eps = 1e-9 * (end - start).abs().max(1.0);
    let lo = traj.samples.partition_point(|s| s.t < start - eps);
    let hi = traj.samples.partition_point(|s| s.t < end - eps);
    &traj.samples[lo..hi.max(lo)]
}

/// Decodes every bit of `program` from `traj` and checks it against the
/// truth table of `gate.kind`. Latch state is threaded through the oracle
/// and seeded from the first decoded hold.
pub fn score_trial(
    traj: &Trajectory,
    program: &LogicProgram,
    gate: &GateSpec,
    settings: &DecodeSettings,
) -> Result<TrialOutcome> {
    settings.validate()?;
    gate.rule.validate()?;
    if program.combiner.arity() != gate.kind.arity() {
        return Err(Error::ArityMismatch {
            expected: gate.kind.arity(),
            got: program.combiner.arity(),
        });
    }
    let end = program.end_time();
    let covered = traj
        .last()
        .is_some_and(|s| s.t >= end - 1e-9 * end.abs().max(1.0));
    if !program.is_empty() && !covered {
        return Err(Error::invalid(format!("trajectory stops before the program ends at t = {end}")));
    }

    let mut state: Option<bool> = None;
    let mut bits = Vec::with_capacity(program.n_bits());
    for (index, inputs) in program.tuples().enumerate() {
        let (start, stop) = program.bit_interval(index);
        let values: Vec<f64> = samples_in(traj, start, stop)
            .iter()
            .map(|s| gate.decode_var.read(s))
            .collect();
        let (decoded, residence) = decode_bit(&values, &gate.rule, settings).map_err(|e| match e {
            Error::EmptySegment { .. } => Error::EmptySegment { bit_index: index },
            other => other,
        })?;

        let expected = oracle(gate.kind, &inputs, state).map_err(|e| match e {
            Error::ForbiddenInput { .. } => Error::ForbiddenInput { bit_index: Some(index) },
            other => other,
        })?;
        let expected = match expected {
            Some(v) => Some(v),
            // First hold of a latch: take the state the circuit is in.
            None => decoded,
        };
        if gate.kind.is_latch() && expected.is_some() {
            state = expected;
        }
        let matched = decoded.is_some() && decoded == expected;
        bits.push(BitRecord {
            index,
            inputs,
            expected,
            decoded,
            residence,
            matched,
        });
    }
    let success = bits.iter().all(|b| b.matched);
    Ok(TrialOutcome {
        gate: gate.kind,
        bits,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Timing;
    use proptest::prelude::*;

    fn all_tuples(arity: usize) -> Vec<Vec<bool>> {
        (0..1u32 << arity)
            .map(|m| (0..arity).map(|c| m >> (arity - 1 - c) & 1 == 1).collect())
            .collect()
    }

    fn value(kind: GateKind, bits: &[bool]) -> bool {
        oracle(kind, bits, None).unwrap().unwrap()
    }

    #[test]
    fn truth_table_rows() {
        use GateKind::*;
        let rows: [(GateKind, [bool; 4]); 6] = [
            (And, [false, false, false, true]),
            (Nand, [true, true, true, false]),
            (Or, [false, true, true, true]),
            (Nor, [true, false, false, false]),
            (Xor, [false, true, true, false]),
            (Xnor, [true, false, false, true]),
        ];
        for (kind, outputs) in rows {
            for (bits, out) in all_tuples(2).iter().zip(outputs) {
                assert_eq!(value(kind, bits), out, "{kind} {bits:?}");
            }
        }
        assert!(value(Xor, &[false, true]));
        assert!(!value(Nand, &[true, true]));
    }

    #[test]
    fn three_input_tables() {
        for bits in all_tuples(3) {
            let any = bits.iter().any(|&b| b);
            let all = bits.iter().all(|&b| b);
            assert_eq!(value(GateKind::Or3, &bits), any);
            assert_eq!(value(GateKind::And3, &bits), all);
        }
    }

    #[test]
    fn latch_table() {
        use GateKind::*;
        assert_eq!(oracle(SrHigh, &[false, false], Some(true)).unwrap(), Some(true));
        assert_eq!(oracle(SrLow, &[false, false], Some(false)).unwrap(), Some(false));
        assert_eq!(oracle(SrLow, &[false, false], None).unwrap(), None);
        assert_eq!(oracle(SrLow, &[true, false], None).unwrap(), Some(true));
        assert_eq!(oracle(SrLow, &[false, true], Some(true)).unwrap(), Some(false));
        assert_eq!(oracle(SrHigh, &[true, false], None).unwrap(), Some(false));
        assert_eq!(oracle(SrHigh, &[false, true], None).unwrap(), Some(true));
        assert_eq!(
            oracle(SrHigh, &[true, true], Some(true)),
            Err(Error::ForbiddenInput { bit_index: None })
        );
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            oracle(GateKind::Or, &[true], None),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
        assert!(oracle(GateKind::Or3, &[true, false], None).is_err());
    }

    #[test]
    fn gate_names_round_trip() {
        for g in GateKind::ALL {
            assert_eq!(g.name().parse::<GateKind>().unwrap(), g);
        }
        assert_eq!("SR_LOW".parse::<GateKind>().unwrap(), GateKind::SrLow);
        assert!("nope".parse::<GateKind>().is_err());
    }

    #[test]
    fn canonical_points() {
        let or = GateSpec::canonical(GateKind::Or);
        assert_eq!((or.operating_bias, or.operating_f, or.combiner), (0.01, 0.1, Combiner::Sum2));
        let and = GateSpec::canonical(GateKind::And);
        assert_eq!(and.operating_bias, -0.01);
        let xor = GateSpec::canonical(GateKind::Xor);
        assert_eq!(xor.operating_f, 0.16);
        assert_eq!(xor.rule, DecodeRule::Band { lo: -1.5, hi: 1.5 });
        let sr = GateSpec::canonical(GateKind::SrHigh);
        assert_eq!((sr.operating_bias, sr.combiner), (0.0, Combiner::Diff2));
        assert_eq!(GateSpec::canonical(GateKind::Or3).operating_bias, 0.25);
        assert_eq!(GateSpec::canonical(GateKind::And3).operating_bias, -0.25);
        for g in GateKind::ALL {
            GateSpec::canonical(g).rule.validate().unwrap();
        }
    }

    #[test]
    fn constant_segments() {
        let s = DecodeSettings::default();
        assert_eq!(decode_bit(&[0.8; 100], &DecodeRule::SignPos, &s).unwrap(), (Some(true), 1.0));
        let band = DecodeRule::symmetric_band(1.5);
        assert_eq!(decode_bit(&[1.8; 100], &band, &s).unwrap(), (Some(false), 0.0));
    }

    #[test]
    fn chatter_is_indeterminate() {
        let s = DecodeSettings {
            settle_fraction: 0.0,
            agreement_threshold: 0.9,
        };
        let seg: Vec<f64> = (0..100).map(|i| if i % 5 < 3 { 1.0 } else { -1.0 }).collect();
        let (decoded, residence) = decode_bit(&seg, &DecodeRule::SignPos, &s).unwrap();
        assert_eq!(decoded, None);
        assert!((residence - 0.6).abs() < 1e-12);
    }

    #[test]
    fn settle_fraction_drops_the_leading_samples() {
        let s = DecodeSettings::default();
        let mut seg = vec![-1.0; 50];
        seg.extend([1.0; 50]);
        assert_eq!(decode_bit(&seg, &DecodeRule::SignPos, &s).unwrap(), (Some(true), 1.0));
        assert_eq!(
            decode_bit(&[], &DecodeRule::SignPos, &s),
            Err(Error::EmptySegment { bit_index: 0 })
        );
        assert!(decode_bit(&[1.0], &DecodeRule::SignPos, &s).is_ok());
    }

    #[test]
    fn rules() {
        assert!(DecodeRule::SignNeg.holds(-0.1));
        assert!(!DecodeRule::SignPos.holds(0.0));
        let comp = DecodeRule::BandComplement { lo: -1.0, hi: 1.0 };
        assert!(comp.holds(1.2) && !comp.holds(0.3));
        assert!(DecodeRule::Band { lo: 1.0, hi: 1.0 }.validate().is_err());
    }

    /// A synthetic trajectory whose decode variable follows `levels` per bit.
    fn synthetic(program: &LogicProgram, levels: &[f64]) -> Trajectory {
        let dt = 0.5;
        let n = (program.end_time() / dt).round() as usize;
        let samples = (0..=n)
            .map(|k| {
                let t = k as f64 * dt;
                let v = program.bit_index_at(t).map_or(0.0, |i| levels[i]);
                Sample {
                    t,
                    x1: v,
                    x2: -v,
                    input: 0.0,
                    drive: 0.0,
                }
            })
            .collect();
        Trajectory { samples }
    }

    fn short_timing() -> Timing {
        Timing {
            bit_duration: 10.0,
            transient: 5.0,
        }
    }

    #[test]
    fn scoring_a_perfect_or_trace() {
        let tuples = all_tuples(2);
        let program = LogicProgram::from_tuples(&tuples, Combiner::Sum2, 0.2, short_timing()).unwrap();
        let traj = synthetic(&program, &[-1.0, 1.0, 1.0, 2.0]);
        let or = GateSpec::canonical(GateKind::Or);
        let outcome = score_trial(&traj, &program, &or, &DecodeSettings::default()).unwrap();
        assert!(outcome.success);
        let nor = GateSpec::canonical(GateKind::Nor);
        assert!(score_trial(&traj, &program, &nor, &DecodeSettings::default()).unwrap().success);
        let and = or.read_as(GateKind::And, DecodeVar::X1, DecodeRule::SignPos);
        let wrong = score_trial(&traj, &program, &and, &DecodeSettings::default()).unwrap();
        assert!(!wrong.success);
        assert!(!wrong.bits[1].matched && wrong.bits[3].matched);
    }

    #[test]
    fn latch_state_is_seeded_from_the_first_hold() {
        let tuples = vec![vec![false, false], vec![false, false], vec![true, false], vec![false, false]];
        let program = LogicProgram::from_tuples(&tuples, Combiner::Diff2, 0.05, short_timing()).unwrap();
        let traj = synthetic(&program, &[-1.0, -1.0, 1.0, 1.0]);
        let low = GateSpec::canonical(GateKind::SrLow);
        let outcome = score_trial(&traj, &program, &low, &DecodeSettings::default()).unwrap();
        assert!(outcome.success, "{outcome:?}");
        assert_eq!(outcome.bits[0].expected, Some(false));
        assert_eq!(outcome.bits[3].expected, Some(true));

        let high = GateSpec::canonical(GateKind::SrHigh);
        let outcome = score_trial(&traj, &program, &high, &DecodeSettings::default()).unwrap();
        assert!(outcome.success, "{outcome:?}");

        // A state flip during a hold is a failure.
        let traj = synthetic(&program, &[-1.0, 1.0, 1.0, 1.0]);
        assert!(!score_trial(&traj, &program, &low, &DecodeSettings::default()).unwrap().success);
    }

    #[test]
    fn forbidden_latch_input_is_reported_with_its_index() {
        let tuples = vec![vec![true, false], vec![true, true]];
        let program = LogicProgram::from_tuples(&tuples, Combiner::Diff2, 0.05, short_timing()).unwrap();
        let traj = synthetic(&program, &[1.0, 1.0]);
        let err = score_trial(&traj, &program, &GateSpec::canonical(GateKind::SrLow), &DecodeSettings::default());
        assert_eq!(err.unwrap_err(), Error::ForbiddenInput { bit_index: Some(1) });
    }

    #[test]
    fn short_trajectories_are_rejected() {
        let program = LogicProgram::from_tuples(&all_tuples(2), Combiner::Sum2, 0.2, short_timing()).unwrap();
        let mut traj = synthetic(&program, &[-1.0, 1.0, 1.0, 1.0]);
        traj.samples.truncate(traj.samples.len() / 2);
        assert!(score_trial(&traj, &program, &GateSpec::canonical(GateKind::Or), &DecodeSettings::default()).is_err());
    }

    #[test]
    fn outcome_json_shape() {
        let program = LogicProgram::from_tuples(&all_tuples(2), Combiner::Sum2, 0.2, short_timing()).unwrap();
        let traj = synthetic(&program, &[-1.0, 1.0, 1.0, 1.0]);
        let outcome = score_trial(&traj, &program, &GateSpec::canonical(GateKind::Or), &DecodeSettings::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&outcome.to_json()).unwrap();
        assert_eq!(v["gate"], "or");
        assert_eq!(v["success"], true);
        assert_eq!(v["bits"].as_array().unwrap().len(), 4);
        assert!(v["bits"][0].get("expected").is_some());
        assert!(v["bits"][0].get("decoded").is_some());
        assert!(v["bits"][0].get("residence").is_some());
    }

    #[test]
    fn oracle_algebra_is_exhaustive() {
        for bits in all_tuples(2) {
            let or = value(GateKind::Or, &bits);
            let and = value(GateKind::And, &bits);
            assert_eq!(value(GateKind::Nand, &bits), !and);
            assert_eq!(value(GateKind::Nor, &bits), !or);
            assert_eq!(value(GateKind::Xnor, &bits), !value(GateKind::Xor, &bits));
            assert_eq!(value(GateKind::Xor, &bits), or && !and);
        }
    }

    proptest! {
        #[test]
        fn widening_a_band_never_turns_one_into_zero(
            seg in proptest::collection::vec(-3.0..3.0f64, 1..200),
            lo in -2.0..0.0f64, hi in 0.0..2.0f64, grow_lo in 0.0..1.0f64, grow_hi in 0.0..1.0f64,
        ) {
            let s = DecodeSettings::default();
            let narrow = DecodeRule::Band { lo, hi: hi + 1e-6 };
            let wide = DecodeRule::Band { lo: lo - grow_lo, hi: hi + 1e-6 + grow_hi };
            let (a, ra) = decode_bit(&seg, &narrow, &s).unwrap();
            let (b, rb) = decode_bit(&seg, &wide, &s).unwrap();
            prop_assert!(rb >= ra);
            if a == Some(true) {
                prop_assert_eq!(b, Some(true));
            }
        }

        #[test]
        fn latch_holds_through_any_idle_run(prev in any::<bool>(), len in 1usize..50) {
            let mut q = Some(prev);
            for _ in 0..len {
                q = oracle(GateKind::SrLow, &[false, false], q).unwrap();
            }
            prop_assert_eq!(q, Some(prev));
        }
    }
}
