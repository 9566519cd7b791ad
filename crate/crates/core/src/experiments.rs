//! Trial orchestration: single trials, P(logic) estimates, parameter sweeps,
//! phase-portrait exports and the two-sided latch read-out.
//!
//! Seeds: program `s` of a run uses `derive_seed(base, "program", s)` and
//! its `r`-th noise realization `derive_seed(program_seed, "noise", r)`.
//! Every point of a sweep reuses the same base seed, so all points see the
//! same programs and noise paths.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::decode::{score_trial, DecodeRule, DecodeSettings, DecodeVar, GateKind, GateSpec, TrialOutcome};
use crate::dynamics::{CircuitParams, SystemState};
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, Trajectory};
use crate::seed::derive_seed;
use crate::signal::{random_program, Combiner, LogicProgram, Timing};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct TrialSettings {
    pub integrator: IntegratorConfig,
    pub decode: DecodeSettings,
    pub timing: Timing,
    pub initial: SystemState,
}

impl TrialSettings {
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        self.decode.validate()?;
        self.timing.validate()
    }
}

/// How trial batches are executed. Both modes give identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool; runs sequentially when built without `parallel`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `items`, keeping input order.
    fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

/// Integrates `program` under `params` and scores it for `gate`.
///
/// `params` is used as given; apply [`GateSpec::at_operating_point`] first
/// for the canonical point.
pub fn run_trial(
    gate: &GateSpec,
    params: &CircuitParams,
    program: &LogicProgram,
    settings: &TrialSettings,
    noise_seed: u64,
) -> Result<(Trajectory, TrialOutcome)> {
    let traj = simulate_program(params, program, settings, noise_seed)?;
    let outcome = score_trial(&traj, program, gate, &settings.decode)?;
    Ok((traj, outcome))
}

/// The trajectory driven by `program`, from `t = 0` to its end.
pub fn simulate_program(
    params: &CircuitParams,
    program: &LogicProgram,
    settings: &TrialSettings,
    noise_seed: u64,
) -> Result<Trajectory> {
    settings.validate()?;
    let config = IntegratorConfig {
        seed: noise_seed,
        ..settings.integrator
    };
    let t_end = program.end_time().max(settings.initial.t + config.dt);
    integrate(settings.initial, params, |t| program.sample_input(t), t_end, &config)
}

/// Sizes of one P(logic) estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPlan {
    pub n_sets: usize,
    pub n_runs_per_set: usize,
    pub bits_per_run: usize,
}

impl Default for RunPlan {
    fn default() -> Self {
        Self {
            n_sets: 20,
            n_runs_per_set: 5,
            bits_per_run: 20,
        }
    }
}

impl RunPlan {
    pub fn trials(&self) -> usize {
        self.n_sets * self.n_runs_per_set
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sets == 0 || self.n_runs_per_set == 0 || self.bits_per_run == 0 {
            return Err(Error::invalid(format!("run plan {self:?} has a zero size")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub trials: usize,
    pub successes: usize,
    /// Trials that left the divergence bound; also counted as failures.
    pub diverged: usize,
    pub p_logic: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub base_seed: u64,
    pub program_seeds: Vec<u64>,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl PointEstimate {
    fn from_counts(successes: usize, trials: usize, diverged: usize, base_seed: u64, program_seeds: Vec<u64>) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials);
        let p_logic = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Self {
            trials,
            successes,
            diverged,
            p_logic,
            ci_lo,
            ci_hi,
            base_seed,
            program_seeds,
        }
    }
}

enum Verdict {
    Success,
    Failure,
    Diverged,
}

/// Estimates P(logic) for `gate` at `params` over `plan.n_sets` random
/// programs with `plan.n_runs_per_set` noise realizations each.
pub fn estimate_plogic(
    gate: &GateSpec,
    params: &CircuitParams,
    plan: &RunPlan,
    settings: &TrialSettings,
    base_seed: u64,
    exec: Execution,
) -> Result<PointEstimate> {
    plan.validate()?;
    settings.validate()?;
    params.validate()?;

    let program_seeds: Vec<u64> = (0..plan.n_sets as u64)
        .map(|s| derive_seed(base_seed, "program", s))
        .collect();
    let programs = program_seeds
        .iter()
        .map(|&seed| random_program(plan.bits_per_run, gate.combiner, seed, params.delta, settings.timing))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, u64)> = program_seeds
        .iter()
        .enumerate()
        .flat_map(|(s, &ps)| (0..plan.n_runs_per_set as u64).map(move |r| (s, derive_seed(ps, "noise", r))))
        .collect();

    let verdicts = exec.map(&jobs, |&(s, noise_seed)| {
        match run_trial(gate, params, &programs[s], settings, noise_seed) {
            Ok((_, outcome)) if outcome.success => Ok(Verdict::Success),
            Ok(_) => Ok(Verdict::Failure),
            Err(Error::Diverged { .. }) => Ok(Verdict::Diverged),
            Err(e) => Err(e),
        }
    });

    let (mut successes, mut diverged) = (0, 0);
    for v in verdicts {
        match v? {
            Verdict::Success => successes += 1,
            Verdict::Diverged => diverged += 1,
            Verdict::Failure => {}
        }
    }
    Ok(PointEstimate::from_counts(successes, jobs.len(), diverged, base_seed, program_seeds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Forcing amplitude `f`.
    #[serde(rename = "f")]
    Forcing,
    /// Noise intensity `D`.
    #[serde(rename = "D")]
    Noise,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Forcing => "f",
            Axis::Noise => "D",
        }
    }

    pub fn apply(self, params: &CircuitParams, value: f64) -> CircuitParams {
        match self {
            Axis::Forcing => CircuitParams { f: value, ..*params },
            Axis::Noise => CircuitParams { noise_d: value, ..*params },
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f" | "F" | "forcing" => Ok(Axis::Forcing),
            "d" | "D" | "noise" => Ok(Axis::Noise),
            other => Err(Error::invalid(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Parameters held fixed; the swept field is overwritten per point.
    pub params: CircuitParams,
    pub plan: RunPlan,
}

impl SweepGrid {
    /// `points` evenly spaced values from `from` to `to` inclusive.
    pub fn linspace(axis: Axis, from: f64, to: f64, points: usize, params: CircuitParams, plan: RunPlan) -> Result<Self> {
        let values = match points {
            0 => Vec::new(),
            1 => vec![from],
            n => (0..n)
                .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        let grid = Self {
            axis,
            values,
            params,
            plan,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("sweep grid has no points"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep values must be finite"));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        self.plan.validate()?;
        for &v in &self.values {
            self.axis.apply(&self.params, v).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    #[serde(flatten)]
    pub estimate: PointEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLogicReport {
    pub gate: GateSpec,
    pub grid: SweepGrid,
    pub settings: TrialSettings,
    pub base_seed: u64,
    pub points: Vec<SweepPoint>,
}

impl PLogicReport {
    pub fn axis_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.axis_value).collect()
    }

    pub fn p_logic(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.estimate.p_logic).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "axis_value,trials,successes,p_logic,ci_lo,ci_hi")?;
        for p in &self.points {
            let e = &p.estimate;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.axis_value, e.trials, e.successes, e.p_logic, e.ci_lo, e.ci_hi
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs [`estimate_plogic`] at every grid value with the same `base_seed`.
pub fn sweep(
    grid: &SweepGrid,
    gate: &GateSpec,
    settings: &TrialSettings,
    base_seed: u64,
    exec: Execution,
) -> Result<PLogicReport> {
    grid.validate()?;
    let points = grid
        .values
        .iter()
        .map(|&v| {
            let params = grid.axis.apply(&grid.params, v);
            estimate_plogic(gate, &params, &grid.plan, settings, base_seed, exec).map(|estimate| SweepPoint {
                axis_value: v,
                estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PLogicReport {
        gate: *gate,
        grid: grid.clone(),
        settings: *settings,
        base_seed,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x1: f64,
    pub x2: f64,
    pub bits: Vec<bool>,
}

/// `(x1, x2)` samples labeled by the input tuple active at the time. The
/// initial transient and the first `settle_fraction` of every bit are left
/// out, so inter-well transits do not blur the per-input clouds.
pub fn export_phase_portrait(
    params: &CircuitParams,
    program: &LogicProgram,
    settings: &TrialSettings,
    noise_seed: u64,
) -> Result<Vec<PhasePoint>> {
    if program.is_empty() {
        return Ok(Vec::new());
    }
    let traj = simulate_program(params, program, settings, noise_seed)?;
    let mut cloud = Vec::new();
    for (k, bits) in program.tuples().enumerate() {
        let (start, end) = program.bit_interval(k);
        let seg = crate::decode::samples_in(&traj, start, end);
        let skip = (seg.len() as f64 * settings.decode.settle_fraction).floor() as usize;
        cloud.extend(seg[skip..].iter().map(|s| PhasePoint {
            x1: s.x1,
            x2: s.x2,
            bits: bits.clone(),
        }));
    }
    Ok(cloud)
}

/// Writes `x1,x2,bit_ch1,...` with one label column per channel.
pub fn write_phase_csv<W: Write>(cloud: &[PhasePoint], arity: usize, mut out: W) -> std::io::Result<()> {
    let labels: Vec<String> = (1..=arity).map(|c| format!("bit_ch{c}")).collect();
    writeln!(out, "x1,x2,{}", labels.join(","))?;
    for p in cloud {
        let bits: Vec<&str> = p.bits.iter().map(|&b| if b { "1" } else { "0" }).collect();
        writeln!(out, "{:.16e},{:.16e},{}", p.x1, p.x2, bits.join(","))?;
    }
    Ok(())
}

/// Scores one latch trajectory as active-high (`x2`) and active-low (`x1`).
pub fn run_latch_experiment(
    params: &CircuitParams,
    program: &LogicProgram,
    settings: &TrialSettings,
    noise_seed: u64,
) -> Result<(TrialOutcome, TrialOutcome)> {
    if program.combiner != Combiner::Diff2 {
        return Err(Error::invalid("latch programs use the diff2 combiner"));
    }
    if let Some(k) = program.tuples().position(|b| b[0] && b[1]) {
        return Err(Error::ForbiddenInput { bit_index: Some(k) });
    }
    let traj = simulate_program(params, program, settings, noise_seed)?;
    let high = score_trial(&traj, program, &GateSpec::canonical(GateKind::SrHigh), &settings.decode)?;
    let low = score_trial(&traj, program, &GateSpec::canonical(GateKind::SrLow), &settings.decode)?;
    Ok((high, low))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCalibration {
    pub candidates: Vec<f64>,
    /// Fraction of scored bits where the `x2` read-out equals the
    /// complement of XOR decoded from `x1`.
    pub agreement: Vec<f64>,
    pub half_width: f64,
}

/// Picks the XNOR half-width on `x2`: the midpoint of the widest run of
/// candidates with maximal agreement against the complement of XOR read
/// from `x1`. Bits where the XOR read-out is indeterminate are skipped.
pub fn calibrate_xnor_band(
    params: &CircuitParams,
    plan: &RunPlan,
    settings: &TrialSettings,
    base_seed: u64,
    candidates: &[f64],
    exec: Execution,
) -> Result<BandCalibration> {
    plan.validate()?;
    if candidates.is_empty() || candidates.windows(2).any(|w| !(w[1] > w[0])) || candidates[0] <= 0.0 {
        return Err(Error::invalid("candidates must be positive and strictly increasing"));
    }
    let xor = GateSpec::canonical(GateKind::Xor);
    let seeds: Vec<u64> = (0..plan.n_sets as u64)
        .map(|s| derive_seed(base_seed, "program", s))
        .collect();

    // Per program: agreeing bits per candidate and the number of scored bits.
    let per_program = exec.map(&seeds, |&seed| -> Result<(Vec<usize>, usize)> {
        let program = random_program(plan.bits_per_run, Combiner::Sum2, seed, params.delta, settings.timing)?;
        let traj = simulate_program(params, &program, settings, derive_seed(seed, "noise", 0))?;
        let reference = score_trial(&traj, &program, &xor, &settings.decode)?;
        let mut hits = vec![0; candidates.len()];
        let mut scored = 0;
        for (k, bit) in reference.bits.iter().enumerate() {
            let Some(x) = bit.decoded else { continue };
            scored += 1;
            let (start, end) = program.bit_interval(k);
            let values: Vec<f64> = crate::decode::samples_in(&traj, start, end)
                .iter()
                .map(|s| DecodeVar::X2.read(s))
                .collect();
            for (i, &w) in candidates.iter().enumerate() {
                let rule = DecodeRule::BandComplement { lo: -w, hi: w };
                let (y, _) = crate::decode::decode_bit(&values, &rule, &settings.decode)?;
                if y == Some(!x) {
                    hits[i] += 1;
                }
            }
        }
        Ok((hits, scored))
    });

    let mut hits = vec![0usize; candidates.len()];
    let mut scored = 0usize;
    for r in per_program {
        let (h, n) = r?;
        scored += n;
        hits.iter_mut().zip(h).for_each(|(a, b)| *a += b);
    }
    if scored == 0 {
        return Err(Error::invalid("no determinate XOR bits to calibrate against"));
    }
    let agreement: Vec<f64> = hits.iter().map(|&h| h as f64 / scored as f64).collect();
    let best = hits.iter().copied().max().unwrap_or(0);

    // Widest contiguous run of maximal candidates.
    let (mut run_start, mut best_run) = (None, (0usize, 0usize));
    for i in 0..=hits.len() {
        match (i < hits.len() && hits[i] == best, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                if i - s > best_run.1 - best_run.0 {
                    best_run = (s, i);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let half_width = 0.5 * (candidates[best_run.0] + candidates[best_run.1 - 1]);
    Ok(BandCalibration {
        candidates: candidates.to_vec(),
        agreement,
        half_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // Closed form at p = 0 and p = 1: [0, z^2/(n+z^2)] and its mirror.
        let n = 20.0;
        let z2 = Z95 * Z95;
        let (lo, hi) = wilson_interval(0, 20);
        assert_eq!(lo, 0.0);
        assert!((hi - z2 / (n + z2)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(20, 20);
        assert!((lo - n / (n + z2)).abs() < 1e-12);
        assert_eq!(hi, 1.0);
        // 50 of 100: 0.5 -+ 0.0962...
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn zero_successes_give_zero() {
        let e = PointEstimate::from_counts(0, 40, 3, 1, vec![]);
        assert_eq!(e.p_logic, 0.0);
        assert!(e.ci_lo == 0.0 && e.ci_hi > 0.0);
    }

    #[test]
    fn grid_validation() {
        let p = CircuitParams::default();
        let plan = RunPlan::default();
        assert_eq!(SweepGrid::linspace(Axis::Noise, 0.0, 1.0, 11, p, plan).unwrap().values.len(), 11);
        let g = SweepGrid::linspace(Axis::Forcing, 0.05, 0.3, 26, p, plan).unwrap();
        assert!((g.values[11] - 0.16).abs() < 1e-12);
        assert!(SweepGrid::linspace(Axis::Noise, 1.0, 0.0, 3, p, plan).is_err());
        assert!(SweepGrid::linspace(Axis::Noise, -1.0, 0.0, 3, p, plan).is_err());
        assert!(SweepGrid::linspace(Axis::Noise, 0.0, 1.0, 0, p, plan).is_err());
        let bad = RunPlan { n_sets: 0, ..plan };
        assert!(SweepGrid::linspace(Axis::Noise, 0.0, 1.0, 2, p, bad).is_err());
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("d".parse::<Axis>().unwrap(), Axis::Noise);
        assert_eq!("f".parse::<Axis>().unwrap(), Axis::Forcing);
        assert!("q".parse::<Axis>().is_err());
    }

    #[test]
    fn execution_modes_keep_order() {
        let items: Vec<u64> = (0..1000).collect();
        let a = Execution::Sequential.map(&items, |&i| derive_seed(1, "x", i));
        let b = Execution::Parallel.map(&items, |&i| derive_seed(1, "x", i));
        assert_eq!(a, b);
    }

    #[test]
    fn phase_csv_header_without_bits() {
        let mut buf = Vec::new();
        write_phase_csv(&[], 2, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,x2,bit_ch1,bit_ch2\n");
    }
}
