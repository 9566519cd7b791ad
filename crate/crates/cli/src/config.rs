use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use sccnn_logic::decode::XNOR_BAND_HALF_WIDTH;
use sccnn_logic::experiments::Axis;
use sccnn_logic::{
    CircuitParams, DecodeRule, DecodeSettings, Execution, GateKind, GateSpec, IntegratorConfig, RunPlan, Scheme,
    SystemState, Timing, TrialSettings,
};

use crate::error::{CliError, CliResult};

/// Everything a run depends on. Serialized flat; `bias`, `forcing` and
/// `delta` left unset fall back to the selected gate's operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gate: GateKind,
    pub seed: u64,
    pub out: PathBuf,

    pub a: f64,
    pub b: f64,
    pub nu: f64,
    pub beta: f64,
    pub omega: f64,
    pub bias: Option<f64>,
    pub forcing: Option<f64>,
    pub delta: Option<f64>,
    pub noise: f64,

    pub dt: f64,
    pub scheme: Scheme,
    pub divergence_bound: f64,
    pub stride: usize,
    pub x1_init: f64,
    pub x2_init: f64,

    pub bit_duration: f64,
    pub transient: f64,
    /// Flat bit list, grouped by the gate's arity.
    pub bits: Option<Vec<u8>>,
    /// CSV program file, used when `bits` is unset.
    pub program: Option<PathBuf>,
    pub n_bits: usize,

    pub settle_fraction: f64,
    pub agreement_threshold: f64,
    pub xnor_band: f64,

    pub n_sets: usize,
    pub runs_per_set: usize,
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = CircuitParams::default();
        let i = IntegratorConfig::default();
        let t = Timing::default();
        let d = DecodeSettings::default();
        let s = SystemState::default();
        let plan = RunPlan::default();
        Self {
            gate: GateKind::Or,
            seed: 0,
            out: PathBuf::from("out"),
            a: p.a,
            b: p.b,
            nu: p.nu,
            beta: p.beta,
            omega: p.omega,
            bias: None,
            forcing: None,
            delta: None,
            noise: 0.0,
            dt: i.dt,
            scheme: i.scheme,
            divergence_bound: i.divergence_bound,
            stride: i.stride,
            x1_init: s.x1,
            x2_init: s.x2,
            bit_duration: t.bit_duration,
            transient: t.transient,
            bits: None,
            program: None,
            n_bits: plan.bits_per_run,
            settle_fraction: d.settle_fraction,
            agreement_threshold: d.agreement_threshold,
            xnor_band: XNOR_BAND_HALF_WIDTH,
            n_sets: plan.n_sets,
            runs_per_set: plan.n_runs_per_set,
            axis: Axis::Noise,
            from: 0.0,
            to: 1.0,
            points: 11,
            execution: Execution::default(),
        }
    }
}

/// Flags shared by every subcommand. Anything given here wins over the
/// config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, created if missing
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// or, and, nor, nand, xor, xnor, or3, and3, sr-high, sr-low (sr = sr-low)
    #[arg(long, global = true, value_name = "NAME")]
    pub gate: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true, value_name = "E")]
    pub bias: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true, value_name = "F")]
    pub forcing: Option<f64>,
    #[arg(long, global = true, value_name = "D")]
    pub noise: Option<f64>,
    #[arg(long, global = true, value_name = "DELTA")]
    pub delta: Option<f64>,
    #[arg(long, global = true, value_name = "T")]
    pub bit_duration: Option<f64>,
    /// Comma-separated bits, grouped by the gate's arity; may be empty
    #[arg(long, global = true, value_name = "LIST", allow_hyphen_values = true)]
    pub bits: Option<String>,
    /// Program CSV (`bit_index,ch1,ch2[,ch3]`)
    #[arg(long, global = true, value_name = "PATH")]
    pub program: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub n_bits: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub n_sets: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub runs_per_set: Option<usize>,
    /// Sweep axis: f or d
    #[arg(long, global = true)]
    pub axis: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Record every N-th step of the trajectory
    #[arg(long, global = true, value_name = "N")]
    pub stride: Option<usize>,
    /// Run trials one at a time
    #[arg(long, global = true)]
    pub sequential: bool,
}

pub fn parse_gate(name: &str) -> CliResult<GateKind> {
    match name.trim().to_ascii_lowercase().as_str() {
        "sr" => Ok(GateKind::SrLow),
        other => other.parse().map_err(CliError::from),
    }
}

pub fn parse_bits(list: &str) -> CliResult<Vec<u8>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(CliError::Config(format!("bit `{other}` is not 0 or 1"))),
        })
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Defaults, then the config file, then the flags.
    pub fn from_overrides(o: &Overrides) -> CliResult<Self> {
        let mut c = match &o.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if let Some(g) = &o.gate {
            c.gate = parse_gate(g)?;
        }
        if let Some(a) = &o.axis {
            c.axis = a.parse()?;
        }
        if let Some(b) = &o.bits {
            c.bits = Some(parse_bits(b)?);
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = o.$flag.clone() { c.$field = v.into(); })*
            };
        }
        set!(
            seed => seed, out => out, bias => bias, forcing => forcing, noise => noise, delta => delta,
            bit_duration => bit_duration, program => program, n_bits => n_bits, n_sets => n_sets,
            runs_per_set => runs_per_set, from => from, to => to, points => points, dt => dt, stride => stride,
        );
        if o.sequential {
            c.execution = Execution::Sequential;
        }
        Ok(c)
    }

    /// Fills the operating-point fields from the gate where unset.
    pub fn resolved(mut self) -> Self {
        let spec = GateSpec::canonical(self.gate);
        self.bias.get_or_insert(spec.operating_bias);
        self.forcing.get_or_insert(spec.operating_f);
        self.delta.get_or_insert(spec.operating_delta);
        self
    }

    pub fn gate_spec(&self) -> GateSpec {
        let mut spec = GateSpec::canonical(self.gate);
        if self.gate == GateKind::Xnor {
            spec.rule = DecodeRule::BandComplement {
                lo: -self.xnor_band,
                hi: self.xnor_band,
            };
        }
        spec.operating_bias = self.bias.unwrap_or(spec.operating_bias);
        spec.operating_f = self.forcing.unwrap_or(spec.operating_f);
        spec.operating_delta = self.delta.unwrap_or(spec.operating_delta);
        spec
    }

    pub fn params(&self) -> CircuitParams {
        let spec = self.gate_spec();
        CircuitParams {
            a: self.a,
            b: self.b,
            nu: self.nu,
            beta: self.beta,
            omega: self.omega,
            f: spec.operating_f,
            bias: spec.operating_bias,
            noise_d: self.noise,
            delta: spec.operating_delta,
        }
    }

    pub fn timing(&self) -> Timing {
        Timing {
            bit_duration: self.bit_duration,
            transient: self.transient,
        }
    }

    pub fn trial_settings(&self) -> TrialSettings {
        TrialSettings {
            integrator: IntegratorConfig {
                dt: self.dt,
                scheme: self.scheme,
                divergence_bound: self.divergence_bound,
                seed: 0,
                stride: self.stride,
            },
            decode: DecodeSettings {
                settle_fraction: self.settle_fraction,
                agreement_threshold: self.agreement_threshold,
            },
            timing: self.timing(),
            initial: SystemState::new(self.x1_init, self.x2_init, 0.0, 0.0),
        }
    }

    pub fn plan(&self) -> RunPlan {
        RunPlan {
            n_sets: self.n_sets,
            n_runs_per_set: self.runs_per_set,
            bits_per_run: self.n_bits,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params().validate()?;
        let settings = self.trial_settings();
        settings.validate()?;
        if !self.timing().aligned_with(self.dt) {
            return Err(CliError::Config(format!(
                "bit_duration {} and transient {} must be whole multiples of dt {}",
                self.bit_duration, self.transient, self.dt
            )));
        }
        if !(self.xnor_band > 0.0) {
            return Err(CliError::Config("xnor_band must be > 0".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
