//! Fixed-step integration of the driven circuit.
//!
//! The deterministic drift is advanced with classical RK4, the drive
//! `E + I + f sin(z)` being re-evaluated at every stage while the logic input
//! `I` is held for the whole step. When `D > 0` an Euler-Maruyama increment
//! `sqrt(D dt) g` is added to `x2` after the RK4 update.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::{derive_weights, drift_sccnn, CircuitParams, Rates, SccnnWeights, SystemState};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// RK4 on the drift; noise is ignored.
    Rk4,
    /// RK4 on the drift plus additive Euler-Maruyama noise on `x2`.
    #[default]
    Rk4Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub divergence_bound: f64,
    pub seed: u64,
    /// Record every `stride`-th step.
    pub stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            scheme: Scheme::Rk4Noise,
            divergence_bound: 1e3,
            seed: 0,
            stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.divergence_bound > 1.0) {
            return Err(Error::invalid(format!(
                "divergence_bound = {} must be > 1",
                self.divergence_bound
            )));
        }
        if self.stride == 0 {
            return Err(Error::invalid("stride must be >= 1"));
        }
        Ok(())
    }

    fn noisy(&self, params: &CircuitParams) -> bool {
        self.scheme == Scheme::Rk4Noise && params.noise_d > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    /// Logic input level active at `t`.
    pub input: f64,
    /// `E + I + f sin(z)` at `t`.
    pub drive: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Writes `t,x1,x2,I,F_det` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x1,x2,I,F_det")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.x1, s.x2, s.input, s.drive
            )?;
        }
        Ok(())
    }
}

#[inline]
fn advance(s: &SystemState, r: &Rates, h: f64) -> SystemState {
    SystemState {
        x1: s.x1 + h * r.dx1,
        x2: s.x2 + h * r.dx2,
        z: s.z + h * r.dz,
        t: s.t + h,
    }
}

/// One RK4 (+ noise) step of length `config.dt`.
pub fn step<R: Rng + ?Sized>(
    state: &SystemState,
    params: &CircuitParams,
    weights: &SccnnWeights,
    input_level: f64,
    config: &IntegratorConfig,
    rng: &mut R,
) -> Result<SystemState> {
    let dt = config.dt;
    let field = |s: &SystemState| {
        drift_sccnn(s, weights, params.omega, params.deterministic_drive(input_level, s.z))
    };

    let k1 = field(state);
    let k2 = field(&advance(state, &k1, 0.5 * dt));
    let k3 = field(&advance(state, &k2, 0.5 * dt));
    let k4 = field(&advance(state, &k3, dt));

    let mut next = SystemState {
        x1: state.x1 + dt / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1),
        x2: state.x2 + dt / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2),
        z: state.z + params.omega * dt,
        t: state.t + dt,
    };

    if config.noisy(params) {
        let g: f64 = rng.sample(StandardNormal);
        next.x2 += (params.noise_d * dt).sqrt() * g;
    }

    if next.exceeds(config.divergence_bound) {
        return Err(Error::Diverged {
            t: next.t,
            x1: next.x1,
            x2: next.x2,
        });
    }
    Ok(next)
}

/// Integrates from `initial` to `t_end`, sampling the logic input from
/// `drive` at the start of every step.
pub fn integrate(
    initial: SystemState,
    params: &CircuitParams,
    drive: impl Fn(f64) -> f64,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_with_weights(initial, params, &derive_weights(params), drive, t_end, config)
}

/// As [`integrate`] but with explicit cell weights.
pub fn integrate_with_weights(
    initial: SystemState,
    params: &CircuitParams,
    weights: &SccnnWeights,
    drive: impl Fn(f64) -> f64,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    if !initial.is_finite() {
        return Err(Error::invalid("initial state must be finite"));
    }
    if !(t_end > initial.t) {
        return Err(Error::invalid(format!(
            "t_end = {t_end} must exceed the initial time {}",
            initial.t
        )));
    }

    let n_steps = ((t_end - initial.t) / config.dt).round() as usize;
    let mut rng = rng_from_seed(config.seed);
    let mut samples = Vec::with_capacity(n_steps / config.stride + 1);
    let record = |s: &SystemState, input: f64| Sample {
        t: s.t,
        x1: s.x1,
        x2: s.x2,
        input,
        drive: params.deterministic_drive(input, s.z),
    };

    let mut state = initial;
    for k in 0..n_steps {
        let input = drive(state.t);
        if k % config.stride == 0 {
            samples.push(record(&state, input));
        }
        state = step(&state, params, weights, input, config, &mut rng)?;
        // Time and phase come from the step count so they carry no
        // accumulated rounding.
        let elapsed = (k + 1) as f64 * config.dt;
        state.t = initial.t + elapsed;
        state.z = initial.z + params.omega * elapsed;
    }
    if n_steps.is_multiple_of(config.stride) {
        samples.push(record(&state, drive(state.t)));
    }
    Ok(Trajectory { samples })
}
