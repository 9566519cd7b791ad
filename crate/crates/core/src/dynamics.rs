//! Vector fields of the driven Murali-Lakshmanan-Chua circuit.
//!
//! Two algebraically equivalent forms are provided. [`drift_sccnn`] is the
//! two-cell state-controlled CNN form used by the integrator; [`drift_mlc`]
//! is the classic normalized circuit form with the three-segment Chua diode
//! characteristic [`h_pwl`], kept as an independent check of the weight
//! mapping in [`derive_weights`].
//!
//! The scalar drive `F` is always supplied by the caller, so both fields are
//! deterministic and pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensionless circuit parameters together with the drive settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Inner slope of the piecewise-linear characteristic.
    pub a: f64,
    /// Outer slope of the piecewise-linear characteristic.
    pub b: f64,
    /// Damping correction.
    pub nu: f64,
    /// Coupling between the two state variables.
    pub beta: f64,
    /// Angular frequency of the sinusoidal drive.
    pub omega: f64,
    /// Amplitude of the sinusoidal drive.
    pub f: f64,
    /// Constant bias `E`.
    pub bias: f64,
    /// Noise intensity `D` of the additive white noise.
    pub noise_d: f64,
    /// Amplitude of one encoded logic input.
    pub delta: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self {
            a: -1.02,
            b: -0.55,
            nu: 0.015,
            beta: 1.0,
            omega: 1.0,
            f: 0.0,
            bias: 0.0,
            noise_d: 0.0,
            delta: 0.2,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a,
            self.b,
            self.nu,
            self.beta,
            self.omega,
            self.f,
            self.bias,
            self.noise_d,
            self.delta,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("circuit parameters must be finite"));
        }
        if self.noise_d < 0.0 {
            return Err(Error::invalid(format!("noise_d = {} < 0", self.noise_d)));
        }
        if self.delta <= 0.0 {
            return Err(Error::invalid(format!("delta = {} must be > 0", self.delta)));
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid(format!("omega = {} must be > 0", self.omega)));
        }
        Ok(())
    }

    /// Deterministic part of the drive: `E + I + f sin(z)`.
    #[inline]
    pub fn deterministic_drive(&self, input_level: f64, phase: f64) -> f64 {
        self.bias + input_level + self.f * phase.sin()
    }
}

/// Cell weights of the two-cell SC-CNN realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SccnnWeights {
    pub a1: f64,
    pub s11: f64,
    pub s12: f64,
    pub s21: f64,
    pub s22: f64,
    pub i1: f64,
}

impl SccnnWeights {
    /// Weights for which the unforced drift vanishes identically, so only
    /// `F` moves `x2`. Used to check the noise increments in isolation.
    pub fn null_field() -> Self {
        Self {
            a1: 0.0,
            s11: 1.0,
            s12: 0.0,
            s21: 0.0,
            s22: 1.0,
            i1: 0.0,
        }
    }
}

/// Integrator state. The phase `z` is kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub x1: f64,
    pub x2: f64,
    pub z: f64,
    pub t: f64,
}

impl Default for SystemState {
    fn default() -> Self {
        Self {
            x1: 0.1,
            x2: 0.1,
            z: 0.0,
            t: 0.0,
        }
    }
}

impl SystemState {
    pub fn new(x1: f64, x2: f64, z: f64, t: f64) -> Self {
        Self { x1, x2, z, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.z.is_finite() && self.t.is_finite()
    }

    pub fn exceeds(&self, bound: f64) -> bool {
        !(self.x1.abs() <= bound && self.x2.abs() <= bound)
    }

    /// Phase wrapped into `[0, 2π)`, for export only.
    pub fn wrapped_phase(&self) -> f64 {
        self.z.rem_euclid(std::f64::consts::TAU)
    }
}

/// Time derivative of `(x1, x2, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub dx1: f64,
    pub dx2: f64,
    pub dz: f64,
}

pub fn derive_weights(params: &CircuitParams) -> SccnnWeights {
    SccnnWeights {
        a1: params.b - params.a,
        s11: 1.0 - params.b,
        s12: 1.0,
        s21: -params.beta,
        s22: 1.0 - params.beta * (1.0 + params.nu),
        i1: 0.0,
    }
}

/// Three-segment characteristic of the Chua diode.
#[inline]
pub fn h_pwl(x: f64, a: f64, b: f64) -> f64 {
    if x > 1.0 {
        b * x + (a - b)
    } else if x < -1.0 {
        b * x - (a - b)
    } else {
        a * x
    }
}

/// Saturating cell output `0.5 (|x + 1| - |x - 1|)`, evaluated as a clamp
/// so the result is exactly bounded by 1.
#[inline]
pub fn cnn_output(x1: f64) -> f64 {
    x1.clamp(-1.0, 1.0)
}

#[inline]
pub fn drift_sccnn(state: &SystemState, weights: &SccnnWeights, omega: f64, drive: f64) -> Rates {
    let SystemState { x1, x2, .. } = *state;
    Rates {
        dx1: -x1 + weights.a1 * cnn_output(x1) + weights.s11 * x1 + weights.s12 * x2 + weights.i1,
        dx2: -x2 + weights.s21 * x1 + weights.s22 * x2 + drive,
        dz: omega,
    }
}

pub fn drift_mlc(state: &SystemState, params: &CircuitParams, drive: f64) -> Rates {
    let (x, y) = (state.x1, state.x2);
    Rates {
        dx1: y - h_pwl(x, params.a, params.b),
        dx2: -params.beta * (1.0 + params.nu) * y - params.beta * x + drive,
        dz: params.omega,
    }
}
