//! Logic input waveforms.
//!
//! Each channel carries a random bit stream encoded as `-delta` (0) or
//! `+delta` (1). The channels are combined into a single square wave `I(t)`
//! that is held for one bit interval at a time and is zero during the
//! initial transient.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Relative slack when locating a bit edge, so that `t` values computed as
/// `k * dt` land in the right interval despite rounding.
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    /// `I1 + I2`
    Sum2,
    /// `I1 - I2`, the latch encoding.
    Diff2,
    /// `I1 + I2 + I3`
    Sum3,
}

impl Combiner {
    pub fn arity(self) -> usize {
        match self {
            Combiner::Sum2 | Combiner::Diff2 => 2,
            Combiner::Sum3 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub bit_duration: f64,
    /// Zero-input time before the first bit.
    pub transient: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self {
            bit_duration: 100.0,
            transient: 500.0,
        }
    }
}

impl Timing {
    pub fn validate(&self) -> Result<()> {
        if !(self.bit_duration > 0.0 && self.bit_duration.is_finite()) {
            return Err(Error::invalid(format!(
                "bit_duration = {} must be > 0",
                self.bit_duration
            )));
        }
        if !(self.transient >= 0.0 && self.transient.is_finite()) {
            return Err(Error::invalid(format!("transient = {} must be >= 0", self.transient)));
        }
        Ok(())
    }

    /// True when both the bit duration and the transient are whole numbers
    /// of steps of size `dt`.
    pub fn aligned_with(&self, dt: f64) -> bool {
        let whole = |v: f64| {
            let n = v / dt;
            (n - n.round()).abs() < 1e-6
        };
        whole(self.bit_duration) && whole(self.transient)
    }
}

pub fn encode_channel(bit: bool, delta: f64) -> f64 {
    if bit {
        delta
    } else {
        -delta
    }
}

pub fn combine(levels: &[f64], combiner: Combiner) -> Result<f64> {
    if levels.len() != combiner.arity() {
        return Err(Error::ArityMismatch {
            expected: combiner.arity(),
            got: levels.len(),
        });
    }
    Ok(match combiner {
        Combiner::Sum2 | Combiner::Sum3 => levels.iter().sum(),
        Combiner::Diff2 => levels[0] - levels[1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicProgram {
    /// One bit stream per channel, all of equal length.
    pub channels: Vec<Vec<bool>>,
    pub combiner: Combiner,
    pub delta: f64,
    pub timing: Timing,
}

impl LogicProgram {
    pub fn new(channels: Vec<Vec<bool>>, combiner: Combiner, delta: f64, timing: Timing) -> Result<Self> {
        if channels.len() != combiner.arity() {
            return Err(Error::ArityMismatch {
                expected: combiner.arity(),
                got: channels.len(),
            });
        }
        if channels.iter().any(|c| c.len() != channels[0].len()) {
            return Err(Error::invalid("all channels must have the same length"));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("delta = {delta} must be >= 0")));
        }
        timing.validate()?;
        Ok(Self {
            channels,
            combiner,
            delta,
            timing,
        })
    }

    /// Builds a program from per-bit input tuples.
    pub fn from_tuples(tuples: &[Vec<bool>], combiner: Combiner, delta: f64, timing: Timing) -> Result<Self> {
        let arity = combiner.arity();
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: bad.len(),
            });
        }
        let channels = (0..arity)
            .map(|c| tuples.iter().map(|t| t[c]).collect())
            .collect();
        Self::new(channels, combiner, delta, timing)
    }

    pub fn n_bits(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits() == 0
    }

    /// Input tuple of bit `k`.
    pub fn bit(&self, k: usize) -> Vec<bool> {
        self.channels.iter().map(|c| c[k]).collect()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        (0..self.n_bits()).map(|k| self.bit(k))
    }

    pub fn level(&self, k: usize) -> f64 {
        let levels: Vec<f64> = self.channels.iter().map(|c| encode_channel(c[k], self.delta)).collect();
        combine(&levels, self.combiner).expect("arity checked on construction")
    }

    /// `[start, end)` of bit `k`.
    pub fn bit_interval(&self, k: usize) -> (f64, f64) {
        let start = self.timing.transient + k as f64 * self.timing.bit_duration;
        (start, start + self.timing.bit_duration)
    }

    pub fn end_time(&self) -> f64 {
        self.timing.transient + self.n_bits() as f64 * self.timing.bit_duration
    }

    /// Index of the bit active at `t`, if `t` lies after the transient.
    pub fn bit_index_at(&self, t: f64) -> Option<usize> {
        let pos = (t - self.timing.transient) / self.timing.bit_duration + EDGE_EPS;
        if self.is_empty() || pos < 0.0 {
            return None;
        }
        Some((pos.floor() as usize).min(self.n_bits() - 1))
    }

    /// Zero-order-hold input level `I(t)`.
    pub fn sample_input(&self, t: f64) -> f64 {
        self.bit_index_at(t).map_or(0.0, |k| self.level(k))
    }

    /// Whether any bit asserts every channel of a latch program at once.
    pub fn has_forbidden_pairs(&self) -> bool {
        self.combiner == Combiner::Diff2 && self.tuples().any(|t| t[0] && t[1])
    }

    /// Writes `bit_index,ch1,ch2[,ch3]`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.channels.len()).map(|c| format!("ch{c}")).collect();
        writeln!(out, "bit_index,{}", header.join(","))?;
        for (k, tuple) in self.tuples().enumerate() {
            let row: Vec<&str> = tuple.iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(out, "{k},{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, combiner: Combiner, delta: f64, timing: Timing) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty program file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let columns: Vec<&str> = header.trim().split(',').collect();
        if columns.first() != Some(&"bit_index") || columns.len() != combiner.arity() + 1 {
            return Err(Error::Parse(format!("unexpected header `{}`", header.trim())));
        }
        let mut tuples = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != columns.len() {
                return Err(Error::Parse(format!("row {row}: expected {} fields", columns.len())));
            }
            if fields[0].parse::<usize>().ok() != Some(tuples.len()) {
                return Err(Error::Parse(format!("row {row}: bit_index out of sequence")));
            }
            let tuple = fields[1..]
                .iter()
                .map(|f| match *f {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Error::Parse(format!("row {row}: `{other}` is not a bit"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            tuples.push(tuple);
        }
        Self::from_tuples(&tuples, combiner, delta, timing)
    }
}

/// Uniformly random bits on every channel. Latch programs (`Diff2`) never
/// contain the forbidden `(1,1)` pair.
pub fn random_program(n_bits: usize, combiner: Combiner, seed: u64, delta: f64, timing: Timing) -> Result<LogicProgram> {
    if n_bits == 0 {
        return Err(Error::invalid("a random program needs at least one bit"));
    }
    let mut rng = rng_from_seed(seed);
    let arity = combiner.arity();
    let tuples: Vec<Vec<bool>> = (0..n_bits)
        .map(|_| loop {
            let tuple: Vec<bool> = (0..arity).map(|_| rng.random::<bool>()).collect();
            if !(combiner == Combiner::Diff2 && tuple[0] && tuple[1]) {
                break tuple;
            }
        })
        .collect();
    LogicProgram::from_tuples(&tuples, combiner, delta, timing)
}
