//! Compilers from generator parameter sets and circuit netlists to weight
//! programs, plus the chain-of-thought tape grammar the Mersenne Twister
//! programs run on.

pub mod circuit;
pub mod lcg;
pub mod mt;

pub use circuit::{compile_circuit, random_netlist, CircuitNetlist, Gate, GateKind};
pub use lcg::{build_lcg_program, build_lcg_program_with_budget};
pub use mt::{build_mt_program, build_mt_program_with_options, encode_tape, MtCompileOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Total end-to-end error budget per output channel. Each compiled
/// pipeline splits its budget evenly across its gadget count, which leaves
/// the 0.25 readout margin with 2.5x headroom.
pub const DEFAULT_EPS_BUDGET: f64 = 0.1;

/// Largest modulus the LCG compiler accepts by default; the remainder
/// lookup in the single feed-forward layer grows quadratically with `m`.
pub const LCG_MODULUS_LIMIT: u64 = 256;

/// Default generation horizon (in tape blocks) compiled into Mersenne
/// Twister programs. Position-threshold gadgets are finite, so a program
/// knows how far it can run; the limit is a compile-time knob.
pub const DEFAULT_MAX_BLOCKS: usize = 256;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("modulus {m} exceeds the configured remainder-gadget domain (limit {limit})")]
    ModulusTooLarge { m: u64, limit: u64 },
    #[error("invalid circuit netlist: {0}")]
    InvalidNetlist(String),
    #[error("eps budget must be positive and below 0.25, got {0}")]
    BadBudget(f64),
}

pub(crate) fn word_mask(w: u32) -> u64 {
    debug_assert!(w >= 1 && w <= 63);
    (1u64 << w) - 1
}

pub(crate) fn program_meta(
    pairs: &[(&str, serde_json::Value)],
) -> std::collections::BTreeMap<String, serde_json::Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Linear congruential generator parameters: x' = (a*x + c) mod m,
/// emitted as w-bit tokens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LcgSpecRepr")]
pub struct LcgSpec {
    pub a: u64,
    pub c: u64,
    pub m: u64,
    pub x0: u64,
    pub w: u32,
}

#[derive(Deserialize)]
struct LcgSpecRepr {
    a: u64,
    c: u64,
    m: u64,
    x0: u64,
    #[serde(default)]
    w: Option<u32>,
    #[serde(default)]
    kind: Option<String>,
}

impl TryFrom<LcgSpecRepr> for LcgSpec {
    type Error = String;

    fn try_from(r: LcgSpecRepr) -> Result<Self, String> {
        if let Some(k) = &r.kind {
            if k != "lcg" {
                return Err(format!("expected kind \"lcg\", got \"{k}\""));
            }
        }
        let w = r.w.unwrap_or_else(|| bits_for(r.m));
        let spec = LcgSpec { a: r.a, c: r.c, m: r.m, x0: r.x0, w };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Smallest w with 2^w >= m.
fn bits_for(m: u64) -> u32 {
    let mut w = 1;
    while (w < 63) && (1u64 << w) < m {
        w += 1;
    }
    w
}

impl LcgSpec {
    pub fn new(a: u64, c: u64, m: u64, x0: u64) -> Result<Self, CompileError> {
        let spec = LcgSpec { a, c, m, x0, w: bits_for(m) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        let fail = |msg: String| Err(CompileError::InvalidSpec(msg));
        if self.m < 2 {
            return fail(format!("modulus must be at least 2, got {}", self.m));
        }
        if self.w < 1 || self.w > 32 {
            return fail(format!("word width must be in [1, 32], got {}", self.w));
        }
        if (self.w as u64) < 64 && self.m > (1u64 << self.w) {
            return fail(format!("modulus {} does not fit in {} bits", self.m, self.w));
        }
        if self.a >= self.m || self.c >= self.m {
            return fail(format!(
                "multiplier {} and increment {} must be below the modulus {}",
                self.a, self.c, self.m
            ));
        }
        if self.x0 >= self.m {
            return fail(format!("seed {} must be below the modulus {}", self.x0, self.m));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        serde_json::from_str(text).map_err(|e| CompileError::InvalidSpec(e.to_string()))
    }
}

/// Initial-state convention for a Mersenne Twister spec: either the n
/// state words written out, or a single seed word expanded by the standard
/// multiplier-1812433253 initializer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MtSeed {
    Standard { seed: u64 },
    State { state: Vec<u64> },
}

/// Generic Mersenne Twister parameters. The MT19937-32 values are
/// (w=32, n=624, m=397, r=31, a=0x9908B0DF, u=11, s=7, b=0x9D2C5680,
/// t=15, c_mask=0xEFC60000, l=18).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtSpec {
    pub w: u32,
    pub n: usize,
    pub m: usize,
    pub r: u32,
    pub a: u64,
    pub u: u32,
    pub s: u32,
    pub b: u64,
    pub t: u32,
    pub c_mask: u64,
    pub l: u32,
    #[serde(flatten)]
    pub seed: MtSeed,
}

impl MtSpec {
    pub fn validate(&self) -> Result<(), CompileError> {
        let fail = |msg: String| Err(CompileError::InvalidSpec(msg));
        if self.w < 2 || self.w > 32 {
            return fail(format!("word width must be in [2, 32], got {}", self.w));
        }
        if self.n < 2 {
            return fail(format!("state length must be at least 2, got {}", self.n));
        }
        if self.m < 1 || self.m >= self.n {
            return fail(format!(
                "middle offset must lie in [1, {}), got {}",
                self.n, self.m
            ));
        }
        if self.r > self.w {
            return fail(format!("split bit must lie in [0, {}], got {}", self.w, self.r));
        }
        let mask = word_mask(self.w);
        for (name, v) in [("a", self.a), ("b", self.b), ("c_mask", self.c_mask)] {
            if v > mask {
                return fail(format!("constant {name} = {v:#x} does not fit in {} bits", self.w));
            }
        }
        for (name, v) in [("u", self.u), ("s", self.s), ("t", self.t), ("l", self.l)] {
            if v < 1 || v >= self.w {
                return fail(format!("shift {name} must lie in [1, {}), got {v}", self.w));
            }
        }
        if let MtSeed::State { state } = &self.seed {
            if state.len() != self.n {
                return fail(format!(
                    "explicit state holds {} words, spec needs {}",
                    state.len(),
                    self.n
                ));
            }
            if let Some(bad) = state.iter().find(|&&v| v > mask) {
                return fail(format!("state word {bad:#x} does not fit in {} bits", self.w));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        let spec: MtSpec =
            serde_json::from_str(text).map_err(|e| CompileError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// The small test spec used throughout the suite: one byte of state
    /// word, four words, standard-shape tempering constants.
    pub fn small() -> Self {
        MtSpec {
            w: 8,
            n: 4,
            m: 2,
            r: 3,
            a: 0x9D,
            u: 3,
            s: 2,
            b: 0x68,
            t: 4,
            c_mask: 0xC0,
            l: 5,
            seed: MtSeed::Standard { seed: 5489 },
        }
    }

    /// A mid-size spec (half-width words, sixteen-word state) used where
    /// the full MT19937 state would be too slow to drive end to end.
    pub fn w16() -> Self {
        MtSpec {
            w: 16,
            n: 16,
            m: 5,
            r: 8,
            a: 0xB5A1,
            u: 5,
            s: 3,
            b: 0x6CA4,
            t: 7,
            c_mask: 0xC530,
            l: 9,
            seed: MtSeed::Standard { seed: 5489 },
        }
    }

    /// The standard MT19937-32 parameter set.
    pub fn mt19937(seed: u64) -> Self {
        MtSpec {
            w: 32,
            n: 624,
            m: 397,
            r: 31,
            a: 0x9908_B0DF,
            u: 11,
            s: 7,
            b: 0x9D2C_5680,
            t: 15,
            c_mask: 0xEFC6_0000,
            l: 18,
            seed: MtSeed::Standard { seed },
        }
    }
}
