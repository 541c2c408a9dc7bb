//! Arithmetic precision control. Exact mode leaves IEEE doubles alone;
//! quantized mode rounds every stored weight and every intermediate
//! result to a reduced mantissa, which models running the same program
//! on lower-precision hardware.

use serde::{Deserialize, Serialize};

use super::{KernelError, WeightProgram};
use crate::matrix::Matrix;

/// Smallest mantissa width the quantized mode accepts.
pub const MIN_MANTISSA_BITS: u32 = 4;
/// Full IEEE double fraction width; quantizing to it is the identity.
pub const MAX_MANTISSA_BITS: u32 = 52;

/// How arithmetic is rounded during forward evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PrecisionPolicy {
    /// Ordinary f64 arithmetic, no extra rounding.
    ExactDouble,
    /// Every intermediate is rounded to this many explicit fraction
    /// bits (round half to even), emulating a shorter mantissa.
    Quantized { mantissa_bits: u32 },
}

impl PrecisionPolicy {
    pub fn validate(&self) -> Result<(), KernelError> {
        if let PrecisionPolicy::Quantized { mantissa_bits } = self {
            if !(MIN_MANTISSA_BITS..=MAX_MANTISSA_BITS).contains(mantissa_bits) {
                return Err(KernelError::Domain(format!(
                    "mantissa_bits must lie in [{MIN_MANTISSA_BITS}, {MAX_MANTISSA_BITS}], got {mantissa_bits}"
                )));
            }
        }
        Ok(())
    }
}

/// Rounds one double to `mantissa_bits` explicit fraction bits, half to
/// even. Zeros, infinities, and NaNs pass through unchanged; negative
/// values round by magnitude, so the map is odd. Rounding a value whose
/// kept fraction is all ones carries into the exponent, which is the
/// correct rounded result.
pub fn quantize_f64(v: f64, mantissa_bits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() || mantissa_bits >= 52 {
        return v;
    }
    let drop = 52 - mantissa_bits;
    let bits = v.to_bits();
    let sign = bits & (1u64 << 63);
    let mag = bits & !(1u64 << 63);
    let mask = (1u64 << drop) - 1;
    let frac = mag & mask;
    let floor = mag & !mask;
    let half = 1u64 << (drop - 1);
    let round_up = frac > half || (frac == half && (floor >> drop) & 1 == 1);
    let rounded = if round_up { floor + (1u64 << drop) } else { floor };
    f64::from_bits(sign | rounded)
}

/// Applies the policy's rounding to every stored weight of a program:
/// all attention matrices, feed-forward weights and biases, and the
/// readout. Exact mode returns an identical copy.
pub fn quantize(program: &WeightProgram, policy: PrecisionPolicy) -> Result<WeightProgram, KernelError> {
    policy.validate()?;
    let bits = match policy {
        PrecisionPolicy::ExactDouble => return Ok(program.clone()),
        PrecisionPolicy::Quantized { mantissa_bits } => mantissa_bits,
    };
    let qm = |m: &Matrix| m.map(|v| quantize_f64(v, bits));
    let mut out = program.clone();
    for layer in out.layers.iter_mut() {
        for head in layer.heads.iter_mut() {
            head.w_q = qm(&head.w_q);
            head.w_k = qm(&head.w_k);
            head.w_v = qm(&head.w_v);
            head.w_o = qm(&head.w_o);
        }
        layer.ffn.w1 = qm(&layer.ffn.w1);
        layer.ffn.w2 = qm(&layer.ffn.w2);
        for b in layer.ffn.b1.iter_mut() {
            let q = quantize_f64(*b, bits);
            *b = if q == 0.0 { 0.0 } else { q };
        }
    }
    out.readout = qm(&out.readout);
    Ok(out)
}

/// Rounding hook used by the forward pass: a no-op in exact mode.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rounder {
    bits: Option<u32>,
}

impl Rounder {
    pub(crate) fn new(policy: PrecisionPolicy) -> Self {
        Rounder {
            bits: match policy {
                PrecisionPolicy::ExactDouble => None,
                PrecisionPolicy::Quantized { mantissa_bits } => Some(mantissa_bits),
            },
        }
    }

    pub(crate) fn exact() -> Self {
        Rounder { bits: None }
    }

    #[inline]
    pub(crate) fn r(&self, x: f64) -> f64 {
        match self.bits {
            None => x,
            Some(b) => quantize_f64(x, b),
        }
    }

    pub(crate) fn rv(&self, v: &mut [f64]) {
        if let Some(b) = self.bits {
            for x in v.iter_mut() {
                *x = quantize_f64(*x, b);
            }
        }
    }
}
