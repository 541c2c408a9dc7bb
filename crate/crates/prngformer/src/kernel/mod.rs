//! Decoder-only transformer interpreter: causal attention with softmax,
//! GeLU feed-forward blocks, additive or concatenation residuals, token
//! embedding and readout, plus simulated mantissa quantization.
//!
//! The interpreter is deliberately small and deterministic: one code
//! path serves both full-sequence evaluation and incremental generation
//! with per-layer key/value caches, so the two agree bit for bit.

pub mod forward;
pub mod precision;
mod serialize;

pub use forward::{attention_forward, forward_states, generate, layer_forward, Generator};
pub use precision::{quantize, quantize_f64, PrecisionPolicy};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::tape::TapeToken;

/// Fraction of the readout threshold 0.5 that a value may approach
/// before generation refuses to round it: |value - 0.5| < 0.25 is an
/// error, not a silently rounded bit.
pub const READOUT_MARGIN: f64 = 0.25;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("low-margin output at step {step}, channel {channel}: value {value}")]
    LowMargin { step: usize, channel: usize, value: f64 },
    #[error("position {position} exceeds the program horizon of {max} positions")]
    Horizon { position: usize, max: usize },
    #[error("weight program serialization: {0}")]
    Serialize(String),
}

/// One attention head. w_q and w_k map a state row to d_k-dimensional
/// query and key vectors, w_v to a d_v-dimensional value, and w_o maps
/// the attended value back to the layer's attention output width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadWeights {
    pub w_q: Matrix,
    pub w_k: Matrix,
    pub w_v: Matrix,
    pub w_o: Matrix,
}

impl HeadWeights {
    pub fn d_k(&self) -> usize {
        self.w_q.cols()
    }

    pub fn d_v(&self) -> usize {
        self.w_v.cols()
    }

    pub fn d_attn(&self) -> usize {
        self.w_o.cols()
    }

    fn validate(&self, d_in: usize) -> Result<(), KernelError> {
        let fail = |msg: String| Err(KernelError::Dimension(msg));
        for (name, m) in [("w_q", &self.w_q), ("w_k", &self.w_k), ("w_v", &self.w_v)] {
            if m.rows() != d_in {
                return fail(format!("{name} has {} rows, layer input width is {d_in}", m.rows()));
            }
        }
        if self.w_q.cols() != self.w_k.cols() {
            return fail(format!(
                "query width {} and key width {} differ",
                self.w_q.cols(),
                self.w_k.cols()
            ));
        }
        if self.w_q.cols() == 0 {
            return fail("query width must be at least 1".into());
        }
        if self.w_o.rows() != self.w_v.cols() {
            return fail(format!(
                "w_o has {} rows, value width is {}",
                self.w_o.rows(),
                self.w_v.cols()
            ));
        }
        Ok(())
    }
}

/// GeLU feed-forward block: out = GeLU(x·w1 + b1)·w2 with no second
/// bias. w1: d_ffn_in × hidden, b1: hidden, w2: hidden × d_ffn_out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfnWeights {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
}

impl FfnWeights {
    pub fn hidden_width(&self) -> usize {
        self.w1.cols()
    }

    /// An FFN with one dead hidden unit and no output channels, for
    /// layers whose work is all in the attention heads.
    pub fn vestigial(d_ffn_in: usize) -> Self {
        FfnWeights {
            w1: Matrix::zeros(d_ffn_in, 1),
            b1: vec![0.0],
            w2: Matrix::zeros(1, 0),
        }
    }

    fn validate(&self, d_ffn_in: usize) -> Result<(), KernelError> {
        let fail = |msg: String| Err(KernelError::Dimension(msg));
        if self.w1.rows() != d_ffn_in {
            return fail(format!(
                "w1 has {} rows, feed-forward input width is {d_ffn_in}",
                self.w1.rows()
            ));
        }
        if self.w1.cols() < 1 {
            return fail("hidden width must be at least 1".into());
        }
        if self.b1.len() != self.w1.cols() {
            return fail(format!(
                "b1 holds {} entries, hidden width is {}",
                self.b1.len(),
                self.w1.cols()
            ));
        }
        if !self.b1.iter().all(|v| v.is_finite()) {
            return fail("b1 entries must be finite".into());
        }
        if self.w2.rows() != self.w1.cols() {
            return fail(format!(
                "w2 has {} rows, hidden width is {}",
                self.w2.rows(),
                self.w1.cols()
            ));
        }
        Ok(())
    }
}

/// How a layer merges its sublayer outputs back into the state row.
/// Add keeps the width fixed: row + attention, then + FFN. Concat
/// appends: (row ‖ attention ‖ FFN(row ‖ attention)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    Add,
    Concat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub heads: Vec<HeadWeights>,
    pub ffn: FfnWeights,
    pub residual_mode: ResidualMode,
    pub d_in: usize,
    pub d_out: usize,
}

impl LayerSpec {
    /// Width of the attention output: every head maps into the same
    /// d_attn channels and their outputs are summed; no heads means no
    /// attention channels (concat) or a zero contribution (add).
    pub fn d_attn(&self) -> usize {
        self.heads.first().map_or(0, HeadWeights::d_attn)
    }

    pub fn head_count(&self) -> usize {
        self.heads.len()
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let fail = |msg: String| Err(KernelError::Dimension(msg));
        if self.d_in < 1 {
            return fail("layer input width must be at least 1".into());
        }
        for (h, head) in self.heads.iter().enumerate() {
            head.validate(self.d_in)
                .map_err(|e| KernelError::Dimension(format!("head {h}: {e}")))?;
            if head.d_attn() != self.d_attn() {
                return fail(format!(
                    "head {h} maps to {} attention channels, head 0 to {}",
                    head.d_attn(),
                    self.d_attn()
                ));
            }
        }
        match self.residual_mode {
            ResidualMode::Concat => {
                let d_ffn_in = self.d_in + self.d_attn();
                self.ffn.validate(d_ffn_in)?;
                let want = d_ffn_in + self.ffn.w2.cols();
                if self.d_out != want {
                    return fail(format!(
                        "concat layer output width {} should be {want} \
                         (input {} + attention {} + feed-forward {})",
                        self.d_out,
                        self.d_in,
                        self.d_attn(),
                        self.ffn.w2.cols()
                    ));
                }
            }
            ResidualMode::Add => {
                if !self.heads.is_empty() && self.d_attn() != self.d_in {
                    return fail(format!(
                        "add layer attention width {} must equal input width {}",
                        self.d_attn(),
                        self.d_in
                    ));
                }
                self.ffn.validate(self.d_in)?;
                if self.ffn.w2.cols() != self.d_in {
                    return fail(format!(
                        "add layer feed-forward output width {} must equal input width {}",
                        self.ffn.w2.cols(),
                        self.d_in
                    ));
                }
                if self.d_out != self.d_in {
                    return fail(format!(
                        "add layer output width {} must equal input width {}",
                        self.d_out, self.d_in
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A complete compiled model: the layer stack, the readout map, and
/// free-form metadata recorded by the compiler (stage names, channel
/// indices, measured widths, the position horizon).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightProgram {
    /// Token payload width in bits.
    pub w: u32,
    pub layers: Vec<LayerSpec>,
    /// final width × (w+1): columns 0..w produce the output bits, column
    /// w the arrow flag, all read against the 0.5 threshold.
    pub readout: Matrix,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

pub const META_MAX_POSITIONS: &str = "max_positions";

impl WeightProgram {
    /// Embedding width: w bit channels, position, constant one, arrow flag.
    pub fn embed_width(&self) -> usize {
        self.w as usize + 3
    }

    /// Width of the state rows after the last layer.
    pub fn final_width(&self) -> usize {
        self.layers.last().map_or(self.embed_width(), |l| l.d_out)
    }

    /// Longest tape (prompt plus generated tokens) the program's
    /// position-threshold machinery supports, when the compiler recorded
    /// one.
    pub fn max_positions(&self) -> Option<usize> {
        self.meta.get(META_MAX_POSITIONS)?.as_u64().map(|v| v as usize)
    }

    pub fn set_max_positions(&mut self, max: usize) {
        self.meta
            .insert(META_MAX_POSITIONS.into(), serde_json::Value::from(max as u64));
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let fail = |msg: String| Err(KernelError::Dimension(msg));
        if self.w < 1 || self.w > 32 {
            return Err(KernelError::Domain(format!(
                "token width must be in [1, 32], got {}",
                self.w
            )));
        }
        let mut d = self.embed_width();
        for (l, layer) in self.layers.iter().enumerate() {
            layer
                .validate()
                .map_err(|e| KernelError::Dimension(format!("layer {l}: {e}")))?;
            if layer.d_in != d {
                return fail(format!(
                    "layer {l} expects input width {}, previous width is {d}",
                    layer.d_in
                ));
            }
            d = layer.d_out;
        }
        if self.readout.rows() != d {
            return fail(format!(
                "readout has {} rows, final width is {d}",
                self.readout.rows()
            ));
        }
        if self.readout.cols() != self.w as usize + 1 {
            return fail(format!(
                "readout has {} columns, needs w+1 = {}",
                self.readout.cols(),
                self.w + 1
            ));
        }
        Ok(())
    }

    /// Largest absolute weight across every matrix and bias.
    pub fn max_abs_weight(&self) -> f64 {
        let mut m: f64 = self.readout.max_abs();
        for layer in &self.layers {
            for h in &layer.heads {
                for w in [&h.w_q, &h.w_k, &h.w_v, &h.w_o] {
                    m = m.max(w.max_abs());
                }
            }
            m = m.max(layer.ffn.w1.max_abs());
            m = m.max(layer.ffn.w2.max_abs());
            for &b in &layer.ffn.b1 {
                m = m.max(b.abs());
            }
        }
        m
    }
}

/// Embeds one token at a 1-based position: w bits least significant
/// first, then the position, a constant 1, and the arrow flag. The
/// arrow's payload is all-zero bits with the flag set.
pub fn embed_token(token: TapeToken, position: usize, w: u32) -> Result<Vec<f64>, KernelError> {
    if position < 1 {
        return Err(KernelError::Domain("positions are 1-based".into()));
    }
    let mut row = vec![0.0; w as usize + 3];
    match token {
        TapeToken::Word(v) => {
            if w < 64 && v >= (1u64 << w) {
                return Err(KernelError::Domain(format!(
                    "token value {v} does not fit in {w} bits"
                )));
            }
            for b in 0..w {
                row[b as usize] = ((v >> b) & 1) as f64;
            }
        }
        TapeToken::Arrow => {
            row[w as usize + 2] = 1.0;
        }
    }
    row[w as usize] = position as f64;
    row[w as usize + 1] = 1.0;
    Ok(row)
}
