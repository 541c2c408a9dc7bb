//! Forward evaluation: causal attention, feed-forward blocks, residual
//! merging, autoregressive generation. One row-at-a-time code path
//! serves every entry point, so full-sequence evaluation and cached
//! incremental generation agree bit for bit by construction.

use super::precision::{PrecisionPolicy, Rounder};
use super::{
    embed_token, KernelError, LayerSpec, ResidualMode, WeightProgram, READOUT_MARGIN,
};
use crate::special::gelu;
use crate::tape::{Tape, TapeToken};

/// Softmax exponential with explicit underflow saturation: arguments
/// below the f64 exp underflow point return exactly 0.0, which the
/// value accumulation then skips. Keeping this in one place makes the
/// skip condition identical everywhere.
pub(crate) fn exp_sat(x: f64) -> f64 {
    if x < -745.5 {
        0.0
    } else {
        x.exp()
    }
}

/// Dot product skipping zero left-hand entries, always ascending by
/// dimension. The skip changes no finite result; it only avoids work on
/// sparse query vectors.
fn dot(q: &[f64], k: &[f64]) -> f64 {
    debug_assert_eq!(q.len(), k.len());
    let mut s = 0.0;
    for d in 0..q.len() {
        if q[d] != 0.0 {
            s += q[d] * k[d];
        }
    }
    s
}

/// Softmax over one causal row of logits, in place: subtract the row
/// maximum, exponentiate with saturation, normalize. Every entry lands
/// in [0, 1]; entries whose exponential underflowed are exactly 0.0.
pub(crate) fn softmax_row(logits: &mut [f64], rounder: &Rounder) {
    debug_assert!(!logits.is_empty());
    let mut m = f64::NEG_INFINITY;
    for &l in logits.iter() {
        if l > m {
            m = l;
        }
    }
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = rounder.r(exp_sat(*l - m));
        sum += *l;
    }
    let sum = rounder.r(sum);
    for l in logits.iter_mut() {
        *l = rounder.r(*l / sum);
    }
}

/// Per-head cache of the key and value rows of every position fed so far.
struct HeadState {
    keys: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

/// Per-layer incremental state.
struct LayerState {
    heads: Vec<HeadState>,
}

impl LayerState {
    fn new(layer: &LayerSpec) -> Self {
        LayerState {
            heads: layer
                .heads
                .iter()
                .map(|_| HeadState { keys: Vec::new(), values: Vec::new() })
                .collect(),
        }
    }
}

/// Appends the new row's key/value to the cache and returns the
/// attention output for that row (softmax over all cached positions,
/// which by construction are exactly the causal prefix).
fn attention_step(
    layer: &LayerSpec,
    state: &mut LayerState,
    row: &[f64],
    rounder: &Rounder,
) -> Vec<f64> {
    let d_attn = layer.d_attn();
    let mut attn = vec![0.0; d_attn];
    for (head, hs) in layer.heads.iter().zip(state.heads.iter_mut()) {
        let mut q = head.w_q.vecmat(row);
        rounder.rv(&mut q);
        let mut k = head.w_k.vecmat(row);
        rounder.rv(&mut k);
        let mut v = head.w_v.vecmat(row);
        rounder.rv(&mut v);
        hs.keys.push(k);
        hs.values.push(v);

        let scale = 1.0 / (head.d_k() as f64).sqrt();
        let mut probs: Vec<f64> = hs
            .keys
            .iter()
            .map(|kj| rounder.r(dot(&q, kj) * scale))
            .collect();
        softmax_row(&mut probs, rounder);

        let mut ctx = vec![0.0; head.d_v()];
        for (p, vj) in probs.iter().zip(hs.values.iter()) {
            if *p == 0.0 {
                continue;
            }
            for (c, x) in ctx.iter_mut().zip(vj.iter()) {
                *c += p * x;
            }
        }
        rounder.rv(&mut ctx);
        let mut out = head.w_o.vecmat(&ctx);
        rounder.rv(&mut out);
        for (a, o) in attn.iter_mut().zip(out.iter()) {
            *a += o;
        }
    }
    rounder.rv(&mut attn);
    attn
}

/// GeLU(x·w1 + b1)·w2 with the policy's rounding after the affine map,
/// the nonlinearity, and the output product.
fn ffn_eval(layer: &LayerSpec, ffn_in: &[f64], rounder: &Rounder) -> Vec<f64> {
    let mut pre = layer.ffn.w1.vecmat(ffn_in);
    for (p, b) in pre.iter_mut().zip(layer.ffn.b1.iter()) {
        *p += b;
    }
    rounder.rv(&mut pre);
    for p in pre.iter_mut() {
        *p = gelu(*p);
    }
    rounder.rv(&mut pre);
    let mut out = layer.ffn.w2.vecmat(&pre);
    rounder.rv(&mut out);
    out
}

/// Full layer step for one row: attention, residual merge, feed-forward.
fn layer_step(
    layer: &LayerSpec,
    state: &mut LayerState,
    row: &[f64],
    rounder: &Rounder,
) -> Vec<f64> {
    let attn = attention_step(layer, state, row, rounder);
    match layer.residual_mode {
        ResidualMode::Concat => {
            let mut ffn_in = Vec::with_capacity(row.len() + attn.len());
            ffn_in.extend_from_slice(row);
            ffn_in.extend_from_slice(&attn);
            let f = ffn_eval(layer, &ffn_in, rounder);
            ffn_in.extend_from_slice(&f);
            ffn_in
        }
        ResidualMode::Add => {
            let mut a: Vec<f64> = if layer.heads.is_empty() {
                row.to_vec()
            } else {
                row.iter().zip(attn.iter()).map(|(x, y)| x + y).collect()
            };
            rounder.rv(&mut a);
            let f = ffn_eval(layer, &a, rounder);
            for (ai, fi) in a.iter_mut().zip(f.iter()) {
                *ai += fi;
            }
            rounder.rv(&mut a);
            a
        }
    }
}

fn check_states(layer: &LayerSpec, states: &[Vec<f64>]) -> Result<(), KernelError> {
    layer.validate()?;
    if states.is_empty() {
        return Err(KernelError::Domain("state matrix must hold at least one row".into()));
    }
    for (i, row) in states.iter().enumerate() {
        if row.len() != layer.d_in {
            return Err(KernelError::Dimension(format!(
                "state row {i} has width {}, layer expects {}",
                row.len(),
                layer.d_in
            )));
        }
    }
    Ok(())
}

/// Causal multi-head attention over a full state matrix, exact doubles.
/// Row i of the result attends to input rows 1..=i only.
pub fn attention_forward(
    layer: &LayerSpec,
    states: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, KernelError> {
    check_states(layer, states)?;
    let rounder = Rounder::exact();
    let mut ls = LayerState::new(layer);
    Ok(states
        .iter()
        .map(|row| attention_step(layer, &mut ls, row, &rounder))
        .collect())
}

/// One full layer over a state matrix, exact doubles.
pub fn layer_forward(layer: &LayerSpec, states: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, KernelError> {
    check_states(layer, states)?;
    let rounder = Rounder::exact();
    let mut ls = LayerState::new(layer);
    Ok(states
        .iter()
        .map(|row| layer_step(layer, &mut ls, row, &rounder))
        .collect())
}

/// Incremental evaluator: feed tokens one at a time, read the final
/// state row or the decoded next token. generate() is a loop over this.
pub struct Generator<'a> {
    program: &'a WeightProgram,
    rounder: Rounder,
    states: Vec<LayerState>,
    positions: usize,
    last_row: Vec<f64>,
}

impl<'a> Generator<'a> {
    pub fn new(program: &'a WeightProgram, policy: PrecisionPolicy) -> Result<Self, KernelError> {
        program.validate()?;
        policy.validate()?;
        Ok(Generator {
            program,
            rounder: Rounder::new(policy),
            states: program.layers.iter().map(LayerState::new).collect(),
            positions: 0,
            last_row: Vec::new(),
        })
    }

    /// Number of positions fed so far.
    pub fn positions(&self) -> usize {
        self.positions
    }

    /// Final-layer state row of the most recently fed position.
    pub fn last_row(&self) -> &[f64] {
        &self.last_row
    }

    /// Embeds the token at the next position and runs it through every
    /// layer, updating the caches.
    pub fn feed(&mut self, token: TapeToken) -> Result<(), KernelError> {
        let position = self.positions + 1;
        if let Some(max) = self.program.max_positions() {
            if position > max {
                return Err(KernelError::Horizon { position, max });
            }
        }
        let mut row = embed_token(token, position, self.program.w)?;
        self.rounder.rv(&mut row);
        for (layer, state) in self.program.layers.iter().zip(self.states.iter_mut()) {
            row = layer_step(layer, state, &row, &self.rounder);
        }
        self.last_row = row;
        self.positions = position;
        Ok(())
    }

    /// Raw readout values (w bit channels then the arrow flag) for the
    /// most recently fed position.
    pub fn readout_values(&self) -> Result<Vec<f64>, KernelError> {
        if self.positions == 0 {
            return Err(KernelError::Domain("no position has been fed yet".into()));
        }
        let mut v = self.program.readout.vecmat(&self.last_row);
        self.rounder.rv(&mut v);
        Ok(v)
    }

    /// Decodes the next token from the readout: each channel is compared
    /// against 0.5, and any channel within 0.25 of the threshold is a
    /// low-margin error carrying the position the token was meant for.
    pub fn read_token(&self) -> Result<TapeToken, KernelError> {
        let values = self.readout_values()?;
        let step = self.positions + 1;
        for (channel, &value) in values.iter().enumerate() {
            if (value - 0.5).abs() < READOUT_MARGIN {
                return Err(KernelError::LowMargin { step, channel, value });
            }
        }
        let w = self.program.w as usize;
        if values[w] >= 0.5 {
            return Ok(TapeToken::Arrow);
        }
        let mut word = 0u64;
        for b in 0..w {
            if values[b] >= 0.5 {
                word |= 1 << b;
            }
        }
        Ok(TapeToken::Word(word))
    }

    /// Reads the next token and feeds it back in.
    pub fn emit_next(&mut self) -> Result<TapeToken, KernelError> {
        let token = self.read_token()?;
        self.feed(token)?;
        Ok(token)
    }
}

/// Final-layer state rows for every position of a token sequence.
pub fn forward_states(
    program: &WeightProgram,
    tokens: &[TapeToken],
    policy: PrecisionPolicy,
) -> Result<Vec<Vec<f64>>, KernelError> {
    let mut gen = Generator::new(program, policy)?;
    let mut rows = Vec::with_capacity(tokens.len());
    for &t in tokens {
        gen.feed(t)?;
        rows.push(gen.last_row().to_vec());
    }
    Ok(rows)
}

/// Autoregressive generation: runs the prompt through the program, then
/// appends `steps` decoded tokens. Deterministic; identical inputs give
/// identical tapes.
pub fn generate(
    program: &WeightProgram,
    prompt: &Tape,
    steps: usize,
    policy: PrecisionPolicy,
) -> Result<Tape, KernelError> {
    if prompt.is_empty() {
        return Err(KernelError::Domain("prompt must hold at least one token".into()));
    }
    let mut gen = Generator::new(program, policy)?;
    for &t in &prompt.tokens {
        gen.feed(t)?;
    }
    let mut out = prompt.clone();
    for _ in 0..steps {
        out.push(gen.emit_next()?);
    }
    Ok(out)
}
