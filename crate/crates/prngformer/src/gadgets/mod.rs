//! Closed-form weight blocks: arithmetic units (product, ReLU,
//! selection, integer floor/mod) and Boolean operations (constant and
//! two-operand bitwise maps, shifts, wide-fanin gates). The compilers
//! assemble programs from these constructions; every block here is
//! testable on its own through the interpreter's layer evaluator.
//!
//! Two numeric facts make the blocks exact rather than approximate on
//! their integer domains. GeLU(x) = x·Φ(x) saturates in f64: for
//! x ≥ 40, Φ(x) rounds to exactly 1, and for x ≤ −40 the product
//! underflows to exactly 0, so GeLU(λz)/λ with λ = 128 is a bit-exact
//! ReLU whenever z is an integer multiple of 1/2 or zero. And attention
//! logits with gaps of 50 or more produce softmax weights that round to
//! exactly 1.0 on the selected position, with leakage below half an ulp.

pub mod boolean;
pub mod units;

pub use boolean::{build_binary_bool_layer, build_const_bool_layer, build_fanin_gate};
pub use units::{
    build_floor_div_unit, build_mod_unit, build_product_unit, build_relu_unit,
    build_selector_unit,
};

use std::collections::BTreeMap;

use crate::kernel::{layer_forward, FfnWeights, HeadWeights, LayerSpec};
use crate::matrix::Matrix;

/// GeLU argument scale inside ReLU-style units. 128·z clears the
/// saturation point 40 for every nonzero half-integer z, and dividing
/// by a power of two afterwards is exact.
pub(crate) const LAMBDA: f64 = 128.0;

/// Attention logit scale for position self-selection. With logits
/// B·p_i·p_j over prefix positions p_j ≤ p_i, the gap between j = i and
/// any other position is at least B = 64, so off-target softmax weights
/// are below e^{-64} ≈ 1.6e-28 and vanish into the target's ulp.
pub(crate) const SELECT_SCALE: f64 = 64.0;

/// Error budget recorded on blocks that are bit-exact on their integer
/// domain. Their only residues are softmax leakage (~1e-28 per prefix
/// position) and negative-side GeLU tails (~1e-220); both are absorbed
/// the moment they are added to an order-one value, so this budget is a
/// generous ceiling, not a measured error.
pub(crate) const EXACT_BUDGET: f64 = 1e-12;

/// √(2π): the reciprocal of the standard normal density at zero, which
/// sets the curvature of GeLU's even part and scales the product unit.
pub(crate) fn sqrt_2pi() -> f64 {
    (2.0 * std::f64::consts::PI).sqrt()
}

/// Largest power of two that is at most x. Requires x > 0.
pub(crate) fn pow2_at_most(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite());
    let mut p = 2f64.powi(x.log2().floor() as i32);
    while p > x {
        p /= 2.0;
    }
    while p * 2.0 <= x {
        p *= 2.0;
    }
    p
}

/// Smallest power of two that is at least x. Requires x > 0.
pub(crate) fn pow2_at_least(x: f64) -> f64 {
    let p = pow2_at_most(x);
    if p >= x {
        p
    } else {
        p * 2.0
    }
}

/// The gadget vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    /// f(a,b) ≈ ab on [−M, M]², hidden width 4.
    Product,
    /// ReLU via a single scaled GeLU.
    Relu,
    /// f(x, y, t) = x if t ≥ α else y, componentwise.
    Select,
    /// ⌊i/n⌋ on integers i ∈ [1, n²].
    FloorDiv,
    /// i mod n on integers i ∈ [1, n²].
    Mod,
    /// c ∧ φ for a compile-time constant c.
    ConstAnd,
    /// c ∨ φ.
    ConstOr,
    /// c ⊕ φ.
    ConstXor,
    /// ¬φ per bit.
    Not,
    /// φ ≪ k, zero fill.
    Shl,
    /// φ ≫ k, zero fill.
    Shr,
    /// x ∧ y per bit, both operands data-dependent.
    VarAnd,
    /// x ∨ y per bit.
    VarOr,
    /// x ⊕ y per bit, via the square-of-difference identity.
    VarXor,
    /// k-ary AND of Boolean channels.
    FaninAnd,
    /// k-ary OR of Boolean channels.
    FaninOr,
}

impl std::fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            GadgetKind::Product => "product",
            GadgetKind::Relu => "relu",
            GadgetKind::Select => "select",
            GadgetKind::FloorDiv => "floor_div",
            GadgetKind::Mod => "mod",
            GadgetKind::ConstAnd => "const_and",
            GadgetKind::ConstOr => "const_or",
            GadgetKind::ConstXor => "const_xor",
            GadgetKind::Not => "not",
            GadgetKind::Shl => "shl",
            GadgetKind::Shr => "shr",
            GadgetKind::VarAnd => "var_and",
            GadgetKind::VarOr => "var_or",
            GadgetKind::VarXor => "var_xor",
            GadgetKind::FaninAnd => "fanin_and",
            GadgetKind::FaninOr => "fanin_or",
        };
        f.write_str(name)
    }
}

/// One self-contained weight block: a short stack of layers plus the
/// names of its input and output channels, its error budget, and the
/// bookkeeping the composition calculus needs (a Lipschitz factor for
/// error propagation and a closed-form ceiling on weight magnitudes).
#[derive(Clone, Debug)]
pub struct GadgetBlock {
    pub kind: GadgetKind,
    pub layers: Vec<LayerSpec>,
    /// Channel index, by name, where each input is read.
    pub in_channels: BTreeMap<String, usize>,
    /// Channel index, by name, where each output lands after the last
    /// layer.
    pub out_channels: BTreeMap<String, usize>,
    /// Worst-case output error on the block's declared domain.
    pub eps_budget: f64,
    /// Bound on ‖f(u) − f(v)‖∞ / ‖u − v‖∞ over the declared input
    /// channels within the block's domain and saturation margins;
    /// pipelines bound end-to-end error by Σ epsᵢ·Lᵢ.
    pub lipschitz: f64,
    /// Stated ceiling on max |weight|, a closed form in the build
    /// parameters; construction and tests assert the actual maximum
    /// stays below it.
    pub max_weight_bound: f64,
    /// Human-readable construction tag for debugging dumps.
    pub tag: String,
}

impl GadgetBlock {
    pub fn d_in(&self) -> usize {
        self.layers.first().expect("blocks hold at least one layer").d_in
    }

    pub fn d_out(&self) -> usize {
        self.layers.last().expect("blocks hold at least one layer").d_out
    }

    /// Index of a named input channel. Panics on unknown names: channel
    /// names are compile-time constants, not data.
    pub fn channel(&self, name: &str) -> usize {
        *self
            .in_channels
            .get(name)
            .unwrap_or_else(|| panic!("{} block has no input channel {name:?}", self.kind))
    }

    /// Index of a named output channel.
    pub fn out_channel(&self, name: &str) -> usize {
        *self
            .out_channels
            .get(name)
            .unwrap_or_else(|| panic!("{} block has no output channel {name:?}", self.kind))
    }

    pub fn max_abs_weight(&self) -> f64 {
        let mut m: f64 = 0.0;
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

    fn assert_well_formed(&self) {
        assert!(!self.layers.is_empty());
        assert!(self.eps_budget > 0.0);
        let mut d = self.d_in();
        for layer in &self.layers {
            layer.validate().expect("gadget layer dimensions are consistent");
            assert_eq!(layer.d_in, d, "gadget layers chain");
            d = layer.d_out;
        }
        for (name, &c) in &self.in_channels {
            assert!(c < self.d_in(), "input channel {name} out of range");
        }
        for (name, &c) in &self.out_channels {
            assert!(c < self.d_out(), "output channel {name} out of range");
        }
        let actual = self.max_abs_weight();
        assert!(
            actual <= self.max_weight_bound,
            "{}: max |weight| {actual} exceeds stated bound {}",
            self.tag,
            self.max_weight_bound
        );
    }

    /// Evaluates the block on a single row holding the named inputs,
    /// with the position and constant-one channels (when declared)
    /// filled in automatically.
    pub fn eval(&self, inputs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        self.eval_at(0, inputs)
    }

    /// Like `eval`, but the real row sits after `junk_prefix` rows of
    /// deterministic garbage bits. Position-selective blocks must be
    /// unaffected by the prefix; this is how tests prove it.
    pub fn eval_at(&self, junk_prefix: usize, inputs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        let d = self.d_in();
        let pos = self.in_channels.get("position").copied();
        let one = self.in_channels.get("one").copied();
        let mut states: Vec<Vec<f64>> = Vec::with_capacity(junk_prefix + 1);
        for p in 0..junk_prefix {
            let mut row: Vec<f64> = (0..d).map(|c| ((p * 31 + c * 7 + 3) % 2) as f64).collect();
            if let Some(pc) = pos {
                row[pc] = (p + 1) as f64;
            }
            if let Some(oc) = one {
                row[oc] = 1.0;
            }
            states.push(row);
        }
        let mut row = vec![0.0; d];
        for &(name, v) in inputs {
            row[self.channel(name)] = v;
        }
        if let Some(pc) = pos {
            row[pc] = (junk_prefix + 1) as f64;
        }
        if let Some(oc) = one {
            row[oc] = 1.0;
        }
        states.push(row);
        for layer in &self.layers {
            states = layer_forward(layer, &states).expect("gadget layers evaluate");
        }
        let last = states.last().expect("at least one row");
        self.out_channels.iter().map(|(k, &c)| (k.clone(), last[c])).collect()
    }
}

/// Collects hidden units one at a time and produces the FFN matrices.
/// Callers pass final coefficients; no scaling is applied here.
pub(crate) struct FfnAssembler {
    d_ffn_in: usize,
    n_out: usize,
    w1: Vec<(usize, usize, f64)>,
    b1: Vec<f64>,
    w2: Vec<(usize, usize, f64)>,
}

impl FfnAssembler {
    pub(crate) fn new(d_ffn_in: usize, n_out: usize) -> Self {
        FfnAssembler { d_ffn_in, n_out, w1: Vec::new(), b1: Vec::new(), w2: Vec::new() }
    }

    /// Adds a hidden unit computing GeLU(Σ taps·channels + bias) and
    /// returns its index.
    pub(crate) fn unit(&mut self, taps: &[(usize, f64)], bias: f64) -> usize {
        let u = self.b1.len();
        self.b1.push(bias);
        for &(ch, c) in taps {
            assert!(ch < self.d_ffn_in, "tap channel {ch} out of range");
            if c != 0.0 {
                self.w1.push((ch, u, c));
            }
        }
        u
    }

    /// Routes a hidden unit to an output column with the given weight.
    pub(crate) fn emit(&mut self, unit: usize, out: usize, coeff: f64) {
        assert!(unit < self.b1.len() && out < self.n_out);
        self.w2.push((unit, out, coeff));
    }

    pub(crate) fn hidden(&self) -> usize {
        self.b1.len()
    }

    pub(crate) fn build(self) -> FfnWeights {
        if self.b1.is_empty() {
            return FfnWeights::vestigial(self.d_ffn_in);
        }
        let h = self.b1.len();
        FfnWeights {
            w1: Matrix::from_triplets(self.d_ffn_in, h, &self.w1),
            b1: self.b1,
            w2: Matrix::from_triplets(h, self.n_out, &self.w2),
        }
    }
}

/// A head whose softmax reads exactly the current position: logits are
/// B·p_i·p_j, maximized within the causal prefix at j = i with a gap of
/// at least B to every other position.
pub(crate) fn self_select_head(d_in: usize, pos: usize, w_v: Matrix, w_o: Matrix) -> HeadWeights {
    HeadWeights {
        w_q: Matrix::from_triplets(d_in, 1, &[(pos, 0, SELECT_SCALE)]),
        w_k: Matrix::from_triplets(d_in, 1, &[(pos, 0, 1.0)]),
        w_v,
        w_o,
    }
}

/// Appends to an assembler the two λ-scaled GeLU units whose difference
/// is the exact integer-domain indicator I[x ≥ p]: ReLU pairs at offsets
/// 3/4 and 1/4 below the threshold. Returns (upper, lower) unit indices;
/// emit them with coefficients (+2s/λ, −2s/λ) for an indicator scaled
/// by s.
pub(crate) fn add_indicator(f: &mut FfnAssembler, x_ch: usize, p: f64) -> (usize, usize) {
    let hi = f.unit(&[(x_ch, LAMBDA)], LAMBDA * (0.75 - p));
    let lo = f.unit(&[(x_ch, LAMBDA)], LAMBDA * (0.25 - p));
    (hi, lo)
}

/// Appends the unit pair for clean(x) = 2·[ReLU(x − 1/4) − ReLU(x − 3/4)]:
/// exactly 1.0 for x ∈ [3/4, 2), exactly 0 at 0, and at most ~1e-221 of
/// GeLU residue for |x| ≤ 1/4, so a channel carrying 1 ± eps with
/// eps ≤ 1/4 is re-snapped to a clean bit. Emit with (+2/λ, −2/λ).
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn add_cleanup(f: &mut FfnAssembler, x_ch: usize) -> (usize, usize) {
    let hi = f.unit(&[(x_ch, LAMBDA)], LAMBDA * -0.25);
    let lo = f.unit(&[(x_ch, LAMBDA)], LAMBDA * -0.75);
    (hi, lo)
}

/// Wraps heads and an FFN into a concatenation-mode layer, computing
/// the output width.
pub(crate) fn concat_layer(d_in: usize, heads: Vec<HeadWeights>, ffn: FfnWeights) -> LayerSpec {
    let d_attn = heads.first().map_or(0, HeadWeights::d_attn);
    let d_out = d_in + d_attn + ffn.w2.cols();
    LayerSpec { heads, ffn, residual_mode: crate::kernel::ResidualMode::Concat, d_in, d_out }
}

pub(crate) fn named(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|&(n, c)| (n.to_string(), c)).collect()
}
