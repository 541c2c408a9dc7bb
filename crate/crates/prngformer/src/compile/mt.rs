//! Compiler from Mersenne Twister parameters to a weight program that
//! walks a chain-of-thought tape: each block prints the output word
//! followed by the refreshed state window and a trailing arrow.
//!
//! The compiled program has ten physical layers. Layers 1-3 derive, from
//! the position alone, the block number B, the cyclic state indices
//! t0 = (B−1) mod n, t1 = B mod n, tm = (B−1+m) mod n, the in-block slot
//! (judge), per-position storage coordinates (sb, sidx) with their square
//! sum, and the output-selection flags. Layer 4 carries four attention
//! heads that fetch the bit vectors of x[t0], x[t1], x[tm], and the
//! state word being copied, by matching storage coordinates: queries are
//! centered so the matching key scores exactly zero and every other key
//! at least 64 below, which drives the softmax to an exact one-hot.
//! Layer 5 forms the twist word z bit by bit, layers 6-9 the four
//! tempering substitutions, and layer 10 picks y, z, the copied word, or
//! the arrow according to the slot.
//!
//! Everything is built from two integer-exact primitives over GeLU:
//!
//!   step(v ≥ p)  = [R(64(v−p+1)) − R(64(v−p))] / 64   (ramp pair)
//!   parity(s)    = s − 2·step(s ≥ 2)  for s = Σ bits ≤ 3
//!
//! whose hidden activations on integer inputs are exactly 0 or saturated
//! multiples of 64, so the whole forward pass is carried out in small
//! dyadic numbers. That keeps the program bit-exact not only in f64 but
//! under aggressive mantissa quantization, as long as the position range
//! and block count keep every intermediate's odd part within the
//! quantized significand.

use std::collections::BTreeMap;

use super::{program_meta, CompileError, MtSpec, DEFAULT_MAX_BLOCKS};
use crate::gadgets::{concat_layer, FfnAssembler};
use crate::kernel::{HeadWeights, LayerSpec, WeightProgram};
use crate::matrix::Matrix;
use crate::oracle::{mt_next, mt_seed};
use crate::tape::{Tape, TapeToken};

/// Saturating scale for the integer ramps; arguments land on 0 or
/// multiples of 64, both of which GeLU reproduces exactly.
const RAMP: f64 = 64.0;

/// Fetch-head query scale before the 1/√d_k division; d_k = 4 makes the
/// divisor exactly 2, so a mismatch at squared distance 1 scores 64
/// below the match and its softmax weight is below e^{-64}.
const FETCH: f64 = 128.0;

pub struct MtCompileOptions {
    pub eps_budget: f64,
    pub max_blocks: usize,
}

impl Default for MtCompileOptions {
    fn default() -> Self {
        MtCompileOptions {
            eps_budget: super::DEFAULT_EPS_BUDGET,
            max_blocks: DEFAULT_MAX_BLOCKS,
        }
    }
}

/// Channel ledger for the growing residual stream: every layer appends
/// its attention block and FFN outputs, and downstream layers tap
/// earlier channels by name.
struct Wiring {
    d: usize,
    names: BTreeMap<String, usize>,
    layers: Vec<LayerSpec>,
    hidden: Vec<usize>,
}

impl Wiring {
    fn new(w: u32) -> Self {
        let wz = w as usize;
        let mut names = BTreeMap::new();
        for b in 0..wz {
            names.insert(format!("bit{b}"), b);
        }
        names.insert("pos".to_string(), wz);
        names.insert("one".to_string(), wz + 1);
        names.insert("flag".to_string(), wz + 2);
        Wiring { d: wz + 3, names, layers: Vec::new(), hidden: Vec::new() }
    }

    fn ch(&self, name: &str) -> usize {
        *self.names.get(name).unwrap_or_else(|| panic!("unknown channel {name}"))
    }

    /// Appends one concat layer. `attn_names` label the attention block
    /// channels in order, `ffn_names` the FFN output channels.
    fn push(
        &mut self,
        heads: Vec<HeadWeights>,
        f: FfnAssembler,
        attn_names: &[String],
        ffn_names: &[String],
    ) {
        let d_attn = heads.first().map_or(0, HeadWeights::d_attn);
        assert_eq!(d_attn, attn_names.len(), "attention labels must cover the block");
        for (k, name) in attn_names.iter().enumerate() {
            let prev = self.names.insert(name.clone(), self.d + k);
            assert!(prev.is_none(), "channel {name} already defined");
        }
        for (k, name) in ffn_names.iter().enumerate() {
            let prev = self.names.insert(name.clone(), self.d + d_attn + k);
            assert!(prev.is_none(), "channel {name} already defined");
        }
        self.hidden.push(f.hidden());
        let layer = concat_layer(self.d, heads, f.build());
        assert_eq!(layer.ffn.w2.cols(), ffn_names.len(), "FFN labels must cover the outputs");
        self.d = layer.d_out;
        self.layers.push(layer);
    }

    fn push_ffn(&mut self, f: FfnAssembler, ffn_names: &[String]) {
        self.push(Vec::new(), f, &[], ffn_names);
    }
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|b| format!("{prefix}{b}")).collect()
}

/// Ramp pair computing step(v ≥ p) for the integer linear form
/// v = Σ taps; the indicator's value is (hi − lo)/64.
fn ramp_pair(f: &mut FfnAssembler, taps: &[(usize, f64)], p: f64) -> (usize, usize) {
    let scaled: Vec<(usize, f64)> = taps.iter().map(|&(c, w)| (c, RAMP * w)).collect();
    let hi = f.unit(&scaled, RAMP * (1.0 - p));
    let lo = f.unit(&scaled, RAMP * (-p));
    (hi, lo)
}

fn emit_step(f: &mut FfnAssembler, pair: (usize, usize), out: usize, coeff: f64) {
    f.emit(pair.0, out, coeff / RAMP);
    f.emit(pair.1, out, -coeff / RAMP);
}

/// Saturated pass-through of a non-negative integer-valued linear form.
fn identity_unit(f: &mut FfnAssembler, taps: &[(usize, f64)]) -> usize {
    let scaled: Vec<(usize, f64)> = taps.iter().map(|&(c, w)| (c, RAMP * w)).collect();
    f.unit(&scaled, 0.0)
}

fn emit_identity(f: &mut FfnAssembler, unit: usize, out: usize, coeff: f64) {
    f.emit(unit, out, coeff / RAMP);
}

/// XOR of up to three exact bits: parity(s) = s − 2·step(s ≥ 2).
fn emit_parity(f: &mut FfnAssembler, bit_channels: &[usize], out: usize) {
    let taps: Vec<(usize, f64)> = bit_channels.iter().map(|&c| (c, 1.0)).collect();
    assert!((1..=3).contains(&taps.len()), "parity fan-in must be 1..=3");
    let s = identity_unit(f, &taps);
    emit_identity(f, s, out, 1.0);
    if taps.len() >= 2 {
        let pair = ramp_pair(f, &taps, 2.0);
        emit_step(f, pair, out, -2.0);
    }
}

pub fn build_mt_program(spec: &MtSpec) -> Result<WeightProgram, CompileError> {
    build_mt_program_with_options(spec, &MtCompileOptions::default())
}

pub fn build_mt_program_with_options(
    spec: &MtSpec,
    options: &MtCompileOptions,
) -> Result<WeightProgram, CompileError> {
    spec.validate()?;
    if !(options.eps_budget > 0.0 && options.eps_budget < 0.25) {
        return Err(CompileError::BadBudget(options.eps_budget));
    }
    if options.max_blocks < 1 {
        return Err(CompileError::InvalidSpec("horizon must cover at least one block".into()));
    }
    let w = spec.w;
    let wz = w as usize;
    let n = spec.n;
    let len_block = n + 2;
    let first_arrow = n + 1;
    let max_blocks = options.max_blocks;
    let nf = n as f64;
    let lf = len_block as f64;

    let mut wiring = Wiring::new(w);

    // Layer 1: block counter and cyclic indices, all step functions of
    // the position. Block b starts at its leading arrow, position
    // first_arrow + (b−1)·len_block; one shared ramp pair per block
    // feeds every counter through telescoped differences.
    {
        let pos = wiring.ch("pos");
        let one = wiring.ch("one");
        let mut f = FfnAssembler::new(wiring.d, 5);
        let (out_b, out_t0, out_t1, out_tm, out_judge) = (0, 1, 2, 3, 4);
        let idx = |b: i64| -> (f64, f64, f64) {
            if b < 1 {
                (0.0, 0.0, 0.0)
            } else {
                (
                    ((b - 1).rem_euclid(n as i64)) as f64,
                    (b.rem_euclid(n as i64)) as f64,
                    ((b - 1 + spec.m as i64).rem_euclid(n as i64)) as f64,
                )
            }
        };
        for b in 1..=max_blocks as i64 {
            let arrow_pos = first_arrow as f64 + (b - 1) as f64 * lf;
            let pair = ramp_pair(&mut f, &[(pos, 1.0)], arrow_pos);
            let (t0b, t1b, tmb) = idx(b);
            let (t0p, t1p, tmp) = idx(b - 1);
            emit_step(&mut f, pair, out_b, 1.0);
            emit_step(&mut f, pair, out_t0, t0b - t0p);
            emit_step(&mut f, pair, out_t1, t1b - t1p);
            emit_step(&mut f, pair, out_tm, tmb - tmp);
            emit_step(&mut f, pair, out_judge, -lf);
        }
        let pos_id = identity_unit(&mut f, &[(pos, 1.0)]);
        let one_id = identity_unit(&mut f, &[(one, 1.0)]);
        // judge = pos − first_arrow − (B−1)·len_block = pos + 1 − B·len_block.
        emit_identity(&mut f, pos_id, out_judge, 1.0);
        emit_identity(&mut f, one_id, out_judge, lf - first_arrow as f64);
        wiring.push_ffn(f, &["B".into(), "t0".into(), "t1".into(), "tm".into(), "judge".into()]);
    }

    // Layer 2: storage coordinates and output selectors. Position slots:
    // judge 0 is the arrow opening block B, judge 1 its output word,
    // judge j ∈ [2, n+1] its state word j−1. A position stores state
    // word sidx of block sb; arrows get the never-queried sidx n+1.
    {
        let one = wiring.ch("one");
        let b_ch = wiring.ch("B");
        let t0 = wiring.ch("t0");
        let judge = wiring.ch("judge");
        let mut f = FfnAssembler::new(wiring.d, 6);
        let (out_sb, out_sidx, out_y, out_z, out_copy, out_arrow) = (0, 1, 2, 3, 4, 5);
        let in_block = ramp_pair(&mut f, &[(judge, 1.0)], 1.0);
        let at_arrow = ramp_pair(&mut f, &[(judge, 1.0)], nf + 1.0);
        let d1 = ramp_pair(&mut f, &[(judge, 1.0), (t0, -1.0)], 1.0);
        let d2 = ramp_pair(&mut f, &[(judge, 1.0), (t0, -1.0)], 2.0);
        let b_id = identity_unit(&mut f, &[(b_ch, 1.0)]);
        let j_id = identity_unit(&mut f, &[(judge, 1.0)]);
        let one_id = identity_unit(&mut f, &[(one, 1.0)]);
        // sb = B − 1 + step(judge ≥ 1)
        emit_identity(&mut f, b_id, out_sb, 1.0);
        emit_identity(&mut f, one_id, out_sb, -1.0);
        emit_step(&mut f, in_block, out_sb, 1.0);
        // sidx = judge − 1 + (n+2)·(1 − step(judge ≥ 1))
        emit_identity(&mut f, j_id, out_sidx, 1.0);
        emit_identity(&mut f, one_id, out_sidx, nf + 1.0);
        emit_step(&mut f, in_block, out_sidx, -(nf + 2.0));
        // Emit y when the slot is the arrow (judge 0), z when the next
        // slot is the freshly twisted word (judge = t0 + 1), the copy for
        // every other state slot, and the arrow after the last word.
        emit_identity(&mut f, one_id, out_y, 1.0);
        emit_step(&mut f, in_block, out_y, -1.0);
        emit_step(&mut f, d1, out_z, 1.0);
        emit_step(&mut f, d2, out_z, -1.0);
        emit_step(&mut f, in_block, out_copy, 1.0);
        emit_step(&mut f, at_arrow, out_copy, -1.0);
        emit_step(&mut f, d1, out_copy, -1.0);
        emit_step(&mut f, d2, out_copy, 1.0);
        emit_step(&mut f, at_arrow, out_arrow, 1.0);
        wiring.push_ffn(
            f,
            &[
                "sb".into(),
                "sidx".into(),
                "sel_y".into(),
                "sel_z".into(),
                "sel_copy".into(),
                "sel_arrow".into(),
            ],
        );
    }

    // Layer 3: square sums via telescoping, v² = Σ_j (2j−1)·step(v ≥ j).
    // sq = sb² + sidx² keys this position; tq_f = tb² + tk_f² centers
    // fetch f's query so its matching logit is exactly zero.
    {
        let b_ch = wiring.ch("B");
        let sb = wiring.ch("sb");
        let sidx = wiring.ch("sidx");
        let mut f = FfnAssembler::new(wiring.d, 5);
        let (out_sq, out_tq) = (0usize, [1usize, 2, 3, 4]);
        for j in 1..=max_blocks {
            let pair = ramp_pair(&mut f, &[(sb, 1.0)], j as f64);
            emit_step(&mut f, pair, out_sq, (2 * j - 1) as f64);
        }
        for j in 1..=n + 1 {
            let pair = ramp_pair(&mut f, &[(sidx, 1.0)], j as f64);
            emit_step(&mut f, pair, out_sq, (2 * j - 1) as f64);
        }
        // tb = B − 1, so step(tb ≥ j) = step(B ≥ j+1); shared by all four.
        for j in 1..max_blocks {
            let pair = ramp_pair(&mut f, &[(b_ch, 1.0)], (j + 1) as f64);
            for out in out_tq {
                emit_step(&mut f, pair, out, (2 * j - 1) as f64);
            }
        }
        // tk_f = t0+1, t1+1, tm+1 ≤ n, and judge ≤ n+1 for the copy head.
        for (slot, name, offset, top) in [
            (0usize, "t0", 1i64, n),
            (1, "t1", 1, n),
            (2, "tm", 1, n),
            (3, "judge", 0, n + 1),
        ] {
            let ch = wiring.ch(name);
            for j in 1..=top as i64 {
                let pair = ramp_pair(&mut f, &[(ch, 1.0)], (j - offset) as f64);
                emit_step(&mut f, pair, out_tq[slot], (2 * j - 1) as f64);
            }
        }
        wiring.push_ffn(
            f,
            &["sq".into(), "tq0".into(), "tq1".into(), "tq2".into(), "tq3".into()],
        );
    }

    // Layer 4: the four fetch heads. Key (sb, sidx, sq, 1); query
    // centered so q·k = −FETCH·((sb−tb)² + (sidx−tk)²), which after the
    // 1/√4 logit scale puts the match at 0 and everything else at −64
    // or lower. The value path carries the token's bit channels, and
    // each head's output projection lands in its own block of four.
    {
        let d = wiring.d;
        let one = wiring.ch("one");
        let b_ch = wiring.ch("B");
        let sb = wiring.ch("sb");
        let sidx = wiring.ch("sidx");
        let sq = wiring.ch("sq");
        let mut heads = Vec::new();
        for (f_idx, (tk_name, offset)) in
            [("t0", 1.0), ("t1", 1.0), ("tm", 1.0), ("judge", 0.0)].iter().enumerate()
        {
            let tk = wiring.ch(tk_name);
            let tq = wiring.ch(&format!("tq{f_idx}"));
            let mut q = vec![
                (b_ch, 0, 2.0 * FETCH),
                (one, 0, -2.0 * FETCH),
                (tk, 1, 2.0 * FETCH),
                (one, 2, -FETCH),
                (tq, 3, -FETCH),
            ];
            if *offset != 0.0 {
                q.push((one, 1, 2.0 * FETCH * offset));
            }
            let w_q = Matrix::from_triplets(d, 4, &q);
            let w_k = Matrix::from_triplets(
                d,
                4,
                &[(sb, 0, 1.0), (sidx, 1, 1.0), (sq, 2, 1.0), (one, 3, 1.0)],
            );
            let v: Vec<(usize, usize, f64)> = (0..wz).map(|b| (b, b, 1.0)).collect();
            let w_v = Matrix::from_triplets(d, wz, &v);
            let o: Vec<(usize, usize, f64)> =
                (0..wz).map(|b| (b, f_idx * wz + b, 1.0)).collect();
            let w_o = Matrix::from_triplets(wz, 4 * wz, &o);
            heads.push(HeadWeights { w_q, w_k, w_v, w_o });
        }
        let mut attn_names = labels("xa", wz);
        attn_names.extend(labels("xb", wz));
        attn_names.extend(labels("xm", wz));
        attn_names.extend(labels("xc", wz));
        let f = FfnAssembler::new(d + 4 * wz, 0);
        wiring.push(heads, f, &attn_names, &[]);
    }

    // Layer 5: the twist. rot = upper bits of x[t0] joined with lower
    // bits of x[t1]; z_b = x[tm]_b ⊕ rot_{b+1} ⊕ (a_b ∧ rot_0).
    {
        let r = spec.r as usize;
        let rot = |wiring: &Wiring, bb: usize| -> usize {
            if bb >= r {
                wiring.ch(&format!("xa{bb}"))
            } else {
                wiring.ch(&format!("xb{bb}"))
            }
        };
        let mut f = FfnAssembler::new(wiring.d, wz);
        for b in 0..wz {
            let mut taps = vec![wiring.ch(&format!("xm{b}"))];
            if b + 1 < wz {
                taps.push(rot(&wiring, b + 1));
            }
            if spec.a >> b & 1 == 1 {
                taps.push(rot(&wiring, 0));
            }
            emit_parity(&mut f, &taps, b);
        }
        wiring.push_ffn(f, &labels("z", wz));
    }

    // Layers 6-9: tempering. Each substitution XORs a shifted, optionally
    // masked copy into the word; on exact bits each is one parity layer.
    let stages: [(&str, &str, i64, u64); 4] = [
        ("z", "g1", -(spec.u as i64), u64::MAX),
        ("g1", "g2", spec.s as i64, spec.b),
        ("g2", "g3", spec.t as i64, spec.c_mask),
        ("g3", "g4", -(spec.l as i64), u64::MAX),
    ];
    for (src, dst, shift, mask) in stages {
        let mut f = FfnAssembler::new(wiring.d, wz);
        for b in 0..wz {
            let mut taps = vec![wiring.ch(&format!("{src}{b}"))];
            // Left shift by s pairs bit b with source bit b−s under the
            // mask; right shift by u (negative) pairs it with bit b+u.
            let partner = b as i64 - shift;
            if (0..wz as i64).contains(&partner) && mask >> b & 1 == 1 {
                taps.push(wiring.ch(&format!("{src}{partner}")));
            }
            emit_parity(&mut f, &taps, b);
        }
        wiring.push_ffn(f, &labels(dst, wz));
    }

    // Layer 10: output selection. Exactly one selector is high; each
    // output bit is an exact AND R(sel + bit − 1) summed over the three
    // candidate words, and the flag passes the arrow selector through.
    {
        let sel_y = wiring.ch("sel_y");
        let sel_z = wiring.ch("sel_z");
        let sel_copy = wiring.ch("sel_copy");
        let sel_arrow = wiring.ch("sel_arrow");
        let mut f = FfnAssembler::new(wiring.d, wz + 1);
        for b in 0..wz {
            for (sel, word) in [(sel_y, "g4"), (sel_z, "z"), (sel_copy, "xc")] {
                let bit = wiring.ch(&format!("{word}{b}"));
                let u = f.unit(&[(sel, RAMP), (bit, RAMP)], -RAMP);
                f.emit(u, b, 1.0 / RAMP);
            }
        }
        let arrow_id = identity_unit(&mut f, &[(sel_arrow, 1.0)]);
        emit_identity(&mut f, arrow_id, wz, 1.0);
        let mut names = labels("out", wz);
        names.push("oflag".to_string());
        wiring.push_ffn(f, &names);
    }

    let final_width = wiring.d;
    let mut readout_triplets: Vec<(usize, usize, f64)> =
        (0..wz).map(|b| (wiring.ch(&format!("out{b}")), b, 1.0)).collect();
    readout_triplets.push((wiring.ch("oflag"), wz, 1.0));
    let readout = Matrix::from_triplets(final_width, wz + 1, &readout_triplets);

    let stage_map = serde_json::json!([
        {"stage": 1, "name": "arrow-count", "layer": 1},
        {"stage": 2, "name": "source-coordinates", "layer": 2},
        {"stage": 3, "name": "square-prep", "layer": 3},
        {"stage": 4, "name": "state-fetch", "layer": 4},
        {"stage": 5, "name": "rotate-mask-combine", "layer": 5},
        {"stage": 6, "name": "rotate-shift", "layer": 5},
        {"stage": 7, "name": "rotate-conditional-xor", "layer": 5},
        {"stage": 8, "name": "state-update", "layer": 5},
        {"stage": 9, "name": "temper-shift-u", "layer": 6},
        {"stage": 10, "name": "temper-xor-u", "layer": 6},
        {"stage": 11, "name": "temper-shift-s", "layer": 7},
        {"stage": 12, "name": "temper-xor-s", "layer": 7},
        {"stage": 13, "name": "temper-shift-t", "layer": 8},
        {"stage": 14, "name": "temper-xor-t", "layer": 8},
        {"stage": 15, "name": "temper-shift-l", "layer": 9},
        {"stage": 16, "name": "temper-xor-l", "layer": 9},
        {"stage": 17, "name": "output-select", "layer": 10},
    ]);
    let mut program = WeightProgram {
        w,
        layers: wiring.layers,
        readout,
        meta: program_meta(&[
            ("kind", "mt".into()),
            ("n", n.into()),
            ("m", spec.m.into()),
            ("r", spec.r.into()),
            ("max_blocks", max_blocks.into()),
            ("stages", stage_map),
            ("hidden_widths", wiring.hidden.clone().into()),
        ]),
    };
    program.set_max_positions(first_arrow + max_blocks * len_block);
    program.validate().map_err(|e| CompileError::InvalidSpec(e.to_string()))?;
    Ok(program)
}

/// Reference tape for `blocks` update steps of the spec, starting from
/// its seeded state: the prompt (initial window then an arrow) followed
/// by `blocks` blocks of output word, refreshed window, arrow.
pub fn encode_tape(spec: &MtSpec, blocks: usize) -> Result<Tape, CompileError> {
    spec.validate()?;
    let mut state = mt_seed(spec);
    let mut tape = Tape::prompt(&state.words);
    for _ in 0..blocks {
        let y = mt_next(spec, &mut state);
        tape.push(TapeToken::Word(y));
        for &x in &state.words {
            tape.push(TapeToken::Word(x));
        }
        tape.push(TapeToken::Arrow);
    }
    Ok(tape)
}
