//! Boolean gadget builders: constant bitwise maps and shifts realized
//! in the attention value path, two-operand bitwise maps that combine
//! an attention-formed sum or difference with a saturating FFN, and
//! wide-fanin AND/OR gates.

use std::collections::BTreeMap;

use super::{
    concat_layer, self_select_head, sqrt_2pi, FfnAssembler, GadgetBlock, GadgetKind,
    EXACT_BUDGET, LAMBDA, SELECT_SCALE,
};
use crate::matrix::Matrix;

/// Argument scale for the XOR square-of-difference. The square's
/// curvature error on Boolean differences is δ²/6 ≈ 6.5e-4; consumers
/// that need clean bits follow with a cleanup pair.
const XOR_DELTA: f64 = 0.0625;
const XOR_BUDGET: f64 = 1e-3;

fn bit(c: u64, b: usize) -> u64 {
    (c >> b) & 1
}

/// Single attention layer computing a constant bitwise map of the w-bit
/// group: c∧φ, c∨φ, c⊕φ, ¬φ, or a genuine zero-fill shift, as a linear
/// map in the value path of a position-self-selecting head. Exact on
/// Boolean inputs up to softmax leakage (~1e-27).
///
/// `c` is the constant bit vector for the and/or/xor kinds, the shift
/// amount for Shl/Shr, and must be 0 for Not.
pub fn build_const_bool_layer(kind: GadgetKind, w: u32, c: u64) -> GadgetBlock {
    assert!((1..=32).contains(&w), "bit width must be in [1, 32]");
    let wz = w as usize;
    let d_in = wz + 2;
    let pos = wz;
    let one = wz + 1;
    let fits = w == 64 || c < (1u64 << w);
    let mut v: Vec<(usize, usize, f64)> = Vec::new();
    match kind {
        GadgetKind::ConstAnd => {
            assert!(fits, "constant must fit in {w} bits");
            for b in 0..wz {
                if bit(c, b) == 1 {
                    v.push((b, b, 1.0));
                }
            }
        }
        GadgetKind::ConstOr => {
            assert!(fits, "constant must fit in {w} bits");
            for b in 0..wz {
                if bit(c, b) == 1 {
                    v.push((one, b, 1.0));
                } else {
                    v.push((b, b, 1.0));
                }
            }
        }
        GadgetKind::ConstXor => {
            assert!(fits, "constant must fit in {w} bits");
            for b in 0..wz {
                if bit(c, b) == 1 {
                    v.push((one, b, 1.0));
                    v.push((b, b, -1.0));
                } else {
                    v.push((b, b, 1.0));
                }
            }
        }
        GadgetKind::Not => {
            assert!(c == 0, "bitwise negation takes no constant; pass 0");
            for b in 0..wz {
                v.push((one, b, 1.0));
                v.push((b, b, -1.0));
            }
        }
        GadgetKind::Shl => {
            assert!(c < w as u64, "shift amount must be below the bit width");
            for b in c as usize..wz {
                v.push((b - c as usize, b, 1.0));
            }
        }
        GadgetKind::Shr => {
            assert!(c < w as u64, "shift amount must be below the bit width");
            for b in 0..wz - c as usize {
                v.push((b + c as usize, b, 1.0));
            }
        }
        other => panic!("build_const_bool_layer does not handle {other}"),
    }
    let head =
        self_select_head(d_in, pos, Matrix::from_triplets(d_in, wz, &v), Matrix::identity(wz));
    let layer = concat_layer(d_in, vec![head], FfnAssembler::new(d_in + wz, 0).build());
    let mut in_channels = BTreeMap::new();
    let mut out_channels = BTreeMap::new();
    for b in 0..wz {
        in_channels.insert(format!("x{b}"), b);
        out_channels.insert(format!("out{b}"), d_in + b);
    }
    in_channels.insert("position".to_string(), pos);
    in_channels.insert("one".to_string(), one);
    let block = GadgetBlock {
        kind,
        layers: vec![layer],
        in_channels,
        out_channels,
        eps_budget: EXACT_BUDGET,
        lipschitz: 1.0,
        max_weight_bound: SELECT_SCALE + 1.0,
        tag: format!("{kind}(w={w}, c={c})"),
    };
    block.assert_well_formed();
    block
}

/// One layer computing x∧y, x∨y, or x⊕y per bit on two data-dependent
/// w-bit groups. The self-selecting head forms per-bit sums (and/or)
/// or differences (xor); the FFN applies the saturating nonlinearity:
/// AND = R(x+y−1), OR = 1 − R(1−x−y), XOR = (x−y)² via GeLU's even
/// part. AND and OR are bit-exact on Booleans; XOR carries the square's
/// curvature error (≤ 1e-3) and pairs with a cleanup when consumed.
pub fn build_binary_bool_layer(kind: GadgetKind, w: u32) -> GadgetBlock {
    assert!((1..=32).contains(&w), "bit width must be in [1, 32]");
    let wz = w as usize;
    let d_in = 2 * wz + 2;
    let pos = 2 * wz;
    let one = 2 * wz + 1;
    let sign = match kind {
        GadgetKind::VarAnd | GadgetKind::VarOr => 1.0,
        GadgetKind::VarXor => -1.0,
        other => panic!("build_binary_bool_layer does not handle {other}"),
    };
    let mut v: Vec<(usize, usize, f64)> = Vec::new();
    for b in 0..wz {
        v.push((b, b, 1.0));
        v.push((wz + b, b, sign));
    }
    let head =
        self_select_head(d_in, pos, Matrix::from_triplets(d_in, wz, &v), Matrix::identity(wz));
    let mut f = FfnAssembler::new(d_in + wz, wz);
    match kind {
        GadgetKind::VarAnd => {
            for b in 0..wz {
                let u = f.unit(&[(d_in + b, LAMBDA)], -LAMBDA);
                f.emit(u, b, 1.0 / LAMBDA);
            }
        }
        GadgetKind::VarOr => {
            let one_unit = f.unit(&[(one, LAMBDA)], 0.0);
            for b in 0..wz {
                let u = f.unit(&[(d_in + b, -LAMBDA)], LAMBDA);
                f.emit(one_unit, b, 1.0 / LAMBDA);
                f.emit(u, b, -1.0 / LAMBDA);
            }
        }
        GadgetKind::VarXor => {
            let c = sqrt_2pi() / (2.0 * XOR_DELTA * XOR_DELTA);
            for b in 0..wz {
                let up = f.unit(&[(d_in + b, XOR_DELTA)], 0.0);
                let dn = f.unit(&[(d_in + b, -XOR_DELTA)], 0.0);
                f.emit(up, b, c);
                f.emit(dn, b, c);
            }
        }
        _ => unreachable!(),
    }
    let layer = concat_layer(d_in, vec![head], f.build());
    let mut in_channels = BTreeMap::new();
    let mut out_channels = BTreeMap::new();
    for b in 0..wz {
        in_channels.insert(format!("x{b}"), b);
        in_channels.insert(format!("y{b}"), wz + b);
        out_channels.insert(format!("out{b}"), d_in + wz + b);
    }
    in_channels.insert("position".to_string(), pos);
    in_channels.insert("one".to_string(), one);
    let (eps, lips, bound) = match kind {
        GadgetKind::VarXor => (XOR_BUDGET, 4.0, sqrt_2pi() / (2.0 * XOR_DELTA * XOR_DELTA) + 1.0),
        _ => (EXACT_BUDGET, 2.0, LAMBDA + 1.0),
    };
    let block = GadgetBlock {
        kind,
        layers: vec![layer],
        in_channels,
        out_channels,
        eps_budget: eps,
        lipschitz: lips,
        max_weight_bound: bound,
        tag: format!("{kind}(w={w})"),
    };
    block.assert_well_formed();
    block
}

/// k-ary AND or OR of Boolean channels, one FFN layer, bit-exact:
/// AND = R(Σx − (k−1)), OR = 1 − R(1 − Σx), with the constant entering
/// through a saturated unit on the one-channel.
pub fn build_fanin_gate(kind: GadgetKind, k: usize) -> GadgetBlock {
    assert!(k >= 1, "fan-in gates need at least one input");
    let d_in = k + 1;
    let one = k;
    let mut f = FfnAssembler::new(d_in, 1);
    match kind {
        GadgetKind::FaninAnd => {
            let taps: Vec<(usize, f64)> = (0..k).map(|i| (i, LAMBDA)).collect();
            let u = f.unit(&taps, LAMBDA * (1.0 - k as f64));
            f.emit(u, 0, 1.0 / LAMBDA);
        }
        GadgetKind::FaninOr => {
            let one_unit = f.unit(&[(one, LAMBDA)], 0.0);
            let taps: Vec<(usize, f64)> = (0..k).map(|i| (i, -LAMBDA)).collect();
            let u = f.unit(&taps, LAMBDA);
            f.emit(one_unit, 0, 1.0 / LAMBDA);
            f.emit(u, 0, -1.0 / LAMBDA);
        }
        other => panic!("build_fanin_gate does not handle {other}"),
    }
    let layer = concat_layer(d_in, vec![], f.build());
    let mut in_channels = BTreeMap::new();
    for i in 0..k {
        in_channels.insert(format!("x{i}"), i);
    }
    in_channels.insert("one".to_string(), one);
    let mut out_channels = BTreeMap::new();
    out_channels.insert("out".to_string(), d_in);
    let block = GadgetBlock {
        kind,
        layers: vec![layer],
        in_channels,
        out_channels,
        eps_budget: EXACT_BUDGET,
        lipschitz: k as f64,
        max_weight_bound: LAMBDA * k as f64,
        tag: format!("{kind}(k={k})"),
    };
    block.assert_well_formed();
    block
}
