//! Compiler from LCG parameters to a single-layer, single-head weight
//! program that emits the w-bit successor of the token it just read.
//!
//! The head self-selects the current position and its value map computes
//! the affine image v = a·x + c from the bit channels and the constant
//! channel. The feed-forward block then reads each output bit straight
//! off v with one saturating indicator pair per threshold p ∈ [1, vmax]:
//!
//!   bit_b((a·x + c) mod m) = Σ_p Δ(p, b) · I[v ≥ p],
//!   Δ(p, b) = bit_b(p mod m) − bit_b((p−1) mod m) ∈ {−1, 0, 1},
//!
//! which telescopes exactly on integer v. Active indicator units are
//! saturated (the GeLU argument is at least 96), inactive ones leave a
//! residue under 1e-222 per unit, so every emitted bit is an exact 0.0
//! or 1.0 up to an absorbed dust term. The price of doing the remainder
//! in a single hidden layer is width: 2·vmax units, vmax = a(m−1) + c.

use super::{program_meta, CompileError, LcgSpec, DEFAULT_EPS_BUDGET, LCG_MODULUS_LIMIT};
use crate::gadgets::{concat_layer, self_select_head, FfnAssembler, LAMBDA};
use crate::kernel::WeightProgram;
use crate::matrix::Matrix;

pub fn build_lcg_program(spec: &LcgSpec) -> Result<WeightProgram, CompileError> {
    build_lcg_program_with_budget(spec, DEFAULT_EPS_BUDGET)
}

pub fn build_lcg_program_with_budget(
    spec: &LcgSpec,
    eps_budget: f64,
) -> Result<WeightProgram, CompileError> {
    spec.validate()?;
    if !(eps_budget > 0.0 && eps_budget < 0.25) {
        return Err(CompileError::BadBudget(eps_budget));
    }
    if spec.m > LCG_MODULUS_LIMIT {
        return Err(CompileError::ModulusTooLarge { m: spec.m, limit: LCG_MODULUS_LIMIT });
    }
    let wz = spec.w as usize;
    let d_in = wz + 3;
    let pos = wz;
    let one = wz + 1;

    // Value map: single column carrying v = a·Σ 2^b φ_b + c.
    let mut v_triplets: Vec<(usize, usize, f64)> = Vec::new();
    for b in 0..wz {
        let coeff = spec.a as f64 * (1u64 << b) as f64;
        if coeff != 0.0 {
            v_triplets.push((b, 0, coeff));
        }
    }
    if spec.c != 0 {
        v_triplets.push((one, 0, spec.c as f64));
    }
    let head = self_select_head(
        d_in,
        pos,
        Matrix::from_triplets(d_in, 1, &v_triplets),
        Matrix::identity(1),
    );

    let vmax = spec.a * (spec.m - 1) + spec.c;
    let v_ch = d_in;
    let mut f = FfnAssembler::new(d_in + 1, wz);
    for p in 1..=vmax {
        let hi = f.unit(&[(v_ch, LAMBDA)], LAMBDA * (0.75 - p as f64));
        let lo = f.unit(&[(v_ch, LAMBDA)], LAMBDA * (0.25 - p as f64));
        for b in 0..wz {
            let now = (p % spec.m) >> b & 1;
            let before = ((p - 1) % spec.m) >> b & 1;
            let delta = now as f64 - before as f64;
            if delta != 0.0 {
                f.emit(hi, b, delta * 2.0 / LAMBDA);
                f.emit(lo, b, -delta * 2.0 / LAMBDA);
            }
        }
    }
    let hidden = f.hidden();
    let layer = concat_layer(d_in, vec![head], f.build());

    // Bits come straight from the feed-forward outputs; the arrow flag
    // column stays zero because the sequence has no arrow tokens.
    let final_width = layer.d_out;
    let bit_base = d_in + 1;
    let readout_triplets: Vec<(usize, usize, f64)> =
        (0..wz).map(|b| (bit_base + b, b, 1.0)).collect();
    let readout = Matrix::from_triplets(final_width, wz + 1, &readout_triplets);

    let program = WeightProgram {
        w: spec.w,
        layers: vec![layer],
        readout,
        meta: program_meta(&[
            ("kind", "lcg".into()),
            ("a", spec.a.into()),
            ("c", spec.c.into()),
            ("m", spec.m.into()),
            ("x0", spec.x0.into()),
            ("hidden_width", hidden.into()),
        ]),
    };
    program.validate().map_err(|e| CompileError::InvalidSpec(e.to_string()))?;
    Ok(program)
}
