//! Reference implementations of the generators and the circuit
//! evaluator. Everything the compilers produce is checked word for word
//! against these; they use plain integer arithmetic and are written to
//! be obviously correct rather than fast.

use thiserror::Error;

use crate::compile::circuit::{CircuitNetlist, GateKind, WireRef};
use crate::compile::{word_mask, LcgSpec, MtSeed, MtSpec};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("assignment holds {got} bits, circuit has {want} inputs")]
    AssignmentLength { got: usize, want: usize },
    #[error("invalid circuit netlist: {0}")]
    BadNetlist(String),
}

/// One LCG step: (a*x + c) mod m, widened so a*x cannot overflow for any
/// 32-bit parameters.
pub fn lcg_next(spec: &LcgSpec, x: u64) -> u64 {
    debug_assert!(x < spec.m);
    ((spec.a as u128 * x as u128 + spec.c as u128) % spec.m as u128) as u64
}

/// First `count` outputs of the LCG, starting after the seed: x1, x2, ...
pub fn lcg_stream(spec: &LcgSpec, count: usize) -> Vec<u64> {
    let mut x = spec.x0;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        x = lcg_next(spec, x);
        out.push(x);
    }
    out
}

/// Mersenne Twister working state: the n-word window and the index of
/// the next word to refresh. The sequential form refreshes one word per
/// output instead of twisting the whole block at once; the outputs are
/// identical and the order matches the tape layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtState {
    pub words: Vec<u64>,
    pub index: usize,
}

/// Expands the spec's seed into the initial state window. Explicit
/// states are taken as written; a standard seed runs the recurrence
/// x[i] = (1812433253 * (x[i-1] ^ (x[i-1] >> (w-2))) + i) mod 2^w.
pub fn mt_seed(spec: &MtSpec) -> MtState {
    let mask = word_mask(spec.w);
    let words = match &spec.seed {
        MtSeed::State { state } => state.clone(),
        MtSeed::Standard { seed } => {
            let mut words = Vec::with_capacity(spec.n);
            words.push(seed & mask);
            for i in 1..spec.n as u64 {
                let prev = words[(i - 1) as usize];
                let x = prev ^ (prev >> (spec.w - 2));
                // w <= 32 keeps 1812433253 * x below 2^63; no wrap care
                // needed before the mask.
                words.push((1_812_433_253u64.wrapping_mul(x).wrapping_add(i)) & mask);
            }
            words
        }
    };
    MtState { words, index: 0 }
}

/// One output: refresh word `index` from the split-word recurrence, then
/// temper and return it.
pub fn mt_next(spec: &MtSpec, state: &mut MtState) -> u64 {
    let mask = word_mask(spec.w);
    let lower = if spec.r == 0 { 0 } else { ((1u128 << spec.r) - 1) as u64 & mask };
    let upper = mask & !lower;
    let i = state.index;
    let n = spec.n;
    let y = (state.words[i] & upper) | (state.words[(i + 1) % n] & lower);
    let mut z = (y >> 1) ^ state.words[(i + spec.m) % n];
    if y & 1 == 1 {
        z ^= spec.a;
    }
    z &= mask;
    state.words[i] = z;
    state.index = (i + 1) % n;
    temper(spec, z)
}

/// First `count` outputs from the seeded state.
pub fn mt_stream(spec: &MtSpec, count: usize) -> Vec<u64> {
    let mut state = mt_seed(spec);
    (0..count).map(|_| mt_next(spec, &mut state)).collect()
}

/// The tempering bijection: y ^= y>>u; y ^= (y<<s)&b; y ^= (y<<t)&c;
/// y ^= y>>l.
pub fn temper(spec: &MtSpec, z: u64) -> u64 {
    let mask = word_mask(spec.w);
    let mut y = z & mask;
    y ^= y >> spec.u;
    y = (y ^ ((y << spec.s) & spec.b)) & mask;
    y = (y ^ ((y << spec.t) & spec.c_mask)) & mask;
    y ^= y >> spec.l;
    y & mask
}

/// Inverse of `temper`. Each xor-shift stage is inverted by iterating
/// the stage with the recovered bits substituted back in; bits settle
/// from the side the shift fills with zeros.
pub fn untemper(spec: &MtSpec, y: u64) -> u64 {
    let mask = word_mask(spec.w);
    let mut x = y & mask;
    x = invert_xor_rshift(x, spec.l, spec.w);
    x = invert_xor_lshift_mask(x, spec.t, spec.c_mask, spec.w);
    x = invert_xor_lshift_mask(x, spec.s, spec.b, spec.w);
    x = invert_xor_rshift(x, spec.u, spec.w);
    x & mask
}

/// Solves y = x ^ (x >> sh) for x. The top sh bits of y already equal x;
/// each pass extends the known prefix downward by sh bits.
fn invert_xor_rshift(y: u64, sh: u32, w: u32) -> u64 {
    let mut x = y;
    let mut known = sh;
    while known < w {
        x = y ^ (x >> sh);
        known += sh;
    }
    x & word_mask(w)
}

/// Solves y = x ^ ((x << sh) & m) for x. The bottom sh bits of y already
/// equal x; each pass extends the known suffix upward by sh bits.
fn invert_xor_lshift_mask(y: u64, sh: u32, m: u64, w: u32) -> u64 {
    let mut x = y;
    let mut known = sh;
    while known < w {
        x = y ^ ((x << sh) & m);
        known += sh;
    }
    x & word_mask(w)
}

/// Evaluates a validated netlist on one input assignment, returning the
/// output wires in netlist order. AND over zero operands would be true
/// and OR false, but validation rejects empty operand lists outright.
pub fn eval_circuit(netlist: &CircuitNetlist, assignment: &[bool]) -> Result<Vec<bool>, OracleError> {
    let resolved = netlist
        .resolve()
        .map_err(|e| OracleError::BadNetlist(e.to_string()))?;
    if assignment.len() != netlist.inputs.len() {
        return Err(OracleError::AssignmentLength {
            got: assignment.len(),
            want: netlist.inputs.len(),
        });
    }
    let mut gate_values = Vec::with_capacity(netlist.gates.len());
    let read = |gate_values: &Vec<bool>, w: WireRef| match w {
        WireRef::Input(i) => assignment[i],
        WireRef::Gate(g) => gate_values[g],
    };
    for (gi, gate) in netlist.gates.iter().enumerate() {
        let args = &resolved.gate_args[gi];
        let v = match gate.kind {
            GateKind::And => args.iter().all(|&a| read(&gate_values, a)),
            GateKind::Or => args.iter().any(|&a| read(&gate_values, a)),
            GateKind::Not => !read(&gate_values, args[0]),
        };
        gate_values.push(v);
    }
    Ok(resolved
        .output_refs
        .iter()
        .map(|&w| read(&gate_values, w))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::circuit::Gate;
    use num_bigint::BigUint;

    fn kat_words(text: &str) -> Vec<u64> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse().unwrap())
            .collect()
    }

    #[test]
    fn lcg_small_examples() {
        // a=5, c=3, m=16, x0=7: 7 -> 38 mod 16 = 6 -> 33 mod 16 = 1 -> 8 -> 11 -> 10.
        let spec = LcgSpec::new(5, 3, 16, 7).unwrap();
        assert_eq!(lcg_stream(&spec, 5), vec![6, 1, 8, 11, 10]);

        // Full-period parameters mod 8 (a = 5, c = 1): visits every residue.
        let spec = LcgSpec::new(5, 1, 8, 0).unwrap();
        let mut seen = lcg_stream(&spec, 8);
        seen.sort_unstable();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());

        // Degenerate multiplier: constant stream.
        let spec = LcgSpec::new(0, 9, 32, 5).unwrap();
        assert_eq!(lcg_stream(&spec, 3), vec![9, 9, 9]);
    }

    #[test]
    fn lcg_million_steps_match_wide_integer_recompute() {
        // MINSTD parameters; m is prime, close to 2^31, so a*x needs the
        // 128-bit widening the implementation relies on.
        let spec = LcgSpec { a: 16807, c: 0, m: 2147483647, x0: 1, w: 31 };
        spec.validate().unwrap();
        let m = BigUint::from(spec.m);
        let a = BigUint::from(spec.a);
        let mut big = BigUint::from(spec.x0);
        let mut x = spec.x0;
        for _ in 0..1_000_000 {
            x = lcg_next(&spec, x);
            big = (&a * &big) % &m;
        }
        assert_eq!(BigUint::from(x), big);
        // Known checkpoint for MINSTD from seed 1: the 10000th value.
        let spec10k = lcg_stream(&spec, 10_000);
        assert_eq!(spec10k[9_999], 1043618065);
    }

    #[test]
    fn mt19937_known_answers_across_seeds() {
        for (seed, kat) in [
            (1u64, include_str!("../tests/data/mt19937_seed1.txt")),
            (42, include_str!("../tests/data/mt19937_seed42.txt")),
            (5489, include_str!("../tests/data/mt19937_seed5489.txt")),
        ] {
            let spec = MtSpec::mt19937(seed);
            let want = kat_words(kat);
            assert_eq!(want.len(), 1000);
            assert_eq!(mt_stream(&spec, 1000), want, "seed {seed}");
        }
    }

    #[test]
    fn reduced_width_known_answers() {
        let want = kat_words(include_str!("../tests/data/mt_w16_seed5489.txt"));
        assert_eq!(mt_stream(&MtSpec::w16(), 1000), want);

        let want = kat_words(include_str!("../tests/data/mt_w8_seed5489.txt"));
        assert_eq!(mt_stream(&MtSpec::small(), 1000), want);
    }

    #[test]
    fn sequential_refresh_matches_block_twist() {
        // The classic formulation twists all n words, then reads them
        // out tempered. One full pass of the sequential form must agree.
        let spec = MtSpec::mt19937(5489);
        let mask = word_mask(spec.w);
        let lower = (1u64 << spec.r) - 1;
        let upper = mask & !lower;

        let mut block = mt_seed(&spec).words;
        let n = spec.n;
        let snapshot = block.clone();
        for i in 0..n {
            let next = if i + 1 < n { snapshot[i + 1] } else { block[0] };
            let y = (snapshot[i] & upper) | (next & lower);
            let mut z = (y >> 1) ^ if i + spec.m < n { snapshot[i + spec.m] } else { block[(i + spec.m) % n] };
            if y & 1 == 1 {
                z ^= spec.a;
            }
            block[i] = z & mask;
        }
        let block_outputs: Vec<u64> = block.iter().map(|&z| temper(&spec, z)).collect();
        assert_eq!(mt_stream(&spec, n), block_outputs);
    }

    #[test]
    fn temper_untemper_roundtrip_exhaustive_small_widths() {
        let spec8 = MtSpec::small();
        for z in 0..=word_mask(8) {
            assert_eq!(untemper(&spec8, temper(&spec8, z)), z);
        }
        let mut spec12 = MtSpec::small();
        spec12.w = 12;
        spec12.a = 0x9D5;
        spec12.b = 0x68C;
        spec12.c_mask = 0xC60;
        spec12.u = 5;
        spec12.s = 3;
        spec12.t = 7;
        spec12.l = 9;
        spec12.r = 6;
        spec12.validate().unwrap();
        for z in 0..=word_mask(12) {
            assert_eq!(untemper(&spec12, temper(&spec12, z)), z);
        }
    }

    #[test]
    fn temper_is_a_bijection_on_sampled_values() {
        let spec = MtSpec::mt19937(5489);
        // Shift inverses must also hold at full width on varied values.
        for z in [0u64, 1, 0xFFFF_FFFF, 0x8000_0000, 0x1234_5678, 0xDEAD_BEEF] {
            assert_eq!(untemper(&spec, temper(&spec, z)), z);
        }
    }

    #[test]
    fn split_degenerate_ends() {
        // r = 0: the combined word is x[i] alone, so with tempering and
        // twist undone the refresh depends only on x[i] and x[i+m].
        let mut spec = MtSpec::small();
        spec.r = 0;
        spec.validate().unwrap();
        let mut st = MtState { words: vec![0b1010_1100, 0, 0, 0], index: 0 };
        let out = mt_next(&spec, &mut st);
        let y = 0b1010_1100u64;
        let mut z = y >> 1;
        if y & 1 == 1 {
            z ^= spec.a;
        }
        assert_eq!(st.words[0], z);
        assert_eq!(out, temper(&spec, z));

        // r = w: the combined word is x[i+1] alone (slot 2, read by the
        // middle offset m = 2, held zero here).
        let mut spec = MtSpec::small();
        spec.r = 8;
        spec.validate().unwrap();
        let mut st = MtState { words: vec![0xFF, 0b0110_0011, 0, 0], index: 0 };
        let out = mt_next(&spec, &mut st);
        let y = 0b0110_0011u64;
        let mut z = y >> 1;
        if y & 1 == 1 {
            z ^= spec.a;
        }
        assert_eq!(st.words[0], z & 0xFF);
        assert_eq!(out, temper(&spec, z));
    }

    #[test]
    fn all_zero_state_stays_zero() {
        let mut spec = MtSpec::small();
        spec.seed = MtSeed::State { state: vec![0; 4] };
        spec.validate().unwrap();
        assert!(mt_stream(&spec, 50).iter().all(|&y| y == 0));
    }

    #[test]
    fn majority_circuit_truth_table() {
        let net = CircuitNetlist {
            inputs: vec!["a".into(), "b".into(), "c".into()],
            gates: vec![
                Gate { name: "ab".into(), kind: GateKind::And, args: vec!["a".into(), "b".into()] },
                Gate { name: "ac".into(), kind: GateKind::And, args: vec!["a".into(), "c".into()] },
                Gate { name: "bc".into(), kind: GateKind::And, args: vec!["b".into(), "c".into()] },
                Gate {
                    name: "maj".into(),
                    kind: GateKind::Or,
                    args: vec!["ab".into(), "ac".into(), "bc".into()],
                },
            ],
            outputs: vec!["maj".into()],
        };
        for bits in 0..8u32 {
            let a = bits & 1 == 1;
            let b = bits >> 1 & 1 == 1;
            let c = bits >> 2 & 1 == 1;
            let want = (a as u32 + b as u32 + c as u32) >= 2;
            assert_eq!(eval_circuit(&net, &[a, b, c]).unwrap(), vec![want]);
        }
    }

    #[test]
    fn not_and_multi_output() {
        let net = CircuitNetlist {
            inputs: vec!["a".into(), "b".into()],
            gates: vec![
                Gate { name: "na".into(), kind: GateKind::Not, args: vec!["a".into()] },
                Gate { name: "x".into(), kind: GateKind::Or, args: vec!["na".into(), "b".into()] },
            ],
            outputs: vec!["x".into(), "na".into(), "a".into()],
        };
        assert_eq!(
            eval_circuit(&net, &[true, false]).unwrap(),
            vec![false, false, true]
        );
        assert_eq!(
            eval_circuit(&net, &[false, false]).unwrap(),
            vec![true, true, false]
        );
        assert!(matches!(
            eval_circuit(&net, &[true]),
            Err(OracleError::AssignmentLength { got: 1, want: 2 })
        ));
    }
}
