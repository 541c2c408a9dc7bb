//! Re-runs a compiled Mersenne Twister under coarser and coarser float
//! precision. Every intermediate value is rounded to a fixed number of
//! mantissa bits, and the tape stays bit-exact far below full doubles
//! because the weights keep all live quantities on an integer grid.
//!
//! Run with: cargo run --example quantized_generation

use prngformer::compile::{build_mt_program, encode_tape, MtSpec};
use prngformer::kernel::{generate, PrecisionPolicy};
use prngformer::oracle::mt_seed;
use prngformer::tape::Tape;

fn main() {
    let spec = MtSpec::small();
    let program = build_mt_program(&spec).expect("spec is valid");
    let blocks = 20;
    let steps = blocks * (spec.n + 2);
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let reference = encode_tape(&spec, blocks).expect("reference encoding");

    println!("{blocks} blocks of the {}-bit twister under shrinking mantissas:\n", spec.w);
    println!("  mantissa bits  result");
    println!("  {:>13}  bit-exact (IEEE double)", 52);
    for bits in [24, 16, 12, 10, 8, 6, 4] {
        let policy = PrecisionPolicy::Quantized { mantissa_bits: bits };
        let outcome = match generate(&program, &prompt, steps, policy) {
            Ok(tape) if tape == reference => "bit-exact".to_string(),
            Ok(tape) => {
                let diverge = tape
                    .tokens
                    .iter()
                    .zip(&reference.tokens)
                    .position(|(g, w)| g != w)
                    .unwrap();
                format!("diverges at tape position {diverge}")
            }
            Err(e) => format!("aborts: {e}"),
        };
        println!("  {bits:>13}  {outcome}");
    }
}
