//! Compiles an 8-bit, 4-word Mersenne Twister variant and generates its
//! working tape: each block is one output word, the refreshed state
//! vector, and an arrow separator, all predicted token by token.
//!
//! Run with: cargo run --example small_mt_stream

use prngformer::compile::MtSpec;
use prngformer::compile::{build_mt_program, encode_tape};
use prngformer::kernel::{generate, PrecisionPolicy};
use prngformer::oracle::mt_seed;
use prngformer::tape::{decode_tape, Tape};

fn main() {
    let spec = MtSpec::small();
    let program = build_mt_program(&spec).expect("spec is valid");
    println!(
        "{}-bit twister, state n = {}: {} layers, horizon {} positions",
        spec.w,
        spec.n,
        program.layers.len(),
        program.max_positions().unwrap(),
    );

    let blocks = 10;
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the compiled horizon");

    let reference = encode_tape(&spec, blocks).expect("reference encoding");
    assert_eq!(tape, reference, "every token matches the reference tape");

    let decoded = decode_tape(&tape).expect("well-formed tape");
    println!("\nfirst tape block (word, state, arrow):");
    for token in &tape.tokens[spec.n + 1..2 * spec.n + 3] {
        println!("  {token:?}");
    }
    println!("\noutput words: {:?}", decoded.outputs());
    println!("{} blocks generated, token-for-token equal to the reference", blocks);
}
