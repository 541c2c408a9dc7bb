//! Compiles a small linear congruential generator into transformer
//! weights and runs the weights next to the arithmetic reference.
//!
//! Run with: cargo run --example compile_lcg

use prngformer::compile::{build_lcg_program, LcgSpec};
use prngformer::kernel::{generate, PrecisionPolicy};
use prngformer::oracle::lcg_stream;
use prngformer::tape::{Tape, TapeToken};

fn main() {
    let spec = LcgSpec { a: 21, c: 5, m: 64, x0: 17, w: 6 };
    let program = build_lcg_program(&spec).expect("spec is in range");

    println!(
        "x_next = ({} * x + {}) mod {} as a {}-layer transformer, {} -> {} channels",
        spec.a,
        spec.c,
        spec.m,
        program.layers.len(),
        program.layers[0].d_in,
        program.layers.last().unwrap().d_out,
    );
    println!("largest weight magnitude: {}", program.max_abs_weight());

    let steps = 12;
    let prompt = Tape::new(vec![TapeToken::Word(spec.x0)]);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("generation stays on the integer grid");
    let reference = lcg_stream(&spec, steps);

    println!("\n  step  transformer  reference");
    for (i, (token, want)) in tape.tokens[1..].iter().zip(&reference).enumerate() {
        let TapeToken::Word(got) = *token else { panic!("unexpected arrow") };
        println!("  {i:>4}  {got:>11}  {want:>9}");
        assert_eq!(got, *want);
    }
    println!("\nall {steps} outputs match the reference exactly");
}
