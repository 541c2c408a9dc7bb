//! Compiles the full-size MT19937 generator (32-bit words, 624-word
//! state) and reproduces its published first outputs for seed 5489.
//!
//! Run with: cargo run --release --example mt19937_known_answer

use prngformer::compile::{build_mt_program_with_options, MtCompileOptions, MtSpec};
use prngformer::kernel::{generate, PrecisionPolicy};
use prngformer::oracle::{mt_seed, mt_stream};
use prngformer::tape::{decode_tape, Tape};

fn main() {
    let spec = MtSpec::mt19937(5489);
    let blocks = 2;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");

    let widths: usize = program
        .meta
        .get("hidden_widths")
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|v| v.as_u64()).sum::<u64>() as usize)
        .unwrap_or(0);
    println!(
        "MT19937 compiled: {} layers, {widths} hidden units, horizon {} positions",
        program.layers.len(),
        program.max_positions().unwrap(),
    );

    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    println!("generating {steps} tokens from the {}-token seed prompt...", prompt.len());
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the compiled horizon");

    let got = decode_tape(&tape).expect("well-formed tape").outputs();
    let want = mt_stream(&spec, blocks);
    println!("\n  transformer  reference");
    for (g, w) in got.iter().zip(&want) {
        println!("  {g:>11}  {w:>9}");
    }
    assert_eq!(got, want);
    assert_eq!(got[..2], [3499211612, 581869302], "published seed-5489 outputs");
    println!("\nfirst {blocks} outputs match the published sequence");
}
