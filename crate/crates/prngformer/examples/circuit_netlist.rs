//! Compiles a Boolean netlist into a transformer that reads the input
//! assignment from the prompt and emits every output wire, then checks
//! all 2^n assignments against a direct evaluation of the gates.
//!
//! Run with: cargo run --example circuit_netlist

use prngformer::compile::{compile_circuit, CircuitNetlist};
use prngformer::kernel::{generate, PrecisionPolicy};
use prngformer::oracle::eval_circuit;
use prngformer::tape::{Tape, TapeToken};

fn main() {
    let netlist = CircuitNetlist::from_json(
        r#"{
            "inputs": ["a", "b", "c", "d"],
            "gates": [
                {"name": "ab",   "kind": "and", "args": ["a", "b"]},
                {"name": "cd",   "kind": "and", "args": ["c", "d"]},
                {"name": "any",  "kind": "or",  "args": ["ab", "cd"]},
                {"name": "nc",   "kind": "not", "args": ["c"]},
                {"name": "edge", "kind": "and", "args": ["a", "nc"]},
                {"name": "out",  "kind": "or",  "args": ["any", "edge"]}
            ],
            "outputs": ["out", "edge"]
        }"#,
    )
    .expect("netlist is well formed");

    let program = compile_circuit(&netlist).expect("netlist compiles");
    println!(
        "{} inputs, {} gates, {} outputs -> {} layers (gate depth plus three)",
        netlist.inputs.len(),
        netlist.gates.len(),
        netlist.outputs.len(),
        program.layers.len(),
    );

    let n_in = netlist.inputs.len();
    let n_out = netlist.outputs.len();
    println!("\n  a b c d | out edge");
    for bits in 0..1u64 << n_in {
        let assignment: Vec<bool> = (0..n_in).map(|i| bits >> i & 1 == 1).collect();
        let prompt =
            Tape::new(assignment.iter().map(|&x| TapeToken::Word(x as u64)).collect());
        let tape = generate(&program, &prompt, n_out, PrecisionPolicy::ExactDouble)
            .expect("within the horizon");
        let got: Vec<u64> = tape.tokens[n_in..]
            .iter()
            .map(|t| match t {
                TapeToken::Word(v) => *v,
                TapeToken::Arrow => panic!("unexpected arrow"),
            })
            .collect();
        let want: Vec<u64> = eval_circuit(&netlist, &assignment)
            .expect("assignment is sized correctly")
            .into_iter()
            .map(u64::from)
            .collect();
        let row: Vec<String> = assignment.iter().map(|&x| (x as u8).to_string()).collect();
        println!("  {} |  {}    {}", row.join(" "), got[0], got[1]);
        assert_eq!(got, want);
    }
    println!("\nall 16 assignments match the gate-level evaluation");
}
