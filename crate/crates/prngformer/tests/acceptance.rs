//! Acceptance gate: one test per shipped guarantee, each printing a
//! single pass/fail line in the harness output. The nine checks cover
//! Boolean gadget truth tables, arithmetic unit error contracts, the
//! three compilers against their oracles, precision degradation, the
//! statistical battery, and the heatmap golden file.

use prngformer::compile::{
    build_lcg_program, build_mt_program_with_options, compile_circuit, encode_tape,
    random_netlist, LcgSpec, MtCompileOptions, MtSpec,
};
use prngformer::gadgets::{
    build_binary_bool_layer, build_const_bool_layer, build_floor_div_unit, build_mod_unit,
    build_product_unit, build_selector_unit, GadgetBlock, GadgetKind,
};
use prngformer::kernel::{generate, PrecisionPolicy, WeightProgram};
use prngformer::oracle::{eval_circuit, lcg_stream, mt_seed, mt_stream};
use prngformer::stats::{heatmap_bytes, monobit, run_suite, BitStream, SuiteConfig};
use prngformer::tape::{decode_tape, Tape, TapeToken};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ z >> 30).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ z >> 27).wrapping_mul(0x94D049BB133111EB);
    z ^ z >> 31
}

/// Feeds a word's bits into a Boolean gadget block and reads the output
/// word back, asserting every output channel is within `tol` of a clean
/// bit before rounding.
fn bool_word(block: &GadgetBlock, w: u32, x: u64, y: Option<u64>, tol: f64) -> u64 {
    let mut inputs: Vec<(String, f64)> = Vec::new();
    for b in 0..w as usize {
        inputs.push((format!("x{b}"), (x >> b & 1) as f64));
        if let Some(yv) = y {
            inputs.push((format!("y{b}"), (yv >> b & 1) as f64));
        }
    }
    let named: Vec<(&str, f64)> = inputs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let out = block.eval(&named);
    let mut word = 0u64;
    for b in 0..w as usize {
        let v = out[&format!("out{b}")];
        let bit = v.round();
        assert!(
            (bit == 0.0 || bit == 1.0) && (v - bit).abs() <= tol,
            "{}: x={x} y={y:?} bit {b} reads {v}",
            block.tag
        );
        word |= (bit as u64) << b;
    }
    word
}

#[test]
fn a1_boolean_gadget_truth_tables_are_exhaustive_through_width_8() {
    for w in 1..=8u32 {
        let mask = (1u64 << w) - 1;
        for c in 0..=mask {
            let and = build_const_bool_layer(GadgetKind::ConstAnd, w, c);
            let or = build_const_bool_layer(GadgetKind::ConstOr, w, c);
            let xor = build_const_bool_layer(GadgetKind::ConstXor, w, c);
            for x in 0..=mask {
                assert_eq!(bool_word(&and, w, x, None, 1e-9), c & x);
                assert_eq!(bool_word(&or, w, x, None, 1e-9), c | x);
                assert_eq!(bool_word(&xor, w, x, None, 1e-9), c ^ x);
            }
        }
        let not = build_const_bool_layer(GadgetKind::Not, w, 0);
        for x in 0..=mask {
            assert_eq!(bool_word(&not, w, x, None, 1e-9), !x & mask);
        }
        for k in 0..w as u64 {
            let shl = build_const_bool_layer(GadgetKind::Shl, w, k);
            let shr = build_const_bool_layer(GadgetKind::Shr, w, k);
            for x in 0..=mask {
                assert_eq!(bool_word(&shl, w, x, None, 1e-9), x << k & mask);
                assert_eq!(bool_word(&shr, w, x, None, 1e-9), x >> k);
            }
        }
        let vand = build_binary_bool_layer(GadgetKind::VarAnd, w);
        let vor = build_binary_bool_layer(GadgetKind::VarOr, w);
        let vxor = build_binary_bool_layer(GadgetKind::VarXor, w);
        for x in 0..=mask {
            for y in 0..=mask {
                assert_eq!(bool_word(&vand, w, x, Some(y), 1e-9), x & y);
                assert_eq!(bool_word(&vor, w, x, Some(y), 1e-9), x | y);
                assert_eq!(bool_word(&vxor, w, x, Some(y), 1e-2), x ^ y);
            }
        }
    }
    println!("a1 pass: constant maps, shifts, and variable gates exhaustive for w <= 8");
}

#[test]
fn a2_arithmetic_unit_error_contracts_hold() {
    let m_bound = 8.0;
    let eps = 1e-2;
    let product = build_product_unit(m_bound, eps);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        for j in 0..100 {
            let a = -m_bound + 2.0 * m_bound * i as f64 / 99.0;
            let b = -m_bound + 2.0 * m_bound * j as f64 / 99.0;
            let got = product.eval(&[("a", a), ("b", b)])["product"];
            worst = worst.max((got - a * b).abs());
        }
    }
    assert!(worst <= eps, "product worst error {worst} over 10^4 grid points");

    let sel_eps = 1e-6;
    let selector = build_selector_unit(3, m_bound, 0.5, sel_eps);
    let x = [-8.0, 2.25, 8.0];
    let y = [7.0, -3.5, 0.0];
    for t in [0.5, 0.75, 1.0, 5.0, -0.5, -0.75, -1.0, -5.0] {
        let out = selector.eval(&[
            ("x0", x[0]),
            ("x1", x[1]),
            ("x2", x[2]),
            ("y0", y[0]),
            ("y1", y[1]),
            ("y2", y[2]),
            ("t", t),
        ]);
        let want = if t >= 0.5 { &x } else { &y };
        for i in 0..3 {
            let v = out[&format!("out{i}")];
            assert!(
                (v - want[i]).abs() <= sel_eps,
                "selector t={t} component {i}: {v} vs {}",
                want[i]
            );
        }
    }

    for n in 1..=16usize {
        let floor = build_floor_div_unit(n);
        let modu = build_mod_unit(n);
        for i in 1..=n * n {
            let f = floor.eval(&[("i", i as f64)])["floor"];
            let r = modu.eval(&[("i", i as f64)])["mod"];
            assert!((f - (i / n) as f64).abs() < 1e-9, "floor({i}/{n}) = {f}");
            assert!((r - (i % n) as f64).abs() < 1e-9, "{i} mod {n} = {r}");
            assert_eq!(f.round() as usize, i / n);
            assert_eq!(r.round() as usize, i % n);
        }
    }
    println!("a2 pass: product within 1e-2 on [-8,8]^2, selector exact branches, floor/mod exact to n=16");
}

#[test]
fn a3_lcg_programs_match_the_recurrence_for_1000_steps() {
    let mut state = 2024u64;
    for trial in 0..10 {
        let m = 2 + splitmix64(&mut state) % 255;
        let a = splitmix64(&mut state) % m;
        let c = splitmix64(&mut state) % m;
        let x0 = splitmix64(&mut state) % m;
        let spec = LcgSpec::new(a, c, m, x0).expect("sampled parameters are in range");
        let program = build_lcg_program(&spec).expect("modulus is within the limit");
        assert_eq!(program.layers.len(), 1, "trial {trial}: single layer");
        assert_eq!(program.layers[0].head_count(), 1, "trial {trial}: single head");

        let steps = 1000;
        let prompt = Tape::new(vec![TapeToken::Word(spec.x0)]);
        let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
            .expect("generation succeeds");
        let want = lcg_stream(&spec, steps);
        for (i, (token, expect)) in tape.tokens[1..].iter().zip(&want).enumerate() {
            assert_eq!(
                *token,
                TapeToken::Word(*expect),
                "trial {trial} (a={a}, c={c}, m={m}, x0={x0}) diverges at step {i}"
            );
        }
    }
    println!("a3 pass: 10 sampled specs, 1000 steps each, bit-exact with 1 layer / 1 head");
}

#[test]
fn a4_small_mt_matches_the_oracle_with_local_state_copies() {
    let spec = MtSpec::small();
    let blocks = 200;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the horizon");

    assert_eq!(tape, encode_tape(&spec, blocks).unwrap(), "full tape is bit-exact");
    let decoded = decode_tape(&tape).expect("well-formed tape");
    assert_eq!(decoded.outputs(), mt_stream(&spec, blocks), "{blocks} output words");

    let history = decoded.state_history();
    assert_eq!(history.len(), blocks + 1);
    for (b, pair) in history.windows(2).enumerate() {
        let twisted = b % spec.n;
        for j in 0..spec.n {
            if j != twisted {
                assert_eq!(pair[0][j], pair[1][j], "block {}: slot {j} must not change", b + 1);
            }
        }
    }
    println!("a4 pass: {blocks} output words bit-exact, each block rewrites exactly one state slot");
}

#[test]
fn a5_mt19937_reproduces_published_outputs() {
    let spec = MtSpec::mt19937(5489);
    let blocks = 2;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the horizon");
    let outputs = decode_tape(&tape).unwrap().outputs();
    assert_eq!(outputs, [3499211612, 581869302], "seed-5489 known answers");
    println!("a5 pass: full-size MT19937 reproduces its published first outputs");
}

#[test]
fn a5_wide_variant_matches_the_oracle_for_100_words() {
    let spec = MtSpec::w16();
    let blocks = 100;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the horizon");
    let outputs = decode_tape(&tape).unwrap().outputs();
    assert_eq!(outputs, mt_stream(&spec, blocks));
    println!("a5 pass: 16-bit, 16-word variant bit-exact for {blocks} output words");
}

/// Full-size hundred-word run: 62600 generated tokens, about 100
/// seconds, the long pole of the suite.
#[test]
fn a5_mt19937_matches_the_oracle_for_100_words() {
    let spec = MtSpec::mt19937(5489);
    let blocks = 100;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let tape = generate(&program, &prompt, steps, PrecisionPolicy::ExactDouble)
        .expect("within the horizon");
    let outputs = decode_tape(&tape).unwrap().outputs();
    assert_eq!(outputs, mt_stream(&spec, blocks));
    println!("a5 pass: full-size MT19937 bit-exact for {blocks} output words");
}

/// Runs a compiled circuit program on one assignment and returns the
/// output bits.
fn run_circuit(program: &WeightProgram, n_out: usize, assignment: &[bool]) -> Vec<bool> {
    let prompt =
        Tape::new(assignment.iter().map(|&b| TapeToken::Word(b as u64)).collect());
    let tape = generate(program, &prompt, n_out, PrecisionPolicy::ExactDouble)
        .expect("within the horizon");
    tape.tokens[assignment.len()..]
        .iter()
        .map(|t| match t {
            TapeToken::Word(v) => *v == 1,
            TapeToken::Arrow => panic!("unexpected arrow"),
        })
        .collect()
}

#[test]
fn a6_circuit_compiler_matches_the_evaluator_on_100_netlists() {
    let mut checked_exhaustive = 0usize;
    let mut state = 7u64;
    for seed in 0..100u64 {
        let netlist = random_netlist(seed);
        let program = compile_circuit(&netlist).expect("sampled netlist compiles");
        let n_in = netlist.inputs.len();
        let n_out = netlist.outputs.len();
        let assignments: Vec<Vec<bool>> = if n_in <= 10 {
            checked_exhaustive += 1;
            (0..1u64 << n_in)
                .map(|bits| (0..n_in).map(|i| bits >> i & 1 == 1).collect())
                .collect()
        } else {
            (0..1000)
                .map(|_| {
                    let word = splitmix64(&mut state);
                    (0..n_in).map(|i| word >> i & 1 == 1).collect()
                })
                .collect()
        };
        for assignment in &assignments {
            let got = run_circuit(&program, n_out, assignment);
            let want = eval_circuit(&netlist, assignment).expect("assignment fits");
            assert_eq!(got, want, "netlist {seed}, inputs {assignment:?}");
        }
    }
    println!(
        "a6 pass: 100 sampled netlists match the evaluator ({checked_exhaustive} checked exhaustively)"
    );
}

#[test]
fn a7_small_mt_stays_exact_under_mantissa_truncation() {
    let spec = MtSpec::small();
    let blocks = 20;
    let options = MtCompileOptions { max_blocks: blocks, ..Default::default() };
    let program = build_mt_program_with_options(&spec, &options).expect("spec is valid");
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let steps = blocks * (spec.n + 2);
    let reference = encode_tape(&spec, blocks).unwrap();

    let exact_at = |bits: u32| {
        let policy = PrecisionPolicy::Quantized { mantissa_bits: bits };
        matches!(generate(&program, &prompt, steps, policy), Ok(tape) if tape == reference)
    };
    for bits in [24, 16, 12] {
        assert!(exact_at(bits), "required width {bits} must stay bit-exact");
    }
    let minimum = (4..=12).rev().take_while(|&bits| exact_at(bits)).last().unwrap();
    assert!(minimum <= 12);
    println!("a7 pass: bit-exact at 24/16/12 mantissa bits; minimum exact width {minimum}");
}

#[test]
fn a8_statistical_battery_separates_reference_and_degenerate_streams() {
    let config = SuiteConfig::default();
    let alpha = 0.01;

    let words = mt_stream(&MtSpec::mt19937(5489), 31250);
    let reference = BitStream::from_words_lsb(&words, 32);
    assert_eq!(reference.len(), 1_000_000);
    for report in run_suite(&reference, alpha, &config) {
        assert!(report.passed(), "reference stream fails {}: p={}", report.test, report.p_value);
    }

    for bit in [false, true] {
        let mut degenerate = BitStream::new();
        for _ in 0..1_000_000 {
            degenerate.push(bit);
        }
        let report = monobit(&degenerate, alpha).unwrap();
        assert!(
            !report.passed() && report.p_value < 1e-10,
            "constant-{bit} stream: p = {}",
            report.p_value
        );
    }

    let mut rejections = std::collections::BTreeMap::<String, u32>::new();
    for seed in 1..=200u64 {
        let words = mt_stream(&MtSpec::mt19937(seed), 3125);
        let stream = BitStream::from_words_lsb(&words, 32);
        for report in run_suite(&stream, alpha, &config) {
            *rejections.entry(report.test).or_insert(0) += u32::from(
                matches!(report.outcome, prngformer::stats::Outcome::Fail),
            );
        }
    }
    // Expected rejections are Binomial(200, 0.01), mean 2; eight is
    // beyond five standard deviations.
    for (test, count) in &rejections {
        assert!(*count <= 8, "{test} rejected {count} of 200 reference streams");
    }
    println!("a8 pass: 10^6-bit reference stream passes all tests, degenerate streams fail, calibration within binomial bounds");
}

#[test]
fn a9_heatmap_matches_the_checkerboard_golden_file() {
    let golden = include_bytes!("data/checkerboard_15x8.pgm");
    let stream = BitStream::from_ascii(&"01".repeat(60)).unwrap();
    let bytes = heatmap_bytes(&stream, 15, 8).unwrap();
    assert_eq!(bytes, golden, "golden graymap must match byte-for-byte");
    let again = heatmap_bytes(&stream, 15, 8).unwrap();
    assert_eq!(bytes, again, "output is deterministic");
    println!("a9 pass: checkerboard graymap is byte-identical to the golden file");
}
