//! End-to-end tests for the `prngformer` binary: every subcommand, the
//! exit-code contract, and the eps-budget environment override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prngformer::compile::{encode_tape, MtSpec};
use prngformer::kernel::WeightProgram;
use prngformer::oracle::mt_seed;
use prngformer::tape::Tape;

const LCG_SPEC: &str = r#"{"a": 5, "c": 3, "m": 16, "x0": 7}"#;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prngformer"));
    cmd.env_remove("PRNGFORMER_EPS_BUDGET");
    cmd
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prngformer-cli-{name}-{}", std::process::id()));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn expect_code(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout(output),
        stderr(output)
    );
}

/// Compiles `spec_text` with the given kind into `dir/program.json` and
/// returns the program path.
fn compile(dir: &Path, kind: &str, spec_text: &str) -> PathBuf {
    let spec = dir.join("spec.json");
    let program = dir.join("program.json");
    write(&spec, spec_text);
    let out = bin()
        .args(["compile", "--kind", kind, "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&program)
        .output()
        .unwrap();
    expect_code(&out, 0);
    program
}

#[test]
fn compile_reports_a_program_summary() {
    let dir = workdir("compile-summary");
    let program = compile(&dir, "lcg", LCG_SPEC);
    let out = bin()
        .args(["compile", "--kind", "lcg", "--spec"])
        .arg(dir.join("spec.json"))
        .arg("--out")
        .arg(&program)
        .output()
        .unwrap();
    expect_code(&out, 0);
    let text = stdout(&out);
    for needle in ["layers:", "max |weight|:", "horizon:", "wrote:"] {
        assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
    }
    let json = std::fs::read_to_string(&program).unwrap();
    WeightProgram::from_json(&json).unwrap();
}

#[test]
fn compile_rejects_an_oversized_modulus() {
    let dir = workdir("compile-reject");
    let spec = dir.join("spec.json");
    write(&spec, r#"{"a": 5, "c": 3, "m": 100000, "x0": 7}"#);
    let out = bin()
        .args(["compile", "--kind", "lcg", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(dir.join("program.json"))
        .output()
        .unwrap();
    expect_code(&out, 2);
    assert!(stderr(&out).contains("modulus 100000 exceeds"));
}

#[test]
fn generate_echoes_the_prompt_at_zero_steps() {
    let dir = workdir("generate-echo");
    let program = compile(&dir, "lcg", LCG_SPEC);
    let prompt = dir.join("prompt.txt");
    write(&prompt, "7\n");
    let out = bin()
        .args(["generate", "--program"])
        .arg(&program)
        .arg("--prompt")
        .arg(&prompt)
        .args(["--steps", "0"])
        .output()
        .unwrap();
    expect_code(&out, 0);
    assert_eq!(stdout(&out), "7\n");
}

#[test]
fn generate_extends_an_lcg_tape() {
    let dir = workdir("generate-lcg");
    let program = compile(&dir, "lcg", LCG_SPEC);
    let prompt = dir.join("prompt.txt");
    write(&prompt, "7\n");
    let tape_path = dir.join("tape.txt");
    let out = bin()
        .args(["generate", "--program"])
        .arg(&program)
        .arg("--prompt")
        .arg(&prompt)
        .args(["--steps", "4", "--out"])
        .arg(&tape_path)
        .output()
        .unwrap();
    expect_code(&out, 0);
    assert_eq!(std::fs::read_to_string(&tape_path).unwrap(), "7\n6\n1\n8\n11\n");
}

#[test]
fn quantized_generation_matches_exact_doubles() {
    let dir = workdir("generate-quantized");
    let spec = MtSpec::small();
    let program = compile(&dir, "mt", &serde_json::to_string(&spec).unwrap());
    let prompt = dir.join("prompt.txt");
    write(&prompt, &Tape::prompt(&mt_seed(&spec).words).to_text());
    let steps = 5 * (spec.n + 2);
    let run = |extra: &[&str]| {
        let out = bin()
            .args(["generate", "--program"])
            .arg(&program)
            .arg("--prompt")
            .arg(&prompt)
            .args(["--steps", &steps.to_string()])
            .args(extra)
            .output()
            .unwrap();
        expect_code(&out, 0);
        stdout(&out)
    };
    let exact = run(&[]);
    let quantized = run(&["--mantissa-bits", "16"]);
    assert_eq!(exact, quantized);
    assert_eq!(exact, encode_tape(&spec, 5).unwrap().to_text());
}

#[test]
fn verify_accepts_a_fresh_compile() {
    let dir = workdir("verify-ok");
    let spec = MtSpec::small();
    let program = compile(&dir, "mt", &serde_json::to_string(&spec).unwrap());
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program)
        .arg("--spec")
        .arg(dir.join("spec.json"))
        .args(["--steps", "8"])
        .output()
        .unwrap();
    expect_code(&out, 0);
    assert!(stdout(&out).contains("bit-exact"));
}

#[test]
fn verify_detects_a_perturbed_weight() {
    let dir = workdir("verify-tamper");
    let spec = MtSpec::small();
    let program_path = compile(&dir, "mt", &serde_json::to_string(&spec).unwrap());
    let mut program =
        WeightProgram::from_json(&std::fs::read_to_string(&program_path).unwrap()).unwrap();
    let last = program.layers.len() - 1;
    program.layers[last].ffn.b1[0] += 64.0;
    write(&program_path, &program.to_json().unwrap());
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program_path)
        .arg("--spec")
        .arg(dir.join("spec.json"))
        .args(["--steps", "8"])
        .output()
        .unwrap();
    expect_code(&out, 3);
    assert!(stderr(&out).contains("verification failure"), "stderr: {}", stderr(&out));
}

#[test]
fn verify_passes_vacuously_at_zero_steps() {
    let dir = workdir("verify-zero");
    let program = compile(&dir, "lcg", LCG_SPEC);
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program)
        .arg("--spec")
        .arg(dir.join("spec.json"))
        .args(["--steps", "0"])
        .output()
        .unwrap();
    expect_code(&out, 0);
}

#[test]
fn verify_rejects_a_kind_mismatch() {
    let dir = workdir("verify-mismatch");
    let spec = MtSpec::small();
    let program = compile(&dir, "mt", &serde_json::to_string(&spec).unwrap());
    let lcg_spec = dir.join("lcg.json");
    write(&lcg_spec, LCG_SPEC);
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program)
        .arg("--spec")
        .arg(&lcg_spec)
        .args(["--steps", "4"])
        .output()
        .unwrap();
    expect_code(&out, 1);
    assert!(stderr(&out).contains("usage error"));
}

#[test]
fn verify_rejects_steps_beyond_the_horizon() {
    let dir = workdir("verify-horizon");
    let spec = MtSpec::small();
    let spec_path = dir.join("spec.json");
    let program = dir.join("program.json");
    write(&spec_path, &serde_json::to_string(&spec).unwrap());
    let out = bin()
        .args(["compile", "--kind", "mt", "--spec"])
        .arg(&spec_path)
        .arg("--out")
        .arg(&program)
        .args(["--max-blocks", "4"])
        .output()
        .unwrap();
    expect_code(&out, 0);
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program)
        .arg("--spec")
        .arg(&spec_path)
        .args(["--steps", "5"])
        .output()
        .unwrap();
    expect_code(&out, 2);
    assert!(stderr(&out).contains("horizon"));
}

#[test]
fn verify_checks_circuit_assignments() {
    let dir = workdir("verify-circuit");
    let netlist = r#"{
        "inputs": ["x1", "x2", "x3"],
        "gates": [
            {"name": "g1", "kind": "and", "args": ["x1", "x2"]},
            {"name": "g2", "kind": "not", "args": ["x3"]},
            {"name": "g3", "kind": "or", "args": ["g1", "g2"]}
        ],
        "outputs": ["g3"]
    }"#;
    let program = compile(&dir, "circuit", netlist);
    let out = bin()
        .args(["verify", "--program"])
        .arg(&program)
        .arg("--spec")
        .arg(dir.join("spec.json"))
        .args(["--steps", "16", "--seed", "7"])
        .output()
        .unwrap();
    expect_code(&out, 0);
    assert!(stdout(&out).contains("16 random assignments"));
}

#[test]
fn stats_flags_a_constant_stream() {
    let dir = workdir("stats-constant");
    let bits = dir.join("bits.txt");
    write(&bits, &"0".repeat(2000));
    let out = bin()
        .args(["stats", "--in"])
        .arg(&bits)
        .output()
        .unwrap();
    expect_code(&out, 0);
    let text = stdout(&out);
    let monobit = text.lines().find(|l| l.starts_with("monobit")).unwrap();
    assert!(monobit.contains("FAIL"), "line: {monobit}");
    assert!(text.contains("# 2000 bits"));
}

#[test]
fn stats_honors_a_test_subset() {
    let dir = workdir("stats-subset");
    let bits = dir.join("bits.txt");
    write(&bits, &"01".repeat(1000));
    let out = bin()
        .args(["stats", "--in"])
        .arg(&bits)
        .args(["--tests", "monobit,runs"])
        .output()
        .unwrap();
    expect_code(&out, 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "rows: {rows:?}");
    assert!(rows[0].starts_with("monobit"));
    assert!(rows[1].starts_with("runs"));

    let out = bin()
        .args(["stats", "--in"])
        .arg(&bits)
        .args(["--tests", "bogus"])
        .output()
        .unwrap();
    expect_code(&out, 2);
    assert!(stderr(&out).contains("unknown test"));
}

#[test]
fn stats_reads_tapes_when_word_bits_is_given() {
    let dir = workdir("stats-tape");
    let spec = MtSpec::small();
    let tape_path = dir.join("tape.txt");
    write(&tape_path, &encode_tape(&spec, 40).unwrap().to_text());
    let out = bin()
        .args(["stats", "--in"])
        .arg(&tape_path)
        .output()
        .unwrap();
    expect_code(&out, 2);
    assert!(stderr(&out).contains("--word-bits"));

    let report = dir.join("report.txt");
    let out = bin()
        .args(["stats", "--in"])
        .arg(&tape_path)
        .args(["--word-bits", "8", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    expect_code(&out, 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("# 320 bits"), "report:\n{text}");
}

#[test]
fn heatmap_renders_tape_bits() {
    let dir = workdir("heatmap");
    let spec = MtSpec::small();
    let tape_path = dir.join("tape.txt");
    write(&tape_path, &encode_tape(&spec, 32).unwrap().to_text());
    let image = dir.join("bits.pgm");
    let out = bin()
        .args(["heatmap", "--in"])
        .arg(&tape_path)
        .args(["--width", "16", "--height", "16", "--word-bits", "8", "--out"])
        .arg(&image)
        .output()
        .unwrap();
    expect_code(&out, 0);
    let bytes = std::fs::read(&image).unwrap();
    let header = b"P5\n16 16\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 256);
}

#[test]
fn eps_budget_env_overrides_the_default() {
    let dir = workdir("eps-env");
    let spec_path = dir.join("spec.json");
    write(&spec_path, &serde_json::to_string(&MtSpec::small()).unwrap());
    let run = |budget: &str| {
        bin()
            .env("PRNGFORMER_EPS_BUDGET", budget)
            .args(["compile", "--kind", "mt", "--spec"])
            .arg(&spec_path)
            .arg("--out")
            .arg(dir.join("program.json"))
            .output()
            .unwrap()
    };
    let out = run("abc");
    expect_code(&out, 2);
    assert!(stderr(&out).contains("not a number"));
    let out = run("0.9");
    expect_code(&out, 2);
    assert!(stderr(&out).contains("eps budget"));
    expect_code(&run("0.05"), 0);
}

#[test]
fn exit_codes_follow_the_contract() {
    let out = bin().arg("--help").output().unwrap();
    expect_code(&out, 0);
    assert!(stdout(&out).contains("Tape inputs"));

    let out = bin().arg("frobnicate").output().unwrap();
    expect_code(&out, 1);

    let out = bin()
        .args(["generate", "--program", "/nonexistent.json"])
        .args(["--prompt", "/nonexistent.txt", "--steps", "1"])
        .output()
        .unwrap();
    expect_code(&out, 2);
}
