//! Command-line front end for the `prngformer` binary: compile parameter
//! specs to weight programs, generate tapes, verify programs against the
//! reference oracles, run the statistical battery, and export heatmaps.
//!
//! Exit codes are a stable contract: 0 success, 1 usage, 2 validation or
//! I/O, 3 a low-margin readout or a verification mismatch.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compile::{
    build_lcg_program_with_budget, build_mt_program_with_options, circuit::splitmix64,
    compile_circuit, encode_tape, CircuitNetlist, LcgSpec, MtCompileOptions, MtSpec,
    DEFAULT_EPS_BUDGET, DEFAULT_MAX_BLOCKS,
};
use crate::kernel::{generate, KernelError, PrecisionPolicy, WeightProgram};
use crate::oracle::{eval_circuit, lcg_stream, mt_seed};
use crate::stats::{heatmap_export, run_suite, BitStream, SuiteConfig, TestReport};
use crate::tape::{decode_tape, Tape, TapeToken};
use crate::util::atomic_write;

/// Environment variable overriding the default per-channel error budget
/// used by the LCG and Mersenne Twister compilers.
pub const EPS_BUDGET_ENV: &str = "PRNGFORMER_EPS_BUDGET";

const TAPE_CONVENTION: &str = "Tape inputs (files containing '=>' separators) are reduced to a \
bit stream by decoding the tape and unpacking only the emitted output words, least significant \
bit first. Raw inputs are ASCII '0'/'1' characters, whitespace ignored.";

#[derive(Parser)]
#[command(
    name = "prngformer",
    version,
    about = "Compile PRNGs and Boolean circuits into transformer weights, run them, and test the output",
    after_help = TAPE_CONVENTION
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SpecKind {
    Lcg,
    Mt,
    Circuit,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a JSON parameter spec into a weight-program file.
    Compile {
        /// Spec flavor: lcg, mt, or circuit.
        #[arg(long, value_enum)]
        kind: SpecKind,
        /// JSON spec file (LCG parameters, MT parameters, or a netlist).
        #[arg(long)]
        spec: PathBuf,
        /// Output path for the serialized weight program.
        #[arg(long)]
        out: PathBuf,
        /// Generation horizon in tape blocks (mt only).
        #[arg(long, default_value_t = DEFAULT_MAX_BLOCKS)]
        max_blocks: usize,
    },
    /// Run a weight program autoregressively from a prompt tape.
    Generate {
        /// Weight-program file produced by compile.
        #[arg(long)]
        program: PathBuf,
        /// Prompt tape: one token per line, numbers or '=>'.
        #[arg(long)]
        prompt: PathBuf,
        /// Number of tokens to generate.
        #[arg(long)]
        steps: usize,
        /// Round every intermediate to this many mantissa bits.
        #[arg(long)]
        mantissa_bits: Option<u32>,
        /// Output tape file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate from a program and compare against the matching oracle.
    Verify {
        /// Weight-program file produced by compile.
        #[arg(long)]
        program: PathBuf,
        /// The JSON spec the program was compiled from.
        #[arg(long)]
        spec: PathBuf,
        /// Output words to verify (lcg, mt) or random input assignments
        /// to check (circuit).
        #[arg(long)]
        steps: usize,
        /// Seed for the circuit assignment corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the statistical battery over a tape or raw bit file.
    Stats {
        /// Input file: a tape (contains '=>') or ASCII bits.
        #[arg(long = "in")]
        input: PathBuf,
        /// Significance level.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Comma-separated subset of test names to report.
        #[arg(long)]
        tests: Option<String>,
        /// Bits per output word when the input is a tape.
        #[arg(long)]
        word_bits: Option<u32>,
        /// Report file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        blocks: BlockArgs,
    },
    /// Render the leading bits of a stream as a P5 graymap.
    Heatmap {
        /// Input file: a tape (contains '=>') or ASCII bits.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Output image path.
        #[arg(long)]
        out: PathBuf,
        /// Bits per output word when the input is a tape.
        #[arg(long)]
        word_bits: Option<u32>,
    },
}

#[derive(Args)]
struct BlockArgs {
    /// Block frequency block size M.
    #[arg(long, default_value_t = 128)]
    block_m: usize,
    /// Serial test pattern length m.
    #[arg(long, default_value_t = 2)]
    serial_m: u32,
    /// Approximate entropy pattern length m.
    #[arg(long, default_value_t = 2)]
    apen_m: u32,
}

enum CliError {
    Usage(String),
    Validation(String),
    Margin(String),
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::LowMargin { .. } => CliError::Margin(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Parses arguments from the environment, runs the selected subcommand,
/// and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Margin(msg)) => {
            eprintln!("verification failure: {msg}");
            3
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compile { kind, spec, out, max_blocks } => {
            cmd_compile(kind, &spec, &out, max_blocks)
        }
        Command::Generate { program, prompt, steps, mantissa_bits, out } => {
            cmd_generate(&program, &prompt, steps, mantissa_bits, out.as_deref())
        }
        Command::Verify { program, spec, steps, seed } => {
            cmd_verify(&program, &spec, steps, seed)
        }
        Command::Stats { input, alpha, tests, word_bits, out, blocks } => {
            cmd_stats(&input, alpha, tests.as_deref(), word_bits, out.as_deref(), &blocks)
        }
        Command::Heatmap { input, width, height, out, word_bits } => {
            cmd_heatmap(&input, width, height, &out, word_bits)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn eps_budget() -> Result<f64, CliError> {
    match std::env::var(EPS_BUDGET_ENV) {
        Ok(text) => text.trim().parse::<f64>().map_err(|_| {
            CliError::Validation(format!("{EPS_BUDGET_ENV}={text:?} is not a number"))
        }),
        Err(_) => Ok(DEFAULT_EPS_BUDGET),
    }
}

fn cmd_compile(
    kind: SpecKind,
    spec_path: &Path,
    out: &Path,
    max_blocks: usize,
) -> Result<(), CliError> {
    let text = read(spec_path)?;
    let eps = eps_budget()?;
    let program = match kind {
        SpecKind::Lcg => {
            let spec = LcgSpec::from_json(&text)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            build_lcg_program_with_budget(&spec, eps)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        SpecKind::Mt => {
            let spec = MtSpec::from_json(&text)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let options = MtCompileOptions { eps_budget: eps, max_blocks };
            build_mt_program_with_options(&spec, &options)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        SpecKind::Circuit => {
            let netlist = CircuitNetlist::from_json(&text)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            compile_circuit(&netlist).map_err(|e| CliError::Validation(e.to_string()))?
        }
    };
    let json = program.to_json()?;
    atomic_write(out, json.as_bytes())?;
    let d_final = program.readout.rows();
    println!("kind:         {:?}", kind);
    println!("layers:       {}", program.layers.len());
    println!("stream width: {} -> {d_final}", program.w + 3);
    println!("max |weight|: {}", program.max_abs_weight());
    match program.max_positions() {
        Some(max) => println!("horizon:      {max} positions"),
        None => println!("horizon:      unlimited"),
    }
    println!("wrote:        {} ({} bytes)", out.display(), json.len());
    Ok(())
}

fn precision(mantissa_bits: Option<u32>) -> PrecisionPolicy {
    match mantissa_bits {
        Some(bits) => PrecisionPolicy::Quantized { mantissa_bits: bits },
        None => PrecisionPolicy::ExactDouble,
    }
}

fn cmd_generate(
    program_path: &Path,
    prompt_path: &Path,
    steps: usize,
    mantissa_bits: Option<u32>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let program = WeightProgram::from_json(&read(program_path)?)?;
    let prompt = Tape::parse_text(&read(prompt_path)?)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let tape = generate(&program, &prompt, steps, precision(mantissa_bits))?;
    let text = tape.to_text();
    match out {
        Some(path) => atomic_write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Spec-file flavor, from an explicit "kind" field when present and the
/// distinguishing field names otherwise.
fn sniff_kind(text: &str) -> Result<SpecKind, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("spec file: {e}")))?;
    if let Some(kind) = value.get("kind").and_then(|v| v.as_str()) {
        return match kind {
            "lcg" => Ok(SpecKind::Lcg),
            "mt" => Ok(SpecKind::Mt),
            "circuit" => Ok(SpecKind::Circuit),
            other => Err(CliError::Validation(format!("unknown spec kind {other:?}"))),
        };
    }
    if value.get("gates").is_some() {
        return Ok(SpecKind::Circuit);
    }
    if value.get("n").is_some() && value.get("r").is_some() {
        return Ok(SpecKind::Mt);
    }
    Ok(SpecKind::Lcg)
}

fn cmd_verify(
    program_path: &Path,
    spec_path: &Path,
    steps: usize,
    seed: u64,
) -> Result<(), CliError> {
    let program = WeightProgram::from_json(&read(program_path)?)?;
    let spec_text = read(spec_path)?;
    let program_kind = program
        .meta
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| {
            CliError::Validation("program metadata does not record its spec kind".into())
        })?
        .to_string();
    let spec_kind = sniff_kind(&spec_text)?;
    let spec_kind_name = match spec_kind {
        SpecKind::Lcg => "lcg",
        SpecKind::Mt => "mt",
        SpecKind::Circuit => "circuit",
    };
    if program_kind != spec_kind_name {
        return Err(CliError::Usage(format!(
            "program was compiled from a {program_kind:?} spec, but the spec file is {spec_kind_name:?}"
        )));
    }
    match spec_kind {
        SpecKind::Lcg => verify_lcg(&program, &spec_text, steps),
        SpecKind::Mt => verify_mt(&program, &spec_text, steps),
        SpecKind::Circuit => verify_circuit(&program, &spec_text, steps, seed),
    }
}

fn verify_lcg(program: &WeightProgram, spec_text: &str, steps: usize) -> Result<(), CliError> {
    let spec =
        LcgSpec::from_json(spec_text).map_err(|e| CliError::Validation(e.to_string()))?;
    let want = lcg_stream(&spec, steps);
    let prompt = Tape::new(vec![TapeToken::Word(spec.x0)]);
    let tape = generate(program, &prompt, steps, PrecisionPolicy::ExactDouble)?;
    for (i, (&token, &expect)) in tape.tokens[1..].iter().zip(&want).enumerate() {
        let got = match token {
            TapeToken::Word(w) => w,
            TapeToken::Arrow => {
                return Err(CliError::Margin(format!(
                    "first divergence at output {i}: got an arrow, want {expect}"
                )))
            }
        };
        if got != expect {
            return Err(CliError::Margin(format!(
                "first divergence at output {i}: got {got}, want {expect}"
            )));
        }
    }
    println!("verified {steps} outputs bit-exact");
    Ok(())
}

fn verify_mt(program: &WeightProgram, spec_text: &str, steps: usize) -> Result<(), CliError> {
    let spec =
        MtSpec::from_json(spec_text).map_err(|e| CliError::Validation(e.to_string()))?;
    let block = spec.n + 2;
    if let Some(max) = program.max_positions() {
        let capacity = max.saturating_sub(spec.n + 1) / block;
        if steps > capacity {
            return Err(CliError::Validation(format!(
                "program horizon holds {capacity} blocks, {steps} requested"
            )));
        }
    }
    let reference = encode_tape(&spec, steps).map_err(|e| CliError::Validation(e.to_string()))?;
    let prompt = Tape::prompt(&mt_seed(&spec).words);
    let tape = generate(program, &prompt, steps * block, PrecisionPolicy::ExactDouble)?;
    for (i, (got, want)) in tape.tokens.iter().zip(&reference.tokens).enumerate() {
        if got != want {
            return Err(CliError::Margin(format!(
                "first divergence at tape position {} (block {}): got {got:?}, want {want:?}",
                i + 1,
                i.saturating_sub(spec.n + 1) / block + 1
            )));
        }
    }
    println!("verified {steps} output words ({} tape positions) bit-exact", tape.len());
    Ok(())
}

fn verify_circuit(
    program: &WeightProgram,
    spec_text: &str,
    steps: usize,
    seed: u64,
) -> Result<(), CliError> {
    let netlist = CircuitNetlist::from_json(spec_text)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let n_in = netlist.inputs.len();
    let n_out = netlist.outputs.len();
    let mut state = seed;
    for case in 0..steps {
        let word = splitmix64(&mut state);
        let assignment: Vec<bool> = (0..n_in).map(|i| word >> (i % 64) & 1 == 1).collect();
        let want = eval_circuit(&netlist, &assignment)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let prompt = Tape::new(
            assignment.iter().map(|&b| TapeToken::Word(b as u64)).collect(),
        );
        let tape = generate(program, &prompt, n_out, PrecisionPolicy::ExactDouble)?;
        for (o, (&token, &expect)) in tape.tokens[n_in..].iter().zip(&want).enumerate() {
            if token != TapeToken::Word(expect as u64) {
                let bits: String =
                    assignment.iter().map(|&b| if b { '1' } else { '0' }).collect();
                return Err(CliError::Margin(format!(
                    "assignment {case} (inputs {bits}): output {o} diverges, got {token:?}, want {}",
                    expect as u64
                )));
            }
        }
    }
    println!("verified {steps} random assignments bit-exact (seed {seed})");
    Ok(())
}

/// Reads a bit stream from a tape file (decoded output words) or a raw
/// ASCII bit file.
fn load_stream(path: &Path, word_bits: Option<u32>) -> Result<BitStream, CliError> {
    let text = read(path)?;
    if text.contains("=>") {
        let bits = word_bits.ok_or_else(|| {
            CliError::Validation(
                "input is a tape; pass --word-bits to unpack its output words".into(),
            )
        })?;
        if !(1..=64).contains(&bits) {
            return Err(CliError::Validation(format!(
                "word-bits must lie in [1, 64], got {bits}"
            )));
        }
        let tape =
            Tape::parse_text(&text).map_err(|e| CliError::Validation(e.to_string()))?;
        let decoded =
            decode_tape(&tape).map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(BitStream::from_words_lsb(&decoded.outputs(), bits))
    } else {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        BitStream::from_ascii(&compact).map_err(|e| CliError::Validation(e.to_string()))
    }
}

const TEST_NAMES: [&str; 9] = [
    "monobit",
    "block-frequency",
    "runs",
    "longest-run",
    "cusum-fwd",
    "cusum-rev",
    "serial",
    "approximate-entropy",
    "spectral-dft",
];

fn cmd_stats(
    input: &Path,
    alpha: f64,
    tests: Option<&str>,
    word_bits: Option<u32>,
    out: Option<&Path>,
    blocks: &BlockArgs,
) -> Result<(), CliError> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(CliError::Validation(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let selected: Option<Vec<&str>> = match tests {
        None => None,
        Some(list) => {
            let names: Vec<&str> = list.split(',').map(str::trim).collect();
            for name in &names {
                if !TEST_NAMES.contains(name) {
                    return Err(CliError::Validation(format!(
                        "unknown test {name:?}; available: {}",
                        TEST_NAMES.join(", ")
                    )));
                }
            }
            Some(names)
        }
    };
    let stream = load_stream(input, word_bits)?;
    let config = SuiteConfig {
        block_m: blocks.block_m,
        serial_m: blocks.serial_m,
        apen_m: blocks.apen_m,
    };
    let reports: Vec<TestReport> = run_suite(&stream, alpha, &config)
        .into_iter()
        .filter(|r| selected.as_ref().is_none_or(|names| names.contains(&r.test.as_str())))
        .collect();
    let mut text = String::new();
    text.push_str(&format!("# {} bits, alpha {alpha}\n", stream.len()));
    for report in &reports {
        text.push_str(&report.line());
        text.push('\n');
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let skipped = reports
        .iter()
        .filter(|r| matches!(r.outcome, crate::stats::Outcome::Skip { .. }))
        .count();
    text.push_str(&format!(
        "# passed {passed} of {} ({skipped} skipped)\n",
        reports.len() - skipped
    ));
    match out {
        Some(path) => atomic_write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_heatmap(
    input: &Path,
    width: usize,
    height: usize,
    out: &Path,
    word_bits: Option<u32>,
) -> Result<(), CliError> {
    let stream = load_stream(input, word_bits)?;
    heatmap_export(&stream, width, height, out)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    println!("wrote {} ({width}x{height})", out.display());
    Ok(())
}
