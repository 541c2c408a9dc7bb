//! NIST SP 800-22 subset battery and bitstream heatmap export.
//!
//! Eight tests are implemented: frequency (monobit), block frequency,
//! runs, longest run of ones, cumulative sums (both directions), serial,
//! approximate entropy, and the spectral DFT test. The remaining tests
//! of the suite (templates, rank, universal, linear complexity, random
//! excursions) are out of scope. Every statistic follows the standard's
//! published formulas; the special functions behind the p-values are the
//! crate's own erfc and regularized incomplete gamma.

mod battery;
mod heatmap;

pub use battery::{
    approximate_entropy, block_frequency, cusum, longest_run, monobit, runs, serial,
    spectral_dft, CusumMode,
};
pub use heatmap::{heatmap_bytes, heatmap_export};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Significance level used when a single test is run without an explicit
/// one; the battery's conventional default.
pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{test}: stream has {got} bits, the test needs at least {min}")]
    TooShort { test: &'static str, min: usize, got: usize },
    #[error("{test}: {message}")]
    BadParam { test: &'static str, message: String },
    #[error("heatmap geometry {width}x{height} exceeds the stream length {length}")]
    BadGeometry { width: usize, height: usize, length: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A packed bit sequence, least significant bit of each word first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        BitStream { words: Vec::new(), len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let slot = self.len / 64;
        if slot == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[slot] |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (length {})", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of one bits.
    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parses an ASCII string of '0' and '1' characters.
    pub fn from_ascii(text: &str) -> Result<Self, StatsError> {
        let mut stream = BitStream::new();
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => stream.push(false),
                '1' => stream.push(true),
                other => {
                    return Err(StatsError::BadParam {
                        test: "bitstream",
                        message: format!("character {other:?} at offset {i} is not 0 or 1"),
                    })
                }
            }
        }
        Ok(stream)
    }

    /// Unpacks `w`-bit words into a stream, least significant bit first
    /// within each word. This is the convention for turning a generated
    /// tape's output words into a testable sequence.
    pub fn from_words_lsb(words: &[u64], w: u32) -> Self {
        assert!((1..=64).contains(&w), "word width must be in [1, 64]");
        let mut stream = BitStream::new();
        for &word in words {
            for j in 0..w {
                stream.push(word >> j & 1 == 1);
            }
        }
        stream
    }

    /// The bits as ±1 values, for sum- and transform-based statistics.
    pub(crate) fn signs(&self) -> Vec<f64> {
        (0..self.len).map(|i| if self.get(i) { 1.0 } else { -1.0 }).collect()
    }
}

impl Default for BitStream {
    fn default() -> Self {
        BitStream::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip { reason: String },
}

/// One test's result: the raw statistic, its p-value, and the verdict at
/// the significance level the test was run with. `extras` carries the
/// test's secondary quantities (chi-square, z, second p-value, bin
/// counts) keyed by short names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl TestReport {
    pub(crate) fn from_p(test: &str, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let outcome = if p_value >= alpha { Outcome::Pass } else { Outcome::Fail };
        TestReport {
            test: test.to_string(),
            statistic,
            p_value,
            alpha,
            outcome,
            extras: BTreeMap::new(),
        }
    }

    pub(crate) fn with_extras(mut self, pairs: &[(&str, f64)]) -> Self {
        for &(k, v) in pairs {
            self.extras.insert(k.to_string(), v);
        }
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.outcome, Outcome::Pass)
    }

    /// One fixed-width text line, the row format of the battery report.
    pub fn line(&self) -> String {
        let verdict = match &self.outcome {
            Outcome::Pass => "PASS".to_string(),
            Outcome::Fail => "FAIL".to_string(),
            Outcome::Skip { reason } => format!("SKIP ({reason})"),
        };
        format!(
            "{:<20} statistic={:<14.6} p={:<12.6} {}",
            self.test, self.statistic, self.p_value, verdict
        )
    }
}

/// Block and pattern sizes for the parameterized tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Block frequency block size M.
    pub block_m: usize,
    /// Serial pattern length m.
    pub serial_m: u32,
    /// Approximate entropy pattern length m.
    pub apen_m: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { block_m: 128, serial_m: 2, apen_m: 2 }
    }
}

/// Runs every implemented test in a fixed order, reporting tests whose
/// preconditions fail as skipped rather than dropping them. The order is
/// monobit, block-frequency, runs, longest-run, cusum-fwd, cusum-rev,
/// serial, approximate-entropy, spectral-dft.
pub fn run_suite(stream: &BitStream, alpha: f64, config: &SuiteConfig) -> Vec<TestReport> {
    let runs_of: [(&str, Box<dyn Fn() -> Result<TestReport, StatsError>>); 9] = [
        ("monobit", Box::new(|| monobit(stream, alpha))),
        ("block-frequency", Box::new(|| block_frequency(stream, config.block_m, alpha))),
        ("runs", Box::new(|| runs(stream, alpha))),
        ("longest-run", Box::new(|| longest_run(stream, alpha))),
        ("cusum-fwd", Box::new(|| cusum(stream, CusumMode::Forward, alpha))),
        ("cusum-rev", Box::new(|| cusum(stream, CusumMode::Reverse, alpha))),
        ("serial", Box::new(|| serial(stream, config.serial_m, alpha))),
        (
            "approximate-entropy",
            Box::new(|| approximate_entropy(stream, config.apen_m, alpha)),
        ),
        ("spectral-dft", Box::new(|| spectral_dft(stream, alpha))),
    ];
    runs_of
        .iter()
        .map(|(name, run)| match run() {
            Ok(report) => report,
            Err(err) => TestReport {
                test: name.to_string(),
                statistic: f64::NAN,
                p_value: f64::NAN,
                alpha,
                outcome: Outcome::Skip { reason: err.to_string() },
                extras: BTreeMap::new(),
            },
        })
        .collect()
}
