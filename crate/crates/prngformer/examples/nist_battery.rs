//! Runs the NIST SP 800-22 subset over two streams: MT19937 output,
//! which should pass everything, and a heavily biased coin, which
//! should fail the frequency-sensitive tests.
//!
//! Run with: cargo run --example nist_battery

use prngformer::compile::MtSpec;
use prngformer::oracle::mt_stream;
use prngformer::stats::{run_suite, BitStream, SuiteConfig};

fn main() {
    let alpha = 0.01;
    let config = SuiteConfig::default();

    let words = mt_stream(&MtSpec::mt19937(5489), 4096);
    let twister = BitStream::from_words_lsb(&words, 32);

    let mut lfsr: u32 = 0xACE1;
    let mut biased = BitStream::new();
    for _ in 0..131072 {
        lfsr = lfsr >> 1 ^ (lfsr & 1).wrapping_neg() & 0xB400;
        biased.push(lfsr & 3 == 0);
    }

    for (label, stream) in [("MT19937, seed 5489", &twister), ("25% biased coin", &biased)] {
        println!("{label}: {} bits, alpha {alpha}", stream.len());
        for report in run_suite(stream, alpha, &config) {
            println!("  {}", report.line());
        }
        println!();
    }
}
