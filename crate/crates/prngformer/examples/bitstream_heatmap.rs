//! Renders generator output as a portable graymap so structure is
//! visible at a glance: a compiled twister's bits look like noise, a
//! short-period LCG's low bits form stripes.
//!
//! Run with: cargo run --example bitstream_heatmap

use prngformer::compile::{LcgSpec, MtSpec};
use prngformer::oracle::{lcg_stream, mt_stream};
use prngformer::stats::{heatmap_export, BitStream};

fn main() {
    let dir = std::env::temp_dir();

    let words = mt_stream(&MtSpec::small(), 2048);
    let twister = BitStream::from_words_lsb(&words, 8);
    let mt_path = dir.join("twister_bits.pgm");
    heatmap_export(&twister, 128, 128, &mt_path).expect("stream covers the image");

    let spec = LcgSpec { a: 37, c: 11, m: 256, x0: 1, w: 8 };
    let words = lcg_stream(&spec, 2048);
    let lcg = BitStream::from_words_lsb(&words, 8);
    let lcg_path = dir.join("lcg_bits.pgm");
    heatmap_export(&lcg, 128, 128, &lcg_path).expect("stream covers the image");

    println!("wrote {} (dense noise)", mt_path.display());
    println!("wrote {} (periodic stripes)", lcg_path.display());
    println!("view with any PGM-capable image viewer");
}
