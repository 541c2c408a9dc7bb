//! Compile pseudo-random number generators and constant-depth Boolean
//! circuits into explicit decoder-only transformer weights, execute them
//! with a small float64 interpreter, and check the results bit for bit
//! against conventional integer reference implementations.
//!
//! The crate is organized as a pipeline:
//!
//! * [`kernel`]: the transformer interpreter: token embedding, causal
//!   attention, GeLU feed-forward blocks, readout, autoregressive
//!   generation, precision policies, and a versioned serialization format
//!   for weight programs.
//! * [`gadgets`]: closed-form weight blocks (products, selectors, integer
//!   floor/mod, Boolean operations) that the compilers assemble.
//! * [`compile`]: compilers from LCG parameters, Mersenne Twister
//!   parameters, and Boolean circuit netlists to weight programs, plus the
//!   chain-of-thought tape grammar the Mersenne Twister programs run on.
//! * [`oracle`]: plain integer reference implementations every compiled
//!   program is verified against.
//! * [`stats`]: a NIST SP 800-22 subset battery and heatmap export for
//!   generated bit streams.
//! * [`cli`]: the `prngformer` command-line front end.
//!
//! The central trick is numeric rather than architectural. With weights
//! scaled so that every GeLU argument is either exactly zero or at least 39
//! in magnitude, `x * Phi(x)` rounds to exactly `x` or exactly `0.0` in
//! f64, so ReLU-style gadgets built from GeLU pairs are exact on
//! integer-valued channels. Likewise, attention logits engineered with gaps
//! of 50 or more produce softmax rows that round to exactly one and zero.
//! Bit-exact simulation of integer algorithms inside a floating-point
//! transformer falls out of those two facts.

pub mod cli;
pub mod compile;
pub mod gadgets;
pub mod kernel;
pub mod matrix;
pub mod oracle;
pub mod special;
pub mod stats;
pub mod tape;

pub(crate) mod util {
    use std::io::Write;
    use std::path::Path;

    /// Writes `bytes` to `path` atomically: the data goes to a temporary
    /// file in the same directory first and is renamed into place, so a
    /// crash never leaves a half-written output behind.
    pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        let stem = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string());
        let tmp_name = format!(".{stem}.tmp.{}", std::process::id());
        let tmp = match dir {
            Some(d) => d.join(&tmp_name),
            None => std::path::PathBuf::from(&tmp_name),
        };
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        drop(f);
        match std::fs::rename(&tmp, path) {
            Ok(()) => Ok(()),
            Err(e) => {
                let _ = std::fs::remove_file(&tmp);
                Err(e)
            }
        }
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn atomic_write_replaces_existing_content() {
            let dir = std::env::temp_dir().join(format!("pf-util-{}", std::process::id()));
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join("target.txt");
            atomic_write(&path, b"first").unwrap();
            atomic_write(&path, b"second").unwrap();
            assert_eq!(std::fs::read(&path).unwrap(), b"second");
            assert!(std::fs::read_dir(&dir).unwrap().count() == 1, "no temp files left behind");
            std::fs::remove_dir_all(&dir).unwrap();
        }
    }
}
