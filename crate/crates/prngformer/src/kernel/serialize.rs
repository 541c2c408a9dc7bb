//! Weight program serialization: a compact JSON envelope carrying a
//! format tag and version ahead of the program fields. Values survive
//! the round trip bit for bit (shortest-representation float printing
//! parses back to the identical double).

use serde::{Deserialize, Serialize};

use super::{KernelError, WeightProgram};

const FORMAT: &str = "weight-program";
const VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format: &'static str,
    version: u32,
    #[serde(flatten)]
    program: &'a WeightProgram,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    format: String,
    version: u32,
    #[serde(flatten)]
    program: WeightProgram,
}

impl WeightProgram {
    /// Compact single-line JSON. Large programs (a few hundred
    /// megaweights) stay loadable; pretty-printing them would multiply
    /// the file size for no benefit.
    pub fn to_json(&self) -> Result<String, KernelError> {
        let env = EnvelopeOut { format: FORMAT, version: VERSION, program: self };
        serde_json::to_string(&env).map_err(|e| KernelError::Serialize(e.to_string()))
    }

    /// Parses, checks the envelope tag and version, and validates the
    /// program's dimension chain before returning it.
    pub fn from_json(text: &str) -> Result<WeightProgram, KernelError> {
        let env: EnvelopeIn =
            serde_json::from_str(text).map_err(|e| KernelError::Serialize(e.to_string()))?;
        if env.format != FORMAT {
            return Err(KernelError::Serialize(format!(
                "expected format {FORMAT:?}, found {:?}",
                env.format
            )));
        }
        if env.version != VERSION {
            return Err(KernelError::Serialize(format!(
                "unsupported version {} (this build reads version {VERSION})",
                env.version
            )));
        }
        env.program.validate()?;
        Ok(env.program)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{FfnWeights, HeadWeights, LayerSpec, ResidualMode};
    use crate::matrix::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn sample_program(seed: u64) -> WeightProgram {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = |r: usize, c: usize| {
            Matrix::new(r, c, (0..r * c).map(|_| rng.gen_range(-3.0..3.0)).collect())
        };
        let layer = LayerSpec {
            heads: vec![HeadWeights { w_q: m(5, 2), w_k: m(5, 2), w_v: m(5, 3), w_o: m(3, 4) }],
            ffn: FfnWeights {
                w1: m(9, 3),
                // Extremes that expose lossy float printing: the smallest
                // subnormal, a fraction with a long binary tail, a large
                // odd integer.
                b1: vec![5e-324, 1.0 / 3.0, 16_777_217.0],
                w2: m(3, 1),
            },
            residual_mode: ResidualMode::Concat,
            d_in: 5,
            d_out: 10,
        };
        let mut program = WeightProgram {
            w: 2,
            layers: vec![layer],
            readout: m(10, 3),
            meta: BTreeMap::new(),
        };
        program.set_max_positions(77);
        program.validate().unwrap();
        program
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let program = sample_program(13);
        let json = program.to_json().unwrap();
        let back = WeightProgram::from_json(&json).unwrap();
        assert_eq!(program, back);
        let a = &program.layers[0].ffn.b1;
        let b = &back.layers[0].ffn.b1;
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(back.max_positions(), Some(77));
    }

    #[test]
    fn envelope_is_tagged_compact_json() {
        let json = sample_program(1).to_json().unwrap();
        assert!(json.starts_with(r#"{"format":"weight-program","version":1"#));
        assert!(!json.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["format"], "weight-program");
        assert_eq!(v["version"], 1);
        assert!(v["layers"].is_array());
    }

    #[test]
    fn bad_envelopes_are_rejected() {
        let good = sample_program(2).to_json().unwrap();

        let wrong_format = good.replace(r#""format":"weight-program""#, r#""format":"other""#);
        assert!(WeightProgram::from_json(&wrong_format).is_err());

        let wrong_version = good.replace(r#""version":1"#, r#""version":2"#);
        assert!(WeightProgram::from_json(&wrong_version).is_err());

        assert!(WeightProgram::from_json("not json").is_err());
    }

    #[test]
    fn invalid_programs_fail_validation_on_load() {
        let mut program = sample_program(3);
        program.readout = Matrix::zeros(4, 3);
        let env = EnvelopeOut { format: FORMAT, version: VERSION, program: &program };
        let json = serde_json::to_string(&env).unwrap();
        let err = WeightProgram::from_json(&json).unwrap_err();
        assert!(matches!(err, KernelError::Dimension(_)), "{err}");
    }
}
