//! Chain-of-thought tape: the token sequence a state-walking program
//! reads and writes. A tape for an n-word generator is
//!
//! ```text
//! x_1 ... x_n => ( y x'_1 ... x'_n => )*
//! ```
//!
//! one prompt holding the initial state window, then one block per
//! update step: the tempered output word, the refreshed window, and an
//! arrow separator. The text form is one token per line, decimal for
//! words and "=>" for the arrow.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TapeToken {
    Word(u64),
    Arrow,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tape {
    pub tokens: Vec<TapeToken>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TapeError {
    #[error("line {line}: expected a decimal word or \"=>\", got \"{text}\"")]
    BadLine { line: usize, text: String },
    #[error("token {index}: expected {expected}, got {got}")]
    Grammar { index: usize, expected: &'static str, got: &'static str },
    #[error("tape ends inside a block: {index} tokens, block boundary every {period} after the prompt")]
    Truncated { index: usize, period: usize },
    #[error("tape holds no arrow, so the state width cannot be inferred")]
    NoArrow,
    #[error("tape starts with an arrow, so the prompt holds no state")]
    EmptyPrompt,
}

/// One decoded update step: the output word and the refreshed window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeBlock {
    pub y: u64,
    pub state: Vec<u64>,
}

/// A structurally valid tape, split into the prompt state and the blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedTape {
    pub initial_state: Vec<u64>,
    pub blocks: Vec<TapeBlock>,
}

impl DecodedTape {
    /// Output words in emission order.
    pub fn outputs(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.y).collect()
    }

    /// The state window before each block, starting with the prompt.
    pub fn state_history(&self) -> Vec<&[u64]> {
        std::iter::once(self.initial_state.as_slice())
            .chain(self.blocks.iter().map(|b| b.state.as_slice()))
            .collect()
    }
}

impl Tape {
    pub fn new(tokens: Vec<TapeToken>) -> Self {
        Tape { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn push(&mut self, token: TapeToken) {
        self.tokens.push(token);
    }

    /// Prompt for an n-word initial state: the words then an arrow.
    pub fn prompt(state: &[u64]) -> Self {
        let mut tokens: Vec<TapeToken> = state.iter().map(|&w| TapeToken::Word(w)).collect();
        tokens.push(TapeToken::Arrow);
        Tape { tokens }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            match t {
                TapeToken::Word(w) => {
                    out.push_str(&w.to_string());
                }
                TapeToken::Arrow => out.push_str("=>"),
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form: one token per line, blank lines and lines
    /// starting with '#' skipped.
    pub fn parse_text(text: &str) -> Result<Self, TapeError> {
        let mut tokens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "=>" {
                tokens.push(TapeToken::Arrow);
            } else {
                match line.parse::<u64>() {
                    Ok(w) => tokens.push(TapeToken::Word(w)),
                    Err(_) => {
                        return Err(TapeError::BadLine { line: i + 1, text: line.to_string() })
                    }
                }
            }
        }
        Ok(Tape { tokens })
    }
}

/// Strict decode: the tape must consist of a prompt and zero or more
/// complete blocks. The state width n is inferred from the first arrow.
/// Errors carry the token index of the first violation.
pub fn decode_tape(tape: &Tape) -> Result<DecodedTape, TapeError> {
    let (initial_state, n, mut idx) = decode_prompt(tape)?;
    let period = n + 2;
    let mut blocks = Vec::new();
    while idx < tape.tokens.len() {
        if tape.tokens.len() - idx < period {
            return Err(TapeError::Truncated { index: tape.tokens.len(), period });
        }
        blocks.push(decode_block(tape, &mut idx, n)?);
    }
    Ok(DecodedTape { initial_state, blocks })
}

/// Lenient decode for statistics: returns the output word of every
/// complete-enough block, allowing the final block to be cut off. The
/// tokens that are present must still follow the grammar.
pub fn decode_outputs(tape: &Tape) -> Result<Vec<u64>, TapeError> {
    let (_, n, mut idx) = decode_prompt(tape)?;
    let mut outputs = Vec::new();
    while idx < tape.tokens.len() {
        let start = idx;
        match tape.tokens[idx] {
            TapeToken::Word(y) => outputs.push(y),
            TapeToken::Arrow => {
                return Err(TapeError::Grammar { index: idx, expected: "an output word", got: "\"=>\"" })
            }
        }
        idx += 1;
        for _ in 0..n {
            if idx >= tape.tokens.len() {
                return Ok(outputs);
            }
            if let TapeToken::Arrow = tape.tokens[idx] {
                return Err(TapeError::Grammar {
                    index: idx,
                    expected: "a state word",
                    got: "\"=>\"",
                });
            }
            idx += 1;
        }
        if idx >= tape.tokens.len() {
            return Ok(outputs);
        }
        if let TapeToken::Word(_) = tape.tokens[idx] {
            return Err(TapeError::Grammar { index: idx, expected: "\"=>\"", got: "a word" });
        }
        idx += 1;
        debug_assert_eq!(idx - start, n + 2);
    }
    Ok(outputs)
}

fn decode_prompt(tape: &Tape) -> Result<(Vec<u64>, usize, usize), TapeError> {
    let Some(first_arrow) = tape.tokens.iter().position(|t| matches!(t, TapeToken::Arrow)) else {
        return Err(TapeError::NoArrow);
    };
    if first_arrow == 0 {
        return Err(TapeError::EmptyPrompt);
    }
    let initial_state: Vec<u64> = tape.tokens[..first_arrow]
        .iter()
        .map(|t| match t {
            TapeToken::Word(w) => *w,
            TapeToken::Arrow => unreachable!("scan stopped at the first arrow"),
        })
        .collect();
    Ok((initial_state, first_arrow, first_arrow + 1))
}

fn decode_block(tape: &Tape, idx: &mut usize, n: usize) -> Result<TapeBlock, TapeError> {
    let y = match tape.tokens[*idx] {
        TapeToken::Word(y) => y,
        TapeToken::Arrow => {
            return Err(TapeError::Grammar { index: *idx, expected: "an output word", got: "\"=>\"" })
        }
    };
    *idx += 1;
    let mut state = Vec::with_capacity(n);
    for _ in 0..n {
        match tape.tokens[*idx] {
            TapeToken::Word(w) => state.push(w),
            TapeToken::Arrow => {
                return Err(TapeError::Grammar { index: *idx, expected: "a state word", got: "\"=>\"" })
            }
        }
        *idx += 1;
    }
    match tape.tokens[*idx] {
        TapeToken::Arrow => {}
        TapeToken::Word(_) => {
            return Err(TapeError::Grammar { index: *idx, expected: "\"=>\"", got: "a word" })
        }
    }
    *idx += 1;
    Ok(TapeBlock { y, state })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_tape() -> Tape {
        // n = 2 prompt [3, 7], two blocks.
        Tape::new(vec![
            TapeToken::Word(3),
            TapeToken::Word(7),
            TapeToken::Arrow,
            TapeToken::Word(9),
            TapeToken::Word(4),
            TapeToken::Word(7),
            TapeToken::Arrow,
            TapeToken::Word(2),
            TapeToken::Word(4),
            TapeToken::Word(5),
            TapeToken::Arrow,
        ])
    }

    #[test]
    fn decode_splits_prompt_and_blocks() {
        let d = decode_tape(&demo_tape()).unwrap();
        assert_eq!(d.initial_state, vec![3, 7]);
        assert_eq!(d.blocks.len(), 2);
        assert_eq!(d.blocks[0], TapeBlock { y: 9, state: vec![4, 7] });
        assert_eq!(d.blocks[1], TapeBlock { y: 2, state: vec![4, 5] });
        assert_eq!(d.outputs(), vec![9, 2]);
        assert_eq!(d.state_history(), vec![&[3, 7][..], &[4, 7], &[4, 5]]);
    }

    #[test]
    fn prompt_only_tape_decodes_to_zero_blocks() {
        let d = decode_tape(&Tape::prompt(&[1, 2, 3])).unwrap();
        assert_eq!(d.initial_state, vec![1, 2, 3]);
        assert!(d.blocks.is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let mut t = demo_tape();
        t.tokens.truncate(9);
        assert_eq!(
            decode_tape(&t),
            Err(TapeError::Truncated { index: 9, period: 4 })
        );

        // Arrow where the second block's state word belongs.
        let mut t = demo_tape();
        t.tokens[8] = TapeToken::Arrow;
        assert_eq!(
            decode_tape(&t),
            Err(TapeError::Grammar { index: 8, expected: "a state word", got: "\"=>\"" })
        );

        // Word where a block separator belongs: the block parser sees a
        // five-word run and flags the missing arrow.
        let mut t = demo_tape();
        t.tokens[6] = TapeToken::Word(8);
        assert_eq!(
            decode_tape(&t),
            Err(TapeError::Grammar { index: 6, expected: "\"=>\"", got: "a word" })
        );

        assert_eq!(
            decode_tape(&Tape::new(vec![TapeToken::Word(1)])),
            Err(TapeError::NoArrow)
        );
        assert_eq!(
            decode_tape(&Tape::new(vec![TapeToken::Arrow])),
            Err(TapeError::EmptyPrompt)
        );
    }

    #[test]
    fn lenient_decode_accepts_truncated_final_block() {
        let mut t = demo_tape();
        t.tokens.truncate(9); // second block cut after its first state word
        assert_eq!(decode_outputs(&t).unwrap(), vec![9, 2]);

        let mut t = demo_tape();
        t.tokens.truncate(8); // second block cut right after its output
        assert_eq!(decode_outputs(&t).unwrap(), vec![9, 2]);

        let mut t = demo_tape();
        t.tokens.truncate(10); // missing only the final arrow
        assert_eq!(decode_outputs(&t).unwrap(), vec![9, 2]);

        // Structural violations still error.
        let mut t = demo_tape();
        t.tokens[7] = TapeToken::Arrow;
        assert!(decode_outputs(&t).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = demo_tape();
        let text = t.to_text();
        assert_eq!(text, "3\n7\n=>\n9\n4\n7\n=>\n2\n4\n5\n=>\n");
        assert_eq!(Tape::parse_text(&text).unwrap(), t);

        let with_comments = "# header\n\n3\n 7 \n=>\n";
        let t = Tape::parse_text(with_comments).unwrap();
        assert_eq!(
            t.tokens,
            vec![TapeToken::Word(3), TapeToken::Word(7), TapeToken::Arrow]
        );

        let err = Tape::parse_text("3\nnope\n").unwrap_err();
        assert_eq!(err, TapeError::BadLine { line: 2, text: "nope".into() });
    }
}
