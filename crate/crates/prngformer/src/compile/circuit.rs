//! Boolean circuit netlists: a named-wire gate list in topological order,
//! restricted to bounded fan-in AND / OR / NOT, plus the compiler that
//! turns one into a weight program evaluating the circuit in parallel
//! across prompt positions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{program_meta, CompileError};
use crate::gadgets::{concat_layer, FfnAssembler};
use crate::kernel::{HeadWeights, WeightProgram};
use crate::matrix::Matrix;

pub const MAX_FANIN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    And,
    Or,
    Not,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub kind: GateKind,
    pub args: Vec<String>,
}

/// A combinational circuit: input wires, gates in topological order, and
/// the output wires to read off. Wires are named; a gate's operands must
/// be inputs or earlier gates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitNetlist {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<String>,
}

/// Validated wiring of a netlist: every operand resolved to an input slot
/// or a gate index, plus the AND/OR depth of every wire.
pub(crate) struct ResolvedCircuit {
    /// For each gate, the operand sources in order.
    pub gate_args: Vec<Vec<WireRef>>,
    /// For each output, its source.
    pub output_refs: Vec<WireRef>,
    /// AND/OR depth per gate (NOT is free).
    pub gate_depth: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WireRef {
    Input(usize),
    Gate(usize),
}

impl CircuitNetlist {
    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        let netlist: CircuitNetlist =
            serde_json::from_str(text).map_err(|e| CompileError::InvalidNetlist(e.to_string()))?;
        netlist.validate()?;
        Ok(netlist)
    }

    /// Number of AND/OR levels on the deepest output path. NOT gates do
    /// not count: the compiler folds them into their consumers' wiring.
    pub fn depth(&self) -> usize {
        match self.resolve() {
            Ok(r) => r
                .output_refs
                .iter()
                .map(|&w| match w {
                    WireRef::Input(_) => 0,
                    WireRef::Gate(g) => r.gate_depth[g],
                })
                .max()
                .unwrap_or(0),
            Err(_) => 0,
        }
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        self.resolve().map(|_| ())
    }

    pub(crate) fn resolve(&self) -> Result<ResolvedCircuit, CompileError> {
        let fail = |msg: String| Err(CompileError::InvalidNetlist(msg));
        if self.inputs.is_empty() {
            return fail("netlist declares no inputs".into());
        }
        if self.outputs.is_empty() {
            return fail("netlist declares no outputs".into());
        }
        let mut seen: HashMap<&str, WireRef> = HashMap::new();
        for (i, name) in self.inputs.iter().enumerate() {
            if name.is_empty() {
                return fail("empty input name".into());
            }
            if seen.insert(name, WireRef::Input(i)).is_some() {
                return fail(format!("duplicate wire name \"{name}\""));
            }
        }
        let mut gate_args = Vec::with_capacity(self.gates.len());
        let mut gate_depth = Vec::with_capacity(self.gates.len());
        for (gi, gate) in self.gates.iter().enumerate() {
            if gate.name.is_empty() {
                return fail(format!("gate {gi} has an empty name"));
            }
            match gate.kind {
                GateKind::Not => {
                    if gate.args.len() != 1 {
                        return fail(format!(
                            "gate \"{}\" is a NOT with {} operands",
                            gate.name,
                            gate.args.len()
                        ));
                    }
                }
                GateKind::And | GateKind::Or => {
                    if gate.args.is_empty() || gate.args.len() > MAX_FANIN {
                        return fail(format!(
                            "gate \"{}\" has fan-in {}, allowed range is [1, {MAX_FANIN}]",
                            gate.name,
                            gate.args.len()
                        ));
                    }
                }
            }
            let mut args = Vec::with_capacity(gate.args.len());
            let mut depth = 0usize;
            for arg in &gate.args {
                let Some(&src) = seen.get(arg.as_str()) else {
                    return fail(format!(
                        "gate \"{}\" reads wire \"{arg}\" before it is defined",
                        gate.name
                    ));
                };
                if let WireRef::Gate(g) = src {
                    depth = depth.max(gate_depth[g]);
                }
                args.push(src);
            }
            if matches!(gate.kind, GateKind::And | GateKind::Or) {
                depth += 1;
            }
            gate_args.push(args);
            gate_depth.push(depth);
            if seen.insert(&gate.name, WireRef::Gate(gi)).is_some() {
                return fail(format!("duplicate wire name \"{}\"", gate.name));
            }
        }
        let mut output_refs = Vec::with_capacity(self.outputs.len());
        for out in &self.outputs {
            let Some(&src) = seen.get(out.as_str()) else {
                return fail(format!("output wire \"{out}\" is not defined"));
            };
            output_refs.push(src);
        }
        Ok(ResolvedCircuit { gate_args, output_refs, gate_depth })
    }
}

/// Extra generated positions past the last output; they demonstrate the
/// all-zero continuation the program settles into.
const TRAILING: usize = 8;

/// Saturating scale, matching the GeLU exactness window: arguments are 0
/// or multiples of 64, never in between.
const GATE: f64 = 64.0;

/// Fetch-head query scale; d_k = 4 divides logits by exactly 2, leaving
/// a 64 gap between the matching position and every other one.
const FETCH: f64 = 128.0;

/// Follows NOT chains to the underlying input or AND/OR gate, tracking
/// parity. Terminates because gates are topologically ordered.
fn strip_nots(netlist: &CircuitNetlist, resolved: &ResolvedCircuit, w: WireRef) -> (WireRef, bool) {
    let mut cur = w;
    let mut negated = false;
    while let WireRef::Gate(g) = cur {
        if netlist.gates[g].kind != GateKind::Not {
            break;
        }
        negated = !negated;
        cur = resolved.gate_args[g][0];
    }
    (cur, negated)
}

/// Compiles a netlist into a weight program whose prompt is the input
/// bits as 1-bit tokens; generated positions emit the output bits in
/// netlist order, then zeros.
///
/// The program has depth + 3 layers: one FFN layer derives the squared
/// position and the per-output emission windows, one attention layer
/// gathers every input bit into the stream (one head per input), then
/// one FFN layer per AND/OR level of the circuit, and a final FFN layer
/// multiplexes the resolved output wires into the emitted token. NOT
/// gates cost nothing: consumers read their operand with flipped
/// polarity. All gate arithmetic runs at scale 64 on exact bits, so the
/// compiled program is exact, not merely within a budget.
pub fn compile_circuit(netlist: &CircuitNetlist) -> Result<WeightProgram, CompileError> {
    let resolved = netlist.resolve()?;
    let n_in = netlist.inputs.len();
    let n_out = netlist.outputs.len();
    let depth = netlist.depth();
    let max_pos = n_in + n_out + TRAILING;

    // Channel map grown layer by layer. Embedding: bit, pos, one, flag.
    let ch_bit = 0usize;
    let ch_pos = 1usize;
    let ch_one = 2usize;
    let mut d = 4usize;
    let mut layers = Vec::new();
    let mut hidden = Vec::new();

    // Layer 1: possq = pos² by telescoping, and emission windows
    // e_o = step(pos ≥ n_in+o−1) − step(pos ≥ n_in+o); the token written
    // at position p+1 is computed at p, so output o is due at n_in+o−1.
    let ch_possq = d;
    let ch_emit_base = d + 1;
    {
        let mut f = FfnAssembler::new(d, 1 + n_out);
        for j in 1..=max_pos {
            let hi = f.unit(&[(ch_pos, GATE)], GATE * (1.0 - j as f64));
            let lo = f.unit(&[(ch_pos, GATE)], GATE * (-(j as f64)));
            f.emit(hi, 0, (2 * j - 1) as f64 / GATE);
            f.emit(lo, 0, -((2 * j - 1) as f64) / GATE);
        }
        for o in 1..=n_out {
            let due = (n_in + o - 1) as f64;
            let hi = f.unit(&[(ch_pos, GATE)], GATE * (1.0 - due));
            let mid = f.unit(&[(ch_pos, GATE)], GATE * (-due));
            let lo = f.unit(&[(ch_pos, GATE)], GATE * (-due - 1.0));
            f.emit(hi, o, 1.0 / GATE);
            f.emit(mid, o, -2.0 / GATE);
            f.emit(lo, o, 1.0 / GATE);
        }
        hidden.push(f.hidden());
        let layer = concat_layer(d, Vec::new(), f.build());
        d = layer.d_out;
        layers.push(layer);
    }

    // Layer 2: one head per input bit. Keys carry (pos, pos², 1, 0);
    // head j's constant query scores −64·(pos − j)², an exact one-hot
    // on position j for every query at or past the prompt end.
    let input_base = d;
    let ch_input = move |i: usize| input_base + i;
    {
        let mut heads = Vec::new();
        for j in 1..=n_in {
            let jf = j as f64;
            let w_q = Matrix::from_triplets(
                d,
                4,
                &[
                    (ch_one, 0, 2.0 * FETCH * jf),
                    (ch_one, 1, -FETCH),
                    (ch_one, 2, -FETCH * jf * jf),
                ],
            );
            let w_k = Matrix::from_triplets(
                d,
                4,
                &[(ch_pos, 0, 1.0), (ch_possq, 1, 1.0), (ch_one, 2, 1.0)],
            );
            let w_v = Matrix::from_triplets(d, 1, &[(ch_bit, 0, 1.0)]);
            let w_o = Matrix::from_triplets(1, n_in, &[(0, j - 1, 1.0)]);
            heads.push(HeadWeights { w_q, w_k, w_v, w_o });
        }
        hidden.push(0);
        let f = FfnAssembler::new(d + n_in, 0);
        let layer = concat_layer(d, heads, f.build());
        d = layer.d_out;
        layers.push(layer);
    }

    // Gate levels: level ℓ computes every AND/OR gate of depth ℓ in one
    // FFN layer. A literal list (channel, polarity) turns into taps of
    // ±64 with a bias correction per negation. AND fires when the
    // literal sum reaches the fan-in; OR is one minus the all-false
    // indicator, sharing one saturated one-unit per layer.
    let mut gate_channel: HashMap<usize, usize> = HashMap::new();
    for level in 1..=depth {
        let members: Vec<usize> = (0..netlist.gates.len())
            .filter(|&g| {
                resolved.gate_depth[g] == level
                    && matches!(netlist.gates[g].kind, GateKind::And | GateKind::Or)
            })
            .collect();
        let mut f = FfnAssembler::new(d, members.len());
        let mut one_unit = None;
        for (slot, &g) in members.iter().enumerate() {
            let mut taps = Vec::new();
            let mut negs = 0usize;
            for &arg in &resolved.gate_args[g] {
                let (base, negated) = strip_nots(netlist, &resolved, arg);
                let ch = match base {
                    WireRef::Input(i) => ch_input(i),
                    WireRef::Gate(gg) => gate_channel[&gg],
                };
                if negated {
                    negs += 1;
                }
                taps.push((ch, if negated { -GATE } else { GATE }));
            }
            let k = taps.len();
            match netlist.gates[g].kind {
                GateKind::And => {
                    let bias = GATE * (negs as f64 - k as f64 + 1.0);
                    let u = f.unit(&taps, bias);
                    f.emit(u, slot, 1.0 / GATE);
                }
                GateKind::Or => {
                    let flipped: Vec<(usize, f64)> =
                        taps.iter().map(|&(c, w)| (c, -w)).collect();
                    let bias = GATE * (1.0 - negs as f64);
                    let u = f.unit(&flipped, bias);
                    let one = *one_unit
                        .get_or_insert_with(|| f.unit(&[(ch_one, GATE)], 0.0));
                    f.emit(one, slot, 1.0 / GATE);
                    f.emit(u, slot, -1.0 / GATE);
                }
                GateKind::Not => unreachable!("NOT gates carry no depth"),
            }
        }
        for (slot, &g) in members.iter().enumerate() {
            gate_channel.insert(g, d + slot);
        }
        hidden.push(f.hidden());
        let layer = concat_layer(d, Vec::new(), f.build());
        d = layer.d_out;
        layers.push(layer);
    }

    // Emission layer: token = Σ_o e_o · lit_o, each product an exact
    // Boolean AND of the window bit with the resolved output wire;
    // negated outputs add the window alone and subtract the AND.
    let ch_emit_out = d;
    {
        let mut f = FfnAssembler::new(d, 1);
        for (o, &out_ref) in resolved.output_refs.iter().enumerate() {
            let e_ch = ch_emit_base + o;
            let (base, negated) = strip_nots(netlist, &resolved, out_ref);
            let ch = match base {
                WireRef::Input(i) => ch_input(i),
                WireRef::Gate(gg) => gate_channel[&gg],
            };
            let and = f.unit(&[(e_ch, GATE), (ch, GATE)], -GATE);
            if negated {
                let window = f.unit(&[(e_ch, GATE)], 0.0);
                f.emit(window, 0, 1.0 / GATE);
                f.emit(and, 0, -1.0 / GATE);
            } else {
                f.emit(and, 0, 1.0 / GATE);
            }
        }
        hidden.push(f.hidden());
        let layer = concat_layer(d, Vec::new(), f.build());
        d = layer.d_out;
        layers.push(layer);
    }

    let readout = Matrix::from_triplets(d, 2, &[(ch_emit_out, 0, 1.0)]);
    let mut program = WeightProgram {
        w: 1,
        layers,
        readout,
        meta: program_meta(&[
            ("kind", "circuit".into()),
            ("inputs", n_in.into()),
            ("outputs", n_out.into()),
            ("gates", netlist.gates.len().into()),
            ("depth", depth.into()),
            ("hidden_widths", hidden.into()),
        ]),
    };
    program.set_max_positions(max_pos);
    program.validate().map_err(|e| CompileError::InvalidSpec(e.to_string()))?;
    Ok(program)
}

/// One step of the splitmix64 sequence, the crate's deterministic
/// utility stream for sampling test corpora.
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic netlist sampler for stress tests: 3 to 12 inputs, up to
/// 64 gates with fan-in at most 4, AND/OR depth at most 4, and up to 8
/// distinct output wires drawn from the gates. The stream behind it is
/// splitmix64, so equal seeds give equal netlists everywhere.
pub fn random_netlist(seed: u64) -> CircuitNetlist {
    let mut state = seed;
    let mut next = move || splitmix64(&mut state);
    let n_in = 3 + (next() % 10) as usize;
    let n_gates = 8 + (next() % 57) as usize;
    let inputs: Vec<String> = (0..n_in).map(|i| format!("x{i}")).collect();

    // Wires carry (name, AND/OR depth); operands for a new AND/OR gate
    // come from wires of depth at most 3 so the circuit stays in depth 4.
    let mut wires: Vec<(String, usize)> = inputs.iter().map(|n| (n.clone(), 0)).collect();
    let mut gates = Vec::new();
    for gi in 0..n_gates {
        let kind = match next() % 4 {
            0 | 1 => GateKind::And,
            2 => GateKind::Or,
            _ => GateKind::Not,
        };
        let name = format!("g{gi}");
        let (args, depth) = if kind == GateKind::Not {
            let (ref arg, d) = wires[(next() % wires.len() as u64) as usize];
            (vec![arg.clone()], d)
        } else {
            let pool: Vec<usize> =
                (0..wires.len()).filter(|&i| wires[i].1 <= 3).collect();
            let k = 2 + (next() % 3) as usize;
            let mut args = Vec::new();
            let mut depth = 0;
            for _ in 0..k {
                let pick = pool[(next() % pool.len() as u64) as usize];
                args.push(wires[pick].0.clone());
                depth = depth.max(wires[pick].1);
            }
            (args, depth + 1)
        };
        gates.push(Gate { name: name.clone(), kind, args });
        wires.push((name, depth));
    }

    let n_out = 1 + (next() % 8) as usize;
    let mut outputs: Vec<String> = Vec::new();
    while outputs.len() < n_out {
        let pick = format!("g{}", next() % n_gates as u64);
        if !outputs.contains(&pick) {
            outputs.push(pick);
        }
    }
    CircuitNetlist { inputs, gates, outputs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{generate, PrecisionPolicy};
    use crate::oracle::eval_circuit;
    use crate::tape::{Tape, TapeToken};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Runs a compiled program on one assignment and returns the emitted
    /// output bits, asserting the trailing positions settle to zero.
    fn run_compiled(
        program: &crate::kernel::WeightProgram,
        n_out: usize,
        assignment: &[bool],
    ) -> Vec<bool> {
        let prompt = Tape::new(
            assignment.iter().map(|&b| TapeToken::Word(b as u64)).collect(),
        );
        let tape =
            generate(program, &prompt, n_out + 3, PrecisionPolicy::ExactDouble).unwrap();
        let emitted: Vec<bool> = tape.tokens[assignment.len()..]
            .iter()
            .map(|t| match t {
                TapeToken::Word(0) => false,
                TapeToken::Word(1) => true,
                other => panic!("circuit emitted {other:?}"),
            })
            .collect();
        let (bits, tail) = emitted.split_at(n_out);
        assert!(tail.iter().all(|&b| !b), "trailing positions must emit zero");
        bits.to_vec()
    }

    fn exhaustive_check(netlist: &CircuitNetlist) {
        let program = compile_circuit(netlist).unwrap();
        let n = netlist.inputs.len();
        for word in 0u32..1 << n {
            let assignment: Vec<bool> = (0..n).map(|i| word >> i & 1 == 1).collect();
            let want = eval_circuit(netlist, &assignment).unwrap();
            assert_eq!(
                run_compiled(&program, netlist.outputs.len(), &assignment),
                want,
                "input {word:0width$b}",
                width = n
            );
        }
    }

    fn majority3() -> CircuitNetlist {
        CircuitNetlist {
            inputs: vec!["a".into(), "b".into(), "c".into()],
            gates: vec![
                Gate { name: "ab".into(), kind: GateKind::And, args: vec!["a".into(), "b".into()] },
                Gate { name: "ac".into(), kind: GateKind::And, args: vec!["a".into(), "c".into()] },
                Gate { name: "bc".into(), kind: GateKind::And, args: vec!["b".into(), "c".into()] },
                Gate {
                    name: "maj".into(),
                    kind: GateKind::Or,
                    args: vec!["ab".into(), "ac".into(), "bc".into()],
                },
            ],
            outputs: vec!["maj".into()],
        }
    }

    #[test]
    fn majority_netlist_validates_with_depth_two() {
        let net = majority3();
        assert!(net.validate().is_ok());
        assert_eq!(net.depth(), 2);
    }

    #[test]
    fn not_gates_do_not_add_depth() {
        let net = CircuitNetlist {
            inputs: vec!["a".into(), "b".into()],
            gates: vec![
                Gate { name: "na".into(), kind: GateKind::Not, args: vec!["a".into()] },
                Gate {
                    name: "x".into(),
                    kind: GateKind::And,
                    args: vec!["na".into(), "b".into()],
                },
                Gate { name: "nx".into(), kind: GateKind::Not, args: vec!["x".into()] },
            ],
            outputs: vec!["nx".into()],
        };
        assert!(net.validate().is_ok());
        assert_eq!(net.depth(), 1);
    }

    #[test]
    fn rejects_forward_reference_and_duplicates() {
        let forward = CircuitNetlist {
            inputs: vec!["a".into()],
            gates: vec![
                Gate { name: "x".into(), kind: GateKind::And, args: vec!["a".into(), "y".into()] },
                Gate { name: "y".into(), kind: GateKind::Not, args: vec!["a".into()] },
            ],
            outputs: vec!["x".into()],
        };
        assert!(forward.validate().is_err());

        let dup = CircuitNetlist {
            inputs: vec!["a".into(), "a".into()],
            gates: vec![],
            outputs: vec!["a".into()],
        };
        assert!(dup.validate().is_err());

        let missing_out = CircuitNetlist {
            inputs: vec!["a".into()],
            gates: vec![],
            outputs: vec!["z".into()],
        };
        assert!(missing_out.validate().is_err());
    }

    #[test]
    fn rejects_bad_fanin() {
        let none = CircuitNetlist {
            inputs: vec!["a".into()],
            gates: vec![Gate { name: "x".into(), kind: GateKind::And, args: vec![] }],
            outputs: vec!["x".into()],
        };
        assert!(none.validate().is_err());

        let not2 = CircuitNetlist {
            inputs: vec!["a".into(), "b".into()],
            gates: vec![
                Gate { name: "x".into(), kind: GateKind::Not, args: vec!["a".into(), "b".into()] },
            ],
            outputs: vec!["x".into()],
        };
        assert!(not2.validate().is_err());

        let wide = CircuitNetlist {
            inputs: (0..70).map(|i| format!("i{i}")).collect(),
            gates: vec![Gate {
                name: "x".into(),
                kind: GateKind::And,
                args: (0..70).map(|i| format!("i{i}")).collect(),
            }],
            outputs: vec!["x".into()],
        };
        assert!(wide.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let net = majority3();
        let json = serde_json::to_string(&net).unwrap();
        let back = CircuitNetlist::from_json(&json).unwrap();
        assert_eq!(back, net);
        assert!(CircuitNetlist::from_json("{\"inputs\":[]}").is_err());
    }

    #[test]
    fn single_not_gate_complements_its_input() {
        let net = CircuitNetlist {
            inputs: vec!["a".into()],
            gates: vec![Gate { name: "na".into(), kind: GateKind::Not, args: vec!["a".into()] }],
            outputs: vec!["na".into()],
        };
        exhaustive_check(&net);
    }

    #[test]
    fn two_level_circuit_matches_the_evaluator_on_all_inputs() {
        // (x1 AND x2) OR NOT x3 over all eight assignments.
        let net = CircuitNetlist {
            inputs: vec!["x1".into(), "x2".into(), "x3".into()],
            gates: vec![
                Gate {
                    name: "and12".into(),
                    kind: GateKind::And,
                    args: vec!["x1".into(), "x2".into()],
                },
                Gate { name: "n3".into(), kind: GateKind::Not, args: vec!["x3".into()] },
                Gate {
                    name: "out".into(),
                    kind: GateKind::Or,
                    args: vec!["and12".into(), "n3".into()],
                },
            ],
            outputs: vec!["out".into()],
        };
        exhaustive_check(&net);
    }

    #[test]
    fn majority_of_three_is_exact_exhaustively() {
        exhaustive_check(&majority3());
    }

    #[test]
    fn outputs_can_be_raw_inputs_and_double_negations() {
        let net = CircuitNetlist {
            inputs: vec!["a".into(), "b".into()],
            gates: vec![
                Gate { name: "na".into(), kind: GateKind::Not, args: vec!["a".into()] },
                Gate { name: "nna".into(), kind: GateKind::Not, args: vec!["na".into()] },
            ],
            outputs: vec!["b".into(), "nna".into(), "na".into()],
        };
        exhaustive_check(&net);
    }

    #[test]
    fn layer_count_is_depth_plus_three() {
        let net = majority3();
        let program = compile_circuit(&net).unwrap();
        assert_eq!(program.layers.len(), net.depth() + 3);
        assert_eq!(program.meta["depth"], serde_json::json!(2));
        assert_eq!(program.w, 1);
    }

    #[test]
    fn random_netlists_match_the_evaluator() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for seed in 0..6 {
            let net = random_netlist(seed);
            net.validate().unwrap();
            assert!(net.depth() <= 4);
            let program = compile_circuit(&net).unwrap();
            for _ in 0..50 {
                let assignment: Vec<bool> =
                    (0..net.inputs.len()).map(|_| rng.gen_bool(0.5)).collect();
                let want = eval_circuit(&net, &assignment).unwrap();
                assert_eq!(run_compiled(&program, net.outputs.len(), &assignment), want);
            }
        }
    }

    #[test]
    fn netlist_sampler_is_deterministic() {
        assert_eq!(random_netlist(7), random_netlist(7));
        assert_ne!(random_netlist(7), random_netlist(8));
    }
}
