use std::collections::{BTreeSet, HashSet};

use super::{Circuit, Gate, GateId, GateKind, Location, NetlistError, WireId};

/// How primary inputs and outputs are determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// `IN`/`OUT` lines declare inputs and outputs.
    #[default]
    Declared,
    /// Ignore `IN`/`OUT`; inputs are wires no gate produces (ascending id),
    /// outputs are gate outputs no gate consumes (gate order).
    InferIo,
}

/// Parses `.gcn` text with declared inputs and outputs.
///
/// ```text
/// # comment
/// IN 0 1
/// ZERO 2
/// 0 AND 1 = 3
/// 3 XOR 2 = 4
/// OUT 4
/// ```
pub fn parse(text: &str) -> Result<Circuit, NetlistError> {
    parse_with(text, ParseMode::Declared)
}

pub fn parse_with(text: &str, mode: ParseMode) -> Result<Circuit, NetlistError> {
    let mut inputs = Vec::new();
    let mut input_lines = Vec::new();
    let mut outputs = Vec::new();
    let mut output_lines = Vec::new();
    let mut gates = Vec::new();
    let mut gate_lines = Vec::new();
    let mut zero: Option<(WireId, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| NetlistError::Syntax { at: Location::Line(line_no), message };
        let mut tokens = content.split_whitespace();
        let head = tokens.next().expect("non-empty line has a token");
        match head {
            "IN" | "OUT" => {
                let ids = tokens.map(|t| parse_wire(t).map_err(&syntax)).collect::<Result<Vec<_>, _>>()?;
                if ids.is_empty() {
                    return Err(syntax(format!("{head} needs at least one wire id")));
                }
                let (list, lines) = if head == "IN" {
                    (&mut inputs, &mut input_lines)
                } else {
                    (&mut outputs, &mut output_lines)
                };
                lines.extend(std::iter::repeat(line_no).take(ids.len()));
                list.extend(ids);
            }
            "ZERO" => {
                let ids = tokens.map(|t| parse_wire(t).map_err(&syntax)).collect::<Result<Vec<_>, _>>()?;
                if ids.len() != 1 {
                    return Err(syntax("ZERO takes exactly one wire id".into()));
                }
                if zero.is_some() {
                    return Err(NetlistError::DuplicateConstant { at: Location::Line(line_no) });
                }
                zero = Some((ids[0], line_no));
            }
            _ => {
                let rest: Vec<&str> = tokens.collect();
                let [op, b, eq, out] = rest.as_slice() else {
                    return Err(syntax(format!(
                        "expected `<in0> AND|XOR <in1> = <out>`, found `{content}`"
                    )));
                };
                let kind = match *op {
                    "AND" => GateKind::And,
                    "XOR" => GateKind::Xor,
                    other => return Err(syntax(format!("unknown gate type `{other}`"))),
                };
                if *eq != "=" {
                    return Err(syntax(format!("expected `=`, found `{eq}`")));
                }
                let in0 = parse_wire(head).map_err(&syntax)?;
                let in1 = parse_wire(b).map_err(&syntax)?;
                let out = parse_wire(out).map_err(&syntax)?;
                gates.push(Gate { id: GateId(gates.len() as u64), kind, in0, in1, out });
                gate_lines.push(line_no);
            }
        }
    }

    if mode == ParseMode::InferIo {
        let zero_wire = zero.map(|(w, _)| w);
        let produced: HashSet<WireId> = gates.iter().map(|g| g.out).collect();
        let consumed: HashSet<WireId> = gates.iter().flat_map(|g| [g.in0, g.in1]).collect();
        let inferred: BTreeSet<WireId> = gates
            .iter()
            .flat_map(|g| [g.in0, g.in1])
            .filter(|w| !produced.contains(w) && Some(*w) != zero_wire)
            .collect();
        inputs = inferred.into_iter().collect();
        input_lines = inputs
            .iter()
            .map(|w| {
                gates
                    .iter()
                    .position(|g| g.in0 == *w || g.in1 == *w)
                    .map_or(0, |i| gate_lines[i])
            })
            .collect();
        outputs = gates.iter().map(|g| g.out).filter(|w| !consumed.contains(w)).collect();
        output_lines = outputs
            .iter()
            .map(|w| gates.iter().position(|g| g.out == *w).map_or(0, |i| gate_lines[i]))
            .collect();
    }

    let zero_line = zero.map_or(0, |(_, l)| l);
    Circuit::new(inputs, gates, outputs, zero.map(|(w, _)| w)).map_err(|e| {
        e.relocate(|at| match at {
            Location::Gate(i) => Location::Line(gate_lines[i]),
            Location::Input(k) => Location::Line(input_lines[k]),
            Location::Output(k) => Location::Line(output_lines[k]),
            Location::Declarations => Location::Line(zero_line),
            other => other,
        })
    })
}

fn parse_wire(token: &str) -> Result<WireId, String> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{token}` is not a non-negative decimal wire id"));
    }
    token
        .parse::<u32>()
        .map(WireId)
        .map_err(|_| format!("wire id `{token}` does not fit in 32 bits"))
}
