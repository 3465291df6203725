//! Reader and writer for the bench netlist format.

use super::{Circuit, Gate, GateKind, NetlistError};

/// Parse bench text: `#` comments, `INPUT(x)`, `OUTPUT(y)` and
/// `name = KIND(a, b, ...)` lines. Keywords are case-insensitive, gate and
/// output order follows the file.
pub fn parse_bench(text: &str) -> Result<Circuit, NetlistError> {
    let mut pis = Vec::new();
    let mut pos = Vec::new();
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = strip_keyword(content, "INPUT") {
            pis.push(parse_paren_name(rest, line)?);
        } else if let Some(rest) = strip_keyword(content, "OUTPUT") {
            pos.push(parse_paren_name(rest, line)?);
        } else if let Some(eq) = content.find('=') {
            let name = content[..eq].trim();
            if name.is_empty() || !is_identifier(name) {
                return Err(NetlistError::Syntax {
                    line,
                    msg: format!("bad signal name `{name}`"),
                });
            }
            let rhs = content[eq + 1..].trim();
            let open = rhs.find('(').ok_or(NetlistError::Syntax {
                line,
                msg: "expected `KIND(...)` after `=`".into(),
            })?;
            if !rhs.ends_with(')') {
                return Err(NetlistError::Syntax {
                    line,
                    msg: "missing closing parenthesis".into(),
                });
            }
            let word = rhs[..open].trim();
            let kind = GateKind::from_keyword(word).ok_or_else(|| {
                NetlistError::UnsupportedKeyword {
                    line,
                    word: word.to_string(),
                }
            })?;
            let args = rhs[open + 1..rhs.len() - 1].trim();
            let fanins: Vec<String> = if args.is_empty() {
                Vec::new()
            } else {
                args.split(',')
                    .map(|a| {
                        let a = a.trim();
                        if a.is_empty() || !is_identifier(a) {
                            Err(NetlistError::Syntax {
                                line,
                                msg: format!("bad fanin list `{args}`"),
                            })
                        } else {
                            Ok(a.to_string())
                        }
                    })
                    .collect::<Result<_, _>>()?
            };
            if !kind.arity_ok(fanins.len()) {
                return Err(NetlistError::BadArity {
                    gate: name.to_string(),
                    kind,
                    got: fanins.len(),
                });
            }
            gates.push(Gate {
                name: name.to_string(),
                kind,
                fanins,
            });
        } else {
            return Err(NetlistError::Syntax {
                line,
                msg: format!("unrecognized line `{content}`"),
            });
        }
    }
    Circuit::new(pis, pos, gates)
}

fn strip_keyword<'a>(content: &'a str, kw: &str) -> Option<&'a str> {
    if content.len() >= kw.len() && content[..kw.len()].eq_ignore_ascii_case(kw) {
        let rest = content[kw.len()..].trim_start();
        if rest.starts_with('(') {
            return Some(rest);
        }
    }
    None
}

fn parse_paren_name(rest: &str, line: usize) -> Result<String, NetlistError> {
    let inner = rest
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or(NetlistError::Syntax {
            line,
            msg: "expected `(name)`".into(),
        })?
        .trim();
    if inner.is_empty() || !is_identifier(inner) {
        return Err(NetlistError::Syntax {
            line,
            msg: format!("bad signal name `{inner}`"),
        });
    }
    Ok(inner.to_string())
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !"(),=#".contains(c))
}

/// Emit bench text. Header comments become leading `#` lines. CONST0/CONST1
/// pseudo-gates are lowered to `XOR(s, s)` / `XNOR(s, s)` over the first
/// primary input so the emitted file stays within the standard dialect;
/// they are only kept verbatim when the circuit has no primary input at all.
pub fn write_bench(c: &Circuit, header_comments: &[String]) -> String {
    let mut out = String::new();
    for h in header_comments {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    for pi in c.primary_inputs() {
        out.push_str(&format!("INPUT({pi})\n"));
    }
    for po in c.primary_outputs() {
        out.push_str(&format!("OUTPUT({po})\n"));
    }
    let anchor = c.primary_inputs().first().cloned();
    for g in c.gates() {
        match (g.kind, &anchor) {
            (GateKind::Const0, Some(s)) => {
                out.push_str(&format!("{} = XOR({s}, {s})\n", g.name));
            }
            (GateKind::Const1, Some(s)) => {
                out.push_str(&format!("{} = XNOR({s}, {s})\n", g.name));
            }
            _ => {
                out.push_str(&format!(
                    "{} = {}({})\n",
                    g.name,
                    g.kind.keyword(),
                    g.fanins.join(", ")
                ));
            }
        }
    }
    out
}

/// Structural identity: same interface, same gate names, kinds and fanin
/// orders, gates in the same order.
pub fn structurally_identical(a: &Circuit, b: &Circuit) -> bool {
    a.primary_inputs() == b.primary_inputs()
        && a.primary_outputs() == b.primary_outputs()
        && a.gates() == b.gates()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::CircuitBuilder;

    #[test]
    fn minimal_file_parses() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)").unwrap();
        assert_eq!(c.primary_inputs(), ["a", "b"]);
        assert_eq!(c.primary_outputs(), ["y"]);
        assert_eq!(c.gate_count(), 1);
    }

    #[test]
    fn undefined_fanin_is_reported() {
        let err = parse_bench("OUTPUT(y)\ny = AND(a, b)").unwrap_err();
        assert!(matches!(err, NetlistError::UndefinedFanin { .. }));
    }

    #[test]
    fn syntax_error_carries_line_number() {
        let err = parse_bench("INPUT(a)\nINPUT(b)\nwhat is this\n").unwrap_err();
        match err {
            NetlistError::Syntax { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn unsupported_keyword_is_reported() {
        let err = parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(a)").unwrap_err();
        match err {
            NetlistError::UnsupportedKeyword { word, .. } => assert_eq!(word, "DFF"),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn duplicate_definition_is_reported() {
        let err = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\ny = OR(a, b)")
            .unwrap_err();
        assert!(matches!(err, NetlistError::DuplicateSignal(_)));
    }

    #[test]
    fn keywords_are_case_insensitive_and_whitespace_tolerant() {
        let c = parse_bench("  input( a )\n output(y) \n y   =  nand( a,a )").unwrap();
        assert_eq!(c.gate(&"y".to_string()).unwrap().kind, GateKind::Nand);
    }

    #[test]
    fn comments_are_opaque() {
        let c = parse_bench(
            "# locklab: technique=cac, seed=7\nINPUT(a)\nOUTPUT(y)\ny = NOT(a) # trailing note",
        )
        .unwrap();
        assert_eq!(c.gate_count(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let src = "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)";
        let c = parse_bench(src).unwrap();
        let again = parse_bench(&write_bench(&c, &[])).unwrap();
        assert!(structurally_identical(&c, &again));
        let text = write_bench(&c, &[]);
        assert!(text.starts_with("INPUT(a)\n"));
    }

    #[test]
    fn const_gates_are_lowered_to_standard_dialect() {
        let c = parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, a)").unwrap();
        let mut b = CircuitBuilder::from_circuit(&c);
        let zero = b.gate(GateKind::Const0, vec![]);
        let one = b.gate(GateKind::Const1, vec![]);
        b.add_named_gate("z", GateKind::And, vec![zero, one]).unwrap();
        let c = b.build().unwrap();
        let text = write_bench(&c, &[]);
        assert!(!text.contains("CONST"));
        let again = parse_bench(&text).unwrap();
        // lowered form is functionally identical
        for v in 0..2u64 {
            let input = crate::netlist::BitVector::from_u64(1, v)
                .assignment(&["a".to_string()]);
            assert_eq!(
                c.simulate(&input).unwrap()["y"],
                again.simulate(&input).unwrap()["y"]
            );
        }
    }
}
