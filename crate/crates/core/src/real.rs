//! Reader and writer for the RevLib `.real` format.
//!
//! Accepted dialect:
//!
//! ```text
//! # comment
//! .version 1.0            optional
//! .numvars 3              required
//! .variables a b c        required
//! .inputs a b c           optional, ignored
//! .outputs a b c          optional, ignored
//! .constants 0--          optional, default all '-'
//! .garbage -1-            optional, default all '-'
//! .begin
//! t3 a -b c               X gate, m-1 controls then the target; '-' marks a negative control
//! f3 a b c                SWAP of the last two lines, m-2 controls
//! h1 c                    Hadamard (extension)
//! .end
//! ```
//!
//! `\r` is stripped, so CRLF input is accepted. Input must be ASCII.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{join_violations, Circuit, Control, Gate, GateKind, Line, Polarity, Violation};

#[derive(Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("input is not ASCII")]
    NonAscii,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("directive `{0}` given twice")]
    DuplicateDirective(String),
    #[error("missing required directive `{0}`")]
    MissingDirective(&'static str),
    #[error("bad value for `{directive}`: {reason}")]
    BadValue { directive: &'static str, reason: String },
    #[error(".numvars is {declared} but .variables lists {found} names")]
    NumvarsMismatch { declared: usize, found: usize },
    #[error("duplicate line name `{0}`")]
    DuplicateLineName(String),
    #[error("unknown line name `{0}`")]
    UnknownLineName(String),
    #[error("unknown gate mnemonic `{0}`")]
    UnknownGate(String),
    #[error("gate `{mnemonic}` expects {expected} line(s), found {found}")]
    WidthMismatch { mnemonic: String, expected: usize, found: usize },
    #[error("target `{0}` cannot carry a negative-control marker")]
    NegatedTarget(String),
    #[error("unexpected content outside .begin/.end: `{0}`")]
    UnexpectedContent(String),
    #[error("missing `.end`")]
    MissingEnd,
    #[error("invalid circuit: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

/// A parse failure with the 1-based source line it was detected on
/// (0 when not tied to a line).
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

/// The syntactic content of a `.real` file, before names are resolved.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealDocument {
    pub version: Option<String>,
    pub numvars: usize,
    pub variables: Vec<String>,
    pub constants: Option<String>,
    pub garbage: Option<String>,
    /// Gate token lists with their source line numbers; the first token is the mnemonic.
    pub gates: Vec<(usize, Vec<String>)>,
}

#[derive(PartialEq)]
enum Section {
    Header,
    Body,
    Done,
}

impl RealDocument {
    pub fn parse(text: &str) -> Result<RealDocument, ParseError> {
        if !text.is_ascii() {
            return err(0, ParseErrorKind::NonAscii);
        }
        let mut doc = RealDocument::default();
        let mut numvars = None;
        let mut variables = None;
        let mut seen: Vec<String> = Vec::new();
        let mut section = Section::Header;

        for (idx, raw) in text.split('\n').enumerate() {
            let lineno = idx + 1;
            let raw = raw.trim_end_matches('\r');
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let head = tokens.next().unwrap();
            match section {
                Section::Done => return err(lineno, ParseErrorKind::UnexpectedContent(content.into())),
                Section::Body => {
                    if head == ".end" {
                        section = Section::Done;
                    } else if head.starts_with('.') {
                        return err(lineno, ParseErrorKind::UnexpectedContent(content.into()));
                    } else {
                        doc.gates.push((lineno, content.split_whitespace().map(String::from).collect()));
                    }
                }
                Section::Header => {
                    if !head.starts_with('.') {
                        return err(lineno, ParseErrorKind::UnexpectedContent(content.into()));
                    }
                    if seen.iter().any(|s| s == head) {
                        return err(lineno, ParseErrorKind::DuplicateDirective(head.into()));
                    }
                    seen.push(head.to_string());
                    let rest: Vec<&str> = tokens.collect();
                    match head {
                        ".version" => doc.version = Some(rest.join(" ")),
                        ".numvars" => {
                            let n = match rest.as_slice() {
                                [n] => n.parse::<usize>().ok(),
                                _ => None,
                            };
                            match n {
                                Some(n) => numvars = Some(n),
                                None => {
                                    return err(
                                        lineno,
                                        ParseErrorKind::BadValue {
                                            directive: ".numvars",
                                            reason: format!("expected a count, got `{}`", rest.join(" ")),
                                        },
                                    )
                                }
                            }
                        }
                        ".variables" => variables = Some(rest.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                        ".inputs" | ".outputs" => {}
                        ".constants" => doc.constants = Some(single_value(lineno, ".constants", &rest)?),
                        ".garbage" => doc.garbage = Some(single_value(lineno, ".garbage", &rest)?),
                        ".begin" => section = Section::Body,
                        other => return err(lineno, ParseErrorKind::UnknownDirective(other.into())),
                    }
                }
            }
        }
        if section != Section::Done {
            if section == Section::Header {
                return err(0, ParseErrorKind::MissingDirective(".begin"));
            }
            return err(0, ParseErrorKind::MissingEnd);
        }
        let Some(numvars) = numvars else {
            return err(0, ParseErrorKind::MissingDirective(".numvars"));
        };
        let Some(variables) = variables else {
            return err(0, ParseErrorKind::MissingDirective(".variables"));
        };
        if variables.len() != numvars {
            return err(0, ParseErrorKind::NumvarsMismatch { declared: numvars, found: variables.len() });
        }
        doc.numvars = numvars;
        doc.variables = variables;
        Ok(doc)
    }

    /// Resolve names and build a validated circuit.
    pub fn to_circuit(&self) -> Result<Circuit, ParseError> {
        let n = self.variables.len();
        let mut index = HashMap::new();
        for (i, name) in self.variables.iter().enumerate() {
            if name.starts_with('-') {
                return err(
                    0,
                    ParseErrorKind::BadValue { directive: ".variables", reason: format!("name `{name}` starts with '-'") },
                );
            }
            if index.insert(name.as_str(), i).is_some() {
                return err(0, ParseErrorKind::DuplicateLineName(name.clone()));
            }
        }
        let constants = match &self.constants {
            None => vec![None; n],
            Some(s) => {
                check_len(".constants", s, n)?;
                s.chars()
                    .map(|c| match c {
                        '0' => Ok(Some(false)),
                        '1' => Ok(Some(true)),
                        '-' => Ok(None),
                        other => bad_char(".constants", other),
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let garbage = match &self.garbage {
            None => vec![false; n],
            Some(s) => {
                check_len(".garbage", s, n)?;
                s.chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '-' => Ok(false),
                        other => bad_char(".garbage", other),
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let lines = self
            .variables
            .iter()
            .zip(constants)
            .zip(garbage)
            .map(|((name, constant), garbage)| Line { name: name.clone(), constant, garbage })
            .collect();

        let mut gates = Vec::with_capacity(self.gates.len());
        for (lineno, tokens) in &self.gates {
            gates.push(parse_gate(*lineno, tokens, &index)?);
        }
        let circuit = Circuit::from_parts(lines, gates);
        let violations = circuit.validate();
        if !violations.is_empty() {
            return err(0, ParseErrorKind::Invalid(violations));
        }
        Ok(circuit)
    }
}

fn single_value(lineno: usize, directive: &'static str, rest: &[&str]) -> Result<String, ParseError> {
    match rest {
        [v] => Ok(v.to_string()),
        _ => err(lineno, ParseErrorKind::BadValue { directive, reason: "expected exactly one value".into() }),
    }
}

fn check_len(directive: &'static str, s: &str, n: usize) -> Result<(), ParseError> {
    if s.len() != n {
        return err(
            0,
            ParseErrorKind::BadValue { directive, reason: format!("expected {n} characters, found {}", s.len()) },
        );
    }
    Ok(())
}

fn bad_char<T>(directive: &'static str, c: char) -> Result<T, ParseError> {
    err(0, ParseErrorKind::BadValue { directive, reason: format!("unexpected character `{c}`") })
}

fn parse_gate(lineno: usize, tokens: &[String], index: &HashMap<&str, usize>) -> Result<Gate, ParseError> {
    let mnemonic = tokens[0].as_str();
    let unknown = || ParseError { line: lineno, kind: ParseErrorKind::UnknownGate(mnemonic.into()) };
    let (letter, width) = mnemonic.split_at(1);
    let width: usize = width.parse().map_err(|_| unknown())?;
    let (kind, n_targets) = match letter {
        "t" if width >= 1 => (GateKind::X, 1),
        "f" if width >= 2 => (GateKind::Swap, 2),
        "h" if width == 1 => (GateKind::Hadamard, 1),
        _ => return Err(unknown()),
    };
    let operands = &tokens[1..];
    if operands.len() != width {
        return err(
            lineno,
            ParseErrorKind::WidthMismatch { mnemonic: mnemonic.into(), expected: width, found: operands.len() },
        );
    }
    let resolve = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError { line: lineno, kind: ParseErrorKind::UnknownLineName(name.into()) })
    };
    let split = width - n_targets;
    let mut controls = Vec::with_capacity(split);
    for tok in &operands[..split] {
        let (polarity, name) = match tok.strip_prefix('-') {
            Some(name) => (Polarity::Negative, name),
            None => (Polarity::Positive, tok.as_str()),
        };
        controls.push(Control { line: resolve(name)?, polarity });
    }
    let mut targets = Vec::with_capacity(n_targets);
    for tok in &operands[split..] {
        if tok.starts_with('-') {
            return err(lineno, ParseErrorKind::NegatedTarget(tok.clone()));
        }
        targets.push(resolve(tok)?);
    }
    Ok(Gate::new(kind, controls, targets))
}

/// Parse `.real` text into a validated circuit.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    RealDocument::parse(text)?.to_circuit()
}

/// Parse raw bytes; anything other than ASCII is rejected.
pub fn parse_bytes(bytes: &[u8]) -> Result<Circuit, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError { line: 0, kind: ParseErrorKind::NonAscii })?;
    parse(text)
}

/// Serialize a circuit. Output is a pure function of the circuit.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    let names: Vec<&str> = circuit.line_names().collect();
    out.push_str(".version 1.0\n");
    let _ = writeln!(out, ".numvars {}", names.len());
    let _ = writeln!(out, ".variables {}", names.join(" "));
    let constants: String = circuit
        .lines()
        .iter()
        .map(|l| match l.constant {
            Some(false) => '0',
            Some(true) => '1',
            None => '-',
        })
        .collect();
    let garbage: String = circuit.lines().iter().map(|l| if l.garbage { '1' } else { '-' }).collect();
    let _ = writeln!(out, ".constants {constants}");
    let _ = writeln!(out, ".garbage {garbage}");
    out.push_str(".begin\n");
    for g in circuit.gates() {
        let letter = match g.kind() {
            GateKind::X => 't',
            GateKind::Swap => 'f',
            GateKind::Hadamard => 'h',
        };
        let _ = write!(out, "{letter}{}", g.controls().len() + g.targets().len());
        for c in g.controls() {
            let sign = if c.polarity == Polarity::Negative { "-" } else { "" };
            let _ = write!(out, " {sign}{}", names[c.line]);
        }
        for &t in g.targets() {
            let _ = write!(out, " {}", names[t]);
        }
        out.push('\n');
    }
    out.push_str(".end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind_of(text: &str) -> ParseErrorKind {
        parse(text).unwrap_err().kind
    }

    #[test]
    fn single_toffoli() {
        let c = parse(".numvars 3\n.variables a b c\n.begin\nt3 a b c\n.end\n").unwrap();
        assert_eq!(c.line_count(), 3);
        assert_eq!(c.gates(), &[Gate::toffoli(0, 1, 2)]);
    }

    #[test]
    fn fredkin_and_negative_control() {
        let c = parse(".numvars 3\n.variables a b c\n.begin\nf3 a b c\nt2 -a b\n.end\n").unwrap();
        assert_eq!(c.gates()[0], Gate::fredkin(Control::pos(0), 1, 2));
        assert_eq!(c.gates()[1], Gate::mct([Control::neg(0)], 1));
    }

    #[test]
    fn header_defaults_and_comments() {
        let text = "# header\r\n.version 2.0\r\n.numvars 2\r\n.variables x y # trailing\r\n\r\n.inputs x y\r\n.outputs x y\r\n.constants 0-\r\n.garbage -1\r\n.begin\r\nh1 x\r\n.end\r\n";
        let c = parse(text).unwrap();
        assert_eq!(c.lines()[0].constant, Some(false));
        assert_eq!(c.lines()[1].constant, None);
        assert!(c.lines()[1].garbage);
        assert_eq!(c.gates(), &[Gate::hadamard(0)]);
    }

    #[test]
    fn errors() {
        let hdr = ".numvars 2\n.variables a b\n.begin\n";
        assert_eq!(kind_of(".numvars 2\n.variables a b\n.foo\n.begin\n.end\n"), ParseErrorKind::UnknownDirective(".foo".into()));
        assert_eq!(kind_of(&format!("{hdr}v2 a b\n.end\n")), ParseErrorKind::UnknownGate("v2".into()));
        assert_eq!(kind_of(&format!("{hdr}p3 a b\n.end\n")), ParseErrorKind::UnknownGate("p3".into()));
        assert_eq!(kind_of(&format!("{hdr}h2 a b\n.end\n")), ParseErrorKind::UnknownGate("h2".into()));
        assert_eq!(
            kind_of(&format!("{hdr}t3 a b\n.end\n")),
            ParseErrorKind::WidthMismatch { mnemonic: "t3".into(), expected: 3, found: 2 }
        );
        assert_eq!(kind_of(&format!("{hdr}t2 a z\n.end\n")), ParseErrorKind::UnknownLineName("z".into()));
        assert_eq!(kind_of(&format!("{hdr}t2 a -b\n.end\n")), ParseErrorKind::NegatedTarget("-b".into()));
        assert_eq!(kind_of(".numvars 2\n.variables a a\n.begin\n.end\n"), ParseErrorKind::DuplicateLineName("a".into()));
        assert_eq!(
            kind_of(".numvars 3\n.variables a b\n.begin\n.end\n"),
            ParseErrorKind::NumvarsMismatch { declared: 3, found: 2 }
        );
        assert_eq!(kind_of(&format!("{hdr}t1 a\n")), ParseErrorKind::MissingEnd);
        assert_eq!(kind_of(".variables a\n.begin\n.end\n"), ParseErrorKind::MissingDirective(".numvars"));
        assert!(matches!(kind_of(&format!("{hdr}t2 a a\n.end\n")), ParseErrorKind::Invalid(_)));
        assert!(matches!(kind_of(".numvars 2\n.variables a b\n.constants 0\n.begin\n.end\n"), ParseErrorKind::BadValue { .. }));
        assert_eq!(kind_of(&format!("{hdr}.end\nt1 a\n")), ParseErrorKind::UnexpectedContent("t1 a".into()));
        assert_eq!(parse_bytes(&[0xff]).unwrap_err().kind, ParseErrorKind::NonAscii);
    }

    #[test]
    fn emit_empty_circuit() {
        let c = Circuit::with_names(["a", "b"]);
        assert_eq!(
            emit(&c),
            ".version 1.0\n.numvars 2\n.variables a b\n.constants --\n.garbage --\n.begin\n.end\n"
        );
    }

    #[test]
    fn emit_sorted_controls_and_hadamard() {
        let c = Circuit::with_names(["a", "b", "c", "d"]).with_gates([
            Gate::mct([Control::pos(2), Control::neg(0)], 1),
            Gate::cswap([Control::pos(3)], 2, 0),
            Gate::hadamard(3),
        ]);
        let text = emit(&c);
        assert!(text.contains("\nt3 -a c b\n"));
        assert!(text.contains("\nf3 d c a\n"));
        assert!(text.contains("\nh1 d\n"));
        assert!(!text.lines().any(|l| l.ends_with(' ')));
        assert_eq!(parse(&text).unwrap(), c);
    }
}
