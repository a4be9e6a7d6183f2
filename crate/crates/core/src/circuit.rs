//! Gate and circuit intermediate representation.
//!
//! Lines are addressed by 0-based index. A [`Circuit`] carries per-line names,
//! optional constant inputs and garbage-output flags alongside its gate list.
//! Every editing operation returns a new value and leaves its input untouched.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Control polarity: `Positive` fires on |1⟩, `Negative` on |0⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    /// Whether a line holding `bit` satisfies this control.
    #[inline]
    pub fn accepts(self, bit: bool) -> bool {
        match self {
            Polarity::Positive => bit,
            Polarity::Negative => !bit,
        }
    }
}

/// A control literal: a line together with its polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Control {
    pub line: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(line: usize) -> Self {
        Control { line, polarity: Polarity::Positive }
    }

    pub fn neg(line: usize) -> Self {
        Control { line, polarity: Polarity::Negative }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.line),
            Polarity::Negative => write!(f, "-{}", self.line),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GateKind {
    /// Multiple-control Toffoli family (NOT, CNOT, Toffoli, C^mNOT).
    X,
    /// Multiple-control SWAP (SWAP, Fredkin, ...).
    Swap,
    /// Uncontrolled Hadamard.
    Hadamard,
}

/// One reversible or quantum gate.
///
/// Controls are kept sorted by line so that structurally equal gates compare
/// equal regardless of the order they were given in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    controls: Vec<Control>,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, controls: impl IntoIterator<Item = Control>, targets: Vec<usize>) -> Self {
        let mut controls: Vec<Control> = controls.into_iter().collect();
        controls.sort();
        Gate { kind, controls, targets }
    }

    pub fn not(target: usize) -> Self {
        Gate::new(GateKind::X, [], vec![target])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateKind::X, [Control::pos(control)], vec![target])
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::new(GateKind::X, [Control::pos(c1), Control::pos(c2)], vec![target])
    }

    /// Multiple-control Toffoli with arbitrary control literals.
    pub fn mct(controls: impl IntoIterator<Item = Control>, target: usize) -> Self {
        Gate::new(GateKind::X, controls, vec![target])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, [], vec![a, b])
    }

    pub fn fredkin(control: Control, a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, [control], vec![a, b])
    }

    /// Multiple-control SWAP.
    pub fn cswap(controls: impl IntoIterator<Item = Control>, a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, controls, vec![a, b])
    }

    pub fn hadamard(target: usize) -> Self {
        Gate::new(GateKind::Hadamard, [], vec![target])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_boolean(&self) -> bool {
        self.kind != GateKind::Hadamard
    }

    pub fn control_on(&self, line: usize) -> Option<Polarity> {
        self.controls.iter().find(|c| c.line == line).map(|c| c.polarity)
    }

    pub fn has_control(&self, control: Control) -> bool {
        self.controls.contains(&control)
    }

    /// All lines the gate touches, ascending and deduplicated.
    pub fn lines(&self) -> BTreeSet<usize> {
        self.controls.iter().map(|c| c.line).chain(self.targets.iter().copied()).collect()
    }

    pub fn touches(&self, line: usize) -> bool {
        self.targets.contains(&line) || self.controls.iter().any(|c| c.line == line)
    }

    /// Number of distinct lines the gate acts on.
    pub fn arity(&self) -> usize {
        self.lines().len()
    }

    /// Same gate with one more control literal.
    pub fn with_control(&self, control: Control) -> Gate {
        let mut controls = self.controls.clone();
        controls.push(control);
        Gate::new(self.kind, controls, self.targets.clone())
    }

    /// Same gate with the given control lines removed.
    pub fn without_controls(&self, lines: &[usize]) -> Gate {
        let controls = self.controls.iter().copied().filter(|c| !lines.contains(&c.line));
        Gate::new(self.kind, controls, self.targets.clone())
    }

    /// Relabel every line through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        let controls = self.controls.iter().map(|c| Control { line: map(c.line), polarity: c.polarity });
        Gate::new(self.kind, controls, self.targets.iter().map(|&t| map(t)).collect())
    }

    /// Structural problems of this gate in isolation, given a line count.
    fn check(&self, line_count: usize) -> Vec<Rule> {
        let mut rules = Vec::new();
        let expected = match self.kind {
            GateKind::X | GateKind::Hadamard => 1,
            GateKind::Swap => 2,
        };
        if self.targets.len() != expected {
            rules.push(Rule::TargetCount { expected, found: self.targets.len() });
        }
        if self.kind == GateKind::Hadamard && !self.controls.is_empty() {
            rules.push(Rule::ControlledHadamard);
        }
        for line in self.controls.iter().map(|c| c.line).chain(self.targets.iter().copied()) {
            if line >= line_count {
                rules.push(Rule::LineOutOfRange { line });
            }
        }
        let mut seen = HashSet::new();
        for c in &self.controls {
            if !seen.insert(c.line) {
                rules.push(Rule::DuplicateControl { line: c.line });
            }
        }
        for (i, t) in self.targets.iter().enumerate() {
            if seen.contains(t) {
                rules.push(Rule::ControlIsTarget { line: *t });
            }
            if self.targets[..i].contains(t) {
                rules.push(Rule::RepeatedTarget { line: *t });
            }
        }
        rules
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::X => "X",
            GateKind::Swap => "SWAP",
            GateKind::Hadamard => "H",
        };
        write!(f, "{name}(")?;
        for c in &self.controls {
            write!(f, "{c},")?;
        }
        let targets: Vec<String> = self.targets.iter().map(|t| t.to_string()).collect();
        write!(f, "{})", targets.join(","))
    }
}

/// The specific invariant a [`Violation`] breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    EmptyRegister,
    DuplicateLineName { name: String },
    LineOutOfRange { line: usize },
    DuplicateControl { line: usize },
    ControlIsTarget { line: usize },
    RepeatedTarget { line: usize },
    TargetCount { expected: usize, found: usize },
    ControlledHadamard,
}

/// A structural problem found by [`Circuit::validate`]. `gate` is `None` for
/// problems with the line declarations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub gate: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(g) = self.gate {
            write!(f, "gate {g}: ")?;
        }
        match &self.rule {
            Rule::EmptyRegister => write!(f, "circuit has no lines"),
            Rule::DuplicateLineName { name } => write!(f, "duplicate line name `{name}`"),
            Rule::LineOutOfRange { line } => write!(f, "line {line} out of range"),
            Rule::DuplicateControl { line } => write!(f, "line {line} used as control twice"),
            Rule::ControlIsTarget { line } => write!(f, "line {line} is both control and target"),
            Rule::RepeatedTarget { line } => write!(f, "line {line} repeated among targets"),
            Rule::TargetCount { expected, found } => {
                write!(f, "expected {expected} target(s), found {found}")
            }
            Rule::ControlledHadamard => write!(f, "controlled Hadamard is not supported"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("position {position} out of range for {len} gates")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("invalid gate(s): {}", join_violations(.0))]
    InvalidGates(Vec<Violation>),
    #[error("cannot add a control to a Hadamard gate")]
    ControlledHadamard,
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A line declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub name: String,
    /// Fixed input value, or `None` for a free input.
    pub constant: Option<bool>,
    /// Whether the output on this line is don't-care.
    pub garbage: bool,
}

impl Line {
    pub fn free(name: impl Into<String>) -> Self {
        Line { name: name.into(), constant: None, garbage: false }
    }
}

/// An ordered gate list over named lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    lines: Vec<Line>,
    gates: Vec<Gate>,
}

impl Circuit {
    /// `n` free lines named `x0 .. x{n-1}`.
    pub fn new(n: usize) -> Self {
        Circuit { lines: (0..n).map(|i| Line::free(format!("x{i}"))).collect(), gates: Vec::new() }
    }

    pub fn with_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Circuit { lines: names.into_iter().map(Line::free).collect(), gates: Vec::new() }
    }

    pub fn from_parts(lines: Vec<Line>, gates: Vec<Gate>) -> Self {
        Circuit { lines, gates }
    }

    /// Builder-style helper for constructing circuits in code.
    pub fn with_gates(mut self, gates: impl IntoIterator<Item = Gate>) -> Self {
        self.gates.extend(gates);
        self
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line_names(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(|l| l.name.as_str())
    }

    pub fn line_index(&self, name: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.name == name)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// True when every gate is an X or SWAP (no Hadamards).
    pub fn is_boolean(&self) -> bool {
        self.gates.iter().all(Gate::is_boolean)
    }

    /// Empty list iff all gate and circuit invariants hold.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.lines.is_empty() {
            out.push(Violation { gate: None, rule: Rule::EmptyRegister });
        }
        let mut names = HashSet::new();
        for line in &self.lines {
            if !names.insert(line.name.as_str()) {
                out.push(Violation {
                    gate: None,
                    rule: Rule::DuplicateLineName { name: line.name.clone() },
                });
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            out.extend(g.check(self.lines.len()).into_iter().map(|rule| Violation { gate: Some(i), rule }));
        }
        out
    }

    fn check_gates(&self, gates: &[Gate], offset: usize) -> Result<(), CircuitError> {
        let violations: Vec<Violation> = gates
            .iter()
            .enumerate()
            .flat_map(|(i, g)| {
                g.check(self.lines.len()).into_iter().map(move |rule| Violation { gate: Some(offset + i), rule })
            })
            .collect();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(CircuitError::InvalidGates(violations))
        }
    }

    pub fn append(&self, gate: Gate) -> Result<Circuit, CircuitError> {
        self.splice(self.gates.len(), vec![gate])
    }

    pub fn insert(&self, position: usize, gate: Gate) -> Result<Circuit, CircuitError> {
        self.splice(position, vec![gate])
    }

    /// Insert `gates` before index `position`.
    pub fn splice(&self, position: usize, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
        if position > self.gates.len() {
            return Err(CircuitError::PositionOutOfRange { position, len: self.gates.len() });
        }
        self.check_gates(&gates, position)?;
        let mut out = self.clone();
        out.gates.splice(position..position, gates);
        Ok(out)
    }

    pub fn remove(&self, position: usize) -> Result<Circuit, CircuitError> {
        if position >= self.gates.len() {
            return Err(CircuitError::PositionOutOfRange { position, len: self.gates.len() });
        }
        let mut out = self.clone();
        out.gates.remove(position);
        Ok(out)
    }

    /// Replace the gates in `range` with `gates`.
    pub fn replace_range(&self, range: std::ops::Range<usize>, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
        if range.start > range.end || range.end > self.gates.len() {
            return Err(CircuitError::PositionOutOfRange { position: range.end, len: self.gates.len() });
        }
        self.check_gates(&gates, range.start)?;
        let mut out = self.clone();
        out.gates.splice(range, gates);
        Ok(out)
    }

    /// Append `k` lines with the given constant input, marked garbage, with
    /// fresh names that do not collide with existing ones.
    pub fn extend_lines(&self, k: usize, constant: bool) -> Circuit {
        let mut out = self.clone();
        let mut taken: HashSet<String> = self.lines.iter().map(|l| l.name.clone()).collect();
        let mut next = 0usize;
        for _ in 0..k {
            let name = loop {
                let candidate = format!("anc{next}");
                next += 1;
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            taken.insert(name.clone());
            out.lines.push(Line { name, constant: Some(constant), garbage: true });
        }
        out
    }

    /// The same circuit with every gate controlled on `control`.
    pub fn controlled_by(&self, control: Control) -> Result<Circuit, CircuitError> {
        let mut out = self.clone();
        out.gates.clear();
        for g in &self.gates {
            if !g.is_boolean() {
                return Err(CircuitError::ControlledHadamard);
            }
            out.gates.push(g.with_control(control));
        }
        Ok(out)
    }

    /// Gate-reversed circuit. Every supported gate is self-inverse.
    pub fn inverse(&self) -> Circuit {
        let mut out = self.clone();
        out.gates.reverse();
        out
    }

    /// Concatenate the gates of `other` (which must have the same width).
    pub fn then(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        let pos = self.gates.len();
        self.splice(pos, other.gates.clone())
    }
}

/// Preparation state of an ancilla line at a program point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AncillaMode {
    /// Holds |0⟩.
    Zero,
    /// Holds (|0⟩ + |1⟩)/√2.
    Uniform,
}

/// Tracks the Hadamard parity of ancilla lines along a gate sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AncillaTracker {
    modes: BTreeMap<usize, AncillaMode>,
}

impl AncillaTracker {
    pub fn new(lines: impl IntoIterator<Item = usize>) -> Self {
        AncillaTracker { modes: lines.into_iter().map(|l| (l, AncillaMode::Zero)).collect() }
    }

    pub fn track(&mut self, line: usize) {
        self.modes.entry(line).or_insert(AncillaMode::Zero);
    }

    pub fn mode(&self, line: usize) -> Option<AncillaMode> {
        self.modes.get(&line).copied()
    }

    pub fn lines(&self) -> impl Iterator<Item = (usize, AncillaMode)> + '_ {
        self.modes.iter().map(|(&l, &m)| (l, m))
    }

    /// Record the effect of `gate`. Only Hadamards on tracked lines change state.
    pub fn apply(&mut self, gate: &Gate) {
        if gate.kind() != GateKind::Hadamard {
            return;
        }
        if let Some(mode) = self.modes.get_mut(&gate.targets()[0]) {
            *mode = match mode {
                AncillaMode::Zero => AncillaMode::Uniform,
                AncillaMode::Uniform => AncillaMode::Zero,
            };
        }
    }

    pub fn all_zero(&self) -> bool {
        self.modes.values().all(|&m| m == AncillaMode::Zero)
    }
}
