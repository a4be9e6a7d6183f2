//! `if x then A else B` with uncontrolled copies of A and B.
//!
//! Line layout of both constructions: line 0 is the condition, lines
//! `1..=n` the data register, and (compiled form only) lines `n+1..=2n`
//! the ancilla register.

use crate::circuit::{Circuit, Control, Gate, Line};

use super::RewriteError;

fn check_branches(then_branch: &Circuit, else_branch: &Circuit) -> Result<usize, RewriteError> {
    if !then_branch.is_boolean() || !else_branch.is_boolean() {
        return Err(RewriteError::NotBoolean);
    }
    let n = then_branch.line_count();
    if else_branch.line_count() != n {
        return Err(RewriteError::RegisterMismatch(format!(
            "branches act on {n} and {} lines",
            else_branch.line_count()
        )));
    }
    Ok(n)
}

fn shifted(c: &Circuit, by: usize) -> impl Iterator<Item = Gate> + '_ {
    c.gates().iter().map(move |g| g.remap(|l| l + by))
}

fn data_lines(condition: &str, branch: &Circuit) -> Vec<Line> {
    std::iter::once(Line::free(condition)).chain(branch.lines().iter().cloned()).collect()
}

/// Hadamard layer on the ancillae, controlled swap of data and ancillae,
/// `then_branch` on the ancillae alongside `else_branch` on the data, the
/// same controlled swap, and a closing Hadamard layer.
pub fn compile_if_then_else(condition: &str, then_branch: &Circuit, else_branch: &Circuit) -> Result<Circuit, RewriteError> {
    let n = check_branches(then_branch, else_branch)?;
    let ancilla = |j: usize| n + 1 + j;
    let hadamards = (0..n).map(|j| Gate::hadamard(ancilla(j)));
    let swaps = (0..n).map(|j| Gate::fredkin(Control::pos(0), 1 + j, ancilla(j)));
    let gates: Vec<Gate> = hadamards
        .clone()
        .chain(swaps.clone())
        .chain(shifted(then_branch, n + 1))
        .chain(shifted(else_branch, 1))
        .chain(swaps)
        .chain(hadamards)
        .collect();
    let base = Circuit::from_parts(data_lines(condition, then_branch), Vec::new()).extend_lines(n, false);
    let out = Circuit::from_parts(base.lines().to_vec(), gates);
    let violations = out.validate();
    if !violations.is_empty() {
        return Err(crate::circuit::CircuitError::InvalidGates(violations).into());
    }
    Ok(out)
}

/// `then_branch` controlled on the condition followed by `else_branch`
/// controlled on its negation.
pub fn if_then_else_reference(condition: &str, then_branch: &Circuit, else_branch: &Circuit) -> Result<Circuit, RewriteError> {
    check_branches(then_branch, else_branch)?;
    let gates = shifted(then_branch, 1)
        .map(|g| g.with_control(Control::pos(0)))
        .chain(shifted(else_branch, 1).map(|g| g.with_control(Control::neg(0))))
        .collect();
    Ok(Circuit::from_parts(data_lines(condition, then_branch), gates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{check_equivalence, EquivalenceOptions, Verdict};

    fn ancillas(n: usize) -> Vec<usize> {
        (n + 1..=2 * n).collect()
    }

    #[test]
    fn not_or_nothing_is_cnot() {
        let a = Circuit::new(1).with_gates([Gate::not(0)]);
        let b = Circuit::new(1);
        let out = compile_if_then_else("x", &a, &b).unwrap();
        assert_eq!(out.line_count(), 3);
        let cnot = Circuit::new(2).with_gates([Gate::cnot(0, 1)]);
        assert_eq!(check_equivalence(&cnot, &out, &ancillas(1), &EquivalenceOptions::default()), Verdict::Equivalent);
    }

    #[test]
    fn equal_branches_are_unconditional() {
        let a = Circuit::new(2).with_gates([Gate::cnot(0, 1), Gate::not(0)]);
        let out = compile_if_then_else("x", &a, &a).unwrap();
        let plain = Circuit::new(3).with_gates(shifted(&a, 1));
        assert_eq!(check_equivalence(&plain, &out, &ancillas(2), &EquivalenceOptions::default()), Verdict::Equivalent);
    }

    #[test]
    fn matches_reference() {
        let a = Circuit::new(2).with_gates([Gate::cnot(0, 1), Gate::not(0)]);
        let b = Circuit::new(2).with_gates([Gate::swap(0, 1)]);
        let out = compile_if_then_else("x", &a, &b).unwrap();
        let reference = if_then_else_reference("x", &a, &b).unwrap();
        assert_eq!(check_equivalence(&reference, &out, &ancillas(2), &EquivalenceOptions::default()), Verdict::Equivalent);
        assert_eq!(out.line_names().next(), Some("x"));
    }

    #[test]
    fn register_mismatch() {
        assert!(matches!(
            compile_if_then_else("x", &Circuit::new(1), &Circuit::new(2)),
            Err(RewriteError::RegisterMismatch(_))
        ));
    }
}
