//! Gate moves that make shared-control runs contiguous.

use std::collections::{BTreeSet, HashMap};

use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::cost::CostModel;
use crate::sim::{permutation_of, SimLimits};

use super::{estimated_cost, RewriteError};

const MAX_SWEEPS: usize = 4;
const MAX_SLIDE: usize = 8;

/// Whether `a` and `b` commute for a trivial reason: they share no line, or
/// both are X gates and neither target is a control of the other.
pub fn gates_commute(a: &Gate, b: &Gate) -> bool {
    let (la, lb) = (a.lines(), b.lines());
    if la.is_disjoint(&lb) {
        return true;
    }
    a.kind() == GateKind::X
        && b.kind() == GateKind::X
        && a.control_on(b.targets()[0]).is_none()
        && b.control_on(a.targets()[0]).is_none()
}

fn window_permutation(gates: &[Gate], lines: &BTreeSet<usize>, limits: &SimLimits) -> Result<Vec<u32>, RewriteError> {
    let index: HashMap<usize, usize> = lines.iter().enumerate().map(|(j, &l)| (l, j)).collect();
    let local = Circuit::new(lines.len()).with_gates(gates.iter().map(|g| g.remap(|l| index[&l])));
    Ok(permutation_of(&local, limits.permutation_width)?.table().to_vec())
}

/// Move the gate after a CNOT to its left: `[CNOT(u, v), G]` with `u` and
/// `v` positive controls of `G` becomes `[G, G', CNOT(u, v)]`, where `G'` is
/// `G` without its control on `v`.
pub fn commute_toffoli_past_cnot(c: &Circuit, position: usize, limits: &SimLimits) -> Result<Circuit, RewriteError> {
    let mismatch = |msg: String| Err(RewriteError::PatternMismatch(msg));
    let (Some(cnot), Some(next)) = (c.gates().get(position), c.gates().get(position + 1)) else {
        return mismatch(format!("no gate pair at position {position}"));
    };
    let is_cnot = cnot.kind() == GateKind::X
        && cnot.controls().len() == 1
        && cnot.controls()[0].polarity == Polarity::Positive;
    if !is_cnot {
        return mismatch(format!("gate {position} is not a positively controlled CNOT"));
    }
    let (u, v) = (cnot.controls()[0].line, cnot.targets()[0]);
    if next.kind() != GateKind::X
        || next.control_on(u) != Some(Polarity::Positive)
        || next.control_on(v) != Some(Polarity::Positive)
    {
        return mismatch(format!("gate {} is not an X gate positively controlled on lines {u} and {v}", position + 1));
    }
    let window = vec![next.clone(), next.without_controls(&[v]), cnot.clone()];
    let lines: BTreeSet<usize> = cnot.lines().union(&next.lines()).copied().collect();
    let original = window_permutation(&c.gates()[position..position + 2], &lines, limits)?;
    if window_permutation(&window, &lines, limits)? != original {
        return Err(RewriteError::CertificationFailed);
    }
    Ok(c.replace_range(position..position + 2, window)?)
}

/// Circuits reachable by sliding gate `i` over up to `MAX_SLIDE` commuting
/// neighbours in either direction.
fn slides(c: &Circuit, i: usize) -> Vec<Circuit> {
    let gates = c.gates();
    let mut out = Vec::new();
    let mut j = i;
    while j + 1 < gates.len() && j - i < MAX_SLIDE && gates_commute(&gates[i], &gates[j + 1]) {
        j += 1;
        let mut moved = gates.to_vec();
        moved[i..=j].rotate_left(1);
        out.push(Circuit::from_parts(c.lines().to_vec(), moved));
    }
    let mut j = i;
    while j > 0 && i - j < MAX_SLIDE && gates_commute(&gates[i], &gates[j - 1]) {
        j -= 1;
        let mut moved = gates.to_vec();
        moved[j..=i].rotate_right(1);
        out.push(Circuit::from_parts(c.lines().to_vec(), moved));
    }
    out
}

/// Greedily apply gate slides and CNOT moves while they lower the cost a
/// single optimization pass would reach. Returns the circuit and the number
/// of moves made.
pub fn commute_pre_pass(
    c: &Circuit,
    model: &CostModel,
    ancilla_budget: usize,
    limits: &SimLimits,
) -> Result<(Circuit, usize), RewriteError> {
    let mut current = c.clone();
    let mut best = estimated_cost(&current, model, ancilla_budget);
    let mut moves = 0;
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for i in 0..current.len() {
            let mut options = slides(&current, i);
            match commute_toffoli_past_cnot(&current, i, limits) {
                Ok(moved) => options.push(moved),
                Err(RewriteError::PatternMismatch(_)) => {}
                Err(e) => return Err(e),
            }
            for candidate in options {
                let estimate = estimated_cost(&candidate, model, ancilla_budget);
                if estimate < best {
                    best = estimate;
                    current = candidate;
                    moves += 1;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((current, moves))
}
