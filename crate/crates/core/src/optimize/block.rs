//! Runs of adjacent gates sharing control literals.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::{Circuit, Control, GateKind};
use crate::cost::CostModel;

use super::RewriteError;

/// A contiguous gate range `[start, end)` whose gates all carry every
/// control in `shared`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedControlBlock {
    pub start: usize,
    pub end: usize,
    /// Sorted by line.
    pub shared: Vec<Control>,
    /// Lines touched once the shared controls are removed, ascending.
    pub residual: Vec<usize>,
    /// Original cost minus rewritten cost.
    pub profit: i64,
}

impl SharedControlBlock {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    pub fn shared_lines(&self) -> Vec<usize> {
        self.shared.iter().map(|c| c.line).collect()
    }

    /// Ancilla lines the rewrite needs: one per residual line plus one to
    /// collect the product when several controls are shared.
    pub fn ancillas_needed(&self) -> usize {
        self.residual.len() + usize::from(self.shared.len() >= 2)
    }

    pub fn overlaps(&self, other: &SharedControlBlock) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Build a block over `range` with the largest shared control set,
    /// or `None` if the range does not qualify.
    pub fn from_range(c: &Circuit, range: std::ops::Range<usize>, model: &CostModel) -> Option<Self> {
        if range.len() < 2 || range.end > c.len() {
            return None;
        }
        let gates = &c.gates()[range.clone()];
        if gates.iter().any(|g| g.kind() == GateKind::Hadamard) {
            return None;
        }
        let mut shared: Vec<Control> = gates[0].controls().to_vec();
        for g in &gates[1..] {
            shared.retain(|&ctl| g.has_control(ctl));
        }
        if shared.is_empty() {
            return None;
        }
        let lines: Vec<usize> = shared.iter().map(|c| c.line).collect();
        let residual: BTreeSet<usize> = gates.iter().flat_map(|g| g.lines()).filter(|l| !lines.contains(l)).collect();
        let mut block = SharedControlBlock {
            start: range.start,
            end: range.end,
            shared,
            residual: residual.into_iter().collect(),
            profit: 0,
        };
        block.profit = evaluate_block(&block, c, model);
        Some(block)
    }

    /// Check the block invariants against `c`.
    pub fn check(&self, c: &Circuit) -> Result<(), RewriteError> {
        let fail = |msg: String| Err(RewriteError::InvalidBlock(msg));
        if self.len() < 2 {
            return fail(format!("range {}..{} shorter than 2 gates", self.start, self.end));
        }
        if self.end > c.len() {
            return fail(format!("range end {} beyond {} gates", self.end, c.len()));
        }
        if self.shared.is_empty() {
            return fail("no shared controls".into());
        }
        let lines = self.shared_lines();
        let mut residual = BTreeSet::new();
        for (i, g) in c.gates()[self.range()].iter().enumerate() {
            if g.kind() == GateKind::Hadamard {
                return fail(format!("gate {} is a Hadamard", self.start + i));
            }
            if let Some(missing) = self.shared.iter().find(|&&ctl| !g.has_control(ctl)) {
                return fail(format!("gate {} lacks shared control {missing}", self.start + i));
            }
            residual.extend(g.lines().into_iter().filter(|l| !lines.contains(l)));
        }
        if residual.into_iter().collect::<Vec<_>>() != self.residual {
            return fail("residual register does not match the gates".into());
        }
        Ok(())
    }
}

/// Cost delta of rewriting `b`: original gate cost minus the cost of the
/// replacement (preparation and un-preparation, product compute/uncompute
/// when two or more controls are shared, two Fredkin layers, and the
/// residual gates with the shared controls stripped).
pub fn evaluate_block(b: &SharedControlBlock, c: &Circuit, model: &CostModel) -> i64 {
    let gates = &c.gates()[b.range()];
    let before = model.gates_cost(gates);
    let s = b.shared.len();
    let residual: u64 = gates.iter().map(|g| model.arity_cost(g.arity() - s)).sum();
    before as i64 - replacement_cost(model, s, b.residual.len(), residual) as i64
}

fn replacement_cost(model: &CostModel, shared: usize, k: usize, residual_cost: u64) -> u64 {
    let k = k as u64;
    let prep = 2 * k * model.single_qubit_cost;
    let product = if shared >= 2 { 2 * model.arity_cost(shared + 1) } else { 0 };
    prep + product + 2 * k * model.arity_cost(3) + residual_cost
}

/// Lightweight view of a candidate produced by [`scan_blocks`].
pub(crate) struct Candidate<'a> {
    pub start: usize,
    pub end: usize,
    pub shared: &'a [Control],
    pub k: usize,
    pub profit: i64,
}

impl Candidate<'_> {
    pub fn ancillas_needed(&self) -> usize {
        self.k + usize::from(self.shared.len() >= 2)
    }

    pub fn materialize(&self, c: &Circuit) -> SharedControlBlock {
        let lines: Vec<usize> = self.shared.iter().map(|c| c.line).collect();
        let residual: BTreeSet<usize> =
            c.gates()[self.start..self.end].iter().flat_map(|g| g.lines()).filter(|l| !lines.contains(l)).collect();
        SharedControlBlock {
            start: self.start,
            end: self.end,
            shared: self.shared.to_vec(),
            residual: residual.into_iter().collect(),
            profit: self.profit,
        }
    }
}

/// Visit every contiguous range of two or more Boolean gates with a nonempty
/// shared control set. Costs are maintained incrementally per start index.
pub(crate) fn scan_blocks(c: &Circuit, model: &CostModel, mut visit: impl FnMut(Candidate<'_>)) {
    let gates = c.gates();
    let mut touch = vec![0u32; c.line_count()];
    let mut touched_lines: Vec<usize> = Vec::new();
    for i in 0..gates.len() {
        if gates[i].kind() == GateKind::Hadamard || gates[i].controls().is_empty() {
            continue;
        }
        for &l in &touched_lines {
            touch[l] = 0;
        }
        touched_lines.clear();
        let mut shared: Vec<Control> = gates[i].controls().to_vec();
        for l in gates[i].lines() {
            mark(l, &mut touch, &mut touched_lines);
        }
        let mut before = model.gate_cost(&gates[i]);
        let mut arities: Vec<usize> = vec![gates[i].arity()];
        let mut residual_cost: u64 = model.arity_cost(gates[i].arity() - shared.len());
        for (j, g) in gates.iter().enumerate().skip(i + 1) {
            if g.kind() == GateKind::Hadamard {
                break;
            }
            let s_prev = shared.len();
            shared.retain(|&ctl| g.has_control(ctl));
            if shared.is_empty() {
                break;
            }
            let s = shared.len();
            for l in g.lines() {
                mark(l, &mut touch, &mut touched_lines);
            }
            before += model.gate_cost(g);
            arities.push(g.arity());
            if s != s_prev {
                residual_cost = arities.iter().map(|&a| model.arity_cost(a - s)).sum();
            } else {
                residual_cost += model.arity_cost(g.arity() - s);
            }
            let k = touched_lines.len() - s;
            let after = replacement_cost(model, s, k, residual_cost);
            visit(Candidate { start: i, end: j + 1, shared: &shared, k, profit: before as i64 - after as i64 });
        }
    }
}

fn mark(line: usize, touch: &mut [u32], touched_lines: &mut Vec<usize>) {
    if touch[line] == 0 {
        touched_lines.push(line);
    }
    touch[line] += 1;
}

/// All candidate blocks, ordered by start then end.
pub fn find_shared_blocks(c: &Circuit, model: &CostModel) -> Vec<SharedControlBlock> {
    let mut out = Vec::new();
    scan_blocks(c, model, |cand| out.push(cand.materialize(c)));
    out
}
