//! Ancilla-assisted optimization of runs of gates with shared controls.

mod block;
mod commute;
mod identity;
mod ite;

pub use block::{evaluate_block, find_shared_blocks, SharedControlBlock};
pub use commute::{commute_pre_pass, commute_toffoli_past_cnot, gates_commute};
pub use identity::{
    apply_identity, choose_preparation, residual_circuit, AncillaPool, PrepAction, PrepBasis, PrepMode,
    PreparationPlan,
};
pub use ite::{compile_if_then_else, if_then_else_reference};

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::cost::CostModel;
use crate::sim::{SimError, SimLimits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("block needs {needed} ancilla lines but only {available} are available")]
    InsufficientAncilla { needed: usize, available: usize },
    #[error("ancilla line {line} is used by the block")]
    AncillaConflict { line: usize },
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("preparation plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("residual block at gates {start}..{end} has no fixed point or proper fixed cube")]
    NoFixedPoint { start: usize, end: usize },
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("rewritten window is not equivalent to the original")]
    CertificationFailed,
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error("circuit contains Hadamard gates")]
    NotBoolean,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizeOptions {
    pub model: CostModel,
    /// Maximum number of ancilla lines added over all passes. `None` means
    /// one fewer than the input's line count.
    pub ancilla_budget: Option<usize>,
    pub prep: PrepMode,
    /// Keep Hadamard-prepared ancillae in superposition between blocks.
    pub reuse_ancillae: bool,
    pub passes: usize,
    pub commute_pre_pass: bool,
    pub limits: SimLimits,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            model: CostModel::default(),
            ancilla_budget: None,
            prep: PrepMode::Auto,
            reuse_ancillae: true,
            passes: 1,
            commute_pre_pass: false,
            limits: SimLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppliedBlock {
    pub pass: usize,
    /// Gate indices refer to the circuit entering this pass.
    pub block: SharedControlBlock,
    pub plan: PreparationPlan,
    pub cost_before: u64,
    pub cost_after: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteReport {
    pub blocks: Vec<AppliedBlock>,
    pub ancillae_used: usize,
    pub ancilla_budget: usize,
    /// Indices of the added lines in the output circuit.
    pub ancilla_lines: Vec<usize>,
    pub cost_before: u64,
    pub cost_after: u64,
    /// Rewrites made by the commutation pre-pass.
    pub pre_pass_gates_moved: usize,
}

impl RewriteReport {
    pub fn improvement_pct(&self) -> f64 {
        if self.cost_before == 0 {
            0.0
        } else {
            100.0 * (self.cost_before as f64 - self.cost_after as f64) / self.cost_before as f64
        }
    }
}

/// A profitable candidate chosen for rewriting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pick {
    start: usize,
    end: usize,
    profit: i64,
    needed: usize,
}

/// Greedy selection: highest profit first, then earliest start, then
/// longest range; ranges overlapping an earlier pick are dropped. Returned
/// in gate order.
fn plan_blocks(c: &Circuit, model: &CostModel, budget: usize) -> Vec<Pick> {
    let mut cands = Vec::new();
    block::scan_blocks(c, model, |cand| {
        let needed = cand.ancillas_needed();
        if cand.profit > 0 && needed <= budget {
            cands.push(Pick { start: cand.start, end: cand.end, profit: cand.profit, needed });
        }
    });
    cands.sort_by_key(|p| (-p.profit, p.start, std::cmp::Reverse(p.end)));
    let mut chosen: Vec<Pick> = Vec::new();
    for p in cands {
        if chosen.iter().all(|q| p.end <= q.start || q.end <= p.start) {
            chosen.push(p);
        }
    }
    chosen.sort_by_key(|p| p.start);
    chosen
}

/// Cost `c` would have after one greedy pass, without building it.
pub(crate) fn estimated_cost(c: &Circuit, model: &CostModel, budget: usize) -> i64 {
    let profit: i64 = plan_blocks(c, model, budget).iter().map(|p| p.profit).sum();
    model.circuit_cost(c) as i64 - profit
}

/// One greedy pass. Returns the rewritten circuit (with any new ancilla
/// lines appended) and the blocks applied.
fn run_pass(
    c: &Circuit,
    pass: usize,
    budget: usize,
    opts: &OptimizeOptions,
) -> Result<(Circuit, Vec<AppliedBlock>, Vec<usize>), RewriteError> {
    let picks = plan_blocks(c, &opts.model, budget);
    if picks.is_empty() {
        return Ok((c.clone(), Vec::new(), Vec::new()));
    }
    let pool_size = picks.iter().map(|p| p.needed).max().unwrap_or(0);
    let (wide, pool) = AncillaPool::allocate(c, pool_size);
    let mut pool = pool.defer_unprepare(opts.reuse_ancillae);
    let ancillas = pool.lines().to_vec();

    let mut gates: Vec<Gate> = Vec::with_capacity(c.len());
    let mut applied = Vec::with_capacity(picks.len());
    let mut cursor = 0;
    for p in &picks {
        gates.extend_from_slice(&wide.gates()[cursor..p.start]);
        let b = SharedControlBlock::from_range(&wide, p.start..p.end, &opts.model)
            .ok_or_else(|| RewriteError::InvalidBlock(format!("gates {}..{} no longer form a block", p.start, p.end)))?;
        let plan = choose_preparation(&b, &wide, opts.prep, &opts.limits)?;
        let replacement = identity::rewrite_block(&wide, &b, &plan, &mut pool, &opts.limits)?;
        let cost_before = opts.model.gates_cost(&wide.gates()[b.range()]);
        let cost_after = opts.model.gates_cost(&replacement);
        gates.extend(replacement);
        cursor = p.end;
        applied.push(AppliedBlock { pass, block: b, plan, cost_before, cost_after });
    }
    gates.extend_from_slice(&wide.gates()[cursor..]);
    let closing = pool.restore();
    if let Some(last) = applied.last_mut() {
        last.cost_after += opts.model.gates_cost(&closing);
    }
    gates.extend(closing);
    let out = Circuit::from_parts(wide.lines().to_vec(), gates);
    Ok((out, applied, ancillas))
}

/// Optimize `c` by rewriting profitable shared-control blocks.
///
/// The returned circuit keeps the input lines first, in order, followed by
/// the ancilla lines listed in the report; those start and end in |0⟩.
pub fn optimize(c: &Circuit, opts: &OptimizeOptions) -> Result<(Circuit, RewriteReport), RewriteError> {
    if !c.is_boolean() {
        return Err(RewriteError::NotBoolean);
    }
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(CircuitError::InvalidGates(violations).into());
    }
    let budget = opts.ancilla_budget.unwrap_or(c.line_count().saturating_sub(1));
    let cost_before = opts.model.circuit_cost(c);

    let mut current = c.clone();
    let mut moved = 0;
    if opts.commute_pre_pass {
        let (moved_circuit, n) = commute_pre_pass(&current, &opts.model, budget, &opts.limits)?;
        current = moved_circuit;
        moved = n;
    }

    let mut blocks = Vec::new();
    let mut ancilla_lines = Vec::new();
    for pass in 0..opts.passes.max(1) {
        let remaining = budget - ancilla_lines.len();
        let (next, applied, lines) = run_pass(&current, pass + 1, remaining, opts)?;
        if applied.is_empty() {
            break;
        }
        current = next;
        blocks.extend(applied);
        ancilla_lines.extend(lines);
    }

    let cost_after = opts.model.circuit_cost(&current);
    let report = RewriteReport {
        blocks,
        ancillae_used: ancilla_lines.len(),
        ancilla_budget: budget,
        ancilla_lines,
        cost_before,
        cost_after,
        pre_pass_gates_moved: moved,
    };
    Ok((current, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use crate::sim::{check_equivalence, EquivalenceOptions, Verdict};
    use crate::synthetic::{example1_analog, staircase, t481_like};

    fn verify(c: &Circuit, out: &Circuit, r: &RewriteReport) -> Verdict {
        check_equivalence(c, out, &r.ancilla_lines, &EquivalenceOptions::default())
    }

    #[test]
    fn no_shared_controls_is_unchanged() {
        let c = t481_like();
        let (out, r) = optimize(&c, &OptimizeOptions::default()).unwrap();
        assert_eq!(out, c);
        assert!(r.blocks.is_empty());
        assert_eq!(r.cost_before, r.cost_after);
        assert_eq!(r.improvement_pct(), 0.0);
    }

    #[test]
    fn staircase_ten() {
        let c = staircase(10);
        let (out, r) = optimize(&c, &OptimizeOptions::default()).unwrap();
        assert_eq!(r.cost_before, 321);
        assert_eq!(r.cost_after, 212);
        assert_eq!(verify(&c, &out, &r), Verdict::Equivalent);
        assert!(r.ancillae_used <= r.ancilla_budget);
    }

    #[test]
    fn example1_costs() {
        let c = example1_analog();
        let (out, r) = optimize(&c, &OptimizeOptions::default()).unwrap();
        assert_eq!(r.cost_before, 144);
        assert_eq!(r.cost_after, 104);
        assert_eq!(r.blocks.len(), 2);
        assert_eq!(verify(&c, &out, &r), Verdict::Equivalent);
    }

    #[test]
    fn profit_honesty() {
        for c in [staircase(8), example1_analog(), crate::synthetic::cycle10_2_analog()] {
            let (_, r) = optimize(&c, &OptimizeOptions::default()).unwrap();
            let saved: u64 = r.blocks.iter().map(|b| b.cost_before - b.cost_after).sum();
            assert_eq!(saved, r.cost_before - r.cost_after);
            for b in &r.blocks {
                assert!(b.cost_after < b.cost_before);
                assert_eq!(b.cost_before as i64 - b.cost_after as i64, b.block.profit);
            }
        }
    }

    #[test]
    fn budget_refuses_large_blocks() {
        let c = staircase(10);
        let opts = OptimizeOptions { ancilla_budget: Some(2), ..OptimizeOptions::default() };
        let (out, r) = optimize(&c, &opts).unwrap();
        assert!(r.ancillae_used <= 2);
        assert_eq!(verify(&c, &out, &r), Verdict::Equivalent);
        let zero = OptimizeOptions { ancilla_budget: Some(0), ..OptimizeOptions::default() };
        let (out, r) = optimize(&c, &zero).unwrap();
        assert_eq!(out, c);
        assert!(r.blocks.is_empty());
    }

    #[test]
    fn each_prep_mode_is_sound() {
        let c = example1_analog();
        for prep in [PrepMode::Hadamard, PrepMode::Auto] {
            for reuse in [false, true] {
                let opts = OptimizeOptions { prep, reuse_ancillae: reuse, ..OptimizeOptions::default() };
                let (out, r) = optimize(&c, &opts).unwrap();
                assert_eq!(verify(&c, &out, &r), Verdict::Equivalent, "{prep:?} reuse={reuse}");
            }
        }
    }

    #[test]
    fn fixed_point_mode_reports_derangements() {
        // three 4-bit increments on lines 1..=4 controlled by line 0: the
        // residual is a single 16-cycle
        let mut gates = Vec::new();
        for _ in 0..3 {
            for t in (1..=4).rev() {
                gates.push(Gate::mct(std::iter::once(Control::pos(0)).chain((1..t).map(Control::pos)), t));
            }
        }
        let c = Circuit::new(5).with_gates(gates);
        let base = OptimizeOptions::default();
        let (out, r) = optimize(&c, &base).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[0].plan, PreparationPlan::uniform(4));
        assert_eq!(verify(&c, &out, &r), Verdict::Equivalent);
        let fixed = OptimizeOptions { prep: PrepMode::FixedPoint, ..base };
        assert!(matches!(optimize(&c, &fixed), Err(RewriteError::NoFixedPoint { .. })));
    }

    #[test]
    fn several_passes_stay_in_budget() {
        let c = crate::synthetic::cycle10_2_analog();
        let opts = OptimizeOptions { passes: 3, ..OptimizeOptions::default() };
        let (out, r) = optimize(&c, &opts).unwrap();
        assert!(r.ancillae_used <= r.ancilla_budget);
        assert!(r.cost_after < r.cost_before);
        assert_eq!(out.line_count(), c.line_count() + r.ancillae_used);
    }

    #[test]
    fn rejects_hadamard_input() {
        let c = Circuit::new(2).with_gates([Gate::hadamard(0), Gate::mct([Control::pos(0)], 1)]);
        assert_eq!(optimize(&c, &OptimizeOptions::default()), Err(RewriteError::NotBoolean));
    }
}
