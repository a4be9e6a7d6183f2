//! The controlled-block identity: a block controlled by shared literals is
//! replaced by controlled-SWAPs that move its residual register onto
//! ancillae, an uncontrolled copy of the residual gates acting on the
//! ancillae, and the mirror controlled-SWAPs. When the shared control is off
//! the residual gates act on an ancilla state they leave invariant: the
//! uniform superposition, a fixed point, or a uniform superposition over a
//! fixed cube.

use std::collections::HashMap;

use serde::Serialize;

use crate::circuit::{AncillaMode, AncillaTracker, Circuit, Control, Gate};
use crate::sim::{find_fixed_cube, permutation_of, CubePattern, CubeSymbol, Permutation, SimLimits};

use super::{RewriteError, SharedControlBlock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrepAction {
    ApplyH,
    ApplyNot,
    Nothing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PrepBasis {
    UniformSuperposition,
    /// Bit `j` is the value of residual line `j`.
    FixedPoint(u32),
    FixedCube(CubePattern),
}

/// How each ancilla is prepared before the block and restored after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreparationPlan {
    actions: Vec<PrepAction>,
    basis: PrepBasis,
}

impl PreparationPlan {
    pub fn uniform(k: usize) -> Self {
        PreparationPlan { actions: vec![PrepAction::ApplyH; k], basis: PrepBasis::UniformSuperposition }
    }

    pub fn fixed_point(k: usize, point: u32) -> Self {
        let actions =
            (0..k).map(|j| if point >> j & 1 == 1 { PrepAction::ApplyNot } else { PrepAction::Nothing }).collect();
        PreparationPlan { actions, basis: PrepBasis::FixedPoint(point) }
    }

    /// H on free positions, NOT on ones, nothing on zeros. A cube with no
    /// free positions becomes a fixed-point plan and the all-free cube a
    /// uniform plan.
    pub fn from_cube(cube: &CubePattern) -> Self {
        let k = cube.width();
        if cube.is_all_free() {
            return PreparationPlan::uniform(k);
        }
        if cube.free_count() == 0 {
            let point = cube
                .symbols()
                .iter()
                .enumerate()
                .fold(0u32, |acc, (j, s)| if *s == CubeSymbol::One { acc | 1 << j } else { acc });
            return PreparationPlan::fixed_point(k, point);
        }
        let actions = cube
            .symbols()
            .iter()
            .map(|s| match s {
                CubeSymbol::Free => PrepAction::ApplyH,
                CubeSymbol::One => PrepAction::ApplyNot,
                CubeSymbol::Zero => PrepAction::Nothing,
            })
            .collect();
        PreparationPlan { actions, basis: PrepBasis::FixedCube(cube.clone()) }
    }

    pub fn actions(&self) -> &[PrepAction] {
        &self.actions
    }

    pub fn basis(&self) -> &PrepBasis {
        &self.basis
    }

    pub fn hadamard_count(&self) -> usize {
        self.actions.iter().filter(|&&a| a == PrepAction::ApplyH).count()
    }

    /// The invariant subcube this plan relies on.
    fn cube(&self) -> CubePattern {
        let symbols = self
            .actions
            .iter()
            .map(|a| match a {
                PrepAction::ApplyH => CubeSymbol::Free,
                PrepAction::ApplyNot => CubeSymbol::One,
                PrepAction::Nothing => CubeSymbol::Zero,
            })
            .collect();
        CubePattern::new(symbols)
    }

    fn check_consistent(&self) -> Result<(), RewriteError> {
        let ok = match &self.basis {
            PrepBasis::UniformSuperposition => self.actions.iter().all(|&a| a == PrepAction::ApplyH),
            PrepBasis::FixedPoint(p) => *self == PreparationPlan::fixed_point(self.actions.len(), *p),
            PrepBasis::FixedCube(cube) => {
                cube.width() == self.actions.len() && self.cube() == *cube
            }
        };
        if ok {
            Ok(())
        } else {
            Err(RewriteError::PlanMismatch("actions do not match the plan basis".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrepMode {
    Hadamard,
    FixedPoint,
    Auto,
}

/// The residual block on a compact register: residual line `j` becomes line `j`.
pub fn residual_circuit(b: &SharedControlBlock, c: &Circuit) -> Circuit {
    let index: HashMap<usize, usize> = b.residual.iter().enumerate().map(|(j, &l)| (l, j)).collect();
    let shared = b.shared_lines();
    let gates = c.gates()[b.range()].iter().map(|g| g.without_controls(&shared).remap(|l| index[&l]));
    Circuit::new(b.residual.len()).with_gates(gates)
}

fn residual_permutation(b: &SharedControlBlock, c: &Circuit, limits: &SimLimits) -> Result<Permutation, RewriteError> {
    Ok(permutation_of(&residual_circuit(b, c), limits.permutation_width)?)
}

/// Pick the ancilla preparation for `b`.
///
/// `Hadamard` always yields the uniform plan. `FixedPoint` yields the
/// smallest fixed cube of the residual permutation and fails when only the
/// full cube is fixed. `Auto` takes the smallest fixed cube when it needs
/// fewer Hadamards than the uniform plan, and falls back to the uniform plan
/// when the residual register is too wide to search.
pub fn choose_preparation(
    b: &SharedControlBlock,
    c: &Circuit,
    mode: PrepMode,
    limits: &SimLimits,
) -> Result<PreparationPlan, RewriteError> {
    let k = b.residual.len();
    if mode == PrepMode::Hadamard {
        return Ok(PreparationPlan::uniform(k));
    }
    if k > limits.cube_width {
        return match mode {
            PrepMode::Auto => Ok(PreparationPlan::uniform(k)),
            _ => Err(RewriteError::Sim(crate::sim::SimError::WidthExceeded { width: k, limit: limits.cube_width })),
        };
    }
    let perm = residual_permutation(b, c, limits)?;
    let cube = find_fixed_cube(&perm, limits.cube_width)?;
    if cube.is_all_free() {
        return match mode {
            PrepMode::FixedPoint => Err(RewriteError::NoFixedPoint { start: b.start, end: b.end }),
            _ => Ok(PreparationPlan::uniform(k)),
        };
    }
    Ok(PreparationPlan::from_cube(&cube))
}

/// A set of ancilla lines and the tracked state of each.
#[derive(Clone, Debug)]
pub struct AncillaPool {
    lines: Vec<usize>,
    tracker: AncillaTracker,
    defer_unprepare: bool,
}

impl AncillaPool {
    /// Pool over existing lines that hold |0⟩ at the point of use.
    pub fn new(lines: Vec<usize>) -> Self {
        let tracker = AncillaTracker::new(lines.iter().copied());
        AncillaPool { lines, tracker, defer_unprepare: false }
    }

    /// Append `n` constant-0 lines to `c` and pool them.
    pub fn allocate(c: &Circuit, n: usize) -> (Circuit, AncillaPool) {
        let first = c.line_count();
        let out = c.extend_lines(n, false);
        (out, AncillaPool::new((first..first + n).collect()))
    }

    /// Leave Hadamard-prepared ancillae in superposition after a block so the
    /// next block can reuse them; [`AncillaPool::restore`] must close the sequence.
    pub fn defer_unprepare(mut self, defer: bool) -> Self {
        self.defer_unprepare = defer;
        self
    }

    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub fn tracker(&self) -> &AncillaTracker {
        &self.tracker
    }

    /// Hadamards returning every superposed ancilla to |0⟩.
    pub fn restore(&mut self) -> Vec<Gate> {
        let gates: Vec<Gate> = self
            .tracker
            .lines()
            .filter(|&(_, m)| m == AncillaMode::Uniform)
            .map(|(l, _)| Gate::hadamard(l))
            .collect();
        for g in &gates {
            self.tracker.apply(g);
        }
        gates
    }

    fn mode(&self, line: usize) -> AncillaMode {
        self.tracker.mode(line).unwrap_or(AncillaMode::Zero)
    }
}

/// Replacement gates for block `b` of `c`. Updates the pool's tracker.
pub(crate) fn rewrite_block(
    c: &Circuit,
    b: &SharedControlBlock,
    plan: &PreparationPlan,
    pool: &mut AncillaPool,
    limits: &SimLimits,
) -> Result<Vec<Gate>, RewriteError> {
    b.check(c)?;
    plan.check_consistent()?;
    let k = b.residual.len();
    if plan.actions.len() != k {
        return Err(RewriteError::PlanMismatch(format!(
            "plan has {} actions for a {k}-line residual register",
            plan.actions.len()
        )));
    }
    let needed = b.ancillas_needed();
    if pool.lines.len() < needed {
        return Err(RewriteError::InsufficientAncilla { needed, available: pool.lines.len() });
    }
    let block_lines: Vec<usize> = b.shared_lines().into_iter().chain(b.residual.iter().copied()).collect();
    if let Some(&line) = pool.lines.iter().find(|l| block_lines.contains(l)) {
        return Err(RewriteError::AncillaConflict { line });
    }
    if plan.basis != PrepBasis::UniformSuperposition {
        let perm = residual_permutation(b, c, limits)?;
        let cube = plan.cube();
        if !cube.is_fixed_by(&perm) {
            return Err(RewriteError::PlanMismatch(format!("residual block does not preserve cube {cube}")));
        }
    }

    // Assign ancillae: prefer lines already in the required mode.
    let wanted: Vec<AncillaMode> = plan
        .actions
        .iter()
        .map(|a| if *a == PrepAction::ApplyH { AncillaMode::Uniform } else { AncillaMode::Zero })
        .collect();
    let mut free: Vec<usize> = pool.lines.clone();
    let mut data = Vec::with_capacity(k);
    for &mode in &wanted {
        let pick = free.iter().position(|&l| pool.mode(l) == mode).unwrap_or(0);
        data.push(free.remove(pick));
    }
    let product = if b.shared.len() >= 2 {
        let pick = free.iter().position(|&l| pool.mode(l) == AncillaMode::Zero).unwrap_or(0);
        Some(free[pick])
    } else {
        None
    };

    let mut out = Vec::new();
    let mut emit = |g: Gate, pool: &mut AncillaPool| {
        pool.tracker.apply(&g);
        out.push(g);
    };

    // preparation
    for (j, &line) in data.iter().enumerate() {
        if pool.mode(line) != wanted[j] {
            emit(Gate::hadamard(line), pool);
        }
        if plan.actions[j] == PrepAction::ApplyNot {
            emit(Gate::not(line), pool);
        }
    }
    let swap_control = match product {
        Some(p) => {
            if pool.mode(p) != AncillaMode::Zero {
                emit(Gate::hadamard(p), pool);
            }
            emit(Gate::mct(b.shared.iter().copied(), p), pool);
            Control::pos(p)
        }
        None => b.shared[0],
    };
    let fredkins: Vec<Gate> = b.residual.iter().zip(&data).map(|(&r, &a)| Gate::fredkin(swap_control, r, a)).collect();
    for g in &fredkins {
        emit(g.clone(), pool);
    }
    let to_ancilla: HashMap<usize, usize> = b.residual.iter().copied().zip(data.iter().copied()).collect();
    let shared = b.shared_lines();
    for g in &c.gates()[b.range()] {
        emit(g.without_controls(&shared).remap(|l| to_ancilla[&l]), pool);
    }
    for g in fredkins {
        emit(g, pool);
    }
    if let Some(p) = product {
        emit(Gate::mct(b.shared.iter().copied(), p), pool);
    }
    // un-preparation
    for (j, &line) in data.iter().enumerate() {
        if plan.actions[j] == PrepAction::ApplyNot {
            emit(Gate::not(line), pool);
        }
        if !pool.defer_unprepare && pool.mode(line) == AncillaMode::Uniform {
            emit(Gate::hadamard(line), pool);
        }
    }
    Ok(out)
}

/// Rewrite block `b` of `c` using `plan` and ancillae from `pool`.
///
/// `c` must already contain the pool lines, holding |0⟩ (or the state the
/// pool's tracker records) at the start of the block.
pub fn apply_identity(
    c: &Circuit,
    b: &SharedControlBlock,
    plan: &PreparationPlan,
    pool: &mut AncillaPool,
    limits: &SimLimits,
) -> Result<Circuit, RewriteError> {
    let gates = rewrite_block(c, b, plan, pool, limits)?;
    Ok(c.replace_range(b.range(), gates)?)
}
