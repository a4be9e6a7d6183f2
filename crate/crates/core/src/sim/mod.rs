//! Semantic ground truth for circuits.
//!
//! Basis states encode line `i` as bit `i` (line 0 is the least significant
//! bit). Boolean-reversible circuits are evaluated as truth-table
//! permutations; circuits containing Hadamards are simulated either densely
//! (small widths) or as sparse amplitude maps.

mod cube;
mod equivalence;
mod permutation;
mod state;

pub use cube::{find_fixed_cube, CubePattern, CubeSymbol};
pub use equivalence::{bits, check_equivalence, EquivalenceOptions, Verdict, VerifyMode};
pub use permutation::{find_fixed_points, permutation_of, Permutation};
pub use state::{simulate_dense, simulate_sparse, simulate_sparse_state, SparseState};

use thiserror::Error;

use crate::circuit::{Gate, GateKind, Polarity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("circuit contains Hadamard gates")]
    HadamardPresent,
    #[error("width {width} exceeds limit {limit}")]
    WidthExceeded { width: usize, limit: usize },
    #[error("state exceeded the budget of {budget} terms")]
    TermBudgetExceeded { budget: usize },
    #[error("state width {state} does not match circuit width {circuit}")]
    WidthMismatch { state: usize, circuit: usize },
}

/// Size limits for the different simulation backends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimLimits {
    pub permutation_width: usize,
    pub dense_width: usize,
    pub cube_width: usize,
    pub term_budget: usize,
    /// Hard ceiling from the 128-bit basis-state encoding.
    pub sparse_width: usize,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits { permutation_width: 20, dense_width: 16, cube_width: 14, term_budget: 1 << 16, sparse_width: 128 }
    }
}

/// A gate lowered to bit masks over a `u128` basis index.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MaskGate {
    kind: GateKind,
    pos: u128,
    neg: u128,
    a: u128,
    b: u128,
}

impl MaskGate {
    pub(crate) fn new(g: &Gate) -> Self {
        let mut pos = 0u128;
        let mut neg = 0u128;
        for c in g.controls() {
            match c.polarity {
                Polarity::Positive => pos |= 1 << c.line,
                Polarity::Negative => neg |= 1 << c.line,
            }
        }
        let t = g.targets();
        MaskGate { kind: g.kind(), pos, neg, a: 1 << t[0], b: t.get(1).map_or(0, |&l| 1 << l) }
    }

    #[inline]
    pub(crate) fn fires(&self, x: u128) -> bool {
        x & self.pos == self.pos && x & self.neg == 0
    }

    /// Image of a basis state under a Boolean gate.
    #[inline]
    pub(crate) fn apply(&self, x: u128) -> u128 {
        match self.kind {
            GateKind::X if self.fires(x) => x ^ self.a,
            GateKind::Swap if self.fires(x) && ((x & self.a == 0) != (x & self.b == 0)) => x ^ self.a ^ self.b,
            _ => x,
        }
    }

    pub(crate) fn is_hadamard(&self) -> bool {
        self.kind == GateKind::Hadamard
    }
}

/// Propagate one basis state through a Boolean gate list.
pub(crate) fn eval_boolean(gates: &[MaskGate], mut x: u128) -> u128 {
    for g in gates {
        x = g.apply(x);
    }
    x
}
