//! Reversible circuits, their `.real` text form, a two-qubit cost model,
//! simulation-based equivalence checking and an optimizer that trades
//! ancilla lines for cheaper gates.

pub mod circuit;
pub mod cost;
pub mod optimize;
pub mod real;
pub mod sim;
pub mod synthetic;

pub use circuit::{AncillaMode, AncillaTracker, Circuit, CircuitError, Control, Gate, GateKind, Line, Polarity};
pub use cost::{CostModel, GateClass, GateDistribution};
pub use optimize::{optimize, OptimizeOptions, RewriteError, RewriteReport};
pub use real::{emit, parse, ParseError};
pub use sim::{check_equivalence, EquivalenceOptions, SimError, SimLimits, Verdict, VerifyMode};
