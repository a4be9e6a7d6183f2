//! Two-qubit-gate cost metric.
//!
//! Single-qubit gates are free, every two-qubit gate costs one unit, and an
//! n-line multiple-control Toffoli or Fredkin gate (n >= 3) is charged as the
//! `2n - 5` three-line gates of its standard ancilla-assisted decomposition,
//! each worth five two-qubit gates: `10n - 25`. Control polarity never
//! affects cost.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::circuit::{Circuit, Gate, GateKind};

/// Cost parameters. [`CostModel::default`] is the metric described above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CostModel {
    pub single_qubit_cost: u64,
    pub two_qubit_cost: u64,
    pub three_qubit_cost: u64,
    pub mct_linear_coefficient: i64,
    pub mct_linear_offset: i64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            single_qubit_cost: 0,
            two_qubit_cost: 1,
            three_qubit_cost: 5,
            mct_linear_coefficient: 10,
            mct_linear_offset: -25,
        }
    }
}

impl CostModel {
    /// Cost of any gate acting on `arity` distinct lines.
    pub fn arity_cost(&self, arity: usize) -> u64 {
        match arity {
            0 => 0,
            1 => self.single_qubit_cost,
            2 => self.two_qubit_cost,
            3 => self.three_qubit_cost,
            n => (self.mct_linear_coefficient * n as i64 + self.mct_linear_offset).max(0) as u64,
        }
    }

    pub fn gate_cost(&self, gate: &Gate) -> u64 {
        self.arity_cost(gate.arity())
    }

    pub fn circuit_cost(&self, circuit: &Circuit) -> u64 {
        self.gates_cost(circuit.gates())
    }

    pub fn gates_cost<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> u64 {
        gates.into_iter().map(|g| self.gate_cost(g)).sum()
    }

    pub fn class_cost(&self, class: GateClass) -> u64 {
        match class {
            GateClass::Toffoli(n) | GateClass::Fredkin(n) => self.arity_cost(n),
            GateClass::Hadamard => self.single_qubit_cost,
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "1q={} 2q={} 3q={} n>=4: {}n{:+}",
            self.single_qubit_cost,
            self.two_qubit_cost,
            self.three_qubit_cost,
            self.mct_linear_coefficient,
            self.mct_linear_offset
        )
    }
}

/// Gate class as used in distribution tables: `Tn` is an n-line X gate,
/// `Fn` an n-line SWAP gate, `H` a Hadamard. Orders as T1, T2, ..., F2, F3, ..., H.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateClass {
    Toffoli(usize),
    Fredkin(usize),
    Hadamard,
}

impl GateClass {
    pub fn of(gate: &Gate) -> Self {
        match gate.kind() {
            GateKind::X => GateClass::Toffoli(gate.arity()),
            GateKind::Swap => GateClass::Fredkin(gate.arity()),
            GateKind::Hadamard => GateClass::Hadamard,
        }
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateClass::Toffoli(n) => write!(f, "T{n}"),
            GateClass::Fredkin(n) => write!(f, "F{n}"),
            GateClass::Hadamard => write!(f, "H"),
        }
    }
}

impl Serialize for GateClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Gate counts per [`GateClass`]. Only nonzero classes are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GateDistribution {
    counts: BTreeMap<GateClass, u64>,
}

impl GateDistribution {
    pub fn of(circuit: &Circuit) -> Self {
        let mut d = GateDistribution::default();
        for g in circuit.gates() {
            d.add(GateClass::of(g), 1);
        }
        d
    }

    pub fn add(&mut self, class: GateClass, count: u64) {
        if count > 0 {
            *self.counts.entry(class).or_insert(0) += count;
        }
    }

    pub fn count(&self, class: GateClass) -> u64 {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GateClass, u64)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    pub fn cost(&self, model: &CostModel) -> u64 {
        self.iter().map(|(class, n)| n * model.class_cost(class)).sum()
    }
}

impl FromIterator<(GateClass, u64)> for GateDistribution {
    fn from_iter<I: IntoIterator<Item = (GateClass, u64)>>(iter: I) -> Self {
        let mut d = GateDistribution::default();
        for (class, n) in iter {
            d.add(class, n);
        }
        d
    }
}
