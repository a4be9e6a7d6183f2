//! Small generated circuits used by tests and the benchmark corpus.

use rand::Rng;

use crate::circuit::{Circuit, Control, Gate, Polarity};

fn staircase_gates(n: usize, line: impl Fn(usize) -> usize) -> Vec<Gate> {
    (2..=n).rev().map(|i| Gate::mct((0..i - 1).map(|l| Control::pos(line(l))), line(i - 1))).collect()
}

/// Gates `T_n, T_{n-1}, ..., T_2` on `n` lines, where `T_i` is controlled
/// positively by lines `0..i-1` and targets line `i-1`.
pub fn staircase(n: usize) -> Circuit {
    assert!(n >= 2, "staircase needs at least two lines");
    Circuit::new(n).with_gates(staircase_gates(n, |l| l))
}

/// Two descending cascades on 12 lines: `T_11..T_2` over lines 0..=10, then
/// `T_10..T_2` over lines 11 down to 2. Cost 727 under the default model.
pub fn cycle10_2_analog() -> Circuit {
    let mut gates = staircase_gates(11, |l| l);
    gates.extend(staircase_gates(10, |l| 11 - l));
    Circuit::with_names((0..12).map(|i| format!("x{i}"))).with_gates(gates)
}

/// 16 gates on lines `a, b, c, d` in two runs of eight: the first shares
/// control `b`, the second `d`. Each run has two CNOTs, two Toffolis and four
/// 4-line gates, 144 in total. The first run's residual block fixes
/// `a=1, c=0, d=0`.
pub fn example1_analog() -> Circuit {
    // residual pattern on three lines (p, q, r); None is an uncontrolled NOT
    let pattern: [(&[usize], usize); 8] =
        [(&[], 1), (&[2], 1), (&[0, 2], 1), (&[2], 1), (&[0, 1], 2), (&[0, 2], 1), (&[1, 2], 0), (&[], 2)];
    let run = |shared: usize, lines: [usize; 3]| {
        pattern.iter().map(move |(controls, target)| {
            let controls = std::iter::once(Control::pos(shared)).chain(controls.iter().map(|&c| Control::pos(lines[c])));
            Gate::mct(controls, lines[*target])
        })
    };
    let gates: Vec<Gate> = run(1, [0, 2, 3]).chain(run(3, [0, 1, 2])).collect();
    Circuit::with_names(["a", "b", "c", "d"]).with_gates(gates)
}

/// 13 gates on 16 lines where no two neighbouring gates share a control.
pub fn t481_like() -> Circuit {
    let gates = (0..13).map(|i: usize| {
        let base = (3 * i) % 15;
        let mut controls = vec![Control::pos(base), Control::neg(base + 1)];
        if i % 3 != 1 {
            controls.push(Control::pos(base + 2));
        }
        Gate::mct(controls, 15)
    });
    Circuit::new(16).with_gates(gates)
}

fn random_polarity(rng: &mut impl Rng) -> Polarity {
    if rng.gen_bool(0.5) {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Random controls on the lines of `pool`, each taken with probability 0.4.
fn random_controls(rng: &mut impl Rng, pool: impl Iterator<Item = usize>) -> Vec<Control> {
    let mut out = Vec::new();
    for line in pool {
        if rng.gen_bool(0.4) {
            out.push(Control { line, polarity: random_polarity(rng) });
        }
    }
    out
}

/// A random circuit of X and SWAP gates with random controls, plus
/// Hadamards when `hadamards` is set.
pub fn random_circuit(rng: &mut impl Rng, lines: usize, gates: usize, hadamards: bool) -> Circuit {
    assert!(lines >= 1);
    let gates: Vec<Gate> = (0..gates)
        .map(|_| {
            let roll: f64 = rng.gen();
            if hadamards && roll < 0.2 {
                return Gate::hadamard(rng.gen_range(0..lines));
            }
            if lines >= 2 && roll > 0.8 {
                let a = rng.gen_range(0..lines);
                let b = (a + rng.gen_range(1..lines)) % lines;
                let controls = random_controls(rng, (0..lines).filter(|&l| l != a && l != b));
                return Gate::cswap(controls, a, b);
            }
            let t = rng.gen_range(0..lines);
            Gate::mct(random_controls(rng, (0..lines).filter(|&l| l != t)), t)
        })
        .collect();
    Circuit::new(lines).with_gates(gates)
}

/// A run of `gates` X gates that all carry the same `shared` controls (on
/// lines `0..shared`, random polarities) and otherwise act on the residual
/// lines `shared..shared + residual`.
pub fn random_shared_block(rng: &mut impl Rng, shared: usize, residual: usize, gates: usize) -> Circuit {
    assert!(shared >= 1 && residual >= 1);
    let common: Vec<Control> = (0..shared).map(|line| Control { line, polarity: random_polarity(rng) }).collect();
    let width = shared + residual;
    let gates: Vec<Gate> = (0..gates)
        .map(|_| {
            let t = rng.gen_range(shared..width);
            let extra = random_controls(rng, (shared..width).filter(|&l| l != t));
            Gate::mct(common.iter().copied().chain(extra), t)
        })
        .collect();
    Circuit::new(width).with_gates(gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;

    #[test]
    fn costs() {
        let m = CostModel::default();
        assert_eq!(m.circuit_cost(&staircase(10)), 321);
        assert_eq!(m.circuit_cost(&cycle10_2_analog()), 727);
        assert_eq!(m.circuit_cost(&example1_analog()), 144);
        for c in [staircase(6), cycle10_2_analog(), example1_analog(), t481_like()] {
            assert!(c.validate().is_empty());
        }
    }
}
