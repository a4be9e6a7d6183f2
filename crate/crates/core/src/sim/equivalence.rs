use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::Circuit;

use super::{eval_boolean, simulate_sparse, MaskGate, SimLimits, SparseState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Exhaustive when the primary register fits `exhaustive_width`, else sampled.
    Auto,
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceOptions {
    pub mode: VerifyMode,
    pub exhaustive_width: usize,
    pub samples: usize,
    pub seed: u64,
    /// Allowed deviation of the surviving amplitude's modulus from 1.
    pub tolerance: f64,
    pub limits: SimLimits,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            mode: VerifyMode::Auto,
            exhaustive_width: 20,
            samples: 1000,
            seed: 0,
            tolerance: 1e-9,
            limits: SimLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Equivalent,
    /// `input` is over the original circuit's lines; `expected` and `got`
    /// are over the optimized circuit's lines.
    CounterExample { input: u128, expected: u128, got: SparseState },
    Inconclusive(String),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::CounterExample { .. } => "FAILED",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

/// Render basis state `x` over `width` lines as a bit string, line 0 first.
pub fn bits(x: u128, width: usize) -> String {
    (0..width).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent => write!(f, "Equivalent"),
            Verdict::Inconclusive(reason) => write!(f, "Inconclusive: {reason}"),
            Verdict::CounterExample { input, expected, got } => {
                let w = got.width();
                write!(f, "CounterExample: expected |{}>, got", bits(*expected, w))?;
                for (k, a) in got.terms().iter().take(4) {
                    write!(f, " ({:+.6}{:+.6}i)|{}>", a.re, a.im, bits(*k, w))?;
                }
                if got.len() > 4 {
                    write!(f, " ... ({} terms)", got.len())?;
                }
                write!(f, " [input bits {input:#b}]")
            }
        }
    }
}

enum Outcome {
    Mismatch { expected: u128, got: SparseState },
    Error(String),
}

/// Check that `optimized`, with `ancillas` starting in |0⟩, maps every basis
/// input `|x⟩|0..0⟩` to `|original(x)⟩|0..0⟩` up to a phase.
///
/// Sampled checks never return `Equivalent`.
pub fn check_equivalence(original: &Circuit, optimized: &Circuit, ancillas: &[usize], opts: &EquivalenceOptions) -> Verdict {
    if !original.is_boolean() {
        return Verdict::Inconclusive("original circuit contains Hadamard gates".into());
    }
    if let Some(&bad) = ancillas.iter().find(|&&a| a >= optimized.line_count()) {
        return Verdict::Inconclusive(format!("ancilla line {bad} out of range"));
    }
    let primary: Vec<usize> = (0..optimized.line_count()).filter(|l| !ancillas.contains(l)).collect();
    if primary.len() != original.line_count() {
        return Verdict::Inconclusive(format!(
            "register mismatch: original has {} lines, optimized has {} non-ancilla lines",
            original.line_count(),
            primary.len()
        ));
    }
    let width = primary.len();
    if optimized.line_count() > opts.limits.sparse_width {
        return Verdict::Inconclusive(format!(
            "optimized circuit has {} lines, above the simulator limit of {}",
            optimized.line_count(),
            opts.limits.sparse_width
        ));
    }

    let orig_gates: Vec<MaskGate> = original.gates().iter().map(MaskGate::new).collect();
    let scatter = |x: u128| primary.iter().enumerate().fold(0u128, |acc, (i, &l)| acc | ((x >> i & 1) << l));
    let check = |x: u128| -> Option<Outcome> {
        let expected = scatter(eval_boolean(&orig_gates, x));
        match simulate_sparse(optimized, scatter(x), &opts.limits) {
            Err(e) => Some(Outcome::Error(e.to_string())),
            Ok(got) => {
                let amp = got.amplitude(expected).norm();
                let rest: f64 =
                    got.terms().iter().filter(|(k, _)| *k != expected).map(|(_, a)| a.norm_sqr()).sum();
                if (amp - 1.0).abs() <= opts.tolerance && rest <= opts.tolerance {
                    None
                } else {
                    Some(Outcome::Mismatch { expected, got })
                }
            }
        }
    };

    let exhaustive = match opts.mode {
        VerifyMode::Auto => width <= opts.exhaustive_width,
        VerifyMode::Exhaustive => true,
        VerifyMode::Sample => false,
    };
    if exhaustive && width > 40 {
        return Verdict::Inconclusive(format!("{width}-line register is too wide for exhaustive checking"));
    }

    let (failure, sampled) = if exhaustive {
        ((0..1u128 << width).into_par_iter().map(|x| (x, check(x))).find_map_first(lift), None)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mask = if width >= 128 { u128::MAX } else { (1u128 << width) - 1 };
        let inputs: Vec<u128> = (0..opts.samples).map(|_| rng.gen::<u128>() & mask).collect();
        (inputs.into_par_iter().map(|x| (x, check(x))).find_map_first(lift), Some(opts.samples))
    };

    match failure {
        Some((input, Outcome::Mismatch { expected, got })) => Verdict::CounterExample { input, expected, got },
        Some((_, Outcome::Error(reason))) => Verdict::Inconclusive(reason),
        None => match sampled {
            None => Verdict::Equivalent,
            Some(n) => Verdict::Inconclusive(format!("passed {n} sampled inputs of a {width}-line register")),
        },
    }
}

fn lift((x, outcome): (u128, Option<Outcome>)) -> Option<(u128, Outcome)> {
    outcome.map(|o| (x, o))
}
