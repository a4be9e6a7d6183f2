use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};

use super::{MaskGate, SimError, SimLimits};

/// Amplitudes below this modulus are dropped.
pub const PRUNE_EPS: f64 = 1e-12;

/// A state as a sorted list of (basis state, amplitude) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    width: usize,
    terms: Vec<(u128, Complex64)>,
}

impl SparseState {
    pub fn basis(width: usize, x: u128) -> Self {
        SparseState { width, terms: vec![(x, Complex64::new(1.0, 0.0))] }
    }

    /// Equal superposition of all `2^width` basis states.
    pub fn uniform(width: usize) -> Self {
        assert!(width <= 24, "uniform state of width {width} is too large");
        let amp = Complex64::new((0.5f64).powf(width as f64 / 2.0), 0.0);
        SparseState { width, terms: (0..1u128 << width).map(|x| (x, amp)).collect() }
    }

    /// Sum duplicate keys, prune negligible amplitudes and sort.
    pub fn from_terms(width: usize, terms: impl IntoIterator<Item = (u128, Complex64)>) -> Self {
        let mut acc: HashMap<u128, Complex64> = HashMap::new();
        for (k, a) in terms {
            *acc.entry(k).or_default() += a;
        }
        Self::canonical(width, acc.into_iter().collect())
    }

    fn canonical(width: usize, mut terms: Vec<(u128, Complex64)>) -> Self {
        terms.retain(|(_, a)| a.norm() >= PRUNE_EPS);
        terms.sort_unstable_by_key(|&(k, _)| k);
        SparseState { width, terms }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[(u128, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, x: u128) -> Complex64 {
        match self.terms.binary_search_by_key(&x, |&(k, _)| k) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex64::default(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Probability of measuring `line` in state |1⟩.
    pub fn probability_one(&self, line: usize) -> f64 {
        self.terms.iter().filter(|(k, _)| k >> line & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Largest amplitude-wise difference to `other`.
    pub fn max_deviation(&self, other: &SparseState) -> f64 {
        let mut worst = 0f64;
        for &(k, a) in &self.terms {
            worst = worst.max((a - other.amplitude(k)).norm());
        }
        for &(k, b) in &other.terms {
            worst = worst.max((self.amplitude(k) - b).norm());
        }
        worst
    }
}

fn check_width(c: &Circuit, state: &SparseState) -> Result<(), SimError> {
    if c.line_count() != state.width {
        return Err(SimError::WidthMismatch { state: state.width, circuit: c.line_count() });
    }
    Ok(())
}

/// Full state-vector simulation for circuits of at most `limits.dense_width` lines.
pub fn simulate_dense(c: &Circuit, input: &SparseState, limits: &SimLimits) -> Result<SparseState, SimError> {
    check_width(c, input)?;
    let width = c.line_count();
    if width > limits.dense_width {
        return Err(SimError::WidthExceeded { width, limit: limits.dense_width });
    }
    let n = 1usize << width;
    let mut v = vec![Complex64::default(); n];
    for &(k, a) in &input.terms {
        v[k as usize] += a;
    }
    for g in c.gates() {
        let m = MaskGate::new(g);
        match g.kind() {
            GateKind::Hadamard => {
                let t = 1usize << g.targets()[0];
                for i in 0..n {
                    if i & t == 0 {
                        let (a, b) = (v[i], v[i | t]);
                        v[i] = (a + b) * FRAC_1_SQRT_2;
                        v[i | t] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            GateKind::X | GateKind::Swap => {
                // Boolean gates are involutions: swap each moved pair once.
                for i in 0..n {
                    let j = m.apply(i as u128) as usize;
                    if j > i {
                        v.swap(i, j);
                    }
                }
            }
        }
    }
    let terms = v.into_iter().enumerate().map(|(k, a)| (k as u128, a)).collect();
    Ok(SparseState::canonical(width, terms))
}

/// Sparse simulation from a single basis state.
pub fn simulate_sparse(c: &Circuit, input: u128, limits: &SimLimits) -> Result<SparseState, SimError> {
    simulate_sparse_state(c, &SparseState::basis(c.line_count(), input), limits)
}

/// Sparse simulation of an arbitrary input state. Boolean gates relabel
/// terms in place; Hadamards split and merge them.
pub fn simulate_sparse_state(c: &Circuit, input: &SparseState, limits: &SimLimits) -> Result<SparseState, SimError> {
    check_width(c, input)?;
    let width = c.line_count();
    if width > limits.sparse_width {
        return Err(SimError::WidthExceeded { width, limit: limits.sparse_width });
    }
    let gates: Vec<MaskGate> = c.gates().iter().map(MaskGate::new).collect();
    let mut terms = input.terms.clone();
    let mut merged: HashMap<u128, Complex64> = HashMap::new();
    for (g, gate) in gates.iter().zip(c.gates()) {
        if g.is_hadamard() {
            let t = 1u128 << gate.targets()[0];
            merged.clear();
            for &(k, a) in &terms {
                let a = a * FRAC_1_SQRT_2;
                *merged.entry(k & !t).or_default() += a;
                *merged.entry(k | t).or_default() += if k & t == 0 { a } else { -a };
            }
            terms.clear();
            terms.extend(merged.drain().filter(|(_, a)| a.norm() >= PRUNE_EPS));
            if terms.len() > limits.term_budget {
                return Err(SimError::TermBudgetExceeded { budget: limits.term_budget });
            }
        } else {
            for (k, _) in terms.iter_mut() {
                *k = g.apply(*k);
            }
        }
    }
    Ok(SparseState::canonical(width, terms))
}
