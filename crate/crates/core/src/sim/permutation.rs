use crate::circuit::Circuit;

use super::{MaskGate, SimError};

/// Truth table of a Boolean-reversible circuit: `table[x]` is the image of
/// basis state `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    width: usize,
    table: Vec<u32>,
}

impl Permutation {
    pub fn identity(width: usize) -> Self {
        assert!(width <= 32, "permutation width {width} too large");
        Permutation { width, table: (0..1u64 << width).map(|x| x as u32).collect() }
    }

    /// Build from an explicit table; `None` unless it is a bijection on `[0, 2^width)`.
    pub fn from_table(width: usize, table: Vec<u32>) -> Option<Self> {
        if width > 32 || table.len() as u64 != 1u64 << width {
            return None;
        }
        let mut seen = vec![false; table.len()];
        for &y in &table {
            let slot = seen.get_mut(y as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(Permutation { width, table })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.width, next.width);
        Permutation { width: self.width, table: self.table.iter().map(|&y| next.table[y as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut table = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y as usize] = x as u32;
        }
        Permutation { width: self.width, table }
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }
}

/// Truth table of a Boolean-reversible circuit of at most `limit` lines.
pub fn permutation_of(c: &Circuit, limit: usize) -> Result<Permutation, SimError> {
    if !c.is_boolean() {
        return Err(SimError::HadamardPresent);
    }
    let width = c.line_count();
    if width > limit.min(32) {
        return Err(SimError::WidthExceeded { width, limit: limit.min(32) });
    }
    let mut perm = Permutation::identity(width);
    for g in c.gates() {
        let m = MaskGate::new(g);
        for y in perm.table.iter_mut() {
            *y = m.apply(*y as u128) as u32;
        }
    }
    Ok(perm)
}

/// All fixed points, ascending.
pub fn find_fixed_points(p: &Permutation) -> Vec<u32> {
    p.table.iter().enumerate().filter(|&(x, &y)| x as u32 == y).map(|(x, _)| x as u32).collect()
}
