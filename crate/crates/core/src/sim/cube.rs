use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{Permutation, SimError};

/// One position of a cube pattern. Ordered `Zero < One < Free`, which is the
/// lexicographic order used to break ties in [`find_fixed_cube`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeSymbol {
    Zero,
    One,
    Free,
}

/// A Boolean subcube, written as a string whose character `i` describes line
/// `i`: `0`, `1` or `-` (free).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubePattern {
    symbols: Vec<CubeSymbol>,
}

impl CubePattern {
    pub fn new(symbols: Vec<CubeSymbol>) -> Self {
        CubePattern { symbols }
    }

    pub fn all_free(width: usize) -> Self {
        CubePattern { symbols: vec![CubeSymbol::Free; width] }
    }

    /// Single-point cube at basis state `x`.
    pub fn point(width: usize, x: u32) -> Self {
        let symbols =
            (0..width).map(|i| if x >> i & 1 == 1 { CubeSymbol::One } else { CubeSymbol::Zero }).collect();
        CubePattern { symbols }
    }

    pub fn symbols(&self) -> &[CubeSymbol] {
        &self.symbols
    }

    pub fn width(&self) -> usize {
        self.symbols.len()
    }

    pub fn free_count(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == CubeSymbol::Free).count()
    }

    pub fn is_all_free(&self) -> bool {
        self.free_count() == self.width()
    }

    fn masks(&self) -> (u32, u32) {
        let mut fixed = 0u32;
        let mut value = 0u32;
        for (i, s) in self.symbols.iter().enumerate() {
            match s {
                CubeSymbol::Zero => fixed |= 1 << i,
                CubeSymbol::One => {
                    fixed |= 1 << i;
                    value |= 1 << i;
                }
                CubeSymbol::Free => {}
            }
        }
        (fixed, value)
    }

    pub fn contains(&self, x: u32) -> bool {
        let (fixed, value) = self.masks();
        x & fixed == value
    }

    /// Whether `p` maps every point of the cube back into it.
    pub fn is_fixed_by(&self, p: &Permutation) -> bool {
        if p.width() != self.width() {
            return false;
        }
        let (fixed, value) = self.masks();
        maps_into(p, fixed, value)
    }
}

fn maps_into(p: &Permutation, fixed: u32, value: u32) -> bool {
    let free = !fixed & mask(p.width());
    // enumerate subsets of `free`
    let mut sub = 0u32;
    loop {
        let x = value | sub;
        if p.apply(x) & fixed != value {
            return false;
        }
        if sub == free {
            return true;
        }
        sub = sub.wrapping_sub(free) & free;
    }
}

fn mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

impl fmt::Display for CubePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                CubeSymbol::Zero => "0",
                CubeSymbol::One => "1",
                CubeSymbol::Free => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for CubePattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(CubeSymbol::Zero),
                '1' => Ok(CubeSymbol::One),
                '-' => Ok(CubeSymbol::Free),
                other => Err(format!("invalid cube symbol `{other}`")),
            })
            .collect::<Result<_, _>>()?;
        Ok(CubePattern { symbols })
    }
}

impl Serialize for CubePattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Smallest cube mapped into itself by `p`.
///
/// Cubes are tried by increasing number of free positions; within one size
/// the first pattern in lexicographic order (`0 < 1 < -`, line 0 first) wins.
/// The all-free cube is returned when nothing smaller works.
pub fn find_fixed_cube(p: &Permutation, limit: usize) -> Result<CubePattern, SimError> {
    let width = p.width();
    if width > limit {
        return Err(SimError::WidthExceeded { width, limit });
    }
    for free in 0..width {
        let mut symbols = vec![CubeSymbol::Zero; width];
        if search(p, &mut symbols, 0, free, 0, 0) {
            return Ok(CubePattern { symbols });
        }
    }
    Ok(CubePattern::all_free(width))
}

/// Depth-first enumeration in lexicographic order of patterns with exactly
/// `free_left` more free positions from `pos` onwards.
fn search(p: &Permutation, symbols: &mut [CubeSymbol], pos: usize, free_left: usize, fixed: u32, value: u32) -> bool {
    let width = symbols.len();
    if pos == width {
        return maps_into(p, fixed, value);
    }
    let remaining = width - pos;
    if remaining > free_left {
        symbols[pos] = CubeSymbol::Zero;
        if search(p, symbols, pos + 1, free_left, fixed | 1 << pos, value) {
            return true;
        }
        symbols[pos] = CubeSymbol::One;
        if search(p, symbols, pos + 1, free_left, fixed | 1 << pos, value | 1 << pos) {
            return true;
        }
    }
    if free_left > 0 {
        symbols[pos] = CubeSymbol::Free;
        if search(p, symbols, pos + 1, free_left - 1, fixed, value) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_shift(width: usize) -> Permutation {
        let n = 1u32 << width;
        Permutation::from_table(width, (0..n).map(|x| (x + 1) % n).collect()).unwrap()
    }

    #[test]
    fn identity_gives_all_zero_point() {
        let cube = find_fixed_cube(&Permutation::identity(4), 14).unwrap();
        assert_eq!(cube.to_string(), "0000");
    }

    #[test]
    fn maximal_cycle_only_full_cube() {
        for w in 1..=6 {
            let cube = find_fixed_cube(&cycle_shift(w), 14).unwrap();
            assert!(cube.is_all_free(), "width {w}: {cube}");
        }
    }

    #[test]
    fn parse_and_display() {
        let c: CubePattern = "--01-0".parse().unwrap();
        assert_eq!(c.free_count(), 3);
        assert_eq!(c.to_string(), "--01-0");
        assert!(c.contains(0b001000));
        assert!(!c.contains(0b000000));
        assert!("01x".parse::<CubePattern>().is_err());
        assert_eq!(CubePattern::point(3, 0b101).to_string(), "101");
    }

    #[test]
    fn width_limit() {
        assert_eq!(
            find_fixed_cube(&Permutation::identity(5), 4),
            Err(SimError::WidthExceeded { width: 5, limit: 4 })
        );
    }
}
