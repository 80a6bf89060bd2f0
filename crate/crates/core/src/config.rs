//! Occupation strings `n_1…n_L` and xy-plane sign sequences `s_1…s_L`.
//!
//! Site 1 is the leftmost character and, when a configuration is mapped to an
//! integer index, the most significant bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pfaffian::IndexSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidConfiguration(format!("bit value {b} is not 0/1")));
        }
        Ok(BitString { bits })
    }

    pub fn zeros(l: usize) -> Self {
        BitString { bits: vec![0; l] }
    }

    /// Configuration with index `idx` in the dense ordering (site 1 = MSB).
    pub fn from_index(idx: usize, l: usize) -> Self {
        let bits = (0..l).map(|k| ((idx >> (l - 1 - k)) & 1) as u8).collect();
        BitString { bits }
    }

    pub fn to_index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// `pattern` repeated `n` times.
    pub fn repeat(pattern: &BitString, n: usize) -> Self {
        BitString {
            bits: pattern.bits.repeat(n),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, j: usize) -> u8 {
        self.bits[j]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn flipped(&self, j: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[j] ^= 1;
        BitString { bits }
    }

    /// Positions that differ from `other` (the symmetric difference of the
    /// occupied sets).
    pub fn difference(&self, other: &BitString) -> Result<IndexSet> {
        check_len(self.len(), other.len())?;
        Ok(IndexSet::from_sorted_unchecked(
            (0..self.len()).filter(|&j| self.bits[j] != other.bits[j]).collect(),
        ))
    }

    /// Occupied positions.
    pub fn support(&self) -> IndexSet {
        IndexSet::from_sorted_unchecked((0..self.len()).filter(|&j| self.bits[j] == 1).collect())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidConfiguration(format!(
                    "unexpected character {c:?} in bit string {s:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BitString { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// s̄ = ±1.
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSequence {
    signs: Vec<Sign>,
}

impl SignSequence {
    pub fn new(signs: Vec<Sign>) -> Self {
        SignSequence { signs }
    }

    pub fn all_plus(l: usize) -> Self {
        SignSequence {
            signs: vec![Sign::Plus; l],
        }
    }

    /// Sequence with index `idx`, `-` encoded as bit 1 and site 1 as MSB.
    pub fn from_index(idx: usize, l: usize) -> Self {
        let signs = (0..l)
            .map(|k| {
                if (idx >> (l - 1 - k)) & 1 == 1 {
                    Sign::Minus
                } else {
                    Sign::Plus
                }
            })
            .collect();
        SignSequence { signs }
    }

    pub fn to_index(&self) -> usize {
        self.signs
            .iter()
            .fold(0, |acc, &s| (acc << 1) | (s == Sign::Minus) as usize)
    }

    pub fn repeat(pattern: &SignSequence, n: usize) -> Self {
        SignSequence {
            signs: pattern.signs.repeat(n),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn count_minus(&self) -> usize {
        self.signs.iter().filter(|&&s| s == Sign::Minus).count()
    }

    pub fn count_plus(&self) -> usize {
        self.len() - self.count_minus()
    }

    /// Global spin flip.
    pub fn flipped(&self) -> Self {
        SignSequence {
            signs: self.signs.iter().map(|s| s.flip()).collect(),
        }
    }

    /// Cyclic shift by `k` sites to the right.
    pub fn rotated(&self, k: usize) -> Self {
        let mut signs = self.signs.clone();
        let l = signs.len();
        if l > 0 {
            signs.rotate_right(k % l);
        }
        SignSequence { signs }
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' | '−' => Ok(Sign::Minus),
                _ => Err(Error::InvalidConfiguration(format!(
                    "unexpected character {c:?} in sign sequence {s:?}"
                ))),
            })
            .collect::<Result<Vec<Sign>>>()?;
        Ok(SignSequence { signs })
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
