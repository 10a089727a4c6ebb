//! Finite binary strings, read and written as 0/1 text.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid character {0:?} in bit string (expected 0 or 1)")]
    InvalidChar(char),
}

/// A finite binary string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn empty() -> Self {
        Bits(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn prefix(&self, len: usize) -> Bits {
        Bits(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Bits {
        Bits(self.0[start.min(self.0.len())..].to_vec())
    }

    pub fn extended(&self, b: bool) -> Bits {
        let mut v = self.0.clone();
        v.push(b);
        Bits(v)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// The `len`-bit big-endian expansion of `value` (most significant bit
    /// first), i.e. the cylinder label of `[value/2^len, (value+1)/2^len]`.
    pub fn from_index(value: u64, len: usize) -> Bits {
        let mut v = Vec::with_capacity(len);
        for i in (0..len).rev() {
            v.push((value >> i) & 1 == 1);
        }
        Bits(v)
    }

    /// Interpret as a big-endian integer.
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64)
    }

    /// Number of leading zeros (position of the first one, or the length).
    pub fn leading_zeros(&self) -> usize {
        self.0.iter().take_while(|b| !**b).count()
    }
}

impl FromStr for Bits {
    type Err = BitsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => v.push(false),
                '1' => v.push(true),
                other => return Err(BitsError::InvalidChar(other)),
            }
        }
        Ok(Bits(v))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        Bits(iter.into_iter().collect())
    }
}
