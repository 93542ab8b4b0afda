use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_WORD_LENGTH: usize = 16;
const ALPHABET: [char; 4] = ['A', 'C', 'G', 'T'];

/// A DNA word packed two bits per letter, first letter in the high bits,
/// so integer order is lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DnaWord {
    packed: u32,
    len: u8,
}

impl DnaWord {
    pub fn from_packed(packed: u32, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_WORD_LENGTH {
            return Err(Error::InvalidWord(format!("length {len} outside 1..={MAX_WORD_LENGTH}")));
        }
        if len < MAX_WORD_LENGTH && packed >> (2 * len) != 0 {
            return Err(Error::InvalidWord(format!("code {packed} too large for length {len}")));
        }
        Ok(Self {
            packed,
            len: len as u8,
        })
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        let mut packed = 0u32;
        for &c in codes {
            if c > 3 {
                return Err(Error::InvalidWord(format!("letter code {c}")));
            }
            packed = (packed << 2) | c as u32;
        }
        Self::from_packed(packed, codes.len())
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn packed(&self) -> u32 {
        self.packed
    }

    /// Letter code (A=0, C=1, G=2, T=3) at position `i`.
    pub fn code(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.packed >> (2 * (self.len() - 1 - i))) & 3) as u8
    }

    pub fn codes(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.code(i)).collect()
    }

    pub fn is_constant(&self) -> bool {
        let first = self.code(0);
        (1..self.len()).all(|i| self.code(i) == first)
    }

    /// All `4^len` words in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = DnaWord> {
        assert!((1..=15).contains(&len), "enumeration limited to lengths 1..=15");
        (0u32..1 << (2 * len)).map(move |packed| DnaWord {
            packed,
            len: len as u8,
        })
    }
}

impl FromStr for DnaWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let codes = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(0),
                'C' => Ok(1),
                'G' => Ok(2),
                'T' => Ok(3),
                other => Err(Error::InvalidWord(format!("letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_codes(&codes)
    }
}

impl fmt::Display for DnaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", ALPHABET[self.code(i) as usize])?;
        }
        Ok(())
    }
}

impl fmt::Debug for DnaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DnaWord({self})")
    }
}

impl Serialize for DnaWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
