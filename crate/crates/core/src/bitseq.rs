//! Binary sequences and word counting.
//!
//! [`BitSequence`] carries training data, test data and mistake sequences.
//! Its canonical serialization is one ASCII byte per bit (`'0'` / `'1'`),
//! which is exactly what the compressor sees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of bits, each stored as `0` or `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Self {
            bits: Vec::with_capacity(cap),
        }
    }

    /// Builds a sequence from `bits`, rejecting anything that is not 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidBit(bits[pos], pos));
        }
        Ok(Self { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().map(u8::from).collect(),
        }
    }

    /// Parses the ASCII `'0'`/`'1'` format produced by [`to_ascii_bytes`](Self::to_ascii_bytes).
    pub fn from_ascii(bytes: &[u8]) -> Result<Self> {
        bytes
            .iter()
            .enumerate()
            .map(|(i, &c)| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                other => Err(Error::InvalidBit(other, i)),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| Self { bits })
    }

    /// One byte per bit, `'0'` or `'1'`, no separators.
    pub fn to_ascii_bytes(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b'0' + b).collect()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(u8::from(bit));
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Fraction of ones. Fails on an empty sequence.
    pub fn frequency_of_ones(&self) -> Result<f64> {
        if self.bits.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(self.count_ones() as f64 / self.bits.len() as f64)
    }

    /// Counts the `2^len` words of length `len` with the given windowing.
    pub fn count_words(&self, len: usize, mode: WordMode) -> WordHistogram {
        count_words(self, len, mode)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_ascii(s.as_bytes())
    }
}

impl Serialize for BitSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Windowing used when counting words.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordMode {
    /// Every window `s[t..t+L]`, step 1.
    #[default]
    Sliding,
    /// Disjoint words `s[0..L]`, `s[L..2L]`, ...; a trailing remainder is dropped.
    Block,
}

impl FromStr for WordMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sliding" => Ok(Self::Sliding),
            "block" => Ok(Self::Block),
            other => Err(Error::InvalidConfig(format!("unknown word mode {other:?}"))),
        }
    }
}

/// Counts of every binary word of a fixed length. Word `w` is indexed by its
/// unsigned value, first bit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordHistogram {
    word_len: usize,
    counts: Vec<u64>,
    total: u64,
}

impl WordHistogram {
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, word: usize) -> u64 {
        self.counts[word]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Value of `bits` read as an unsigned integer, first bit most significant.
pub fn word_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

pub fn count_words(seq: &BitSequence, len: usize, mode: WordMode) -> WordHistogram {
    assert!(
        (1..usize::BITS as usize).contains(&len),
        "word length must be at least 1"
    );
    let mut counts = vec![0u64; 1 << len];
    let bits = seq.as_slice();
    match mode {
        WordMode::Sliding => {
            for window in bits.windows(len) {
                counts[word_index(window)] += 1;
            }
        }
        WordMode::Block => {
            for chunk in bits.chunks_exact(len) {
                counts[word_index(chunk)] += 1;
            }
        }
    }
    let total = counts.iter().sum();
    WordHistogram {
        word_len: len,
        counts,
        total,
    }
}
