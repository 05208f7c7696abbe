//! Bernoulli word model and the divergence Δ₀ of a mistake subsequence from it.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitseq::{count_words, BitSequence, WordHistogram, WordMode};
use crate::error::{Error, Result};

pub const DEFAULT_WORD_LEN: usize = 4;

/// Probability of each of the `2^L` words of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordDistribution {
    word_len: usize,
    probs: Vec<f64>,
}

impl WordDistribution {
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, word: usize) -> f64 {
        self.probs[word]
    }

    /// Wraps explicit probabilities; they must be non-negative and sum to 1.
    pub fn from_probs(word_len: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << word_len {
            return Err(Error::WordLengthMismatch(
                word_len,
                probs.len().trailing_zeros() as usize,
            ));
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "word probabilities must be non-negative and sum to 1 (sum {sum})"
            )));
        }
        Ok(Self { word_len, probs })
    }

    /// Words drawn as `L` independent bits, each 1 with probability `p_ones`.
    pub fn bernoulli(p_ones: f64, word_len: usize) -> Self {
        assert!(
            (0.0..=1.0).contains(&p_ones),
            "p_ones {p_ones} outside [0, 1]"
        );
        assert!(word_len >= 1);
        let probs = (0..1usize << word_len)
            .map(|w| {
                let ones = w.count_ones() as i32;
                // powi(0) is 1 even for a zero base.
                p_ones.powi(ones) * (1.0 - p_ones).powi(word_len as i32 - ones)
            })
            .collect();
        Self { word_len, probs }
    }

    /// Relative word frequencies of a histogram.
    pub fn empirical(h: &WordHistogram) -> Result<Self> {
        if h.total() == 0 {
            return Err(Error::NoWords);
        }
        let total = h.total() as f64;
        Ok(Self {
            word_len: h.word_len(),
            probs: h.counts().iter().map(|&c| c as f64 / total).collect(),
        })
    }
}

/// KL divergence `D(p ‖ q)` in bits, with `0 · log(0/q) = 0`.
pub fn divergence(p: &WordDistribution, q: &WordDistribution) -> Result<f64> {
    if p.word_len != q.word_len {
        return Err(Error::WordLengthMismatch(p.word_len, q.word_len));
    }
    let mut sum = 0.0;
    for (w, (&pw, &qw)) in p.probs.iter().zip(&q.probs).enumerate() {
        if pw == 0.0 {
            continue;
        }
        if qw == 0.0 {
            return Err(Error::InfiniteDivergence(w));
        }
        sum += pw * (pw / qw).log2();
    }
    // Rounding can leave a tiny negative value when p == q.
    Ok(sum.max(0.0))
}

/// Which argument order of the KL divergence is reported as Δ₀.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KlDirection {
    /// `D(empirical ‖ bernoulli)`.
    #[default]
    Forward,
    /// `D(bernoulli ‖ empirical)`; infinite whenever the sample misses a word.
    Reverse,
}

impl FromStr for KlDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Self::Forward),
            "reverse" => Ok(Self::Reverse),
            other => Err(Error::InvalidConfig(format!(
                "unknown KL direction {other:?}"
            ))),
        }
    }
}

/// Both directions of the divergence for one sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaZero {
    pub forward: f64,
    /// `f64::INFINITY` when the empirical distribution misses a word the model allows.
    pub reverse: f64,
}

impl DeltaZero {
    pub fn get(&self, direction: KlDirection) -> f64 {
        match direction {
            KlDirection::Forward => self.forward,
            KlDirection::Reverse => self.reverse,
        }
    }
}

/// Compares the word statistics of a sequence with a Bernoulli model fitted
/// to the sequence's own frequency of ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordTest {
    pub word_len: usize,
    pub mode: WordMode,
}

impl Default for WordTest {
    fn default() -> Self {
        Self {
            word_len: DEFAULT_WORD_LEN,
            mode: WordMode::Sliding,
        }
    }
}

impl WordTest {
    /// `None` when the sequence yields no complete word.
    pub fn evaluate(&self, seq: &BitSequence) -> Option<DeltaZero> {
        if seq.len() < self.word_len {
            return None;
        }
        let empirical =
            WordDistribution::empirical(&count_words(seq, self.word_len, self.mode)).ok()?;
        let model = WordDistribution::bernoulli(seq.frequency_of_ones().ok()?, self.word_len);
        // Every word present in the sample has nonzero model probability: a
        // zero-probability word needs a symbol whose frequency is 0.
        let forward = divergence(&empirical, &model).expect("sample support lies in model support");
        let reverse = divergence(&model, &empirical).unwrap_or(f64::INFINITY);
        Some(DeltaZero { forward, reverse })
    }
}

/// Δ₀ with 4-bit sliding words in the forward direction; `None` for
/// sequences shorter than 4.
pub fn delta_zero(xi0: &BitSequence) -> Option<f64> {
    WordTest::default().evaluate(xi0).map(|d| d.forward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Literal sum over the 16 words, written out without the library's loop.
    fn kl16(p: &[f64], q: &[f64]) -> f64 {
        let term = |a: f64, b: f64| {
            if a == 0.0 {
                0.0
            } else {
                a * (a / b).ln() / 2f64.ln()
            }
        };
        term(p[0], q[0])
            + term(p[1], q[1])
            + term(p[2], q[2])
            + term(p[3], q[3])
            + term(p[4], q[4])
            + term(p[5], q[5])
            + term(p[6], q[6])
            + term(p[7], q[7])
            + term(p[8], q[8])
            + term(p[9], q[9])
            + term(p[10], q[10])
            + term(p[11], q[11])
            + term(p[12], q[12])
            + term(p[13], q[13])
            + term(p[14], q[14])
            + term(p[15], q[15])
    }

    fn bernoulli_seq(seed: u64, len: usize, q: f64) -> BitSequence {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BitSequence::from_bools((0..len).map(|_| rng.gen::<f64>() < q))
    }

    #[test]
    fn bernoulli_model_values() {
        let uniform = WordDistribution::bernoulli(0.5, 4);
        assert!(uniform.probs().iter().all(|&p| p == 1.0 / 16.0));

        let degenerate = WordDistribution::bernoulli(0.0, 4);
        assert_eq!(degenerate.prob(0), 1.0);
        assert!(degenerate.probs()[1..].iter().all(|&p| p == 0.0));

        let m = WordDistribution::bernoulli(0.3, 4);
        assert!((m.prob(0b0000) - 0.2401).abs() < 1e-15);
        assert!((m.prob(0b1111) - 0.0081).abs() < 1e-15);
        assert!((m.prob(0b1000) - 0.1029).abs() < 1e-15);
        assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_values() {
        let s: BitSequence = "01".repeat(50).parse().unwrap();
        let e = WordDistribution::empirical(&count_words(&s, 4, WordMode::Sliding)).unwrap();
        assert_eq!(e.prob(0b0101), 49.0 / 97.0);
        assert_eq!(e.prob(0b1010), 48.0 / 97.0);
        assert!((e.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let one: BitSequence = "0000".parse().unwrap();
        let e = WordDistribution::empirical(&count_words(&one, 4, WordMode::Sliding)).unwrap();
        assert_eq!(e.prob(0), 1.0);

        let short: BitSequence = "010".parse().unwrap();
        assert_eq!(
            WordDistribution::empirical(&count_words(&short, 4, WordMode::Sliding)),
            Err(Error::NoWords)
        );
    }

    #[test]
    fn divergence_edge_cases() {
        let m = WordDistribution::bernoulli(0.3, 4);
        assert_eq!(divergence(&m, &m), Ok(0.0));
        let zero = WordDistribution::bernoulli(0.0, 4);
        assert_eq!(divergence(&m, &zero), Err(Error::InfiniteDivergence(1)));
        assert_eq!(
            divergence(&m, &WordDistribution::bernoulli(0.3, 3)),
            Err(Error::WordLengthMismatch(4, 3))
        );
    }

    #[test]
    fn alternating_delta() {
        let s: BitSequence = "01".repeat(50).parse().unwrap();
        let d = delta_zero(&s).unwrap();
        let (a, b) = (49.0f64 / 97.0, 48.0f64 / 97.0);
        let oracle = a * (a * 16.0).log2() + b * (b * 16.0).log2();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 3.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn degenerate_and_short() {
        let zeros = BitSequence::from_bits(vec![0; 50]).unwrap();
        assert_eq!(delta_zero(&zeros), Some(0.0));
        let d = WordTest::default().evaluate(&zeros).unwrap();
        assert_eq!(d.reverse, 0.0);
        let ones = BitSequence::from_bits(vec![1; 50]).unwrap();
        assert_eq!(delta_zero(&ones), Some(0.0));
        assert_eq!(delta_zero(&"010".parse().unwrap()), None);
    }

    #[test]
    fn null_model_fits_own_samples() {
        let s = bernoulli_seq(21, 1000, 0.3);
        let d = delta_zero(&s).unwrap();
        assert!(d < 0.05, "{d}");
    }

    #[test]
    fn block_mode_counts_disjoint_words() {
        let s = bernoulli_seq(22, 1000, 0.5);
        let test = WordTest {
            word_len: 4,
            mode: WordMode::Block,
        };
        let d = test.evaluate(&s).unwrap();
        assert!(d.forward >= 0.0 && d.forward < 0.1, "{}", d.forward);
    }

    fn distribution() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, 16).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-9;
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn matches_literal_sum(p in distribution(), q in distribution()) {
            let q: Vec<f64> = q.into_iter().map(|x| x + 1e-6).collect();
            let wp = WordDistribution { word_len: 4, probs: p.clone() };
            let wq = WordDistribution { word_len: 4, probs: q.clone() };
            let d = divergence(&wp, &wq).unwrap();
            prop_assert!((d - kl16(&p, &q)).abs() < 1e-10);
        }

        #[test]
        fn nonnegative(bits in proptest::collection::vec(0u8..2, 4..400)) {
            let s = BitSequence::from_bits(bits).unwrap();
            let d = WordTest::default().evaluate(&s).unwrap();
            prop_assert!(d.forward >= 0.0);
            prop_assert!(d.reverse >= 0.0);
        }
    }
}
