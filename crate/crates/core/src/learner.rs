//! Order-k Markov learner with MAP bit decisions.

use serde::{Deserialize, Serialize};

use crate::bitseq::{word_index, BitSequence};
use crate::error::{Error, Result};
use crate::source::MAX_ORDER;

/// MAP decision for a state with estimate `p_hat`: 1 iff `p_hat > 1/2`.
/// Ties go to 0.
pub fn decide(p_hat: f64) -> u8 {
    u8::from(p_hat > 0.5)
}

/// Counts, estimates and decisions learned from one training sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedModel {
    order: usize,
    context_counts: Vec<u64>,
    one_counts: Vec<u64>,
    estimates: Vec<f64>,
    decisions: BitSequence,
}

impl LearnedModel {
    /// Scans every (context, successor) pair of `train`. Contexts never seen
    /// get the estimate 1/2 and therefore decide 0.
    pub fn estimate(train: &BitSequence, k: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&k) {
            return Err(Error::OrderTooLarge(k));
        }
        if train.len() <= k {
            return Err(Error::TrainingTooShort {
                len: train.len(),
                k,
            });
        }
        let states = 1usize << k;
        let mask = states - 1;
        let bits = train.as_slice();
        let mut context_counts = vec![0u64; states];
        let mut one_counts = vec![0u64; states];
        let mut ctx = word_index(&bits[..k]);
        for &next in &bits[k..] {
            context_counts[ctx] += 1;
            one_counts[ctx] += next as u64;
            ctx = ((ctx << 1) | next as usize) & mask;
        }
        Ok(Self::from_counts(k, context_counts, one_counts))
    }

    /// Builds a model from raw counts.
    ///
    /// Panics if the arrays do not have `2^k` entries or a one-count exceeds
    /// its context count.
    pub fn from_counts(k: usize, context_counts: Vec<u64>, one_counts: Vec<u64>) -> Self {
        assert_eq!(context_counts.len(), 1 << k);
        assert_eq!(one_counts.len(), 1 << k);
        let estimates: Vec<f64> = context_counts
            .iter()
            .zip(&one_counts)
            .map(|(&v, &ones)| {
                assert!(ones <= v, "one count {ones} exceeds context count {v}");
                if v == 0 {
                    0.5
                } else {
                    ones as f64 / v as f64
                }
            })
            .collect();
        let decisions = BitSequence::from_bits(estimates.iter().map(|&p| decide(p)).collect())
            .expect("decide yields bits");
        Self {
            order: k,
            context_counts,
            one_counts,
            estimates,
            decisions,
        }
    }

    /// A model that only carries a decision vector; counts are zero and
    /// estimates are set to 1.0 or 0.0 to reproduce the decisions.
    pub fn from_decisions(decisions: BitSequence) -> Result<Self> {
        let n = decisions.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::InvalidConfig(format!(
                "decision vector length {n} is not 2^k with k >= 1"
            )));
        }
        let k = n.trailing_zeros() as usize;
        let estimates = decisions.iter().map(f64::from).collect();
        Ok(Self {
            order: k,
            context_counts: vec![0; n],
            one_counts: vec![0; n],
            estimates,
            decisions,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn context_counts(&self) -> &[u64] {
        &self.context_counts
    }

    pub fn one_counts(&self) -> &[u64] {
        &self.one_counts
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn decisions(&self) -> &BitSequence {
        &self.decisions
    }

    /// The "system" file: the decision vector in state order, one ASCII byte per bit.
    pub fn system_bytes(&self) -> Vec<u8> {
        self.decisions.to_ascii_bytes()
    }

    /// Predicts every bit of `test` after the first `k` (which only seed the
    /// context) and records the mistakes.
    pub fn predict_and_score(&self, test: &BitSequence) -> Result<MistakeRecord> {
        let k = self.order;
        if test.len() <= k {
            return Err(Error::TestTooShort { len: test.len(), k });
        }
        let mask = (1usize << k) - 1;
        let bits = test.as_slice();
        let decisions = self.decisions.as_slice();
        let mut mistakes = BitSequence::with_capacity(bits.len() - k);
        let mut zero_pred = BitSequence::new();
        let mut ctx = word_index(&bits[..k]);
        for &actual in &bits[k..] {
            let predicted = decisions[ctx];
            let miss = predicted != actual;
            mistakes.push(miss);
            if predicted == 0 {
                zero_pred.push(miss);
            }
            ctx = ((ctx << 1) | actual as usize) & mask;
        }
        let prediction_count = mistakes.len();
        let error_rate = mistakes.count_ones() as f64 / prediction_count as f64;
        Ok(MistakeRecord {
            mistakes,
            zero_pred_mistakes: zero_pred,
            prediction_count,
            error_rate,
        })
    }
}

/// Outcome of one test pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MistakeRecord {
    /// One bit per prediction, 1 marks a mistake.
    pub mistakes: BitSequence,
    /// The mistake bits at positions where the learner predicted 0.
    pub zero_pred_mistakes: BitSequence,
    pub prediction_count: usize,
    pub error_rate: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{SeededRng, SourceModel};

    fn seq(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    /// Independent scanner: slices every context out of the string afresh.
    fn brute_force(train: &[u8], k: usize) -> (Vec<u64>, Vec<u64>) {
        let mut v = vec![0u64; 1 << k];
        let mut ones = vec![0u64; 1 << k];
        for t in k..train.len() {
            let mut idx = 0;
            for j in 0..k {
                idx = idx * 2 + train[t - k + j] as usize;
            }
            v[idx] += 1;
            if train[t] == 1 {
                ones[idx] += 1;
            }
        }
        (v, ones)
    }

    #[test]
    fn decide_rule() {
        assert_eq!(decide(0.7), 1);
        assert_eq!(decide(0.3), 0);
        assert_eq!(decide(0.5), 0);
    }

    #[test]
    fn alternating_training() {
        let m = LearnedModel::estimate(&seq("0101010101"), 1).unwrap();
        assert_eq!(m.context_counts(), &[5, 4]);
        assert_eq!(m.one_counts(), &[5, 0]);
        assert_eq!(m.estimates(), &[1.0, 0.0]);
        assert_eq!(m.decisions().to_string(), "10");
    }

    #[test]
    fn unseen_contexts_tie_to_zero() {
        let m = LearnedModel::estimate(&seq("000000"), 2).unwrap();
        assert_eq!(m.estimates(), &[0.0, 0.5, 0.5, 0.5]);
        assert_eq!(m.decisions().to_string(), "0000");
    }

    #[test]
    fn training_too_short() {
        assert_eq!(
            LearnedModel::estimate(&seq("010"), 3),
            Err(Error::TrainingTooShort { len: 3, k: 3 })
        );
    }

    #[test]
    fn estimates_converge_on_paper_source() {
        let src = SourceModel::half_split(3, 0.3).unwrap();
        let train = src.generate(10_000, &mut SeededRng::new(8), 0);
        let m = LearnedModel::estimate(&train, 3).unwrap();
        for (i, &p) in m.estimates().iter().enumerate() {
            assert!((p - src.p_one(i)).abs() <= 0.04, "state {i}: {p}");
        }
        assert_eq!(m.system_bytes(), b"11110000");
    }

    #[test]
    fn hand_traced_scoring() {
        let m = LearnedModel::from_decisions(seq("10")).unwrap();
        let r = m.predict_and_score(&seq("00110")).unwrap();
        assert_eq!(r.mistakes.to_string(), "1010");
        assert_eq!(r.zero_pred_mistakes.to_string(), "10");
        assert_eq!(r.prediction_count, 4);
        assert_eq!(r.error_rate, 0.5);
    }

    #[test]
    fn perfect_and_total_failure() {
        let all_ones = seq(&"1".repeat(20));
        let m = LearnedModel::from_decisions(seq("1111")).unwrap();
        let r = m.predict_and_score(&all_ones).unwrap();
        assert_eq!(r.mistakes.count_ones(), 0);
        assert!(r.zero_pred_mistakes.is_empty());

        let m = LearnedModel::from_decisions(seq("0000")).unwrap();
        let r = m.predict_and_score(&all_ones).unwrap();
        assert_eq!(r.mistakes.count_ones(), 18);
        assert_eq!(r.zero_pred_mistakes, r.mistakes);
        assert_eq!(r.error_rate, 1.0);
    }

    #[test]
    fn test_too_short() {
        let m = LearnedModel::from_decisions(seq("0110")).unwrap();
        assert_eq!(
            m.predict_and_score(&seq("01")),
            Err(Error::TestTooShort { len: 2, k: 2 })
        );
    }

    #[test]
    fn system_file_layout() {
        assert_eq!(
            LearnedModel::from_decisions(seq("10"))
                .unwrap()
                .system_bytes(),
            b"10"
        );
        assert_eq!(
            LearnedModel::from_decisions(seq("00001111"))
                .unwrap()
                .system_bytes(),
            b"00001111"
        );
        let m = LearnedModel::estimate(&BitSequence::from_bits(vec![0; 20]).unwrap(), 10).unwrap();
        assert_eq!(m.system_bytes(), vec![b'0'; 1024]);
    }

    #[test]
    fn exhaustive_against_brute_force() {
        for len in 2..=12usize {
            for word in 0u32..(1 << len) {
                let bits: Vec<u8> = (0..len)
                    .map(|j| ((word >> (len - 1 - j)) & 1) as u8)
                    .collect();
                let train = BitSequence::from_bits(bits.clone()).unwrap();
                for k in 1..=3usize.min(len - 1) {
                    let m = LearnedModel::estimate(&train, k).unwrap();
                    let (v, ones) = brute_force(&bits, k);
                    assert_eq!(m.context_counts(), &v[..]);
                    assert_eq!(m.one_counts(), &ones[..]);
                    assert_eq!(m.context_counts().iter().sum::<u64>() as usize, len - k);
                    for i in 0..1 << k {
                        assert_eq!(m.decisions().get(i), Some(decide(m.estimates()[i])));
                    }
                }
            }
        }
    }
}
