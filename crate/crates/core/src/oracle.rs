//! Self-check suite: exhaustive and randomized comparisons of the library
//! against independent brute-force computations, plus pinned compressor
//! outputs.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitseq::BitSequence;
use crate::complexity::{compressed_digest, gunzip, Compressor};
use crate::learner::LearnedModel;
use crate::randomness::{divergence, WordDistribution};

/// Fixed inputs and the SHA-256 of their gzip streams.
pub const PINNED_DIGESTS: [(&str, &str); 5] = [
    (
        "",
        "104588fdbcb2ab7909ec5685f3383f696c882bb6fb805a3c58089704caab1b77",
    ),
    (
        "0",
        "d28b1950400f2a5feef0f22394f211fceb89e29b1c3a54e1fa35a9d65136e759",
    ),
    (
        "0110100110010110",
        "84a04f10f95a372c3c6a4b30fb70e8821cd2d6662dc001b1b733c0a923df16a4",
    ),
    (
        "zeros1024",
        "b5434b79c2cab9c39ca12faefc6d78c1e9e15b54485c9943d6416559b2786a0c",
    ),
    (
        "alt4096",
        "e5569e7e55decd25dadb194caa4e27c41feebf8025005f0d431ea47190e57f01",
    ),
];

/// Expands the short names used in [`PINNED_DIGESTS`] into input bytes.
pub fn pinned_input(name: &str) -> Vec<u8> {
    match name {
        "zeros1024" => vec![b'0'; 1024],
        "alt4096" => b"0011".repeat(1024),
        literal => literal.as_bytes().to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    /// First mismatching case, if any.
    pub failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS  {} ({} cases)", self.name, self.cases),
            Some(why) => write!(f, "FAIL  {} ({} cases): {}", self.name, self.cases, why),
        }
    }
}

fn bits_of(word: u32, len: usize) -> Vec<u8> {
    (0..len)
        .map(|j| ((word >> (len - 1 - j)) & 1) as u8)
        .collect()
}

/// Counts contexts by slicing each one out separately and reading it as a
/// binary string.
fn scan_contexts(bits: &[u8], k: usize) -> (Vec<u64>, Vec<u64>) {
    let mut seen = vec![0u64; 1 << k];
    let mut ones = vec![0u64; 1 << k];
    for t in k..bits.len() {
        let ctx: String = bits[t - k..t]
            .iter()
            .map(|b| char::from(b'0' + b))
            .collect();
        let idx = usize::from_str_radix(&ctx, 2).unwrap();
        seen[idx] += 1;
        ones[idx] += u64::from(bits[t] == 1);
    }
    (seen, ones)
}

/// `estimate` against the scanner on every string of length 2..=12, k <= 3.
pub fn check_context_counting() -> CheckResult {
    let mut cases = 0;
    for len in 2..=12usize {
        for word in 0u32..(1 << len) {
            let bits = bits_of(word, len);
            let seq = BitSequence::from_bits(bits.clone()).unwrap();
            for k in 1..=3.min(len - 1) {
                cases += 1;
                let model = LearnedModel::estimate(&seq, k).unwrap();
                let (seen, ones) = scan_contexts(&bits, k);
                let decisions_ok = (0..1 << k).all(|i| {
                    let expected = u8::from(2 * ones[i] > seen[i]);
                    model.decisions().get(i) == Some(expected)
                });
                if model.context_counts() != seen || model.one_counts() != ones || !decisions_ok {
                    return CheckResult {
                        name: "context counting",
                        cases,
                        failure: Some(format!("train={seq} k={k}")),
                    };
                }
            }
        }
    }
    CheckResult {
        name: "context counting",
        cases,
        failure: None,
    }
}

fn random_distribution(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..16).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Written out term by term, natural log converted to bits.
fn literal_kl(p: &[f64], q: &[f64]) -> f64 {
    let t = |i: usize| p[i] * (p[i] / q[i]).ln() / std::f64::consts::LN_2;
    t(0) + t(1)
        + t(2)
        + t(3)
        + t(4)
        + t(5)
        + t(6)
        + t(7)
        + t(8)
        + t(9)
        + t(10)
        + t(11)
        + t(12)
        + t(13)
        + t(14)
        + t(15)
}

/// `divergence` against the literal sum on `pairs` random distribution pairs.
pub fn check_divergence(pairs: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..pairs {
        let p = random_distribution(&mut rng);
        let q = random_distribution(&mut rng);
        let wp = WordDistribution::from_probs(4, p.clone()).expect("normalized");
        let wq = WordDistribution::from_probs(4, q.clone()).expect("normalized");
        let got = divergence(&wp, &wq).unwrap();
        let want = literal_kl(&p, &q);
        if (got - want).abs() > 1e-10 {
            return CheckResult {
                name: "KL divergence",
                cases: case + 1,
                failure: Some(format!("pair {case}: {got} vs {want}")),
            };
        }
    }
    CheckResult {
        name: "KL divergence",
        cases: pairs,
        failure: None,
    }
}

/// Compress then decompress `inputs` random byte strings of up to 2 KiB.
pub fn check_round_trip(compressor: &dyn Compressor, inputs: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..inputs {
        let len = rng.gen_range(0..2048u32) as usize;
        let mut data = vec![0u8; len];
        if case % 2 == 0 {
            rng.fill_bytes(&mut data);
        } else {
            data.iter_mut()
                .for_each(|b| *b = b'0' + rng.gen_range(0..2u8));
        }
        match gunzip(&compressor.compress(&data)) {
            Ok(back) if back == data => {}
            Ok(_) => {
                return CheckResult {
                    name: "compressor round trip",
                    cases: case + 1,
                    failure: Some(format!(
                        "input {case} (len {len}) decoded to different bytes"
                    )),
                }
            }
            Err(e) => {
                return CheckResult {
                    name: "compressor round trip",
                    cases: case + 1,
                    failure: Some(format!("input {case} (len {len}): {e}")),
                }
            }
        }
    }
    CheckResult {
        name: "compressor round trip",
        cases: inputs,
        failure: None,
    }
}

/// Compressed-stream hashes of the fixed inputs.
pub fn check_pinned_digests(compressor: &dyn Compressor) -> CheckResult {
    for (name, want) in PINNED_DIGESTS {
        let got = compressed_digest(compressor, &pinned_input(name));
        if got != want {
            return CheckResult {
                name: "pinned compressor digests",
                cases: PINNED_DIGESTS.len(),
                failure: Some(format!("input {name:?}: {got} != {want}")),
            };
        }
    }
    CheckResult {
        name: "pinned compressor digests",
        cases: PINNED_DIGESTS.len(),
        failure: None,
    }
}

/// The two hand-traced learner cases.
pub fn check_hand_traces() -> CheckResult {
    let fail = |why: String| CheckResult {
        name: "hand traces",
        cases: 2,
        failure: Some(why),
    };
    let train: BitSequence = "0101010101".parse().unwrap();
    let model = LearnedModel::estimate(&train, 1).unwrap();
    if model.estimates() != [1.0, 0.0] || model.decisions().to_string() != "10" {
        return fail(format!(
            "estimate(0101010101, 1) gave {:?}",
            model.estimates()
        ));
    }
    let scored = model.predict_and_score(&"00110".parse().unwrap()).unwrap();
    if scored.mistakes.to_string() != "1010" || scored.zero_pred_mistakes.to_string() != "10" {
        return fail(format!(
            "predict(d=10, 00110) gave xi={} xi0={}",
            scored.mistakes, scored.zero_pred_mistakes
        ));
    }
    CheckResult {
        name: "hand traces",
        cases: 2,
        failure: None,
    }
}

/// Every check, in a fixed order.
pub fn run_all(compressor: &dyn Compressor) -> Vec<CheckResult> {
    vec![
        check_context_counting(),
        check_divergence(1000, 0x6b6c),
        check_round_trip(compressor, 1000, 0x677a),
        check_pinned_digests(compressor),
        check_hand_traces(),
    ]
}
