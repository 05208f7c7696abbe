//! Order-k* Markov binary source.
//!
//! State `i` is the integer value of the last `k*` emitted bits, oldest bit
//! most significant. After emitting `x` the state becomes `((i << 1) | x)`
//! masked to `k*` bits.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitseq::BitSequence;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 20;

/// Seeded ChaCha8 stream. ChaCha8 output is specified bit-for-bit, so equal
/// seeds give equal streams on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `true` with probability `p`. `p = 1` always succeeds, `p = 0` never does.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.inner.gen::<f64>() < p
    }

    /// Uniform draw from `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.gen_range(0..n)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Markov chain of order `k*` over {0,1}; `transitions[i] = p*(1|i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    order: usize,
    transitions: Vec<f64>,
}

impl SourceModel {
    pub fn new(order: usize, transitions: Vec<f64>) -> Result<Self> {
        check_order(order)?;
        if transitions.len() != 1 << order {
            return Err(Error::InvalidConfig(format!(
                "order {order} needs {} transitions, got {}",
                1usize << order,
                transitions.len()
            )));
        }
        if let Some((state, &value)) = transitions
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::InvalidTransition {
                state,
                value: value.to_string(),
            });
        }
        Ok(Self { order, transitions })
    }

    /// Half/half construction: states with leading bit 0 emit a 1 with
    /// probability `1 - p`, states with leading bit 1 with probability `p`.
    /// With `p = 0.3` the Bayes error is 0.3 and no model of lower order can
    /// do better than 0.5.
    pub fn half_split(k_star: usize, p: f64) -> Result<Self> {
        check_order(k_star)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(p.to_string()));
        }
        let half = 1usize << (k_star - 1);
        let transitions = (0..1usize << k_star)
            .map(|i| if i < half { 1.0 - p } else { p })
            .collect();
        Ok(Self {
            order: k_star,
            transitions,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    pub fn p_one(&self, state: usize) -> f64 {
        self.transitions[state]
    }

    /// Starts an emitter at a uniformly drawn state.
    pub fn emitter<'a>(&'a self, rng: &'a mut SeededRng) -> Emitter<'a> {
        let state = rng.below(self.num_states() as u64) as usize;
        Emitter {
            model: self,
            rng,
            state,
        }
    }

    /// Emits `burn_in` bits that are discarded, then returns the next `length` bits.
    pub fn generate(&self, length: usize, rng: &mut SeededRng, burn_in: usize) -> BitSequence {
        let mut emitter = self.emitter(rng);
        for _ in 0..burn_in {
            emitter.step();
        }
        let mut out = BitSequence::with_capacity(length);
        for _ in 0..length {
            out.push(emitter.step());
        }
        out
    }
}

fn check_order(order: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::OrderTooLarge(order))
    }
}

/// Running chain; yields one bit per step.
pub struct Emitter<'a> {
    model: &'a SourceModel,
    rng: &'a mut SeededRng,
    state: usize,
}

impl Emitter<'_> {
    pub fn state(&self) -> usize {
        self.state
    }

    pub fn step(&mut self) -> bool {
        let x = self.rng.bernoulli(self.model.p_one(self.state));
        let mask = self.model.num_states() - 1;
        self.state = ((self.state << 1) | usize::from(x)) & mask;
        x
    }
}

impl Iterator for Emitter<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.step())
    }
}
