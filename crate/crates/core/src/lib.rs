//! Simulation lab for Markov-chain learners: how the information density of a
//! learner's decision rule (its sysRatio) relates to the randomness of the
//! mistakes it makes when predicting 0.
//!
//! Pipeline of a single run:
//!
//! 1. [`source`] draws training and test bits from an order-k* Markov chain.
//! 2. [`learner`] estimates an order-k model and its MAP decision vector, then
//!    scores the test bits, producing the mistake sequence ξ and its
//!    zero-prediction subsequence ξ₀.
//! 3. [`complexity`] gzips the decision vector (sysRatio ρ) and ξ₀ (ℓ₀).
//! 4. [`randomness`] measures the divergence Δ₀ of ξ₀'s 4-bit words from a
//!    Bernoulli model.
//!
//! [`harness`] sweeps and aggregates runs, [`cli`] exposes it all on the
//! command line.

pub mod bitseq;
pub mod cli;
pub mod complexity;
pub mod error;
pub mod harness;
pub mod learner;
pub mod oracle;
pub mod plot;
pub mod randomness;
pub mod source;
pub mod stats;

pub use bitseq::{BitSequence, WordHistogram, WordMode};
pub use error::{Error, Result};
pub use harness::{
    aggregate, run_one, sweep, threshold_rho, AggregateRow, RunConfig, RunOptions, RunRecord,
    SweepGrid,
};
pub use learner::{decide, LearnedModel, MistakeRecord};
pub use randomness::{delta_zero, KlDirection, WordDistribution};
pub use source::{SeededRng, SourceModel};
