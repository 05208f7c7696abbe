//! Single runs, the sweep grid, and aggregation of run metrics.
//!
//! A run trains an order-`k` learner on `m` bits from the source, scores it on
//! `n` fresh bits, and measures the sysRatio of its decision vector together
//! with the complexity and Bernoulli divergence of its zero-prediction
//! mistakes.

mod aggregate;
pub mod io;
pub mod seed;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitseq::BitSequence;
use crate::complexity::{algorithmic_complexity, ComplexityMetrics};
use crate::error::{Error, Result};
use crate::learner::{LearnedModel, MistakeRecord};
use crate::randomness::{KlDirection, WordTest};
use crate::source::{SeededRng, SourceModel, MAX_ORDER};

pub use aggregate::{
    aggregate, aggregate_by_m, decision_alphas, spread_comparison, threshold_rho, AggregateRow,
    CellRow, SpreadComparison,
};
use seed::{phase_seed, run_seed, Phase};

/// Coordinates and parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub k_star: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub run_index: usize,
    pub base_seed: u64,
    pub burn_in: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(1..=MAX_ORDER).contains(&self.k) {
            return bad(format!("k = {} outside [1, {MAX_ORDER}]", self.k));
        }
        if !(1..=MAX_ORDER).contains(&self.k_star) {
            return bad(format!("kStar = {} outside [1, {MAX_ORDER}]", self.k_star));
        }
        if self.m < self.k + 1 {
            return bad(format!("m = {} must be at least k + 1", self.m));
        }
        if self.n < self.k + 1 {
            return bad(format!("n = {} must be at least k + 1", self.n));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        run_seed(self.base_seed, self.k_star, self.k, self.m, self.run_index)
    }
}

/// Settings shared by every run of an experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    /// Explicit `p*(1|i)` table; when absent the half-split source is built
    /// from `kStar` and `p`.
    pub transitions: Option<Vec<f64>>,
    pub overhead_correction: bool,
    pub word_test: WordTest,
    pub kl_direction: KlDirection,
}

impl RunOptions {
    pub fn source(&self, k_star: usize, p: f64) -> Result<SourceModel> {
        match &self.transitions {
            Some(t) => SourceModel::new(k_star, t.clone()),
            None => SourceModel::half_split(k_star, p),
        }
    }
}

/// Metrics of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMetrics {
    pub error_rate: f64,
    pub rho: f64,
    pub ell_zero: usize,
    pub delta_zero: Option<f64>,
    /// `Some(INFINITY)` when the sample misses a word the model allows.
    #[serde(with = "extended_float")]
    pub delta_zero_reverse: Option<f64>,
    pub xi_zero_length: usize,
    pub system_uncompressed: usize,
    pub system_compressed: usize,
    pub decisions: BitSequence,
}

impl RunMetrics {
    pub fn delta(&self, direction: KlDirection) -> Option<f64> {
        match direction {
            KlDirection::Forward => self.delta_zero,
            KlDirection::Reverse => self.delta_zero_reverse,
        }
    }

    pub fn ones_in_decisions(&self) -> usize {
        self.decisions.count_ones()
    }
}

/// One row of a sweep. Exactly one of `metrics` and `failure` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    #[serde(flatten)]
    pub config: RunConfig,
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: Option<RunMetrics>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.metrics.is_some()
    }
}

/// Everything a run produced, including the files it would write.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub model: LearnedModel,
    pub mistakes: MistakeRecord,
}

impl RunOutput {
    /// Contents of the system file.
    pub fn system_file(&self) -> Vec<u8> {
        self.model.system_bytes()
    }

    /// Contents of the errorT0 file.
    pub fn error_t0_file(&self) -> Vec<u8> {
        self.mistakes.zero_pred_mistakes.to_ascii_bytes()
    }
}

/// Runs the full pipeline for one configuration.
pub fn execute(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    cfg.validate()?;
    let source = opts.source(cfg.k_star, cfg.p)?;
    let seed = cfg.seed();
    let train = source.generate(
        cfg.m,
        &mut SeededRng::new(phase_seed(seed, Phase::Train)),
        cfg.burn_in,
    );
    let test = source.generate(
        cfg.n,
        &mut SeededRng::new(phase_seed(seed, Phase::Test)),
        cfg.burn_in,
    );
    let model = LearnedModel::estimate(&train, cfg.k)?;
    let mistakes = model.predict_and_score(&test)?;
    let system = ComplexityMetrics::measure(&model.system_bytes(), opts.overhead_correction)?;
    let xi0 = &mistakes.zero_pred_mistakes;
    let delta = opts.word_test.evaluate(xi0);
    let metrics = RunMetrics {
        error_rate: mistakes.error_rate,
        rho: system.ratio,
        ell_zero: algorithmic_complexity(xi0),
        delta_zero: delta.map(|d| d.forward),
        delta_zero_reverse: delta.map(|d| d.reverse),
        xi_zero_length: xi0.len(),
        system_uncompressed: system.uncompressed_len,
        system_compressed: system.compressed_len,
        decisions: model.decisions().clone(),
    };
    Ok(RunOutput {
        record: RunRecord {
            config: cfg.clone(),
            seed,
            metrics: Some(metrics),
            failure: None,
        },
        model,
        mistakes,
    })
}

/// Runs one configuration; failures are carried in the record.
pub fn run_one(cfg: &RunConfig, opts: &RunOptions) -> RunRecord {
    match execute(cfg, opts) {
        Ok(out) => out.record,
        Err(e) => RunRecord {
            config: cfg.clone(),
            seed: cfg.seed(),
            metrics: None,
            failure: Some(e.to_string()),
        },
    }
}

/// The (k, m, run) grid of a sweep for one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepGrid {
    pub k_star: usize,
    pub p: f64,
    pub k_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub runs_per_cell: usize,
    pub n: usize,
    pub base_seed: u64,
    pub burn_in: usize,
}

impl SweepGrid {
    /// k = 1..10, m = 100, 200, ..., 10000, ten runs per cell, n = 1000,
    /// half-split source with p = 0.3.
    pub fn paper_defaults(k_star: usize, base_seed: u64) -> Self {
        Self {
            k_star,
            p: 0.3,
            k_values: (1..=10).collect(),
            m_values: (1..=100).map(|i| i * 100).collect(),
            runs_per_cell: 10,
            n: 1000,
            base_seed,
            burn_in: 0,
        }
    }

    /// Run configurations in canonical `(k, m, run_index)` order.
    pub fn configs(&self) -> Vec<RunConfig> {
        let mut out =
            Vec::with_capacity(self.k_values.len() * self.m_values.len() * self.runs_per_cell);
        for &k in &self.k_values {
            for &m in &self.m_values {
                for run_index in 0..self.runs_per_cell {
                    out.push(RunConfig {
                        k_star: self.k_star,
                        k,
                        m,
                        n: self.n,
                        p: self.p,
                        run_index,
                        base_seed: self.base_seed,
                        burn_in: self.burn_in,
                    });
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.k_values.len() * self.m_values.len() * self.runs_per_cell
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Executes every cell of `grid`. `workers = 0` uses rayon's default pool
/// size. The result is in canonical order whatever the worker count.
pub fn sweep(grid: &SweepGrid, opts: &RunOptions, workers: usize) -> Result<Vec<RunRecord>> {
    sweep_map(grid, workers, |c| run_one(c, opts))
}

/// Applies `f` to every run configuration of `grid` in parallel, returning
/// the results in canonical order.
pub fn sweep_map<T, F>(grid: &SweepGrid, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RunConfig) -> T + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    let configs = grid.configs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(&f).collect()))
}

/// Serializes `Option<f64>` with infinities written as the strings "inf" / "-inf".
mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Some(x) => s.serialize_f64(*x),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => t.parse().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k_star: usize, k: usize, m: usize) -> RunConfig {
        RunConfig {
            k_star,
            k,
            m,
            n: 1000,
            p: 0.3,
            run_index: 0,
            base_seed: 42,
            burn_in: 0,
        }
    }

    #[test]
    fn matched_order_reaches_bayes_error() {
        let r = run_one(&cfg(3, 3, 10_000), &RunOptions::default());
        let e = r.metrics.unwrap().error_rate;
        assert!((0.28..=0.38).contains(&e), "{e}");
    }

    #[test]
    fn low_order_stays_at_chance() {
        let r = run_one(&cfg(3, 1, 10_000), &RunOptions::default());
        let e = r.metrics.unwrap().error_rate;
        assert!((0.45..=0.55).contains(&e), "{e}");
    }

    #[test]
    fn record_is_reproducible() {
        let a = run_one(&cfg(4, 5, 3000), &RunOptions::default());
        let b = run_one(&cfg(4, 5, 3000), &RunOptions::default());
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn record_invariants() {
        let r = run_one(&cfg(3, 6, 500), &RunOptions::default());
        let m = r.metrics.unwrap();
        assert_eq!(
            m.rho,
            m.system_compressed as f64 / m.system_uncompressed as f64
        );
        assert_eq!(m.system_uncompressed, 64);
        assert!(m.xi_zero_length <= 1000 - 6);
    }

    #[test]
    fn seed_isolation() {
        let opts = RunOptions::default();
        let base = execute(&cfg(3, 3, 2000), &opts).unwrap();
        let mut other = cfg(3, 3, 2000);
        other.run_index = 1;
        let moved = execute(&other, &opts).unwrap();
        assert_ne!(base.model.context_counts(), moved.model.context_counts());
        assert_ne!(base.mistakes.mistakes, moved.mistakes.mistakes);

        let mut longer = cfg(3, 3, 2000);
        longer.n = 1500;
        let longer = execute(&longer, &opts).unwrap();
        assert_eq!(base.model, longer.model);
        assert_eq!(
            base.mistakes.mistakes.as_slice(),
            &longer.mistakes.mistakes.as_slice()[..997]
        );
    }

    #[test]
    fn invalid_config_is_a_failed_record() {
        let r = run_one(&cfg(3, 3, 3), &RunOptions::default());
        assert!(!r.is_ok());
        assert!(r.failure.unwrap().contains("k + 1"));
        let mut c = cfg(3, 0, 100);
        c.k = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn custom_transitions() {
        let opts = RunOptions {
            transitions: Some(vec![1.0, 1.0]),
            ..RunOptions::default()
        };
        let r = run_one(&cfg(1, 1, 100), &opts).metrics.unwrap();
        assert_eq!(r.error_rate, 0.0);
        // Context 0 never occurs in an all-ones stream, so it keeps the tie decision.
        assert_eq!(r.decisions.to_string(), "01");
        assert_eq!(r.xi_zero_length, 0);
        assert_eq!(r.delta_zero, None);
    }

    #[test]
    fn singleton_and_canonical_order() {
        let mut grid = SweepGrid::paper_defaults(3, 9);
        grid.k_values = vec![1];
        grid.m_values = vec![100];
        grid.runs_per_cell = 1;
        assert_eq!(sweep(&grid, &RunOptions::default(), 1).unwrap().len(), 1);

        let grid = SweepGrid::paper_defaults(3, 9);
        assert_eq!(grid.len(), 10_000);
        let configs = grid.configs();
        assert_eq!(
            (configs[0].k, configs[0].m, configs[0].run_index),
            (1, 100, 0)
        );
        assert_eq!((configs[10].k, configs[10].m), (1, 200));
        assert_eq!(configs[1000].k, 2);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let grid = SweepGrid {
            k_star: 3,
            p: 0.3,
            k_values: vec![1, 3, 5],
            m_values: vec![100, 1000],
            runs_per_cell: 3,
            n: 500,
            base_seed: 5,
            burn_in: 2,
        };
        let opts = RunOptions::default();
        let a = sweep(&grid, &opts, 1).unwrap();
        let b = sweep(&grid, &opts, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 18);
    }

    #[test]
    fn infinite_reverse_round_trips_through_json() {
        let r = run_one(&cfg(3, 2, 500), &RunOptions::default());
        let mut r2 = r.clone();
        r2.metrics.as_mut().unwrap().delta_zero_reverse = Some(f64::INFINITY);
        let json = serde_json::to_string(&r2).unwrap();
        assert!(json.contains("\"deltaZeroReverse\":\"inf\""));
        let back: RunRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(
            back.metrics.unwrap().delta_zero_reverse,
            Some(f64::INFINITY)
        );
    }
}
