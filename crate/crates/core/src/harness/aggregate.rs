use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomness::KlDirection;
use crate::stats::{mean, sample_std};

use super::{RunMetrics, RunRecord};

/// Mean and standard deviation of the run metrics of one group of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AggregateRow {
    pub k: usize,
    pub run_count: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_rho: f64,
    pub std_rho: f64,
    pub mean_ell_zero: f64,
    pub std_ell_zero: f64,
    /// `NaN` when no run in the group has a defined Δ₀.
    pub mean_delta_zero: f64,
    pub std_delta_zero: f64,
    pub delta_defined_count: usize,
    pub mean_ones_fraction_in_d: f64,
}

/// An aggregate restricted to a single training length.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub m: usize,
    pub row: AggregateRow,
}

fn canonical(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut ok: Vec<&RunRecord> = records.iter().filter(|r| r.is_ok()).collect();
    ok.sort_by_key(|r| {
        (
            r.config.k_star,
            r.config.k,
            r.config.m,
            r.config.run_index,
            r.seed,
        )
    });
    ok
}

/// Summarizes a group. Callers pass records in canonical order so the
/// floating-point folds are order independent.
fn summarize(k: usize, runs: &[&RunMetrics], direction: KlDirection) -> AggregateRow {
    let col = |f: &dyn Fn(&RunMetrics) -> f64| -> Vec<f64> { runs.iter().map(|r| f(r)).collect() };
    let errors = col(&|r| r.error_rate);
    let rhos = col(&|r| r.rho);
    let ells = col(&|r| r.ell_zero as f64);
    let deltas: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.delta(direction))
        .filter(|d| d.is_finite())
        .collect();
    let ones: usize = runs.iter().map(|r| r.ones_in_decisions()).sum();
    let bits: usize = runs.iter().map(|r| r.decisions.len()).sum();
    AggregateRow {
        k,
        run_count: runs.len(),
        mean_error: mean(&errors),
        std_error: sample_std(&errors),
        mean_rho: mean(&rhos),
        std_rho: sample_std(&rhos),
        mean_ell_zero: mean(&ells),
        std_ell_zero: sample_std(&ells),
        mean_delta_zero: mean(&deltas),
        std_delta_zero: sample_std(&deltas),
        delta_defined_count: deltas.len(),
        mean_ones_fraction_in_d: ones as f64 / bits as f64,
    }
}

fn group_by<K: Ord>(
    records: &[RunRecord],
    key: impl Fn(&RunRecord) -> K,
) -> BTreeMap<K, Vec<&RunMetrics>> {
    let mut groups: BTreeMap<K, Vec<&RunMetrics>> = BTreeMap::new();
    for r in canonical(records) {
        groups
            .entry(key(r))
            .or_default()
            .push(r.metrics.as_ref().unwrap());
    }
    groups
}

/// One row per learner order, pooling every training length and run. Failed
/// runs are left out.
pub fn aggregate(records: &[RunRecord], direction: KlDirection) -> Vec<AggregateRow> {
    group_by(records, |r| r.config.k)
        .into_iter()
        .map(|(k, runs)| summarize(k, &runs, direction))
        .collect()
}

/// One row per `(k, m)` cell.
pub fn aggregate_by_m(records: &[RunRecord], direction: KlDirection) -> Vec<CellRow> {
    group_by(records, |r| (r.config.k, r.config.m))
        .into_iter()
        .map(|((k, m), runs)| CellRow {
            m,
            row: summarize(k, &runs, direction),
        })
        .collect()
}

/// ρ*: mean sysRatio of the row whose order equals the source order.
pub fn threshold_rho(rows: &[AggregateRow], k_star: usize) -> Result<f64> {
    rows.iter()
        .find(|r| r.k == k_star)
        .map(|r| r.mean_rho)
        .ok_or(Error::NoSuchOrder(k_star))
}

/// Runs pooled below and above the source order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadComparison {
    /// Pooled over `k <= kStar - 1` (high sysRatio).
    pub high_rho: AggregateRow,
    /// Pooled over `k >= kStar + 1` (low sysRatio).
    pub low_rho: AggregateRow,
}

impl SpreadComparison {
    pub fn ell_zero_ratio(&self) -> f64 {
        self.high_rho.std_ell_zero / self.low_rho.std_ell_zero
    }

    pub fn delta_zero_ratio(&self) -> f64 {
        self.high_rho.std_delta_zero / self.low_rho.std_delta_zero
    }
}

/// Pools runs on either side of `k_star`; `None` when one side has no runs.
/// The `k` field of each pooled row holds the bounding order.
pub fn spread_comparison(
    records: &[RunRecord],
    k_star: usize,
    direction: KlDirection,
) -> Option<SpreadComparison> {
    let ordered = canonical(records);
    let side = |keep: &dyn Fn(usize) -> bool| -> Vec<&RunMetrics> {
        ordered
            .iter()
            .filter(|r| keep(r.config.k))
            .map(|r| r.metrics.as_ref().unwrap())
            .collect()
    };
    let high = side(&|k| k < k_star);
    let low = side(&|k| k > k_star);
    if high.is_empty() || low.is_empty() {
        return None;
    }
    Some(SpreadComparison {
        high_rho: summarize(k_star - 1, &high, direction),
        low_rho: summarize(k_star + 1, &low, direction),
    })
}

/// Per-state fraction of runs of order `k` (optionally at one training length)
/// that decided 1.
pub fn decision_alphas(records: &[RunRecord], k: usize, m: Option<usize>) -> Vec<f64> {
    let mut ones = vec![0usize; 1 << k];
    let mut runs = 0usize;
    for r in records
        .iter()
        .filter(|r| r.config.k == k && m.is_none_or(|m| r.config.m == m))
    {
        if let Some(metrics) = &r.metrics {
            runs += 1;
            for (slot, bit) in ones.iter_mut().zip(metrics.decisions.iter()) {
                *slot += bit as usize;
            }
        }
    }
    ones.into_iter().map(|c| c as f64 / runs as f64).collect()
}
