//! CSV files written by a sweep.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! records always produce byte-identical files. Undefined values (Δ₀ of a
//! run with fewer than four zero-prediction bits, failed runs, empty groups)
//! are empty fields.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{AggregateRow, CellRow, RunRecord};

pub const RUNS_HEADER: [&str; 14] = [
    "kStar",
    "k",
    "m",
    "n",
    "runIndex",
    "seed",
    "errorRate",
    "rho",
    "ellZero",
    "deltaZero",
    "deltaZeroReverse",
    "xiZeroLength",
    "sysUncomp",
    "sysComp",
];

pub const AGGREGATE_HEADER: [&str; 13] = [
    "kStar",
    "k",
    "runCount",
    "meanError",
    "stdError",
    "meanRho",
    "stdRho",
    "meanEllZero",
    "stdEllZero",
    "meanDeltaZero",
    "stdDeltaZero",
    "deltaDefinedCount",
    "meanOnesFractionInD",
];

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        x.to_string()
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_runs<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in records {
        let c = &r.config;
        let mut row = vec![
            c.k_star.to_string(),
            c.k.to_string(),
            c.m.to_string(),
            c.n.to_string(),
            c.run_index.to_string(),
            r.seed.to_string(),
        ];
        match &r.metrics {
            Some(m) => row.extend([
                format_float(m.error_rate),
                format_float(m.rho),
                m.ell_zero.to_string(),
                opt_float(m.delta_zero),
                opt_float(m.delta_zero_reverse),
                m.xi_zero_length.to_string(),
                m.system_uncompressed.to_string(),
                m.system_compressed.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 8)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn aggregate_fields(k_star: usize, row: &AggregateRow) -> Vec<String> {
    vec![
        k_star.to_string(),
        row.k.to_string(),
        row.run_count.to_string(),
        format_float(row.mean_error),
        format_float(row.std_error),
        format_float(row.mean_rho),
        format_float(row.std_rho),
        format_float(row.mean_ell_zero),
        format_float(row.std_ell_zero),
        format_float(row.mean_delta_zero),
        format_float(row.std_delta_zero),
        row.delta_defined_count.to_string(),
        format_float(row.mean_ones_fraction_in_d),
    ]
}

pub fn write_aggregates<W: Write>(out: W, k_star: usize, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for row in rows {
        w.write_record(aggregate_fields(k_star, row))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-(k, m) breakdown; same columns as the aggregates with `m` after `k`.
pub fn write_breakdown<W: Write>(out: W, k_star: usize, cells: &[CellRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = AGGREGATE_HEADER.to_vec();
    header.insert(2, "m");
    w.write_record(&header)?;
    for cell in cells {
        let mut fields = aggregate_fields(k_star, &cell.row);
        fields.insert(2, cell.m.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// A CSV file held in memory with columns addressable by name.
#[derive(Debug, Clone)]
pub struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let columns = reader
            .headers()?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { columns, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    /// Column `name` parsed as floats; empty fields become `NaN`.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let idx = *self
            .columns
            .get(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        self.rows
            .iter()
            .map(|row| {
                let v = row.get(idx).map(String::as_str).unwrap_or("");
                if v.is_empty() {
                    Ok(f64::NAN)
                } else {
                    v.parse().map_err(|_| Error::BadValue {
                        column: name.to_string(),
                        value: v.to_string(),
                    })
                }
            })
            .collect()
    }
}

/// Reads an aggregates file back into `(kStar, row)` pairs.
pub fn read_aggregates<R: Read>(input: R) -> Result<Vec<(usize, AggregateRow)>> {
    let t = Table::read(input)?;
    let cols: Vec<Vec<f64>> = AGGREGATE_HEADER
        .iter()
        .map(|c| t.floats(c))
        .collect::<Result<_>>()?;
    Ok((0..t.len())
        .map(|i| {
            let f = |c: usize| cols[c][i];
            (
                f(0) as usize,
                AggregateRow {
                    k: f(1) as usize,
                    run_count: f(2) as usize,
                    mean_error: f(3),
                    std_error: f(4),
                    mean_rho: f(5),
                    std_rho: f(6),
                    mean_ell_zero: f(7),
                    std_ell_zero: f(8),
                    mean_delta_zero: f(9),
                    std_delta_zero: f(10),
                    delta_defined_count: f(11) as usize,
                    mean_ones_fraction_in_d: f(12),
                },
            )
        })
        .collect())
}
