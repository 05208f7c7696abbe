//! Command-line front end: `run`, `sweep`, `plot`, `oracle` and `config`.
//!
//! Exit status is 0 on success, 1 when a sweep had failed runs or an oracle
//! check failed, and 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bitseq::WordMode;
use crate::complexity::Gzip;
use crate::error::{Error, Result};
use crate::harness::{
    self, aggregate, aggregate_by_m, io, spread_comparison, threshold_rho, RunConfig, RunOptions,
    SweepGrid,
};
use crate::oracle;
use crate::plot::{Figure, FigureData};
use crate::randomness::{KlDirection, WordTest};
use crate::source::MAX_ORDER;

/// Overrides the output directory when no `--out` flag is given.
pub const OUT_DIR_ENV: &str = "SYSRATIO_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Full experiment description; the JSON config file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k_star: usize,
    pub p: f64,
    /// Explicit `p*(1|i)` table of length `2^kStar`, or null for the half-split source.
    pub transitions: Option<Vec<f64>>,
    pub k_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub runs_per_cell: usize,
    pub n: usize,
    pub base_seed: u64,
    pub burn_in: usize,
    pub out_dir: PathBuf,
    /// 0 lets the thread pool pick.
    pub workers: usize,
    pub emit_files: bool,
    pub overhead_correction: bool,
    pub word_mode: WordMode,
    pub word_length: usize,
    pub kl_direction: KlDirection,
}

impl ExperimentConfig {
    pub fn paper_defaults(k_star: usize, base_seed: u64) -> Self {
        let grid = SweepGrid::paper_defaults(k_star, base_seed);
        Self {
            k_star,
            p: grid.p,
            transitions: None,
            k_values: grid.k_values,
            m_values: grid.m_values,
            runs_per_cell: grid.runs_per_cell,
            n: grid.n,
            base_seed,
            burn_in: grid.burn_in,
            out_dir: PathBuf::from("out"),
            workers: 0,
            emit_files: false,
            overhead_correction: false,
            word_mode: WordMode::Sliding,
            word_length: 4,
            kl_direction: KlDirection::Forward,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(1..=MAX_ORDER).contains(&self.k_star) {
            return bad(format!("kStar = {} outside [1, {MAX_ORDER}]", self.k_star));
        }
        if self.k_values.is_empty() || self.m_values.is_empty() || self.runs_per_cell == 0 {
            return bad("kValues, mValues and runsPerCell must be non-empty".into());
        }
        if let Some(&k) = self
            .k_values
            .iter()
            .find(|&&k| !(1..=MAX_ORDER).contains(&k))
        {
            return bad(format!("k = {k} outside [1, {MAX_ORDER}]"));
        }
        let k_max = *self.k_values.iter().max().unwrap();
        if let Some(&m) = self.m_values.iter().find(|&&m| m < k_max + 1) {
            return bad(format!("m = {m} must be at least k + 1 = {}", k_max + 1));
        }
        if self.n < k_max + 1 {
            return bad(format!(
                "n = {} must be at least k + 1 = {}",
                self.n,
                k_max + 1
            ));
        }
        if self.word_length == 0 || self.word_length > 16 {
            return bad(format!("wordLength = {} outside [1, 16]", self.word_length));
        }
        self.options().source(self.k_star, self.p)?;
        Ok(())
    }

    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            k_star: self.k_star,
            p: self.p,
            k_values: self.k_values.clone(),
            m_values: self.m_values.clone(),
            runs_per_cell: self.runs_per_cell,
            n: self.n,
            base_seed: self.base_seed,
            burn_in: self.burn_in,
        }
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            transitions: self.transitions.clone(),
            overhead_correction: self.overhead_correction,
            word_test: WordTest {
                word_len: self.word_length,
                mode: self.word_mode,
            },
            kl_direction: self.kl_direction,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sysratio",
    version,
    about = "Markov learner sysRatio and mistake-randomness lab"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute one run and print its record as JSON.
    Run(RunArgs),
    /// Execute a full grid and write runs.csv / aggregates.csv.
    Sweep(SweepArgs),
    /// Render one figure from an aggregates.csv file.
    Plot(PlotArgs),
    /// Run the brute-force self-checks.
    Oracle,
    /// Print the resolved experiment config as JSON.
    Config(SweepArgs),
}

fn parse_order(s: &str) -> std::result::Result<usize, String> {
    let k: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=MAX_ORDER).contains(&k) {
        Ok(k)
    } else {
        Err(format!("must be in [1, {MAX_ORDER}]"))
    }
}

/// Settings shared by `run` and `sweep`; each maps to a config-file field.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Source order (kStar).
    #[arg(long = "kstar", value_parser = parse_order)]
    pub k_star: Option<usize>,
    /// Half-split source parameter.
    #[arg(long)]
    pub p: Option<f64>,
    /// Explicit source transitions p*(1|i), comma separated (transitions).
    #[arg(long, value_delimiter = ',')]
    pub transitions: Option<Vec<f64>>,
    /// Test length (n).
    #[arg(long)]
    pub n: Option<usize>,
    /// Base seed (baseSeed).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Output directory (outDir); also settable through SYSRATIO_OUT_DIR.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Write the system and errorT0 files of each run (emitFiles).
    #[arg(long)]
    pub emit_files: bool,
    /// Subtract the gzip container overhead before taking sysRatio (overheadCorrection).
    #[arg(long)]
    pub overhead_correction: bool,
    /// sliding or block (wordMode).
    #[arg(long)]
    pub word_mode: Option<WordMode>,
    #[arg(long)]
    pub word_length: Option<usize>,
    /// forward or reverse (klDirection).
    #[arg(long)]
    pub kl_direction: Option<KlDirection>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Learner order.
    #[arg(long, value_parser = parse_order)]
    pub k: Option<usize>,
    /// Training length.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub run_index: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Start from the reference grid (k = 1..10, m = 100..10000 step 100, 10 runs, n = 1000).
    #[arg(long)]
    pub paper_defaults: bool,
    /// Learner orders, comma separated (kValues).
    #[arg(long, value_delimiter = ',')]
    pub k_values: Option<Vec<usize>>,
    /// Training lengths, comma separated (mValues).
    #[arg(long, value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// Runs per (k, m) cell (runsPerCell).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Worker threads; 0 picks automatically (workers).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// aggregates.csv written by `sweep`.
    #[arg(long, value_name = "FILE")]
    pub aggregates: PathBuf,
    /// error-vs-k, rho-vs-k, ell0-vs-rho or delta0-vs-rho.
    #[arg(long)]
    pub figure: Figure,
    /// SVG path; defaults to <figure>.svg next to the aggregates file. The
    /// sidecar CSV takes the same path with a .csv extension.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl clap::builder::ValueParserFactory for WordMode {
    type Parser = fn(&str) -> std::result::Result<WordMode, String>;
    fn value_parser() -> Self::Parser {
        |s| s.parse().map_err(|e: Error| e.to_string())
    }
}

impl clap::builder::ValueParserFactory for KlDirection {
    type Parser = fn(&str) -> std::result::Result<KlDirection, String>;
    fn value_parser() -> Self::Parser {
        |s| s.parse().map_err(|e: Error| e.to_string())
    }
}

impl clap::builder::ValueParserFactory for Figure {
    type Parser = fn(&str) -> std::result::Result<Figure, String>;
    fn value_parser() -> Self::Parser {
        |s| s.parse().map_err(|e: Error| e.to_string())
    }
}

impl CommonArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.k_star {
            cfg.k_star = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = &self.transitions {
            cfg.transitions = Some(v.clone());
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.seed {
            cfg.base_seed = v;
        }
        if let Some(v) = self.burn_in {
            cfg.burn_in = v;
        }
        match &self.out {
            Some(dir) => cfg.out_dir = dir.clone(),
            None => {
                if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
                    cfg.out_dir = PathBuf::from(dir);
                }
            }
        }
        cfg.emit_files |= self.emit_files;
        cfg.overhead_correction |= self.overhead_correction;
        if let Some(v) = self.word_mode {
            cfg.word_mode = v;
        }
        if let Some(v) = self.word_length {
            cfg.word_length = v;
        }
        if let Some(v) = self.kl_direction {
            cfg.kl_direction = v;
        }
    }

    /// Config file if given, otherwise the reference settings for `--kstar`.
    fn base(&self, paper_defaults: bool) -> Result<ExperimentConfig> {
        match (&self.config, paper_defaults) {
            (Some(path), false) => ExperimentConfig::load(path),
            (None, true) | (None, false) => {
                let k_star = self.k_star.ok_or_else(|| {
                    Error::InvalidConfig("--kstar is required without --config".into())
                })?;
                Ok(ExperimentConfig::paper_defaults(
                    k_star,
                    self.seed.unwrap_or(0),
                ))
            }
            (Some(_), true) => Err(Error::InvalidConfig(
                "--config and --paper-defaults are mutually exclusive".into(),
            )),
        }
    }
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        if self.common.config.is_none() && !self.paper_defaults {
            return Err(Error::InvalidConfig(
                "sweep needs --config FILE or --paper-defaults --kstar K".into(),
            ));
        }
        let mut cfg = self.common.base(self.paper_defaults)?;
        self.common.apply(&mut cfg);
        if let Some(v) = &self.k_values {
            cfg.k_values = v.clone();
        }
        if let Some(v) = &self.m_values {
            cfg.m_values = v.clone();
        }
        if let Some(v) = self.runs {
            cfg.runs_per_cell = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<(ExperimentConfig, RunConfig)> {
        let mut cfg = self.common.base(false)?;
        self.common.apply(&mut cfg);
        let single = |flag: Option<usize>, values: &[usize], name: &str| match (flag, values) {
            (Some(v), _) => Ok(v),
            (None, [v]) => Ok(*v),
            _ => Err(Error::InvalidConfig(format!("--{name} is required"))),
        };
        let k = single(self.k, &cfg.k_values, "k")?;
        let m = single(self.m, &cfg.m_values, "m")?;
        cfg.k_values = vec![k];
        cfg.m_values = vec![m];
        cfg.validate()?;
        let run = RunConfig {
            k_star: cfg.k_star,
            k,
            m,
            n: cfg.n,
            p: cfg.p,
            run_index: self.run_index,
            base_seed: cfg.base_seed,
            burn_in: cfg.burn_in,
        };
        Ok((cfg, run))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (cfg, run) = args.resolve()?;
    let opts = cfg.options();
    let record = match harness::execute(&run, &opts) {
        Ok(output) => {
            if cfg.emit_files {
                write_file(&cfg.out_dir.join("system"), &output.system_file())?;
                write_file(&cfg.out_dir.join("errorT0"), &output.error_t0_file())?;
            }
            output.record
        }
        Err(e) => {
            writeln!(err, "run failed: {e}")?;
            harness::run_one(&run, &opts)
        }
    };
    writeln!(
        out,
        "{}",
        serde_json::to_string(&record).expect("record serializes")
    )?;
    Ok(if record.is_ok() { EXIT_OK } else { EXIT_FAILED })
}

fn run_dir(root: &Path, c: &RunConfig) -> PathBuf {
    root.join("files")
        .join(format!("k{}_m{}_r{}", c.k, c.m, c.run_index))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = args.resolve()?;
    let grid = cfg.grid();
    let opts = cfg.options();
    let emit = cfg.emit_files;
    let results = harness::sweep_map(&grid, cfg.workers, |c| match harness::execute(c, &opts) {
        Ok(o) => {
            let files = emit.then(|| (o.system_file(), o.error_t0_file()));
            (o.record, files)
        }
        Err(_) => (harness::run_one(c, &opts), None),
    })?;

    let dir = &cfg.out_dir;
    fs::create_dir_all(dir)?;
    let mut records = Vec::with_capacity(results.len());
    for (record, files) in results {
        if let Some((system, error_t0)) = files {
            let d = run_dir(dir, &record.config);
            write_file(&d.join("system"), &system)?;
            write_file(&d.join("errorT0"), &error_t0)?;
        }
        records.push(record);
    }

    let rows = aggregate(&records, cfg.kl_direction);
    let cells = aggregate_by_m(&records, cfg.kl_direction);
    let mut buf = Vec::new();
    io::write_runs(&mut buf, &records)?;
    write_file(&dir.join("runs.csv"), &buf)?;
    buf.clear();
    io::write_aggregates(&mut buf, cfg.k_star, &rows)?;
    write_file(&dir.join("aggregates.csv"), &buf)?;
    buf.clear();
    io::write_breakdown(&mut buf, cfg.k_star, &cells)?;
    write_file(&dir.join("aggregates_by_m.csv"), &buf)?;
    write_file(
        &dir.join("config.json"),
        format!("{}\n", cfg.to_json()).as_bytes(),
    )?;

    let failed: Vec<_> = records.iter().filter(|r| !r.is_ok()).collect();
    writeln!(
        out,
        "{} runs ({} failed) written to {}",
        records.len(),
        failed.len(),
        dir.display()
    )?;
    match threshold_rho(&rows, cfg.k_star) {
        Ok(rho) => writeln!(out, "rho* (kStar = {}) = {}", cfg.k_star, rho)?,
        Err(e) => writeln!(out, "rho*: {e}")?,
    }
    if let Some(cmp) = spread_comparison(&records, cfg.k_star, cfg.kl_direction) {
        writeln!(
            out,
            "spread below/above kStar: std ell0 {:.3} / {:.3} (ratio {:.3}), std delta0 {:.4} / {:.4} (ratio {:.3})",
            cmp.high_rho.std_ell_zero,
            cmp.low_rho.std_ell_zero,
            cmp.ell_zero_ratio(),
            cmp.high_rho.std_delta_zero,
            cmp.low_rho.std_delta_zero,
            cmp.delta_zero_ratio()
        )?;
    }
    for r in failed.iter().take(10) {
        writeln!(
            err,
            "failed: k={} m={} run={}: {}",
            r.config.k,
            r.config.m,
            r.config.run_index,
            r.failure.as_deref().unwrap_or("")
        )?;
    }
    Ok(if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<i32> {
    let file = fs::File::open(&args.aggregates)
        .map_err(|e| Error::Io(format!("{}: {e}", args.aggregates.display())))?;
    let table = io::Table::read(file)?;
    let data = FigureData::from_table(args.figure, &table)?;
    let svg_path = args.out.clone().unwrap_or_else(|| {
        args.aggregates
            .with_file_name(format!("{}.svg", args.figure.name()))
    });
    write_file(&svg_path, data.svg().as_bytes())?;
    let csv_path = svg_path.with_extension("csv");
    write_file(&csv_path, data.sidecar_csv().as_bytes())?;
    writeln!(
        out,
        "wrote {} and {}",
        svg_path.display(),
        csv_path.display()
    )?;
    Ok(EXIT_OK)
}

fn cmd_oracle(out: &mut dyn Write) -> Result<i32> {
    let results = oracle::run_all(&Gzip);
    for r in &results {
        writeln!(out, "{r}")?;
    }
    Ok(if results.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Plot(a) => cmd_plot(a, out),
        Command::Oracle => cmd_oracle(out),
        Command::Config(a) => a.resolve().and_then(|cfg| {
            writeln!(out, "{}", cfg.to_json())?;
            Ok(EXIT_OK)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["sysratio"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig::paper_defaults(4, 12);
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        let json = cfg.to_json();
        for key in [
            "kStar",
            "transitions",
            "klDirection",
            "wordMode",
            "outDir",
            "workers",
        ] {
            assert!(json.contains(key), "{key}");
        }
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let mut v: serde_json::Value =
            serde_json::from_str(&ExperimentConfig::paper_defaults(3, 1).to_json()).unwrap();
        v["bogus"] = 1.into();
        assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, ExperimentConfig::paper_defaults(5, 3).to_json()).unwrap();
        let (code, out, _) = call(&[
            "config",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "99",
            "--runs",
            "2",
            "--k-values",
            "1,2",
            "--kl-direction",
            "reverse",
        ]);
        assert_eq!(code, 0);
        let cfg: ExperimentConfig = serde_json::from_str(&out).unwrap();
        assert_eq!(cfg.k_star, 5);
        assert_eq!(cfg.base_seed, 99);
        assert_eq!(cfg.runs_per_cell, 2);
        assert_eq!(cfg.k_values, vec![1, 2]);
        assert_eq!(cfg.kl_direction, KlDirection::Reverse);
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = call(&["run", "--kstar", "3", "--k", "0", "--m", "100"]);
        assert_eq!(code, 2);
        assert!(err.contains("--k"), "{err}");
        assert_eq!(call(&["run", "--kstar", "3", "--k", "3", "--m", "3"]).0, 2);
        assert_eq!(call(&["sweep", "--kstar", "3"]).0, 2);
        assert_eq!(call(&["sweep", "--config", "/nonexistent/cfg.json"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
    }

    #[test]
    fn run_prints_json() {
        let (code, out, _) = call(&[
            "run", "--kstar", "3", "--k", "3", "--m", "2000", "--n", "500", "--seed", "7",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["k"], 3);
        assert_eq!(v["decisions"], "11110000");
        assert!(v["errorRate"].as_f64().unwrap() < 0.45);
    }

    #[test]
    fn run_emits_files() {
        let dir = tempfile::tempdir().unwrap();
        let out_dir = dir.path().join("r");
        let (code, out, _) = call(&[
            "run",
            "--kstar",
            "3",
            "--k",
            "2",
            "--m",
            "500",
            "--seed",
            "1",
            "--emit-files",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let system = fs::read(out_dir.join("system")).unwrap();
        let error_t0 = fs::read(out_dir.join("errorT0")).unwrap();
        assert_eq!(system.len(), 4);
        assert_eq!(String::from_utf8(system).unwrap(), v["decisions"]);
        assert_eq!(error_t0.len() as u64, v["xiZeroLength"].as_u64().unwrap());
    }

    #[test]
    fn small_sweep_and_plot() {
        let dir = tempfile::tempdir().unwrap();
        let out_dir = dir.path().join("s");
        let (code, out, _) = call(&[
            "sweep",
            "--paper-defaults",
            "--kstar",
            "3",
            "--k-values",
            "1,2,3,4",
            "--m-values",
            "500,1000",
            "--runs",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("rho* (kStar = 3)"));
        let runs = fs::read_to_string(out_dir.join("runs.csv")).unwrap();
        assert_eq!(runs.lines().count(), 1 + 16);
        let agg = out_dir.join("aggregates.csv");
        assert_eq!(fs::read_to_string(&agg).unwrap().lines().count(), 5);
        let saved = ExperimentConfig::load(&out_dir.join("config.json")).unwrap();
        assert_eq!(saved.k_values, vec![1, 2, 3, 4]);

        let (code, _, err) = call(&[
            "plot",
            "--aggregates",
            agg.to_str().unwrap(),
            "--figure",
            "ell0-vs-rho",
        ]);
        assert_eq!(code, 0, "{err}");
        let svg = fs::read_to_string(out_dir.join("ell0-vs-rho.svg")).unwrap();
        assert!(svg.contains("ρ*"));
        assert!(out_dir.join("ell0-vs-rho.csv").exists());
    }

    #[test]
    fn plot_validation() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        fs::write(&empty, io::AGGREGATE_HEADER.join(",") + "\n").unwrap();
        let (code, _, _) = call(&[
            "plot",
            "--aggregates",
            empty.to_str().unwrap(),
            "--figure",
            "rho-vs-k",
        ]);
        assert_eq!(code, 2);

        let partial = dir.path().join("partial.csv");
        fs::write(&partial, "k,meanRho\n1,2\n").unwrap();
        let (code, _, err) = call(&[
            "plot",
            "--aggregates",
            partial.to_str().unwrap(),
            "--figure",
            "rho-vs-k",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("stdRho"), "{err}");
    }
}
