//! Command-line front end: experiment specs, figure presets and CSV output.
//!
//! An [`ExperimentSpec`] is a flat `key = value` record. Specs are read from a
//! text file, then individual keys are overridden from the command line, then
//! validated into a [`SchemeConfig`].

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{format_tradeoff_table, rate_matched_table, tradeoff_table};
use crate::codec::{Scheme, SchemeConfig, DEFAULT_ENUMERATION_CAP};
use crate::constellation::ConstellationKind;
use crate::detect::DetectorChoice;
use crate::error::{Error, Result};
use crate::sim::{BerRecord, SimOptions, Simulator, StopRule};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "STCM_WORKERS";

pub const CSV_HEADER: &str = "scheme,M,Q,R,snr_db,bits,errors,ber,theory_abep,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scheme: Scheme,
    /// Mirrors per transmit antenna (ignored for SSK, which uses `tx`).
    pub mirrors: u32,
    pub order: usize,
    /// `None` picks PSK for odd `log2 Q` and QAM otherwise.
    pub constellation: Option<ConstellationKind>,
    pub rx: usize,
    /// Transmit antennas for SSK, and the STBC-SM row of the trade-off table.
    pub tx: usize,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub stop: StopRule,
    pub seed: u64,
    pub csv: Option<PathBuf>,
    pub theory: bool,
    pub workers: usize,
    pub detector: DetectorChoice,
    pub cap: u64,
    pub preset: Option<String>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::Stcm1,
            mirrors: 4,
            order: 2,
            constellation: None,
            rx: 2,
            tx: 4,
            snr_start: 0.0,
            snr_stop: 20.0,
            snr_step: 2.0,
            stop: StopRule::default(),
            seed: 1,
            csv: None,
            theory: false,
            workers: 1,
            detector: DetectorChoice::Fast,
            cap: DEFAULT_ENUMERATION_CAP,
            preset: None,
        }
    }
}

fn field_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| field_err(key, format!("cannot parse '{value}': {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(field_err(key, format!("expected a boolean, got '{other}'"))),
    }
}

/// Default constellation family for order `q`.
pub fn default_kind(q: usize) -> ConstellationKind {
    if q >= 4 && q.trailing_zeros().is_multiple_of(2) {
        ConstellationKind::Qam
    } else {
        ConstellationKind::Psk
    }
}

impl ExperimentSpec {
    /// Sets one key. Keys are case-insensitive except the single-letter
    /// aliases `M`, `Q`, `R`, `T`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "M" | "mirrors" => self.mirrors = parse_field(key, value)?,
            "Q" | "order" => self.order = parse_field(key, value)?,
            "R" | "rx" => self.rx = parse_field(key, value)?,
            "T" | "tx" => self.tx = parse_field(key, value)?,
            _ => match key.to_ascii_lowercase().as_str() {
                "scheme" => self.scheme = parse_field(key, value)?,
                "constellation" => {
                    self.constellation = match value {
                        "" | "auto" => None,
                        v => Some(parse_field(key, v)?),
                    }
                }
                "snr_start" => self.snr_start = parse_field(key, value)?,
                "snr_stop" => self.snr_stop = parse_field(key, value)?,
                "snr_step" => self.snr_step = parse_field(key, value)?,
                "min_errors" => self.stop.min_bit_errors = parse_field(key, value)?,
                "max_bits" => self.stop.max_bits = parse_field(key, value)?,
                "seed" => self.seed = parse_field(key, value)?,
                "csv" => self.csv = (!value.is_empty()).then(|| PathBuf::from(value)),
                "theory" => self.theory = parse_bool(key, value)?,
                "workers" => self.workers = parse_field(key, value)?,
                "detector" => {
                    self.detector = match value.to_ascii_lowercase().as_str() {
                        "fast" => DetectorChoice::Fast,
                        "brute" | "bruteforce" | "brute-force" => DetectorChoice::BruteForce,
                        other => return Err(field_err(key, format!("unknown detector '{other}'"))),
                    }
                }
                "cap" => self.cap = parse_field(key, value)?,
                "preset" => self.preset = (!value.is_empty()).then(|| value.to_string()),
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            },
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got '{line}'", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        spec.apply_kv(text)?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv(&fs::read_to_string(path)?)
    }

    /// Serialises every key; `from_kv(to_kv())` reproduces the spec.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme = {}", self.scheme);
        let _ = writeln!(s, "M = {}", self.mirrors);
        let _ = writeln!(s, "Q = {}", self.order);
        let _ = writeln!(
            s,
            "constellation = {}",
            self.constellation.map_or("auto".to_string(), |k| k.to_string())
        );
        let _ = writeln!(s, "R = {}", self.rx);
        let _ = writeln!(s, "T = {}", self.tx);
        let _ = writeln!(s, "snr_start = {:?}", self.snr_start);
        let _ = writeln!(s, "snr_stop = {:?}", self.snr_stop);
        let _ = writeln!(s, "snr_step = {:?}", self.snr_step);
        let _ = writeln!(s, "min_errors = {}", self.stop.min_bit_errors);
        let _ = writeln!(s, "max_bits = {}", self.stop.max_bits);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "csv = {}", self.csv.as_ref().map_or(String::new(), |p| p.display().to_string()));
        let _ = writeln!(s, "theory = {}", self.theory);
        let _ = writeln!(s, "workers = {}", self.workers);
        let detector = match self.detector {
            DetectorChoice::Fast => "fast",
            DetectorChoice::BruteForce => "brute",
        };
        let _ = writeln!(s, "detector = {detector}");
        let _ = writeln!(s, "cap = {}", self.cap);
        let _ = writeln!(s, "preset = {}", self.preset.as_deref().unwrap_or(""));
        s
    }

    pub fn kind(&self) -> ConstellationKind {
        self.constellation.unwrap_or_else(|| default_kind(self.order))
    }

    /// Checks every field and resolves the scheme configuration.
    pub fn validate(&self) -> Result<SchemeConfig> {
        for (key, v) in [("snr_start", self.snr_start), ("snr_stop", self.snr_stop), ("snr_step", self.snr_step)] {
            if !v.is_finite() {
                return Err(field_err(key, "must be finite"));
            }
        }
        if self.snr_step <= 0.0 {
            return Err(field_err("snr_step", format!("must be positive, got {}", self.snr_step)));
        }
        if self.snr_start > self.snr_stop {
            return Err(field_err(
                "snr_stop",
                format!("empty SNR range: start {} exceeds stop {}", self.snr_start, self.snr_stop),
            ));
        }
        if self.stop.min_bit_errors == 0 {
            return Err(field_err("min_errors", "must be positive"));
        }
        if self.stop.max_bits == 0 {
            return Err(field_err("max_bits", "must be positive"));
        }
        if self.workers == 0 {
            return Err(field_err("workers", "must be at least 1"));
        }
        if self.rx == 0 {
            return Err(field_err("R", "must be at least 1"));
        }
        let cfg = if self.scheme == Scheme::Ssk {
            SchemeConfig::ssk(self.tx, self.rx).map_err(|e| field_err("T", e))?
        } else {
            SchemeConfig::new(self.scheme, self.mirrors, self.order, self.kind(), self.rx)
                .map_err(|e| field_err("scheme", e))?
        };
        Ok(cfg)
    }

    /// `snr_start, snr_start + step, ...` up to `snr_stop` inclusive.
    pub fn snr_points(&self) -> Vec<f64> {
        let n = ((self.snr_stop - self.snr_start) / self.snr_step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.snr_start + i as f64 * self.snr_step).collect()
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            workers: self.workers,
            detector: self.detector,
            theory: self.theory,
            zero_noise: false,
            enumeration_cap: self.cap,
        }
    }
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scheme: String,
    /// Mirrors per antenna, or `log2 T` for SSK.
    pub mirrors: u32,
    pub order: usize,
    pub rx: usize,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    /// Empty for theory-only rows.
    pub ber: Option<f64>,
    pub theory: Option<f64>,
    pub seed: u64,
}

impl CsvRow {
    pub fn from_record(cfg: &SchemeConfig, rec: &BerRecord, seed: u64, simulated: bool) -> Self {
        Self {
            scheme: cfg.scheme().to_string(),
            mirrors: cfg.mirrors(),
            order: cfg.order(),
            rx: cfg.rx(),
            snr_db: rec.snr_db,
            bits: rec.bits,
            errors: rec.errors,
            ber: simulated.then_some(rec.ber),
            theory: rec.theory,
            seed,
        }
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn format_csv(rows: &[CsvRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.mirrors,
            r.order,
            r.rx,
            real(r.snr_db),
            r.bits,
            r.errors,
            opt_real(r.ber),
            opt_real(r.theory),
            r.seed
        );
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
    }
    let opt = |v: &str, line: usize| -> Result<Option<f64>> {
        if v.is_empty() {
            Ok(None)
        } else {
            v.parse()
                .map(Some)
                .map_err(|e| Error::Parse(format!("line {line}: bad real '{v}': {e}")))
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("line {n}: expected 10 fields, got {}", f.len())));
        }
        let int = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|e| Error::Parse(format!("line {n}: bad integer '{v}': {e}")))
        };
        rows.push(CsvRow {
            scheme: f[0].to_string(),
            mirrors: int(f[1])? as u32,
            order: int(f[2])? as usize,
            rx: int(f[3])? as usize,
            snr_db: opt(f[4], n)?.ok_or_else(|| Error::Parse(format!("line {n}: missing snr_db")))?,
            bits: int(f[5])?,
            errors: int(f[6])?,
            ber: opt(f[7], n)?,
            theory: opt(f[8], n)?,
            seed: int(f[9])?,
        });
    }
    Ok(rows)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the Monte Carlo sweep of one spec (no file output).
pub fn simulate_rows(spec: &ExperimentSpec) -> Result<Vec<CsvRow>> {
    let cfg = spec.validate()?;
    let sim = Simulator::new(&cfg, spec.sim_options())?;
    let records = sim.run_sweep(&spec.snr_points(), spec.stop, spec.seed)?;
    Ok(records
        .iter()
        .map(|r| CsvRow::from_record(&cfg, r, spec.seed, true))
        .collect())
}

/// Runs a spec and writes its CSV to `spec.csv` (stdout when unset).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<CsvRow>> {
    let rows = simulate_rows(spec)?;
    write_output(spec.csv.as_deref(), &format_csv(&rows))?;
    Ok(rows)
}

/// Theory-only rows for a spec and the trade-off tables for its `(M, Q, T)`:
/// the fixed-parameter table and the table rate-matched to `eta = M + log2 Q`.
pub fn analysis_rows(spec: &ExperimentSpec) -> Result<(Vec<CsvRow>, String)> {
    let cfg = spec.validate()?;
    let sim = Simulator::new(
        &cfg,
        SimOptions {
            theory: true,
            ..spec.sim_options()
        },
    )?;
    let rows = sim
        .theory_curve(&spec.snr_points())?
        .iter()
        .map(|r| CsvRow::from_record(&cfg, r, spec.seed, false))
        .collect();
    Ok((rows, tables_text(spec.mirrors, spec.order as u64, spec.tx as u64)))
}

fn tables_text(m: u32, q: u64, t: u64) -> String {
    let eta = f64::from(m) + f64::from(q.max(1).trailing_zeros());
    format!(
        "M = {m}, Q = {q}, T = {t}\n{}\nrate-matched, eta = {eta}\n{}",
        format_tradeoff_table(&tradeoff_table(m, q, t)),
        format_tradeoff_table(&rate_matched_table(eta, m, t))
    )
}

/// Runs the analysis of a spec, writing the CSV to `spec.csv` (stdout when
/// unset) and returning the trade-off tables.
pub fn run_analysis(spec: &ExperimentSpec) -> Result<(Vec<CsvRow>, String)> {
    let (rows, table) = analysis_rows(spec)?;
    write_output(spec.csv.as_deref(), &format_csv(&rows))?;
    Ok((rows, table))
}

pub const PRESETS: [&str; 5] = ["fig1", "fig2", "fig4", "fig5", "fig6"];

fn entry(scheme: Scheme, m: u32, q: usize, rx: usize, snr: (f64, f64, f64), theory: bool, name: &str) -> ExperimentSpec {
    ExperimentSpec {
        scheme,
        mirrors: m,
        order: q,
        constellation: None,
        rx,
        snr_start: snr.0,
        snr_stop: snr.1,
        snr_step: snr.2,
        theory,
        preset: Some(name.to_string()),
        ..ExperimentSpec::default()
    }
}

/// Expands a figure preset into its experiment specs.
pub fn preset(name: &str) -> Result<Vec<ExperimentSpec>> {
    let mut out = Vec::new();
    match name {
        "fig1" => {
            for eta in [2u32, 4, 6, 8] {
                out.push(entry(Scheme::ClassicalSimo, 0, 1 << eta, 8, (-6.0, 24.0, 2.0), true, name));
                out.push(entry(Scheme::MbmSimo, eta, 1, 8, (-6.0, 24.0, 2.0), true, name));
            }
        }
        "fig2" => {
            for rx in [1usize, 2, 4, 8] {
                out.push(entry(Scheme::ClassicalSimo, 0, 256, rx, (0.0, 50.0, 2.0), false, name));
                out.push(entry(Scheme::MbmSimo, 8, 1, rx, (0.0, 50.0, 2.0), false, name));
            }
        }
        "fig4" => {
            for rx in [2usize, 4] {
                out.push(entry(Scheme::Stcm1, 4, 2, rx, (0.0, 24.0, 2.0), true, name));
                out.push(entry(Scheme::Stcm2, 4, 8, rx, (0.0, 24.0, 2.0), true, name));
                out.push(entry(Scheme::Stcm3, 4, 2, rx, (0.0, 24.0, 2.0), true, name));
            }
        }
        "fig5" | "fig6" => {
            let eta: u32 = if name == "fig5" { 5 } else { 6 };
            for rx in [2usize, 4] {
                out.push(entry(Scheme::Stcm1, 4, 1 << (eta - 4), rx, (0.0, 26.0, 2.0), false, name));
                out.push(entry(Scheme::Stcm2, 4, 1 << (eta - 2), rx, (0.0, 26.0, 2.0), false, name));
                out.push(entry(Scheme::Stcm3, 4, 1 << (eta - 4), rx, (0.0, 26.0, 2.0), false, name));
                out.push(entry(Scheme::Alamouti, 0, 1 << eta, rx, (0.0, 26.0, 2.0), false, name));
                out.push(entry(Scheme::MbmSimo, 4, 1 << (eta - 4), rx, (0.0, 26.0, 2.0), false, name));
            }
        }
        other => {
            return Err(Error::Config(format!(
                "preset: unknown name '{other}' (known: {})",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(name = "stcm", version, about = "Space-time channel modulation link simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo BER sweep.
    Simulate(SpecArgs),
    /// Theory-only ABEP curve plus trade-off tables.
    Analyze(SpecArgs),
    /// Rate / diversity / complexity trade-off table.
    Table {
        #[arg(short = 'M', long, default_value_t = 4)]
        mirrors: u32,
        #[arg(short = 'Q', long, default_value_t = 2)]
        order: u64,
        /// STBC-SM transmit antennas.
        #[arg(short = 'T', long, default_value_t = 4)]
        tx: u64,
        /// Pick Q per row to reach this rate instead of a common Q.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Runs a figure preset (fig1, fig2, fig4, fig5, fig6).
    Preset {
        name: String,
        /// Print the expanded specs and exit.
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Options shared by every run.
#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub min_errors: Option<u64>,
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// fast or brute.
    #[arg(long)]
    pub detector: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SpecArgs {
    /// key = value spec file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(short = 'M', long)]
    pub mirrors: Option<u32>,
    #[arg(short = 'Q', long)]
    pub order: Option<usize>,
    /// psk, qam or auto.
    #[arg(long)]
    pub constellation: Option<String>,
    #[arg(short = 'R', long)]
    pub rx: Option<usize>,
    #[arg(short = 'T', long)]
    pub tx: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_stop: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_step: Option<f64>,
    /// Attach the ABEP bound.
    #[arg(long)]
    pub theory: bool,
    /// Largest codebook to enumerate.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Extra key=value overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl CommonArgs {
    fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        if let Some(p) = &self.csv {
            spec.csv = Some(p.clone());
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.min_errors {
            spec.stop.min_bit_errors = v;
        }
        if let Some(v) = self.max_bits {
            spec.stop.max_bits = v;
        }
        if let Some(d) = &self.detector {
            spec.set("detector", d)?;
        }
        spec.workers = self.workers.unwrap_or_else(default_workers);
        Ok(())
    }
}

impl SpecArgs {
    /// Builds the spec: defaults, then the config file, then flags.
    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(p) => ExperimentSpec::from_file(p)?,
            None => ExperimentSpec::default(),
        };
        let file_workers = self.config.is_some().then_some(spec.workers);
        if let Some(s) = &self.scheme {
            spec.set("scheme", s)?;
        }
        if let Some(v) = self.mirrors {
            spec.mirrors = v;
        }
        if let Some(v) = self.order {
            spec.order = v;
        }
        if let Some(s) = &self.constellation {
            spec.set("constellation", s)?;
        }
        if let Some(v) = self.rx {
            spec.rx = v;
        }
        if let Some(v) = self.tx {
            spec.tx = v;
        }
        if let Some(v) = self.snr_start {
            spec.snr_start = v;
        }
        if let Some(v) = self.snr_stop {
            spec.snr_stop = v;
        }
        if let Some(v) = self.snr_step {
            spec.snr_step = v;
        }
        if self.theory {
            spec.theory = true;
        }
        if let Some(v) = self.cap {
            spec.cap = v;
        }
        self.common.apply(&mut spec)?;
        if let (Some(w), None) = (file_workers, self.common.workers) {
            spec.workers = w;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            spec.set(k, v)?;
        }
        Ok(spec)
    }
}

/// Runs every spec of a preset and concatenates the rows.
pub fn run_preset(name: &str, common: &CommonArgs) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for mut spec in preset(name)? {
        common.apply(&mut spec)?;
        spec.csv = None;
        let cfg = spec.validate()?;
        eprintln!("{name}: {} M={} Q={} R={}", cfg.scheme(), cfg.mirrors(), cfg.order(), cfg.rx());
        rows.extend(simulate_rows(&spec)?);
    }
    write_output(common.csv.as_deref(), &format_csv(&rows))?;
    Ok(rows)
}

/// Entry point behind `main`; returns the process exit code.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            run_experiment(&args.to_spec()?)?;
        }
        Command::Analyze(args) => {
            let spec = args.to_spec()?;
            let (_, table) = run_analysis(&spec)?;
            if spec.csv.is_some() {
                print!("{table}");
            } else {
                eprint!("{table}");
            }
        }
        Command::Table { mirrors, order, tx, eta } => {
            let table = match eta {
                Some(e) => rate_matched_table(e, mirrors, tx),
                None => tradeoff_table(mirrors, order, tx),
            };
            print!("{}", format_tradeoff_table(&table));
        }
        Command::Preset { name, dry_run, common } => {
            if dry_run {
                for (i, mut spec) in preset(&name)?.into_iter().enumerate() {
                    common.apply(&mut spec)?;
                    println!("# {name} entry {i}\n{}", spec.to_kv());
                }
            } else {
                run_preset(&name, &common)?;
            }
        }
    }
    Ok(())
}
