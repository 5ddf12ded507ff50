//! Command-line front end: coefficient tables, constants reports, oracle
//! censuses, the series-versus-oracle verify harness and condition checks.
//!
//! [`execute`] runs a command in-process and returns the exit code together
//! with the text that would go to stdout and stderr.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{build_model, counting_series, pointed_series, Family, Structure};
use crate::oracle::{class_census, size_limit, CountTable, Level};
use crate::singularity::{check_conditions, constants, ConditionsReport, ConstantsReport};
use crate::systems::bits_for_digits;

pub const MAX_ORDER: usize = 200;
pub const MIN_PRECISION: u32 = 30;

pub mod exit {
    pub const OK: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "subcritical", version, about = "Maximal independent sets and maximal matchings in subcritical graph classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficients n! [x^n] G with the joint size distribution.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Branch point, growth and mean constants.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Decimal digits.
        #[arg(long, default_value_t = 40)]
        precision: u32,
    },
    /// Brute-force census over all labelled graphs with n <= max-n.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = LevelArg::All)]
        level: LevelArg,
    },
    /// Compare the series against the oracle for n <= max-n.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Evaluate the analytic conditions on the block functions.
    CheckConditions {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Omit to run every family.
    #[arg(long)]
    pub family: Option<Family>,
    /// Omit to run both structures.
    #[arg(long)]
    pub structure: Option<Structure>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    All,
    Connected,
    TwoConnected,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::All => Level::All,
            LevelArg::Connected => Level::Connected,
            LevelArg::TwoConnected => Level::TwoConnected,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => exit::INVALID,
            CliError::Numeric(_) => exit::NUMERIC,
        }
    }
}

/// One row of a coefficient table. Counts are decimal integer strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub n: usize,
    pub total: String,
    /// Indexed by size: vertices for MIS, edges for matchings.
    pub sizes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub family: Family,
    pub structure: Structure,
    pub order: usize,
    pub rows: Vec<SeriesRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub n: usize,
    pub total: String,
    pub sizes: Vec<String>,
    pub c_triples: Vec<String>,
    pub b_triples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: Family,
    pub structure: Structure,
    pub max_n: usize,
    pub agree: bool,
    /// Series-side values; every one was compared against the oracle.
    pub rows: Vec<VerifyRow>,
    pub mismatches: Vec<String>,
}

/// Result of an in-process run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn models(common: &Common) -> Vec<(Family, Structure)> {
    let fams: Vec<Family> = common.family.map_or(Family::ALL.to_vec(), |f| vec![f]);
    let structs: Vec<Structure> = common.structure.map_or(Structure::ALL.to_vec(), |s| vec![s]);
    fams.iter().flat_map(|&f| structs.iter().map(move |&s| (f, s))).collect()
}

/// Pretty JSON with a trailing newline; re-serialising a parsed file gives
/// the same bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn csv_rows(rows: &[(Family, Structure, usize, String, String)]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "structure", "n", "size", "count"]).map_err(csv_io)?;
    for (f, s, n, size, count) in rows {
        w.write_record([f.name(), s.name(), &n.to_string(), size, count]).map_err(csv_io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn json_only(common: &Common, command: &str) -> Result<(), CliError> {
    if common.format == Format::Csv {
        return Err(CliError::Invalid(format!("{command} supports --format json only")));
    }
    Ok(())
}

pub fn series_table(family: Family, structure: Structure, order: usize) -> Result<SeriesTable, CliError> {
    let model = build_model(family, structure, bits_for_digits(MIN_PRECISION));
    let counts = counting_series(&model, order).map_err(|e| CliError::Numeric(e.to_string()))?;
    let rows = (0..=order)
        .map(|n| SeriesRow {
            n,
            total: counts.totals[n].to_string(),
            sizes: counts.joint[n].iter().map(|v| v.to_string()).collect(),
        })
        .collect();
    Ok(SeriesTable { family, structure, order, rows })
}

fn cmd_series(common: &Common, order: usize) -> Result<(String, i32), CliError> {
    if order > MAX_ORDER {
        return Err(CliError::Invalid(format!("--order {order} exceeds {MAX_ORDER}")));
    }
    let tables = models(common)
        .into_iter()
        .map(|(f, s)| series_table(f, s, order))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match common.format {
        Format::Json => to_json(&tables),
        Format::Csv => {
            let mut rows = Vec::new();
            for t in &tables {
                for r in &t.rows {
                    rows.push((t.family, t.structure, r.n, "total".to_string(), r.total.clone()));
                    for (k, c) in r.sizes.iter().enumerate() {
                        rows.push((t.family, t.structure, r.n, k.to_string(), c.clone()));
                    }
                }
            }
            csv_rows(&rows)?
        }
    };
    Ok((text, exit::OK))
}

fn cmd_constants(common: &Common, precision: u32) -> Result<(String, i32), CliError> {
    json_only(common, "constants")?;
    if precision < MIN_PRECISION {
        return Err(CliError::Invalid(format!("--precision must be at least {MIN_PRECISION}")));
    }
    let reports = models(common)
        .into_iter()
        .map(|(f, s)| {
            constants(f, s, precision)
                .map(|c| c.report())
                .map_err(|e| CliError::Numeric(format!("{f} {s}: {e}")))
        })
        .collect::<Result<Vec<ConstantsReport>, _>>()?;
    Ok((to_json(&reports), exit::OK))
}

fn check_limit(family: Family, max_n: usize) -> Result<(), CliError> {
    let limit = size_limit(family);
    if max_n > limit {
        return Err(CliError::Invalid(format!("--max-n {max_n} exceeds the {family} oracle limit {limit}")));
    }
    Ok(())
}

fn cmd_oracle(common: &Common, max_n: usize, level: Level) -> Result<(String, i32), CliError> {
    let selected = models(common);
    for &(f, _) in &selected {
        check_limit(f, max_n)?;
    }
    let mut tables: Vec<CountTable> = Vec::new();
    for (f, s) in selected {
        for n in 1..=max_n {
            tables.push(class_census(f, s, n, level).map_err(|e| CliError::Invalid(e.to_string()))?);
        }
    }
    let text = match common.format {
        Format::Json => to_json(&tables),
        Format::Csv => {
            let mut rows = Vec::new();
            for t in &tables {
                rows.push((t.family, t.structure, t.n, "total".to_string(), t.total.to_string()));
                for (k, c) in t.sizes.iter().enumerate() {
                    rows.push((t.family, t.structure, t.n, k.to_string(), c.to_string()));
                }
            }
            csv_rows(&rows)?
        }
    };
    Ok((text, exit::OK))
}

/// Run both pipelines for one model and compare every quantity.
pub fn verify(family: Family, structure: Structure, max_n: usize) -> Result<VerifyReport, CliError> {
    check_limit(family, max_n)?;
    let model = build_model(family, structure, bits_for_digits(MIN_PRECISION));
    let numeric = |e: crate::systems::SystemError| CliError::Numeric(e.to_string());
    let counts = counting_series(&model, max_n).map_err(numeric)?;
    let pointed = pointed_series(&model, max_n.saturating_sub(1)).map_err(numeric)?;
    let census = |n, level| class_census(family, structure, n, level).map_err(|e| CliError::Invalid(e.to_string()));
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for n in 1..=max_n {
        let all = census(n, Level::All)?;
        let total = counts.totals[n].to_string();
        let sizes: Vec<String> = counts.joint[n].iter().map(|v| v.to_string()).collect();
        if total != all.total.to_string() {
            mismatches.push(format!("n = {n}: total series {total} oracle {}", all.total));
        }
        let oracle_sizes: Vec<String> = all.sizes.iter().map(|v| v.to_string()).collect();
        if sizes != oracle_sizes {
            mismatches.push(format!("n = {n}: sizes series {sizes:?} oracle {oracle_sizes:?}"));
        }
        let connected = census(n, Level::Connected)?;
        let blocks = census(n, Level::TwoConnected)?;
        let mut c_triples = Vec::new();
        let mut b_triples = Vec::new();
        for i in 0..3 {
            let c = pointed.c_triples(i)[n].to_string();
            let b = pointed.b_triples(i)[n].to_string();
            if c != connected.triples[i].to_string() {
                mismatches.push(format!("n = {n}: C_{i} triples series {c} oracle {}", connected.triples[i]));
            }
            if b != blocks.triples[i].to_string() {
                mismatches.push(format!("n = {n}: B_{i} triples series {b} oracle {}", blocks.triples[i]));
            }
            c_triples.push(c);
            b_triples.push(b);
        }
        rows.push(VerifyRow { n, total, sizes, c_triples, b_triples });
    }
    Ok(VerifyReport { family, structure, max_n, agree: mismatches.is_empty(), rows, mismatches })
}

fn cmd_verify(common: &Common, max_n: usize, stderr: &mut String) -> Result<(String, i32), CliError> {
    json_only(common, "verify")?;
    let selected = models(common);
    for &(f, _) in &selected {
        check_limit(f, max_n)?;
    }
    let reports = selected
        .into_iter()
        .map(|(f, s)| verify(f, s, max_n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut code = exit::OK;
    for r in &reports {
        for m in &r.mismatches {
            stderr.push_str(&format!("{} {}: {m}\n", r.family, r.structure));
            code = exit::MISMATCH;
        }
    }
    Ok((to_json(&reports), code))
}

fn cmd_conditions(common: &Common, stderr: &mut String) -> Result<(String, i32), CliError> {
    json_only(common, "check-conditions")?;
    let reports: Vec<ConditionsReport> = models(common).into_iter().map(|(f, s)| check_conditions(f, s)).collect();
    let mut code = exit::OK;
    for r in &reports {
        if !r.all_pass() {
            stderr.push_str(&format!("{} {}: condition failed\n", r.family, r.structure));
            code = exit::MISMATCH;
        }
    }
    Ok((to_json(&reports), code))
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Series { common, .. }
        | Command::Constants { common, .. }
        | Command::Oracle { common, .. }
        | Command::Verify { common, .. }
        | Command::CheckConditions { common } => common,
    }
}

fn dispatch(cli: &Cli, stderr: &mut String) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Series { common, order } => cmd_series(common, *order),
        Command::Constants { common, precision } => cmd_constants(common, *precision),
        Command::Oracle { common, max_n, level } => cmd_oracle(common, *max_n, (*level).into()),
        Command::Verify { common, max_n } => cmd_verify(common, *max_n, stderr),
        Command::CheckConditions { common } => cmd_conditions(common, stderr),
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INVALID } else { exit::OK };
            let text = e.render().to_string();
            return if code == exit::OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let mut stderr = String::new();
    let c = common(&cli.command);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = c.threads {
        if t == 0 {
            return Outcome { code: exit::INVALID, stdout: String::new(), stderr: "--threads must be positive\n".into() };
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome { code: exit::INVALID, stdout: String::new(), stderr: format!("{e}\n") },
    };
    let result = pool.install(|| dispatch(cli, &mut stderr));
    let (text, code) = match result {
        Ok(v) => v,
        Err(e) => {
            stderr.push_str(&format!("{e}\n"));
            return Outcome { code: e.code(), stdout: String::new(), stderr };
        }
    };
    match &c.out {
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => {
                stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
                Outcome { code: exit::INVALID, stdout: String::new(), stderr }
            }
        },
        None => Outcome { code, stdout: text, stderr },
    }
}
