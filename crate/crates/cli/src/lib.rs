//! Command-line front end: argument parsing, run configuration and report
//! writers (CSV and JSON).
//!
//! Every subcommand writes a single table or report to `--output` (stdout by
//! default). JSON output carries a header with the tool name, version, the
//! parsed configuration and the working precision.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use lagrange_core::checkpoint::{checkpoint, restore};
use lagrange_core::muc::{check_muc_with, MucLimit, MucReport};
use lagrange_core::series::{default_digits, mcshane_partials, partial_sums, sampling_schedule};
use lagrange_core::slope::{dihedral_orbit, farey_markov, holonomy_trace, slopes_in_box};
use lagrange_core::{Emission, MarkovStream, MarkovTriple, PrecisionReal};
use num_bigint::BigUint;
use serde::{Serialize, Serializer};

pub const TOOL: &str = "lagrange";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PRECISION_ENV: &str = "LAGRANGE_PRECISION";

/// Integers longer than this are shortened in CSV cells.
pub const CSV_INT_WIDTH: usize = 60;
/// Cap on significant digits in scientific notation unless `--digits` is set.
pub const DEFAULT_SIG_DIGITS: u32 = 17;

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const COMPUTE: i32 = 2;
    pub const COUNTEREXAMPLE: i32 = 3;
}

pub const ENUMERATE_COLUMNS: [&str; 4] = ["n", "m_n", "triple", "duplicate"];
pub const SUM_COLUMNS: [&str; 6] = ["n", "markov", "partial_sum", "remainder", "zagier_tail", "ratio"];
pub const MCSHANE_COLUMNS: [&str; 3] = ["N", "partial_sum", "gap"];
pub const ORBIT_COLUMNS: [&str; 5] = ["slope", "markov", "trace", "orbit_size", "orbit_representative"];
pub const MUC_COLUMNS: [&str; 6] =
    ["limit", "verified_distinct", "emissions", "largest", "duplicates", "wall_time"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] lagrange_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            _ => exit::COMPUTE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Markov numbers, Lagrange sums and related checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List Markov numbers in tree order with their triples.
    Enumerate(Opts),
    /// Partial sums of 3 - L(m) and the remainder against 4 - phi - sqrt 2.
    Sum(Opts),
    /// Check that every Markov number up to the limit has one triple.
    CheckMuc(Opts),
    /// Partial McShane sums over slopes with |p|, q <= N.
    Mcshane(Opts),
    /// Slopes with |p|, q <= N, their Markov numbers and dihedral orbits.
    Orbits(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("limit").required(true).args(["limit_n", "limit_value"])))]
pub struct Opts {
    /// Number of distinct values (or box height N for mcshane and orbits).
    #[arg(long)]
    pub limit_n: Option<u64>,
    /// Largest Markov number to include.
    #[arg(long)]
    pub limit_value: Option<BigUint>,
    /// Working precision in decimal digits.
    #[arg(long, env = PRECISION_ENV, value_parser = clap::value_parser!(u32).range(2..))]
    pub precision: Option<u32>,
    /// Resume from this file if it exists; write the final state back.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Extra sample points for `sum`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sample: Vec<u64>,
    /// Significant digits in scientific notation.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: Option<u32>,
    /// Report progress on stderr.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Enumerate,
    Sum,
    CheckMuc,
    Mcshane,
    Orbits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Count(u64),
    Value(#[serde(serialize_with = "decimal")] BigUint),
}

/// A validated run: one command, exactly one limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub limit: Limit,
    pub precision: Option<u32>,
    pub checkpoint: Option<PathBuf>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub samples: Vec<u64>,
    pub digits: Option<u32>,
    #[serde(skip)]
    pub progress: bool,
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, o) = match cli.command {
            Command::Enumerate(o) => (CommandKind::Enumerate, o),
            Command::Sum(o) => (CommandKind::Sum, o),
            Command::CheckMuc(o) => (CommandKind::CheckMuc, o),
            Command::Mcshane(o) => (CommandKind::Mcshane, o),
            Command::Orbits(o) => (CommandKind::Orbits, o),
        };
        let limit = match (o.limit_n, o.limit_value) {
            (Some(n), None) => Limit::Count(n),
            (None, Some(b)) => Limit::Value(b),
            _ => return Err(usage("give exactly one of --limit-n and --limit-value")),
        };
        let by_height = matches!(command, CommandKind::Mcshane | CommandKind::Orbits);
        if by_height && matches!(limit, Limit::Value(_)) {
            return Err(usage("mcshane and orbits take a box height via --limit-n"));
        }
        if command == CommandKind::Mcshane && limit == Limit::Count(0) {
            return Err(usage("mcshane needs N >= 1"));
        }
        let resumable = matches!(command, CommandKind::Enumerate | CommandKind::CheckMuc);
        if o.checkpoint.is_some() && !resumable {
            return Err(usage("--checkpoint applies to enumerate and check-muc"));
        }
        if !o.sample.is_empty() && command != CommandKind::Sum {
            return Err(usage("--sample applies to sum"));
        }
        let format = o.format.unwrap_or(match command {
            CommandKind::CheckMuc => Format::Json,
            _ => Format::Csv,
        });
        Ok(RunConfig {
            command,
            limit,
            precision: o.precision,
            checkpoint: o.checkpoint,
            format,
            output: o.output,
            samples: o.sample,
            digits: o.digits,
            progress: o.progress,
        })
    }

    fn sig_digits(&self, precision: u32) -> usize {
        self.digits.unwrap_or(precision.min(DEFAULT_SIG_DIGITS)) as usize
    }
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match RunConfig::from_cli(cli).and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a validated configuration. Returns [`exit::COUNTEREXAMPLE`] when a
/// MUC check finds two triples with the same maximum.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    let mut out = open_output(cfg.output.as_deref())?;
    let code = match cfg.command {
        CommandKind::Enumerate => cmd_enumerate(cfg, &mut out)?,
        CommandKind::Sum => cmd_sum(cfg, &mut out)?,
        CommandKind::CheckMuc => cmd_check_muc(cfg, &mut out)?,
        CommandKind::Mcshane => cmd_mcshane(cfg, &mut out)?,
        CommandKind::Orbits => cmd_orbits(cfg, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

/// Shortens integers wider than [`CSV_INT_WIDTH`] to
/// `head...tail (k digits)`.
pub fn csv_int(s: &str) -> String {
    if s.len() <= CSV_INT_WIDTH {
        return s.to_string();
    }
    format!("{}...{} ({} digits)", &s[..20], &s[s.len() - 10..], s.len())
}

fn csv_triple(t: &MarkovTriple) -> String {
    let [x, y, z] = t.entries().map(|e| csv_int(&e.to_string()));
    format!("({x}, {y}, {z})")
}

fn json_triple(t: &MarkovTriple) -> [String; 3] {
    t.entries().map(|e| e.to_string())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    precision: Option<u32>,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct Rows<R: Serialize> {
    rows: Vec<R>,
}

fn write_json<T: Serialize>(
    out: &mut dyn Write,
    cfg: &RunConfig,
    precision: Option<u32>,
    body: T,
) -> Result<()> {
    let env = Envelope { tool: TOOL, version: VERSION, config: cfg, precision, body };
    serde_json::to_writer_pretty(&mut *out, &env)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads the stream from `path` when it exists, otherwise `fresh`.
fn load_stream(path: Option<&Path>, fresh: impl FnOnce() -> MarkovStream) -> Result<MarkovStream> {
    match path {
        Some(p) if p.exists() => Ok(restore(&fs::read(p)?)?),
        _ => Ok(fresh()),
    }
}

fn save_stream(path: Option<&Path>, stream: &MarkovStream) -> Result<()> {
    let Some(p) = path else { return Ok(()) };
    let tmp = p.with_extension("tmp");
    fs::write(&tmp, checkpoint(stream))?;
    fs::rename(&tmp, p)?;
    Ok(())
}

fn muc_limit(limit: &Limit) -> MucLimit {
    match limit {
        Limit::Count(n) => MucLimit::DistinctCount(*n),
        Limit::Value(b) => MucLimit::MaxValue(b.clone()),
    }
}

fn fresh_for(limit: &Limit) -> MarkovStream {
    match limit {
        Limit::Count(_) => MarkovStream::new(),
        Limit::Value(b) => MarkovStream::with_ceiling(b.clone()),
    }
}

/// Pulls emissions until `limit` is met. Duplicates sharing the last
/// counted value are included.
fn drain(stream: &mut MarkovStream, limit: &Limit, mut f: impl FnMut(Emission)) {
    loop {
        let more = match limit {
            Limit::Count(n) => stream.distinct() < *n || stream.next_is_duplicate(),
            Limit::Value(b) => stream.peek_max().is_some_and(|m| &m <= b),
        };
        if !more {
            break;
        }
        let Some(e) = stream.next_markov() else { break };
        f(e);
    }
}

#[derive(Serialize)]
struct EnumerateRow {
    n: u64,
    m_n: String,
    triple: [String; 3],
    duplicate: bool,
}

fn cmd_enumerate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let path = cfg.checkpoint.as_deref();
    let mut stream = load_stream(path, || fresh_for(&cfg.limit))?;
    let mut rows = Vec::new();
    drain(&mut stream, &cfg.limit, |e| rows.push(e));
    save_stream(path, &stream)?;
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|e| {
                    vec![
                        e.index.to_string(),
                        csv_int(&e.max.to_string()),
                        csv_triple(&e.triple),
                        e.duplicate.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &ENUMERATE_COLUMNS, &rows)?;
        }
        Format::Json => {
            let rows = rows
                .iter()
                .map(|e| EnumerateRow {
                    n: e.index,
                    m_n: e.max.to_string(),
                    triple: json_triple(&e.triple),
                    duplicate: e.duplicate,
                })
                .collect();
            write_json(out, cfg, None, Rows { rows })?;
        }
    }
    Ok(exit::OK)
}

#[derive(Serialize)]
struct SumRow {
    n: u64,
    markov: String,
    partial_sum: String,
    remainder: String,
    zagier_tail: String,
    ratio: String,
}

fn cmd_sum(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let n = match &cfg.limit {
        Limit::Count(n) => *n,
        Limit::Value(b) => MarkovStream::with_ceiling(b.clone())
            .filter(|e| !e.duplicate)
            .count() as u64,
    };
    let digits = cfg.precision.unwrap_or_else(|| default_digits(n));
    let sig = cfg.sig_digits(digits);
    let schedule = sampling_schedule(n, &cfg.samples);
    let reports = partial_sums(&mut MarkovStream::new(), digits, &schedule)?;
    let rows: Vec<SumRow> = reports
        .iter()
        .map(|r| SumRow {
            n: r.n,
            markov: r.markov.to_string(),
            partial_sum: r.partial_sum.to_sci(sig),
            remainder: r.remainder.to_sci(sig),
            zagier_tail: r.zagier_tail.to_sci(sig),
            ratio: r.ratio.to_sci(sig),
        })
        .collect();
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .into_iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        csv_int(&r.markov),
                        r.partial_sum,
                        r.remainder,
                        r.zagier_tail,
                        r.ratio,
                    ]
                })
                .collect();
            write_csv(out, &SUM_COLUMNS, &rows)?;
        }
        Format::Json => write_json(out, cfg, Some(digits), Rows { rows })?,
    }
    Ok(exit::OK)
}

pub fn muc_exit_code(report: &MucReport) -> i32 {
    if report.holds() {
        exit::OK
    } else {
        exit::COUNTEREXAMPLE
    }
}

#[derive(Serialize)]
struct ReportBody<R: Serialize> {
    report: R,
}

fn cmd_check_muc(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let path = cfg.checkpoint.as_deref();
    let mut stream = load_stream(path, || fresh_for(&cfg.limit))?;
    let report = check_muc_with(&mut stream, muc_limit(&cfg.limit), |e| {
        if cfg.progress {
            eprintln!("checked {} triples, m has {} digits", e.position, e.max.to_string().len());
        }
    });
    save_stream(path, &stream)?;
    match cfg.format {
        Format::Json => write_json(out, cfg, None, ReportBody { report: &report })?,
        Format::Csv => {
            let limit = match &report.limit {
                MucLimit::MaxValue(b) => format!("max_value={}", csv_int(&b.to_string())),
                MucLimit::DistinctCount(n) => format!("distinct_count={n}"),
            };
            let row = vec![
                limit,
                report.verified_distinct.to_string(),
                report.emissions.to_string(),
                report.largest.as_ref().map(|m| csv_int(&m.to_string())).unwrap_or_default(),
                report.duplicates.len().to_string(),
                format!("{:.3}", report.wall_time),
            ];
            write_csv(out, &MUC_COLUMNS, &[row])?;
        }
    }
    for d in &report.duplicates {
        eprintln!("COUNTEREXAMPLE: {} is the maximum of {} and {}", d.max, d.first, d.second);
    }
    Ok(muc_exit_code(&report))
}

#[derive(Serialize)]
struct McshaneRow {
    #[serde(rename = "N")]
    n: u64,
    partial_sum: String,
    gap: String,
}

/// Default digits for an `N`-box McShane table: the gap shrinks by roughly
/// one decimal digit per unit of `N`.
pub fn mcshane_default_digits(height: u64) -> u32 {
    (height as u32).saturating_add(40)
}

fn cmd_mcshane(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let Limit::Count(height) = cfg.limit else {
        return Err(usage("mcshane takes --limit-n"));
    };
    let digits = cfg.precision.unwrap_or_else(|| mcshane_default_digits(height));
    let sig = cfg.sig_digits(digits);
    let half = PrecisionReal::parse("0.5", digits)?;
    let rows: Vec<McshaneRow> = mcshane_partials(height, digits)?
        .into_iter()
        .map(|(n, s)| McshaneRow {
            n,
            partial_sum: s.to_sci(sig),
            gap: (&half - &s).to_sci(sig),
        })
        .collect();
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .into_iter()
                .map(|r| vec![r.n.to_string(), r.partial_sum, r.gap])
                .collect();
            write_csv(out, &MCSHANE_COLUMNS, &rows)?;
        }
        Format::Json => write_json(out, cfg, Some(digits), Rows { rows })?,
    }
    Ok(exit::OK)
}

#[derive(Serialize)]
struct OrbitRow {
    slope: String,
    markov: String,
    trace: String,
    orbit_size: usize,
    orbit_representative: String,
}

fn cmd_orbits(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let Limit::Count(height) = cfg.limit else {
        return Err(usage("orbits takes --limit-n"));
    };
    let rows: Vec<OrbitRow> = slopes_in_box(height)
        .iter()
        .map(|s| {
            let orbit = dihedral_orbit(s);
            OrbitRow {
                slope: s.to_string(),
                markov: farey_markov(s).to_string(),
                trace: holonomy_trace(s).to_string(),
                orbit_size: orbit.len(),
                orbit_representative: orbit.first().expect("orbit contains s").to_string(),
            }
        })
        .collect();
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .into_iter()
                .map(|r| {
                    vec![
                        r.slope,
                        csv_int(&r.markov),
                        csv_int(&r.trace),
                        r.orbit_size.to_string(),
                        r.orbit_representative,
                    ]
                })
                .collect();
            write_csv(out, &ORBIT_COLUMNS, &rows)?;
        }
        Format::Json => write_json(out, cfg, None, Rows { rows })?,
    }
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("lagrange").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        RunConfig::from_cli(cli)
    }

    #[test]
    fn csv_int_truncates_past_sixty_digits() {
        let short = "9".repeat(60);
        assert_eq!(csv_int(&short), short);
        let long = format!("1{}", "0".repeat(99));
        assert_eq!(csv_int(&long), "10000000000000000000...0000000000 (100 digits)");
    }

    #[test]
    fn exactly_one_limit() {
        assert!(cfg(&["enumerate"]).is_err());
        assert!(cfg(&["enumerate", "--limit-n", "3", "--limit-value", "5"]).is_err());
        let c = cfg(&["enumerate", "--limit-value", "5"]).unwrap();
        assert_eq!(c.limit, Limit::Value(5u32.into()));
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn command_specific_validation() {
        assert!(cfg(&["orbits", "--limit-value", "5"]).is_err());
        assert!(cfg(&["mcshane", "--limit-n", "0"]).is_err());
        assert!(cfg(&["sum", "--limit-n", "5", "--checkpoint", "x"]).is_err());
        assert!(cfg(&["enumerate", "--limit-n", "5", "--sample", "3"]).is_err());
        assert!(cfg(&["sum", "--limit-n", "5", "--precision", "1"]).is_err());
        assert_eq!(cfg(&["check-muc", "--limit-n", "5"]).unwrap().format, Format::Json);
        let c = cfg(&["sum", "--limit-n", "50", "--sample", "3,7", "--sample", "11"]).unwrap();
        assert_eq!(c.samples, [3, 7, 11]);
    }

    #[test]
    fn sig_digits_default_is_capped() {
        let c = cfg(&["sum", "--limit-n", "5"]).unwrap();
        assert_eq!(c.sig_digits(507), 17);
        assert_eq!(c.sig_digits(10), 10);
        let c = cfg(&["sum", "--limit-n", "5", "--digits", "30"]).unwrap();
        assert_eq!(c.sig_digits(507), 30);
    }

    #[test]
    fn counterexample_has_its_own_exit_code() {
        use lagrange_core::muc::{check_muc, DuplicateWitness};
        let mut report = check_muc(MucLimit::MaxValue(1_000u32.into()));
        assert_eq!(muc_exit_code(&report), exit::OK);
        let t = MarkovTriple::from_u64(1, 5, 13).unwrap();
        report.duplicates.push(DuplicateWitness {
            max: 13u32.into(),
            first: t.clone(),
            second: t,
        });
        assert_eq!(muc_exit_code(&report), exit::COUNTEREXAMPLE);
    }

    #[test]
    fn drain_counts_distinct_values() {
        let mut s = MarkovStream::new();
        let mut got = Vec::new();
        drain(&mut s, &Limit::Count(4), |e| got.push(e.max.to_string()));
        assert_eq!(got, ["1", "2", "5", "13"]);
        let mut s = fresh_for(&Limit::Value(34u32.into()));
        let mut n = 0;
        drain(&mut s, &Limit::Value(34u32.into()), |_| n += 1);
        assert_eq!(n, 6);
    }
}
