//! The `paircorr` command line: sequence generation, single evaluations,
//! s-sweeps to CSV, the engine cross-check and the timing harness.
//!
//! Exit codes: 0 ok, 1 I/O, 2 usage, 3 domain, 4 verification mismatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use paircorr::analysis::{time_engine, CorrelationRecord, Engine, RecordStatus};
use paircorr::{
    f_closed_form, pair_count_naive, pair_count_sorted, poisson_reference, sweep, sweep_points, vdc_prefix, PointSet,
    Rational,
};
use rayon::prelude::*;

/// Significant digits of every decimal column.
pub const DECIMAL_DIGITS: usize = 12;

/// Largest N the naive engine accepts without `--force`.
pub const NAIVE_LIMIT: u64 = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("line {line}: {message}")]
    PointsFile { line: usize, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::PointsFile { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn domain(e: paircorr::Error) -> CliError {
    match e {
        paircorr::Error::OutsideValidatedDomain { n, s } => CliError::Domain(format!(
            "s outside validated closed-form domain: s = {s} but N/2 = {}; use --engine sorted or naive",
            Rational::new(n, 2u64).expect("nonzero")
        )),
        other => CliError::Domain(other.to_string()),
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "paircorr",
    version,
    about = "Exact pair correlation statistics of the van der Corput sequence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the first N points of the van der Corput sequence, one "p/q" per line.
    Gen(GenArgs),
    /// Evaluate F_N(s) once and print a CSV record.
    Eval(EvalArgs),
    /// Evaluate F_N(s) over an evenly spaced s grid.
    Sweep(SweepArgs),
    /// Cross-check the closed form against both pair-counting engines.
    Verify(VerifyArgs),
    /// Time the engines; reports the median of the timed runs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub base: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Number of points; defaults to the length of --points.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    #[arg(long)]
    pub s: Rational,
    #[arg(long, default_value = "closed")]
    pub engine: Engine,
    /// Evaluate on the points in this file instead of the sequence.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Allow the naive engine above N = 100000.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    #[arg(long = "s-from")]
    pub s_from: Rational,
    #[arg(long = "s-to")]
    pub s_to: Rational,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long, default_value = "closed")]
    pub engine: Engine,
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "n-max", value_parser = clap::value_parser!(u64).range(2..))]
    pub n_max: u64,
    /// The s grid is {j / density : s < N/2}.
    #[arg(long = "s-grid-density", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub density: u64,
    /// Largest N also checked with the naive engine.
    #[arg(long = "naive-max", default_value_t = 64)]
    pub naive_max: u64,
    /// Corrupt one closed-form value to exercise the mismatch path.
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated list of N.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    #[arg(long)]
    pub s: Rational,
    #[arg(long, value_delimiter = ',', default_value = "closed")]
    pub engines: Vec<Engine>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Gen(a) => with_output(a.out.as_deref(), stdout, |w| cmd_gen(a, w)),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Sweep(a) => with_output(a.out.as_deref(), stdout, |w| cmd_sweep(a, w)),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Bench(a) => with_output(a.out.as_deref(), stdout, |w| cmd_bench(a, w)),
    }
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, body: F) -> CliResult<i32>
where
    F: FnOnce(&mut dyn Write) -> CliResult<i32>,
{
    match path {
        Some(p) => {
            let mut file = BufWriter::new(File::create(p)?);
            let code = body(&mut file)?;
            file.flush()?;
            Ok(code)
        }
        None => body(stdout),
    }
}

fn csv_writer(w: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn usize_n(n: u64) -> CliResult<usize> {
    usize::try_from(n).map_err(|_| CliError::Usage(format!("N = {n} does not fit in memory on this platform")))
}

fn check_naive_size(engine: Engine, n: u64, force: bool) -> CliResult<()> {
    if engine == Engine::Naive && n > NAIVE_LIMIT && !force {
        return Err(CliError::Usage(format!(
            "naive engine refused for N = {n} > {NAIVE_LIMIT} (quadratic running time); pass --force to override"
        )));
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<i32> {
    let pts = vdc_prefix(usize_n(args.n)?, args.base).map_err(domain)?;
    for p in &pts {
        writeln!(out, "{p}")?;
    }
    Ok(0)
}

/// Reads one value per line (`p/q` or an exact decimal), skipping blank lines
/// and `#` comments, and reduces each mod 1.
pub fn ingest_points(path: &Path) -> CliResult<PointSet> {
    let file = File::open(path)?;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let value: Rational = text
            .parse()
            .map_err(|e: paircorr::ParseRationalError| CliError::PointsFile {
                line: i + 1,
                message: e.to_string(),
            })?;
        values.push(value);
    }
    Ok(PointSet::from_reduced(values))
}

/// Resolves the point set for oracle engines: a file prefix, or the base-2 sequence.
fn oracle_points(n: Option<u64>, points: Option<&Path>) -> CliResult<(u64, Option<PointSet>)> {
    match points {
        Some(path) => {
            let all = ingest_points(path)?;
            if all.is_empty() {
                return Err(CliError::Usage(format!("{} contains no points", path.display())));
            }
            let n = n.unwrap_or(all.len() as u64);
            if n > all.len() as u64 {
                return Err(CliError::Usage(format!(
                    "--n {n} exceeds the {} points in {}",
                    all.len(),
                    path.display()
                )));
            }
            Ok((n, Some(all.prefix(n as usize))))
        }
        None => {
            let n = n.ok_or_else(|| CliError::Usage("--n is required unless --points is given".into()))?;
            Ok((n, None))
        }
    }
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.points.is_some() && args.engine == Engine::ClosedForm {
        return Err(CliError::Usage("--points requires --engine sorted or naive".into()));
    }
    let (n, file_points) = oracle_points(args.n, args.points.as_deref())?;
    check_naive_size(args.engine, n, args.force)?;
    let poisson = poisson_reference(&args.s).map_err(domain)?;

    let points = match (&file_points, args.engine) {
        (Some(p), _) => Some(p.clone()),
        (None, Engine::ClosedForm) => None,
        (None, _) => Some(vdc_prefix(usize_n(n)?, 2).map_err(domain)?),
    };
    let start = Instant::now();
    let f = match (args.engine, &points) {
        (Engine::ClosedForm, _) => f_closed_form(n, &args.s),
        (Engine::Sorted, Some(p)) => pair_count_sorted(p, &args.s).map(|r| r.f_value),
        (Engine::Naive, Some(p)) => pair_count_naive(p, &args.s).map(|r| r.f_value),
        (_, None) => unreachable!("oracle engines always have points"),
    }
    .map_err(domain)?;
    let elapsed = start.elapsed().as_nanos();

    let mut w = csv_writer(out);
    w.write_record([
        "n",
        "s",
        "f_exact",
        "f_decimal",
        "poisson_decimal",
        "engine",
        "elapsed_nanos",
    ])?;
    w.write_record([
        n.to_string(),
        args.s.to_string(),
        f.to_string(),
        f.to_decimal(DECIMAL_DIGITS),
        poisson.to_decimal(DECIMAL_DIGITS),
        args.engine.to_string(),
        elapsed.to_string(),
    ])?;
    w.flush()?;
    Ok(0)
}

/// `s_from + j·(s_to − s_from)/steps` for `j = 0..=steps`.
pub fn s_grid(from: &Rational, to: &Rational, steps: u64) -> Vec<Rational> {
    let width = to - from;
    (0..=steps)
        .map(|j| from + &(&width * &Rational::new(j, steps).expect("steps >= 1")))
        .collect()
}

pub const SWEEP_HEADER: [&str; 8] = [
    "n",
    "s",
    "f_exact",
    "f_decimal",
    "poisson",
    "engine",
    "status",
    "elapsed_nanos",
];

fn write_sweep_row(w: &mut csv::Writer<&mut dyn Write>, r: &CorrelationRecord) -> CliResult<()> {
    let (exact, decimal) = match &r.f {
        Some(f) => (f.to_string(), f.to_decimal(DECIMAL_DIGITS)),
        None => (String::new(), String::new()),
    };
    w.write_record([
        r.n.to_string(),
        r.s.to_string(),
        exact,
        decimal,
        r.poisson.to_decimal(DECIMAL_DIGITS),
        r.engine.to_string(),
        r.status.name().to_string(),
        r.elapsed_nanos.to_string(),
    ])?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.s_from > args.s_to {
        return Err(CliError::Usage(format!(
            "--s-from {} exceeds --s-to {}",
            args.s_from, args.s_to
        )));
    }
    if args.s_from.is_negative() {
        return Err(CliError::Domain(format!("s must be nonnegative, got {}", args.s_from)));
    }
    if args.points.is_some() && args.engine == Engine::ClosedForm {
        return Err(CliError::Usage("--points requires --engine sorted or naive".into()));
    }
    let (n, file_points) = oracle_points(args.n, args.points.as_deref())?;
    check_naive_size(args.engine, n, args.force)?;
    let grid = s_grid(&args.s_from, &args.s_to, args.steps);
    let records = match file_points {
        Some(p) => sweep_points(&p, &grid, args.engine),
        None => sweep(n, &grid, args.engine).map_err(domain)?,
    };

    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in &records {
        write_sweep_row(&mut w, r)?;
    }
    w.flush()?;
    let any_ok = records.iter().any(|r| r.status == RecordStatus::Ok);
    Ok(if any_ok { 0 } else { 3 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub n: u64,
    pub s: Rational,
    pub closed: Rational,
    pub other_engine: Engine,
    pub other: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: u64,
    pub first_mismatch: Option<Counterexample>,
}

/// Compares the closed form with the sorted engine for every `N <= n_max` and
/// every grid `s < N/2`, and with the naive engine as well while `N <= naive_max`.
pub fn verify_engines(n_max: u64, density: u64, naive_max: u64, inject_fault: bool) -> paircorr::Result<VerifyReport> {
    let per_n: Vec<paircorr::Result<(u64, Option<Counterexample>)>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let pts = vdc_prefix(n as usize, 2)?;
            let mut checks = 0;
            // j/density < n/2  <=>  2j < n·density
            for j in 0..(n * density).div_ceil(2) {
                let s = Rational::new(j, density).expect("density >= 1");
                let mut closed = f_closed_form(n, &s)?;
                if inject_fault && n == n_max && j == 1 {
                    closed = &closed + &Rational::new(1u64, n).expect("n >= 1");
                }
                let sorted = pair_count_sorted(&pts, &s)?.f_value;
                checks += 1;
                if sorted != closed {
                    let c = Counterexample {
                        n,
                        s,
                        closed,
                        other_engine: Engine::Sorted,
                        other: sorted,
                    };
                    return Ok((checks, Some(c)));
                }
                if n <= naive_max {
                    let naive = pair_count_naive(&pts, &s)?.f_value;
                    checks += 1;
                    if naive != closed {
                        let c = Counterexample {
                            n,
                            s,
                            closed,
                            other_engine: Engine::Naive,
                            other: naive,
                        };
                        return Ok((checks, Some(c)));
                    }
                }
            }
            Ok((checks, None))
        })
        .collect();
    let mut report = VerifyReport {
        checks: 0,
        first_mismatch: None,
    };
    for item in per_n {
        let (checks, mismatch) = item?;
        report.checks += checks;
        if report.first_mismatch.is_none() {
            report.first_mismatch = mismatch;
        }
    }
    Ok(report)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let report = verify_engines(args.n_max, args.density, args.naive_max, args.inject_fault).map_err(domain)?;
    match report.first_mismatch {
        None => {
            writeln!(
                out,
                "ok: {} checks passed (N = 1..={}, s in (1/{})Z with s < N/2, naive engine up to N = {})",
                report.checks,
                args.n_max,
                args.density,
                args.naive_max.min(args.n_max)
            )?;
            Ok(0)
        }
        Some(c) => {
            writeln!(out, "{} checks run before the first mismatch", report.checks)?;
            Err(CliError::Mismatch(format!(
                "mismatch at N = {}, s = {}: closed = {}, {} = {}",
                c.n, c.s, c.closed, c.other_engine, c.other
            )))
        }
    }
}

pub const BENCH_HEADER: [&str; 5] = ["engine", "n", "s", "elapsed_nanos", "f_decimal"];

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.s.is_negative() {
        return Err(CliError::Domain(format!("s must be nonnegative, got {}", args.s)));
    }
    for &engine in &args.engines {
        for &n in &args.n {
            check_naive_size(engine, n, args.force)?;
        }
    }
    let mut w = csv_writer(out);
    w.write_record(BENCH_HEADER)?;
    for &engine in &args.engines {
        for &n in &args.n {
            let t = time_engine(engine, n, &args.s, args.runs as usize).map_err(domain)?;
            w.write_record([
                engine.to_string(),
                n.to_string(),
                args.s.to_string(),
                t.median_nanos.to_string(),
                t.f.to_decimal(DECIMAL_DIGITS),
            ])?;
            w.flush()?;
        }
    }
    Ok(0)
}
