//! Command-line front end for mptk.

pub mod mtx;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mptk::bounds::{BoundId, BoundReport};
use mptk::harness::{run_suite, run_suite_sequential, SuiteConfig, SuiteReport};
use mptk::homotopy::{
    gap_profile_eig, gap_profile_svd, track_eig_path, track_svd_path, BlockPartition,
    TrackOptions,
};
use mptk::matcore::ComplexMatrix;
use mptk::pipeline::{verify_eig, verify_svd, GridSummary, VerifyOptions};
use serde::Serialize;
use thiserror::Error;

use mtx::MtxError;
use report::{InputDigest, PathDump, ReportDocument, Summary, SCHEMA, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of suite worker threads.
pub const THREADS_ENV: &str = "MPTK_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mptk::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(name = "mptk", version, about = "Combined eigen/singular perturbation bound verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Track A + tΔA and evaluate every Hermitian bound.
    EigVerify(EigArgs),
    /// Track B + tΔB and evaluate every SVD bound.
    SvdVerify(SvdArgs),
    /// Track a path and dump its samples.
    Track(TrackArgs),
    /// Run a randomized verification suite.
    Suite(SuiteArgs),
    /// Tabulate combined vs classical slack over a sweep of perturbation scales.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Uniform grid points on [0, 1].
    #[arg(long, default_value_t = mptk::homotopy::DEFAULT_GRID_POINTS)]
    grid: usize,
    /// Disable midpoint insertion around gap dips.
    #[arg(long)]
    no_adaptive: bool,
}

impl GridArgs {
    fn options(&self) -> TrackOptions {
        TrackOptions {
            grid_points: self.grid,
            adaptive: !self.no_adaptive,
        }
    }
}

#[derive(Debug, Args)]
struct EigArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    da: PathBuf,
    /// Block sizes, e.g. 2,1,3.
    #[arg(long)]
    partition: BlockPartition,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluate the single-block bounds for this block only (1-based).
    #[arg(long)]
    target_block: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SvdArgs {
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    db: PathBuf,
    /// Block sizes, e.g. 2,1,3.
    #[arg(long)]
    partition: BlockPartition,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    target_block: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Hermitian base matrix.
    #[arg(long, requires = "da", required_unless_present = "b", conflicts_with_all = ["b", "db"])]
    a: Option<PathBuf>,
    /// Hermitian perturbation direction.
    #[arg(long, requires = "a")]
    da: Option<PathBuf>,
    /// General base matrix.
    #[arg(long, requires = "db", conflicts_with = "da")]
    b: Option<PathBuf>,
    /// General perturbation direction.
    #[arg(long, requires = "b")]
    db: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrackArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Block sizes, e.g. 2,1,3.
    #[arg(long)]
    partition: BlockPartition,
    #[command(flatten)]
    grid: GridArgs,
    /// File receiving the path samples as JSON.
    #[arg(long)]
    dump_path: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// JSON suite configuration; omitted fields take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Run trials on the calling thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Block sizes, e.g. 2,1,3.
    #[arg(long)]
    partition: BlockPartition,
    #[command(flatten)]
    grid: GridArgs,
    /// Factors applied to the perturbation.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    scales: Vec<f64>,
    /// CSV destination instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("mptk: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> Result<bool, CliError> {
    match command {
        Command::EigVerify(args) => eig_verify(args),
        Command::SvdVerify(args) => svd_verify(args),
        Command::Track(args) => track(args),
        Command::Suite(args) => suite(args),
        Command::Compare(args) => compare(args),
    }
}

fn load(path: &Path, name: &str, inputs: &mut BTreeMap<String, InputDigest>) -> Result<ComplexMatrix, CliError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8 text", path.display())))?;
    let m = mtx::parse_matrix_str(&text).map_err(|e| match e {
        MtxError::Parse { line, message } => {
            CliError::Usage(format!("{}: line {line}: {message}", path.display()))
        }
        other => CliError::Usage(format!("{}: {other}", path.display())),
    })?;
    inputs.insert(name.to_string(), InputDigest::new(path, &bytes, &m));
    Ok(m)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn target(block: Option<usize>) -> Result<Option<usize>, CliError> {
    match block {
        Some(0) => Err(CliError::Usage("--target-block is 1-based".into())),
        other => Ok(other.map(|j| j - 1)),
    }
}

fn eig_verify(args: EigArgs) -> Result<bool, CliError> {
    let mut inputs = BTreeMap::new();
    let a = load(&args.a, "a", &mut inputs)?;
    let da = load(&args.da, "da", &mut inputs)?;
    let options = VerifyOptions {
        track: args.grid.options(),
        target_block: target(args.target_block)?,
    };
    let (_, verification) = verify_eig(&a, &da, &args.partition, options)?;
    let summary = Summary::of(&verification.reports);
    let doc = ReportDocument::new("eig-verify", inputs, summary, verification);
    emit_json(args.out.as_deref(), &doc)?;
    Ok(summary.passed())
}

fn svd_verify(args: SvdArgs) -> Result<bool, CliError> {
    let mut inputs = BTreeMap::new();
    let b = load(&args.b, "b", &mut inputs)?;
    let db = load(&args.db, "db", &mut inputs)?;
    let options = VerifyOptions {
        track: args.grid.options(),
        target_block: target(args.target_block)?,
    };
    let (_, verification) = verify_svd(&b, &db, &args.partition, options)?;
    let summary = Summary::of(&verification.reports);
    let doc = ReportDocument::new("svd-verify", inputs, summary, verification);
    emit_json(args.out.as_deref(), &doc)?;
    Ok(summary.passed())
}

enum Pair {
    Eig(ComplexMatrix, ComplexMatrix),
    Svd(ComplexMatrix, ComplexMatrix),
}

fn load_pair(pair: &PairArgs, inputs: &mut BTreeMap<String, InputDigest>) -> Result<Pair, CliError> {
    match (&pair.a, &pair.da, &pair.b, &pair.db) {
        (Some(a), Some(da), None, None) => Ok(Pair::Eig(load(a, "a", inputs)?, load(da, "da", inputs)?)),
        (None, None, Some(b), Some(db)) => Ok(Pair::Svd(load(b, "b", inputs)?, load(db, "db", inputs)?)),
        _ => Err(CliError::Usage("give either --a/--da or --b/--db".into())),
    }
}

#[derive(Serialize)]
struct TrackSummary<G: Serialize> {
    kind: &'static str,
    partition: Vec<usize>,
    grid: GridSummary,
    gaps: G,
    dump_path: String,
}

fn track(args: TrackArgs) -> Result<bool, CliError> {
    let mut inputs = BTreeMap::new();
    let options = args.grid.options();
    let dump_path = args.dump_path.display().to_string();
    let out = args.out.as_deref();
    match load_pair(&args.pair, &mut inputs)? {
        Pair::Eig(a, da) => {
            let path = track_eig_path(&a, &da, &args.partition, options)?;
            let gaps = gap_profile_eig(&path);
            fs::write(&args.dump_path, serde_json::to_string(&PathDump::eig(&path))?)
                .map_err(io_err(&args.dump_path))?;
            let summary = TrackSummary {
                kind: "eig",
                partition: path.partition.sizes().to_vec(),
                grid: GridSummary::new(&path.meta, &gaps.grid),
                gaps,
                dump_path,
            };
            emit_json(out, &ReportDocument::new("track", inputs, Summary::default(), summary))?;
        }
        Pair::Svd(b, db) => {
            let path = track_svd_path(&b, &db, &args.partition, options)?;
            let gaps = gap_profile_svd(&path);
            fs::write(&args.dump_path, serde_json::to_string(&PathDump::svd(&path))?)
                .map_err(io_err(&args.dump_path))?;
            let summary = TrackSummary {
                kind: "svd",
                partition: path.partition.sizes().to_vec(),
                grid: GridSummary::new(&path.meta, &gaps.rho.grid),
                gaps,
                dump_path,
            };
            emit_json(out, &ReportDocument::new("track", inputs, Summary::default(), summary))?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct SuiteDocument {
    schema: &'static str,
    tool_version: &'static str,
    command: &'static str,
    threads: Option<usize>,
    passed: bool,
    report: SuiteReport,
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

fn suite(args: SuiteArgs) -> Result<bool, CliError> {
    let text = fs::read_to_string(&args.config).map_err(io_err(&args.config))?;
    let config: SuiteConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    let threads = thread_cap()?;
    let report = if args.sequential {
        run_suite_sequential(&config)?
    } else if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        pool.install(|| run_suite(&config))?
    } else {
        run_suite(&config)?
    };
    let passed = report.passed();
    let doc = SuiteDocument {
        schema: SCHEMA,
        tool_version: TOOL_VERSION,
        command: "suite",
        threads,
        passed,
        report,
    };
    emit_json(args.out.as_deref(), &doc)?;
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct CompareRow {
    scale: f64,
    perturb_norm_fro: f64,
    perturb_norm_2: f64,
    combined_lhs: f64,
    combined_rhs: f64,
    combined_slack: f64,
    classical_lhs: f64,
    classical_rhs: f64,
    classical_slack: f64,
    /// Classical slack minus combined slack; nonnegative when the combined
    /// bound is sharper.
    sharpening: f64,
    min_single_block_slack: f64,
    violations: usize,
}

fn find(reports: &[BoundReport], id: BoundId) -> Result<&BoundReport, CliError> {
    reports
        .iter()
        .find(|r| r.bound_id == id)
        .ok_or_else(|| CliError::Usage(format!("no {id} report produced")))
}

fn compare_row(
    scale: f64,
    reports: &[BoundReport],
    eps: f64,
    fro: f64,
    ids: (BoundId, BoundId, BoundId),
) -> Result<CompareRow, CliError> {
    let (combined_id, classical_id, single_id) = ids;
    let combined = find(reports, combined_id)?;
    let classical = find(reports, classical_id)?.squared();
    let min_single = reports
        .iter()
        .filter(|r| r.bound_id == single_id && r.applicable)
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(CompareRow {
        scale,
        perturb_norm_fro: fro,
        perturb_norm_2: eps,
        combined_lhs: combined.lhs,
        combined_rhs: combined.rhs,
        combined_slack: combined.slack,
        classical_lhs: classical.lhs,
        classical_rhs: classical.rhs,
        classical_slack: classical.slack,
        sharpening: classical.slack - combined.slack,
        min_single_block_slack: min_single,
        violations: Summary::of(reports).violations,
    })
}

fn compare(args: CompareArgs) -> Result<bool, CliError> {
    if args.scales.is_empty() || args.scales.iter().any(|s| !s.is_finite()) {
        return Err(CliError::Usage("--scales needs finite values".into()));
    }
    let mut inputs = BTreeMap::new();
    let pair = load_pair(&args.pair, &mut inputs)?;
    let options = VerifyOptions {
        track: args.grid.options(),
        target_block: None,
    };
    let mut rows = Vec::with_capacity(args.scales.len());
    for &s in &args.scales {
        let row = match &pair {
            Pair::Eig(a, da) => {
                let d = da.scale(s);
                let (_, v) = verify_eig(a, &d, &args.partition, options)?;
                let ids = (BoundId::CombinedAll, BoundId::HW, BoundId::CombinedSingle);
                compare_row(s, &v.reports, v.perturbation_norm_2, d.frobenius_norm(), ids)?
            }
            Pair::Svd(b, db) => {
                let d = db.scale(s);
                let (_, v) = verify_svd(b, &d, &args.partition, options)?;
                let ids = (BoundId::SvdCombinedAll, BoundId::Mirsky, BoundId::SvdCombinedSingle);
                compare_row(s, &v.reports, v.perturbation_norm_2, d.frobenius_norm(), ids)?
            }
        };
        rows.push(row);
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is UTF-8");
    match args.out.as_deref() {
        Some(path) => fs::write(path, &text).map_err(io_err(path))?,
        None => print!("{text}"),
    }
    Ok(rows.iter().all(|r| r.violations == 0))
}
