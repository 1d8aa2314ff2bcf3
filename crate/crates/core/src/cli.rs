//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage, 3 I/O, 4 parse,
//! 5 time budget exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchError};
use crate::datagen::{generate, GenParams};
use crate::miner::{mine, BoundMode, MineError, MinerConfig, Threshold};
use crate::model::{parse_database, parse_profit_table, Pattern, QSeqDatabase};
use crate::oracle::{oracle_mine, DEFAULT_NODE_CAP};
use crate::output::write_results;
use crate::projection::{ProjectedDb, UlIndex};
use crate::ullist::UlList;
use crate::utility::{Ratio, Utility};

#[derive(Debug, Parser)]
#[command(
    name = "husp-ull",
    version,
    about = "High-utility sequential pattern mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine high-utility sequential patterns.
    Mine(MineArgs),
    /// Exhaustive reference miner for small databases.
    Oracle(OracleArgs),
    /// Generate a synthetic database and profit table.
    Gen(GenArgs),
    /// Dump the utility-linked list of one or all sequences.
    Inspect(InspectArgs),
    /// Print utility and upper bounds of a pattern.
    Bounds(BoundsArgs),
    /// Run an ablation plan and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct Input {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    profits: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ThresholdArgs {
    /// Relative threshold δ; minUtil = ceil(δ · u(D)).
    #[arg(long)]
    min_util_ratio: Option<Ratio>,
    /// Absolute threshold.
    #[arg(long)]
    min_util: Option<Utility>,
}

impl ThresholdArgs {
    fn threshold(&self) -> Threshold {
        match (self.min_util_ratio, self.min_util) {
            (Some(r), _) => Threshold::Ratio(r),
            (None, Some(u)) => Threshold::Absolute(u),
            (None, None) => unreachable!("clap requires one threshold"),
        }
    }
}

#[derive(Debug, Args)]
struct MineArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[arg(long, default_value = "peu", value_parser = parse_bound)]
    bound: BoundMode,
    #[arg(long)]
    no_las: bool,
    #[arg(long)]
    no_ips: bool,
    /// Longest pattern (in items) to explore.
    #[arg(long)]
    max_len: Option<usize>,
    /// Mine the per-item subtrees on all cores.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Result file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write run statistics as one JSON line, to the given file or stderr.
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArgs,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    num_sequences: usize,
    #[arg(long, default_value_t = 100)]
    num_items: u32,
    /// Mean itemsets per sequence (C).
    #[arg(long, default_value_t = 8.0)]
    avg_itemsets: f64,
    /// Mean items per itemset (T).
    #[arg(long, default_value_t = 4.0)]
    avg_items: f64,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = 1)]
    quantity_low: u32,
    #[arg(long, default_value_t = 5)]
    quantity_high: u32,
    #[arg(long, default_value_t = 0.01)]
    profit_low: f64,
    #[arg(long, default_value_t = 10.0)]
    profit_high: f64,
    #[arg(long, default_value_t = 0.0)]
    lognormal_mu: f64,
    #[arg(long, default_value_t = 1.0)]
    lognormal_sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    db_out: PathBuf,
    #[arg(long)]
    profits_out: PathBuf,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[command(flatten)]
    input: Input,
    /// 1-based sequence id; every sequence when omitted.
    #[arg(long)]
    sid: Option<u32>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: Input,
    /// Pattern in result-file form, e.g. `1 -1 2`.
    #[arg(long, allow_hyphen_values = true)]
    pattern: String,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run cells concurrently regardless of the plan setting.
    #[arg(long)]
    parallel: bool,
}

fn parse_bound(s: &str) -> Result<BoundMode, String> {
    s.parse()
}

#[derive(Debug)]
enum CliError {
    Io { path: PathBuf, source: io::Error },
    Parse(String),
    Timeout(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Io { .. } => 3,
            CliError::Parse(_) => 4,
            CliError::Timeout(_) => 5,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse(m) | CliError::Timeout(m) | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io { path, source } => CliError::Io { path, source },
            BenchError::Plan(_) | BenchError::Parse { .. } | BenchError::Delta { .. } => {
                CliError::Parse(e.to_string())
            }
            other => CliError::Other(other.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("husp-ull: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Mine(a) => cmd_mine(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load(input: &Input) -> Result<QSeqDatabase, CliError> {
    let profits = parse_profit_table(&read(&input.profits)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", input.profits.display())))?;
    parse_database(&read(&input.db)?, profits)
        .map_err(|e| CliError::Parse(format!("{}: {e}", input.db.display())))
}

/// Runs `body` against the file at `path`, or stdout when there is none.
fn with_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn cmd_mine(a: MineArgs) -> Result<(), CliError> {
    let db = load(&a.input)?;
    let config = MinerConfig {
        threshold: a.threshold.threshold(),
        bound: a.bound,
        las: !a.no_las,
        ips: !a.no_ips,
        max_pattern_length: a.max_len,
        parallel: a.parallel,
        time_budget: a.time_budget_ms.map(Duration::from_millis),
        audit: false,
    };
    let outcome = match mine(&db, &config) {
        Ok(o) => o,
        Err(MineError::TimeBudgetExceeded { budget, stats }) => {
            if let Some(p) = &a.stats {
                write_stats(p, &stats.to_json())?;
            }
            return Err(CliError::Timeout(format!(
                "time budget of {budget:?} exceeded"
            )));
        }
        Err(e) => return Err(CliError::Other(e.to_string())),
    };
    with_output(a.out.as_deref(), |w| write_results(w, &outcome.husps))?;
    if let Some(p) = &a.stats {
        write_stats(p, &outcome.stats.to_json())?;
    }
    Ok(())
}

fn write_stats(path: &Path, json: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        eprintln!("{json}");
        return Ok(());
    }
    std::fs::write(path, format!("{json}\n")).map_err(|e| CliError::io(path, e))
}

fn cmd_oracle(a: OracleArgs) -> Result<(), CliError> {
    let db = load(&a.input)?;
    let husps = oracle_mine(&db, a.threshold.threshold(), a.max_len, a.node_cap)
        .map_err(|e| CliError::Other(e.to_string()))?;
    with_output(a.out.as_deref(), |w| write_results(w, &husps))
}

fn cmd_gen(a: GenArgs) -> Result<(), CliError> {
    let params = GenParams {
        num_sequences: a.num_sequences,
        num_items: a.num_items,
        avg_itemsets: a.avg_itemsets,
        avg_items: a.avg_items,
        max_len: a.max_len,
        quantity_low: a.quantity_low,
        quantity_high: a.quantity_high,
        profit_low: a.profit_low,
        profit_high: a.profit_high,
        lognormal_mu: a.lognormal_mu,
        lognormal_sigma: a.lognormal_sigma,
        seed: a.seed,
    };
    let data = generate(&params).map_err(|e| CliError::Other(e.to_string()))?;
    std::fs::write(&a.db_out, data.database_text()).map_err(|e| CliError::io(&a.db_out, e))?;
    std::fs::write(&a.profits_out, data.profit_text()).map_err(|e| CliError::io(&a.profits_out, e))
}

fn cmd_inspect(a: InspectArgs) -> Result<(), CliError> {
    let db = load(&a.input)?;
    let seqs: Vec<_> = match a.sid {
        Some(sid) => vec![db
            .sequence(sid)
            .ok_or_else(|| CliError::Other(format!("no sequence with sid {sid}")))?],
        None => db.sequences().iter().collect(),
    };
    let mut text = String::new();
    for seq in seqs {
        let _ = writeln!(text, "Sequence {}", seq.sid());
        text.push_str(&UlList::build(seq).render_table());
    }
    with_output(None, |w| w.write_all(text.as_bytes()))
}

fn cmd_bounds(a: BoundsArgs) -> Result<(), CliError> {
    let db = load(&a.input)?;
    let pattern: Pattern = a
        .pattern
        .parse()
        .map_err(|e| CliError::Parse(format!("pattern `{}`: {e}", a.pattern)))?;
    let index = UlIndex::build(&db);
    let pd = ProjectedDb::project_pattern(&index, &pattern);
    let mut text = String::new();
    let _ = writeln!(text, "pattern: {pattern}");
    let _ = writeln!(text, "utility: {}", pd.utility());
    let _ = writeln!(text, "peu: {}", pd.peu());
    let _ = writeln!(text, "seu: {}", pd.seu());
    let _ = writeln!(text, "swu: {}", pd.swu());
    for ps in pd.projections() {
        let _ = writeln!(
            text,
            "sid {}: utility {} peu {} seu {}",
            ps.sid(),
            ps.utility(),
            ps.peu(),
            ps.seu()
        );
    }
    with_output(None, |w| w.write_all(text.as_bytes()))
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let (mut plan, base) = bench::load_plan(&a.plan)?;
    plan.parallel |= a.parallel;
    let rows = bench::run_plan(&plan, &base)?;
    let mut buf = Vec::new();
    bench::write_csv(&mut buf, &rows)?;
    with_output(a.out.as_deref(), |w| w.write_all(&buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{RUNNING_DB, RUNNING_PROFITS};

    fn fixture() -> (tempfile::TempDir, String, String) {
        let dir = tempfile::tempdir().unwrap();
        let db = dir.path().join("ex.db");
        let prof = dir.path().join("ex.prof");
        std::fs::write(&db, RUNNING_DB).unwrap();
        std::fs::write(&prof, RUNNING_PROFITS).unwrap();
        let s = |p: PathBuf| p.to_str().unwrap().to_string();
        (dir, s(db), s(prof))
    }

    #[test]
    fn mine_writes_result_file() {
        let (dir, db, prof) = fixture();
        let out = dir.path().join("r.txt");
        let code = run([
            "husp-ull",
            "mine",
            "--db",
            &db,
            "--profits",
            &prof,
            "--min-util-ratio",
            "0.1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.lines().any(|l| l == "1 -1 2 -2 #UTIL: 160"));
    }

    #[test]
    fn exit_codes() {
        let (dir, db, prof) = fixture();
        assert_eq!(run(["husp-ull", "mine", "--bogus"]), 2);
        assert_eq!(
            run([
                "husp-ull",
                "mine",
                "--db",
                "/nonexistent/x.db",
                "--profits",
                &prof,
                "--min-util",
                "1"
            ]),
            3
        );
        let bad = dir.path().join("bad.db");
        std::fs::write(&bad, "1:x -2\n").unwrap();
        assert_eq!(
            run([
                "husp-ull",
                "mine",
                "--db",
                bad.to_str().unwrap(),
                "--profits",
                &prof,
                "--min-util",
                "1"
            ]),
            4
        );
        assert_eq!(
            run([
                "husp-ull",
                "mine",
                "--db",
                &db,
                "--profits",
                &prof,
                "--min-util-ratio",
                "0.01",
                "--time-budget-ms",
                "0",
                "--out",
                dir.path().join("t.txt").to_str().unwrap(),
            ]),
            5
        );
        assert_eq!(
            run([
                "husp-ull",
                "mine",
                "--db",
                &db,
                "--profits",
                &prof,
                "--min-util-ratio",
                "0"
            ]),
            1
        );
    }
}
