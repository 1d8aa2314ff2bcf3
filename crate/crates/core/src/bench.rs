//! Ablation grid runner: datasets × thresholds × bound/LAS/IPS settings.
//!
//! A plan is TOML:
//!
//! ```toml
//! deltas = ["0.05", "0.1"]
//! bounds = ["peu", "seu", "swu"]   # default: all three
//! las = [true, false]              # default: both
//! ips = [true, false]              # default: both
//! time_budget_ms = 60000           # optional, per cell
//!
//! [[datasets]]
//! id = "example"
//! db = "example.db"                # relative to the plan file
//! profits = "example.prof"
//!
//! [[datasets]]
//! id = "c8t4"
//! generate = { num_sequences = 1000, num_items = 100, seed = 1 }
//! ```

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::datagen::{generate, GenError, GenParams};
use crate::miner::{mine, BoundMode, MineError, MinerConfig};
use crate::model::{parse_database, parse_profit_table, ParseError, QSeqDatabase};
use crate::utility::{DecimalError, Ratio};

pub const CSV_HEADER: [&str; 9] = [
    "dataset",
    "delta",
    "bound",
    "las",
    "ips",
    "ms",
    "candidates",
    "husps",
    "peak_entries",
];

/// Marker written in place of measurements for cells that ran out of time.
pub const TIMEOUT_MARK: &str = "-";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad plan: {0}")]
    Plan(#[from] toml::de::Error),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("dataset `{id}`: {source}")]
    Generate { id: String, source: GenError },
    #[error("dataset `{0}` needs either `db` and `profits` or `generate`")]
    DatasetSource(String),
    #[error("bad delta `{value}`: {source}")]
    Delta { value: String, source: DecimalError },
    #[error("{0}")]
    Mine(MineError),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum DeltaValue {
    Text(String),
    Number(f64),
}

impl DeltaValue {
    fn text(&self) -> String {
        match self {
            DeltaValue::Text(s) => s.clone(),
            DeltaValue::Number(x) => x.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    pub db: Option<PathBuf>,
    pub profits: Option<PathBuf>,
    pub generate: Option<GenParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(default)]
    deltas: Vec<DeltaValue>,
    #[serde(default = "all_bounds")]
    pub bounds: Vec<BoundMode>,
    #[serde(default = "both")]
    pub las: Vec<bool>,
    #[serde(default = "both")]
    pub ips: Vec<bool>,
    pub time_budget_ms: Option<u64>,
    /// Run cells concurrently.
    #[serde(default)]
    pub parallel: bool,
}

fn all_bounds() -> Vec<BoundMode> {
    BoundMode::ALL.to_vec()
}

fn both() -> Vec<bool> {
    vec![true, false]
}

impl BenchPlan {
    pub fn parse(text: &str) -> Result<BenchPlan, BenchError> {
        Ok(toml::from_str(text)?)
    }

    pub fn deltas(&self) -> Result<Vec<(String, Ratio)>, BenchError> {
        self.deltas
            .iter()
            .map(|d| {
                let value = d.text();
                let ratio = value.parse().map_err(|source| BenchError::Delta {
                    value: value.clone(),
                    source,
                })?;
                Ok((value, ratio))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellResult {
    Done {
        ms: u64,
        candidates: u64,
        husps: u64,
        peak_entries: u64,
    },
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub dataset: String,
    pub delta: String,
    pub bound: BoundMode,
    pub las: bool,
    pub ips: bool,
    pub result: CellResult,
}

impl BenchRow {
    fn record(&self) -> Vec<String> {
        let mut rec = vec![
            self.dataset.clone(),
            self.delta.clone(),
            self.bound.to_string(),
            self.las.to_string(),
            self.ips.to_string(),
        ];
        match self.result {
            CellResult::Done {
                ms,
                candidates,
                husps,
                peak_entries,
            } => rec.extend([ms, candidates, husps, peak_entries].map(|v| v.to_string())),
            CellResult::TimedOut => rec.extend([TIMEOUT_MARK; 4].map(String::from)),
        }
        rec
    }
}

/// Reads a plan and resolves its dataset paths against the plan's directory.
pub fn load_plan(path: &Path) -> Result<(BenchPlan, PathBuf), BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((BenchPlan::parse(&text)?, base))
}

pub fn load_dataset(spec: &DatasetSpec, base: &Path) -> Result<QSeqDatabase, BenchError> {
    match (&spec.db, &spec.profits, &spec.generate) {
        (Some(db), Some(profits), None) => {
            let profits_path = base.join(profits);
            let profits =
                parse_profit_table(&read(&profits_path)?).map_err(|source| BenchError::Parse {
                    path: profits_path,
                    source,
                })?;
            let db_path = base.join(db);
            parse_database(&read(&db_path)?, profits).map_err(|source| BenchError::Parse {
                path: db_path,
                source,
            })
        }
        (None, None, Some(params)) => generate(params)
            .and_then(|data| data.into_database())
            .map_err(|source| BenchError::Generate {
                id: spec.id.clone(),
                source,
            }),
        _ => Err(BenchError::DatasetSource(spec.id.clone())),
    }
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row per (dataset, δ, bound, LAS, IPS), in plan order.
pub fn run_plan(plan: &BenchPlan, base: &Path) -> Result<Vec<BenchRow>, BenchError> {
    let deltas = plan.deltas()?;
    let datasets = plan
        .datasets
        .iter()
        .map(|spec| Ok((spec.id.clone(), load_dataset(spec, base)?)))
        .collect::<Result<Vec<_>, BenchError>>()?;

    let mut cells = Vec::new();
    for (d, _) in datasets.iter().enumerate() {
        for (delta_text, ratio) in &deltas {
            for &bound in &plan.bounds {
                for &las in &plan.las {
                    for &ips in &plan.ips {
                        cells.push((d, delta_text.clone(), *ratio, bound, las, ips));
                    }
                }
            }
        }
    }
    let budget = plan.time_budget_ms.map(Duration::from_millis);
    let run_cell =
        |(d, delta, ratio, bound, las, ips): &(usize, String, Ratio, BoundMode, bool, bool)| {
            let (id, db) = &datasets[*d];
            let config = MinerConfig::with_ratio(*ratio)
                .bound(*bound)
                .las(*las)
                .ips(*ips)
                .time_budget(budget);
            let result = match mine(db, &config) {
                Ok(out) => CellResult::Done {
                    ms: out.stats.elapsed_millis,
                    candidates: out.stats.candidates_generated,
                    husps: out.stats.husp_count,
                    peak_entries: out.stats.peak_projected_entries,
                },
                Err(MineError::TimeBudgetExceeded { .. }) => CellResult::TimedOut,
                Err(e) => return Err(BenchError::Mine(e)),
            };
            Ok(BenchRow {
                dataset: id.clone(),
                delta: delta.clone(),
                bound: *bound,
                las: *las,
                ips: *ips,
                result,
            })
        };
    if plan.parallel {
        cells.par_iter().map(run_cell).collect()
    } else {
        cells.iter().map(run_cell).collect()
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
