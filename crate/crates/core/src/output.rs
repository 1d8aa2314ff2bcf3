//! Result files: one `<pattern> -2 #UTIL: <utility>` line per HUSP.

use std::io::{self, Write};

use thiserror::Error;

use crate::miner::HuspResult;
use crate::model::PatternError;
use crate::utility::DecimalError;

const UTIL_TAG: &str = "#UTIL:";

#[derive(Debug, Error)]
pub enum ResultParseError {
    #[error("line {line}: missing `{UTIL_TAG}`")]
    MissingUtility { line: usize },
    #[error("line {line}: {source}")]
    Pattern { line: usize, source: PatternError },
    #[error("line {line}: {source}")]
    Utility { line: usize, source: DecimalError },
}

pub fn format_result(r: &HuspResult) -> String {
    format!("{} {UTIL_TAG} {}", r.pattern, r.utility)
}

pub fn write_results<W: Write>(mut out: W, results: &[HuspResult]) -> io::Result<()> {
    for r in results {
        writeln!(out, "{}", format_result(r))?;
    }
    out.flush()
}

pub fn render_results(results: &[HuspResult]) -> String {
    let mut buf = Vec::new();
    write_results(&mut buf, results).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn parse_results(text: &str) -> Result<Vec<HuspResult>, ResultParseError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (pat, util) = raw
            .split_once(UTIL_TAG)
            .ok_or(ResultParseError::MissingUtility { line })?;
        let pattern = pat
            .parse()
            .map_err(|source| ResultParseError::Pattern { line, source })?;
        let utility = util
            .trim()
            .parse()
            .map_err(|source| ResultParseError::Utility { line, source })?;
        out.push(HuspResult { pattern, utility });
    }
    Ok(out)
}
