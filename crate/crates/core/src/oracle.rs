//! Exhaustive reference miner.
//!
//! Walks the same I/S-concatenation tree as the miner but without any
//! bound, keeping a pattern alive only while some transaction contains it,
//! and scores each pattern by brute-force match enumeration.

use thiserror::Error;

use crate::miner::{HuspResult, Threshold};
use crate::model::{contains, naive_utility_in, ItemId, Pattern, QSeqDatabase};
use crate::utility::Utility;

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration exceeded the node cap of {0}")]
    NodeCapExceeded(u64),
    #[error("maximum length must be at least 1")]
    ZeroLength,
}

/// Every pattern of at most `max_len` items contained in some transaction,
/// each paired with its utility in the database.
pub fn enumerate_with_utility(
    db: &QSeqDatabase,
    max_len: usize,
    node_cap: u64,
) -> Result<Vec<(Pattern, Utility)>, OracleError> {
    if max_len == 0 {
        return Err(OracleError::ZeroLength);
    }
    let items: Vec<ItemId> = db.items().collect();
    let mut walk = Walk {
        db,
        items: &items,
        max_len,
        node_cap,
        nodes: 0,
        out: Vec::new(),
    };
    let all: Vec<usize> = (0..db.len()).collect();
    for &item in &items {
        walk.visit(Pattern::single(item), &all)?;
    }
    walk.out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(walk.out)
}

pub fn enumerate_patterns(
    db: &QSeqDatabase,
    max_len: usize,
    node_cap: u64,
) -> Result<Vec<Pattern>, OracleError> {
    Ok(enumerate_with_utility(db, max_len, node_cap)?
        .into_iter()
        .map(|(p, _)| p)
        .collect())
}

/// Exact HUSP set, sorted like the miner's output.
pub fn oracle_mine(
    db: &QSeqDatabase,
    threshold: Threshold,
    max_len: Option<usize>,
    node_cap: u64,
) -> Result<Vec<HuspResult>, OracleError> {
    let min_util = threshold.resolve(db.total_utility());
    let max_len = max_len.unwrap_or_else(|| db.max_sequence_len()).max(1);
    Ok(enumerate_with_utility(db, max_len, node_cap)?
        .into_iter()
        .filter(|(_, u)| *u >= min_util)
        .map(|(pattern, utility)| HuspResult { pattern, utility })
        .collect())
}

struct Walk<'a> {
    db: &'a QSeqDatabase,
    items: &'a [ItemId],
    max_len: usize,
    node_cap: u64,
    nodes: u64,
    out: Vec<(Pattern, Utility)>,
}

impl Walk<'_> {
    /// `within` lists the transactions that contain the parent pattern.
    fn visit(&mut self, pattern: Pattern, within: &[usize]) -> Result<(), OracleError> {
        let seqs = self.db.sequences();
        let support: Vec<usize> = within
            .iter()
            .copied()
            .filter(|&k| contains(&seqs[k], &pattern))
            .collect();
        if support.is_empty() {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(OracleError::NodeCapExceeded(self.node_cap));
        }
        let utility = support
            .iter()
            .filter_map(|&k| naive_utility_in(&pattern, &seqs[k]))
            .sum();
        if pattern.len() < self.max_len {
            for &item in self.items {
                if let Some(child) = pattern.i_extend(item) {
                    self.visit(child, &support)?;
                }
            }
            for &item in self.items {
                self.visit(pattern.s_extend(item), &support)?;
            }
        }
        self.out.push((pattern, utility));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::running_db;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn length_one_is_the_item_set() {
        let db = running_db();
        let pats = enumerate_patterns(&db, 1, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(pats, (1..=6).map(Pattern::single).collect::<Vec<_>>());
    }

    #[test]
    fn length_two_membership() {
        let db = running_db();
        let pats = enumerate_patterns(&db, 2, DEFAULT_NODE_CAP).unwrap();
        assert!(pats.contains(&p("1 -1 2")));
        assert!(pats.contains(&p("1 2")));
        assert!(pats.contains(&p("1 -1 1")));
        assert!(!pats.contains(&p("6 -1 3")));
        let mut dedup = pats.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), pats.len());
    }

    #[test]
    fn empty_database() {
        let db = QSeqDatabase::from_sequences(Vec::new(), Default::default()).unwrap();
        assert!(enumerate_patterns(&db, 3, DEFAULT_NODE_CAP)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn oracle_running_example() {
        let db = running_db();
        let delta = Threshold::Ratio("0.1".parse().unwrap());
        let husps = oracle_mine(&db, delta, None, DEFAULT_NODE_CAP).unwrap();
        let ab = husps.iter().find(|h| h.pattern == p("1 -1 2")).unwrap();
        assert_eq!(ab.utility, Utility::from_units(160));
        let none = oracle_mine(
            &db,
            Threshold::Ratio("1.01".parse().unwrap()),
            None,
            DEFAULT_NODE_CAP,
        );
        assert!(none.unwrap().is_empty());
    }

    #[test]
    fn node_cap_is_an_error() {
        let db = running_db();
        assert_eq!(
            enumerate_patterns(&db, 4, 10),
            Err(OracleError::NodeCapExceeded(10))
        );
        assert_eq!(enumerate_patterns(&db, 0, 10), Err(OracleError::ZeroLength));
    }

    #[test]
    fn agrees_with_miner_on_running_example() {
        let db = running_db();
        for delta in ["0.02", "0.05", "0.1", "0.2"] {
            let threshold = Threshold::Ratio(delta.parse().unwrap());
            let expected = oracle_mine(&db, threshold, None, DEFAULT_NODE_CAP).unwrap();
            let config = crate::miner::MinerConfig::with_ratio(delta.parse().unwrap());
            let got = crate::miner::mine(&db, &config).unwrap().husps;
            assert_eq!(got, expected, "delta {delta}");
        }
    }
}
