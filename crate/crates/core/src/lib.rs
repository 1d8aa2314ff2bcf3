//! High-utility sequential pattern mining over utility-linked lists.
//!
//! The search walks the lexicographic sequence tree depth first. Each node
//! keeps a projected database of concatenation points, from which its
//! utility and the SWU, SEU and PEU upper bounds are read; look-ahead and
//! irrelevant-item pruning cut candidate items before they are expanded.
//!
//! ```
//! use husp_ull::{mine, parse_database, parse_profit_table, MinerConfig};
//!
//! let profits = parse_profit_table("1 5\n2 3\n").unwrap();
//! let db = parse_database("1:2 -1 2:1 -2\n1:1 2:4 -2\n", profits).unwrap();
//! let outcome = mine(&db, &MinerConfig::with_ratio("0.5".parse().unwrap())).unwrap();
//! let found: Vec<String> = outcome.husps.iter().map(|h| h.pattern.to_string()).collect();
//! assert_eq!(found, ["1 -2", "1 2 -2", "2 -2"]);
//! assert_eq!(outcome.husps[1].utility.to_string(), "17");
//! ```

pub mod bench;
pub mod cli;
pub mod datagen;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod output;
pub mod projection;
pub mod ullist;
pub mod utility;

pub use miner::{
    mine, BoundMode, HuspResult, MineError, MinerConfig, MiningOutcome, MiningStats, Threshold,
};
pub use model::{
    find_matches, naive_pattern_utility, parse_database, parse_profit_table, ItemId, MatchVector,
    Pattern, ProfitTable, QSeqDatabase, QSequence,
};
pub use projection::{ProjectedDb, UlIndex};
pub use ullist::UlList;
pub use utility::{Ratio, Utility};
