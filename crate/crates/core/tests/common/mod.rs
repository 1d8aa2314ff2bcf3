//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use husp_ull::model::RawSequence;
use husp_ull::{parse_database, parse_profit_table, ItemId, ProfitTable, QSeqDatabase, Utility};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const RUNNING_DB: &str = "\
1:2 3:3 -1 1:3 2:1 3:2 -1 1:4 2:5 4:4 -1 5:3 -2
1:1 5:3 -1 1:5 2:3 4:2 -1 2:2 3:1 4:4 5:3 -2
5:2 -1 3:2 4:3 -1 1:3 5:3 -1 2:4 4:5 -2
2:2 3:3 -1 1:5 5:1 -1 2:4 4:3 5:5 -2
1:4 3:3 -1 1:2 2:5 3:2 4:4 5:3 -2
6:4 -1 1:5 2:3 -1 1:3 4:4 -2
";

pub const RUNNING_PROFITS: &str = "1 5\n2 3\n3 4\n4 2\n5 1\n6 6\n";

pub fn running_db() -> QSeqDatabase {
    parse_database(RUNNING_DB, parse_profit_table(RUNNING_PROFITS).unwrap()).unwrap()
}

pub fn units(v: u64) -> Utility {
    Utility::from_units(v)
}

/// Bounds for [`small_random_db`].
#[derive(Debug, Clone, Copy)]
pub struct SmallDbShape {
    pub max_sequences: u64,
    pub max_items: u64,
    pub max_seq_len: u64,
    pub max_itemsets: u64,
}

pub const ORACLE_SHAPE: SmallDbShape = SmallDbShape {
    max_sequences: 25,
    max_items: 6,
    max_seq_len: 10,
    max_itemsets: 5,
};

/// A seeded random database: quantities 1..=5, integer profits 1..=10.
pub fn small_random_db(seed: u64, shape: SmallDbShape) -> QSeqDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut below = |n: u64| rng.next_u64() % n;
    let n_items = 1 + below(shape.max_items);
    let n_seqs = 1 + below(shape.max_sequences);
    let profits: ProfitTable = (1..=n_items as ItemId)
        .map(|i| (i, Utility::from_units(1 + below(10))))
        .collect();
    let mut seqs: Vec<RawSequence> = Vec::new();
    for _ in 0..n_seqs {
        let mut budget = 1 + below(shape.max_seq_len);
        let mut seq = Vec::new();
        let n_sets = 1 + below(shape.max_itemsets.min(budget));
        for k in 0..n_sets {
            let left_sets = n_sets - k - 1;
            let room = (budget - left_sets).min(n_items);
            let size = 1 + below(room);
            budget -= size;
            let mut pool: Vec<ItemId> = (1..=n_items as ItemId).collect();
            let mut set = Vec::new();
            for _ in 0..size {
                let pick = below(pool.len() as u64) as usize;
                set.push(pool.swap_remove(pick));
            }
            set.sort_unstable();
            seq.push(set.into_iter().map(|i| (i, 1 + below(5) as u32)).collect());
        }
        seqs.push(seq);
    }
    QSeqDatabase::from_sequences(seqs, profits).unwrap()
}
