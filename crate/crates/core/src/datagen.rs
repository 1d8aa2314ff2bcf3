//! Synthetic quantitative sequence databases.
//!
//! The random stream is ChaCha8 seeded with `seed` through
//! `SeedableRng::seed_from_u64`, and every draw is spelled out here so a
//! given seed produces the same files on any platform:
//!
//! * uniform integer in `[0, n)`: `next_u64() % n`
//! * uniform real in `[0, 1)`: top 53 bits of `next_u64()` times 2^-53
//! * Poisson(λ): Knuth's product-of-uniforms method
//! * standard normal: Box–Muller, cosine branch only, `1 - u` for the radius
//!
//! Profits are drawn first, one per item in ascending id order, as
//! `exp(μ + σ·z)` clipped to `[profit_low, profit_high]` and rounded to four
//! decimals. Each sequence then draws its itemset count as
//! `1 + Poisson(C - 1)`, each itemset size as `1 + Poisson(T - 1)` capped at
//! the item count, distinct items uniformly, and one uniform quantity per
//! item. Sequences longer than `max_len` items lose random items from their
//! largest itemsets until they fit.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ItemId, ParseError, ProfitTable, QSeqDatabase, RawSequence};
use crate::utility::{Utility, SCALE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub num_sequences: usize,
    pub num_items: u32,
    pub avg_itemsets: f64,
    pub avg_items: f64,
    /// Cap on items per sequence.
    pub max_len: Option<usize>,
    pub quantity_low: u32,
    pub quantity_high: u32,
    pub profit_low: f64,
    pub profit_high: f64,
    pub lognormal_mu: f64,
    pub lognormal_sigma: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            num_sequences: 1000,
            num_items: 100,
            avg_itemsets: 8.0,
            avg_items: 4.0,
            max_len: None,
            quantity_low: 1,
            quantity_high: 5,
            profit_low: 0.01,
            profit_high: 10.0,
            lognormal_mu: 0.0,
            lognormal_sigma: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least one item")]
    NoItems,
    #[error("average itemsets per sequence must be >= 1, got {0}")]
    BadItemsetCount(f64),
    #[error("average items per itemset must be >= 1 and <= the item count ({items}), got {avg}")]
    BadItemsetSize { avg: f64, items: u32 },
    #[error("quantity range must satisfy 1 <= low <= high, got {low}..={high}")]
    BadQuantityRange { low: u32, high: u32 },
    #[error("profit range must satisfy 0 < low <= high, got {low}..={high}")]
    BadProfitRange { low: f64, high: f64 },
    #[error("profit range must contain a value with four decimals")]
    EmptyProfitGrid,
    #[error("lognormal sigma must be finite and >= 0, got {0}")]
    BadSigma(f64),
    #[error("max length must be >= 1")]
    ZeroMaxLen,
    #[error("generated data rejected: {0}")]
    Invalid(#[from] ParseError),
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.num_items == 0 {
            return Err(GenError::NoItems);
        }
        if !(self.avg_itemsets >= 1.0 && self.avg_itemsets.is_finite()) {
            return Err(GenError::BadItemsetCount(self.avg_itemsets));
        }
        if !(self.avg_items >= 1.0 && self.avg_items <= f64::from(self.num_items)) {
            return Err(GenError::BadItemsetSize {
                avg: self.avg_items,
                items: self.num_items,
            });
        }
        if self.quantity_low == 0 || self.quantity_low > self.quantity_high {
            return Err(GenError::BadQuantityRange {
                low: self.quantity_low,
                high: self.quantity_high,
            });
        }
        if !(self.profit_low > 0.0
            && self.profit_low <= self.profit_high
            && self.profit_high.is_finite())
        {
            return Err(GenError::BadProfitRange {
                low: self.profit_low,
                high: self.profit_high,
            });
        }
        if profit_bounds(self).0 > profit_bounds(self).1 {
            return Err(GenError::EmptyProfitGrid);
        }
        if !(self.lognormal_sigma >= 0.0
            && self.lognormal_sigma.is_finite()
            && self.lognormal_mu.is_finite())
        {
            return Err(GenError::BadSigma(self.lognormal_sigma));
        }
        if self.max_len == Some(0) {
            return Err(GenError::ZeroMaxLen);
        }
        Ok(())
    }
}

/// Generator output before it is rendered or indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedData {
    pub sequences: Vec<RawSequence>,
    pub profits: ProfitTable,
}

impl GeneratedData {
    /// Database file text: `item:quantity` tokens, `-1` between itemsets,
    /// `-2` ending each line.
    pub fn database_text(&self) -> String {
        let mut out = String::new();
        for seq in &self.sequences {
            for (k, set) in seq.iter().enumerate() {
                if k > 0 {
                    out.push_str("-1 ");
                }
                for (item, qty) in set {
                    out.push_str(&format!("{item}:{qty} "));
                }
            }
            out.push_str("-2\n");
        }
        out
    }

    /// Profit file text: `item profit` per line.
    pub fn profit_text(&self) -> String {
        self.profits
            .iter()
            .map(|(item, p)| format!("{item} {p}\n"))
            .collect()
    }

    pub fn into_database(self) -> Result<QSeqDatabase, GenError> {
        Ok(QSeqDatabase::from_sequences(self.sequences, self.profits)?)
    }
}

pub fn generate(params: &GenParams) -> Result<GeneratedData, GenError> {
    params.validate()?;
    let mut rng = Draws(ChaCha8Rng::seed_from_u64(params.seed));
    let (lo, hi) = profit_bounds(params);

    let profits: ProfitTable = (1..=params.num_items)
        .map(|item| {
            let x = (params.lognormal_mu + params.lognormal_sigma * rng.normal()).exp();
            let raw = (x * SCALE as f64).round().clamp(lo as f64, hi as f64) as u64;
            (item, Utility::from_raw(raw))
        })
        .collect();

    let n = params.num_items;
    let mut sequences = Vec::with_capacity(params.num_sequences);
    for _ in 0..params.num_sequences {
        let count = 1 + rng.poisson(params.avg_itemsets - 1.0);
        let mut seq: Vec<Vec<ItemId>> = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let size = (1 + rng.poisson(params.avg_items - 1.0)).min(u64::from(n)) as usize;
            let mut set: Vec<ItemId> = Vec::with_capacity(size);
            while set.len() < size {
                let item = 1 + rng.below(u64::from(n)) as ItemId;
                if !set.contains(&item) {
                    set.push(item);
                }
            }
            seq.push(set);
        }
        if let Some(cap) = params.max_len {
            trim_to(&mut seq, cap, &mut rng);
        }
        let span = u64::from(params.quantity_high - params.quantity_low) + 1;
        let raw: RawSequence = seq
            .into_iter()
            .map(|mut set| {
                set.sort_unstable();
                set.into_iter()
                    .map(|item| (item, params.quantity_low + rng.below(span) as u32))
                    .collect()
            })
            .collect();
        sequences.push(raw);
    }
    Ok(GeneratedData { sequences, profits })
}

/// Profit range in raw fixed-point units, rounded inward.
fn profit_bounds(params: &GenParams) -> (u64, u64) {
    let lo = (params.profit_low * SCALE as f64).ceil().max(1.0) as u64;
    let hi = (params.profit_high * SCALE as f64).floor() as u64;
    (lo, hi)
}

fn trim_to(seq: &mut Vec<Vec<ItemId>>, cap: usize, rng: &mut Draws) {
    let mut total: usize = seq.iter().map(Vec::len).sum();
    while total > cap {
        let (k, largest) = seq
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(k, s)| (k, s.len()))
            .expect("non-empty");
        if largest > 1 {
            let victim = rng.below(largest as u64) as usize;
            seq[k].swap_remove(victim);
        } else {
            seq.pop();
        }
        total -= 1;
    }
}

struct Draws(ChaCha8Rng);

impl Draws {
    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn poisson(&mut self, lambda: f64) -> u64 {
        if lambda <= 0.0 {
            return 0;
        }
        let limit = (-lambda).exp();
        let mut k = 0;
        let mut p = self.unit();
        while p > limit {
            k += 1;
            p *= self.unit();
        }
        k
    }

    fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
