//! Quantitative sequence databases, their text formats, and the definitional
//! (brute-force) utility of a pattern.
//!
//! Database lines look like `1:2 3:3 -1 1:3 2:1 3:2 -1 5:3 -2`: q-items are
//! `<item>:<quantity>`, `-1` closes an itemset and `-2` closes the sequence.
//! Profit lines are `<item> <decimal profit>`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::utility::{DecimalError, Utility};

pub type ItemId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: profit of item {item}: {source}")]
    BadProfit {
        line: usize,
        item: ItemId,
        source: DecimalError,
    },
    #[error("line {line}: profit of item {item} must be positive")]
    NonPositiveProfit { line: usize, item: ItemId },
    #[error("line {line}: duplicate profit entry for item {item}")]
    DuplicateProfit { line: usize, item: ItemId },
    #[error("line {line}: item {item} has no profit entry")]
    UnknownItem { line: usize, item: ItemId },
    #[error("line {line}: item {item} has quantity {quantity}, expected >= 1")]
    BadQuantity {
        line: usize,
        item: ItemId,
        quantity: u64,
    },
    #[error("line {line}: itemset is not strictly increasing at item {item}")]
    UnsortedItemset { line: usize, item: ItemId },
    #[error("line {line}: empty itemset")]
    EmptyItemset { line: usize },
    #[error("line {line}: missing `-2` terminator")]
    MissingTerminator { line: usize },
    #[error("line {line}: utility overflow")]
    Overflow { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern has no itemsets")]
    Empty,
    #[error("pattern itemset {0} is empty")]
    EmptyItemset(usize),
    #[error("pattern itemset {0} is not strictly increasing")]
    Unsorted(usize),
    #[error("invalid pattern token `{0}`")]
    BadToken(String),
}

/// Unit profit per item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfitTable {
    entries: BTreeMap<ItemId, Utility>,
}

impl ProfitTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry; profit must be positive and the id unused.
    pub fn insert(&mut self, item: ItemId, profit: Utility) -> Result<(), ParseError> {
        if profit.is_zero() {
            return Err(ParseError::NonPositiveProfit { line: 0, item });
        }
        if self.entries.insert(item, profit).is_some() {
            return Err(ParseError::DuplicateProfit { line: 0, item });
        }
        Ok(())
    }

    pub fn get(&self, item: ItemId) -> Option<Utility> {
        self.entries.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, Utility)> + '_ {
        self.entries.iter().map(|(&i, &p)| (i, p))
    }
}

impl FromIterator<(ItemId, Utility)> for ProfitTable {
    fn from_iter<T: IntoIterator<Item = (ItemId, Utility)>>(iter: T) -> Self {
        ProfitTable {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Parses `<item-id> <decimal-profit>` lines.
pub fn parse_profit_table(text: &str) -> Result<ProfitTable, ParseError> {
    let mut table = ProfitTable::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(id_tok) = tokens.next() else {
            continue;
        };
        let item = parse_item_id(id_tok, line)?;
        let profit_tok = tokens.next().ok_or_else(|| ParseError::Malformed {
            line,
            reason: format!("missing profit for item {item}"),
        })?;
        if let Some(extra) = tokens.next() {
            return Err(ParseError::Malformed {
                line,
                reason: format!("unexpected token `{extra}`"),
            });
        }
        let profit: Utility =
            profit_tok
                .parse()
                .map_err(|source| ParseError::BadProfit { line, item, source })?;
        table.insert(item, profit).map_err(|e| match e {
            ParseError::NonPositiveProfit { item, .. } => {
                ParseError::NonPositiveProfit { line, item }
            }
            ParseError::DuplicateProfit { item, .. } => ParseError::DuplicateProfit { line, item },
            other => other,
        })?;
    }
    Ok(table)
}

fn parse_item_id(tok: &str, line: usize) -> Result<ItemId, ParseError> {
    match tok.parse::<ItemId>() {
        Ok(id) if id > 0 => Ok(id),
        _ => Err(ParseError::Malformed {
            line,
            reason: format!("invalid item id `{tok}`"),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QItem {
    pub item: ItemId,
    pub quantity: u32,
    /// `quantity * pr(item)`
    pub utility: Utility,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QItemset {
    items: Vec<QItem>,
    utility: Utility,
}

impl QItemset {
    pub fn items(&self) -> &[QItem] {
        &self.items
    }

    pub fn utility(&self) -> Utility {
        self.utility
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, item: ItemId) -> Option<&QItem> {
        self.items
            .binary_search_by_key(&item, |q| q.item)
            .ok()
            .map(|i| &self.items[i])
    }
}

/// One transaction of the database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequence {
    sid: u32,
    itemsets: Vec<QItemset>,
    total_utility: Utility,
    flat_len: usize,
}

impl QSequence {
    pub fn sid(&self) -> u32 {
        self.sid
    }

    pub fn itemsets(&self) -> &[QItemset] {
        &self.itemsets
    }

    pub fn total_utility(&self) -> Utility {
        self.total_utility
    }

    /// Number of items over all itemsets.
    pub fn flat_len(&self) -> usize {
        self.flat_len
    }

    /// Items in flattened order with their itemset index.
    pub fn flat_items(&self) -> impl Iterator<Item = (usize, &QItem)> + '_ {
        self.itemsets
            .iter()
            .enumerate()
            .flat_map(|(k, set)| set.items.iter().map(move |q| (k, q)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeqDatabase {
    sequences: Vec<QSequence>,
    profits: ProfitTable,
    total_utility: Utility,
    item_index: BTreeMap<ItemId, Vec<u32>>,
}

/// Raw sequence input: itemsets of `(item, quantity)`.
pub type RawSequence = Vec<Vec<(ItemId, u32)>>;

impl QSeqDatabase {
    /// Builds a database from raw sequences, validating every constraint the
    /// text parser checks. `sids` are assigned `1..=n` in order.
    pub fn from_sequences(
        sequences: impl IntoIterator<Item = RawSequence>,
        profits: ProfitTable,
    ) -> Result<Self, ParseError> {
        let mut built = Vec::new();
        for (idx, raw) in sequences.into_iter().enumerate() {
            built.push(build_sequence(idx as u32 + 1, raw, &profits, idx + 1)?);
        }
        Self::assemble(built, profits)
    }

    fn assemble(sequences: Vec<QSequence>, profits: ProfitTable) -> Result<Self, ParseError> {
        let mut total = Utility::ZERO;
        let mut item_index: BTreeMap<ItemId, Vec<u32>> = BTreeMap::new();
        for (idx, seq) in sequences.iter().enumerate() {
            total = total
                .checked_add(seq.total_utility)
                .ok_or(ParseError::Overflow { line: idx + 1 })?;
            for (_, q) in seq.flat_items() {
                let sids = item_index.entry(q.item).or_default();
                if sids.last() != Some(&seq.sid) {
                    sids.push(seq.sid);
                }
            }
        }
        Ok(QSeqDatabase {
            sequences,
            profits,
            total_utility: total,
            item_index,
        })
    }

    pub fn sequences(&self) -> &[QSequence] {
        &self.sequences
    }

    pub fn sequence(&self, sid: u32) -> Option<&QSequence> {
        self.sequences.get((sid as usize).checked_sub(1)?)
    }

    pub fn profits(&self) -> &ProfitTable {
        &self.profits
    }

    /// `u(D)`
    pub fn total_utility(&self) -> Utility {
        self.total_utility
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Distinct items occurring in the database, ascending.
    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.item_index.keys().copied()
    }

    /// Sids of the sequences containing `item`, ascending.
    pub fn sids_containing(&self, item: ItemId) -> &[u32] {
        self.item_index.get(&item).map_or(&[], Vec::as_slice)
    }

    pub fn max_sequence_len(&self) -> usize {
        self.sequences
            .iter()
            .map(QSequence::flat_len)
            .max()
            .unwrap_or(0)
    }
}

fn build_sequence(
    sid: u32,
    raw: RawSequence,
    profits: &ProfitTable,
    line: usize,
) -> Result<QSequence, ParseError> {
    let mut itemsets = Vec::with_capacity(raw.len());
    let mut total = Utility::ZERO;
    let mut flat_len = 0;
    for raw_set in raw {
        if raw_set.is_empty() {
            return Err(ParseError::EmptyItemset { line });
        }
        let mut items = Vec::with_capacity(raw_set.len());
        let mut set_utility = Utility::ZERO;
        for (item, quantity) in raw_set {
            if let Some(prev) = items.last().map(|q: &QItem| q.item) {
                if item <= prev {
                    return Err(ParseError::UnsortedItemset { line, item });
                }
            }
            if quantity == 0 {
                return Err(ParseError::BadQuantity {
                    line,
                    item,
                    quantity: 0,
                });
            }
            let profit = profits
                .get(item)
                .ok_or(ParseError::UnknownItem { line, item })?;
            let utility = profit
                .checked_mul_qty(quantity)
                .ok_or(ParseError::Overflow { line })?;
            set_utility = set_utility
                .checked_add(utility)
                .ok_or(ParseError::Overflow { line })?;
            items.push(QItem {
                item,
                quantity,
                utility,
            });
        }
        flat_len += items.len();
        total = total
            .checked_add(set_utility)
            .ok_or(ParseError::Overflow { line })?;
        itemsets.push(QItemset {
            items,
            utility: set_utility,
        });
    }
    if itemsets.is_empty() {
        return Err(ParseError::Malformed {
            line,
            reason: "sequence has no itemsets".into(),
        });
    }
    Ok(QSequence {
        sid,
        itemsets,
        total_utility: total,
        flat_len,
    })
}

/// Parses one q-sequence per non-empty line.
pub fn parse_database(text: &str, profits: ProfitTable) -> Result<QSeqDatabase, ParseError> {
    let mut sequences = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let raw = parse_sequence_line(raw_line, line)?;
        let sid = sequences.len() as u32 + 1;
        sequences.push(build_sequence(sid, raw, &profits, line)?);
    }
    QSeqDatabase::assemble(sequences, profits)
}

fn parse_sequence_line(text: &str, line: usize) -> Result<RawSequence, ParseError> {
    let mut itemsets = Vec::new();
    let mut current: Vec<(ItemId, u32)> = Vec::new();
    let mut tokens = text.split_whitespace();
    let mut terminated = false;
    while let Some(tok) = tokens.next() {
        match tok {
            "-1" => {
                if current.is_empty() {
                    return Err(ParseError::EmptyItemset { line });
                }
                itemsets.push(std::mem::take(&mut current));
            }
            "-2" => {
                if let Some(extra) = tokens.next() {
                    return Err(ParseError::Malformed {
                        line,
                        reason: format!("token `{extra}` after `-2`"),
                    });
                }
                if !current.is_empty() {
                    itemsets.push(std::mem::take(&mut current));
                }
                terminated = true;
            }
            _ => {
                let (id, qty) = tok.split_once(':').ok_or_else(|| ParseError::Malformed {
                    line,
                    reason: format!("expected `<item>:<quantity>`, found `{tok}`"),
                })?;
                let item = parse_item_id(id, line)?;
                let quantity: u64 = qty.parse().map_err(|_| ParseError::Malformed {
                    line,
                    reason: format!("invalid quantity `{qty}`"),
                })?;
                let quantity = match u32::try_from(quantity) {
                    Ok(q) if q >= 1 => q,
                    _ => {
                        return Err(ParseError::BadQuantity {
                            line,
                            item,
                            quantity,
                        })
                    }
                };
                current.push((item, quantity));
            }
        }
    }
    if !terminated {
        return Err(ParseError::MissingTerminator { line });
    }
    Ok(itemsets)
}

/// A sequence of itemsets without quantities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    itemsets: Vec<Vec<ItemId>>,
}

impl Pattern {
    pub fn new(itemsets: Vec<Vec<ItemId>>) -> Result<Self, PatternError> {
        if itemsets.is_empty() {
            return Err(PatternError::Empty);
        }
        for (k, set) in itemsets.iter().enumerate() {
            if set.is_empty() {
                return Err(PatternError::EmptyItemset(k));
            }
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PatternError::Unsorted(k));
            }
        }
        Ok(Pattern { itemsets })
    }

    pub fn single(item: ItemId) -> Self {
        Pattern {
            itemsets: vec![vec![item]],
        }
    }

    pub fn itemsets(&self) -> &[Vec<ItemId>] {
        &self.itemsets
    }

    /// Total item count (the k of a k-sequence).
    pub fn len(&self) -> usize {
        self.itemsets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    pub fn last_item(&self) -> ItemId {
        *self
            .itemsets
            .last()
            .and_then(|s| s.last())
            .expect("patterns are non-empty")
    }

    /// `item` appended to the last itemset; `None` unless it sorts after
    /// the current last item.
    pub fn i_extend(&self, item: ItemId) -> Option<Pattern> {
        if item <= self.last_item() {
            return None;
        }
        let mut itemsets = self.itemsets.clone();
        itemsets.last_mut().expect("non-empty").push(item);
        Some(Pattern { itemsets })
    }

    /// `item` as a new trailing itemset.
    pub fn s_extend(&self, item: ItemId) -> Pattern {
        let mut itemsets = self.itemsets.clone();
        itemsets.push(vec![item]);
        Pattern { itemsets }
    }
}

/// Itemset count first, then item ids lexicographically.
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.itemsets
            .len()
            .cmp(&other.itemsets.len())
            .then_with(|| self.itemsets.cmp(&other.itemsets))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `1 -1 2 3 -2`
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, set) in self.itemsets.iter().enumerate() {
            if k > 0 {
                f.write_str(" -1 ")?;
            }
            for (j, item) in set.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{item}")?;
            }
        }
        f.write_str(" -2")
    }
}

/// Accepts the rendered form; the trailing `-2` and a final `-1` are optional.
impl FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut itemsets = Vec::new();
        let mut current = Vec::new();
        for tok in s.split_whitespace() {
            match tok {
                "-1" | "-2" => {
                    if !current.is_empty() {
                        itemsets.push(std::mem::take(&mut current));
                    }
                    if tok == "-2" {
                        break;
                    }
                }
                _ => match tok.parse::<ItemId>() {
                    Ok(id) if id > 0 => current.push(id),
                    _ => return Err(PatternError::BadToken(tok.to_string())),
                },
            }
        }
        if !current.is_empty() {
            itemsets.push(current);
        }
        Pattern::new(itemsets)
    }
}

/// One occurrence of a pattern: strictly increasing 1-based flat positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchVector {
    pub positions: Vec<usize>,
}

/// Every way `pattern` occurs in `seq`. Exponential in the worst case.
pub fn find_matches(pattern: &Pattern, seq: &QSequence) -> Vec<MatchVector> {
    let mut offsets = Vec::with_capacity(seq.itemsets.len());
    let mut acc = 0;
    for set in &seq.itemsets {
        offsets.push(acc);
        acc += set.len();
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(pattern.itemsets.len());
    collect_matches(pattern, seq, &offsets, 0, 0, &mut chosen, &mut out);
    out
}

fn collect_matches(
    pattern: &Pattern,
    seq: &QSequence,
    offsets: &[usize],
    pattern_idx: usize,
    from_itemset: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<MatchVector>,
) {
    if pattern_idx == pattern.itemsets.len() {
        let mut positions = Vec::with_capacity(pattern.len());
        for (set_idx, &k) in pattern.itemsets.iter().zip(chosen.iter()) {
            let target = &seq.itemsets[k];
            for &item in set_idx {
                let j = target
                    .items
                    .binary_search_by_key(&item, |q| q.item)
                    .expect("checked on selection");
                positions.push(offsets[k] + j + 1);
            }
        }
        out.push(MatchVector { positions });
        return;
    }
    let wanted = &pattern.itemsets[pattern_idx];
    for k in from_itemset..seq.itemsets.len() {
        let target = &seq.itemsets[k];
        if wanted.iter().all(|&i| target.get(i).is_some()) {
            chosen.push(k);
            collect_matches(pattern, seq, offsets, pattern_idx + 1, k + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// Sum of item utilities at the matched positions.
pub fn match_utility(seq: &QSequence, m: &MatchVector) -> Utility {
    let flat: Vec<&QItem> = seq.flat_items().map(|(_, q)| q).collect();
    m.positions.iter().map(|&p| flat[p - 1].utility).sum()
}

/// `u(t, s)`: the best match, or `None` when `t` does not occur in `s`.
pub fn naive_utility_in(pattern: &Pattern, seq: &QSequence) -> Option<Utility> {
    let flat: Vec<Utility> = seq.flat_items().map(|(_, q)| q.utility).collect();
    find_matches(pattern, seq)
        .iter()
        .map(|m| m.positions.iter().map(|&p| flat[p - 1]).sum())
        .max()
}

/// `u(t)`: per-transaction best match, summed over the database.
pub fn naive_pattern_utility(pattern: &Pattern, db: &QSeqDatabase) -> Utility {
    db.sequences
        .iter()
        .filter_map(|s| naive_utility_in(pattern, s))
        .sum()
}

/// Greedy earliest-itemset containment test.
pub fn contains(seq: &QSequence, pattern: &Pattern) -> bool {
    let mut k = 0;
    for wanted in &pattern.itemsets {
        loop {
            let Some(set) = seq.itemsets.get(k) else {
                return false;
            };
            k += 1;
            if wanted.iter().all(|&i| set.get(i).is_some()) {
                break;
            }
        }
    }
    true
}
