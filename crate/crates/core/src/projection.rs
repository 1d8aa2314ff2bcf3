//! Projected databases over utility-linked lists.
//!
//! A projection keeps, per transaction, the positions where some match of the
//! prefix ends ("concatenation points") together with the best utility of any
//! match ending there. Every quantity the search needs is read off those
//! points: `u(t)`, SWU, SEU, PEU, the candidate items of both concatenation
//! kinds and their look-ahead sums.
//!
//! Items removed by irrelevant-item pruning are dropped from the remaining
//! utilities of a subtree by rematerializing a per-transaction rest array; the
//! master lists in [`UlIndex`] are never modified.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::model::{ItemId, Pattern, QSeqDatabase};
use crate::ullist::UlList;
use crate::utility::Utility;

/// The master UL-lists of a database plus a dense item coding.
///
/// Item codes follow ascending item id, so code order is item order.
#[derive(Debug, Clone)]
pub struct UlIndex {
    lists: Vec<UlList>,
    codes: Vec<Box<[u32]>>,
    items: Vec<ItemId>,
    postings: Vec<Vec<u32>>,
    max_len: usize,
    total_utility: Utility,
}

impl UlIndex {
    pub fn build(db: &QSeqDatabase) -> UlIndex {
        let items: Vec<ItemId> = db.items().collect();
        let lists: Vec<UlList> = db.sequences().iter().map(UlList::build).collect();
        let code_of = |item: ItemId| items.binary_search(&item).expect("item indexed") as u32;
        let codes = lists
            .iter()
            .map(|l| l.elements().iter().map(|e| code_of(e.item)).collect())
            .collect();
        let postings = items
            .iter()
            .map(|&i| db.sids_containing(i).iter().map(|sid| sid - 1).collect())
            .collect();
        UlIndex {
            lists,
            codes,
            items,
            postings,
            max_len: db.max_sequence_len(),
            total_utility: db.total_utility(),
        }
    }

    pub fn lists(&self) -> &[UlList] {
        &self.lists
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn code_of(&self, item: ItemId) -> Option<u32> {
        self.items.binary_search(&item).ok().map(|c| c as u32)
    }

    pub fn item_of(&self, code: u32) -> ItemId {
        self.items[code as usize]
    }

    pub fn total_utility(&self) -> Utility {
        self.total_utility
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPoint {
    /// 1-based position of the last item of the match.
    pub position: u32,
    /// Best utility over all prefix matches ending at `position`.
    pub max_prefix_utility: Utility,
}

#[derive(Debug, Clone)]
pub struct ProjectedSeq {
    seq: u32,
    points: Vec<MatchPoint>,
    rest: Option<Arc<[Utility]>>,
    utility: Utility,
    peu: Utility,
    seu: Utility,
}

impl ProjectedSeq {
    fn new(
        index: &UlIndex,
        seq: u32,
        points: Vec<MatchPoint>,
        rest: Option<Arc<[Utility]>>,
        parent_seu: Utility,
    ) -> ProjectedSeq {
        let mut out = ProjectedSeq {
            seq,
            points,
            rest,
            utility: Utility::ZERO,
            peu: Utility::ZERO,
            seu: Utility::ZERO,
        };
        out.utility = out
            .points
            .iter()
            .map(|p| p.max_prefix_utility)
            .max()
            .unwrap_or_default();
        out.peu = out.compute_peu(index);
        let first_match = out.utility + out.rest_at(index, out.start_point());
        out.seu = first_match.min(parent_seu);
        out
    }

    pub fn sid(&self) -> u32 {
        self.seq + 1
    }

    pub fn points(&self) -> &[MatchPoint] {
        &self.points
    }

    /// The smallest concatenation point.
    pub fn start_point(&self) -> u32 {
        self.points[0].position
    }

    /// Remaining utility after `position`, net of items pruned in this
    /// subtree. Only positions from the start point on are meaningful once
    /// pruning has applied.
    pub fn rest_at(&self, index: &UlIndex, position: u32) -> Utility {
        match &self.rest {
            Some(rest) => rest[position as usize - 1],
            None => {
                index.lists[self.seq as usize]
                    .element(position as usize)
                    .remaining
            }
        }
    }

    /// `u(t, s)`
    pub fn utility(&self) -> Utility {
        self.utility
    }

    /// `PEU(t, s)`
    pub fn peu(&self) -> Utility {
        self.peu
    }

    /// `SEU(t, s)`: the best match plus the rest after the first match,
    /// capped by the parent's value (the transaction utility at the root).
    pub fn seu(&self) -> Utility {
        self.seu
    }

    fn compute_peu(&self, index: &UlIndex) -> Utility {
        self.points
            .iter()
            .map(|p| p.max_prefix_utility + self.rest_at(index, p.position))
            .max()
            .unwrap_or_default()
    }
}

/// The projected database of one prefix pattern.
#[derive(Debug, Clone)]
pub struct ProjectedDb {
    prefix: Pattern,
    seqs: Vec<ProjectedSeq>,
    removed: Arc<Vec<bool>>,
    utility: Utility,
    swu: Utility,
    seu: Utility,
    peu: Utility,
    entries: usize,
}

impl ProjectedDb {
    fn assemble(
        index: &UlIndex,
        prefix: Pattern,
        seqs: Vec<ProjectedSeq>,
        removed: Arc<Vec<bool>>,
    ) -> ProjectedDb {
        let mut pd = ProjectedDb {
            prefix,
            seqs,
            removed,
            utility: Utility::ZERO,
            swu: Utility::ZERO,
            seu: Utility::ZERO,
            peu: Utility::ZERO,
            entries: 0,
        };
        pd.utility = pd.seqs.iter().map(|s| s.utility).sum();
        pd.swu = pd
            .seqs
            .iter()
            .map(|s| index.lists[s.seq as usize].total_utility())
            .sum();
        pd.seu = pd.seqs.iter().map(|s| s.seu).sum();
        pd.peu = pd.seqs.iter().map(|s| s.peu).sum();
        pd.entries = pd.seqs.iter().map(|s| s.points.len()).sum();
        pd
    }

    pub fn prefix(&self) -> &Pattern {
        &self.prefix
    }

    pub fn projections(&self) -> &[ProjectedSeq] {
        &self.seqs
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn sids(&self) -> impl Iterator<Item = u32> + '_ {
        self.seqs.iter().map(ProjectedSeq::sid)
    }

    /// `u(prefix)`
    pub fn utility(&self) -> Utility {
        self.utility
    }

    /// Sum of whole-transaction utilities over supporting transactions.
    pub fn swu(&self) -> Utility {
        self.swu
    }

    pub fn seu(&self) -> Utility {
        self.seu
    }

    /// Prefix extension utility, net of items pruned in this subtree.
    pub fn peu(&self) -> Utility {
        self.peu
    }

    /// Match points plus rematerialized rest entries owned by this node.
    pub fn entries(&self) -> usize {
        self.entries
    }

    /// Items pruned anywhere on the path to this node.
    pub fn removed_items(&self, index: &UlIndex) -> Vec<ItemId> {
        self.removed
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(c, _)| index.item_of(c as u32))
            .collect()
    }

    pub fn is_removed(&self, code: u32) -> bool {
        self.removed[code as usize]
    }

    /// Projection of the 1-sequence `<item>`; empty if the item never occurs.
    pub fn project_item(index: &UlIndex, item: ItemId) -> ProjectedDb {
        let removed = Arc::new(vec![false; index.item_count()]);
        let Some(code) = index.code_of(item) else {
            return ProjectedDb::assemble(index, Pattern::single(item), Vec::new(), removed);
        };
        let seqs = index.postings[code as usize]
            .iter()
            .map(|&seq| {
                let list = &index.lists[seq as usize];
                let points = list
                    .occurrences(item)
                    .map(|p| MatchPoint {
                        position: p as u32,
                        max_prefix_utility: list.element(p).utility,
                    })
                    .collect();
                ProjectedSeq::new(index, seq, points, None, list.total_utility())
            })
            .collect();
        ProjectedDb::assemble(index, Pattern::single(item), seqs, removed)
    }

    /// Projection of an arbitrary pattern, built by chaining extensions.
    pub fn project_pattern(index: &UlIndex, pattern: &Pattern) -> ProjectedDb {
        let mut sets = pattern.itemsets().iter();
        let first = sets.next().expect("patterns are non-empty");
        let mut pd = ProjectedDb::project_item(index, first[0]);
        for &item in &first[1..] {
            pd = pd.extend_i(index, item);
        }
        for set in sets {
            pd = pd.extend_s(index, set[0]);
            for &item in &set[1..] {
                pd = pd.extend_i(index, item);
            }
        }
        pd
    }

    /// I-concatenation: `item` joins the last itemset of the prefix.
    ///
    /// # Panics
    /// If `item` does not sort after the prefix's last item.
    pub fn extend_i(&self, index: &UlIndex, item: ItemId) -> ProjectedDb {
        let prefix = self
            .prefix
            .i_extend(item)
            .expect("I-concatenation item must follow the last prefix item");
        let Some(code) = index.code_of(item) else {
            return self.child(index, prefix, Vec::new());
        };
        debug_assert!(!self.is_removed(code), "extending with a pruned item");
        let mut seqs = Vec::new();
        for ps in self.containing(index, code) {
            let list = &index.lists[ps.seq as usize];
            let codes = &index.codes[ps.seq as usize];
            let mut points = Vec::new();
            for point in &ps.points {
                let set = list.itemset_of(point.position as usize);
                for pos in point.position as usize + 1..=list.len() {
                    if list.itemset_of(pos) != set || codes[pos - 1] > code {
                        break;
                    }
                    if codes[pos - 1] == code {
                        points.push(MatchPoint {
                            position: pos as u32,
                            max_prefix_utility: point.max_prefix_utility
                                + list.element(pos).utility,
                        });
                        break;
                    }
                }
            }
            if !points.is_empty() {
                seqs.push(ProjectedSeq::new(
                    index,
                    ps.seq,
                    points,
                    ps.rest.clone(),
                    ps.seu,
                ));
            }
        }
        self.child(index, prefix, seqs)
    }

    /// S-concatenation: `item` starts a new trailing itemset.
    pub fn extend_s(&self, index: &UlIndex, item: ItemId) -> ProjectedDb {
        let prefix = self.prefix.s_extend(item);
        let Some(code) = index.code_of(item) else {
            return self.child(index, prefix, Vec::new());
        };
        debug_assert!(!self.is_removed(code), "extending with a pruned item");
        let mut seqs = Vec::new();
        for ps in self.containing(index, code) {
            let list = &index.lists[ps.seq as usize];
            let mut points = Vec::new();
            let mut best: Option<Utility> = None;
            let mut next_point = 0;
            for pos in list.occurrences(item) {
                let set = list.itemset_of(pos);
                while next_point < ps.points.len()
                    && list.itemset_of(ps.points[next_point].position as usize) < set
                {
                    let u = ps.points[next_point].max_prefix_utility;
                    best = Some(best.map_or(u, |b| b.max(u)));
                    next_point += 1;
                }
                if let Some(b) = best {
                    points.push(MatchPoint {
                        position: pos as u32,
                        max_prefix_utility: b + list.element(pos).utility,
                    });
                }
            }
            if !points.is_empty() {
                seqs.push(ProjectedSeq::new(
                    index,
                    ps.seq,
                    points,
                    ps.rest.clone(),
                    ps.seu,
                ));
            }
        }
        self.child(index, prefix, seqs)
    }

    /// Projected transactions that contain the item `code` anywhere.
    /// Both sides are sorted by transaction, so this is a merge.
    fn containing<'a>(
        &'a self,
        index: &'a UlIndex,
        code: u32,
    ) -> impl Iterator<Item = &'a ProjectedSeq> + 'a {
        let posting = &index.postings[code as usize];
        let mut cursor = 0;
        self.seqs.iter().filter(move |ps| {
            while cursor < posting.len() && posting[cursor] < ps.seq {
                cursor += 1;
            }
            cursor < posting.len() && posting[cursor] == ps.seq
        })
    }

    fn child(&self, index: &UlIndex, prefix: Pattern, seqs: Vec<ProjectedSeq>) -> ProjectedDb {
        ProjectedDb::assemble(index, prefix, seqs, Arc::clone(&self.removed))
    }

    /// Candidate items of both concatenation kinds with their look-ahead sums.
    pub fn scan_candidates(&self, index: &UlIndex) -> CandidateSet {
        self.scan_candidates_with(index, &mut Scratch::new(index.item_count()))
    }

    pub fn scan_candidates_with(&self, index: &UlIndex, scratch: &mut Scratch) -> CandidateSet {
        for (ord, ps) in self.seqs.iter().enumerate() {
            let stamp = ord as u32 + 1;
            self.visit_extensions(index, ps, |code, kind| match kind {
                Concat::I => scratch.i.add(code, stamp, ps.peu),
                Concat::S => scratch.s.add(code, stamp, ps.peu),
            });
        }
        let to_candidates = |acc: &mut Accumulator| {
            acc.drain()
                .map(|(code, las)| Candidate {
                    item: index.item_of(code),
                    code,
                    las,
                })
                .collect()
        };
        CandidateSet {
            i: to_candidates(&mut scratch.i),
            s: to_candidates(&mut scratch.s),
        }
    }

    /// Calls `f` for every unpruned item occurrence that can extend the prefix
    /// in one transaction: after a point inside its itemset (I), or anywhere
    /// in an itemset after the start point's (S).
    fn visit_extensions(&self, index: &UlIndex, ps: &ProjectedSeq, mut f: impl FnMut(u32, Concat)) {
        let list = &index.lists[ps.seq as usize];
        let codes = &index.codes[ps.seq as usize];
        for point in &ps.points {
            let set = list.itemset_of(point.position as usize);
            for pos in point.position as usize + 1..=list.len() {
                if list.itemset_of(pos) != set {
                    break;
                }
                let c = codes[pos - 1];
                if !self.removed[c as usize] {
                    f(c, Concat::I);
                }
            }
        }
        let start = ps.start_point() as usize;
        let start_set = list.itemset_of(start);
        for pos in start + 1..=list.len() {
            if list.itemset_of(pos) == start_set {
                continue;
            }
            let c = codes[pos - 1];
            if !self.removed[c as usize] {
                f(c, Concat::S);
            }
        }
    }

    /// Irrelevant-item pruning; see [`ProjectedDb::apply_ips_with`].
    pub fn apply_ips(self, index: &UlIndex, min_util: Utility) -> (ProjectedDb, Vec<ItemId>) {
        self.apply_ips_with(index, min_util, &mut Scratch::new(index.item_count()))
    }

    /// Removes every extension item whose summed `PEU(t, s)`, over the
    /// transactions where it can extend the prefix by either concatenation,
    /// is below `min_util`. One pass, no fixpoint. Returns the pruned items.
    pub fn apply_ips_with(
        mut self,
        index: &UlIndex,
        min_util: Utility,
        scratch: &mut Scratch,
    ) -> (ProjectedDb, Vec<ItemId>) {
        for (ord, ps) in self.seqs.iter().enumerate() {
            let stamp = ord as u32 + 1;
            self.visit_extensions(index, ps, |code, _| scratch.i.add(code, stamp, ps.peu));
        }
        let mut pruned_codes: Vec<u32> = scratch
            .i
            .drain()
            .filter(|&(_, sum)| sum < min_util)
            .map(|(code, _)| code)
            .collect();
        pruned_codes.sort_unstable();
        if pruned_codes.is_empty() {
            return (self, Vec::new());
        }

        let mut removed = (*self.removed).clone();
        for &c in &pruned_codes {
            removed[c as usize] = true;
        }
        let mut materialized = 0;
        let mut zeros: Option<Arc<[Utility]>> = None;
        for ps in &mut self.seqs {
            let codes = &index.codes[ps.seq as usize];
            let after_start = &codes[ps.start_point() as usize..];
            let touched = after_start
                .iter()
                .any(|&c| removed[c as usize] && !self.removed[c as usize]);
            if !touched {
                continue;
            }
            let list = &index.lists[ps.seq as usize];
            if after_start.iter().all(|&c| removed[c as usize]) {
                // nothing left to extend with: every rest from the start on is zero
                let zeros = zeros.get_or_insert_with(|| {
                    materialized += index.max_len;
                    vec![Utility::ZERO; index.max_len].into()
                });
                ps.rest = Some(Arc::clone(zeros));
                ps.peu = ps.utility;
                continue;
            }
            let mut rest = vec![Utility::ZERO; list.len()];
            let mut acc = Utility::ZERO;
            for idx in (0..list.len()).rev() {
                rest[idx] = acc;
                if !removed[codes[idx] as usize] {
                    acc += list.elements()[idx].utility;
                }
            }
            materialized += rest.len();
            ps.rest = Some(rest.into());
            ps.peu = ps.compute_peu(index);
        }
        self.removed = Arc::new(removed);
        self.peu = self.seqs.iter().map(|s| s.peu).sum();
        self.entries += materialized;
        let items = pruned_codes.iter().map(|&c| index.item_of(c)).collect();
        (self, items)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Concat {
    I,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub item: ItemId,
    pub code: u32,
    /// Look-ahead sum: `PEU(t, s)` over the transactions this extension occurs in.
    pub las: Utility,
}

/// Extension items of a prefix, each list ascending by item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub i: Vec<Candidate>,
    pub s: Vec<Candidate>,
}

impl CandidateSet {
    /// `I(t)_rest`: every item that can extend the prefix either way.
    pub fn rest_items(&self) -> BTreeSet<ItemId> {
        self.i.iter().chain(&self.s).map(|c| c.item).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty() && self.s.is_empty()
    }

    pub fn i_las(&self, item: ItemId) -> Option<Utility> {
        self.i.iter().find(|c| c.item == item).map(|c| c.las)
    }

    pub fn s_las(&self, item: ItemId) -> Option<Utility> {
        self.s.iter().find(|c| c.item == item).map(|c| c.las)
    }
}

/// Reusable per-item accumulators for candidate scans.
#[derive(Debug, Clone)]
pub struct Scratch {
    i: Accumulator,
    s: Accumulator,
}

impl Scratch {
    pub fn new(item_count: usize) -> Scratch {
        Scratch {
            i: Accumulator::new(item_count),
            s: Accumulator::new(item_count),
        }
    }
}

/// Sums one value per (item, transaction) pair.
#[derive(Debug, Clone)]
struct Accumulator {
    sums: Vec<Utility>,
    stamps: Vec<u32>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn new(n: usize) -> Accumulator {
        Accumulator {
            sums: vec![Utility::ZERO; n],
            stamps: vec![0; n],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, code: u32, stamp: u32, value: Utility) {
        let c = code as usize;
        if self.stamps[c] == stamp {
            return;
        }
        if self.stamps[c] == 0 {
            self.touched.push(code);
        }
        self.stamps[c] = stamp;
        self.sums[c] += value;
    }

    /// Yields `(code, sum)` ascending by code and resets.
    fn drain(&mut self) -> impl Iterator<Item = (u32, Utility)> + '_ {
        self.touched.sort_unstable();
        let sums = &mut self.sums;
        let stamps = &mut self.stamps;
        self.touched.drain(..).map(move |c| {
            let sum = std::mem::take(&mut sums[c as usize]);
            stamps[c as usize] = 0;
            (c, sum)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::naive_pattern_utility;
    use crate::model::tests::running_db;

    fn u(v: u64) -> Utility {
        Utility::from_units(v)
    }

    fn setup() -> (QSeqDatabase, UlIndex) {
        let db = running_db();
        let index = UlIndex::build(&db);
        (db, index)
    }

    fn points(pd: &ProjectedDb, sid: u32) -> Vec<(u32, Utility)> {
        pd.projections()
            .iter()
            .find(|p| p.sid() == sid)
            .map(|p| {
                p.points()
                    .iter()
                    .map(|m| (m.position, m.max_prefix_utility))
                    .collect()
            })
            .unwrap_or_default()
    }

    #[test]
    fn project_single_items() {
        let (_, index) = setup();
        let a = ProjectedDb::project_item(&index, 1);
        assert_eq!(a.projections().len(), 6);
        assert_eq!(points(&a, 1), vec![(1, u(10)), (3, u(15)), (6, u(20))]);
        assert_eq!(a.utility(), u(130));
        assert_eq!(a.swu(), u(441));

        let f = ProjectedDb::project_item(&index, 6);
        assert_eq!(f.sids().collect::<Vec<_>>(), vec![6]);
        assert_eq!(f.swu(), u(81));

        let b = ProjectedDb::project_item(&index, 2);
        assert_eq!(b.swu(), u(441));

        let missing = ProjectedDb::project_item(&index, 42);
        assert!(missing.is_empty());
        assert_eq!(missing.utility(), Utility::ZERO);
    }

    #[test]
    fn i_extension() {
        let (_, index) = setup();
        let ac = ProjectedDb::project_item(&index, 1).extend_i(&index, 3);
        assert_eq!(points(&ac, 1), vec![(2, u(22)), (5, u(23))]);

        let ab = ProjectedDb::project_item(&index, 1).extend_s(&index, 2);
        let abd = ab.extend_i(&index, 4);
        assert_eq!(points(&abd, 1), vec![(8, u(38))]);

        // f never shares an itemset with a later item
        let f = ProjectedDb::project_item(&index, 6);
        assert!(f.extend_i(&index, 7).is_empty());
    }

    #[test]
    fn s_extension() {
        let (_, index) = setup();
        let ab = ProjectedDb::project_item(&index, 1).extend_s(&index, 2);
        assert_eq!(points(&ab, 1), vec![(4, u(13)), (7, u(30))]);
        assert_eq!(ab.utility(), u(160));
        // e is always in a last itemset in S1, nothing follows it
        let e = ProjectedDb::project_item(&index, 5);
        assert!(points(&e.extend_s(&index, 1), 1).is_empty());
    }

    #[test]
    fn bounds_of_running_example() {
        let (_, index) = setup();
        let ab = ProjectedDb::project_item(&index, 1).extend_s(&index, 2);
        assert_eq!(ab.seu(), u(279));
        assert_eq!(ab.peu(), u(252));
        let by_sid = |sid: u32| {
            ab.projections()
                .iter()
                .find(|p| p.sid() == sid)
                .unwrap()
                .clone()
        };
        assert_eq!(by_sid(1).seu(), u(84));
        assert_eq!(by_sid(1).peu(), u(67));
        assert_eq!(by_sid(2).peu(), u(46));
        let peus: Vec<_> = ab.projections().iter().map(|p| p.peu()).collect();
        assert_eq!(peus, [67, 46, 37, 48, 54].map(u).to_vec());
    }

    #[test]
    fn match_at_last_position_has_no_rest() {
        let db = crate::model::parse_database(
            "1:1 -1 2:2 -2",
            crate::model::parse_profit_table("1 1\n2 1").unwrap(),
        )
        .unwrap();
        let index = UlIndex::build(&db);
        let pd = ProjectedDb::project_pattern(&index, &"1 -1 2".parse().unwrap());
        assert_eq!(pd.utility(), u(3));
        assert_eq!(pd.peu(), u(3));
        assert_eq!(pd.seu(), u(3));
        assert!(pd.scan_candidates(&index).is_empty());
    }

    #[test]
    fn candidates_of_ab_in_s1() {
        let (db, _) = setup();
        let only_s1 = QSeqDatabase::from_sequences(
            vec![vec![
                vec![(1, 2), (3, 3)],
                vec![(1, 3), (2, 1), (3, 2)],
                vec![(1, 4), (2, 5), (4, 4)],
                vec![(5, 3)],
            ]],
            db.profits().clone(),
        )
        .unwrap();
        let index = UlIndex::build(&only_s1);
        let ab = ProjectedDb::project_pattern(&index, &"1 -1 2".parse().unwrap());
        let c = ab.scan_candidates(&index);
        let items = |v: &[Candidate]| v.iter().map(|c| c.item).collect::<Vec<_>>();
        assert_eq!(items(&c.i), vec![3, 4]);
        assert_eq!(items(&c.s), vec![1, 2, 4, 5]);
        assert!(c.i.iter().chain(&c.s).all(|c| c.las == u(67)));
        assert_eq!(c.rest_items(), [1, 2, 3, 4, 5].into_iter().collect());
    }

    #[test]
    fn candidates_over_whole_database() {
        let (_, index) = setup();
        let ab = ProjectedDb::project_pattern(&index, &"1 -1 2".parse().unwrap());
        let c = ab.scan_candidates(&index);
        let items = |v: &[Candidate]| v.iter().map(|c| c.item).collect::<Vec<_>>();
        assert!(items(&c.i).iter().all(|i| [3, 4, 5].contains(i)));
        assert!(items(&c.s).iter().all(|i| [1, 2, 3, 4, 5].contains(i)));
        // d follows b in S1 (itemset 3), S2, S3, S4 and S5; b's LAS sum covers all five
        assert_eq!(c.i_las(4), Some(u(252)));
    }

    #[test]
    fn ips_on_f() {
        let (_, index) = setup();
        let f = ProjectedDb::project_item(&index, 6);
        assert_eq!(f.peu(), u(81));

        let (same, removed) = f.clone().apply_ips(&index, u(60));
        assert!(removed.is_empty());
        assert_eq!(same.peu(), u(81));

        let (pruned, removed) = f.clone().apply_ips(&index, u(100));
        assert_eq!(removed, vec![1, 2, 4]);
        assert_eq!(pruned.peu(), u(24));
        assert_eq!(pruned.removed_items(&index), vec![1, 2, 4]);
        assert!(pruned.scan_candidates(&index).is_empty());

        let (untouched, removed) = f.apply_ips(&index, Utility::ZERO);
        assert!(removed.is_empty());
        assert_eq!(untouched.peu(), u(81));
    }

    #[test]
    fn dp_agrees_with_naive_utility() {
        let (db, index) = setup();
        for text in [
            "1 -1 2",
            "1 3",
            "1 -1 1",
            "1 3 -1 1 2 -1 4",
            "5 -1 2 4",
            "2 -1 5",
        ] {
            let p: Pattern = text.parse().unwrap();
            let pd = ProjectedDb::project_pattern(&index, &p);
            assert_eq!(pd.utility(), naive_pattern_utility(&p, &db), "{text}");
        }
    }
}
