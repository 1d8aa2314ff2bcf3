//! Depth-first search of the lexicographic sequence tree.
//!
//! [`mine`] seeds one subtree per item whose SWU reaches the threshold,
//! then [`MiningContext::pgrowth`] prunes irrelevant items, scans the
//! remaining candidates, filters them by their look-ahead sums and hands
//! each survivor to [`MiningContext::judge`]. Within a node all
//! I-concatenations run before all S-concatenations, each in ascending item
//! order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ItemId, Pattern, QSeqDatabase};
use crate::projection::{ProjectedDb, Scratch, UlIndex};
use crate::utility::{Ratio, Utility};

/// The bound Judge uses to decide whether to expand a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    Swu,
    Seu,
    Peu,
}

impl BoundMode {
    pub const ALL: [BoundMode; 3] = [BoundMode::Peu, BoundMode::Seu, BoundMode::Swu];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundMode::Swu => "swu",
            BoundMode::Seu => "seu",
            BoundMode::Peu => "peu",
        }
    }
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "swu" => Ok(BoundMode::Swu),
            "seu" => Ok(BoundMode::Seu),
            "peu" => Ok(BoundMode::Peu),
            other => Err(format!(
                "unknown bound `{other}` (expected peu, seu or swu)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// δ, applied as `ceil(δ · u(D))`.
    Ratio(Ratio),
    Absolute(Utility),
}

impl Threshold {
    pub fn resolve(&self, total: Utility) -> Utility {
        match self {
            Threshold::Ratio(r) => r.ceil_mul(total),
            Threshold::Absolute(u) => *u,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinerConfig {
    pub threshold: Threshold,
    pub bound: BoundMode,
    pub las: bool,
    pub ips: bool,
    pub max_pattern_length: Option<usize>,
    /// Fan the per-item subtrees out over the rayon pool.
    pub parallel: bool,
    pub time_budget: Option<Duration>,
    /// Check the bound chain and anti-monotonicity at every node.
    pub audit: bool,
}

impl MinerConfig {
    /// Full configuration: PEU bound, LAS and IPS on.
    pub fn with_ratio(ratio: Ratio) -> Self {
        Self::new(Threshold::Ratio(ratio))
    }

    pub fn with_min_util(min_util: Utility) -> Self {
        Self::new(Threshold::Absolute(min_util))
    }

    fn new(threshold: Threshold) -> Self {
        MinerConfig {
            threshold,
            bound: BoundMode::Peu,
            las: true,
            ips: true,
            max_pattern_length: None,
            parallel: false,
            time_budget: None,
            audit: false,
        }
    }

    pub fn bound(mut self, bound: BoundMode) -> Self {
        self.bound = bound;
        self
    }

    pub fn las(mut self, on: bool) -> Self {
        self.las = on;
        self
    }

    pub fn ips(mut self, on: bool) -> Self {
        self.ips = on;
        self
    }

    pub fn max_pattern_length(mut self, cap: Option<usize>) -> Self {
        self.max_pattern_length = cap;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn time_budget(mut self, budget: Option<Duration>) -> Self {
        self.time_budget = budget;
        self
    }

    pub fn audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningStats {
    pub min_util: Utility,
    pub nodes_visited: u64,
    /// Judge calls plus the 1-sequences examined at the root.
    pub candidates_generated: u64,
    pub las_pruned_items: u64,
    pub ips_removed_items: u64,
    pub husp_count: u64,
    pub elapsed_millis: u64,
    pub peak_projected_entries: u64,
}

impl MiningStats {
    fn absorb(&mut self, other: &MiningStats) {
        self.nodes_visited += other.nodes_visited;
        self.candidates_generated += other.candidates_generated;
        self.las_pruned_items += other.las_pruned_items;
        self.ips_removed_items += other.ips_removed_items;
        self.husp_count += other.husp_count;
        // concurrent subtrees may all peak at once
        self.peak_projected_entries += other.peak_projected_entries;
    }

    /// Single-line JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuspResult {
    pub pattern: Pattern,
    pub utility: Utility,
}

/// Bound values of one node, taken before the node's own IPS pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundSnapshot {
    pub utility: Utility,
    pub peu: Utility,
    pub seu: Utility,
    pub swu: Utility,
}

impl BoundSnapshot {
    fn of(pd: &ProjectedDb) -> Self {
        BoundSnapshot {
            utility: pd.utility(),
            peu: pd.peu(),
            seu: pd.seu(),
            swu: pd.swu(),
        }
    }
}

/// Debug record of bound checks made during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundAudit {
    pub nodes_checked: u64,
    pub edges_checked: u64,
    pub violations: Vec<String>,
    /// One-step extensions discarded by look-ahead sums.
    pub las_pruned: Vec<Pattern>,
}

impl BoundAudit {
    fn check(&mut self, pattern: &Pattern, node: BoundSnapshot, parent: Option<BoundSnapshot>) {
        self.nodes_checked += 1;
        if !(node.utility <= node.peu && node.peu <= node.seu && node.seu <= node.swu) {
            self.violations
                .push(format!("{pattern}: chain broken {node:?}"));
        }
        if let Some(p) = parent {
            self.edges_checked += 1;
            if node.swu > p.swu || node.seu > p.seu || node.peu > p.peu {
                self.violations.push(format!(
                    "{pattern}: not anti-monotone, parent {p:?} child {node:?}"
                ));
            }
        }
    }

    fn absorb(&mut self, other: BoundAudit) {
        self.nodes_checked += other.nodes_checked;
        self.edges_checked += other.edges_checked;
        self.violations.extend(other.violations);
        self.las_pruned.extend(other.las_pruned);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningOutcome {
    /// Sorted by [`Pattern`]'s order.
    pub husps: Vec<HuspResult>,
    pub stats: MiningStats,
    pub audit: Option<BoundAudit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MineError {
    #[error("time budget of {budget:?} exceeded")]
    TimeBudgetExceeded {
        budget: Duration,
        stats: MiningStats,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    I,
    S,
}

/// Mines every pattern whose utility reaches the configured threshold.
pub fn mine(db: &QSeqDatabase, config: &MinerConfig) -> Result<MiningOutcome, MineError> {
    if let Threshold::Ratio(r) = config.threshold {
        if r.numerator() == 0 {
            return Err(MineError::InvalidConfig(
                "min-util ratio must be > 0".into(),
            ));
        }
    }
    if config.max_pattern_length == Some(0) {
        return Err(MineError::InvalidConfig(
            "max pattern length must be >= 1".into(),
        ));
    }
    let started = Instant::now();
    let index = UlIndex::build(db);
    let min_util = config.threshold.resolve(db.total_utility());
    let deadline = config.time_budget.map(|b| started + b);

    let items: Vec<ItemId> = index.items().to_vec();
    let partials: Vec<MiningContext> = if config.parallel {
        items
            .par_iter()
            .map(|&item| {
                let mut ctx = MiningContext::new(&index, config, min_util, deadline);
                ctx.root(item);
                ctx
            })
            .collect()
    } else {
        let mut ctx = MiningContext::new(&index, config, min_util, deadline);
        for &item in &items {
            ctx.root(item);
            if ctx.timed_out {
                break;
            }
        }
        vec![ctx]
    };

    let mut husps = Vec::new();
    let mut stats = MiningStats {
        min_util,
        ..MiningStats::default()
    };
    let mut audit = config.audit.then(BoundAudit::default);
    let mut timed_out = false;
    for ctx in partials {
        timed_out |= ctx.timed_out;
        stats.absorb(&ctx.stats);
        husps.extend(ctx.results);
        if let (Some(a), Some(b)) = (audit.as_mut(), ctx.audit) {
            a.absorb(b);
        }
    }
    husps.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    stats.elapsed_millis = started.elapsed().as_millis() as u64;
    if timed_out {
        return Err(MineError::TimeBudgetExceeded {
            budget: config.time_budget.unwrap_or_default(),
            stats,
        });
    }
    Ok(MiningOutcome {
        husps,
        stats,
        audit,
    })
}

/// Search state for one or more subtrees.
pub struct MiningContext<'a> {
    index: &'a UlIndex,
    config: &'a MinerConfig,
    min_util: Utility,
    deadline: Option<Instant>,
    scratch: Scratch,
    results: Vec<HuspResult>,
    stats: MiningStats,
    live_entries: u64,
    ancestors: Vec<BoundSnapshot>,
    audit: Option<BoundAudit>,
    timed_out: bool,
}

impl<'a> MiningContext<'a> {
    pub fn new(
        index: &'a UlIndex,
        config: &'a MinerConfig,
        min_util: Utility,
        deadline: Option<Instant>,
    ) -> Self {
        MiningContext {
            index,
            config,
            min_util,
            deadline,
            scratch: Scratch::new(index.item_count()),
            results: Vec::new(),
            stats: MiningStats {
                min_util,
                ..MiningStats::default()
            },
            live_entries: 0,
            ancestors: Vec::new(),
            audit: config.audit.then(BoundAudit::default),
            timed_out: false,
        }
    }

    pub fn results(&self) -> &[HuspResult] {
        &self.results
    }

    pub fn stats(&self) -> &MiningStats {
        &self.stats
    }

    pub fn audit(&self) -> Option<&BoundAudit> {
        self.audit.as_ref()
    }

    /// One iteration of the top-level loop: the subtree rooted at `<item>`.
    pub fn root(&mut self, item: ItemId) {
        let pd = ProjectedDb::project_item(self.index, item);
        self.stats.candidates_generated += 1;
        if pd.is_empty() || pd.swu() < self.min_util {
            return;
        }
        self.enter(&pd);
        let snapshot = self.observe(&pd);
        if pd.utility() >= self.min_util {
            self.emit(&pd);
        }
        if self.may_grow(&pd) {
            self.ancestors.push(snapshot);
            self.grow(pd);
            self.ancestors.pop();
        } else {
            self.leave(&pd);
        }
    }

    /// Expands a node whose bound already reached the threshold.
    pub fn pgrowth(&mut self, pd: ProjectedDb) {
        self.enter(&pd);
        self.ancestors.push(BoundSnapshot::of(&pd));
        self.grow(pd);
        self.ancestors.pop();
    }

    /// Body of [`Self::pgrowth`] for a projection already counted as live.
    /// Releases its entries on return.
    fn grow(&mut self, pd: ProjectedDb) {
        self.stats.nodes_visited += 1;
        if self.out_of_time() {
            self.leave(&pd);
            return;
        }
        let pd = if self.config.ips {
            let before = pd.entries();
            let (pd, removed) = pd.apply_ips_with(self.index, self.min_util, &mut self.scratch);
            self.stats.ips_removed_items += removed.len() as u64;
            self.live_entries += (pd.entries() - before) as u64;
            self.bump_peak();
            pd
        } else {
            pd
        };
        let candidates = pd.scan_candidates_with(self.index, &mut self.scratch);
        for (kind, list) in [(Extension::I, &candidates.i), (Extension::S, &candidates.s)] {
            for cand in list {
                if self.timed_out {
                    break;
                }
                if self.config.las && cand.las < self.min_util {
                    self.stats.las_pruned_items += 1;
                    if let Some(audit) = self.audit.as_mut() {
                        audit
                            .las_pruned
                            .push(extend_pattern(pd.prefix(), cand.item, kind));
                    }
                    continue;
                }
                self.judge(&pd, cand.item, kind);
            }
        }
        self.leave(&pd);
    }

    /// Builds one child, reports it if its utility reaches the threshold,
    /// and expands it if the configured bound does.
    pub fn judge(&mut self, parent: &ProjectedDb, item: ItemId, kind: Extension) {
        let child = match kind {
            Extension::I => parent.extend_i(self.index, item),
            Extension::S => parent.extend_s(self.index, item),
        };
        self.stats.candidates_generated += 1;
        if child.is_empty() {
            return;
        }
        self.enter(&child);
        let snapshot = self.observe(&child);
        if child.utility() >= self.min_util {
            self.emit(&child);
        }
        let bound = match self.config.bound {
            BoundMode::Swu => child.swu(),
            BoundMode::Seu => child.seu(),
            BoundMode::Peu => child.peu(),
        };
        if bound >= self.min_util && self.may_grow(&child) {
            self.ancestors.push(snapshot);
            self.grow(child);
            self.ancestors.pop();
        } else {
            self.leave(&child);
        }
    }

    fn may_grow(&self, pd: &ProjectedDb) -> bool {
        self.config
            .max_pattern_length
            .is_none_or(|cap| pd.prefix().len() < cap)
    }

    fn observe(&mut self, pd: &ProjectedDb) -> BoundSnapshot {
        let snapshot = BoundSnapshot::of(pd);
        if let Some(audit) = self.audit.as_mut() {
            audit.check(pd.prefix(), snapshot, self.ancestors.last().copied());
        }
        snapshot
    }

    fn emit(&mut self, pd: &ProjectedDb) {
        self.stats.husp_count += 1;
        self.results.push(HuspResult {
            pattern: pd.prefix().clone(),
            utility: pd.utility(),
        });
    }

    fn enter(&mut self, pd: &ProjectedDb) {
        self.live_entries += pd.entries() as u64;
        self.bump_peak();
    }

    fn leave(&mut self, pd: &ProjectedDb) {
        self.live_entries -= pd.entries() as u64;
    }

    fn bump_peak(&mut self) {
        self.stats.peak_projected_entries =
            self.stats.peak_projected_entries.max(self.live_entries);
    }

    fn out_of_time(&mut self) -> bool {
        if !self.timed_out {
            if let Some(deadline) = self.deadline {
                self.timed_out = Instant::now() >= deadline;
            }
        }
        self.timed_out
    }
}

fn extend_pattern(prefix: &Pattern, item: ItemId, kind: Extension) -> Pattern {
    match kind {
        Extension::I => prefix
            .i_extend(item)
            .expect("I-candidates follow the last item"),
        Extension::S => prefix.s_extend(item),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::running_db;

    fn u(v: u64) -> Utility {
        Utility::from_units(v)
    }

    fn ratio(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    #[test]
    fn running_example_contains_ab() {
        let db = running_db();
        let out = mine(&db, &MinerConfig::with_ratio(ratio("0.1"))).unwrap();
        assert_eq!(out.stats.min_util, "44.1".parse().unwrap());
        let ab: Pattern = "1 -1 2".parse().unwrap();
        let hit = out.husps.iter().find(|h| h.pattern == ab).unwrap();
        assert_eq!(hit.utility, u(160));
        assert!(out.husps.iter().all(|h| h.utility >= out.stats.min_util));
        assert!(out.husps.windows(2).all(|w| w[0].pattern < w[1].pattern));
        assert_eq!(out.stats.husp_count as usize, out.husps.len());
        assert!(out.stats.husp_count <= out.stats.candidates_generated);
    }

    #[test]
    fn threshold_above_total_yields_nothing() {
        let db = running_db();
        let out = mine(&db, &MinerConfig::with_ratio(ratio("1.01"))).unwrap();
        assert!(out.husps.is_empty());
    }

    #[test]
    fn empty_database_is_not_an_error() {
        let db = QSeqDatabase::from_sequences(Vec::new(), Default::default()).unwrap();
        let out = mine(&db, &MinerConfig::with_ratio(ratio("0.1"))).unwrap();
        assert!(out.husps.is_empty());
    }

    #[test]
    fn zero_ratio_is_rejected() {
        let db = running_db();
        assert!(matches!(
            mine(&db, &MinerConfig::with_ratio(ratio("0"))),
            Err(MineError::InvalidConfig(_))
        ));
    }

    #[test]
    fn judge_emits_and_recurses() {
        let db = running_db();
        let index = UlIndex::build(&db);
        let config = MinerConfig::with_ratio(ratio("0.1"));
        let min = config.threshold.resolve(db.total_utility());
        let mut ctx = MiningContext::new(&index, &config, min, None);
        let a = ProjectedDb::project_item(&index, 1);
        ctx.judge(&a, 2, Extension::S);
        assert_eq!(ctx.results()[0].pattern, "1 -1 2".parse().unwrap());
        assert_eq!(ctx.results()[0].utility, u(160));
        // PEU = 252 >= 44.1, so the subtree was expanded
        assert!(ctx.stats().nodes_visited >= 1);
        assert!(ctx.stats().candidates_generated > 1);
    }

    #[test]
    fn judge_on_empty_extension_does_nothing() {
        let db = running_db();
        let index = UlIndex::build(&db);
        let config = MinerConfig::with_ratio(ratio("0.1"));
        let mut ctx = MiningContext::new(&index, &config, u(1), None);
        let f = ProjectedDb::project_item(&index, 6);
        ctx.judge(&f, 3, Extension::S);
        assert!(ctx.results().is_empty());
        assert_eq!(ctx.stats().nodes_visited, 0);
        assert_eq!(ctx.stats().candidates_generated, 1);
    }

    #[test]
    fn pgrowth_with_no_candidates_returns() {
        let db = running_db();
        let index = UlIndex::build(&db);
        let config = MinerConfig::with_ratio(ratio("0.1"));
        let mut ctx = MiningContext::new(&index, &config, u(1), None);
        let whole =
            ProjectedDb::project_pattern(&index, &"1 3 -1 1 2 3 -1 1 2 4 -1 5".parse().unwrap());
        ctx.pgrowth(whole);
        assert_eq!(ctx.stats().candidates_generated, 0);
        assert_eq!(ctx.stats().nodes_visited, 1);
    }

    #[test]
    fn ablations_agree_on_running_example() {
        let db = running_db();
        let reference = mine(&db, &MinerConfig::with_ratio(ratio("0.1"))).unwrap();
        for bound in BoundMode::ALL {
            for las in [false, true] {
                for ips in [false, true] {
                    let cfg = MinerConfig::with_ratio(ratio("0.1"))
                        .bound(bound)
                        .las(las)
                        .ips(ips);
                    let out = mine(&db, &cfg).unwrap();
                    assert_eq!(out.husps, reference.husps, "{bound} las={las} ips={ips}");
                }
            }
        }
        let no_las = mine(&db, &MinerConfig::with_ratio(ratio("0.1")).las(false)).unwrap();
        assert!(reference.stats.candidates_generated <= no_las.stats.candidates_generated);
    }

    #[test]
    fn parallel_matches_sequential() {
        let db = running_db();
        let seq = mine(&db, &MinerConfig::with_ratio(ratio("0.05"))).unwrap();
        let par = mine(&db, &MinerConfig::with_ratio(ratio("0.05")).parallel(true)).unwrap();
        assert_eq!(seq.husps, par.husps);
        assert_eq!(
            seq.stats.candidates_generated,
            par.stats.candidates_generated
        );
    }

    #[test]
    fn length_cap_limits_patterns() {
        let db = running_db();
        let out = mine(
            &db,
            &MinerConfig::with_ratio(ratio("0.05")).max_pattern_length(Some(2)),
        )
        .unwrap();
        assert!(out.husps.iter().all(|h| h.pattern.len() <= 2));
        assert!(out.husps.iter().any(|h| h.pattern.len() == 2));
    }

    #[test]
    fn audit_finds_no_violations() {
        let db = running_db();
        let out = mine(&db, &MinerConfig::with_ratio(ratio("0.05")).audit(true)).unwrap();
        let audit = out.audit.unwrap();
        assert!(audit.nodes_checked > 0);
        assert!(audit.violations.is_empty(), "{:?}", audit.violations);
    }

    #[test]
    fn zero_budget_times_out() {
        let db = running_db();
        let cfg = MinerConfig::with_ratio(ratio("0.01")).time_budget(Some(Duration::ZERO));
        assert!(matches!(
            mine(&db, &cfg),
            Err(MineError::TimeBudgetExceeded { .. })
        ));
    }
}
