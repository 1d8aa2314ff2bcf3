//! Utility-linked lists: one flattened, position-indexed view per transaction.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ItemId, QSequence};
use crate::utility::Utility;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UlError {
    #[error("position {position} out of range 1..={len}")]
    OutOfRange { position: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UlElement {
    pub item: ItemId,
    pub utility: Utility,
    /// Utility of every position strictly after this one.
    pub remaining: Utility,
    /// 1-based position of the next occurrence of `item`.
    pub next: Option<usize>,
}

/// Header table: `(item, first position)` ascending by item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlHeader {
    entries: Vec<(ItemId, usize)>,
}

impl UlHeader {
    pub fn entries(&self) -> &[(ItemId, usize)] {
        &self.entries
    }

    pub fn first_position(&self, item: ItemId) -> Option<usize> {
        self.entries
            .binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|k| self.entries[k].1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlList {
    sid: u32,
    elements: Vec<UlElement>,
    itemset_of: Vec<u32>,
    header: UlHeader,
    total_utility: Utility,
}

impl UlList {
    pub fn build(seq: &QSequence) -> UlList {
        let n = seq.flat_len();
        let mut elements = Vec::with_capacity(n);
        let mut itemset_of = Vec::with_capacity(n);
        for (k, q) in seq.flat_items() {
            elements.push(UlElement {
                item: q.item,
                utility: q.utility,
                remaining: Utility::ZERO,
                next: None,
            });
            itemset_of.push(k as u32);
        }

        let mut acc = Utility::ZERO;
        let mut last_seen: std::collections::HashMap<ItemId, usize> = Default::default();
        for idx in (0..n).rev() {
            let e = &mut elements[idx];
            e.remaining = acc;
            acc += e.utility;
            e.next = last_seen.insert(e.item, idx + 1);
        }

        let mut entries: Vec<(ItemId, usize)> = last_seen.into_iter().collect();
        entries.sort_unstable();

        UlList {
            sid: seq.sid(),
            elements,
            itemset_of,
            header: UlHeader { entries },
            total_utility: acc,
        }
    }

    pub fn sid(&self) -> u32 {
        self.sid
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[UlElement] {
        &self.elements
    }

    pub fn header(&self) -> &UlHeader {
        &self.header
    }

    pub fn total_utility(&self) -> Utility {
        self.total_utility
    }

    /// Element at a 1-based position. Panics when out of range.
    pub fn element(&self, position: usize) -> &UlElement {
        &self.elements[position - 1]
    }

    /// 0-based index of the itemset holding a 1-based position.
    pub fn itemset_of(&self, position: usize) -> usize {
        self.itemset_of[position - 1] as usize
    }

    pub fn rest_utility(&self, position: usize) -> Result<Utility, UlError> {
        if position == 0 || position > self.len() {
            return Err(UlError::OutOfRange {
                position,
                len: self.len(),
            });
        }
        Ok(self.elements[position - 1].remaining)
    }

    /// Positions of `item` following the header entry and the `next` chain.
    pub fn occurrences(&self, item: ItemId) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.header.first_position(item), move |&p| {
            self.elements[p - 1].next
        })
    }

    /// Two-line dump in the layout of the classic UL-list table:
    ///
    /// ```text
    /// UP Information: <[(1, 10, 84, 3) (3, 12, 72, 5)], ..., [(5, 3, 0, -)]>
    /// Header Table: (1, 1) (2, 4) (3, 2) (4, 8) (5, 9)
    /// ```
    pub fn render_table(&self) -> String {
        let mut out = String::from("UP Information: <");
        let mut current = usize::MAX;
        for (idx, e) in self.elements.iter().enumerate() {
            let k = self.itemset_of[idx] as usize;
            if k != current {
                if current != usize::MAX {
                    out.push_str("], ");
                }
                out.push('[');
                current = k;
            } else {
                out.push(' ');
            }
            let next = e.next.map_or_else(|| "-".to_string(), |p| p.to_string());
            let _ = write!(
                out,
                "({}, {}, {}, {})",
                e.item, e.utility, e.remaining, next
            );
        }
        if current != usize::MAX {
            out.push(']');
        }
        out.push_str(">\nHeader Table:");
        for (item, pos) in &self.header.entries {
            let _ = write!(out, " ({item}, {pos})");
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::running_db;

    fn u(v: u64) -> Utility {
        Utility::from_units(v)
    }

    #[test]
    fn s1_matches_reference_table() {
        let db = running_db();
        let ul = UlList::build(db.sequence(1).unwrap());
        assert_eq!(
            ul.element(1),
            &UlElement {
                item: 1,
                utility: u(10),
                remaining: u(84),
                next: Some(3)
            }
        );
        assert_eq!(
            ul.element(4),
            &UlElement {
                item: 2,
                utility: u(3),
                remaining: u(54),
                next: Some(7)
            }
        );
        assert_eq!(
            ul.element(9),
            &UlElement {
                item: 5,
                utility: u(3),
                remaining: Utility::ZERO,
                next: None
            }
        );
        assert_eq!(
            ul.header().entries(),
            &[(1, 1), (2, 4), (3, 2), (4, 8), (5, 9)]
        );
        assert_eq!(ul.total_utility(), u(94));
        assert_eq!(
            ul.render_table(),
            "UP Information: <[(1, 10, 84, 3) (3, 12, 72, 5)], \
             [(1, 15, 57, 6) (2, 3, 54, 7) (3, 8, 46, -)], \
             [(1, 20, 26, -) (2, 15, 11, -) (4, 8, 3, -)], [(5, 3, 0, -)]>\n\
             Header Table: (1, 1) (2, 4) (3, 2) (4, 8) (5, 9)\n"
        );
    }

    #[test]
    fn s2_header_and_order() {
        let db = running_db();
        let ul = UlList::build(db.sequence(2).unwrap());
        let items: Vec<_> = ul.elements().iter().map(|e| e.item).collect();
        assert_eq!(items, vec![1, 5, 1, 2, 4, 2, 3, 4, 5]);
        assert_eq!(
            ul.header().entries(),
            &[(1, 1), (2, 4), (3, 7), (4, 5), (5, 2)]
        );
        assert_eq!(ul.occurrences(2).collect::<Vec<_>>(), vec![4, 6]);
    }

    #[test]
    fn rest_utility_lookup() {
        let db = running_db();
        let s1 = UlList::build(db.sequence(1).unwrap());
        assert_eq!(s1.rest_utility(4), Ok(u(54)));
        assert_eq!(s1.rest_utility(9), Ok(Utility::ZERO));
        assert_eq!(
            s1.rest_utility(0),
            Err(UlError::OutOfRange {
                position: 0,
                len: 9
            })
        );
        assert!(s1.rest_utility(10).is_err());
        let s2 = UlList::build(db.sequence(2).unwrap());
        assert_eq!(s2.rest_utility(6), Ok(u(15)));
    }
}
