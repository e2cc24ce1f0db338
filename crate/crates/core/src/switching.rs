//! Switching sets: discovery, application, closures, trade subdesigns.
//!
//! For a block set B₁ of a 2-design, every point must fall into one of three
//! classes for B₁ to be a switching set: on no block of B₁ (P₁), on every
//! block (P₂), or on exactly |B₁|/2 blocks (balanced). Switching complements
//! the incidence between B₁ and the balanced points; the result is again a
//! 2-design with the same parameters. |B₁| is necessarily even, and switching
//! on two blocks always produces an isomorphic design.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::bitset::Bitset;
use crate::design::IncidenceStructure;
use crate::error::{Error, Result};

/// A verified switching set: block indices plus the induced point partition.
/// The set remembers a hash of the rows it touches; applying it to a design
/// whose touched rows have changed is refused as stale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingSet {
    blocks: Vec<usize>,
    p1: Vec<usize>,
    p2: Vec<usize>,
    balanced: Vec<usize>,
    row_hash: u64,
}

impl SwitchingSet {
    /// Block indices of B₁, ascending.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Points on no block of B₁.
    pub fn p1(&self) -> &[usize] {
        &self.p1
    }

    /// Points on every block of B₁.
    pub fn p2(&self) -> &[usize] {
        &self.p2
    }

    /// Points on exactly |B₁|/2 blocks of B₁; these are the points whose
    /// incidence with B₁ gets complemented.
    pub fn balanced(&self) -> &[usize] {
        &self.balanced
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    fn is_fresh(&self, inc: &IncidenceStructure) -> bool {
        self.blocks.iter().all(|&i| i < inc.b()) && row_hash(inc, &self.blocks) == self.row_hash
    }
}

/// Hash of the rows a block set touches; the partition of the points depends
/// on nothing else, so this is exactly the staleness domain.
fn row_hash(inc: &IncidenceStructure, blocks: &[usize]) -> u64 {
    let mut h = DefaultHasher::new();
    inc.v().hash(&mut h);
    for &i in blocks {
        i.hash(&mut h);
        inc.row(i).words().hash(&mut h);
    }
    h.finish()
}

/// Classify every point against the block set and build the switching set.
/// `blocks` must be nonempty; duplicates are ignored.
pub fn analyze_block_set(inc: &IncidenceStructure, blocks: &[usize]) -> Result<SwitchingSet> {
    assert!(!blocks.is_empty(), "analyze_block_set: empty block set");
    let mut blocks: Vec<usize> = blocks.to_vec();
    blocks.sort_unstable();
    blocks.dedup();
    if let Some(&bad) = blocks.iter().find(|&&i| i >= inc.b()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: inc.b(),
        });
    }
    if blocks.len() % 2 != 0 {
        return Err(Error::OddSize { size: blocks.len() });
    }

    let size = blocks.len();
    let half = size / 2;
    let (mut p1, mut p2, mut balanced) = (Vec::new(), Vec::new(), Vec::new());
    for point in 0..inc.v() {
        let degree = blocks.iter().filter(|&&i| inc.contains(i, point)).count();
        if degree == 0 {
            p1.push(point);
        } else if degree == size {
            p2.push(point);
        } else if degree == half {
            balanced.push(point);
        } else {
            return Err(Error::NotSwitchingSet {
                point,
                degree,
                set_size: size,
            });
        }
    }

    let row_hash = row_hash(inc, &blocks);
    Ok(SwitchingSet {
        blocks,
        p1,
        p2,
        balanced,
        row_hash,
    })
}

/// Complement the incidence between the set's blocks and its balanced points.
/// The input design is untouched; the switched copy is returned.
pub fn apply_switching(inc: &IncidenceStructure, set: &SwitchingSet) -> Result<IncidenceStructure> {
    if !set.is_fresh(inc) {
        return Err(Error::StaleSwitchingSet);
    }
    let mut out = inc.clone();
    for &block in &set.blocks {
        for &point in &set.balanced {
            out.toggle(block, point);
        }
    }
    Ok(out)
}

/// How `enumerate_switching_sets` explores block subsets.
#[derive(Debug, Clone)]
pub enum EnumerationStrategy {
    /// Every block subset of even size ≤ max_size, in lexicographic order.
    Exhaustive,
    /// Only unions of the given block groups (each group a set of block
    /// indices); groups must be pairwise disjoint. Subsets of groups are
    /// explored in lexicographic order over group indices.
    Grouped(Vec<Vec<usize>>),
}

/// Streaming enumeration of all switching sets of size ≤ `max_size`.
/// `budget` caps the number of search-tree nodes; exceeding it ends the
/// stream with [`Error::BudgetExceeded`].
pub fn enumerate_switching_sets(
    inc: &IncidenceStructure,
    max_size: usize,
    strategy: EnumerationStrategy,
    budget: Option<u64>,
) -> SwitchingSetIter<'_> {
    let groups = match strategy {
        EnumerationStrategy::Exhaustive => None,
        EnumerationStrategy::Grouped(groups) => Some(groups),
    };
    SwitchingSetIter {
        inc,
        max_size,
        groups,
        budget,
        nodes: 0,
        chosen: Vec::new(),
        degrees: vec![0u32; inc.v()],
        size: 0,
        next: 0,
        state: IterState::Fresh,
    }
}

enum IterState {
    Fresh,
    Running,
    Done,
}

pub struct SwitchingSetIter<'a> {
    inc: &'a IncidenceStructure,
    max_size: usize,
    /// None = exhaustive over single blocks; Some = grouped over group indices.
    groups: Option<Vec<Vec<usize>>>,
    budget: Option<u64>,
    nodes: u64,
    /// Chosen block indices (exhaustive) or group indices (grouped).
    chosen: Vec<usize>,
    degrees: Vec<u32>,
    /// Total number of blocks currently selected.
    size: usize,
    next: usize,
    state: IterState,
}

impl<'a> SwitchingSetIter<'a> {
    pub fn nodes_visited(&self) -> u64 {
        self.nodes
    }

    fn unit_blocks(&self, unit: usize) -> Vec<usize> {
        match &self.groups {
            None => vec![unit],
            Some(groups) => groups[unit].clone(),
        }
    }

    fn unit_count(&self) -> usize {
        match &self.groups {
            None => self.inc.b(),
            Some(groups) => groups.len(),
        }
    }

    /// Can the current partial selection still reach some valid even size
    /// ≤ max_size? A point of degree d can only grow by the number of blocks
    /// still addable, and must land exactly on 0, s/2 or s.
    fn viable(&self) -> bool {
        let t = self.size;
        let mut s = if t % 2 == 0 { t.max(2) } else { t + 1 };
        while s <= self.max_size {
            let slack = s - t;
            let ok = self.degrees.iter().all(|&d| {
                let d = d as usize;
                (d == 0) || (d <= s && d + slack >= s) || (d <= s / 2 && d + slack >= s / 2)
            });
            if ok {
                return true;
            }
            s += 2;
        }
        false
    }

    /// Current selection as a switching set, if every point degree already
    /// fits the exact partition for size `self.size`.
    fn emit(&self) -> Option<SwitchingSet> {
        let size = self.size;
        if size == 0 || size % 2 != 0 {
            return None;
        }
        let half = size / 2;
        let (mut p1, mut p2, mut balanced) = (Vec::new(), Vec::new(), Vec::new());
        for (point, &d) in self.degrees.iter().enumerate() {
            let d = d as usize;
            if d == 0 {
                p1.push(point);
            } else if d == size {
                p2.push(point);
            } else if d == half {
                balanced.push(point);
            } else {
                return None;
            }
        }
        let mut blocks: Vec<usize> = self
            .chosen
            .iter()
            .flat_map(|&u| self.unit_blocks(u))
            .collect();
        blocks.sort_unstable();
        Some(SwitchingSet {
            row_hash: row_hash(self.inc, &blocks),
            blocks,
            p1,
            p2,
            balanced,
        })
    }

    fn push_unit(&mut self, unit: usize) {
        for block in self.unit_blocks(unit) {
            for p in self.inc.row(block).ones() {
                self.degrees[p] += 1;
            }
            self.size += 1;
        }
        self.chosen.push(unit);
    }

    fn pop_unit(&mut self) -> usize {
        let unit = self.chosen.pop().expect("pop on empty selection");
        for block in self.unit_blocks(unit) {
            for p in self.inc.row(block).ones() {
                self.degrees[p] -= 1;
            }
            self.size -= 1;
        }
        unit
    }
}

impl<'a> Iterator for SwitchingSetIter<'a> {
    type Item = Result<SwitchingSet>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                // Grouped strategy: groups must be pairwise disjoint and in range.
                if let Some(groups) = &self.groups {
                    let mut owner = vec![usize::MAX; self.inc.b()];
                    for (gi, group) in groups.iter().enumerate() {
                        for &block in group {
                            if block >= self.inc.b() {
                                self.state = IterState::Done;
                                return Some(Err(Error::IndexOutOfRange {
                                    index: block,
                                    limit: self.inc.b(),
                                }));
                            }
                            if owner[block] != usize::MAX {
                                self.state = IterState::Done;
                                return Some(Err(Error::OverlappingSets {
                                    first: owner[block],
                                    second: gi,
                                    block,
                                }));
                            }
                            owner[block] = gi;
                        }
                    }
                }
            }
            IterState::Running => {}
        }

        loop {
            if self.next < self.unit_count() && self.size < self.max_size {
                let unit = self.next;
                // A whole group may overshoot the size cap; skip to its sibling.
                let unit_len = self.groups.as_ref().map_or(1, |g| g[unit].len());
                if self.size + unit_len > self.max_size {
                    self.next = unit + 1;
                    continue;
                }
                self.next = unit + 1;
                self.push_unit(unit);
                self.nodes += 1;
                if let Some(budget) = self.budget {
                    if self.nodes > budget {
                        self.state = IterState::Done;
                        return Some(Err(Error::BudgetExceeded { nodes: self.nodes }));
                    }
                }
                if !self.viable() {
                    let unit = self.pop_unit();
                    self.next = unit + 1;
                    continue;
                }
                if let Some(set) = self.emit() {
                    // Resume by descending further on the next call.
                    return Some(Ok(set));
                }
            } else {
                if self.chosen.is_empty() {
                    self.state = IterState::Done;
                    return None;
                }
                let unit = self.pop_unit();
                self.next = unit + 1;
            }
        }
    }
}

/// Apply every subset of `sets` simultaneously: output d indexed by bitmask,
/// bit i = sets[i] applied. Requires the sets pairwise block-disjoint (their
/// switches then commute and each stays valid on the intermediate designs).
/// The subset ∅ (index 0) is the input design itself.
pub fn switching_closure(
    inc: &IncidenceStructure,
    sets: &[SwitchingSet],
) -> Result<Vec<IncidenceStructure>> {
    let mut owner = vec![usize::MAX; inc.b()];
    for (si, set) in sets.iter().enumerate() {
        if !set.is_fresh(inc) {
            return Err(Error::StaleSwitchingSet);
        }
        for &block in set.blocks() {
            if owner[block] != usize::MAX {
                return Err(Error::OverlappingSets {
                    first: owner[block],
                    second: si,
                    block,
                });
            }
            owner[block] = si;
        }
    }
    assert!(sets.len() < usize::BITS as usize, "closure too large");
    let mut out = Vec::with_capacity(1 << sets.len());
    for mask in 0..(1usize << sets.len()) {
        let mut d = inc.clone();
        for (si, set) in sets.iter().enumerate() {
            if mask >> si & 1 == 1 {
                for &block in set.blocks() {
                    for &point in set.balanced() {
                        d.toggle(block, point);
                    }
                }
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// The trade carried by a switching set of a symmetric design: points are the
/// blocks of B₁, blocks are the balanced points, incidence inherited from the
/// dual. The result is a 2-design on |B₁| points (degenerate for pairs).
pub fn trade_subdesign(inc: &IncidenceStructure, set: &SwitchingSet) -> Result<IncidenceStructure> {
    if inc.v() != inc.b() {
        return Err(Error::NotSymmetric {
            v: inc.v(),
            b: inc.b(),
        });
    }
    if !set.is_fresh(inc) {
        return Err(Error::StaleSwitchingSet);
    }
    let rows = set
        .balanced()
        .iter()
        .map(|&q| {
            Bitset::from_indices(
                set.size(),
                set.blocks()
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| inc.contains(b, q))
                    .map(|(i, _)| i),
            )
        })
        .collect();
    Ok(IncidenceStructure::from_rows(set.size(), rows))
}
