//! Incidence structures and 2-design validation.
//!
//! A structure is stored block-by-point: row i is the point set of block i.
//! Rows may repeat (multisets of blocks are legal input); nothing is a design
//! until [`validate_2design`] says so. For a 2-(v, k, λ) design the standard
//! identities r(k − 1) = λ(v − 1) and bk = vr follow from uniformity and
//! balance, and are rechecked exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};

/// Parameters (v, b, r, k, λ) of a validated 2-design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignParams {
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
    pub lambda: usize,
}

impl DesignParams {
    pub fn is_symmetric(&self) -> bool {
        self.v == self.b
    }
}

impl std::fmt::Display for DesignParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "2-({}, {}, {}) with b = {}, r = {}",
            self.v, self.k, self.lambda, self.b, self.r
        )
    }
}

/// Block-by-point incidence structure on `v` points; row i is block i.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceStructure {
    v: usize,
    rows: Vec<Bitset>,
}

impl IncidenceStructure {
    /// Build from explicit rows. Every row must have width `v`.
    pub fn from_rows(v: usize, rows: Vec<Bitset>) -> Self {
        assert!(rows.iter().all(|r| r.len() == v), "row width mismatch");
        IncidenceStructure { v, rows }
    }

    /// Build from blocks given as point-index lists (0-based).
    pub fn from_blocks<I, J>(v: usize, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        let mut rows = Vec::new();
        for block in blocks {
            let mut row = Bitset::new(v);
            for p in block {
                if p >= v {
                    return Err(Error::IndexOutOfRange { index: p, limit: v });
                }
                row.insert(p);
            }
            rows.push(row);
        }
        Ok(IncidenceStructure { v, rows })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn b(&self) -> usize {
        self.rows.len()
    }

    pub fn is_square(&self) -> bool {
        self.v == self.rows.len()
    }

    pub fn contains(&self, block: usize, point: usize) -> bool {
        self.rows[block].contains(point)
    }

    pub fn row(&self, block: usize) -> &Bitset {
        &self.rows[block]
    }

    pub fn rows(&self) -> &[Bitset] {
        &self.rows
    }

    pub fn block_points(&self, block: usize) -> Vec<usize> {
        self.rows[block].to_indices()
    }

    pub fn block_size(&self, block: usize) -> usize {
        self.rows[block].count()
    }

    pub fn point_degree(&self, point: usize) -> usize {
        self.rows.iter().filter(|r| r.contains(point)).count()
    }

    /// Number of blocks containing both points.
    pub fn pair_degree(&self, p: usize, q: usize) -> usize {
        self.rows
            .iter()
            .filter(|r| r.contains(p) && r.contains(q))
            .count()
    }

    pub fn toggle(&mut self, block: usize, point: usize) {
        self.rows[block].toggle(point);
    }

    /// Column view: the set of blocks through `point`.
    pub fn point_row(&self, point: usize) -> Bitset {
        let mut col = Bitset::new(self.b());
        for (i, row) in self.rows.iter().enumerate() {
            if row.contains(point) {
                col.insert(i);
            }
        }
        col
    }

    /// The transposed structure: points become blocks and vice versa.
    pub fn dual(&self) -> IncidenceStructure {
        let rows = (0..self.v).map(|p| self.point_row(p)).collect();
        IncidenceStructure {
            v: self.rows.len(),
            rows,
        }
    }

    /// Relabel points by `point_perm` (old index → new index) and reorder
    /// blocks by `block_perm`.
    pub fn relabel(&self, point_perm: &[usize], block_perm: &[usize]) -> IncidenceStructure {
        assert_eq!(point_perm.len(), self.v);
        assert_eq!(block_perm.len(), self.rows.len());
        let mut rows = vec![Bitset::new(self.v); self.rows.len()];
        for (old_b, row) in self.rows.iter().enumerate() {
            let target = &mut rows[block_perm[old_b]];
            for p in row.ones() {
                target.insert(point_perm[p]);
            }
        }
        IncidenceStructure { v: self.v, rows }
    }
}

impl std::fmt::Debug for IncidenceStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IncidenceStructure({} x {})", self.v, self.rows.len())?;
        for row in &self.rows {
            for p in 0..self.v {
                write!(f, "{}", if row.contains(p) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Check that `inc` is a 2-(v, k, λ) design with 1 < k < v − 1 and return its
/// parameters. Errors report the first offending block or point pair.
pub fn validate_2design(inc: &IncidenceStructure) -> Result<DesignParams> {
    let (v, b) = (inc.v(), inc.b());
    if b == 0 || v < 2 {
        return Err(Error::DegenerateK { k: 0, v });
    }

    let k = inc.block_size(0);
    for i in 1..b {
        let got = inc.block_size(i);
        if got != k {
            return Err(Error::NotUniform {
                block: i,
                got,
                expected: k,
            });
        }
    }
    if k <= 1 || k >= v - 1 {
        return Err(Error::DegenerateK { k, v });
    }

    // Column views make each pair count a word-parallel popcount.
    let cols: Vec<Bitset> = (0..v).map(|p| inc.point_row(p)).collect();
    let lambda = cols[0].intersection_count(&cols[1]);
    for p in 0..v {
        for q in (p + 1)..v {
            let got = cols[p].intersection_count(&cols[q]);
            if got != lambda {
                return Err(Error::NotBalanced {
                    p,
                    q,
                    got,
                    expected: lambda,
                });
            }
        }
    }

    // Uniform + balanced + k > 1 force constant replication; the standard
    // identities then hold by counting. Kept as hard checks, they are cheap.
    let r = cols[0].count();
    assert_eq!(
        r * (k - 1),
        lambda * (v - 1),
        "identity r(k-1) = lambda(v-1)"
    );
    assert_eq!(b * k, v * r, "identity bk = vr");
    debug_assert!((0..v).all(|p| cols[p].count() == r));

    Ok(DesignParams { v, b, r, k, lambda })
}

/// Derived design on the points of `block`: every other block is cut down to
/// its intersection with the chosen one. For a symmetric 2-(v, k, λ) design
/// the result has parameters 2-(k, λ, λ − 1); validation of the output is the
/// caller's business (small cases degenerate).
pub fn derived_design(inc: &IncidenceStructure, block: usize) -> Result<IncidenceStructure> {
    if block >= inc.b() {
        return Err(Error::IndexOutOfRange {
            index: block,
            limit: inc.b(),
        });
    }
    let base = inc.block_points(block);
    let position: BTreeMap<usize, usize> = base.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut rows = Vec::with_capacity(inc.b() - 1);
    for j in 0..inc.b() {
        if j == block {
            continue;
        }
        let mut row = Bitset::new(base.len());
        for p in inc.row(j).ones() {
            if let Some(&i) = position.get(&p) {
                row.insert(i);
            }
        }
        rows.push(row);
    }
    Ok(IncidenceStructure::from_rows(base.len(), rows))
}

/// Multiset of pairwise block-intersection sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionProfile {
    /// intersection size → number of unordered block pairs
    pub counts: BTreeMap<usize, usize>,
}

impl IntersectionProfile {
    /// Quasi-symmetric: exactly two distinct intersection sizes.
    pub fn is_quasi_symmetric(&self) -> bool {
        self.counts.len() == 2
    }
}

pub fn intersection_profile(inc: &IncidenceStructure) -> IntersectionProfile {
    let mut counts = BTreeMap::new();
    let rows = inc.rows();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            *counts
                .entry(rows[i].intersection_count(&rows[j]))
                .or_insert(0) += 1;
        }
    }
    IntersectionProfile { counts }
}

#[cfg(test)]
pub(crate) fn fano() -> IncidenceStructure {
    IncidenceStructure::from_blocks(
        7,
        [
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ],
    )
    .unwrap()
}

#[cfg(test)]
pub(crate) fn d_6_3_2() -> IncidenceStructure {
    IncidenceStructure::from_blocks(
        6,
        [
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 4],
            vec![0, 3, 5],
            vec![0, 4, 5],
            vec![1, 2, 5],
            vec![1, 3, 4],
            vec![1, 4, 5],
            vec![2, 3, 4],
            vec![2, 3, 5],
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_validates() {
        let params = validate_2design(&fano()).unwrap();
        assert_eq!(
            params,
            DesignParams {
                v: 7,
                b: 7,
                r: 3,
                k: 3,
                lambda: 1
            }
        );
        assert!(params.is_symmetric());
    }

    #[test]
    fn non_uniform_block_reported() {
        let inc =
            IncidenceStructure::from_blocks(5, [vec![0, 1, 2], vec![0, 1, 2], vec![1, 2]]).unwrap();
        assert_eq!(
            validate_2design(&inc),
            Err(Error::NotUniform {
                block: 2,
                got: 2,
                expected: 3
            })
        );
    }

    #[test]
    fn unbalanced_pair_reported() {
        // Uniform k = 2 on 5 points cannot cover all pairs evenly here.
        let inc = IncidenceStructure::from_blocks(5, [vec![0, 1], vec![2, 3], vec![0, 1]]).unwrap();
        match validate_2design(&inc) {
            Err(Error::NotBalanced { expected: 2, .. }) => {}
            other => panic!("expected NotBalanced with lambda 2, got {other:?}"),
        }
    }

    #[test]
    fn complete_design_is_degenerate() {
        // k = v - 1: every block all-but-one point.
        let inc = IncidenceStructure::from_blocks(
            4,
            [vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert_eq!(
            validate_2design(&inc),
            Err(Error::DegenerateK { k: 3, v: 4 })
        );
    }

    #[test]
    fn singleton_blocks_are_degenerate() {
        let inc = IncidenceStructure::from_blocks(4, [vec![0], vec![1]]).unwrap();
        assert_eq!(
            validate_2design(&inc),
            Err(Error::DegenerateK { k: 1, v: 4 })
        );
    }

    #[test]
    fn repeated_blocks_allowed() {
        // 2-(4,2,2): all six pairs, each twice... use each pair once doubled.
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let blocks: Vec<Vec<usize>> = pairs
            .iter()
            .flat_map(|&(a, b)| [vec![a, b], vec![a, b]])
            .collect();
        let inc = IncidenceStructure::from_blocks(4, blocks).unwrap();
        let params = validate_2design(&inc).unwrap();
        assert_eq!((params.v, params.b, params.k, params.lambda), (4, 12, 2, 2));
    }

    #[test]
    fn dual_is_involution() {
        let f = fano();
        assert_eq!(f.dual().dual(), f);
        // Fano is symmetric, so the dual is again a 2-(7,3,1).
        let params = validate_2design(&f.dual()).unwrap();
        assert_eq!((params.v, params.k, params.lambda), (7, 3, 1));
    }

    #[test]
    fn dual_of_nonsymmetric_is_not_2design() {
        // 2-(6,3,2) has b = 10 > v; its dual has non-uniform pair coverage.
        let inc = d_6_3_2();
        validate_2design(&inc).unwrap();
        assert!(validate_2design(&inc.dual()).is_err());
    }

    #[test]
    fn derived_fano_is_degenerate() {
        let derived = derived_design(&fano(), 0).unwrap();
        assert_eq!((derived.v(), derived.b()), (3, 6));
        // Each other block meets block 0 in exactly one point.
        assert_eq!(
            validate_2design(&derived),
            Err(Error::DegenerateK { k: 1, v: 3 })
        );
    }

    #[test]
    fn derived_index_out_of_range() {
        assert_eq!(
            derived_design(&fano(), 7),
            Err(Error::IndexOutOfRange { index: 7, limit: 7 })
        );
    }

    #[test]
    fn fano_intersection_profile_is_symmetric_constant() {
        // Symmetric design: any two blocks meet in lambda points.
        let profile = intersection_profile(&fano());
        assert_eq!(profile.counts, BTreeMap::from([(1, 21)]));
        assert!(!profile.is_quasi_symmetric());
    }

    #[test]
    fn d_6_3_2_profile_by_direct_pair_enumeration() {
        let inc = d_6_3_2();
        let params = validate_2design(&inc).unwrap();
        assert_eq!(
            (params.v, params.b, params.r, params.k, params.lambda),
            (6, 10, 5, 3, 2)
        );

        // Oracle: count pair intersections with plain set arithmetic.
        let blocks: Vec<Vec<usize>> = (0..inc.b()).map(|i| inc.block_points(i)).collect();
        let mut oracle = BTreeMap::new();
        for i in 0..blocks.len() {
            for j in (i + 1)..blocks.len() {
                let size = blocks[i].iter().filter(|p| blocks[j].contains(p)).count();
                *oracle.entry(size).or_insert(0usize) += 1;
            }
        }
        let profile = intersection_profile(&inc);
        assert_eq!(profile.counts, oracle);
        // 2-(6,3,2) is quasi-symmetric with intersection numbers {1, 2}.
        assert_eq!(
            profile.counts.keys().copied().collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert!(profile.is_quasi_symmetric());
    }

    #[test]
    fn relabel_preserves_validation() {
        let f = fano();
        let pp = [3, 0, 6, 2, 5, 1, 4];
        let bp = [1, 2, 0, 5, 6, 4, 3];
        let g = f.relabel(&pp, &bp);
        assert_eq!(validate_2design(&g).unwrap(), validate_2design(&f).unwrap());
        // Round-trip through the inverse permutations.
        let mut ppi = [0; 7];
        let mut bpi = [0; 7];
        for i in 0..7 {
            ppi[pp[i]] = i;
            bpi[bp[i]] = i;
        }
        assert_eq!(g.relabel(&ppi, &bpi), f);
    }
}
