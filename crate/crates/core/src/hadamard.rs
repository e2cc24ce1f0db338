//! Bush-type Hadamard matrices and their Menon designs.
//!
//! A Hadamard matrix of order 4n² is *Bush-type* when, viewed as a 2n×2n grid
//! of 2n×2n blocks, every diagonal block is the all-ones matrix J and every
//! off-diagonal block has zero row and column sums. Such matrices are regular
//! with row sum 2n, so mapping −1 ↦ incident yields a symmetric
//! 2-(4n², 2n²−n, n²−n) design in which each diagonal block-row is a
//! switching set: its own 2n points lie on none of the 2n blocks and every
//! other point on exactly n of them.
//!
//! The search routines look for Bush-type matrices either freely (all
//! off-diagonal blocks independent) or within the block-negacyclic family
//! where block (i,j) is determined by block (0, (j−i) mod 2n) up to the sign
//! −1 for j < i, so the first block-row strip determines the whole matrix.

use crate::bitset::Bitset;
use crate::design::IncidenceStructure;
use crate::error::{Error, Result};
use crate::switching::{analyze_block_set, SwitchingSet};

/// Square ±1 matrix; a set bit stands for +1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    m: usize,
    rows: Vec<Bitset>,
}

impl SignMatrix {
    pub fn from_rows(m: usize, rows: Vec<Bitset>) -> Self {
        assert_eq!(rows.len(), m);
        for row in &rows {
            assert_eq!(row.len(), m);
        }
        SignMatrix { m, rows }
    }

    /// Build from ±1 entries. Panics on non-square input or entries ∉ {−1, 1}.
    pub fn from_signs(entries: &[Vec<i8>]) -> Self {
        let m = entries.len();
        let rows = entries
            .iter()
            .map(|row| {
                assert_eq!(row.len(), m, "sign matrix must be square");
                Bitset::from_indices(
                    m,
                    row.iter().enumerate().filter_map(|(j, &e)| {
                        assert!(e == 1 || e == -1, "entries must be ±1");
                        (e == 1).then_some(j)
                    }),
                )
            })
            .collect();
        SignMatrix { m, rows }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        if self.rows[i].contains(j) {
            1
        } else {
            -1
        }
    }

    pub fn row_bits(&self, i: usize) -> &Bitset {
        &self.rows[i]
    }

    /// Inner product of rows i and j as ±1 vectors.
    pub fn row_dot(&self, i: usize, j: usize) -> i64 {
        let mut xor = self.rows[i].clone();
        xor.xor_with(&self.rows[j]);
        self.m as i64 - 2 * xor.count() as i64
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        2 * self.rows[i].count() as i64 - self.m as i64
    }

    pub fn col_sum(&self, j: usize) -> i64 {
        let plus = (0..self.m).filter(|&i| self.rows[i].contains(j)).count();
        2 * plus as i64 - self.m as i64
    }

    /// First pair of non-orthogonal rows, if any.
    pub fn orthogonality_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                if self.row_dot(i, j) != 0 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_hadamard(&self) -> bool {
        self.orthogonality_violation().is_none()
    }

    pub fn check_hadamard(&self) -> Result<()> {
        match self.orthogonality_violation() {
            Some((row_a, row_b)) => Err(Error::NotHadamard { row_a, row_b }),
            None => Ok(()),
        }
    }

    /// All row sums and column sums equal.
    pub fn is_regular(&self) -> bool {
        self.regular_excess().is_ok()
    }

    /// Common row sum of a matrix that is regular on rows and columns.
    pub fn regular_excess(&self) -> Result<i64> {
        let s = self.row_sum(0);
        for i in 1..self.m {
            let sum = self.row_sum(i);
            if sum != s {
                return Err(Error::NotRegular {
                    line: "row",
                    index: i,
                    sum,
                });
            }
        }
        for j in 0..self.m {
            let sum = self.col_sum(j);
            if sum != s {
                return Err(Error::NotRegular {
                    line: "column",
                    index: j,
                    sum,
                });
            }
        }
        Ok(s)
    }

    /// result[i][j] = row_signs[i] · col_signs[j] · self[row_perm[i]][col_perm[j]].
    pub fn monomial_transform(
        &self,
        row_perm: &[usize],
        row_signs: &[i8],
        col_perm: &[usize],
        col_signs: &[i8],
    ) -> SignMatrix {
        let m = self.m;
        assert!(row_perm.len() == m && col_perm.len() == m);
        assert!(row_signs.len() == m && col_signs.len() == m);
        let entries: Vec<Vec<i8>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| row_signs[i] * col_signs[j] * self.entry(row_perm[i], col_perm[j]))
                    .collect()
            })
            .collect();
        SignMatrix::from_signs(&entries)
    }
}

impl std::fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "SignMatrix(order {})", self.m)?;
        for i in 0..self.m {
            for j in 0..self.m {
                write!(f, "{}", if self.entry(i, j) > 0 { '+' } else { '-' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.m {
            for j in 0..self.m {
                write!(f, "{}", if self.entry(i, j) > 0 { '+' } else { '-' })?;
            }
            if i + 1 < self.m {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

fn check_order(m: usize, n: usize) -> Result<()> {
    if n == 0 || m != 4 * n * n {
        return Err(Error::OrderMismatch { m, n });
    }
    Ok(())
}

/// Verify the Bush-type block structure of a Hadamard matrix of order 4n²:
/// diagonal blocks J, off-diagonal blocks with zero row and column sums.
pub fn check_bush_type(h: &SignMatrix, n: usize) -> Result<()> {
    check_order(h.order(), n)?;
    h.check_hadamard()?;
    let w = 2 * n;
    for bi in 0..w {
        for bj in 0..w {
            if bi == bj {
                for s in 0..w {
                    for c in 0..w {
                        if h.entry(bi * w + s, bj * w + c) < 0 {
                            return Err(Error::NotBushStructured {
                                reason: format!(
                                    "diagonal block ({bi},{bi}) has a -1 entry at ({s},{c})"
                                ),
                            });
                        }
                    }
                }
                continue;
            }
            for s in 0..w {
                let sum: i64 = (0..w).map(|c| h.entry(bi * w + s, bj * w + c) as i64).sum();
                if sum != 0 {
                    return Err(Error::NotBushStructured {
                        reason: format!("block ({bi},{bj}) row {s} sums to {sum}"),
                    });
                }
            }
            for c in 0..w {
                let sum: i64 = (0..w).map(|s| h.entry(bi * w + s, bj * w + c) as i64).sum();
                if sum != 0 {
                    return Err(Error::NotBushStructured {
                        reason: format!("block ({bi},{bj}) column {c} sums to {sum}"),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Bush-type test that reports structural failure as `false`; order mismatch
/// and non-Hadamard input stay hard errors.
pub fn is_bush_type(h: &SignMatrix, n: usize) -> Result<bool> {
    match check_bush_type(h, n) {
        Ok(()) => Ok(true),
        Err(Error::NotBushStructured { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Whether block (i,j) equals block (0, (j−i) mod 2n) negated exactly when
/// j < i — the closed form of the block-negacyclic recurrence
/// H_{i,j} = H_{i−1,j−1}, H_{i,0} = −H_{i−1,2n−1}. Requires order 4n².
pub fn is_block_negacyclic(h: &SignMatrix, n: usize) -> Result<bool> {
    check_order(h.order(), n)?;
    let w = 2 * n;
    for bi in 1..w {
        for bj in 0..w {
            let src = (bj + w - bi) % w;
            let sign = if bj < bi { -1 } else { 1 };
            for s in 0..w {
                for c in 0..w {
                    if h.entry(bi * w + s, bj * w + c) != sign * h.entry(s, src * w + c) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Incidence structure of the −1 entries of a regular Hadamard matrix with
/// positive row sum: block i = { j : H[i][j] = −1 }.
///
/// For order 4n² with n ≥ 2 this is a 2-(4n², 2n²−n, n²−n) design; order 4
/// degenerates to singleton blocks, which are preserved but not a 2-design.
pub fn hadamard_to_menon(h: &SignMatrix) -> Result<IncidenceStructure> {
    h.check_hadamard()?;
    let s = h.regular_excess()?;
    if s <= 0 {
        // A regular Hadamard matrix has |row sum| = √m; the design convention
        // wants the positive root.
        let expected = (h.order() as f64).sqrt().round() as i64;
        return Err(Error::WrongRowSum { sum: s, expected });
    }
    debug_assert_eq!((s * s) as usize, h.order());
    let m = h.order();
    let rows = (0..m)
        .map(|i| Bitset::from_indices(m, (0..m).filter(|&j| h.entry(i, j) < 0)))
        .collect();
    Ok(IncidenceStructure::from_rows(m, rows))
}

/// Inverse of [`hadamard_to_menon`]: incident ↦ −1, non-incident ↦ +1.
/// The structure must be square and the resulting matrix Hadamard.
pub fn menon_to_hadamard(inc: &IncidenceStructure) -> Result<SignMatrix> {
    if inc.v() != inc.b() {
        return Err(Error::NotSymmetric {
            v: inc.v(),
            b: inc.b(),
        });
    }
    let m = inc.v();
    let rows = (0..m)
        .map(|i| Bitset::from_indices(m, (0..m).filter(|&j| !inc.contains(i, j))))
        .collect();
    let h = SignMatrix::from_rows(m, rows);
    h.check_hadamard()?;
    Ok(h)
}

/// The 2n diagonal switching sets of the Menon design of a Bush-type matrix,
/// with points and blocks grouped in 2n consecutive runs of 2n. Set g consists
/// of the blocks of block-row g; its own 2n points are untouched, every other
/// point lies on exactly n of the blocks.
pub fn diagonal_switching_sets(inc: &IncidenceStructure, n: usize) -> Result<Vec<SwitchingSet>> {
    let fail = |reason: String| Error::NotBushStructured { reason };
    let w = 2 * n;
    let m = w * w;
    if n == 0 || inc.v() != m || inc.b() != m {
        return Err(fail(format!(
            "expected a square structure on {} points for n = {}, got {} x {}",
            m,
            n,
            inc.v(),
            inc.b()
        )));
    }
    let mut sets = Vec::with_capacity(w);
    for g in 0..w {
        let blocks: Vec<usize> = (g * w..(g + 1) * w).collect();
        // Every block of the group must meet every foreign point group in
        // exactly n points and its own group not at all.
        for &b in &blocks {
            for g2 in 0..w {
                let want = if g2 == g { 0 } else { n };
                let got = (g2 * w..(g2 + 1) * w)
                    .filter(|&p| inc.contains(b, p))
                    .count();
                if got != want {
                    return Err(fail(format!(
                        "block {} meets point group {} in {} points, expected {}",
                        b, g2, got, want
                    )));
                }
            }
        }
        let set = analyze_block_set(inc, &blocks)
            .map_err(|e| fail(format!("block group {} is not a switching set: {}", g, e)))?;
        if set.p1() != blocks.as_slice() || !set.p2().is_empty() {
            return Err(fail(format!(
                "block group {} does not leave exactly its own point group untouched",
                g
            )));
        }
        sets.push(set);
    }
    Ok(sets)
}

// ---------------------------------------------------------------------------
// Search

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BushSearchMode {
    /// All off-diagonal blocks chosen independently from the zero-row/column-
    /// sum pool. Complete only for tiny orders; use a budget beyond n = 1.
    Free,
    /// Block-negacyclic matrices only: search the first block-row strip.
    BlockNegacyclic,
}

#[derive(Debug, Clone)]
pub struct BushSearchOptions {
    pub n: usize,
    pub mode: BushSearchMode,
    /// Stop after this many matrices (None = enumerate everything).
    pub limit: Option<usize>,
    /// Abort with `Error::BudgetExceeded` after this many search nodes.
    pub budget: Option<u64>,
}

#[derive(Debug)]
pub struct BushSearchOutcome {
    pub matrices: Vec<SignMatrix>,
    /// Search nodes visited (one per tentative placement).
    pub nodes: u64,
    /// True when the whole space was explored rather than stopping at `limit`.
    pub exhausted: bool,
}

/// ±1 vectors of length `w` with zero sum, as ascending bitmasks of the +1
/// positions. Requires even `w`.
fn balanced_masks(w: usize) -> Vec<u32> {
    assert!(w % 2 == 0 && w > 0 && w <= 16);
    (0u32..1 << w)
        .filter(|m| m.count_ones() as usize == w / 2)
        .collect()
}

#[inline]
fn mask_dot(w: usize, a: u32, b: u32) -> i32 {
    w as i32 - 2 * (a ^ b).count_ones() as i32
}

/// Deterministic search for Bush-type Hadamard matrices of order 4n².
pub fn search_bush_type(opts: &BushSearchOptions) -> Result<BushSearchOutcome> {
    assert!(opts.n >= 1, "order parameter n must be at least 1");
    assert!(2 * opts.n <= 16, "block width above 16 is not supported");
    if opts.limit == Some(0) {
        return Ok(BushSearchOutcome {
            matrices: Vec::new(),
            nodes: 0,
            exhausted: false,
        });
    }
    match opts.mode {
        BushSearchMode::BlockNegacyclic => negacyclic_search(opts),
        BushSearchMode::Free => free_search(opts),
    }
}

struct Budget {
    nodes: u64,
    cap: Option<u64>,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.cap {
            Some(cap) if self.nodes > cap => Err(Error::BudgetExceeded { nodes: self.nodes }),
            _ => Ok(()),
        }
    }
}

// --- block-negacyclic mode --------------------------------------------------

/// Row of the first strip: the 2n−1 unknown chunks A_1[s], …, A_{2n−1}[s]
/// as indices into the balanced-mask pool (A_0 = J is fixed).
type StripRow = Vec<u8>;

struct NegacyclicCtx {
    w: usize,         // block width 2n
    chunks: Vec<u32>, // balanced masks
    dot: Vec<i32>,    // chunk dot table, flat [a * chunks.len() + b]
}

impl NegacyclicCtx {
    fn new(n: usize) -> Self {
        let w = 2 * n;
        let chunks = balanced_masks(w);
        let nc = chunks.len();
        let mut dot = vec![0i32; nc * nc];
        for a in 0..nc {
            for b in 0..nc {
                dot[a * nc + b] = mask_dot(w, chunks[a], chunks[b]);
            }
        }
        NegacyclicCtx { w, chunks, dot }
    }

    #[inline]
    fn chunk_dot(&self, a: u8, b: u8) -> i32 {
        self.dot[a as usize * self.chunks.len() + b as usize]
    }

    /// ⟨row_s, ρ_d row_{s'}⟩ where the rows are given by their unknown chunks.
    /// Slot j pairs A_j[s] with A_{(j−d) mod 2n}[s'], negated for j < d; the
    /// two slots touching the fixed all-ones chunk contribute 0 (d ≠ 0) or
    /// 2n (the j = 0 slot at d = 0).
    fn rotation_dot(&self, d: usize, x: &[u8], y: &[u8]) -> i32 {
        let w = self.w;
        let mut total = if d == 0 { w as i32 } else { 0 };
        for j in 0..w {
            let t_b = (j + w - d) % w;
            if j == 0 || t_b == 0 {
                continue;
            }
            let term = self.chunk_dot(x[j - 1], y[t_b - 1]);
            total += if j < d { -term } else { term };
        }
        total
    }

    /// All rotation conditions between two assigned strip rows (both
    /// orientations, every shift). For s = s′ pass the same row and
    /// `same_row = true` to skip the identically-satisfied d = 0 case.
    fn rows_compatible(&self, x: &StripRow, y: &StripRow, same_row: bool) -> bool {
        for d in 0..self.w {
            if d == 0 && same_row {
                continue;
            }
            if self.rotation_dot(d, x, y) != 0 {
                return false;
            }
            if self.rotation_dot(d, y, x) != 0 {
                return false;
            }
        }
        true
    }

    /// Materialize the full matrix from the 2n strip rows.
    fn build(&self, rows: &[&StripRow]) -> SignMatrix {
        let w = self.w;
        let m = w * w;
        let entries: Vec<Vec<i8>> = (0..m)
            .map(|r| {
                let (bi, s) = (r / w, r % w);
                (0..m)
                    .map(|cc| {
                        let (bj, c) = (cc / w, cc % w);
                        let src = (bj + w - bi) % w;
                        let sign: i8 = if bj < bi { -1 } else { 1 };
                        let val: i8 = if src == 0 {
                            1
                        } else if self.chunks[rows[s][src - 1] as usize] >> c & 1 == 1 {
                            1
                        } else {
                            -1
                        };
                        sign * val
                    })
                    .collect()
            })
            .collect();
        SignMatrix::from_signs(&entries)
    }
}

fn negacyclic_search(opts: &BushSearchOptions) -> Result<BushSearchOutcome> {
    let ctx = NegacyclicCtx::new(opts.n);
    let w = ctx.w;
    let nchunks = ctx.chunks.len() as u8;
    let mut budget = Budget {
        nodes: 0,
        cap: opts.budget,
    };

    // Phase 1: rows individually compatible with their own rotations.
    let mut candidates: Vec<StripRow> = Vec::new();
    let mut row: StripRow = vec![0; w - 1];
    enumerate_rows(&ctx, &mut row, 0, nchunks, &mut budget, &mut candidates)?;

    // Phase 2: pick one candidate per inner row, pruning on pairwise
    // rotation conditions and per-chunk column balance. All three filters
    // are invariant under permuting the rows among their slots (the rotation
    // check covers both orientations of a pair, and column balance sums over
    // the chosen set), and reordering the first strip reorders every strip
    // the same way, carrying solutions to solutions. So the backtracking
    // runs over index-increasing candidate sets only, and each complete set
    // fans out into all of its row orders on emission.
    let mut out = BushSearchOutcome {
        matrices: Vec::new(),
        nodes: 0,
        exhausted: false,
    };
    let mut chosen: Vec<usize> = Vec::new();
    let mut col_plus = vec![vec![0u8; w]; w - 1]; // [chunk t−1][column]
    let exhausted = extend_rows(
        &ctx,
        &candidates,
        &mut chosen,
        &mut col_plus,
        opts.limit,
        &mut budget,
        &mut out.matrices,
    )?;
    out.nodes = budget.nodes;
    out.exhausted = exhausted;
    Ok(out)
}

fn enumerate_rows(
    ctx: &NegacyclicCtx,
    row: &mut StripRow,
    t: usize,
    nchunks: u8,
    budget: &mut Budget,
    out: &mut Vec<StripRow>,
) -> Result<()> {
    if t == row.len() {
        if ctx.rows_compatible(row, row, true) {
            out.push(row.clone());
        }
        return Ok(());
    }
    for c in 0..nchunks {
        budget.tick()?;
        row[t] = c;
        enumerate_rows(ctx, row, t + 1, nchunks, budget, out)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend_rows(
    ctx: &NegacyclicCtx,
    candidates: &[StripRow],
    chosen: &mut Vec<usize>,
    col_plus: &mut [Vec<u8>],
    limit: Option<usize>,
    budget: &mut Budget,
    found: &mut Vec<SignMatrix>,
) -> Result<bool> {
    let w = ctx.w;
    let n = w / 2;
    if chosen.len() == w {
        let mut order = chosen.clone();
        loop {
            let rows: Vec<&StripRow> = order.iter().map(|&i| &candidates[i]).collect();
            let h = ctx.build(&rows);
            debug_assert!(check_bush_type(&h, n).is_ok());
            debug_assert_eq!(is_block_negacyclic(&h, n), Ok(true));
            found.push(h);
            if limit.is_some_and(|l| found.len() >= l) {
                return Ok(false);
            }
            if !next_permutation(&mut order) {
                return Ok(true);
            }
        }
    }
    let s = chosen.len();
    let remaining_rows = (w - 1 - s) as u8;
    let start = chosen.last().map_or(0, |&i| i + 1);
    'cand: for (off, cand) in candidates[start..].iter().enumerate() {
        let ci = start + off;
        budget.tick()?;
        for &pi in chosen.iter() {
            if !ctx.rows_compatible(&candidates[pi], cand, false) {
                continue 'cand;
            }
        }
        // Column balance per unknown chunk: exactly n plus signs per column.
        for t in 0..w - 1 {
            let mask = ctx.chunks[cand[t] as usize];
            for col in 0..w {
                let plus = col_plus[t][col] + (mask >> col & 1) as u8;
                if plus > n as u8 || plus + remaining_rows < n as u8 {
                    continue 'cand;
                }
            }
        }
        for t in 0..w - 1 {
            let mask = ctx.chunks[cand[t] as usize];
            for col in 0..w {
                col_plus[t][col] += (mask >> col & 1) as u8;
            }
        }
        chosen.push(ci);
        let keep_going = extend_rows(ctx, candidates, chosen, col_plus, limit, budget, found)?;
        chosen.pop();
        for t in 0..w - 1 {
            let mask = ctx.chunks[cand[t] as usize];
            for col in 0..w {
                col_plus[t][col] -= (mask >> col & 1) as u8;
            }
        }
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Advance to the lexicographically next arrangement; false once the
/// sequence is descending.
fn next_permutation(seq: &mut [usize]) -> bool {
    let k = seq.len();
    let Some(i) = (1..k).rev().find(|&i| seq[i - 1] < seq[i]) else {
        return false;
    };
    let j = (i..k).rev().find(|&j| seq[j] > seq[i - 1]).unwrap();
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

// --- free mode ---------------------------------------------------------------

/// All 2n×2n ±1 blocks with zero row and column sums, as flat row-mask pools.
fn balanced_block_pool(w: usize) -> Vec<Vec<u32>> {
    let rows = balanced_masks(w);
    let mut pool = Vec::new();
    let mut block: Vec<u32> = Vec::with_capacity(w);
    fn rec(
        w: usize,
        rows: &[u32],
        block: &mut Vec<u32>,
        col_plus: &mut [u8],
        pool: &mut Vec<Vec<u32>>,
    ) {
        if block.len() == w {
            pool.push(block.clone());
            return;
        }
        let remaining = (w - 1 - block.len()) as u8;
        'rows: for &mask in rows {
            for col in 0..w {
                let plus = col_plus[col] + (mask >> col & 1) as u8;
                if plus > (w / 2) as u8 || plus + remaining < (w / 2) as u8 {
                    continue 'rows;
                }
            }
            for col in 0..w {
                col_plus[col] += (mask >> col & 1) as u8;
            }
            block.push(mask);
            rec(w, rows, block, col_plus, pool);
            block.pop();
            for col in 0..w {
                col_plus[col] -= (mask >> col & 1) as u8;
            }
        }
    }
    let mut col_plus = vec![0u8; w];
    rec(w, &rows, &mut block, &mut col_plus, &mut pool);
    pool
}

struct FreeSearch<'a> {
    w: usize,
    pool: &'a [Vec<u32>],
    /// Off-diagonal positions in placement order: (block row, block col).
    positions: Vec<(usize, usize)>,
    /// Chosen pool index per position.
    assigned: Vec<usize>,
    limit: Option<usize>,
}

impl<'a> FreeSearch<'a> {
    fn block_at(&self, bi: usize, bj: usize, upto: usize) -> Option<&'a [u32]> {
        if bi == bj {
            return None; // diagonal J handled separately
        }
        self.positions[..upto]
            .iter()
            .position(|&p| p == (bi, bj))
            .map(|idx| self.pool[self.assigned[idx]].as_slice())
    }

    /// Exact orthogonality check for all row pairs that became fully
    /// determined once every block of strip `bi` is placed: pairs inside the
    /// strip and pairs against every earlier strip.
    fn strip_ok(&self, bi: usize, upto: usize) -> bool {
        let w = self.w;
        let ones = (1u32 << w) - 1;
        let row_of = |strip: usize, s: usize, bj: usize| -> u32 {
            if strip == bj {
                return ones;
            }
            let block = self.block_at(strip, bj, upto).expect("strip placed");
            block[s]
        };
        // Within the strip: pairs (s, s′) share the diagonal J contribution 2n.
        for s in 0..w {
            for s2 in (s + 1)..w {
                let mut total = 0i32;
                for bj in 0..w {
                    total += mask_dot(w, row_of(bi, s, bj), row_of(bi, s2, bj));
                }
                if total != 0 {
                    return false;
                }
            }
        }
        for bi2 in 0..bi {
            for s in 0..w {
                for s2 in 0..w {
                    let mut total = 0i32;
                    for bj in 0..w {
                        total += mask_dot(w, row_of(bi, s, bj), row_of(bi2, s2, bj));
                    }
                    if total != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn build(&self) -> SignMatrix {
        let w = self.w;
        let m = w * w;
        let entries: Vec<Vec<i8>> = (0..m)
            .map(|r| {
                let (bi, s) = (r / w, r % w);
                (0..m)
                    .map(|cc| {
                        let (bj, c) = (cc / w, cc % w);
                        if bi == bj {
                            1
                        } else {
                            let block = self
                                .block_at(bi, bj, self.positions.len())
                                .expect("complete");
                            if block[s] >> c & 1 == 1 {
                                1
                            } else {
                                -1
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        SignMatrix::from_signs(&entries)
    }

    fn dfs(
        &mut self,
        pos: usize,
        budget: &mut Budget,
        found: &mut Vec<SignMatrix>,
    ) -> Result<bool> {
        if pos == self.positions.len() {
            let h = self.build();
            debug_assert!(check_bush_type(&h, self.w / 2).is_ok());
            found.push(h);
            return Ok(self.limit.map_or(true, |l| found.len() < l));
        }
        let (bi, bj) = self.positions[pos];
        let strip_complete = bj == self.w - 1 || (bj == self.w - 2 && bi == self.w - 1);
        for pi in 0..self.pool.len() {
            budget.tick()?;
            self.assigned[pos] = pi;
            // Check the finished strip once its last block lands.
            if strip_complete && !self.strip_ok(bi, pos + 1) {
                continue;
            }
            if !self.dfs(pos + 1, budget, found)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn free_search(opts: &BushSearchOptions) -> Result<BushSearchOutcome> {
    let w = 2 * opts.n;
    let pool = balanced_block_pool(w);
    let mut positions = Vec::new();
    for bi in 0..w {
        for bj in 0..w {
            if bi != bj {
                positions.push((bi, bj));
            }
        }
    }
    let npos = positions.len();
    let mut search = FreeSearch {
        w,
        pool: &pool,
        positions,
        assigned: vec![0; npos],
        limit: opts.limit,
    };
    let mut budget = Budget {
        nodes: 0,
        cap: opts.budget,
    };
    let mut matrices = Vec::new();
    let exhausted = search.dfs(0, &mut budget, &mut matrices)?;
    Ok(BushSearchOutcome {
        matrices,
        nodes: budget.nodes,
        exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::validate_2design;

    /// Order-4 Bush-type matrix: diagonal 2×2 blocks J, off-diagonal blocks
    /// the two balanced 2×2 blocks.
    fn bush4() -> SignMatrix {
        SignMatrix::from_signs(&[
            vec![1, 1, 1, -1],
            vec![1, 1, -1, 1],
            vec![1, -1, 1, 1],
            vec![-1, 1, 1, 1],
        ])
    }

    /// Sylvester-type order 4: Hadamard but not regular.
    fn sylvester4() -> SignMatrix {
        SignMatrix::from_signs(&[
            vec![1, 1, 1, 1],
            vec![1, -1, 1, -1],
            vec![1, 1, -1, -1],
            vec![1, -1, -1, 1],
        ])
    }

    #[test]
    fn bush4_recognized() {
        let h = bush4();
        assert!(h.is_hadamard());
        assert_eq!(h.regular_excess().unwrap(), 2);
        assert_eq!(check_bush_type(&h, 1), Ok(()));
        assert_eq!(is_bush_type(&h, 1), Ok(true));
        assert_eq!(
            check_bush_type(&h, 2),
            Err(Error::OrderMismatch { m: 4, n: 2 })
        );
    }

    #[test]
    fn sylvester_is_hadamard_but_not_bush() {
        let h = sylvester4();
        assert!(h.is_hadamard());
        assert_eq!(
            h.regular_excess(),
            Err(Error::NotRegular {
                line: "row",
                index: 1,
                sum: 0
            })
        );
        assert_eq!(is_bush_type(&h, 1), Ok(false));
    }

    #[test]
    fn non_hadamard_rejected() {
        let mut entries = vec![vec![1i8; 4]; 4];
        entries[3][3] = -1;
        let h = SignMatrix::from_signs(&entries);
        assert_eq!(
            check_bush_type(&h, 1),
            Err(Error::NotHadamard { row_a: 0, row_b: 1 })
        );
        assert_eq!(
            is_bush_type(&h, 1),
            Err(Error::NotHadamard { row_a: 0, row_b: 1 })
        );
    }

    #[test]
    fn menon_round_trip_order_4() {
        let h = bush4();
        let design = hadamard_to_menon(&h).unwrap();
        // Order 4 degenerates: blocks are singletons {3},{2},{1},{0}.
        assert_eq!(design.block_points(0), vec![3]);
        assert_eq!(design.block_points(3), vec![0]);
        let back = menon_to_hadamard(&design).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn menon_rejects_negative_excess() {
        let neg = bush4().monomial_transform(
            &[0, 1, 2, 3],
            &[-1, -1, -1, -1],
            &[0, 1, 2, 3],
            &[1, 1, 1, 1],
        );
        assert_eq!(
            hadamard_to_menon(&neg),
            Err(Error::WrongRowSum {
                sum: -2,
                expected: 2
            })
        );
    }

    #[test]
    fn menon_rejects_non_designs() {
        assert_eq!(
            menon_to_hadamard(&crate::design::d_6_3_2()),
            Err(Error::NotSymmetric { v: 6, b: 10 })
        );
        assert_eq!(
            menon_to_hadamard(&crate::design::fano()),
            Err(Error::NotHadamard { row_a: 0, row_b: 1 })
        );
    }

    #[test]
    fn diagonal_sets_of_bush4() {
        let design = hadamard_to_menon(&bush4()).unwrap();
        let sets = diagonal_switching_sets(&design, 1).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].blocks(), &[0, 1]);
        assert_eq!(sets[0].p1(), &[0, 1]);
        assert!(sets[0].p2().is_empty());
        assert_eq!(sets[0].balanced(), &[2, 3]);
        assert_eq!(sets[1].blocks(), &[2, 3]);
        assert_eq!(sets[1].p1(), &[2, 3]);
        // Applying a diagonal set keeps the structure square and ±1-convertible.
        let switched = crate::switching::apply_switching(&design, &sets[0]).unwrap();
        assert!(menon_to_hadamard(&switched).is_ok());
    }

    #[test]
    fn diagonal_sets_reject_shuffled_grouping() {
        // Swapping two points across groups breaks the "own group untouched"
        // structure even though each group still forms a valid switching set.
        let design = hadamard_to_menon(&bush4()).unwrap();
        let mut rows = Vec::new();
        for b in 0..4 {
            let mut row = Bitset::new(4);
            for p in 0..4 {
                let q = match p {
                    1 => 2,
                    2 => 1,
                    _ => p,
                };
                row.set(p, design.contains(b, q));
            }
            rows.push(row);
        }
        let shuffled = IncidenceStructure::from_rows(4, rows);
        assert!(matches!(
            diagonal_switching_sets(&shuffled, 1),
            Err(Error::NotBushStructured { .. })
        ));
        assert!(matches!(
            diagonal_switching_sets(&crate::design::fano(), 1),
            Err(Error::NotBushStructured { .. })
        ));
    }

    #[test]
    fn negacyclicity_detection() {
        // bush4 has H_{1,0} = +H_{0,1}, but the negacyclic closed form wants
        // the wrapped block negated: H_{1,0} = −H_{0,1}.
        assert_eq!(is_block_negacyclic(&bush4(), 1), Ok(false));
        let nega = SignMatrix::from_signs(&[
            vec![1, 1, 1, -1],
            vec![1, 1, -1, 1],
            vec![-1, 1, 1, 1],
            vec![1, -1, 1, 1],
        ]);
        assert!(nega.is_hadamard());
        assert_eq!(is_block_negacyclic(&nega, 1), Ok(true));
        assert_eq!(check_bush_type(&nega, 1), Ok(()));
    }

    /// Oracle for order 4: enumerate all 2^8 off-diagonal sign patterns.
    fn brute_force_bush4() -> Vec<SignMatrix> {
        let mut out = Vec::new();
        for bits in 0u32..1 << 8 {
            let mut entries = vec![vec![1i8; 4]; 4];
            let mut k = 0;
            for i in 0..4 {
                for j in 0..4 {
                    if i / 2 != j / 2 {
                        entries[i][j] = if bits >> k & 1 == 1 { 1 } else { -1 };
                        k += 1;
                    }
                }
            }
            let h = SignMatrix::from_signs(&entries);
            if is_bush_type(&h, 1).unwrap_or(false) {
                out.push(h);
            }
        }
        out
    }

    #[test]
    fn free_search_order_4_matches_brute_force() {
        let opts = BushSearchOptions {
            n: 1,
            mode: BushSearchMode::Free,
            limit: None,
            budget: None,
        };
        let outcome = search_bush_type(&opts).unwrap();
        assert!(outcome.exhausted);
        let expected = brute_force_bush4();
        assert_eq!(outcome.matrices.len(), expected.len());
        for h in &outcome.matrices {
            assert!(expected.contains(h));
        }
        for h in &expected {
            assert!(outcome.matrices.contains(h));
        }
    }

    #[test]
    fn negacyclic_search_order_4_is_the_negacyclic_slice_of_free() {
        let nega = search_bush_type(&BushSearchOptions {
            n: 1,
            mode: BushSearchMode::BlockNegacyclic,
            limit: None,
            budget: None,
        })
        .unwrap();
        assert!(nega.exhausted);
        let free = search_bush_type(&BushSearchOptions {
            n: 1,
            mode: BushSearchMode::Free,
            limit: None,
            budget: None,
        })
        .unwrap();
        let filtered: Vec<&SignMatrix> = free
            .matrices
            .iter()
            .filter(|h| is_block_negacyclic(h, 1).unwrap())
            .collect();
        assert_eq!(nega.matrices.len(), filtered.len());
        for h in &nega.matrices {
            assert!(filtered.contains(&h));
        }
    }

    #[test]
    fn search_respects_limit_and_budget() {
        let limited = search_bush_type(&BushSearchOptions {
            n: 1,
            mode: BushSearchMode::Free,
            limit: Some(1),
            budget: None,
        })
        .unwrap();
        assert_eq!(limited.matrices.len(), 1);
        assert!(!limited.exhausted);

        let starved = search_bush_type(&BushSearchOptions {
            n: 1,
            mode: BushSearchMode::Free,
            limit: None,
            budget: Some(2),
        });
        assert!(matches!(starved, Err(Error::BudgetExceeded { .. })));

        for mode in [BushSearchMode::Free, BushSearchMode::BlockNegacyclic] {
            let none = search_bush_type(&BushSearchOptions {
                n: 1,
                mode,
                limit: Some(0),
                budget: None,
            })
            .unwrap();
            assert!(none.matrices.is_empty());
            assert_eq!(none.nodes, 0);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let opts = BushSearchOptions {
            n: 1,
            mode: BushSearchMode::BlockNegacyclic,
            limit: None,
            budget: None,
        };
        let a = search_bush_type(&opts).unwrap();
        let b = search_bush_type(&opts).unwrap();
        assert_eq!(a.matrices, b.matrices);
    }

    #[test]
    fn negacyclic_search_order_16_verifies() {
        // Existence at n = 2 is not asserted, only that whatever is found is
        // genuinely Bush-type and negacyclic implies the derived design checks.
        let outcome = search_bush_type(&BushSearchOptions {
            n: 2,
            mode: BushSearchMode::BlockNegacyclic,
            limit: Some(3),
            budget: Some(50_000_000),
        });
        let outcome = match outcome {
            Ok(o) => o,
            Err(Error::BudgetExceeded { .. }) => return,
            Err(e) => panic!("unexpected error: {e}"),
        };
        for h in &outcome.matrices {
            assert_eq!(check_bush_type(h, 2), Ok(()));
            assert_eq!(is_block_negacyclic(h, 2), Ok(true));
            let design = hadamard_to_menon(h).unwrap();
            let params = validate_2design(&design).unwrap();
            assert_eq!((params.v, params.k, params.lambda), (16, 6, 2));
        }
    }

    #[test]
    fn regular_excess_spots_column_irregularity() {
        // Row-regular but column sums differ: impossible for Hadamard, so use
        // a non-Hadamard ±1 matrix to exercise the column branch.
        let h = SignMatrix::from_signs(&[
            vec![1, 1, -1, -1],
            vec![1, 1, -1, -1],
            vec![-1, -1, 1, 1],
            vec![1, 1, -1, -1],
        ]);
        assert_eq!(
            h.regular_excess(),
            Err(Error::NotRegular {
                line: "column",
                index: 0,
                sum: 2
            })
        );
    }

    #[test]
    fn monomial_transform_composes_signs() {
        let h = bush4();
        let t = h.monomial_transform(&[1, 0, 2, 3], &[1, -1, 1, 1], &[0, 1, 3, 2], &[1, 1, -1, 1]);
        assert_eq!(t.entry(0, 0), h.entry(1, 0));
        assert_eq!(t.entry(1, 0), -h.entry(0, 0));
        assert_eq!(t.entry(0, 2), -h.entry(1, 3));
        assert!(t.is_hadamard());
    }
}
