//! Brute-force oracles for the acceptance suite. Everything here trades speed
//! for obviousness: exhaustive loops and naive arithmetic, no shared state
//! with the implementations under test.

use switchkit::design::IncidenceStructure;

/// Advance `a` to its lexicographic successor; false once `a` is the last
/// (descending) permutation.
pub fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Blocks as point bitmasks, for structures on at most 32 points.
fn block_masks(inc: &IncidenceStructure) -> Vec<u32> {
    assert!(inc.v() <= 32, "oracle limited to small structures");
    (0..inc.b())
        .map(|blk| {
            inc.block_points(blk)
                .into_iter()
                .fold(0u32, |m, p| m | 1 << p)
        })
        .collect()
}

fn permuted_sorted(masks: &[u32], perm: &[usize]) -> Vec<u32> {
    let mut out: Vec<u32> = masks
        .iter()
        .map(|&m| {
            (0..perm.len())
                .filter(|&p| m >> p & 1 == 1)
                .fold(0u32, |acc, p| acc | 1 << perm[p])
        })
        .collect();
    out.sort_unstable();
    out
}

/// Isomorphism by trying all point permutations; block correspondence is
/// multiset equality of the relabeled blocks.
pub fn brute_force_isomorphic(a: &IncidenceStructure, b: &IncidenceStructure) -> bool {
    if a.v() != b.v() || a.b() != b.b() {
        return false;
    }
    let a_masks = block_masks(a);
    let mut b_masks = block_masks(b);
    b_masks.sort_unstable();
    let mut perm: Vec<usize> = (0..a.v()).collect();
    loop {
        if permuted_sorted(&a_masks, &perm) == b_masks {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

/// |Aut| by trying all point permutations. An automorphism is a point/block
/// permutation pair, so each block-multiset-preserving point permutation
/// counts once per way of matching up equal blocks.
pub fn brute_force_aut_order(inc: &IncidenceStructure) -> u128 {
    let masks = block_masks(inc);
    let mut sorted = masks.clone();
    sorted.sort_unstable();
    let mut matchings: u128 = 1;
    let mut run = 1u128;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            run += 1;
            matchings *= run;
        } else {
            run = 1;
        }
    }
    let mut order: u128 = 0;
    let mut perm: Vec<usize> = (0..inc.v()).collect();
    loop {
        if permuted_sorted(&masks, &perm) == sorted {
            order += matchings;
        }
        if !next_permutation(&mut perm) {
            return order;
        }
    }
}

/// Incidence matrix as plain integers, blocks as rows.
pub fn incidence_entries(inc: &IncidenceStructure) -> Vec<Vec<i64>> {
    (0..inc.b())
        .map(|blk| {
            (0..inc.v())
                .map(|p| i64::from(inc.contains(blk, p)))
                .collect()
        })
        .collect()
}

/// Rank over GF(p) by textbook Gaussian elimination on integer entries.
pub fn naive_rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
    assert!(p >= 2);
    let mut m: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        // Fermat inverse; p is prime.
        let inv = mod_pow(m[rank][col], p - 2, p);
        for x in &mut m[rank] {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    m[r][c] = (m[r][c] - f * m[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_pow(mut base: i64, mut exp: i64, p: i64) -> i64 {
    let mut acc = 1i64;
    base = base.rem_euclid(p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}
