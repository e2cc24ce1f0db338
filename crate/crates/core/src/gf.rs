//! p-ranks of incidence matrices over GF(p).
//!
//! GF(2) runs on word-packed rows with XOR elimination; odd primes use plain
//! residue arithmetic with Fermat inverses. Ranks of incidence matrices are a
//! standard isomorphism invariant: they can drop below v − 1 only when p
//! divides k − λ, which is what makes the orders here interesting.

use std::collections::BTreeMap;

use crate::bitset::Bitset;
use crate::design::IncidenceStructure;
use crate::error::{Error, Result};

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime { n: p })
    }
}

/// Rank of the block-by-point incidence matrix over GF(p).
pub fn p_rank(inc: &IncidenceStructure, p: u64) -> Result<usize> {
    check_prime(p)?;
    if p == 2 {
        Ok(rank_gf2(inc.rows().to_vec()))
    } else {
        let rows: Vec<Vec<u64>> = inc
            .rows()
            .iter()
            .map(|row| (0..inc.v()).map(|j| u64::from(row.contains(j))).collect())
            .collect();
        Ok(rank_mod_p(rows, p))
    }
}

/// Histogram rank → number of designs.
pub fn rank_distribution<'a, I>(designs: I, p: u64) -> Result<BTreeMap<usize, usize>>
where
    I: IntoIterator<Item = &'a IncidenceStructure>,
{
    check_prime(p)?;
    let mut hist = BTreeMap::new();
    for inc in designs {
        *hist.entry(p_rank(inc, p)?).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Word-packed GF(2) elimination; consumes the rows.
fn rank_gf2(mut rows: Vec<Bitset>) -> usize {
    let width = rows.first().map_or(0, Bitset::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].contains(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row.contains(col) {
                row.xor_with(&pivot_row);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Gaussian elimination over GF(p) for odd p; entries must already be < p.
/// p must stay below 2^31 so products fit in u64.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    assert!(p < 1 << 31, "modulus too large");
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col] % p, p);
        for j in col..width {
            rows[rank][j] = rows[rank][j] % p * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[col] % p;
            if factor != 0 {
                for j in col..width {
                    row[j] = (row[j] % p + (p - factor) * pivot_row[j] % p) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{d_6_3_2, fano};
    use rand::{Rng, SeedableRng};

    /// Independent oracle: textbook fraction-free elimination on i64 entries,
    /// reducing mod p *only* when searching pivots and scaling. Shares no code
    /// with the library paths.
    fn oracle_rank(matrix: &[Vec<i64>], p: i64) -> usize {
        let mut m: Vec<Vec<i64>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
            .collect();
        let (nrows, ncols) = (m.len(), m.first().map_or(0, Vec::len));
        let mut rank = 0;
        for c in 0..ncols {
            let mut piv = None;
            for r in rank..nrows {
                if m[r][c] % p != 0 {
                    piv = Some(r);
                    break;
                }
            }
            let Some(piv) = piv else { continue };
            m.swap(rank, piv);
            for r in 0..nrows {
                if r != rank && m[r][c] != 0 {
                    let (a, b) = (m[rank][c], m[r][c]);
                    for j in 0..ncols {
                        m[r][j] = (m[r][j] * a - m[rank][j] * b).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn as_i64(inc: &IncidenceStructure) -> Vec<Vec<i64>> {
        inc.rows()
            .iter()
            .map(|row| (0..inc.v()).map(|j| i64::from(row.contains(j))).collect())
            .collect()
    }

    #[test]
    fn rejects_non_primes() {
        let f = fano();
        for p in [0u64, 1, 4, 6, 9, 15] {
            assert_eq!(p_rank(&f, p).unwrap_err(), Error::NotPrime { n: p });
        }
    }

    #[test]
    fn identity_matrix_has_full_rank() {
        for p in [2u64, 3, 5] {
            let ident = IncidenceStructure::from_blocks(6, (0..6).map(|i| vec![i])).unwrap();
            assert_eq!(p_rank(&ident, p).unwrap(), 6);
        }
    }

    #[test]
    fn all_ones_matrix_has_rank_one() {
        let ones =
            IncidenceStructure::from_blocks(5, (0..4).map(|_| (0..5).collect::<Vec<_>>())).unwrap();
        for p in [2u64, 3, 7] {
            assert_eq!(p_rank(&ones, p).unwrap(), 1);
        }
    }

    #[test]
    fn fano_2_rank_is_4() {
        let f = fano();
        assert_eq!(oracle_rank(&as_i64(&f), 2), 4);
        assert_eq!(p_rank(&f, 2).unwrap(), 4);
        // 3 divides r = 3, so the all-ones vector drops the rank to v - 1;
        // only p | k - lambda can push it lower than that.
        assert_eq!(p_rank(&f, 3).unwrap(), 6);
        assert_eq!(p_rank(&f, 7).unwrap(), 7);
    }

    #[test]
    fn library_matches_oracle_on_fixtures_and_random_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let mut cases: Vec<IncidenceStructure> = vec![fano(), d_6_3_2(), fano().dual()];
        for _ in 0..40 {
            let v = rng.gen_range(1..=9);
            let b = rng.gen_range(1..=9);
            let rows = (0..b)
                .map(|_| Bitset::from_indices(v, (0..v).filter(|_| rng.gen_bool(0.5))))
                .collect();
            cases.push(IncidenceStructure::from_rows(v, rows));
        }
        for inc in &cases {
            for p in [2u64, 3, 5, 7] {
                assert_eq!(
                    p_rank(inc, p).unwrap(),
                    oracle_rank(&as_i64(inc), p as i64),
                    "disagreement at p = {p} on {inc:?}"
                );
            }
        }
    }

    #[test]
    fn rank_is_invariant_under_relabeling() {
        let f = fano();
        let base = p_rank(&f, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let mut pp: Vec<usize> = (0..7).collect();
            let mut bp: Vec<usize> = (0..7).collect();
            for i in (1..7).rev() {
                pp.swap(i, rng.gen_range(0..=i));
                bp.swap(i, rng.gen_range(0..=i));
            }
            assert_eq!(p_rank(&f.relabel(&pp, &bp), 2).unwrap(), base);
        }
    }

    #[test]
    fn distribution_counts_designs() {
        let f = fano();
        let dual = f.dual();
        let hist = rank_distribution([&f, &dual, &f], 2).unwrap();
        assert_eq!(hist, BTreeMap::from([(4, 3)]));
        assert_eq!(
            rank_distribution([&f], 10).unwrap_err(),
            Error::NotPrime { n: 10 }
        );
    }
}
