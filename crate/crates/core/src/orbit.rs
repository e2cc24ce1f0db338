//! Orbit matrices of 2-designs and switching at the orbit level.
//!
//! An automorphism group partitions points into orbits of lengths ω_1..ω_s and
//! blocks into orbits of lengths β_1..β_t. The orbit matrix entry c_ij counts
//! the points of point-orbit j on any one block of block-orbit i (well defined
//! by orbit transitivity). The counting identities are
//!
//!   Σ_j c_ij = k                 (every block row)
//!   Σ_i β_i c_ij = ω_j r         (every point column)
//!
//! and, for symmetric designs, the orthogonality relation
//!
//!   Σ_j (β_i / ω_j) c_ij c_i'j = λ β_i + δ_ii' (k − λ).
//!
//! Switching lifts to this level: a set S of block-orbit rows switches when
//! every point-orbit column is untouched (all c_ij = 0 for i ∈ S), full
//! (all c_ij = ω_j), or balanced (2 Σ_{i∈S} β_i c_ij = ω_j Σ_{i∈S} β_i);
//! the switch replaces c_ij by ω_j − c_ij on the balanced columns.

use crate::design::DesignParams;
use crate::error::{Error, Result};
use serde::Serialize;

/// Orbit matrix of a 2-design, rows indexed by block orbits and columns by
/// point orbits, together with the design parameters it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMatrix {
    point_orbit_lengths: Vec<usize>,
    block_orbit_lengths: Vec<usize>,
    entries: Vec<Vec<usize>>,
    params: DesignParams,
}

impl OrbitMatrix {
    /// Shape errors (empty orbits, ragged rows) are programming errors and
    /// panic; everything arithmetical is reported by [`validate_orbit_matrix`].
    pub fn new(
        params: DesignParams,
        point_orbit_lengths: Vec<usize>,
        block_orbit_lengths: Vec<usize>,
        entries: Vec<Vec<usize>>,
    ) -> Self {
        assert!(!point_orbit_lengths.is_empty(), "no point orbits");
        assert!(!block_orbit_lengths.is_empty(), "no block orbits");
        assert!(
            point_orbit_lengths.iter().all(|&w| w > 0),
            "zero-length point orbit"
        );
        assert!(
            block_orbit_lengths.iter().all(|&b| b > 0),
            "zero-length block orbit"
        );
        assert_eq!(entries.len(), block_orbit_lengths.len());
        for row in &entries {
            assert_eq!(row.len(), point_orbit_lengths.len(), "ragged entry row");
        }
        OrbitMatrix {
            point_orbit_lengths,
            block_orbit_lengths,
            entries,
            params,
        }
    }

    pub fn params(&self) -> DesignParams {
        self.params
    }

    /// Number of point orbits (columns).
    pub fn point_orbits(&self) -> usize {
        self.point_orbit_lengths.len()
    }

    /// Number of block orbits (rows).
    pub fn block_orbits(&self) -> usize {
        self.block_orbit_lengths.len()
    }

    /// ω_j, the point-orbit lengths.
    pub fn point_orbit_lengths(&self) -> &[usize] {
        &self.point_orbit_lengths
    }

    /// β_i, the block-orbit lengths.
    pub fn block_orbit_lengths(&self) -> &[usize] {
        &self.block_orbit_lengths
    }

    pub fn entry(&self, row: usize, col: usize) -> usize {
        self.entries[row][col]
    }

    pub fn row(&self, row: usize) -> &[usize] {
        &self.entries[row]
    }
}

/// One violated identity, with enough indices to locate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OrbitFailure {
    /// One of r(k−1) = λ(v−1), bk = vr, 1 < k < v−1 fails on the parameters.
    ParamIdentity { identity: &'static str },
    /// Point-orbit lengths do not sum to v.
    PointTotal { total: usize, expected: usize },
    /// Block-orbit lengths do not sum to b.
    BlockTotal { total: usize, expected: usize },
    /// An entry exceeds its point-orbit length.
    EntryRange {
        row: usize,
        col: usize,
        entry: usize,
        limit: usize,
    },
    /// Row sum differs from k.
    RowSum {
        row: usize,
        sum: usize,
        expected: usize,
    },
    /// Σ_i β_i c_ij differs from ω_j r.
    ColumnSum {
        col: usize,
        sum: usize,
        expected: usize,
    },
    /// The orthogonality relation fails for rows (row_a, row_b); symmetric
    /// designs only.
    Orthogonality { row_a: usize, row_b: usize },
}

impl std::fmt::Display for OrbitFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrbitFailure::ParamIdentity { identity } => {
                write!(f, "parameter identity {identity} fails")
            }
            OrbitFailure::PointTotal { total, expected } => {
                write!(
                    f,
                    "point-orbit lengths sum to {total}, expected v = {expected}"
                )
            }
            OrbitFailure::BlockTotal { total, expected } => {
                write!(
                    f,
                    "block-orbit lengths sum to {total}, expected b = {expected}"
                )
            }
            OrbitFailure::EntryRange {
                row,
                col,
                entry,
                limit,
            } => write!(
                f,
                "entry ({row}, {col}) = {entry} exceeds point-orbit length {limit}"
            ),
            OrbitFailure::RowSum { row, sum, expected } => {
                write!(f, "row {row} sums to {sum}, expected k = {expected}")
            }
            OrbitFailure::ColumnSum { col, sum, expected } => write!(
                f,
                "column {col} weighted sum is {sum}, expected omega * r = {expected}"
            ),
            OrbitFailure::Orthogonality { row_a, row_b } => {
                write!(f, "orthogonality fails for rows ({row_a}, {row_b})")
            }
        }
    }
}

/// Outcome of [`validate_orbit_matrix`]: every violated identity, not just the
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitValidation {
    pub failures: Vec<OrbitFailure>,
}

impl OrbitValidation {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check every counting identity of an orbit matrix and report all failures.
/// The orthogonality relation applies to symmetric parameter sets only and is
/// skipped (not failed) otherwise.
pub fn validate_orbit_matrix(om: &OrbitMatrix) -> OrbitValidation {
    let mut failures = Vec::new();
    let p = om.params();
    let (v, b, r, k, lambda) = (p.v, p.b, p.r, p.k, p.lambda);

    if k < 2 || k + 1 >= v {
        failures.push(OrbitFailure::ParamIdentity {
            identity: "1 < k < v - 1",
        });
    }
    if r * (k.saturating_sub(1)) != lambda * (v.saturating_sub(1)) {
        failures.push(OrbitFailure::ParamIdentity {
            identity: "r(k - 1) = lambda(v - 1)",
        });
    }
    if b * k != v * r {
        failures.push(OrbitFailure::ParamIdentity {
            identity: "bk = vr",
        });
    }

    let point_total: usize = om.point_orbit_lengths().iter().sum();
    if point_total != v {
        failures.push(OrbitFailure::PointTotal {
            total: point_total,
            expected: v,
        });
    }
    let block_total: usize = om.block_orbit_lengths().iter().sum();
    if block_total != b {
        failures.push(OrbitFailure::BlockTotal {
            total: block_total,
            expected: b,
        });
    }

    for i in 0..om.block_orbits() {
        for j in 0..om.point_orbits() {
            let c = om.entry(i, j);
            let w = om.point_orbit_lengths()[j];
            if c > w {
                failures.push(OrbitFailure::EntryRange {
                    row: i,
                    col: j,
                    entry: c,
                    limit: w,
                });
            }
        }
    }

    for i in 0..om.block_orbits() {
        let sum: usize = om.row(i).iter().sum();
        if sum != k {
            failures.push(OrbitFailure::RowSum {
                row: i,
                sum,
                expected: k,
            });
        }
    }

    for j in 0..om.point_orbits() {
        let sum: usize = (0..om.block_orbits())
            .map(|i| om.block_orbit_lengths()[i] * om.entry(i, j))
            .sum();
        let expected = om.point_orbit_lengths()[j] * r;
        if sum != expected {
            failures.push(OrbitFailure::ColumnSum {
                col: j,
                sum,
                expected,
            });
        }
    }

    if p.is_symmetric() {
        // Scale by lcm(ω) so every term is an integer: the relation becomes
        //   Σ_j (L/ω_j) β_i c_ij c_i'j = L (λ β_i + δ_ii' (k − λ)).
        let scale = om
            .point_orbit_lengths()
            .iter()
            .fold(1u128, |acc, &w| lcm(acc, w as u128));
        for a in 0..om.block_orbits() {
            for bb in a..om.block_orbits() {
                let lhs: u128 = (0..om.point_orbits())
                    .map(|j| {
                        (scale / om.point_orbit_lengths()[j] as u128)
                            * om.block_orbit_lengths()[a] as u128
                            * om.entry(a, j) as u128
                            * om.entry(bb, j) as u128
                    })
                    .sum();
                let delta = if a == bb { (k - lambda) as u128 } else { 0 };
                let rhs = scale * (lambda as u128 * om.block_orbit_lengths()[a] as u128 + delta);
                if lhs != rhs {
                    failures.push(OrbitFailure::Orthogonality {
                        row_a: a,
                        row_b: bb,
                    });
                }
            }
        }
    }

    OrbitValidation { failures }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

/// How a point-orbit column sits relative to a chosen set of block-orbit rows.
enum ColumnClass {
    Untouched,
    Full,
    Balanced,
}

fn classify_column(om: &OrbitMatrix, rows: &[usize], col: usize) -> Option<ColumnClass> {
    let w = om.point_orbit_lengths()[col];
    if rows.iter().all(|&i| om.entry(i, col) == 0) {
        return Some(ColumnClass::Untouched);
    }
    if rows.iter().all(|&i| om.entry(i, col) == w) {
        return Some(ColumnClass::Full);
    }
    let beta_total: usize = rows.iter().map(|&i| om.block_orbit_lengths()[i]).sum();
    let weighted: usize = rows
        .iter()
        .map(|&i| om.block_orbit_lengths()[i] * om.entry(i, col))
        .sum();
    if 2 * weighted == w * beta_total {
        return Some(ColumnClass::Balanced);
    }
    None
}

/// Switch the block-orbit rows in `rows`: balanced columns j get c ↦ ω_j − c
/// on those rows, untouched and full columns stay. Errors with
/// [`Error::OrbitSplitsClasses`] when some column is in none of the three
/// classes. Duplicate row indices are ignored; `rows = ∅` is the identity.
pub fn orbit_switching(om: &OrbitMatrix, rows: &[usize]) -> Result<OrbitMatrix> {
    let mut rows: Vec<usize> = rows.to_vec();
    rows.sort_unstable();
    rows.dedup();
    if let Some(&bad) = rows.iter().find(|&&i| i >= om.block_orbits()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: om.block_orbits(),
        });
    }
    if rows.is_empty() {
        return Ok(om.clone());
    }

    let mut classes = Vec::with_capacity(om.point_orbits());
    for j in 0..om.point_orbits() {
        match classify_column(om, &rows, j) {
            Some(class) => classes.push(class),
            None => return Err(Error::OrbitSplitsClasses { orbit: j }),
        }
    }

    let mut out = om.clone();
    for &i in &rows {
        for (j, class) in classes.iter().enumerate() {
            if matches!(class, ColumnClass::Balanced) {
                out.entries[i][j] = om.point_orbit_lengths()[j] - om.entry(i, j);
            }
        }
    }
    Ok(out)
}

/// All nonempty row subsets S with Σ_{i∈S} β_i ≤ `max_blocks` on which
/// [`orbit_switching`] is defined, in lexicographic order of the index lists.
pub fn orbit_switching_candidates(om: &OrbitMatrix, max_blocks: usize) -> Vec<Vec<usize>> {
    fn extend(
        om: &OrbitMatrix,
        max_blocks: usize,
        first: usize,
        total: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for i in first..om.block_orbits() {
            let beta = om.block_orbit_lengths()[i];
            if total + beta > max_blocks {
                continue;
            }
            chosen.push(i);
            if (0..om.point_orbits()).all(|j| classify_column(om, chosen, j).is_some()) {
                out.push(chosen.clone());
            }
            extend(om, max_blocks, i + 1, total + beta, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    extend(om, max_blocks, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Witness that two orbit matrices agree up to permuting block-orbit rows and
/// point-orbit columns (respecting orbit lengths): returns (ρ, σ) with
/// b[i][j] = a[ρ(i)][σ(j)], the lexicographically first such ρ, or None.
pub fn orbit_matrices_equivalent(
    a: &OrbitMatrix,
    b: &OrbitMatrix,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.params() != b.params()
        || a.block_orbits() != b.block_orbits()
        || a.point_orbits() != b.point_orbits()
    {
        return None;
    }
    let mut a_beta = a.block_orbit_lengths().to_vec();
    let mut b_beta = b.block_orbit_lengths().to_vec();
    a_beta.sort_unstable();
    b_beta.sort_unstable();
    let mut a_omega = a.point_orbit_lengths().to_vec();
    let mut b_omega = b.point_orbit_lengths().to_vec();
    a_omega.sort_unstable();
    b_omega.sort_unstable();
    if a_beta != b_beta || a_omega != b_omega {
        return None;
    }

    // Row invariant: the multiset of (ω_j, c_ij) pairs is preserved by any
    // length-respecting column permutation.
    let signature = |om: &OrbitMatrix, i: usize| -> Vec<(usize, usize)> {
        let mut sig: Vec<(usize, usize)> = om
            .row(i)
            .iter()
            .enumerate()
            .map(|(j, &c)| (om.point_orbit_lengths()[j], c))
            .collect();
        sig.sort_unstable();
        sig
    };
    let a_sigs: Vec<_> = (0..a.block_orbits()).map(|i| signature(a, i)).collect();
    let b_sigs: Vec<_> = (0..b.block_orbits()).map(|i| signature(b, i)).collect();

    fn assign_rows(
        a: &OrbitMatrix,
        b: &OrbitMatrix,
        a_sigs: &[Vec<(usize, usize)>],
        b_sigs: &[Vec<(usize, usize)>],
        rho: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        let i = rho.len();
        if i == b.block_orbits() {
            return match_columns(a, b, rho);
        }
        for cand in 0..a.block_orbits() {
            if used[cand]
                || a.block_orbit_lengths()[cand] != b.block_orbit_lengths()[i]
                || a_sigs[cand] != b_sigs[i]
            {
                continue;
            }
            used[cand] = true;
            rho.push(cand);
            if let Some(sigma) = assign_rows(a, b, a_sigs, b_sigs, rho, used) {
                return Some(sigma);
            }
            rho.pop();
            used[cand] = false;
        }
        None
    }

    // Columns match exactly or not at all once ρ is fixed, so the greedy
    // smallest unused match is complete.
    fn match_columns(a: &OrbitMatrix, b: &OrbitMatrix, rho: &[usize]) -> Option<Vec<usize>> {
        let s = b.point_orbits();
        let mut sigma = Vec::with_capacity(s);
        let mut used = vec![false; s];
        for j in 0..s {
            let target = (0..s).find(|&c| {
                !used[c]
                    && a.point_orbit_lengths()[c] == b.point_orbit_lengths()[j]
                    && (0..b.block_orbits()).all(|i| a.entry(rho[i], c) == b.entry(i, j))
            })?;
            used[target] = true;
            sigma.push(target);
        }
        Some(sigma)
    }

    let mut rho = Vec::new();
    let mut used = vec![false; a.block_orbits()];
    let sigma = assign_rows(a, b, &a_sigs, &b_sigs, &mut rho, &mut used)?;
    debug_assert!((0..b.block_orbits())
        .all(|i| { (0..b.point_orbits()).all(|j| b.entry(i, j) == a.entry(rho[i], sigma[j])) }));
    Some((rho, sigma))
}

/// The four 2-(64, 28, 12) orbit matrices used across the test suite.
#[cfg(test)]
pub(crate) mod library {
    use super::*;

    fn params_64() -> DesignParams {
        DesignParams {
            v: 64,
            b: 64,
            r: 28,
            k: 28,
            lambda: 12,
        }
    }

    /// Symmetric 2-(64, 28, 12) orbit matrix with a fixed block and point;
    /// nine further orbits of length 7 on each side.
    pub(crate) fn m1() -> OrbitMatrix {
        OrbitMatrix::new(
            params_64(),
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![
                vec![0, 7, 7, 7, 7, 0, 0, 0, 0, 0],
                vec![1, 4, 4, 4, 0, 3, 3, 3, 3, 3],
                vec![1, 4, 4, 0, 4, 3, 3, 3, 3, 3],
                vec![1, 4, 0, 4, 4, 3, 3, 3, 3, 3],
                vec![1, 0, 4, 4, 4, 3, 3, 3, 3, 3],
                vec![0, 3, 3, 3, 3, 4, 4, 4, 4, 0],
                vec![0, 3, 3, 3, 3, 4, 4, 4, 0, 4],
                vec![0, 3, 3, 3, 3, 4, 4, 0, 4, 4],
                vec![0, 3, 3, 3, 3, 4, 0, 4, 4, 4],
                vec![0, 3, 3, 3, 3, 0, 4, 4, 4, 4],
            ],
        )
    }

    /// Same parameters and orbit lengths as [`m1`] but not reachable from it
    /// by row/column permutations.
    pub(crate) fn m2() -> OrbitMatrix {
        OrbitMatrix::new(
            params_64(),
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![
                vec![0, 7, 7, 7, 7, 0, 0, 0, 0, 0],
                vec![1, 3, 3, 3, 3, 4, 4, 4, 3, 0],
                vec![1, 3, 3, 3, 3, 4, 4, 0, 3, 4],
                vec![1, 3, 3, 3, 3, 4, 0, 4, 3, 4],
                vec![1, 3, 3, 3, 3, 0, 4, 4, 3, 4],
                vec![0, 4, 4, 4, 0, 3, 3, 3, 4, 3],
                vec![0, 4, 4, 0, 4, 3, 3, 3, 4, 3],
                vec![0, 4, 0, 4, 4, 3, 3, 3, 4, 3],
                vec![0, 0, 4, 4, 4, 3, 3, 3, 4, 3],
                vec![0, 3, 3, 3, 3, 4, 4, 4, 0, 4],
            ],
        )
    }

    /// Coarser orbit structure: one orbit of length 21 alongside the fixed
    /// one and six of length 7.
    pub(crate) fn m3() -> OrbitMatrix {
        OrbitMatrix::new(
            params_64(),
            vec![1, 7, 7, 7, 7, 7, 7, 21],
            vec![1, 7, 7, 7, 7, 7, 7, 21],
            vec![
                vec![0, 7, 7, 7, 7, 0, 0, 0],
                vec![1, 4, 4, 4, 0, 3, 3, 9],
                vec![1, 4, 4, 0, 4, 3, 3, 9],
                vec![1, 4, 0, 4, 4, 3, 3, 9],
                vec![1, 0, 4, 4, 4, 3, 3, 9],
                vec![0, 3, 3, 3, 3, 4, 0, 12],
                vec![0, 3, 3, 3, 3, 0, 4, 12],
                vec![0, 3, 3, 3, 3, 4, 4, 8],
            ],
        )
    }

    /// Refinement of [`m3`]: the length-21 orbit split into three of length 7.
    pub(crate) fn m3p() -> OrbitMatrix {
        OrbitMatrix::new(
            params_64(),
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![1, 7, 7, 7, 7, 7, 7, 7, 7, 7],
            vec![
                vec![0, 7, 7, 7, 7, 0, 0, 0, 0, 0],
                vec![1, 4, 4, 4, 0, 3, 3, 3, 3, 3],
                vec![1, 4, 4, 0, 4, 3, 3, 3, 3, 3],
                vec![1, 4, 0, 4, 4, 3, 3, 3, 3, 3],
                vec![1, 0, 4, 4, 4, 3, 3, 3, 3, 3],
                vec![0, 3, 3, 3, 3, 4, 0, 4, 4, 4],
                vec![0, 3, 3, 3, 3, 0, 4, 4, 4, 4],
                vec![0, 3, 3, 3, 3, 4, 4, 4, 4, 0],
                vec![0, 3, 3, 3, 3, 4, 4, 0, 4, 4],
                vec![0, 3, 3, 3, 3, 4, 4, 4, 0, 4],
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::library::{m1, m2, m3, m3p};
    use super::*;

    #[test]
    fn library_matrices_validate() {
        for om in [m1(), m2(), m3(), m3p()] {
            let report = validate_orbit_matrix(&om);
            assert!(report.is_valid(), "failures: {:?}", report.failures);
        }
    }

    #[test]
    fn validation_reports_every_broken_identity() {
        // A single entry changed from 4 to 3 breaks the row sum, the column
        // sum, and orthogonality, all of which must be reported together.
        let mut om = m1();
        om.entries[1][1] = 3;
        let report = validate_orbit_matrix(&om);
        assert!(report.failures.iter().any(|f| matches!(
            f,
            OrbitFailure::RowSum {
                row: 1,
                sum: 27,
                ..
            }
        )));
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, OrbitFailure::ColumnSum { col: 1, .. })));
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, OrbitFailure::Orthogonality { .. })));

        let mut om = m1();
        om.entries[1][0] = 2;
        let report = validate_orbit_matrix(&om);
        assert!(report.failures.iter().any(|f| matches!(
            f,
            OrbitFailure::EntryRange {
                row: 1,
                col: 0,
                entry: 2,
                limit: 1
            }
        )));

        let mut om = m1();
        om.point_orbit_lengths[0] = 2;
        let report = validate_orbit_matrix(&om);
        assert!(report.failures.iter().any(|f| matches!(
            f,
            OrbitFailure::PointTotal {
                total: 65,
                expected: 64
            }
        )));

        let mut om = m1();
        om.block_orbit_lengths[9] = 6;
        let report = validate_orbit_matrix(&om);
        assert!(report.failures.iter().any(|f| matches!(
            f,
            OrbitFailure::BlockTotal {
                total: 63,
                expected: 64
            }
        )));

        let mut om = m1();
        om.params.lambda = 11;
        let report = validate_orbit_matrix(&om);
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, OrbitFailure::ParamIdentity { .. })));
    }

    #[test]
    fn orthogonality_is_skipped_for_non_symmetric_parameters() {
        // 2-(6,10,5,3,2): single orbits, entries equal to block size.
        let om = OrbitMatrix::new(
            DesignParams {
                v: 6,
                b: 10,
                r: 5,
                k: 3,
                lambda: 2,
            },
            vec![6],
            vec![10],
            vec![vec![3]],
        );
        assert!(validate_orbit_matrix(&om).is_valid());
    }

    #[test]
    fn switching_rows_0_9_matches_hand_computation() {
        let switched = orbit_switching(&m1(), &[0, 9]).unwrap();
        assert_eq!(
            switched.row(0),
            &[0, 0, 0, 0, 0, 0, 7, 7, 7, 7],
            "fixed-block row flips on the eight balanced columns"
        );
        assert_eq!(switched.row(9), &[0, 4, 4, 4, 4, 0, 3, 3, 3, 3]);
        for i in 1..9 {
            assert_eq!(switched.row(i), m1().row(i), "row {i} untouched");
        }
        assert!(validate_orbit_matrix(&switched).is_valid());

        // Switching is an involution on the same rows.
        let back = orbit_switching(&switched, &[0, 9]).unwrap();
        assert_eq!(back, m1());
    }

    #[test]
    fn switching_rejects_unclassifiable_columns() {
        assert_eq!(
            orbit_switching(&m1(), &[0, 1]),
            Err(Error::OrbitSplitsClasses { orbit: 0 })
        );
        assert_eq!(
            orbit_switching(&m1(), &[10]),
            Err(Error::IndexOutOfRange {
                index: 10,
                limit: 10
            })
        );
    }

    #[test]
    fn empty_and_untouched_switches_are_identities() {
        assert_eq!(orbit_switching(&m1(), &[]).unwrap(), m1());
        // The fixed row alone touches no balanced column: every column is
        // untouched or full.
        assert_eq!(orbit_switching(&m1(), &[0]).unwrap(), m1());
        // Duplicates collapse.
        assert_eq!(
            orbit_switching(&m1(), &[0, 9, 9, 0]).unwrap(),
            orbit_switching(&m1(), &[0, 9]).unwrap()
        );
    }

    #[test]
    fn candidate_enumeration_matches_hand_lists() {
        let pairs = |tail: &[usize]| -> Vec<Vec<usize>> {
            let mut out = vec![vec![0]];
            out.extend(tail.iter().map(|&i| vec![0, i]));
            out
        };
        assert_eq!(
            orbit_switching_candidates(&m1(), 8),
            pairs(&[5, 6, 7, 8, 9])
        );
        assert_eq!(orbit_switching_candidates(&m3(), 8), pairs(&[5, 6]));
        assert_eq!(
            orbit_switching_candidates(&m3p(), 8),
            pairs(&[5, 6, 7, 8, 9])
        );
        // Only the trivial fixed-row subset fits under a budget of 2 blocks.
        assert_eq!(orbit_switching_candidates(&m1(), 2), vec![vec![0]]);
        assert!(orbit_switching_candidates(&m1(), 0).is_empty());
    }

    #[test]
    fn candidate_switches_all_produce_valid_matrices() {
        for om in [m1(), m2(), m3(), m3p()] {
            for rows in orbit_switching_candidates(&om, 64) {
                let switched = orbit_switching(&om, &rows).unwrap();
                let report = validate_orbit_matrix(&switched);
                assert!(
                    report.is_valid(),
                    "switch on {rows:?} broke: {:?}",
                    report.failures
                );
            }
        }
    }

    #[test]
    fn switched_m1_is_equivalent_to_m2() {
        let switched = orbit_switching(&m1(), &[0, 9]).unwrap();
        let (rho, sigma) = orbit_matrices_equivalent(&switched, &m2()).unwrap();
        assert_eq!(rho, (0..10).collect::<Vec<_>>());
        assert_eq!(sigma, vec![0, 6, 7, 8, 9, 1, 2, 3, 5, 4]);
        let b = m2();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(b.entry(i, j), switched.entry(rho[i], sigma[j]));
            }
        }
    }

    #[test]
    fn m1_and_m2_are_not_equivalent_directly() {
        assert!(orbit_matrices_equivalent(&m1(), &m2()).is_none());
        assert!(orbit_matrices_equivalent(&m1(), &m3()).is_none());
    }

    #[test]
    fn equivalence_recovers_applied_permutations() {
        let a = m1();
        // σ, ρ chosen to respect orbit lengths: fixed row/column stay at 0.
        let rho = [0, 3, 1, 4, 2, 7, 9, 5, 8, 6];
        let sigma = [0, 2, 4, 1, 3, 9, 6, 8, 7, 5];
        let permuted = OrbitMatrix::new(
            a.params(),
            sigma.iter().map(|&j| a.point_orbit_lengths()[j]).collect(),
            rho.iter().map(|&i| a.block_orbit_lengths()[i]).collect(),
            (0..10)
                .map(|i| (0..10).map(|j| a.entry(rho[i], sigma[j])).collect())
                .collect(),
        );
        let witness = orbit_matrices_equivalent(&a, &permuted);
        assert!(witness.is_some());
        let (wr, wc) = witness.unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(permuted.entry(i, j), a.entry(wr[i], wc[j]));
            }
        }
        let (ir, ic) = orbit_matrices_equivalent(&a, &a).unwrap();
        assert_eq!(ir, (0..10).collect::<Vec<_>>());
        assert_eq!(ic, (0..10).collect::<Vec<_>>());
    }
}
