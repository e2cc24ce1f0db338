//! One error type for the whole crate; variants carry enough context to point
//! at the offending block, point, orbit or matrix row.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Block sizes are not uniform.
    #[error("block {block} has {got} points, expected k = {expected}")]
    NotUniform {
        block: usize,
        got: usize,
        expected: usize,
    },

    /// Some point pair is not covered exactly λ times.
    #[error("points {{{p}, {q}}} lie on {got} common blocks, expected lambda = {expected}")]
    NotBalanced {
        p: usize,
        q: usize,
        got: usize,
        expected: usize,
    },

    /// Block size outside 1 < k < v − 1, so the structure is a trivial or
    /// complete design.
    #[error("degenerate block size k = {k} for v = {v}")]
    DegenerateK { k: usize, v: usize },

    #[error("index {index} out of range, limit {limit}")]
    IndexOutOfRange { index: usize, limit: usize },

    /// The block set admits no P1/P2/balanced partition of the points.
    #[error(
        "not a switching set: point {point} lies on {degree} of {set_size} blocks \
         (expected 0, {set_size}/2, or {set_size})"
    )]
    NotSwitchingSet {
        point: usize,
        degree: usize,
        set_size: usize,
    },

    /// Switching sets always have an even number of blocks.
    #[error("switching sets have even size, got {size} blocks")]
    OddSize { size: usize },

    /// The design changed on the switching set's rows since it was analyzed.
    #[error("stale switching set: the design's rows changed since analysis")]
    StaleSwitchingSet,

    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    /// Closure input sets must be pairwise block-disjoint.
    #[error("switching sets {first} and {second} share block {block}")]
    OverlappingSets {
        first: usize,
        second: usize,
        block: usize,
    },

    #[error("operation requires a symmetric design, got v = {v}, b = {b}")]
    NotSymmetric { v: usize, b: usize },

    #[error("{n} is not prime")]
    NotPrime { n: u64 },

    #[error("not a Hadamard matrix: rows {row_a} and {row_b} are not orthogonal")]
    NotHadamard { row_a: usize, row_b: usize },

    #[error("order {m} is not 4n^2 for n = {n}")]
    OrderMismatch { m: usize, n: usize },

    #[error("matrix is not regular: {line} {index} sums to {sum}")]
    NotRegular {
        /// `"row"` or `"column"`.
        line: &'static str,
        index: usize,
        sum: i64,
    },

    /// Regular with row sum −2n; the caller should negate the matrix first.
    #[error("row sum is {sum}, expected +{expected}; negate the matrix first")]
    WrongRowSum { sum: i64, expected: i64 },

    /// The design's blocks/points do not decompose into the 2n × 2n block
    /// structure of a converted Bush-type matrix.
    #[error("no Bush-type block structure: {reason}")]
    NotBushStructured { reason: String },

    /// A point orbit is neither disjoint from, contained in, nor balanced on
    /// the chosen block orbits, so orbit-level switching is undefined.
    #[error("point orbit {orbit} splits the P1/P2/balanced classes for the chosen rows")]
    OrbitSplitsClasses { orbit: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
