//! Switching sets for 2-designs.
//!
//! A *switching set* of a 2-(v, k, λ) design is a set B₁ of blocks together
//! with a partition of the points into a class P₁ meeting no block of B₁, a
//! class P₂ on every block of B₁, and a remainder in which every point lies on
//! exactly half the blocks of B₁. Complementing the incidence between B₁ and
//! the balanced points yields another 2-design with the same parameters.
//!
//! The crate covers the full workflow around that operation:
//!
//! * [`design`] — incidence structures, parameter validation, duals, derived
//!   designs and intersection profiles;
//! * [`switching`] — switching-set discovery, application, closures and trade
//!   subdesigns;
//! * [`orbit`] — the same switching step at orbit-matrix (tactical
//!   decomposition) level;
//! * [`hadamard`] — Bush-type Hadamard matrices, the ±1 ↔ 0/1 correspondence
//!   with Menon designs, and a backtracking search for new matrices;
//! * [`gf`] — p-ranks of incidence matrices over GF(p);
//! * [`canon`] — canonical forms, isomorphism testing, automorphism group
//!   orders and Hadamard equivalence, all through one colored-graph engine;
//! * [`classify`] — batch classification reports combining the above;
//! * [`io`] — the plain-text fixture formats used by the CLI and tests.

pub mod bitset;
pub mod canon;
pub mod classify;
pub mod design;
pub mod error;
pub mod gf;
pub mod group;
pub mod hadamard;
pub mod io;
pub mod orbit;
pub mod switching;

pub use error::{Error, Result};
