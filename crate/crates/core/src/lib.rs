//! Exact-arithmetic laboratory for Schmidt games on badly approximable pairs.
//!
//! Everything that feeds a predicate is computed in exact arithmetic: rationals
//! are arbitrary precision, irrational quantities live in a fixed real quadratic
//! field, and comparisons against rational powers are decided by clearing
//! exponents to integers. Floating point appears nowhere in a decision path;
//! decimal output is advisory only.
//!
//! The crate is organized around the pipeline
//! config -> constants -> danger set -> safe subtree -> selector -> game -> certificate:
//!
//! - [`exactnum`]: rationals, quadratic field elements, decidable sign and
//!   rational-power comparisons.
//! - [`diophantine`]: continued fractions, certified badness floors, and
//!   enumeration of denominators with small fractional parts.
//! - [`pointset`]: game constants, dangerous rational points, their lines,
//!   levels and classes.
//! - [`treeplan`]: the regular rooted tree, its interval map, safe-subtree
//!   predicates, selector extraction, and the growth audit.
//! - [`game`]: the alternating interval game, the halving strategy, and
//!   programmable opponents.
//! - [`verify`]: structural audits and end-to-end avoidance certificates.
//! - [`config`]: the flat key = value run configuration.

pub mod config;
pub mod diophantine;
pub mod game;
pub mod exactnum;
pub mod interval;
pub mod pointset;
pub mod treeplan;
pub mod verify;

pub use exactnum::{FieldReal, Rational};
pub use interval::IntervalQ;
