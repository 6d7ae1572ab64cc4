//! Continued-fraction analysis and certified Diophantine bounds.

mod badness;
mod cf;
mod ostrowski;

pub use badness::{
    badness_floor, brute_force_badness, brute_force_badness_seq, q_fractional_value, BadnessBound,
    BadnessScan,
};
#[cfg(feature = "parallel")]
pub use badness::brute_force_badness_par;
pub use cf::{cf_expand, CfError, CFExpansion};
pub use ostrowski::{small_fractional_parts, small_fractional_parts_scan, WalkError};
