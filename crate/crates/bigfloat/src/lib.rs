//! Arbitrary-precision binary floating point.
//!
//! [`BigFloat`] stores a sign, an integer mantissa of exactly `prec` bits and a
//! binary exponent. Every value carries the precision it was computed at;
//! binary operations take the larger of the operand precisions. Elementary
//! functions work internally with guard bits and return a faithfully rounded
//! result (relative error below `2^-prec` up to a couple of ulps).
//!
//! The constant set is the one needed for lattice sums at `τ = i`: π, ln 2,
//! √2 and Γ(1/4), the latter through the lemniscate AGM.

mod complex;
mod float;
mod funcs;

pub use complex::ComplexBF;
pub use float::{parse_decimal_ratio, BigFloat, ParseBigFloatError, MIN_PREC};
pub use funcs::{agm, gamma_quarter, ln2, pi, sqrt2};
