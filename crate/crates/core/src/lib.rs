//! Level 2 Eisenstein double series over `m + a n i` and `m + a(2n+1) i`:
//! exact coefficient calculus, closed derivative formulas for `csc`, `cot`,
//! `sec`, `tan`, evaluation of the equivalent hyperbolic single sums, a
//! brute-force lattice oracle and a catalog-driven identity verifier.

pub mod catalog;
pub mod coeff;
pub mod constexpr;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod series;
pub mod table1;
pub mod trig;
pub mod weight;

pub use l2eis_bigfloat::{BigFloat, ComplexBF};

pub use coeff::{
    a_coeff_norm, b_coeff_norm, binomial, coefficient_A, coefficient_A_recurrence,
    composition_power_sum, factorial, CoeffIndex,
};
pub use constexpr::{ConstExpr, ConstMonomial};
pub use error::{Error, Result};
pub use matrix::{
    build_matrix_A, build_matrix_B, invert_lower_triangular, relation_row, RationalMatrix,
    RelationRow,
};
pub use rational::ExactRational;
pub use trig::{deriv_formula, deriv_oracle, TrigKind};
pub use weight::{Decay, Hyp, HypFactor, Parity, WeightFn, WeightTerm};
pub use catalog::{
    default_catalog, load_catalog, parse_catalog, verify_catalog, verify_entry, verify_matrix_relations,
    IdentityEntry, Mode, VerificationReport, VerifyConfig,
};
pub use lattice::{eval_double_sum, eval_double_sum_auto, LatticeTruncation, OracleResult};
pub use series::{eval_rhs, eval_rhs_shifted, eval_rhs_with_reading, Family, FamilySpec, Reading};
