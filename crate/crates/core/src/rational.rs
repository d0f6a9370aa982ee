//! Exact rationals. `num-rational` keeps `Ratio` reduced with a positive
//! denominator, which is exactly the canonical form we want.

use l2eis_bigfloat::{parse_decimal_ratio, BigFloat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};

pub type ExactRational = BigRational;

pub fn rat(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(n.into())
}

/// Accepts `p`, `p/q` and plain decimals such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| domain(format!("bad numerator in `{s}`")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| domain(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(domain(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (p, q) = parse_decimal_ratio(s).map_err(|e| domain(e.to_string()))?;
    Ok(BigRational::new(p, q))
}

pub fn to_bigfloat(r: &ExactRational, prec: u32) -> BigFloat {
    BigFloat::from_ratio(r.numer(), r.denom(), prec)
}

/// Nearest f64; adequate for decay estimates and the lattice oracle.
pub fn to_f64(r: &ExactRational) -> f64 {
    to_bigfloat(r, 64).to_f64()
}

pub fn is_integer(r: &ExactRational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &ExactRational) -> ExactRational {
    r.abs()
}
