use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Smallest precision accepted by constructors.
pub const MIN_PREC: u32 = 8;

/// A binary floating-point number `(-1)^neg * mag * 2^exp` carrying its own
/// precision in bits.
///
/// Non-zero values keep `mag` at exactly `prec` significant bits; zero is
/// stored with `mag == 0` and `exp == 0`. Results of binary operations use the
/// larger of the two operand precisions and are rounded to nearest.
#[derive(Clone, Debug)]
pub struct BigFloat {
    neg: bool,
    mag: BigUint,
    exp: i64,
    prec: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseBigFloatError(pub String);

impl fmt::Display for ParseBigFloatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal: {}", self.0)
    }
}

impl std::error::Error for ParseBigFloatError {}

fn check_prec(prec: u32) -> u32 {
    assert!(prec >= MIN_PREC, "precision {prec} below minimum {MIN_PREC}");
    prec
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            neg: false,
            mag: BigUint::zero(),
            exp: 0,
            prec: check_prec(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    /// Builds `(-1)^neg * mag * 2^exp` rounded to `prec` bits.
    pub fn from_parts(neg: bool, mag: BigUint, exp: i64, prec: u32) -> Self {
        let prec = check_prec(prec);
        if mag.is_zero() {
            return Self::zero(prec);
        }
        let (mag, exp) = round_mag(mag, exp, prec);
        BigFloat { neg, mag, exp, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Self::from_parts(v.is_negative(), v.magnitude().clone(), 0, prec)
    }

    /// `num / den` rounded to `prec` bits. Panics if `den` is zero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "division by zero in from_ratio");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let neg = num.is_negative() != den.is_negative();
        let (n, d) = (num.magnitude(), den.magnitude());
        let shift = (prec as i64 + 2 + d.bits() as i64 - n.bits() as i64).max(0) as u64;
        let q = (n << shift) / d;
        Self::from_parts(neg, q, -(shift as i64), prec)
    }

    /// Exact conversion of a finite `f64`, then rounded to `prec` bits.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64 {v}");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::from_parts(neg, BigUint::from(mant), exp, prec)
    }

    /// Fixed-point import: `v * 2^-frac_bits`.
    pub fn from_fixed(v: BigInt, frac_bits: u64, prec: u32) -> Self {
        let neg = v.is_negative();
        Self::from_parts(neg, v.into_parts().1, -(frac_bits as i64), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(self.neg, self.mag.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut r = self.clone();
        if !r.is_zero() {
            r.exp += k;
        }
        r
    }

    /// Position of the bit just above the leading one: `2^(top-1) <= |x| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.mag.bits() as i64
    }

    /// Approximate `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mag.bits();
        let keep = bits.min(60);
        let lead = (&self.mag >> (bits - keep)).to_u64().unwrap_or(u64::MAX) as f64;
        lead.log2() + (self.exp + (bits - keep) as i64) as f64
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mag.bits();
        let keep = bits.min(64);
        let lead = (&self.mag >> (bits - keep)).to_u64().unwrap_or(u64::MAX) as f64;
        let e = self.exp + (bits - keep) as i64;
        let v = if e > 2000 {
            f64::INFINITY
        } else if e < -2200 {
            0.0
        } else {
            // split to avoid intermediate overflow of 2^e
            let h = e / 2;
            lead * 2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
        };
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// `round(x * 2^frac_bits)` as an integer (ties away from zero).
    pub fn to_fixed(&self, frac_bits: u64) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let e = self.exp + frac_bits as i64;
        let mag = if e >= 0 {
            &self.mag << e as u64
        } else {
            let s = (-e) as u64;
            (&self.mag + (BigUint::one() << (s - 1))) >> s
        };
        BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, mag)
    }

    /// Largest integer not exceeding `x`.
    pub fn floor(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        if self.exp >= 0 {
            let m = BigInt::from(&self.mag << self.exp as u64);
            return if self.neg { -m } else { m };
        }
        let s = (-self.exp) as u64;
        let q = &self.mag >> s;
        let exact = (&q << s) == self.mag;
        let q = BigInt::from(q);
        if self.neg {
            if exact {
                -q
            } else {
                -q - 1
            }
        } else {
            q
        }
    }

    /// Nearest integer, halves rounded up.
    pub fn round(&self) -> BigInt {
        (self + &BigFloat::from_ratio(&BigInt::one(), &BigInt::from(2), self.prec.max(64))).floor()
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        &BigFloat::one(self.prec) / self
    }

    /// Square root; panics on negative input.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative number");
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec as i64;
        let bits = self.mag.bits() as i64;
        let mut shift = (2 * p + 4 - bits).max(0);
        if (self.exp - shift).is_odd() {
            shift += 1;
        }
        let m = &self.mag << shift as u64;
        let r = m.sqrt();
        Self::from_parts(false, r, (self.exp - shift) / 2, self.prec)
    }

    /// Integer power by repeated squaring; negative exponents go through a
    /// single reciprocal at the end. Computed with guard bits.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec;
        if n == 0 {
            return BigFloat::one(p);
        }
        let guard = 2 * (64 - n.unsigned_abs().leading_zeros()) + 8;
        let w = p + guard;
        let mut base = self.with_prec(w);
        let mut acc = BigFloat::one(w);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n < 0 {
            acc = acc.recip();
        }
        acc.with_prec(p)
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            return ta.cmp(&tb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mag << (self.exp - e) as u64;
        let b = &other.mag << (other.exp - e) as u64;
        a.cmp(&b)
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let p = self.prec.max(other.prec);
        let oneg = other.neg != negate_other;
        if other.is_zero() {
            return self.with_prec(p);
        }
        if self.is_zero() {
            let mut r = other.with_prec(p);
            r.neg = oneg;
            return r;
        }
        // operand far below the other's last bit only matters for ties
        let gap = p as i64 + 8;
        if self.top() - other.top() > gap {
            return self.with_prec(p);
        }
        if other.top() - self.top() > gap {
            let mut r = other.with_prec(p);
            r.neg = oneg;
            return r;
        }
        let e = self.exp.min(other.exp);
        let a = &self.mag << (self.exp - e) as u64;
        let b = &other.mag << (other.exp - e) as u64;
        if self.neg == oneg {
            Self::from_parts(self.neg, a + b, e, p)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => Self::zero(p),
                Ordering::Greater => Self::from_parts(self.neg, a - b, e, p),
                Ordering::Less => Self::from_parts(oneg, b - a, e, p),
            }
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let p = self.prec.max(other.prec);
        if self.is_zero() || other.is_zero() {
            return Self::zero(p);
        }
        Self::from_parts(
            self.neg != other.neg,
            &self.mag * &other.mag,
            self.exp + other.exp,
            p,
        )
    }

    fn div_impl(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        let p = self.prec.max(other.prec);
        if self.is_zero() {
            return Self::zero(p);
        }
        let shift =
            (p as i64 + 2 + other.mag.bits() as i64 - self.mag.bits() as i64).max(0) as u64;
        let q = (&self.mag << shift) / &other.mag;
        Self::from_parts(
            self.neg != other.neg,
            q,
            self.exp - shift as i64 - other.exp,
            p,
        )
    }

    /// Scientific notation with `digits` significant decimal digits, e.g.
    /// `-1.2345e-3`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1)).replace(".e", "e");
        }
        let mut t = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        let lo = BigUint::from(10u32).pow(digits as u32 - 1);
        let hi = &lo * 10u32;
        let mut n = self.scaled_decimal(digits as i64 - 1 - t);
        for _ in 0..4 {
            if n >= hi {
                t += 1;
            } else if n < lo {
                t -= 1;
            } else {
                break;
            }
            n = self.scaled_decimal(digits as i64 - 1 - t);
        }
        if n >= hi {
            // rounding carried into a new digit, e.g. 9.99..→10.0
            n /= 10u32;
            t += 1;
        }
        let s = n.to_string();
        let sign = if self.neg { "-" } else { "" };
        if s.len() == 1 {
            format!("{sign}{s}e{t}")
        } else {
            format!("{sign}{}.{}e{t}", &s[..1], &s[1..])
        }
    }

    /// `round(|x| * 10^j)`.
    fn scaled_decimal(&self, j: i64) -> BigUint {
        let ten = BigUint::from(10u32);
        let mut num = self.mag.clone();
        let mut den = BigUint::one();
        if j >= 0 {
            num *= ten.pow(j as u32);
        } else {
            den *= ten.pow((-j) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        (num * 2u32 + &den) / (den * 2u32)
    }

    /// Parses a decimal literal (`-12.5e-3`, `3`, `.25`) at `prec` bits.
    pub fn parse_decimal(s: &str, prec: u32) -> Result<Self, ParseBigFloatError> {
        let (num, den) = parse_decimal_ratio(s)?;
        Ok(Self::from_ratio(&num, &den, prec))
    }
}

/// Splits a decimal literal into an exact `num / den` pair.
pub fn parse_decimal_ratio(s: &str) -> Result<(BigInt, BigInt), ParseBigFloatError> {
    let err = || ParseBigFloatError(s.to_string());
    let t = s.trim();
    let (mantissa, exp10) = match t.find(['e', 'E']) {
        Some(i) => (
            &t[..i],
            t[i + 1..].parse::<i64>().map_err(|_| err())?,
        ),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| err())?;
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut den = BigInt::one();
    if scale >= 0 {
        num *= ten.pow(scale as u32);
    } else {
        den = ten.pow((-scale) as u32);
    }
    if neg {
        num = -num;
    }
    Ok((num, den))
}

fn round_mag(mag: BigUint, exp: i64, prec: u32) -> (BigUint, i64) {
    let bits = mag.bits();
    let prec = prec as u64;
    if bits > prec {
        let shift = bits - prec;
        let mut m = (mag + (BigUint::one() << (shift - 1))) >> shift;
        let mut e = exp + shift as i64;
        if m.bits() > prec {
            m >>= 1;
            e += 1;
        }
        (m, e)
    } else {
        let shift = prec - bits;
        (mag << shift, exp - shift as i64)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl BigFloat {
    /// Exact comparison of the represented values (precision ignored).
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (0, _) => Ordering::Equal,
            (1, _) => self.cmp_abs(other),
            _ => other.cmp_abs(self),
        }
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(mut self) -> BigFloat {
        if !self.is_zero() {
            self.neg = !self.neg;
        }
        self
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -self.clone()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, $b: &BigFloat) -> BigFloat {
                let $a = self;
                $body
            }
        }
        impl $trait<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                self.$method(&rhs)
            }
        }
        impl $assign_trait<&BigFloat> for BigFloat {
            fn $assign(&mut self, rhs: &BigFloat) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $assign_trait<BigFloat> for BigFloat {
            fn $assign(&mut self, rhs: BigFloat) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, |a, b| a.add_impl(b, false));
binop!(Sub, sub, SubAssign, sub_assign, |a, b| a.add_impl(b, true));
binop!(Mul, mul, MulAssign, mul_assign, |a, b| a.mul_impl(b));
binop!(Div, div, DivAssign, div_assign, |a, b| a.div_impl(b));

macro_rules! int_op {
    ($trait:ident, $method:ident) => {
        impl $trait<i64> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: i64) -> BigFloat {
                self.$method(&BigFloat::from_i64(rhs, self.prec.max(64)))
                    .with_prec(self.prec)
            }
        }
        impl $trait<i64> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: i64) -> BigFloat {
                (&self).$method(rhs)
            }
        }
    };
}

int_op!(Add, add);
int_op!(Sub, sub);
int_op!(Mul, mul);
int_op!(Div, div);

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2).floor() as usize);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl FromStr for BigFloat {
    type Err = ParseBigFloatError;

    /// Parses at 256 bits; use [`BigFloat::parse_decimal`] to pick a precision.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_decimal(s, 256)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_canonical() {
        let z = BigFloat::from_i64(5, 64) - BigFloat::from_i64(5, 64);
        assert!(z.is_zero());
        assert_eq!(z.signum(), 0);
        assert_eq!(z, BigFloat::zero(64));
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for v in [1.0, -0.1, 3.5e-300, 1e300, 123456.789, f64::MIN_POSITIVE / 8.0] {
            assert_eq!(BigFloat::from_f64(v, 64).to_f64(), v);
        }
    }

    #[test]
    fn floor_and_round() {
        let x = BigFloat::parse_decimal("-2.5", 64).unwrap();
        assert_eq!(x.floor(), BigInt::from(-3));
        assert_eq!(x.round(), BigInt::from(-2));
        let y = BigFloat::parse_decimal("7.49", 64).unwrap();
        assert_eq!(y.floor(), BigInt::from(7));
        assert_eq!(y.round(), BigInt::from(7));
        assert_eq!(BigFloat::from_i64(-4, 64).floor(), BigInt::from(-4));
    }

    #[test]
    fn sci_string_formats() {
        let x = BigFloat::parse_decimal("0.0075116", 64).unwrap();
        assert_eq!(x.to_sci_string(5), "7.5116e-3");
        assert_eq!(BigFloat::from_i64(-1000, 64).to_sci_string(3), "-1.00e3");
        assert_eq!(BigFloat::parse_decimal("9.9999", 64).unwrap().to_sci_string(2), "1.0e1");
        assert_eq!(BigFloat::zero(64).to_sci_string(1), "0e0");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(BigFloat::parse_decimal("1.2.3", 64).is_err());
        assert!(BigFloat::parse_decimal("abc", 64).is_err());
        assert!(BigFloat::parse_decimal("", 64).is_err());
        assert!(BigFloat::parse_decimal(".5", 64).is_ok());
    }

    #[test]
    fn division_rounds_to_precision() {
        let third = BigFloat::from_i64(1, 128) / BigFloat::from_i64(3, 128);
        let back = &third * 3;
        let err = (back - BigFloat::one(128)).abs();
        assert!(err.log2_abs() <= -127.0);
    }

    #[test]
    fn powi_negative() {
        let two = BigFloat::from_i64(2, 64);
        assert_eq!(two.powi(-3).to_f64(), 0.125);
        assert_eq!(two.powi(10).to_f64(), 1024.0);
    }
}
