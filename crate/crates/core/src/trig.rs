//! Higher derivatives of `1/sin^{2m-1}(πs)`, `cot(πs)`, `1/cos(πs)` and
//! `tan(πs)` from closed formulas, plus an independent Taylor-series oracle.

use std::fmt;
use std::str::FromStr;

use l2eis_bigfloat::{pi, BigFloat, ComplexBF};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeff::{binomial, coefficient_a_int, composition_power_sum_int, factorial, falling_factorial_ratio, CoeffIndex};
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrigKind {
    /// `1/sin^{2m-1}(πs)`
    CscOddPower(u32),
    Cot,
    Sec,
    Tan,
}

impl TrigKind {
    /// Singular set: integers for the sine family, half-integers otherwise.
    fn pole_offset(self) -> f64 {
        match self {
            TrigKind::CscOddPower(_) | TrigKind::Cot => 0.0,
            TrigKind::Sec | TrigKind::Tan => 0.5,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            TrigKind::CscOddPower(0) => Err(domain("csc power index m must be >= 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TrigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrigKind::CscOddPower(1) => write!(f, "csc"),
            TrigKind::CscOddPower(m) => write!(f, "csc{}", 2 * m - 1),
            TrigKind::Cot => write!(f, "cot"),
            TrigKind::Sec => write!(f, "sec"),
            TrigKind::Tan => write!(f, "tan"),
        }
    }
}

/// `csc`, `csc3`, `csc5`, ... (odd powers only), `cot`, `sec`, `tan`.
impl FromStr for TrigKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csc" => Ok(TrigKind::CscOddPower(1)),
            "cot" => Ok(TrigKind::Cot),
            "sec" => Ok(TrigKind::Sec),
            "tan" => Ok(TrigKind::Tan),
            _ => {
                let p: u32 = s
                    .strip_prefix("csc")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| domain(format!("unknown function `{s}`")))?;
                if p.is_multiple_of(2) {
                    return Err(domain(format!("only odd powers of csc are supported, got {p}")));
                }
                Ok(TrigKind::CscOddPower(p.div_ceil(2)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigFactor {
    One,
    Sin,
    Cos,
}

/// `coeff · num(πs) / base(πs)^power`, `base` being sin or cos.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigTerm {
    pub coeff: BigInt,
    pub numerator: TrigFactor,
    pub base: TrigFactor,
    pub power: u32,
}

/// The closed form `π^order · Σ terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigFormula {
    pub pi_power: u32,
    pub terms: Vec<TrigTerm>,
}

fn sgn(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn s1(j: u32, l: u32) -> BigInt {
    composition_power_sum_int(j, l, 1).expect("l <= j")
}

/// Coefficients of the sine/cosine rational forms of the cot/tan derivatives.
/// Even order `2k` gives powers `2l+1`, `l = 0..=k`; odd order `2k+1` gives
/// powers `2l`, `l = 1..=k+1`.
fn cot_like(order: u32) -> Vec<(u32, BigInt)> {
    let k = order / 2;
    if order.is_multiple_of(2) {
        (0..=k)
            .map(|l| {
                let mut c = BigInt::zero();
                for j in l..=k {
                    let br = binomial(2 * k, 2 * j) * factorial(2 * l)
                        - binomial(2 * k, 2 * j + 1) * factorial(2 * l + 1);
                    c += br * s1(j, l);
                }
                (2 * l + 1, c * sgn(k as i64 - l as i64))
            })
            .collect()
    } else {
        (1..=k + 1)
            .map(|l| {
                let mut c = BigInt::zero();
                for j in l..=k + 1 {
                    let br = (binomial(2 * k + 2, 2 * j)
                        - binomial(2 * k + 2, 2 * j + 1) * (2 * l + 1))
                        * factorial(2 * l - 1);
                    c += br * s1(j, l);
                }
                (2 * l, c * sgn(k as i64 - l as i64))
            })
            .collect()
    }
}

pub fn formula_terms(kind: TrigKind, order: u32) -> Result<TrigFormula> {
    kind.validate()?;
    let k = order / 2;
    let even = order.is_multiple_of(2);
    let term = |coeff: BigInt, numerator, base, power| TrigTerm {
        coeff,
        numerator,
        base,
        power,
    };
    let terms: Vec<TrigTerm> = match kind {
        TrigKind::CscOddPower(m) => (0..=k)
            .map(|l| {
                if even {
                    let c = coefficient_a_int(CoeffIndex { k, m, l }).expect("valid index");
                    term(c, TrigFactor::One, TrigFactor::Sin, 2 * m + 2 * l - 1)
                } else {
                    let c = falling_factorial_ratio(2 * m + 2 * l - 1, 2 * m - 2)
                        * composition_power_sum_int(k, l, m).expect("valid index")
                        * sgn(k as i64 + 1 - l as i64);
                    term(c, TrigFactor::Cos, TrigFactor::Sin, 2 * m + 2 * l)
                }
            })
            .collect(),
        TrigKind::Sec => (0..=k)
            .map(|l| {
                let s = s1(k, l) * sgn(k as i64 - l as i64);
                if even {
                    term(s * factorial(2 * l), TrigFactor::One, TrigFactor::Cos, 2 * l + 1)
                } else {
                    term(s * factorial(2 * l + 1), TrigFactor::Sin, TrigFactor::Cos, 2 * l + 2)
                }
            })
            .collect(),
        TrigKind::Cot => cot_like(order)
            .into_iter()
            .map(|(p, c)| {
                if even {
                    term(c, TrigFactor::Cos, TrigFactor::Sin, p)
                } else {
                    term(c, TrigFactor::One, TrigFactor::Sin, p)
                }
            })
            .collect(),
        TrigKind::Tan => cot_like(order)
            .into_iter()
            .map(|(p, c)| {
                if even {
                    term(c, TrigFactor::Sin, TrigFactor::Cos, p)
                } else {
                    // the odd-order tan formula carries one extra sign
                    term(-c, TrigFactor::One, TrigFactor::Cos, p)
                }
            })
            .collect(),
    };
    Ok(TrigFormula {
        pi_power: order,
        terms: terms.into_iter().filter(|t| !t.coeff.is_zero()).collect(),
    })
}

/// Distance from `s` to the nearest pole, in f64 (only compared against a
/// threshold).
fn pole_distance(kind: TrigKind, s: &ComplexBF) -> f64 {
    let off = kind.pole_offset();
    let re = s.re.to_f64();
    let n = (re - off).round() + off;
    let exact_re = &s.re - &BigFloat::from_f64(n, s.prec().max(64));
    let dr = exact_re.to_f64();
    let di = s.im.to_f64();
    dr.hypot(di)
}

fn check_singular(kind: TrigKind, s: &ComplexBF, threshold: f64) -> Result<()> {
    let d = pole_distance(kind, s);
    if d < threshold {
        return Err(Error::Singular(format!(
            "{kind} has a pole within {d:.3e} of s (threshold {threshold:.3e})"
        )));
    }
    Ok(())
}

/// Default refusal radius `2^{-P/4}`.
pub fn default_threshold(prec: u32) -> f64 {
    2f64.powf(-(prec as f64) / 4.0)
}

/// `(sin(πs), cos(πs))` at working precision `w`.
fn sin_cos_pi(s: &ComplexBF, w: u32) -> (ComplexBF, ComplexBF) {
    s.with_prec(w).scale(&pi(w)).sin_cos()
}

/// Order-th derivative in `s` of `kind(πs)` through the closed formulas.
pub fn deriv_formula(kind: TrigKind, order: u32, s: &ComplexBF) -> Result<ComplexBF> {
    deriv_formula_with_threshold(kind, order, s, default_threshold(s.prec()))
}

pub fn deriv_formula_with_threshold(
    kind: TrigKind,
    order: u32,
    s: &ComplexBF,
    threshold: f64,
) -> Result<ComplexBF> {
    let formula = formula_terms(kind, order)?;
    check_singular(kind, s, threshold)?;
    let p = s.prec();
    let w = p + 64 + 2 * order;
    let (sn, cs) = sin_cos_pi(s, w);
    Ok(eval_formula(&formula, &sn, &cs, w).with_prec(p))
}

fn eval_formula(formula: &TrigFormula, sn: &ComplexBF, cs: &ComplexBF, w: u32) -> ComplexBF {
    // only one of the two reciprocals is ever needed; the other may be zero
    let base = match formula.terms.first().map(|t| t.base) {
        Some(TrigFactor::Cos) => cs.recip(),
        Some(_) => sn.recip(),
        None => return ComplexBF::zero(w),
    };
    let mut acc = ComplexBF::zero(w);
    for t in &formula.terms {
        let mut v = base.powi(t.power as i64);
        match t.numerator {
            TrigFactor::Sin => v = &v * sn,
            TrigFactor::Cos => v = &v * cs,
            TrigFactor::One => {}
        }
        acc = acc + v.scale(&BigFloat::from_bigint(&t.coeff, w));
    }
    acc.scale(&pi(w).powi(formula.pi_power as i64))
}

/// Truncated power series in `t` with complex coefficients.
#[derive(Clone, Debug)]
struct Series(Vec<ComplexBF>);

impl Series {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn mul(&self, other: &Series) -> Series {
        let n = self.len();
        let w = self.0[0].prec();
        let mut out = vec![ComplexBF::zero(w); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().take(n - i).enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Series(out)
    }

    fn recip(&self) -> Series {
        let n = self.len();
        let inv0 = self.0[0].recip();
        let mut out: Vec<ComplexBF> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for i in 1..n {
            let mut acc = ComplexBF::zero(inv0.prec());
            for j in 1..=i {
                acc = acc + &self.0[j] * &out[i - j];
            }
            out.push(-(&acc * &inv0));
        }
        Series(out)
    }

    fn powi(&self, e: u32) -> Series {
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Taylor expansions of `sin(π(s+t))` and `cos(π(s+t))` to `n` coefficients.
fn sin_cos_series(s: &ComplexBF, n: usize, w: u32) -> (Series, Series) {
    let (sn, cs) = sin_cos_pi(s, w);
    let pi = pi(w);
    let mut sin_t = Vec::with_capacity(n); // coefficients of sin(πt)
    let mut cos_t = Vec::with_capacity(n);
    let mut c = BigFloat::one(w); // π^j / j!
    for j in 0..n {
        if j > 0 {
            c = &c * &pi / &BigFloat::from_i64(j as i64, w);
        }
        let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
        let v = if sign > 0 { c.clone() } else { -&c };
        if j % 2 == 0 {
            cos_t.push(v);
            sin_t.push(BigFloat::zero(w));
        } else {
            sin_t.push(v);
            cos_t.push(BigFloat::zero(w));
        }
    }
    // sin(π(s+t)) = sin(πs)cos(πt) + cos(πs)sin(πt)
    // cos(π(s+t)) = cos(πs)cos(πt) - sin(πs)sin(πt)
    let sin_series = (0..n)
        .map(|j| &sn.scale(&cos_t[j]) + &cs.scale(&sin_t[j]))
        .collect();
    let cos_series = (0..n)
        .map(|j| &cs.scale(&cos_t[j]) - &sn.scale(&sin_t[j]))
        .collect();
    (Series(sin_series), Series(cos_series))
}

/// Guard terms carried beyond the requested order.
pub const ORACLE_GUARD_TERMS: u32 = 8;

/// All derivatives of orders `0..=max_order` by truncated Taylor arithmetic.
pub fn deriv_oracle_all(kind: TrigKind, max_order: u32, s: &ComplexBF) -> Result<Vec<ComplexBF>> {
    kind.validate()?;
    check_singular(kind, s, default_threshold(s.prec()))?;
    let p = s.prec();
    let w = p + 64 + 2 * max_order;
    let n = (max_order + ORACLE_GUARD_TERMS + 1) as usize;
    let (sn, cs) = sin_cos_series(s, n, w);
    let f = match kind {
        TrigKind::CscOddPower(m) => sn.recip().powi(2 * m - 1),
        TrigKind::Cot => cs.mul(&sn.recip()),
        TrigKind::Sec => cs.recip(),
        TrigKind::Tan => sn.mul(&cs.recip()),
    };
    let mut fact = BigFloat::one(w);
    let mut out = Vec::with_capacity(max_order as usize + 1);
    for (j, c) in f.0.into_iter().take(max_order as usize + 1).enumerate() {
        if j > 0 {
            fact = &fact * &BigFloat::from_i64(j as i64, w);
        }
        out.push(c.scale(&fact).with_prec(p));
    }
    Ok(out)
}

pub fn deriv_oracle(kind: TrigKind, order: u32, s: &ComplexBF) -> Result<ComplexBF> {
    Ok(deriv_oracle_all(kind, order, s)?.pop().expect("non-empty"))
}

/// `|a - b| / |b|` as a base-2 logarithm (`-inf` when equal).
pub fn log2_rel_diff(a: &ComplexBF, b: &ComplexBF) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        return f64::NEG_INFINITY;
    }
    d.log2_abs() - b.abs().log2_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn real(x: f64) -> ComplexBF {
        ComplexBF::from_real(BigFloat::from_f64(x, P))
    }

    fn close(a: &ComplexBF, b: &ComplexBF, bits: f64) -> bool {
        log2_rel_diff(a, b) < -bits
    }

    #[test]
    fn examples() {
        let pi = ComplexBF::from_real(pi(P));
        let pi2 = &pi * &pi;
        assert!(close(&deriv_formula(TrigKind::CscOddPower(1), 2, &real(0.5)).unwrap(), &pi2, 240.0));
        assert!(close(&deriv_formula(TrigKind::Sec, 2, &real(0.0)).unwrap(), &pi2, 240.0));
        let two_pi = pi.scale(&BigFloat::from_i64(2, P));
        assert!(close(&deriv_formula(TrigKind::Tan, 1, &real(0.25)).unwrap(), &two_pi, 240.0));
        let one = ComplexBF::one(P);
        assert!(close(&deriv_oracle(TrigKind::Sec, 0, &real(0.0)).unwrap(), &one, 250.0));
        assert!(close(&deriv_oracle(TrigKind::CscOddPower(2), 0, &real(0.5)).unwrap(), &one, 250.0));
    }

    #[test]
    fn cot_order_zero_is_cot() {
        let s = ComplexBF::new(BigFloat::from_f64(0.3, P), BigFloat::from_f64(0.2, P));
        let (sn, cs) = sin_cos_pi(&s, P + 32);
        let cot = (&cs / &sn).with_prec(P);
        assert!(close(&deriv_formula(TrigKind::Cot, 0, &s).unwrap(), &cot, 245.0));
    }

    #[test]
    fn formula_matches_oracle_at_fixed_point() {
        let s = ComplexBF::new(BigFloat::from_f64(0.3, P), BigFloat::from_f64(0.2, P));
        let oracle = deriv_oracle_all(TrigKind::Cot, 8, &s).unwrap();
        for (n, o) in oracle.iter().enumerate() {
            let f = deriv_formula(TrigKind::Cot, n as u32, &s).unwrap();
            assert!(close(&f, o, 240.0), "order {n}: 2^{}", log2_rel_diff(&f, o));
        }
    }

    #[test]
    fn singular_points_are_refused() {
        assert!(matches!(
            deriv_formula(TrigKind::Cot, 1, &real(2.0)),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            deriv_formula(TrigKind::Tan, 0, &real(-1.5)),
            Err(Error::Singular(_))
        ));
        assert!(deriv_formula(TrigKind::Tan, 0, &real(1.0)).is_ok());
        assert!(matches!(
            deriv_formula(TrigKind::CscOddPower(0), 0, &real(0.5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kind_names() {
        for name in ["csc", "csc3", "csc5", "cot", "sec", "tan"] {
            let k: TrigKind = name.parse().unwrap();
            assert_eq!(k.to_string(), name);
        }
        assert!("csc2".parse::<TrigKind>().is_err());
    }

    #[test]
    fn cot_formula_low_orders() {
        // d/ds cot(πs) = -π / sin²(πs)
        let f = formula_terms(TrigKind::Cot, 1).unwrap();
        assert_eq!(f.terms.len(), 1);
        assert_eq!(f.terms[0].coeff, BigInt::from(-1));
        assert_eq!(f.terms[0].power, 2);
        // d²/ds² cot(πs) = 2π² cos / sin³
        let f = formula_terms(TrigKind::Cot, 2).unwrap();
        assert_eq!(f.terms.len(), 1);
        assert_eq!((f.terms[0].coeff.clone(), f.terms[0].power), (BigInt::from(2), 3));
    }
}
