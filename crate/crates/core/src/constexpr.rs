//! The constant ring Q[√2, √π, 1/√π, Γ(1/4)] in which every closed form lives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use l2eis_bigfloat::{gamma_quarter, pi, sqrt2, BigFloat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::rational::{int, parse_rational, to_bigfloat, ExactRational};

/// `coeff · (√2)^sqrt2_exp · π^(pi_half_exp/2) · Γ(1/4)^gamma_quarter_exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstMonomial {
    pub coeff: ExactRational,
    pub sqrt2_exp: i32,
    pub pi_half_exp: i32,
    pub gamma_quarter_exp: u32,
}

impl ConstMonomial {
    pub fn new(coeff: ExactRational, sqrt2_exp: i32, pi_half_exp: i32, gamma_quarter_exp: u32) -> Self {
        let mut m = ConstMonomial {
            coeff,
            sqrt2_exp,
            pi_half_exp,
            gamma_quarter_exp,
        };
        m.normalize();
        m
    }

    /// Absorb (√2)² = 2 into the coefficient.
    fn normalize(&mut self) {
        let (q, r) = self.sqrt2_exp.div_mod_floor(&2);
        if q != 0 {
            let two = int(2);
            let f = if q > 0 {
                num_traits::pow(two, q as usize)
            } else {
                num_traits::pow(two, (-q) as usize).recip()
            };
            self.coeff = &self.coeff * f;
        }
        self.sqrt2_exp = r;
    }

    fn key(&self) -> (i32, i32, u32) {
        (self.sqrt2_exp, self.pi_half_exp, self.gamma_quarter_exp)
    }

    pub fn eval(&self, prec: u32) -> BigFloat {
        let w = prec + 16;
        let mut v = to_bigfloat(&self.coeff, w);
        if self.sqrt2_exp != 0 {
            v *= sqrt2(w).powi(self.sqrt2_exp as i64);
        }
        if self.pi_half_exp != 0 {
            let p = pi(w);
            let f = if self.pi_half_exp % 2 == 0 {
                p.powi((self.pi_half_exp / 2) as i64)
            } else {
                p.sqrt().powi(self.pi_half_exp as i64)
            };
            v *= f;
        }
        if self.gamma_quarter_exp != 0 {
            v *= gamma_quarter(w).powi(self.gamma_quarter_exp as i64);
        }
        v.with_prec(prec)
    }
}

impl fmt::Display for ConstMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.sqrt2_exp != 0 {
            write!(f, "*sqrt2")?;
        }
        match self.pi_half_exp {
            0 => {}
            2 => write!(f, "*pi")?,
            e if e % 2 == 0 => write!(f, "*pi^{}", e / 2)?,
            e => write!(f, "*pi^({}/2)", e)?,
        }
        match self.gamma_quarter_exp {
            0 => {}
            1 => write!(f, "*G")?,
            q => write!(f, "*G^{q}")?,
        }
        Ok(())
    }
}

/// Canonical sum of monomials: sorted by `(sqrt2_exp, pi_half_exp,
/// gamma_quarter_exp)`, no repeated triple, no zero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstExpr {
    monomials: Vec<ConstMonomial>,
}

impl ConstExpr {
    pub fn zero() -> Self {
        ConstExpr::default()
    }

    pub fn rational(r: ExactRational) -> Self {
        ConstExpr::from_monomials(vec![ConstMonomial::new(r, 0, 0, 0)])
    }

    pub fn monomial(coeff: ExactRational, sqrt2_exp: i32, pi_half_exp: i32, gamma_quarter_exp: u32) -> Self {
        ConstExpr::from_monomials(vec![ConstMonomial::new(
            coeff,
            sqrt2_exp,
            pi_half_exp,
            gamma_quarter_exp,
        )])
    }

    pub fn from_monomials(monomials: Vec<ConstMonomial>) -> Self {
        ConstExpr { monomials }.canonicalize()
    }

    pub fn monomials(&self) -> &[ConstMonomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn canonicalize(mut self) -> Self {
        for m in &mut self.monomials {
            m.normalize();
        }
        self.monomials.sort_by_key(|a| a.key());
        let mut out: Vec<ConstMonomial> = Vec::with_capacity(self.monomials.len());
        for m in self.monomials {
            match out.last_mut() {
                Some(last) if last.key() == m.key() => last.coeff = &last.coeff + &m.coeff,
                _ => out.push(m),
            }
        }
        out.retain(|m| !m.coeff.is_zero());
        ConstExpr { monomials: out }
    }

    pub fn scale(&self, r: &ExactRational) -> Self {
        ConstExpr::from_monomials(
            self.monomials
                .iter()
                .map(|m| ConstMonomial {
                    coeff: &m.coeff * r,
                    ..m.clone()
                })
                .collect(),
        )
    }

    /// Numeric value with relative error at most `2^-prec`. Terms that cancel
    /// trigger a re-evaluation with enough extra bits to cover the loss.
    pub fn eval(&self, prec: u32) -> BigFloat {
        if self.monomials.is_empty() {
            return BigFloat::zero(prec);
        }
        let mut guard = 32u32;
        loop {
            let w = prec + guard;
            let terms: Vec<BigFloat> = self.monomials.iter().map(|m| m.eval(w)).collect();
            let biggest = terms
                .iter()
                .map(|t| t.log2_abs())
                .fold(f64::NEG_INFINITY, f64::max);
            let sum = terms
                .into_iter()
                .fold(BigFloat::zero(w), |acc, t| acc + t);
            if sum.is_zero() {
                // exact cancellation cannot happen in a canonical expression
                // unless the precision is hopeless
                guard *= 2;
                if guard > 4 * prec + 256 {
                    return sum.with_prec(prec);
                }
                continue;
            }
            let lost = (biggest - sum.log2_abs()).max(0.0).ceil() as u32;
            if lost + 8 <= guard {
                return sum.with_prec(prec);
            }
            guard = lost + 40;
        }
    }

    /// Parses the textual form produced by `Display`, e.g.
    /// `-11/90 + 1/3*pi^-1 + 1/1920*G^8*pi^-6`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(ConstExpr::zero());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        let mut prev: Option<char> = None;
        for ch in s.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let sign_split = (ch == '+' || ch == '-')
                && depth == 0
                && !cur.trim().is_empty()
                && !matches!(prev, Some('^') | Some('/') | Some('*'));
            if sign_split {
                terms.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                prev = Some(ch);
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut monomials = Vec::new();
        for t in terms {
            monomials.push(parse_monomial(t.trim())?);
        }
        Ok(ConstExpr::from_monomials(monomials))
    }
}

fn parse_monomial(t: &str) -> Result<ConstMonomial> {
    let t: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1, rest.to_string()),
        None => (1, t.trim_start_matches('+').to_string()),
    };
    let mut coeff = ExactRational::one();
    let (mut s2, mut ph, mut q) = (0i32, 0i32, 0u32);
    for factor in body.split('*') {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, Some(e.trim_start_matches('(').trim_end_matches(')'))),
            None => (factor, None),
        };
        let parse_int = |e: Option<&str>| -> Result<i32> {
            e.map_or(Ok(1), |e| {
                e.parse::<i32>()
                    .map_err(|_| domain(format!("bad exponent `{e}` in `{t}`")))
            })
        };
        match base {
            "sqrt2" => s2 += parse_int(exp)?,
            "pi" => {
                ph += match exp {
                    Some(e) if e.ends_with("/2") => e[..e.len() - 2]
                        .parse::<i32>()
                        .map_err(|_| domain(format!("bad exponent `{e}` in `{t}`")))?,
                    e => 2 * parse_int(e)?,
                }
            }
            "G" => {
                let e = parse_int(exp)?;
                if e < 0 {
                    return Err(domain(format!("negative Gamma(1/4) power in `{t}`")));
                }
                q += e as u32;
            }
            _ => {
                if exp.is_some() {
                    return Err(domain(format!("unexpected power in `{t}`")));
                }
                coeff *= parse_rational(base)?;
            }
        }
    }
    if sign < 0 {
        coeff = -coeff;
    }
    Ok(ConstMonomial::new(coeff, s2, ph, q))
}

impl fmt::Display for ConstExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i == 0 {
                write!(f, "{m}")?;
            } else if m.coeff.is_negative() {
                let pos = ConstMonomial {
                    coeff: -m.coeff.clone(),
                    ..m.clone()
                };
                write!(f, " - {pos}")?;
            } else {
                write!(f, " + {m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &ConstExpr {
    type Output = ConstExpr;
    fn add(self, rhs: &ConstExpr) -> ConstExpr {
        let mut v = self.monomials.clone();
        v.extend(rhs.monomials.iter().cloned());
        ConstExpr::from_monomials(v)
    }
}

impl Neg for &ConstExpr {
    type Output = ConstExpr;
    fn neg(self) -> ConstExpr {
        self.scale(&-ExactRational::one())
    }
}

impl Sub for &ConstExpr {
    type Output = ConstExpr;
    fn sub(self, rhs: &ConstExpr) -> ConstExpr {
        self + &(-rhs)
    }
}

impl Mul for &ConstExpr {
    type Output = ConstExpr;
    fn mul(self, rhs: &ConstExpr) -> ConstExpr {
        let mut v = Vec::with_capacity(self.monomials.len() * rhs.monomials.len());
        for a in &self.monomials {
            for b in &rhs.monomials {
                v.push(ConstMonomial::new(
                    &a.coeff * &b.coeff,
                    a.sqrt2_exp + b.sqrt2_exp,
                    a.pi_half_exp + b.pi_half_exp,
                    a.gamma_quarter_exp + b.gamma_quarter_exp,
                ));
            }
        }
        ConstExpr::from_monomials(v)
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for ConstExpr {
            type Output = ConstExpr;
            fn $method(self, rhs: ConstExpr) -> ConstExpr {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ConstExpr {
    type Output = ConstExpr;
    fn neg(self) -> ConstExpr {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn sqrt2_squared_is_absorbed() {
        let m = ConstMonomial::new(rat(1, 3), 3, 0, 0);
        assert_eq!(m.sqrt2_exp, 1);
        assert_eq!(m.coeff, rat(2, 3));
        let m = ConstMonomial::new(rat(1, 1), -1, 0, 0);
        assert_eq!((m.sqrt2_exp, m.coeff), (1, rat(1, 2)));
    }

    #[test]
    fn x_minus_x_is_empty() {
        let x = ConstExpr::parse("1/6 - 1/2*pi^-1 + 3*G^4*pi^(-3/2)").unwrap();
        assert!((&x - &x).is_zero());
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn display_parse_roundtrip() {
        let x = ConstExpr::parse("-83/360*pi^4 + 1/12*sqrt2*G^2*pi^(5/2) - 1/640*G^8*pi^-2").unwrap();
        let y = ConstExpr::parse(&x.to_string()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn merges_equal_triples() {
        let x = ConstExpr::parse("1/2*pi + 1/3*pi - 5/6*pi").unwrap();
        assert!(x.is_zero());
    }
}
