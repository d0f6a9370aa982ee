//! Weight functions `f(m)`, `g(m)` built from a closed set of factors, so that
//! an exponential decay bound is always available.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! weight := term (("+" | "-") term)* | "0"
//! term   := factor ("*" factor)*
//! factor := rational | "m" ["^" int] | "alt"
//!         | hyp "(" rational ["," rational] ")" ["^" int]
//! hyp    := "csch" | "sech" | "coth" | "tanh"
//! ```
//!
//! `alt` is `(-1)^m` and `hyp(c, d)` is the hyperbolic function at `(c m + d) π`.
//! For example `m^2*csch(1)` is `m²/sinh(mπ)` and `sech(1,1/2)` is
//! `1/cosh((2m+1)π/2)`.

use std::fmt;
use std::str::FromStr;

use l2eis_bigfloat::{pi, BigFloat};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::rational::{int, parse_rational, to_bigfloat, to_f64, ExactRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hyp {
    Csch,
    Sech,
    Coth,
    Tanh,
}

impl Hyp {
    fn name(self) -> &'static str {
        match self {
            Hyp::Csch => "csch",
            Hyp::Sech => "sech",
            Hyp::Coth => "coth",
            Hyp::Tanh => "tanh",
        }
    }

    /// Whether the function has a pole at zero.
    fn singular_at_zero(self) -> bool {
        matches!(self, Hyp::Csch | Hyp::Coth)
    }
}

/// `hyp((c m + d) π)^power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypFactor {
    pub hyp: Hyp,
    pub c: ExactRational,
    pub d: ExactRational,
    pub power: u32,
}

impl HypFactor {
    pub fn new(hyp: Hyp, c: ExactRational, d: ExactRational, power: u32) -> Self {
        HypFactor { hyp, c, d, power }
    }

    fn arg_f64(&self, m: i64) -> f64 {
        (to_f64(&self.c) * m as f64 + to_f64(&self.d)) * std::f64::consts::PI
    }

    fn arg_is_zero(&self, m: i64) -> bool {
        (&self.c * int(m) + &self.d).is_zero()
    }

    /// Smallest `|c m + d| π` over the integers where it is non-zero.
    fn min_abs_arg(&self) -> f64 {
        let c = to_f64(&self.c);
        let d = to_f64(&self.d);
        if c == 0.0 {
            return d.abs() * std::f64::consts::PI;
        }
        let m0 = (-d / c).floor() as i64;
        [m0 - 1, m0, m0 + 1, m0 + 2]
            .into_iter()
            .filter(|&m| !self.arg_is_zero(m))
            .map(|m| self.arg_f64(m).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn eval_f64(&self, m: i64) -> f64 {
        let x = self.arg_f64(m);
        let e = (-2.0 * x.abs()).exp();
        let ax = x.abs();
        let v = match self.hyp {
            Hyp::Csch => x.signum() * 2.0 * (-ax).exp() / (1.0 - e),
            Hyp::Sech => 2.0 * (-ax).exp() / (1.0 + e),
            Hyp::Coth => x.signum() * (1.0 + e) / (1.0 - e),
            Hyp::Tanh => x.tanh(),
        };
        v.powi(self.power as i32)
    }

    /// `(rho, ln_c)` with `|factor(m)| <= exp(ln_c - rho |m|)`.
    fn decay(&self) -> (f64, f64) {
        let v = self.power as f64;
        let rho = to_f64(&self.c).abs() * std::f64::consts::PI;
        let shift = to_f64(&self.d).abs() * std::f64::consts::PI;
        let xmin = self.min_abs_arg();
        let ln2 = std::f64::consts::LN_2;
        match self.hyp {
            Hyp::Csch => (v * rho, v * (ln2 + shift - (-(-2.0 * xmin).exp()).ln_1p())),
            Hyp::Sech => (v * rho, v * (ln2 + shift)),
            Hyp::Coth => {
                let e = (-2.0 * xmin).exp();
                (0.0, v * ((1.0 + e) / (1.0 - e)).ln())
            }
            Hyp::Tanh => (0.0, 0.0),
        }
    }
}

impl fmt::Display for HypFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d.is_zero() {
            write!(f, "{}({})", self.hyp.name(), self.c)?;
        } else {
            write!(f, "{}({},{})", self.hyp.name(), self.c, self.d)?;
        }
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

/// `coeff · m^m_pow · (-1)^{m·alt} · Π factors`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightTerm {
    pub coeff: ExactRational,
    pub m_pow: u32,
    pub alt: bool,
    pub factors: Vec<HypFactor>,
}

impl WeightTerm {
    fn one() -> Self {
        WeightTerm {
            coeff: ExactRational::one(),
            m_pow: 0,
            alt: false,
            factors: Vec::new(),
        }
    }

    /// Merge factors with the same function and argument, sort them.
    fn normalize(mut self) -> Self {
        self.factors.sort_by(|a, b| (a.hyp, &a.c, &a.d).cmp(&(b.hyp, &b.c, &b.d)));
        let mut out: Vec<HypFactor> = Vec::with_capacity(self.factors.len());
        for f in self.factors {
            match out.last_mut() {
                Some(l) if l.hyp == f.hyp && l.c == f.c && l.d == f.d => l.power += f.power,
                _ => out.push(f),
            }
        }
        out.retain(|f| f.power > 0);
        self.factors = out;
        self
    }

    fn shape_key(&self) -> (u32, bool, Vec<HypFactor>) {
        (self.m_pow, self.alt, self.factors.clone())
    }

    fn eval_f64(&self, m: i64) -> f64 {
        let mut v = to_f64(&self.coeff) * (m as f64).powi(self.m_pow as i32);
        if self.alt && m % 2 != 0 {
            v = -v;
        }
        for f in &self.factors {
            v *= f.eval_f64(m);
        }
        v
    }
}

/// A finite sum of [`WeightTerm`]s in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WeightFn {
    terms: Vec<WeightTerm>,
}

/// `|w(m)| <= exp(ln_c) |m|^deg e^{-rho |m|}` for every integer `m` with
/// `|m| >= 1` at which `w` is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay {
    pub rho: f64,
    pub deg: u32,
    pub ln_c: f64,
}

impl Decay {
    pub const ZERO: Decay = Decay {
        rho: f64::INFINITY,
        deg: 0,
        ln_c: f64::NEG_INFINITY,
    };

    pub fn bound(&self, m: f64) -> f64 {
        if self.ln_c == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln_c + self.deg as f64 * m.abs().ln() - self.rho * m.abs()).exp()
    }

    /// Product of two bounds.
    pub fn times(&self, other: &Decay) -> Decay {
        Decay {
            rho: self.rho + other.rho,
            deg: self.deg + other.deg,
            ln_c: self.ln_c + other.ln_c,
        }
    }

    /// Upper bound for `Σ_{m > n} bound(m)` from a geometric majorant;
    /// infinite when the ratio test does not yet apply at `n`.
    pub fn tail(&self, n: u64) -> f64 {
        if self.ln_c == f64::NEG_INFINITY {
            return 0.0;
        }
        if self.rho <= 0.0 {
            return f64::INFINITY;
        }
        let first = (n + 1) as f64;
        let q = ((first + 1.0) / first).powi(self.deg as i32) * (-self.rho).exp();
        if q >= 1.0 {
            return f64::INFINITY;
        }
        self.bound(first) / (1.0 - q)
    }

    /// The same tail bound in log2, robust against f64 underflow.
    pub fn log2_tail(&self, n: u64) -> f64 {
        if self.ln_c == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if self.rho <= 0.0 {
            return f64::INFINITY;
        }
        let first = (n + 1) as f64;
        let q_ln = self.deg as f64 * ((first + 1.0) / first).ln() - self.rho;
        if q_ln >= 0.0 {
            return f64::INFINITY;
        }
        let ln_bound = self.ln_c + self.deg as f64 * first.ln() - self.rho * first;
        (ln_bound - (-q_ln.exp()).ln_1p()) / std::f64::consts::LN_2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl WeightFn {
    pub fn zero() -> Self {
        WeightFn::default()
    }

    pub fn one() -> Self {
        WeightFn {
            terms: vec![WeightTerm::one()],
        }
    }

    pub fn from_terms(terms: Vec<WeightTerm>) -> Self {
        let mut terms: Vec<WeightTerm> = terms.into_iter().map(WeightTerm::normalize).collect();
        terms.sort_by(|a, b| {
            let ka = a.shape_key();
            let kb = b.shape_key();
            (ka.0, ka.1, &ka.2).cmp(&(kb.0, kb.1, &kb.2))
        });
        let mut out: Vec<WeightTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(l) if l.shape_key() == t.shape_key() => l.coeff = &l.coeff + &t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        WeightFn { terms: out }
    }

    /// A single hyperbolic factor `hyp((c m + d) π)^power`.
    pub fn factor(hyp: Hyp, c: ExactRational, d: ExactRational, power: u32) -> Self {
        let mut t = WeightTerm::one();
        t.factors.push(HypFactor::new(hyp, c, d, power));
        WeightFn::from_terms(vec![t])
    }

    pub fn terms(&self) -> &[WeightTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, r: &ExactRational) -> Self {
        WeightFn::from_terms(
            self.terms
                .iter()
                .map(|t| WeightTerm {
                    coeff: &t.coeff * r,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &WeightFn) -> Self {
        let mut v = self.terms.clone();
        v.extend(other.terms.iter().cloned());
        WeightFn::from_terms(v)
    }

    pub fn mul(&self, other: &WeightFn) -> Self {
        let mut v = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                v.push(WeightTerm {
                    coeff: &a.coeff * &b.coeff,
                    m_pow: a.m_pow + b.m_pow,
                    alt: a.alt ^ b.alt,
                    factors,
                });
            }
        }
        WeightFn::from_terms(v)
    }

    fn check_defined(&self, m: i64) -> Result<()> {
        for t in &self.terms {
            for f in &t.factors {
                if f.hyp.singular_at_zero() && f.arg_is_zero(m) {
                    return Err(Error::Singular(format!("weight `{self}` has a pole at m = {m}")));
                }
            }
        }
        Ok(())
    }

    /// `w(m)` with relative error about `2^-prec` per term.
    pub fn eval_big(&self, m: i64, prec: u32) -> Result<BigFloat> {
        self.check_defined(m)?;
        let w = prec + 16;
        let pi = pi(w);
        let mut acc = BigFloat::zero(w);
        // one sinh/cosh evaluation per distinct argument
        let mut cache: Vec<(ExactRational, BigFloat, BigFloat)> = Vec::new();
        for t in &self.terms {
            let mut v = to_bigfloat(&t.coeff, w);
            if t.m_pow > 0 {
                v *= BigFloat::from_i64(m, w).powi(t.m_pow as i64);
            }
            if t.alt && m % 2 != 0 {
                v = -v;
            }
            for f in &t.factors {
                let arg = &f.c * int(m) + &f.d;
                let idx = match cache.iter().position(|(a, _, _)| *a == arg) {
                    Some(i) => i,
                    None => {
                        let x = to_bigfloat(&arg, w) * &pi;
                        let (sh, ch) = x.sinh_cosh();
                        cache.push((arg, sh, ch));
                        cache.len() - 1
                    }
                };
                let (_, sh, ch) = &cache[idx];
                let base = match f.hyp {
                    Hyp::Csch => sh.recip(),
                    Hyp::Sech => ch.recip(),
                    Hyp::Coth => ch / sh,
                    Hyp::Tanh => sh / ch,
                };
                v *= base.powi(f.power as i64);
            }
            acc += v;
        }
        Ok(acc.with_prec(prec))
    }

    /// `w(m)` in double precision; underflows to zero for large arguments.
    pub fn eval_f64(&self, m: i64) -> Result<f64> {
        self.check_defined(m)?;
        Ok(self.terms.iter().map(|t| t.eval_f64(m)).sum())
    }

    pub fn decay(&self) -> Decay {
        if self.terms.is_empty() {
            return Decay::ZERO;
        }
        let mut rho = f64::INFINITY;
        let mut deg = 0;
        let mut sum_c = 0.0;
        for t in &self.terms {
            let mut r = 0.0;
            let mut ln_c = to_f64(&t.coeff).abs().ln();
            for f in &t.factors {
                let (fr, fc) = f.decay();
                r += fr;
                ln_c += fc;
            }
            rho = f64::min(rho, r);
            deg = deg.max(t.m_pow);
            sum_c += ln_c.exp();
        }
        Decay {
            rho,
            deg,
            ln_c: sum_c.ln(),
        }
    }

    /// Parity under `m -> -m`, if any.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for t in &self.terms {
            let mut odd = t.m_pow % 2 == 1;
            for f in &t.factors {
                if !f.d.is_zero() {
                    return None;
                }
                if matches!(f.hyp, Hyp::Csch | Hyp::Coth | Hyp::Tanh) && f.power % 2 == 1 {
                    odd = !odd;
                }
            }
            let p = if odd { Parity::Odd } else { Parity::Even };
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        seen.or(Some(Parity::Even))
    }

    /// Whether `w(m) -> 0`. No weight in this grammar tends to zero without
    /// decaying exponentially, so this also covers `w(m) = o(1/m)`.
    pub fn decays(&self) -> bool {
        self.is_zero() || self.decay().rho > 0.0
    }
}

impl fmt::Display for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if !mag.is_one() {
                parts.push(mag.to_string());
            }
            match t.m_pow {
                0 => {}
                1 => parts.push("m".into()),
                p => parts.push(format!("m^{p}")),
            }
            if t.alt {
                parts.push("alt".into());
            }
            parts.extend(t.factors.iter().map(|x| x.to_string()));
            if parts.is_empty() {
                parts.push("1".into());
            }
            let body = parts.join("*");
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

fn split_top_level(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !matches!(prev, Some('^') | Some('*') | Some('/')) {
            if !cur.is_empty() {
                out.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
            prev = Some(ch);
            continue;
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.is_empty() {
        out.push((neg, cur));
    }
    out
}

fn parse_factor(tok: &str, term: &mut WeightTerm) -> Result<()> {
    let bad = |msg: &str| domain(format!("weight factor `{tok}`: {msg}"));
    let (base, exp) = match tok.rfind('^') {
        Some(i) if !tok[i..].contains(')') => (&tok[..i], Some(&tok[i + 1..])),
        _ => (tok, None),
    };
    let power: u32 = match exp {
        Some(e) => e.parse().map_err(|_| bad("exponent must be a non-negative integer"))?,
        None => 1,
    };
    if base == "m" {
        term.m_pow += power;
        return Ok(());
    }
    if base == "alt" {
        if power % 2 == 1 {
            term.alt = !term.alt;
        }
        return Ok(());
    }
    for hyp in [Hyp::Csch, Hyp::Sech, Hyp::Coth, Hyp::Tanh] {
        if let Some(rest) = base.strip_prefix(hyp.name()) {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| bad("expected `(c)` or `(c,d)`"))?;
            let (c, d) = match inner.split_once(',') {
                Some((c, d)) => (parse_rational(c)?, parse_rational(d)?),
                None => (parse_rational(inner)?, ExactRational::zero()),
            };
            if c.is_zero() {
                return Err(bad("the coefficient of m must be non-zero"));
            }
            term.factors.push(HypFactor::new(hyp, c, d, power));
            return Ok(());
        }
    }
    if exp.is_some() {
        let r = parse_rational(base).map_err(|_| bad("unknown factor"))?;
        term.coeff *= num_traits::pow(r, power as usize);
        return Ok(());
    }
    term.coeff *= parse_rational(base).map_err(|_| bad("unknown factor"))?;
    Ok(())
}

impl FromStr for WeightFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(domain("empty weight"));
        }
        let mut terms = Vec::new();
        for (neg, body) in split_top_level(s) {
            let mut t = WeightTerm::one();
            for tok in body.split('*') {
                if tok.is_empty() {
                    return Err(domain(format!("empty factor in `{s}`")));
                }
                parse_factor(tok, &mut t)?;
            }
            if neg {
                t.coeff = -t.coeff;
            }
            terms.push(t);
        }
        Ok(WeightFn::from_terms(terms))
    }
}

impl Serialize for WeightFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeightFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> WeightFn {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in [
            "m^2*csch(1)",
            "alt*sech(1)",
            "sech(1,1/2)^3",
            "1 + m*sech(1/3)^2",
            "-1/2*coth(2)^2 + tanh(1)",
            "0",
        ] {
            let a = w(s);
            let b = w(&a.to_string());
            assert_eq!(a, b, "{s} -> {a}");
        }
        assert_eq!(w("csch(1)*csch(1)").to_string(), "csch(1)^2");
        assert_eq!(w("m*m^2*3").to_string(), "3*m^3");
        assert!(w("m - m").is_zero());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "sinh(1)", "csch(0)", "csch(1", "m^-1", "m**2"] {
            assert!(s.parse::<WeightFn>().is_err(), "{s}");
        }
    }

    #[test]
    fn evaluation_agrees_between_precisions() {
        let f = w("m^2*csch(1) + alt*sech(1/2)^2 - 3/7*coth(1,1/4)");
        for m in [-5i64, -1, 1, 2, 9] {
            let big = f.eval_big(m, 128).unwrap().to_f64();
            let small = f.eval_f64(m).unwrap();
            assert!((big - small).abs() <= 1e-14 * big.abs().max(1e-300), "m={m}");
        }
    }

    #[test]
    fn pole_is_reported() {
        assert!(matches!(w("csch(1)").eval_big(0, 64), Err(Error::Singular(_))));
        assert!(w("sech(1)").eval_big(0, 64).is_ok());
    }

    #[test]
    fn parity_detection() {
        assert_eq!(w("m^2*csch(1)").parity(), Some(Parity::Odd));
        assert_eq!(w("alt*sech(1)").parity(), Some(Parity::Even));
        assert_eq!(w("1 + m").parity(), None);
        assert_eq!(w("sech(1,1/2)").parity(), None);
    }

    #[test]
    fn decay_bounds_hold_on_samples() {
        for s in [
            "m^2*csch(1)",
            "m^8*csch(1)",
            "csch(2)",
            "alt*sech(1)*csch(1)^4",
            "coth(1)^2*sech(1/2)",
            "sech(1,1/2)^3",
            "csch(1,-1/2)^2",
            "1 + m*sech(1/3)^2",
        ] {
            let f = w(s);
            let d = f.decay();
            for m in (1..=64).flat_map(|m| [m, -m]) {
                let v = f.eval_f64(m).unwrap().abs();
                assert!(v <= d.bound(m as f64) * (1.0 + 1e-12), "{s} at m = {m}");
            }
        }
    }

    #[test]
    fn tail_is_an_upper_bound() {
        let f = w("m^3*csch(1)");
        let d = f.decay();
        let exact: f64 = (11..400).map(|m| f.eval_f64(m).unwrap().abs()).sum();
        assert!(exact <= d.tail(10));
        assert!((d.log2_tail(10) - d.tail(10).log2()).abs() < 1e-9);
    }
}
