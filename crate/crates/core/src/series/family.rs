//! Right-hand sides of the four double-series families as combinations of
//! single hyperbolic sums.

use std::fmt;
use std::str::FromStr;

use l2eis_bigfloat::{pi, BigFloat, ComplexBF};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{partial_fraction, sum_hyperbolic, HyperbolicSumSpec, Kernel, KernelShape, ParityCombine};
use crate::coeff::{binomial, composition_power_sum_int, factorial};
use crate::error::{domain, Error, Result};
use crate::rational::{int, to_bigfloat, ExactRational};
use crate::trig::TrigKind;
use crate::weight::WeightFn;

/// The four lattice sums over `m ≠ 0`, `n ∈ Z`:
/// `F_alt` is `Σ f(m)(-1)^n/(m+ani)^p`, `G_plain` is `Σ g(m)/(m+ani)^p`,
/// and the `_oddline` variants replace `an` by `a(2n+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "F_alt")]
    FAlt,
    #[serde(rename = "G_plain")]
    GPlain,
    #[serde(rename = "F_oddline")]
    FOddline,
    #[serde(rename = "G_oddline")]
    GOddline,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::FAlt, Family::GPlain, Family::FOddline, Family::GOddline];

    /// Whether the inner sum carries `(-1)^n`.
    pub fn alternating(self) -> bool {
        matches!(self, Family::FAlt | Family::FOddline)
    }

    pub fn oddline(self) -> bool {
        matches!(self, Family::FOddline | Family::GOddline)
    }

    pub fn min_exponent(self) -> u32 {
        if self.alternating() {
            1
        } else {
            2
        }
    }

    /// Function whose derivatives give the inner sum.
    pub fn trig_kind(self) -> TrigKind {
        match self {
            Family::FAlt => TrigKind::CscOddPower(1),
            Family::GPlain => TrigKind::Cot,
            Family::FOddline => TrigKind::Sec,
            Family::GOddline => TrigKind::Tan,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::FAlt => "F_alt",
            Family::GPlain => "G_plain",
            Family::FOddline => "F_oddline",
            Family::GOddline => "G_oddline",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| domain(format!("unknown family `{s}` (F_alt, G_plain, F_oddline, G_oddline)")))
    }
}

/// Replaces `m` by `b m + c` in the denominator. Shifted sums run over all
/// `m ∈ Z` with `b m + c ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift {
    pub b: ExactRational,
    pub c: ExactRational,
}

/// `Σ w(m) sign_n / (b m + c + a z_n i)^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub exponent: u32,
    pub a: ExactRational,
    pub shift: Option<Shift>,
}

impl FamilySpec {
    pub fn new(family: Family, exponent: u32, a: ExactRational) -> Self {
        FamilySpec {
            family,
            exponent,
            a,
            shift: None,
        }
    }

    pub fn shifted(mut self, b: ExactRational, c: ExactRational) -> Self {
        self.shift = Some(Shift { b, c });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_zero() {
            return Err(domain("lattice parameter a must be non-zero"));
        }
        if self.exponent < self.family.min_exponent() {
            return Err(domain(format!(
                "{} needs exponent >= {}, got {}",
                self.family,
                self.family.min_exponent(),
                self.exponent
            )));
        }
        if let Some(s) = &self.shift {
            if s.b.is_zero() {
                return Err(domain("shift coefficient b must be non-zero"));
            }
        }
        Ok(())
    }

    /// `(b, c)`, with `(1, 0)` for unshifted sums.
    pub fn affine(&self) -> (ExactRational, ExactRational) {
        match &self.shift {
            Some(s) => (s.b.clone(), s.c.clone()),
            None => (ExactRational::one(), ExactRational::zero()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} p={} a={}", self.family, self.exponent, self.a)?;
        if let Some(s) = &self.shift {
            write!(f, " b={} c={}", s.b, s.c)?;
        }
        Ok(())
    }
}

/// Choice between the kernel argument as printed and the corrected one for
/// the `G_oddline` family (`mπ/a` versus `mπ/(2a)`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    #[default]
    Printed,
    Alternate,
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reading::Printed => "printed",
            Reading::Alternate => "alternate",
        })
    }
}

impl FromStr for Reading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Reading::Printed),
            "alternate" => Ok(Reading::Alternate),
            _ => Err(domain(format!("unknown reading `{s}` (printed, alternate)"))),
        }
    }
}

/// `prefactor · π^pi_power · (i if imaginary) · Σ coeff · sum`.
#[derive(Clone, Debug)]
pub struct RhsLayer {
    pub prefactor: ExactRational,
    pub pi_power: u32,
    pub imaginary: bool,
    pub terms: Vec<(ExactRational, HyperbolicSumSpec)>,
}

impl RhsLayer {
    pub fn eval(&self, prec: u32) -> Result<ComplexBF> {
        let max_bits = self
            .terms
            .iter()
            .map(|(c, _)| c.numer().bits() + c.denom().bits())
            .max()
            .unwrap_or(0) as u32;
        let w = prec + 32 + max_bits;
        let mut acc = BigFloat::zero(w);
        for (c, spec) in &self.terms {
            acc += to_bigfloat(c, w) * sum_hyperbolic(spec, w)?;
        }
        let v = acc * to_bigfloat(&self.prefactor, w) * pi(w).powi(self.pi_power as i64);
        let v = v.with_prec(prec);
        Ok(if self.imaginary {
            ComplexBF::from_imag(v)
        } else {
            ComplexBF::from_real(v)
        })
    }
}

fn s1(j: u32, l: u32) -> BigInt {
    composition_power_sum_int(j, l, 1).expect("l <= j")
}

fn fact(n: u32) -> BigInt {
    factorial(n)
}

fn r(n: BigInt) -> ExactRational {
    ExactRational::from_integer(n)
}

fn sgn(e: i64) -> BigInt {
    BigInt::from(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `Σ_{j=l}^{k} {C(2k,2j)(2l-1)! - C(2k,2j+1)(2l-1)!(2l+1)} S(j,l)`.
fn g_even_coeff(k: u32, l: u32) -> BigInt {
    (l..=k)
        .map(|j| (binomial(2 * k, 2 * j) - binomial(2 * k, 2 * j + 1) * (2 * l + 1)) * fact(2 * l - 1) * s1(j, l))
        .sum()
}

/// `Σ_{j=l}^{k} {C(2k,2j)(2l)! - C(2k,2j+1)(2l+1)!} S(j,l)`.
fn g_odd_coeff(k: u32, l: u32) -> BigInt {
    (l..=k)
        .map(|j| (binomial(2 * k, 2 * j) * fact(2 * l) - binomial(2 * k, 2 * j + 1) * fact(2 * l + 1)) * s1(j, l))
        .sum()
}

/// Coefficient layer of the unshifted families, or of the shifted
/// `F_alt` case `b m + b/2` with even exponent.
pub fn theorem_layer(spec: &FamilySpec, weight: &WeightFn, reading: Reading) -> Result<RhsLayer> {
    spec.validate()?;
    let p = spec.exponent;
    let a = &spec.a;
    let term = |coeff: BigInt, shape: KernelShape, power: u32, c: &ExactRational, combine: ParityCombine| {
        (
            r(coeff),
            HyperbolicSumSpec::new(weight.clone(), Kernel::new(shape, power, c.clone()), combine),
        )
    };
    let a_pow = num_traits::pow(a.clone(), p as usize);
    let two_a_pow = num_traits::pow(a * int(2), p as usize);
    let inv_a = a.recip();
    let inv_2a = (a * int(2)).recip();
    let fp = r(fact(p - 1));

    if let Some(shift) = &spec.shift {
        if spec.family != Family::FAlt || !p.is_multiple_of(2) || shift.c != &shift.b / int(2) {
            return Err(domain(format!(
                "no coefficient layer for shifted {spec}; use the partial-fraction route"
            )));
        }
        let k = p / 2;
        let kc = &shift.b / a;
        let kd = -&shift.c / a;
        let terms = (0..k)
            .map(|l| {
                let (c, mut s) = term(
                    fact(2 * l + 1) * s1(k - 1, l),
                    KernelShape::CoshOverSinh,
                    2 * l + 2,
                    &kc,
                    ParityCombine::Shifted,
                );
                s.kernel = s.kernel.with_offset(kd.clone());
                (c, s)
            })
            .collect();
        return Ok(RhsLayer {
            prefactor: (a_pow * fp).recip(),
            pi_power: p,
            imaginary: false,
            terms,
        });
    }

    let (prefactor, imaginary, terms) = match (spec.family, p.is_multiple_of(2)) {
        (Family::FAlt, true) => {
            let k = p / 2;
            let t = (0..k)
                .map(|l| {
                    let c = fact(2 * l + 1) * s1(k - 1, l);
                    term(c, KernelShape::CoshOverSinh, 2 * l + 2, &inv_a, ParityCombine::Even)
                })
                .collect();
            (a_pow * &fp, false, t)
        }
        (Family::FAlt, false) => {
            let k = p.div_ceil(2);
            let t = (0..k)
                .map(|l| term(fact(2 * l) * s1(k - 1, l), KernelShape::InvSinh, 2 * l + 1, &inv_a, ParityCombine::Odd))
                .collect();
            (a_pow * &fp, false, t)
        }
        (Family::GPlain, true) => {
            let k = p / 2;
            let t = (1..=k)
                .map(|l| term(g_even_coeff(k, l), KernelShape::InvSinh, 2 * l, &inv_a, ParityCombine::Even))
                .collect();
            (a_pow * &fp, false, t)
        }
        (Family::GPlain, false) => {
            let k = (p - 1) / 2;
            let t = (0..=k)
                .map(|l| term(g_odd_coeff(k, l), KernelShape::CoshOverSinh, 2 * l + 1, &inv_a, ParityCombine::Odd))
                .collect();
            (a_pow * &fp, false, t)
        }
        (Family::FOddline, true) => {
            let k = p / 2;
            let t = (0..k)
                .map(|l| {
                    let c = sgn(l as i64 - 1) * fact(2 * l + 1) * s1(k - 1, l);
                    term(c, KernelShape::SinhOverCosh, 2 * l + 2, &inv_2a, ParityCombine::Odd)
                })
                .collect();
            (two_a_pow * &fp, true, t)
        }
        (Family::FOddline, false) => {
            let k = p.div_ceil(2);
            let t = (0..k)
                .map(|l| {
                    let c = sgn(l as i64 - 1) * fact(2 * l) * s1(k - 1, l);
                    term(c, KernelShape::InvCosh, 2 * l + 1, &inv_2a, ParityCombine::Even)
                })
                .collect();
            (two_a_pow * &fp, true, t)
        }
        (Family::GOddline, even) => {
            let arg = match reading {
                Reading::Printed => &inv_a,
                Reading::Alternate => &inv_2a,
            };
            let t = if even {
                let k = p / 2;
                (1..=k)
                    .map(|l| term(sgn(l as i64) * g_even_coeff(k, l), KernelShape::InvCosh, 2 * l, arg, ParityCombine::Even))
                    .collect()
            } else {
                let k = (p - 1) / 2;
                (0..=k)
                    .map(|l| {
                        let c = sgn(l as i64) * g_odd_coeff(k, l);
                        term(c, KernelShape::SinhOverCosh, 2 * l + 1, arg, ParityCombine::Odd)
                    })
                    .collect()
            };
            (two_a_pow * &fp, false, t)
        }
    };
    Ok(RhsLayer {
        prefactor: prefactor.recip(),
        pi_power: p,
        imaginary,
        terms,
    })
}

fn check_admissible(spec: &FamilySpec, weight: &WeightFn) -> Result<()> {
    if weight.decays() {
        return Ok(());
    }
    let need = if spec.family.alternating() {
        "f(m) = o(1)"
    } else if spec.exponent == 2 {
        "g(m) = o(1/m)"
    } else {
        "g(m) = o(1)"
    };
    Err(Error::Admissibility(format!("`{weight}` does not satisfy {need}")))
}

/// Value of the double series via the coefficient layers, reading the
/// `G_oddline` kernel argument as printed.
pub fn eval_rhs(spec: &FamilySpec, weight: &WeightFn, prec: u32) -> Result<ComplexBF> {
    eval_rhs_with_reading(spec, weight, prec, Reading::Printed)
}

pub fn eval_rhs_with_reading(spec: &FamilySpec, weight: &WeightFn, prec: u32, reading: Reading) -> Result<ComplexBF> {
    if spec.shift.is_some() {
        return eval_rhs_shifted(spec, weight, prec, reading);
    }
    check_admissible(spec, weight)?;
    theorem_layer(spec, weight, reading)?.eval(prec)
}

/// Shifted double series: the closed layer when one exists, otherwise the
/// partial-fraction sum over `m ∈ Z`.
pub fn eval_rhs_shifted(spec: &FamilySpec, weight: &WeightFn, prec: u32, reading: Reading) -> Result<ComplexBF> {
    spec.validate()?;
    check_admissible(spec, weight)?;
    match theorem_layer(spec, weight, reading) {
        Ok(layer) => layer.eval(prec),
        Err(Error::Domain(_)) => partial_fraction::eval_partial_fraction(spec, weight, prec),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn w(s: &str) -> WeightFn {
        s.parse().unwrap()
    }

    fn close(v: &ComplexBF, re: &str, im: &str, bits: f64) {
        let r = ComplexBF::new(
            BigFloat::parse_decimal(re, 200).unwrap(),
            BigFloat::parse_decimal(im, 200).unwrap(),
        );
        let d = (v - &r).abs();
        assert!(d.is_zero() || d.log2_abs() < -bits, "{v} vs {re} + {im}i");
    }

    #[test]
    fn reference_values() {
        let one = int(1);
        let half = rat(1, 2);
        let cases: Vec<(FamilySpec, &str, &str, &str)> = vec![
            (FamilySpec::new(Family::FAlt, 1, one.clone()), "m^2*csch(1)", "0.04746180644627474378", "0"),
            (FamilySpec::new(Family::FAlt, 1, one.clone()), "m^8*csch(1)", "0.070641519950218592827", "0"),
            (FamilySpec::new(Family::FOddline, 1, half.clone()), "m^2*sech(1)", "0", "-0.047111213218487195734"),
            (FamilySpec::new(Family::GPlain, 2, int(2)), "m^2*sech(1/2)^2", "0.1491056624577174268", "0"),
            (FamilySpec::new(Family::GPlain, 2, one.clone()), "csch(1)^2", "0.001109667648637326926", "0"),
            (FamilySpec::new(Family::GPlain, 3, one.clone()), "csch(2)", "0.0017430618664426431041", "0"),
            (FamilySpec::new(Family::FOddline, 4, half.clone()), "csch(1)", "0", "-0.23130206272597195639"),
            (FamilySpec::new(Family::FOddline, 3, half.clone()), "sech(1)", "0", "-0.22774605950940508784"),
            (FamilySpec::new(Family::GPlain, 4, one.clone()), "alt*sech(1)", "-0.084944436053052400277", "0"),
        ];
        for (spec, weight, re, im) in cases {
            let v = eval_rhs(&spec, &w(weight), 128).unwrap();
            close(&v, re, im, 60.0);
        }
    }

    #[test]
    fn goddline_readings() {
        let spec = FamilySpec::new(Family::GOddline, 2, int(1));
        let weight = w("csch(1/2)^2");
        let alt = eval_rhs_with_reading(&spec, &weight, 128, Reading::Alternate).unwrap();
        close(&alt, "-0.14827548010665963448", "0", 60.0);
        let printed = eval_rhs(&spec, &weight, 128).unwrap();
        assert!((&printed - &alt).abs().log2_abs() > -10.0);
    }

    #[test]
    fn admissibility_and_domain() {
        let spec = FamilySpec::new(Family::GPlain, 2, int(1));
        assert!(matches!(eval_rhs(&spec, &w("tanh(1)"), 64), Err(Error::Admissibility(_))));
        let spec = FamilySpec::new(Family::GPlain, 1, int(1));
        assert!(matches!(eval_rhs(&spec, &w("csch(1)"), 64), Err(Error::Domain(_))));
        let spec = FamilySpec::new(Family::FAlt, 2, int(0));
        assert!(eval_rhs(&spec, &w("csch(1)"), 64).is_err());
    }

    #[test]
    fn family_names_roundtrip() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("H".parse::<Family>().is_err());
    }
}
