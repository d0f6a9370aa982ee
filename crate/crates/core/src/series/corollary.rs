//! Closed low-exponent formulas (exponents 1 to 4), written out term by term
//! instead of going through the general coefficient layers.

use l2eis_bigfloat::{pi, BigFloat, ComplexBF};

use super::{sum_hyperbolic, Family, FamilySpec, HyperbolicSumSpec, Kernel, KernelShape, ParityCombine, Reading};
use crate::error::{domain, Result};
use crate::rational::{int, rat, to_bigfloat, ExactRational};
use crate::weight::WeightFn;

use KernelShape::*;
use ParityCombine::{Even, Odd};

/// `(coefficient, shape, power, combine)` terms and the overall factor
/// `num/den · π^p / a^{a_pow}`, possibly times `i`.
struct Formula {
    factor: ExactRational,
    a_pow: u32,
    imaginary: bool,
    half_arg: bool,
    terms: Vec<(i64, KernelShape, u32, ParityCombine)>,
}

fn formula(family: Family, p: u32, reading: Reading) -> Option<Formula> {
    let f = |factor: ExactRational, a_pow: u32, imaginary, half_arg, terms| Formula {
        factor,
        a_pow,
        imaginary,
        half_arg,
        terms,
    };
    Some(match (family, p) {
        (Family::FAlt, 1) => f(int(1), 1, false, false, vec![(1, InvSinh, 1, Odd)]),
        (Family::FAlt, 2) => f(int(1), 2, false, false, vec![(1, CoshOverSinh, 2, Even)]),
        (Family::FAlt, 3) => f(rat(1, 2), 3, false, false, vec![(1, InvSinh, 1, Odd), (2, InvSinh, 3, Odd)]),
        (Family::FAlt, 4) => f(
            rat(1, 6),
            4,
            false,
            false,
            vec![(1, CoshOverSinh, 2, Even), (6, CoshOverSinh, 4, Even)],
        ),
        (Family::GPlain, 2) => f(int(1), 2, false, false, vec![(1, InvSinh, 2, Even)]),
        (Family::GPlain, 3) => f(int(1), 3, false, false, vec![(1, CoshOverSinh, 3, Odd)]),
        (Family::GPlain, 4) => f(
            rat(1, 3),
            4,
            false,
            false,
            vec![(2, InvSinh, 2, Even), (3, InvSinh, 4, Even)],
        ),
        (Family::FOddline, 1) => f(rat(-1, 2), 1, true, true, vec![(1, InvCosh, 1, Even)]),
        (Family::FOddline, 2) => f(rat(-1, 4), 2, true, true, vec![(1, SinhOverCosh, 2, Odd)]),
        (Family::FOddline, 3) => {
            // printed with a^2 in the denominator
            let a_pow = if reading == Reading::Printed { 2 } else { 3 };
            f(rat(-1, 16), a_pow, true, true, vec![(1, InvCosh, 1, Even), (-2, InvCosh, 3, Even)])
        }
        (Family::FOddline, 4) => f(
            rat(-1, 96),
            4,
            true,
            true,
            vec![(1, SinhOverCosh, 2, Odd), (-6, SinhOverCosh, 4, Odd)],
        ),
        (Family::GOddline, 2) => f(rat(-1, 4), 2, false, true, vec![(1, InvCosh, 2, Even)]),
        (Family::GOddline, 3) => f(rat(-1, 8), 3, false, true, vec![(1, SinhOverCosh, 3, Odd)]),
        (Family::GOddline, 4) => f(
            rat(-1, 48),
            4,
            false,
            true,
            vec![(2, InvCosh, 2, Even), (-3, InvCosh, 4, Even)],
        ),
        _ => return None,
    })
}

/// Evaluates the explicit formula for exponents 1..=4. `reading` only
/// matters for `F_oddline` with exponent 3, whose printed denominator has
/// `a^2` where the general layer gives `a^3`.
pub fn eval_corollary(spec: &FamilySpec, weight: &WeightFn, prec: u32, reading: Reading) -> Result<ComplexBF> {
    spec.validate()?;
    if spec.shift.is_some() {
        return Err(domain("explicit low-exponent formulas cover unshifted sums only"));
    }
    let fm = formula(spec.family, spec.exponent, reading)
        .ok_or_else(|| domain(format!("no explicit formula for {spec}")))?;
    let arg = if fm.half_arg {
        (&spec.a * int(2)).recip()
    } else {
        spec.a.recip()
    };
    let w = prec + 40;
    let mut acc = BigFloat::zero(w);
    for (coeff, shape, power, combine) in fm.terms {
        let s = HyperbolicSumSpec::new(weight.clone(), Kernel::new(shape, power, arg.clone()), combine);
        acc += sum_hyperbolic(&s, w)? * coeff;
    }
    let scale = &fm.factor / num_traits::pow(spec.a.clone(), fm.a_pow as usize);
    let v = (acc * to_bigfloat(&scale, w) * pi(w).powi(spec.exponent as i64)).with_prec(prec);
    Ok(if fm.imaginary {
        ComplexBF::from_imag(v)
    } else {
        ComplexBF::from_real(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::eval_rhs_with_reading;

    #[test]
    fn matches_general_layers() {
        let weight: WeightFn = "sech(1/3)^2 + m*sech(1/3)^2".parse().unwrap();
        for family in Family::ALL {
            for p in family.min_exponent()..=4 {
                for a in [int(1), rat(1, 2), int(2)] {
                    let spec = FamilySpec::new(family, p, a);
                    let c = eval_corollary(&spec, &weight, 96, Reading::Alternate).unwrap();
                    let t = eval_rhs_with_reading(&spec, &weight, 96, Reading::Alternate).unwrap();
                    let d = (&c - &t).abs();
                    assert!(d.is_zero() || d.log2_abs() < -88.0, "{spec}");
                }
            }
        }
    }

    #[test]
    fn printed_cubic_oddline_differs_unless_a_is_one() {
        let weight: WeightFn = "sech(1)".parse().unwrap();
        let half = FamilySpec::new(Family::FOddline, 3, rat(1, 2));
        let p = eval_corollary(&half, &weight, 64, Reading::Printed).unwrap();
        let q = eval_corollary(&half, &weight, 64, Reading::Alternate).unwrap();
        assert!((&p - &q).abs().log2_abs() > -4.0);
        let one = FamilySpec::new(Family::FOddline, 3, int(1));
        let p = eval_corollary(&one, &weight, 64, Reading::Printed).unwrap();
        let q = eval_corollary(&one, &weight, 64, Reading::Alternate).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn out_of_range() {
        let weight = WeightFn::one();
        assert!(eval_corollary(&FamilySpec::new(Family::FAlt, 5, int(1)), &weight, 64, Reading::Printed).is_err());
    }
}
