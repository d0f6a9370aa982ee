//! The double series as `Σ_{m ∈ Z} w(m) · K(b m + c)`, where the inner sum
//! over `n` is a derivative of `π csc`, `π cot`, `π sec` or `π tan` evaluated
//! on the imaginary axis.
//!
//! With `s = x i/a` one has `x + a n i = a i (n - s)`, so
//! `Σ_n (-1)^n/(x+ani)^p = -(ai)^{-p}/(p-1)! · D^{p-1}[π csc(πs)]`, and the
//! same with `cot` for the non-alternating sum. On the odd line
//! `s = x i/(2a)` and `Σ_n (-1)^n/(x+a(2n+1)i)^p = (2ai)^{-p}/(p-1)! · D^{p-1}[π sec(πs)]`,
//! again with `tan` for the plain sum.

use l2eis_bigfloat::{pi, BigFloat, ComplexBF};
use num_traits::Zero;

use super::FamilySpec;
use crate::coeff::factorial;
use crate::error::{Error, Result};
use crate::rational::{int, to_bigfloat, to_f64, ExactRational};
use crate::trig::{deriv_formula, TrigKind};
use crate::weight::WeightFn;

const MAX_TERMS: i64 = 1_000_000;

struct InnerKernel {
    kind: TrigKind,
    order: u32,
    /// `x ↦ s = x · scale · i`
    scale: ExactRational,
    constant: ComplexBF,
}

impl InnerKernel {
    fn new(spec: &FamilySpec, w: u32) -> Self {
        let p = spec.exponent;
        let (scale, sign) = if spec.family.oddline() {
            ((&spec.a * int(2)).recip(), 1)
        } else {
            (spec.a.recip(), -1)
        };
        // (scale)^p (-i)^p π / (p-1)!, times the sign above
        let mag = to_bigfloat(&num_traits::pow(scale.clone(), p as usize), w) * pi(w)
            / BigFloat::from_bigint(&factorial(p - 1), w);
        let mag = if sign < 0 { -mag } else { mag };
        let constant = match p % 4 {
            0 => ComplexBF::from_real(mag),
            1 => ComplexBF::from_imag(-mag),
            2 => ComplexBF::from_real(-mag),
            _ => ComplexBF::from_imag(mag),
        };
        InnerKernel {
            kind: spec.family.trig_kind(),
            order: p - 1,
            scale,
            constant,
        }
    }

    fn eval(&self, x: &ExactRational, w: u32) -> Result<ComplexBF> {
        let s = ComplexBF::from_imag(to_bigfloat(&(x * &self.scale), w));
        Ok(&self.constant * &deriv_formula(self.kind, self.order, &s)?)
    }

    /// Exponential decay rate of `|K(b m + c)|` in `|m|`.
    fn rho(&self, b: &ExactRational) -> f64 {
        let base = std::f64::consts::PI * to_f64(&(b * &self.scale)).abs();
        match self.kind {
            TrigKind::Cot | TrigKind::Tan if self.order == 0 => 0.0,
            TrigKind::Cot | TrigKind::Tan => 2.0 * base,
            TrigKind::CscOddPower(m) => (2 * m - 1) as f64 * base,
            TrigKind::Sec => base,
        }
    }
}

/// Sums until the geometric tail estimate from the observed terms drops
/// below `2^-(P+8)` of the partial sum.
pub fn eval_partial_fraction(spec: &FamilySpec, weight: &WeightFn, prec: u32) -> Result<ComplexBF> {
    spec.validate()?;
    if prec < 16 {
        return Err(Error::Precision(format!("precision {prec} is below 16 bits")));
    }
    let w = prec + 40;
    let kernel = InnerKernel::new(spec, w);
    let (b, c) = spec.affine();
    let wd = weight.decay();
    let rho = wd.rho + kernel.rho(&b);
    if weight.is_zero() {
        return Ok(ComplexBF::zero(prec));
    }
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::NonConvergence(format!(
            "terms of the m-sum for `{weight}` do not decay exponentially"
        )));
    }
    let term = |m: i64| -> Result<Option<ComplexBF>> {
        let x = &b * int(m) + &c;
        if x.is_zero() {
            return Ok(None);
        }
        let k = kernel.eval(&x, w)?;
        Ok(Some(k.scale(&weight.eval_big(m, w)?)))
    };
    let mut acc = term(0)?.unwrap_or_else(|| ComplexBF::zero(w));
    for m in 1..=MAX_TERMS {
        let mut mag = f64::NEG_INFINITY;
        for t in [term(m)?, term(-m)?].into_iter().flatten() {
            mag = mag.max(t.abs().log2_abs());
            acc = &acc + &t;
        }
        if m >= super::MIN_TERMS {
            let m_f = m as f64;
            let q_ln = wd.deg as f64 * ((m_f + 1.0) / m_f).ln() - rho;
            if q_ln < 0.0 {
                let tail = mag + 1.0 + (q_ln - (-q_ln.exp()).ln_1p()) / std::f64::consts::LN_2;
                let target = if acc.is_zero() {
                    -(prec as f64) - 64.0
                } else {
                    acc.abs().log2_abs() - prec as f64 - 8.0
                };
                if tail <= target {
                    return Ok(acc.with_prec(prec));
                }
            }
        }
    }
    Err(Error::NonConvergence(format!("no convergence after {MAX_TERMS} terms")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::{eval_rhs_with_reading, Family, Reading};

    #[test]
    fn agrees_with_coefficient_layers() {
        let weight: WeightFn = "sech(1/3)^2 + m*sech(1/3)^2".parse().unwrap();
        for family in Family::ALL {
            for p in family.min_exponent()..=6 {
                for a in [int(1), rat(1, 2), int(2)] {
                    let spec = FamilySpec::new(family, p, a);
                    let pf = eval_partial_fraction(&spec, &weight, 96).unwrap();
                    let th = eval_rhs_with_reading(&spec, &weight, 96, Reading::Alternate).unwrap();
                    let d = (&pf - &th).abs();
                    assert!(d.is_zero() || d.log2_abs() < -80.0, "{spec}: {pf} vs {th}");
                }
            }
        }
    }
}
