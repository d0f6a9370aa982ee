//! Brute-force lattice summation of the double series in double precision.
//!
//! The inner sum over `n` pairs `n` with `-n` (plain line) or with `-n-1`
//! (odd line), so each pair is `h(n) ± conj(h(n))` with `h(n) = (x + i a z_n)^{-p}`.
//! The inner tail is estimated by one Euler averaging step for `(-1)^n`
//! sums and by Euler–Maclaurin otherwise; the outer tail over `|m| > Nm`
//! is bounded through the weight's decay descriptor.
//!
//! Only the weight module is used here, never the transformation formulas.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rational::{int, to_f64};
use crate::series::{Family, FamilySpec};
use crate::weight::WeightFn;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeTruncation {
    pub nm: u64,
    pub nn: u64,
    pub tail_correction: bool,
}

impl LatticeTruncation {
    pub fn new(nm: u64, nn: u64) -> Result<Self> {
        if nm < 8 || nn < 8 {
            return Err(domain(format!("truncation needs Nm, Nn >= 8, got ({nm}, {nn})")));
        }
        Ok(LatticeTruncation {
            nm,
            nn,
            tail_correction: true,
        })
    }

    pub fn without_tail_correction(mut self) -> Self {
        self.tail_correction = false;
        self
    }

    pub fn scaled(&self, factor: u64) -> Self {
        LatticeTruncation {
            nm: self.nm * factor,
            nn: self.nn * factor,
            ..*self
        }
    }

    /// Inner pairs evaluated per `m`, plus the `n = 0` term.
    pub fn terms(&self) -> u64 {
        (2 * self.nm + 1).saturating_mul(self.nn + 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub terms: u64,
    pub truncation: LatticeTruncation,
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, v: Complex64) {
        fn step(s: &mut f64, c: &mut f64, v: f64) {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
        step(&mut self.sum.re, &mut self.comp.re, v.re);
        step(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

struct Inner {
    p: i32,
    alternating: bool,
    oddline: bool,
    a: f64,
}

impl Inner {
    fn new(spec: &FamilySpec) -> Self {
        Inner {
            p: spec.exponent as i32,
            alternating: spec.family.alternating(),
            oddline: spec.family.oddline(),
            a: to_f64(&spec.a),
        }
    }

    /// `(A, B)` with `x + i a z_n = A + B n` for the non-negative member of
    /// each pair.
    fn line(&self, x: f64) -> (Complex64, Complex64) {
        if self.oddline {
            (Complex64::new(x, self.a), Complex64::new(0.0, 2.0 * self.a))
        } else {
            (Complex64::new(x, 0.0), Complex64::new(0.0, self.a))
        }
    }

    fn h(&self, a0: Complex64, b: Complex64, n: f64) -> Complex64 {
        (a0 + b * n).powi(-self.p)
    }

    /// Pair value for index `n` (`n >= 1` on the plain line, `n >= 0` on the odd one).
    fn pair(&self, a0: Complex64, b: Complex64, n: u64) -> Complex64 {
        let v = self.h(a0, b, n as f64);
        let combined = if self.alternating && self.oddline {
            // (-1)^{-n-1} = -(-1)^n
            v - v.conj()
        } else {
            v + v.conj()
        };
        if self.alternating && n % 2 == 1 {
            -combined
        } else {
            combined
        }
    }

    /// Inner sum at `x` with its truncation error estimate.
    fn sum(&self, x: f64, trunc: &LatticeTruncation) -> (Complex64, f64) {
        let (a0, b) = self.line(x);
        let mut acc = Compensated::default();
        let first = if self.oddline {
            0
        } else {
            acc.add(Complex64::new(x, 0.0).powi(-self.p));
            1
        };
        let last = trunc.nn;
        for n in first..=last {
            acc.add(self.pair(a0, b, n));
        }
        let next = self.pair(a0, b, last + 1);
        if self.alternating {
            if trunc.tail_correction {
                acc.add(next * 0.5);
                let after = self.pair(a0, b, last + 2);
                (acc.value(), ((next + after) * 0.5).norm())
            } else {
                (acc.value(), next.norm())
            }
        } else {
            // Σ_{n > N} h(n) ≈ ∫_N^∞ h - h(N)/2 - h'(N)/12 + h'''(N)/720, plus conjugate
            let p = self.p as f64;
            let u = a0 + b * last as f64;
            let integral = u.powi(1 - self.p) / (b * (p - 1.0));
            if !trunc.tail_correction {
                return (acc.value(), 2.0 * integral.norm());
            }
            let h0 = u.powi(-self.p);
            let h1 = -b * p * u.powi(-self.p - 1);
            let h3 = -b * b * b * (p * (p + 1.0) * (p + 2.0)) * u.powi(-self.p - 3);
            let tail = integral - h0 * 0.5 - h1 / 12.0 + h3 / 720.0;
            acc.add(tail + tail.conj());
            let h5 = -b.powi(5) * (p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0)) * u.powi(-self.p - 5);
            (acc.value(), 2.0 * h5.norm() / 30240.0)
        }
    }

    /// Upper bound for `|inner sum|` at `|x| >= x_abs`.
    fn bound(&self, x_abs: f64) -> f64 {
        if self.p == 1 {
            1.0 / x_abs + std::f64::consts::PI / (2.0 * self.a.abs())
        } else {
            x_abs.powi(-self.p) + std::f64::consts::PI * x_abs.powi(1 - self.p) / self.a.abs()
        }
    }
}

fn check(spec: &FamilySpec, weight: &WeightFn) -> Result<()> {
    spec.validate()?;
    if !weight.decays() {
        let need = match spec.family {
            Family::FAlt | Family::FOddline => "f(m) = o(1)",
            _ if spec.exponent == 2 => "g(m) = o(1/m)",
            _ => "g(m) = o(1)",
        };
        return Err(Error::Admissibility(format!("`{weight}` does not satisfy {need}")));
    }
    Ok(())
}

/// Bound on the terms with `|m| > nm`.
fn outer_tail(spec: &FamilySpec, weight: &WeightFn, inner: &Inner, nm: u64) -> f64 {
    let (b, c) = spec.affine();
    let (b, c) = (to_f64(&b).abs(), to_f64(&c).abs());
    let x_min = (b * (nm + 1) as f64 - c).max(f64::MIN_POSITIVE);
    2.0 * weight.decay().tail(nm) * inner.bound(x_min)
}

/// Partial double sum over `|m| <= Nm` (skipping `b m + c = 0`) with
/// symmetric inner truncation `Nn`.
pub fn eval_double_sum(
    spec: &FamilySpec,
    weight: &WeightFn,
    trunc: &LatticeTruncation,
    budget: u64,
) -> Result<OracleResult> {
    check(spec, weight)?;
    LatticeTruncation::new(trunc.nm, trunc.nn)?;
    let terms = trunc.terms();
    if terms > budget {
        return Err(Error::Budget(format!(
            "{terms} lattice terms requested, budget is {budget}"
        )));
    }
    let inner = Inner::new(spec);
    let (b, c) = spec.affine();
    let nm = trunc.nm as i64;
    let per_m: Vec<Result<(Complex64, f64)>> = (-nm..=nm)
        .into_par_iter()
        .map(|m| {
            let x = &b * int(m) + &c;
            if x.is_zero() {
                return Ok((Complex64::zero(), 0.0));
            }
            let wm = weight.eval_f64(m)?;
            if wm == 0.0 {
                return Ok((Complex64::zero(), 0.0));
            }
            let (v, err) = inner.sum(to_f64(&x), trunc);
            Ok((v * wm, err * wm.abs()))
        })
        .collect();
    let mut acc = Compensated::default();
    let mut err = 0.0;
    let mut magnitude = 0.0;
    for r in per_m {
        let (v, e) = r?;
        acc.add(v);
        err += e;
        magnitude += v.norm();
    }
    let rounding = 8.0 * f64::EPSILON * magnitude * (trunc.nn as f64).sqrt().max(1.0);
    let tail = outer_tail(spec, weight, &inner, trunc.nm);
    Ok(OracleResult {
        value: acc.value(),
        error_estimate: err + tail + rounding,
        terms,
        truncation: *trunc,
    })
}

/// Picks `Nm` from the outer tail bound, then refines `Nn` by factors of 4
/// until the error estimate is below `tol` or the budget runs out.
pub fn eval_double_sum_auto(spec: &FamilySpec, weight: &WeightFn, tol: f64, budget: u64) -> Result<OracleResult> {
    check(spec, weight)?;
    let inner = Inner::new(spec);
    let mut nm = 8;
    while outer_tail(spec, weight, &inner, nm) > tol / 4.0 {
        nm += 8;
        if nm > 100_000 {
            return Err(Error::NonConvergence(format!("outer tail of `{weight}` does not drop below {tol:e}")));
        }
    }
    let mut trunc = LatticeTruncation::new(nm, 256)?;
    loop {
        if trunc.terms() > budget {
            return Err(Error::Budget(format!(
                "error estimate still above {tol:e} at the {budget}-term budget"
            )));
        }
        let r = eval_double_sum(spec, weight, &trunc, budget)?;
        if r.error_estimate <= tol / 2.0 {
            return Ok(r);
        }
        trunc.nn *= 4;
    }
}
