//! Single hyperbolic sums `Σ_{m>=1} combine(w)(m) · kernel(m)` at a chosen
//! binary precision, and the double-series right-hand sides built on them.

mod corollary;
mod family;
mod partial_fraction;

pub use corollary::eval_corollary;
pub use family::{
    eval_rhs, eval_rhs_shifted, eval_rhs_with_reading, theorem_layer, Family, FamilySpec, Reading,
    RhsLayer, Shift,
};
pub use partial_fraction::eval_partial_fraction;

use std::fmt;

use l2eis_bigfloat::BigFloat;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::weight::{Decay, Hyp, Parity, WeightFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    One,
    /// `1/sinh^p`
    InvSinh,
    /// `cosh/sinh^p`
    CoshOverSinh,
    /// `1/cosh^p`
    InvCosh,
    /// `sinh/cosh^p`
    SinhOverCosh,
}

/// `shape` applied at `(c m + d) π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub shape: KernelShape,
    pub power: u32,
    pub c: ExactRational,
    pub d: ExactRational,
}

impl Kernel {
    pub fn new(shape: KernelShape, power: u32, c: ExactRational) -> Self {
        Kernel {
            shape,
            power,
            c,
            d: ExactRational::zero(),
        }
    }

    pub fn one() -> Self {
        Kernel::new(KernelShape::One, 0, ExactRational::one())
    }

    pub fn with_offset(mut self, d: ExactRational) -> Self {
        self.d = d;
        self
    }

    /// The kernel as a product of weight factors.
    pub fn as_weight(&self) -> WeightFn {
        let f = |h: Hyp, p: u32| WeightFn::factor(h, self.c.clone(), self.d.clone(), p);
        let p = self.power;
        match self.shape {
            KernelShape::One => WeightFn::one(),
            KernelShape::InvSinh => f(Hyp::Csch, p),
            KernelShape::InvCosh => f(Hyp::Sech, p),
            KernelShape::CoshOverSinh => f(Hyp::Coth, 1).mul(&f(Hyp::Csch, p.saturating_sub(1))),
            KernelShape::SinhOverCosh => f(Hyp::Tanh, 1).mul(&f(Hyp::Sech, p.saturating_sub(1))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = if self.d.is_zero() {
            format!("{}·mπ", self.c)
        } else {
            format!("({}·m + {})π", self.c, self.d)
        };
        match self.shape {
            KernelShape::One => write!(f, "1"),
            KernelShape::InvSinh => write!(f, "1/sinh^{}({arg})", self.power),
            KernelShape::CoshOverSinh => write!(f, "cosh/sinh^{}({arg})", self.power),
            KernelShape::InvCosh => write!(f, "1/cosh^{}({arg})", self.power),
            KernelShape::SinhOverCosh => write!(f, "sinh/cosh^{}({arg})", self.power),
        }
    }
}

/// How the weight enters the `m`-th term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityCombine {
    /// `w(m)`
    Single,
    /// `w(m) + w(-m)`
    Even,
    /// `w(m) - w(-m)`
    Odd,
    /// `w(m-1) + w(-m)`
    Shifted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicSumSpec {
    pub weight: WeightFn,
    pub kernel: Kernel,
    pub combine: ParityCombine,
}

impl HyperbolicSumSpec {
    pub fn new(weight: WeightFn, kernel: Kernel, combine: ParityCombine) -> Self {
        HyperbolicSumSpec {
            weight,
            kernel,
            combine,
        }
    }

    fn vanishes(&self) -> bool {
        if self.weight.is_zero() {
            return true;
        }
        matches!(
            (self.combine, self.weight.parity()),
            (ParityCombine::Even, Some(Parity::Odd)) | (ParityCombine::Odd, Some(Parity::Even))
        )
    }

    fn combined(&self, m: i64, prec: u32) -> Result<BigFloat> {
        let w = &self.weight;
        Ok(match self.combine {
            ParityCombine::Single => w.eval_big(m, prec)?,
            ParityCombine::Even => w.eval_big(m, prec)? + w.eval_big(-m, prec)?,
            ParityCombine::Odd => w.eval_big(m, prec)? - w.eval_big(-m, prec)?,
            ParityCombine::Shifted => w.eval_big(m - 1, prec)? + w.eval_big(-m, prec)?,
        })
    }

    /// Bound on `|term(m)|`, valid from `m = 2` on.
    pub fn decay(&self) -> Decay {
        let wd = self.weight.decay();
        let extra = match self.combine {
            ParityCombine::Single => 0.0,
            ParityCombine::Even | ParityCombine::Odd => std::f64::consts::LN_2,
            ParityCombine::Shifted => std::f64::consts::LN_2 + wd.rho,
        };
        let combined = Decay {
            ln_c: wd.ln_c + extra,
            ..wd
        };
        combined.times(&self.kernel.as_weight().decay())
    }
}

/// Terms are summed from `m = 1` until the tail bound drops below
/// `2^-(P+8)` relative to the partial sum; at least eight terms are taken.
pub const MIN_TERMS: i64 = 8;
const MAX_TERMS: i64 = 1_000_000;

pub fn sum_hyperbolic(spec: &HyperbolicSumSpec, prec: u32) -> Result<BigFloat> {
    if prec < 16 {
        return Err(Error::Precision(format!("precision {prec} is below 16 bits")));
    }
    if spec.vanishes() {
        return Ok(BigFloat::zero(prec));
    }
    let decay = spec.decay();
    if decay.rho.is_nan() || decay.rho <= 0.0 {
        return Err(Error::NonConvergence(format!(
            "terms of Σ ({}) · {} do not decay exponentially",
            spec.weight, spec.kernel
        )));
    }
    let kernel = spec.kernel.as_weight();
    let w = prec + 40;
    let mut acc = BigFloat::zero(w);
    for m in 1..=MAX_TERMS {
        let t = spec.combined(m, w)? * kernel.eval_big(m, w)?;
        acc += t;
        if m >= MIN_TERMS {
            let target = if acc.is_zero() {
                -(prec as f64) - 64.0
            } else {
                acc.log2_abs() - prec as f64 - 8.0
            };
            if decay.log2_tail(m as u64) <= target {
                return Ok(acc.with_prec(prec));
            }
        }
    }
    Err(Error::NonConvergence(format!(
        "no convergence after {MAX_TERMS} terms"
    )))
}
