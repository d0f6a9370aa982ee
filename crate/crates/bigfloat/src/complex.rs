use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::BigFloat;

/// Complex number with [`BigFloat`] parts. Both parts are kept at the same
/// precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBF {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ComplexBF {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        let p = re.prec().max(im.prec());
        ComplexBF {
            re: re.with_prec(p),
            im: im.with_prec(p),
        }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBF::new(BigFloat::zero(prec), BigFloat::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        ComplexBF::from_real(BigFloat::one(prec))
    }

    pub fn i(prec: u32) -> Self {
        ComplexBF::new(BigFloat::zero(prec), BigFloat::one(prec))
    }

    pub fn from_real(re: BigFloat) -> Self {
        let p = re.prec();
        ComplexBF::new(re, BigFloat::zero(p))
    }

    /// Purely imaginary value `i * im`.
    pub fn from_imag(im: BigFloat) -> Self {
        let p = im.prec();
        ComplexBF::new(BigFloat::zero(p), im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBF {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexBF {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        ComplexBF {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn scale(&self, k: &BigFloat) -> Self {
        ComplexBF::new(&self.re * k, &self.im * k)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(&self) -> BigFloat {
        let p = self.prec();
        self.with_prec(p + 8).norm_sqr().sqrt().with_prec(p)
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let w = self.with_prec(p + 8);
        let d = w.norm_sqr();
        ComplexBF::new(&w.re / &d, -(&w.im / &d)).with_prec(p)
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            return ComplexBF::one(p);
        }
        let guard = 2 * (64 - n.unsigned_abs().leading_zeros()) + 8;
        let mut base = self.with_prec(p + guard);
        let mut acc = ComplexBF::one(p + guard);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            acc = acc.recip();
        }
        acc.with_prec(p)
    }

    /// sin(x + iy) = sin x cosh y + i cos x sinh y.
    pub fn sin(&self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        ComplexBF::new(&s * &ch, &c * &sh)
    }

    /// cos(x + iy) = cos x cosh y - i sin x sinh y.
    pub fn cos(&self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        ComplexBF::new(&c * &ch, -(&s * &sh))
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        (
            ComplexBF::new(&s * &ch, &c * &sh),
            ComplexBF::new(&c * &ch, -(&s * &sh)),
        )
    }

    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.re.to_sci_string(digits);
        let im = self.im.to_sci_string(digits);
        if let Some(rest) = im.strip_prefix('-') {
            format!("{re}-{rest}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}

impl fmt::Display for ComplexBF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize);
        f.write_str(&self.to_string_digits(digits))
    }
}

impl Neg for ComplexBF {
    type Output = ComplexBF;
    fn neg(self) -> ComplexBF {
        ComplexBF {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &ComplexBF {
    type Output = ComplexBF;
    fn neg(self) -> ComplexBF {
        -self.clone()
    }
}

macro_rules! cbinop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&ComplexBF> for &ComplexBF {
            type Output = ComplexBF;
            fn $method(self, $b: &ComplexBF) -> ComplexBF {
                let $a = self;
                $body
            }
        }
        impl $trait<ComplexBF> for ComplexBF {
            type Output = ComplexBF;
            fn $method(self, rhs: ComplexBF) -> ComplexBF {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ComplexBF> for ComplexBF {
            type Output = ComplexBF;
            fn $method(self, rhs: &ComplexBF) -> ComplexBF {
                (&self).$method(rhs)
            }
        }
        impl $trait<ComplexBF> for &ComplexBF {
            type Output = ComplexBF;
            fn $method(self, rhs: ComplexBF) -> ComplexBF {
                self.$method(&rhs)
            }
        }
    };
}

cbinop!(Add, add, |a, b| ComplexBF::new(&a.re + &b.re, &a.im + &b.im));
cbinop!(Sub, sub, |a, b| ComplexBF::new(&a.re - &b.re, &a.im - &b.im));
cbinop!(Mul, mul, |a, b| ComplexBF::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
cbinop!(Div, div, |a, b| {
    let p = a.prec().max(b.prec());
    let bw = b.with_prec(p + 8);
    let d = bw.norm_sqr();
    let aw = a.with_prec(p + 8);
    ComplexBF::new(
        (&aw.re * &bw.re + &aw.im * &bw.im) / &d,
        (&aw.im * &bw.re - &aw.re * &bw.im) / &d,
    )
    .with_prec(p)
});
