use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::BigFloat;

/// Extra working bits used inside every elementary function.
const GUARD: u32 = 32;

struct ConstCache(Mutex<Option<BigFloat>>);

impl ConstCache {
    const fn new() -> Self {
        ConstCache(Mutex::new(None))
    }

    fn get(&self, prec: u32, compute: impl FnOnce(u32) -> BigFloat) -> BigFloat {
        let mut slot = self.0.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = slot.as_ref() {
            if v.prec() >= prec + 8 {
                return v.with_prec(prec);
            }
        }
        // overshoot so that nearby precisions reuse the cached value
        let v = compute(prec + 64);
        let out = v.with_prec(prec);
        *slot = Some(v);
        out
    }
}

static PI: ConstCache = ConstCache::new();
static LN2: ConstCache = ConstCache::new();
static GAMMA_QUARTER: ConstCache = ConstCache::new();

/// `atan(1/n)` scaled by `2^frac`.
fn atan_inv_fixed(n: u64, frac: u64) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << frac) / n;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &n2;
        if power.is_zero() {
            break;
        }
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// `atanh(1/n)` scaled by `2^frac`.
fn atanh_inv_fixed(n: u64, frac: u64) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << frac) / n;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &n2;
        if power.is_zero() {
            break;
        }
        sum += &power / (2 * k + 1);
        k += 1;
    }
    sum
}

/// π by Machin's formula.
pub fn pi(prec: u32) -> BigFloat {
    PI.get(prec, |w| {
        let frac = (w + GUARD) as u64;
        let v = (atan_inv_fixed(5, frac) << 4u32) - (atan_inv_fixed(239, frac) << 2u32);
        BigFloat::from_fixed(v, frac, w)
    })
}

/// ln 2 = 2 atanh(1/3).
pub fn ln2(prec: u32) -> BigFloat {
    LN2.get(prec, |w| {
        let frac = (w + GUARD) as u64;
        BigFloat::from_fixed(atanh_inv_fixed(3, frac) << 1u32, frac, w)
    })
}

pub fn sqrt2(prec: u32) -> BigFloat {
    BigFloat::from_i64(2, prec + 8).sqrt().with_prec(prec)
}

/// Arithmetic-geometric mean of two positive numbers.
pub fn agm(a: &BigFloat, b: &BigFloat) -> BigFloat {
    let p = a.prec().max(b.prec());
    let w = p + GUARD;
    let mut x = a.with_prec(w);
    let mut y = b.with_prec(w);
    assert!(x.signum() > 0 && y.signum() > 0, "agm needs positive arguments");
    for _ in 0..200 {
        let diff = (&x - &y).abs();
        if diff.is_zero() || diff.log2_abs() < x.log2_abs() - (w as f64 - 4.0) {
            break;
        }
        let nx = (&x + &y).mul_pow2(-1);
        y = (&x * &y).sqrt();
        x = nx;
    }
    x.with_prec(p)
}

/// Γ(1/4) from the lemniscate constant ϖ = π / agm(1, √2):
/// Γ(1/4)² = 2ϖ√(2π).
pub fn gamma_quarter(prec: u32) -> BigFloat {
    GAMMA_QUARTER.get(prec, |w| {
        let wp = w + GUARD;
        let pi = pi(wp);
        let lemniscate = &pi / &agm(&BigFloat::one(wp), &sqrt2(wp));
        let two_pi = pi.mul_pow2(1);
        (lemniscate.mul_pow2(1) * two_pi.sqrt()).sqrt().with_prec(w)
    })
}

fn bits_of(k: i64) -> u32 {
    64 - k.unsigned_abs().leading_zeros()
}

impl BigFloat {
    /// e^x.
    pub fn exp(&self) -> BigFloat {
        let p = self.prec();
        if self.is_zero() {
            return BigFloat::one(p);
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "exp argument out of range: {xf}");
        let k = (xf / std::f64::consts::LN_2).round() as i64;
        let kb = bits_of(k);
        let w = p + GUARD + kb;
        let r = self.with_prec(w) - ln2(w + kb) * BigFloat::from_i64(k, w);
        let frac = (w + 8) as u64;
        let rf = r.to_fixed(frac);
        let one = BigInt::one() << frac;
        let mut sum = one.clone();
        let mut term = one;
        let mut n = 1u64;
        loop {
            term = (term * &rf) >> frac;
            term /= n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        BigFloat::from_fixed(sum, frac, p).mul_pow2(k)
    }

    /// Natural logarithm of a positive number, by Newton iteration on exp.
    pub fn ln(&self) -> BigFloat {
        assert!(self.signum() > 0, "ln of non-positive number");
        let p = self.prec();
        let w = p + GUARD;
        let x = self.with_prec(w);
        let mut y = BigFloat::from_f64(self.log2_abs() * std::f64::consts::LN_2, w);
        // quadratic convergence from ~50 correct bits
        let mut good = 45u32;
        loop {
            let e = y.exp();
            y = &y + (&x - &e) / &e;
            if good >= w {
                break;
            }
            good *= 2;
        }
        y.with_prec(p)
    }

    /// Simultaneous sine and cosine of a real argument.
    pub fn sin_cos(&self) -> (BigFloat, BigFloat) {
        let p = self.prec();
        if self.is_zero() {
            return (BigFloat::zero(p), BigFloat::one(p));
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "sin/cos argument out of range: {xf}");
        let k = (xf / std::f64::consts::FRAC_PI_2).round() as i64;
        let kb = bits_of(k);
        let mut extra = 0u32;
        loop {
            let w = p + GUARD + kb + extra;
            let half_pi = pi(w + kb).mul_pow2(-1);
            let r = self.with_prec(w) - half_pi * BigFloat::from_i64(k, w);
            // near a multiple of π/2 the reduced argument lost leading bits
            let lost = (-r.log2_abs()).max(0.0) as u32;
            if lost > extra + 8 && !r.is_zero() {
                extra = lost + 8;
                continue;
            }
            let (s, c) = sin_cos_small(&r, w);
            let (s, c) = match k.rem_euclid(4) {
                0 => (s, c),
                1 => (c, -s),
                2 => (-s, -c),
                _ => (-c, s),
            };
            return (s.with_prec(p), c.with_prec(p));
        }
    }

    pub fn sin(&self) -> BigFloat {
        self.sin_cos().0
    }

    pub fn cos(&self) -> BigFloat {
        self.sin_cos().1
    }

    /// Simultaneous hyperbolic sine and cosine.
    pub fn sinh_cosh(&self) -> (BigFloat, BigFloat) {
        let p = self.prec();
        if self.is_zero() {
            return (BigFloat::zero(p), BigFloat::one(p));
        }
        let w = p + GUARD;
        if self.log2_abs() < -1.0 {
            // |x| < 1/2: direct series avoids cancellation in (e^x - e^-x)/2
            let lost = (-self.log2_abs()).max(0.0) as u64;
            let frac = (w + 8) as u64 + lost;
            let xf = self.with_prec(w).to_fixed(frac);
            let x2 = (&xf * &xf) >> frac;
            let one = BigInt::one() << frac;
            let mut sh = xf.clone();
            let mut ch = one.clone();
            let mut t_odd = xf;
            let mut t_even = one;
            let mut n = 1u64;
            loop {
                t_even = ((t_even * &x2) >> frac) / ((2 * n - 1) * (2 * n));
                t_odd = ((t_odd * &x2) >> frac) / ((2 * n) * (2 * n + 1));
                if t_even.is_zero() && t_odd.is_zero() {
                    break;
                }
                ch += &t_even;
                sh += &t_odd;
                n += 1;
            }
            return (
                BigFloat::from_fixed(sh, frac, p),
                BigFloat::from_fixed(ch, frac, p),
            );
        }
        let e = self.with_prec(w).exp();
        let ei = e.recip();
        (
            (&e - &ei).mul_pow2(-1).with_prec(p),
            (&e + &ei).mul_pow2(-1).with_prec(p),
        )
    }

    pub fn sinh(&self) -> BigFloat {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> BigFloat {
        self.sinh_cosh().1
    }
}

/// Taylor series for |r| <= ~π/4 in fixed point with `w` bits.
fn sin_cos_small(r: &BigFloat, w: u32) -> (BigFloat, BigFloat) {
    let frac = (w + 8) as u64;
    let rf = r.to_fixed(frac);
    let r2 = (&rf * &rf) >> frac;
    let one = BigInt::one() << frac;
    let mut s = rf.clone();
    let mut c = one.clone();
    let mut t_odd = rf;
    let mut t_even = one;
    let mut n = 1u64;
    loop {
        t_even = -(((t_even * &r2) >> frac) / ((2 * n - 1) * (2 * n)));
        t_odd = -(((t_odd * &r2) >> frac) / ((2 * n) * (2 * n + 1)));
        if t_even.is_zero() && t_odd.is_zero() {
            break;
        }
        c += &t_even;
        s += &t_odd;
        n += 1;
    }
    (
        BigFloat::from_fixed(s, frac, w),
        BigFloat::from_fixed(c, frac, w),
    )
}
