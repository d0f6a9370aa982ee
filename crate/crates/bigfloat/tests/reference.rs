//! Values checked against independently computed 80-digit references.

use l2eis_bigfloat::{agm, gamma_quarter, ln2, pi, sqrt2, BigFloat, ComplexBF};
use proptest::prelude::*;

const PI: &str = "3.141592653589793238462643383279502884197169399375105820974944592307816406286209";
const LN2: &str = "0.69314718055994530941723212145817656807550013436025525412068000949339362196969472";
const GAMMA_QUARTER: &str =
    "3.6256099082219083119306851558676720029951676828800654674333779995699192435387291";
const SQRT2: &str = "1.414213562373095048801688724209698078569671875376948073176679737990732478462107";
const E: &str = "2.7182818284590452353602874713526624977572470936999595749669676277240766303535476";
const SIN_1: &str = "0.84147098480789650665250232163029899962256306079837106567275170999191040439123967";
const COS_1: &str = "0.54030230586813971740093660744297660373231042061792222767009725538110039477447176";
const SINH_7: &str = "548.31612327324652237375611757601851157979633055454285386444921232134993992567191";
const EXP_M50: &str =
    "1.9287498479639177830173428165270125747528326512302629108978091038205116249796466e-22";
const SIN_100: &str = "-0.5063656411097587936565576104597854320650327212906573234433924735943579134194767";
const AGM_1_SQRT2: &str =
    "1.1981402347355922074399224922803238782272126632156515582636749529464052141439157";

/// 80 decimal digits cover about 265 bits, so compare at 240.
const P: u32 = 240;

fn reference(s: &str) -> BigFloat {
    BigFloat::parse_decimal(s, 320).unwrap()
}

fn assert_close(got: &BigFloat, want: &str, bits: u32) {
    let want = reference(want);
    let err = (&got.with_prec(320) - &want).abs();
    let rel = if err.is_zero() {
        f64::NEG_INFINITY
    } else {
        err.log2_abs() - want.log2_abs()
    };
    assert!(
        rel < -(bits as f64),
        "relative error 2^{rel:.1} exceeds 2^-{bits}: got {got}"
    );
}

#[test]
fn constants() {
    assert_close(&pi(P), PI, P - 2);
    assert_close(&ln2(P), LN2, P - 2);
    assert_close(&sqrt2(P), SQRT2, P - 2);
    assert_close(&gamma_quarter(P), GAMMA_QUARTER, P - 4);
    assert_close(
        &agm(&BigFloat::one(P), &sqrt2(P)),
        AGM_1_SQRT2,
        P - 4,
    );
}

#[test]
fn constants_at_low_then_high_precision() {
    // the cache must not hand back a low-precision value for a later request
    let lo = pi(70);
    assert_close(&lo, PI, 68);
    assert_close(&pi(P), PI, P - 2);
}

#[test]
fn elementary_functions() {
    let one = BigFloat::one(P);
    assert_close(&one.exp(), E, P - 3);
    let (s, c) = one.sin_cos();
    assert_close(&s, SIN_1, P - 3);
    assert_close(&c, COS_1, P - 3);
    assert_close(&BigFloat::from_i64(7, P).sinh(), SINH_7, P - 4);
    assert_close(&BigFloat::from_i64(-50, P).exp(), EXP_M50, P - 8);
    assert_close(&BigFloat::from_i64(100, P).sin(), SIN_100, P - 8);
}

#[test]
fn sin_near_multiple_of_pi_keeps_relative_accuracy() {
    // sin(π + δ) = -sin δ, and δ is far below the working ulp of π
    let p = pi(P);
    let delta = BigFloat::one(P).mul_pow2(-150);
    let s = (&p.with_prec(P + 200) + &delta).with_prec(P + 200).sin();
    let want = -delta.sin();
    let rel = (&s - &want).abs().log2_abs() - want.log2_abs();
    // input only carries P+200 bits of π so the result is good to ~P+50 bits
    assert!(rel < -40.0, "rel err 2^{rel}");
}

#[test]
fn tiny_sinh_is_relatively_accurate() {
    let x = BigFloat::one(P).mul_pow2(-400);
    let s = x.sinh();
    let rel = (&s - &x).abs().log2_abs() - x.log2_abs();
    // sinh x - x = x³/6, relative 2^-800/6
    assert!(rel < -(P as f64) + 2.0 || (&s - &x).is_zero());
}

#[test]
fn ln_inverts_exp() {
    let x = BigFloat::parse_decimal("12.375", P).unwrap();
    let back = x.ln().exp();
    let rel = (&back - &x).abs().log2_abs() - x.log2_abs();
    assert!(rel < -(P as f64) + 8.0);
    assert_close(&BigFloat::from_i64(2, P).ln(), LN2, P - 4);
}

#[test]
fn complex_sin_matches_parts() {
    // sin(i) = i sinh 1
    let z = ComplexBF::i(P);
    let s = z.sin();
    assert!(s.re.is_zero());
    let want = BigFloat::one(P).sinh();
    assert!((&s.im - &want).abs().log2_abs() < -(P as f64) + 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pythagorean_identity(x in -40.0f64..40.0) {
        let x = BigFloat::from_f64(x, 160);
        let (s, c) = x.sin_cos();
        let one = s.sqr() + c.sqr();
        let err = (&one - &BigFloat::one(160)).abs();
        prop_assert!(err.is_zero() || err.log2_abs() < -150.0);
    }

    #[test]
    fn hyperbolic_identity(x in -30.0f64..30.0) {
        let x = BigFloat::from_f64(x, 160);
        let (s, c) = x.sinh_cosh();
        let one = c.sqr() - s.sqr();
        let err = (&one - &BigFloat::one(160)).abs();
        // cancellation costs about 2|x|/ln 2 bits
        let budget = 150.0 - 2.0 * x.to_f64().abs() * std::f64::consts::LOG2_E;
        prop_assert!(err.is_zero() || err.log2_abs() < -budget);
    }

    #[test]
    fn exp_is_additive(a in -20.0f64..20.0, b in -20.0f64..20.0) {
        let a = BigFloat::from_f64(a, 160);
        let b = BigFloat::from_f64(b, 160);
        let lhs = (&a + &b).exp();
        let rhs = a.exp() * b.exp();
        let rel = (&lhs - &rhs).abs().log2_abs() - lhs.log2_abs();
        prop_assert!((&lhs - &rhs).is_zero() || rel < -150.0);
    }

    #[test]
    fn division_inverts_multiplication(a in -1e6f64..1e6, b in 1e-3f64..1e3) {
        let a = BigFloat::from_f64(a, 128);
        let b = BigFloat::from_f64(b, 128);
        let q = &(&a * &b) / &b;
        let err = (&q - &a).abs();
        prop_assert!(err.is_zero() || err.log2_abs() - a.log2_abs() < -124.0);
    }

    #[test]
    fn f64_conversion_roundtrip(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(BigFloat::from_f64(x, 64).to_f64(), x);
    }

    #[test]
    fn sqrt_squares_back(x in 1e-10f64..1e10) {
        let x = BigFloat::from_f64(x, 200);
        let r = x.sqrt();
        let err = (&r.sqr() - &x).abs();
        prop_assert!(err.is_zero() || err.log2_abs() - x.log2_abs() < -196.0);
    }
}
