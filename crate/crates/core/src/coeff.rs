//! Weak-composition power sums and the coefficients `A_{k,m}(l)`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Result};
use crate::rational::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoeffIndex {
    pub k: u32,
    pub m: u32,
    pub l: u32,
}

impl CoeffIndex {
    pub fn new(k: u32, m: u32, l: u32) -> Result<Self> {
        if m < 1 {
            return Err(domain(format!("A_(k,m)(l) needs m >= 1, got m = {m}")));
        }
        if l > k {
            return Err(domain(format!("A_(k,m)(l) needs l <= k, got k = {k}, l = {l}")));
        }
        Ok(CoeffIndex { k, m, l })
    }
}

pub fn factorial(n: u32) -> BigInt {
    (2..=n as u64).fold(BigInt::one(), |acc, i| acc * i)
}

/// `(hi)! / (lo)!` for `lo <= hi`.
pub fn falling_factorial_ratio(hi: u32, lo: u32) -> BigInt {
    debug_assert!(lo <= hi);
    ((lo as u64 + 1)..=hi as u64).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient with the convention `C(n, k) = 0` for `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Calls `f` on every weak composition of `total` into `parts` parts, in
/// lexicographic order of `(r_0, ..., r_{parts-1})`.
pub fn for_each_weak_composition(total: u32, parts: usize, mut f: impl FnMut(&[u32])) {
    assert!(parts >= 1);
    let mut r = vec![0u32; parts];
    r[parts - 1] = total;
    loop {
        f(&r);
        // successor: move one unit from the last nonzero slot (past r_0) one
        // step left, and park the rest of that slot at the end
        let Some(j) = (1..parts).rev().find(|&j| r[j] > 0) else {
            return;
        };
        let rest = r[j] - 1;
        r[j - 1] += 1;
        r[j] = 0;
        r[parts - 1] = rest;
    }
}

/// `Σ_{|r|_l = k-l} Π_{h=0}^{l} (2m+2h-1)^{2 r_h}` as an integer.
pub fn composition_power_sum_int(k: u32, l: u32, m: u32) -> Result<BigInt> {
    if m < 1 {
        return Err(domain(format!("power sum needs m >= 1, got {m}")));
    }
    if l > k {
        return Err(domain(format!("power sum needs l <= k, got k = {k}, l = {l}")));
    }
    let total = k - l;
    let parts = l as usize + 1;
    // squares[h][e] = (2m+2h-1)^(2e)
    let squares: Vec<Vec<BigInt>> = (0..parts)
        .map(|h| {
            let b = BigInt::from(2 * m as u64 + 2 * h as u64 - 1);
            let b2 = &b * &b;
            let mut row = Vec::with_capacity(total as usize + 1);
            let mut acc = BigInt::one();
            for _ in 0..=total {
                row.push(acc.clone());
                acc *= &b2;
            }
            row
        })
        .collect();
    let mut sum = BigInt::zero();
    for_each_weak_composition(total, parts, |r| {
        let mut prod = BigInt::one();
        for (h, &e) in r.iter().enumerate() {
            if e > 0 {
                prod *= &squares[h][e as usize];
            }
        }
        sum += prod;
    });
    Ok(sum)
}

pub fn composition_power_sum(k: u32, l: u32, m: u32) -> Result<ExactRational> {
    composition_power_sum_int(k, l, m).map(BigRational::from_integer)
}

fn sign(e: u32) -> i32 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `A_{k,m}(l) = (-1)^{k-l} (2m+2l-2)!/(2m-2)! · S_m(k,l)`.
pub fn coefficient_a_int(idx: CoeffIndex) -> Result<BigInt> {
    let CoeffIndex { k, m, l } = idx;
    let s = composition_power_sum_int(k, l, m)?;
    let f = falling_factorial_ratio(2 * m + 2 * l - 2, 2 * m - 2);
    Ok(s * f * sign(k - l))
}

#[allow(non_snake_case)]
pub fn coefficient_A(idx: CoeffIndex) -> ExactRational {
    BigRational::from_integer(coefficient_a_int(idx).expect("index validated"))
}

type Memo = RwLock<HashMap<(u32, u32, u32), BigInt>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn recurrence(k: u32, m: u32, l: i64) -> BigInt {
    if l < 0 || l > k as i64 {
        return BigInt::zero();
    }
    let l = l as u32;
    if k == 0 {
        return BigInt::one();
    }
    if let Some(v) = memo().read().unwrap_or_else(|e| e.into_inner()).get(&(k, m, l)) {
        return v.clone();
    }
    let (m64, l64) = (m as i64, l as i64);
    let up = recurrence(k - 1, m, l64 - 1) * ((2 * m64 + 2 * l64 - 3) * (2 * m64 + 2 * l64 - 2));
    let odd = 2 * m64 + 2 * l64 - 1;
    let same = recurrence(k - 1, m, l64) * (odd * odd);
    let v = up - same;
    memo()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert((k, m, l), v.clone());
    v
}

/// Same coefficient, from
/// `A_{k,m}(l) = (2m+2l-3)(2m+2l-2) A_{k-1,m}(l-1) - (2m+2l-1)^2 A_{k-1,m}(l)`
/// with `A_{0,m}(0) = 1` and zero outside `0..=k`.
#[allow(non_snake_case)]
pub fn coefficient_A_recurrence(idx: CoeffIndex) -> ExactRational {
    BigRational::from_integer(recurrence(idx.k, idx.m, idx.l as i64))
}

fn a1(k: u32, l: u32) -> BigInt {
    recurrence(k, 1, l as i64)
}

fn check_kl(k: u32, l: u32) -> Result<()> {
    if k < 1 || l < 1 || l > k {
        return Err(domain(format!("coefficient needs 1 <= l <= k, got k = {k}, l = {l}")));
    }
    Ok(())
}

/// `a_{k,l}` with the factor `π^{2k}/a^{2k}` removed:
/// `(2l-1)(-1)^{k+l} A_{k-1,1}(l-1) / (2k-1)!`.
pub fn a_coeff_norm(k: u32, l: u32) -> Result<ExactRational> {
    check_kl(k, l)?;
    let num = a1(k - 1, l - 1) * (2 * l as i64 - 1) * sign(k + l);
    Ok(BigRational::new(num, factorial(2 * k - 1)))
}

/// `b_{k,l}` with the factor `π^{2k}/a^{2k}` removed:
/// `(-1)^l/(2k-1)! Σ_{j=l}^{k} {C(2k,2j)/(2l) - C(2k,2j+1)(2l+1)/(2l)} (-1)^j A_{j,1}(l)`.
pub fn b_coeff_norm(k: u32, l: u32) -> Result<ExactRational> {
    check_kl(k, l)?;
    let two_l = BigInt::from(2 * l);
    let mut sum = BigRational::zero();
    for j in l..=k {
        let bracket = BigRational::new(
            binomial(2 * k, 2 * j) - binomial(2 * k, 2 * j + 1) * (2 * l + 1),
            two_l.clone(),
        );
        sum += bracket * BigRational::from_integer(a1(j, l) * sign(j));
    }
    Ok(sum * BigRational::new(BigInt::from(sign(l)), factorial(2 * k - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn idx(k: u32, m: u32, l: u32) -> CoeffIndex {
        CoeffIndex::new(k, m, l).unwrap()
    }

    #[test]
    fn compositions_in_lex_order() {
        let mut seen = Vec::new();
        for_each_weak_composition(2, 3, |r| seen.push(r.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
        let mut n = 0;
        for_each_weak_composition(0, 4, |_| n += 1);
        assert_eq!(n, 1);
        let mut n = 0;
        for_each_weak_composition(5, 1, |_| n += 1);
        assert_eq!(n, 1);
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(composition_power_sum(5, 5, 3).unwrap(), int(1));
        assert_eq!(composition_power_sum(2, 1, 1).unwrap(), int(10));
        assert_eq!(composition_power_sum(3, 1, 1).unwrap(), int(91));
        assert_eq!(composition_power_sum(2, 0, 2).unwrap(), int(81));
        assert!(composition_power_sum(1, 2, 1).is_err());
        assert!(composition_power_sum(1, 1, 0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient_A(idx(2, 1, 1)), int(-20));
        assert_eq!(coefficient_A(idx(4, 1, 4)), int(40320));
        assert_eq!(coefficient_A(idx(7, 1, 5)), int(192518726400i64));
        assert_eq!(coefficient_A(idx(3, 2, 0)), int(-729));
        assert_eq!(coefficient_A_recurrence(idx(1, 1, 1)), int(2));
        assert_eq!(coefficient_A_recurrence(idx(0, 5, 0)), int(1));
        assert_eq!(coefficient_A_recurrence(idx(4, 1, 2)), int(23184));
        assert!(CoeffIndex::new(2, 1, 3).is_err());
        assert!(CoeffIndex::new(2, 0, 1).is_err());
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(4, 5), BigInt::zero());
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn normalized_ab_examples() {
        assert_eq!(a_coeff_norm(1, 1).unwrap(), int(1));
        assert_eq!(a_coeff_norm(2, 1).unwrap(), rat(1, 6));
        assert_eq!(a_coeff_norm(2, 2).unwrap(), int(1));
        assert_eq!(a_coeff_norm(3, 3).unwrap(), int(1));
        assert_eq!(b_coeff_norm(1, 1).unwrap(), int(1));
        assert_eq!(b_coeff_norm(2, 1).unwrap(), rat(2, 3));
        assert_eq!(b_coeff_norm(2, 2).unwrap(), int(1));
        assert!(a_coeff_norm(2, 3).is_err());
        assert!(b_coeff_norm(0, 0).is_err());
    }
}
