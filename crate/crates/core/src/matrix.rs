//! Exact lower-triangular matrices `A_k`, `B_k` and the relation rows
//! obtained from their inverses.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{a_coeff_norm, b_coeff_norm};
use crate::error::{domain, Error, Result};
use crate::rational::ExactRational;

/// Square matrix of exact rationals, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<ExactRational>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        RationalMatrix {
            dim,
            entries: vec![ExactRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = RationalMatrix::zeros(dim);
        for i in 1..=dim {
            m.set(i, i, ExactRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactRational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(domain("matrix rows must form a non-empty square"));
        }
        Ok(RationalMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactRational {
        &self.entries[(i - 1) * self.dim + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactRational) {
        self.entries[(i - 1) * self.dim + (j - 1)] = v;
    }

    pub fn row(&self, i: usize) -> &[ExactRational] {
        &self.entries[(i - 1) * self.dim..i * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<ExactRational>> {
        (1..=self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_lower_triangular(&self) -> bool {
        (1..=self.dim).all(|i| ((i + 1)..=self.dim).all(|j| self.get(i, j).is_zero()))
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (1..=self.dim).all(|i| self.get(i, i).is_one())
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = RationalMatrix::zeros(n);
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = ExactRational::zero();
                for k in 1..=n {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc += a * rhs.get(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn build(k: u32, entry: fn(u32, u32) -> Result<ExactRational>) -> Result<RationalMatrix> {
    if k < 1 {
        return Err(domain("matrix order k must be at least 1"));
    }
    let mut m = RationalMatrix::zeros(k as usize);
    for i in 1..=k {
        for j in 1..=i {
            m.set(i as usize, j as usize, entry(i, j)?);
        }
    }
    Ok(m)
}

/// Normalized `A_k`: entry `(i, j)` is `a_{i,j}` without its `π^{2i}/a^{2i}` factor.
#[allow(non_snake_case)]
pub fn build_matrix_A(k: u32) -> Result<RationalMatrix> {
    build(k, a_coeff_norm)
}

/// Normalized `B_k`, same convention as [`build_matrix_A`].
#[allow(non_snake_case)]
pub fn build_matrix_B(k: u32) -> Result<RationalMatrix> {
    build(k, b_coeff_norm)
}

/// Forward substitution, column by column.
pub fn invert_lower_triangular(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_lower_triangular() {
        return Err(domain("matrix is not lower-triangular"));
    }
    let n = m.dim();
    if let Some(i) = (1..=n).find(|&i| m.get(i, i).is_zero()) {
        return Err(Error::Singular(format!("zero diagonal entry at ({i}, {i})")));
    }
    let mut inv = RationalMatrix::zeros(n);
    for j in 1..=n {
        inv.set(j, j, m.get(j, j).recip());
        for i in (j + 1)..=n {
            let mut acc = ExactRational::zero();
            for k in j..i {
                acc += m.get(i, k) * inv.get(k, j);
            }
            inv.set(i, j, -acc / m.get(i, i));
        }
    }
    Ok(inv)
}

/// Row `k` of the normalized inverses. With `F_j`, `G_j` the double series of
/// exponent `2j`, it encodes
/// `Σ_j f[j-1] (a/π)^{2j} F_j(g/cosh) = Σ_j g[j-1] (a/π)^{2j} G_j(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRow {
    pub k: u32,
    #[serde(with = "rational_vec")]
    pub f: Vec<ExactRational>,
    #[serde(with = "rational_vec")]
    pub g: Vec<ExactRational>,
}

pub fn relation_row(k: u32) -> Result<RelationRow> {
    let ai = invert_lower_triangular(&build_matrix_A(k)?)?;
    let bi = invert_lower_triangular(&build_matrix_B(k)?)?;
    Ok(RelationRow {
        k,
        f: ai.row(k as usize).to_vec(),
        g: bi.row(k as usize).to_vec(),
    })
}

mod rational_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{parse_rational, ExactRational};

    pub fn serialize<S: Serializer>(v: &[ExactRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn mat(rows: &[&[(i64, i64)]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn small_matrices() {
        assert_eq!(build_matrix_A(2).unwrap(), mat(&[&[(1, 1), (0, 1)], &[(1, 6), (1, 1)]]));
        assert_eq!(build_matrix_B(2).unwrap(), mat(&[&[(1, 1), (0, 1)], &[(2, 3), (1, 1)]]));
        assert_eq!(build_matrix_A(1).unwrap(), RationalMatrix::identity(1));
        assert!(build_matrix_A(0).is_err());
    }

    #[test]
    fn inverses() {
        let a = mat(&[&[(1, 1), (0, 1)], &[(1, 6), (1, 1)]]);
        assert_eq!(
            invert_lower_triangular(&a).unwrap(),
            mat(&[&[(1, 1), (0, 1)], &[(-1, 6), (1, 1)]])
        );
        let id = RationalMatrix::identity(3);
        assert_eq!(invert_lower_triangular(&id).unwrap(), id);
        let b = mat(&[&[(1, 1), (0, 1)], &[(2, 3), (1, 1)]]);
        assert_eq!(
            invert_lower_triangular(&b).unwrap(),
            mat(&[&[(1, 1), (0, 1)], &[(-2, 3), (1, 1)]])
        );
    }

    #[test]
    fn singular_and_non_triangular() {
        let s = mat(&[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]]);
        assert!(matches!(invert_lower_triangular(&s), Err(Error::Singular(_))));
        let u = mat(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(invert_lower_triangular(&u), Err(Error::Domain(_))));
    }

    #[test]
    fn relation_rows() {
        let r1 = relation_row(1).unwrap();
        assert_eq!((r1.f, r1.g), (vec![int(1)], vec![int(1)]));
        let r2 = relation_row(2).unwrap();
        assert_eq!(r2.f, vec![rat(-1, 6), int(1)]);
        assert_eq!(r2.g, vec![rat(-2, 3), int(1)]);
    }

    #[test]
    fn relation_row_serde_roundtrip() {
        let r = relation_row(3).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: RelationRow = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
