use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use l2eis_bigfloat::{pi, BigFloat, ComplexBF};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use super::report::{Candidate, ReportConfig, ReportRow, Route, VerificationReport};
use super::{Flag, IdentityEntry, Lhs, Method};
use crate::constexpr::ConstExpr;
use crate::error::{domain, Error, Result};
use crate::lattice::{eval_double_sum_auto, DEFAULT_BUDGET};
use crate::matrix::{build_matrix_A, build_matrix_B, relation_row};
use crate::rational::{to_bigfloat, ExactRational};
use crate::series::{
    eval_corollary, eval_partial_fraction, eval_rhs_with_reading, sum_hyperbolic, Family, FamilySpec,
    HyperbolicSumSpec, Kernel, KernelShape, ParityCombine, Reading,
};
use crate::weight::{Hyp, WeightFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Series,
    Oracle,
    Both,
}

impl Mode {
    fn routes(self) -> &'static [Route] {
        match self {
            Mode::Series => &[Route::Series],
            Mode::Oracle => &[Route::Oracle],
            Mode::Both => &[Route::Series, Route::Oracle],
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Mode::Series),
            "oracle" => Ok(Mode::Oracle),
            "both" => Ok(Mode::Both),
            _ => Err(domain(format!("unknown mode `{s}` (series, oracle, both)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Series => "series",
            Mode::Oracle => "oracle",
            Mode::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub precision_bits: u32,
    pub tol_series: f64,
    pub tol_oracle: f64,
    pub budget: u64,
    /// Record wall-clock time per row. Off by default so that reports are
    /// reproducible byte for byte.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision_bits: 256,
            tol_series: 2f64.powi(-200),
            tol_oracle: 1e-5,
            budget: DEFAULT_BUDGET,
            timings: false,
        }
    }
}

impl VerifyConfig {
    pub fn report_config(&self, mode: &str, seed: Option<u64>) -> ReportConfig {
        ReportConfig {
            precision_bits: self.precision_bits,
            tol_series: self.tol_series,
            tol_oracle: self.tol_oracle,
            mode: mode.to_string(),
            budget: self.budget,
            seed,
        }
    }
}

const DIGITS: usize = 30;

fn rhs_value(expr: &ConstExpr, imaginary: bool, prec: u32) -> ComplexBF {
    let v = expr.eval(prec);
    if imaginary {
        ComplexBF::from_imag(v)
    } else {
        ComplexBF::from_real(v)
    }
}

fn series_lhs(lhs: &Lhs, reading: Reading, prec: u32) -> Result<ComplexBF> {
    match lhs {
        Lhs::Single { weight } => {
            let spec = HyperbolicSumSpec::new(weight.clone(), Kernel::one(), ParityCombine::Single);
            Ok(ComplexBF::from_real(sum_hyperbolic(&spec, prec)?))
        }
        Lhs::Double {
            spec,
            weight,
            method: Method::Theorem,
        } => eval_rhs_with_reading(spec, weight, prec, reading),
        Lhs::Double {
            spec,
            weight,
            method: Method::Corollary,
        } => eval_corollary(spec, weight, prec, reading),
    }
}

fn lhs_reading_flag(entry: &IdentityEntry) -> bool {
    matches!(entry.flag, Some(Flag::OddlineArgument | Flag::OddlineCubicDenominator))
}

/// Picks the passing candidate. With two candidates exactly one must pass.
fn decide(cands: &[(Option<&'static str>, f64)], tol: f64) -> (usize, bool, Option<String>) {
    let passing: Vec<usize> = (0..cands.len()).filter(|&i| cands[i].1 <= tol).collect();
    match (cands.len(), passing.as_slice()) {
        (1, [_]) => (0, true, None),
        (1, _) => (0, false, None),
        (_, [i]) => (*i, true, None),
        (_, []) => (0, false, Some("no reading passes".into())),
        _ => (0, false, Some("more than one reading passes".into())),
    }
}

fn candidates(cands: &[(Option<&'static str>, f64)], tol: f64) -> Vec<Candidate> {
    if cands.len() < 2 {
        return Vec::new();
    }
    cands
        .iter()
        .map(|(r, d)| Candidate {
            reading: r.unwrap_or("").to_string(),
            abs_diff: *d,
            pass: *d <= tol,
        })
        .collect()
}

fn series_row(entry: &IdentityEntry, cfg: &VerifyConfig) -> Result<ReportRow> {
    let prec = cfg.precision_bits;
    let tol = cfg.tol_series;
    let rhs = rhs_value(&entry.rhs, entry.expected_pure_imaginary, prec);
    let mut values: Vec<(Option<&'static str>, ComplexBF, ComplexBF)> = Vec::new();
    match entry.flag {
        None => values.push((None, series_lhs(&entry.lhs, Reading::Printed, prec)?, rhs)),
        Some(Flag::RhsMisprint) => {
            let lhs = series_lhs(&entry.lhs, Reading::Printed, prec)?;
            let alt = entry.rhs_alternate.as_ref().expect("validated at load");
            values.push((Some("printed"), lhs.clone(), rhs));
            values.push((Some("alternate"), lhs, rhs_value(alt, entry.expected_pure_imaginary, prec)));
        }
        Some(_) => {
            for (name, reading) in [("printed", Reading::Printed), ("alternate", Reading::Alternate)] {
                values.push((Some(name), series_lhs(&entry.lhs, reading, prec)?, rhs.clone()));
            }
        }
    }
    let diffs: Vec<(Option<&'static str>, f64)> =
        values.iter().map(|(r, l, v)| (*r, (l - v).abs().to_f64())).collect();
    let (i, mut pass, mut note) = decide(&diffs, tol);
    let (reading, lhs, rhs) = &values[i];
    if entry.expected_pure_imaginary && lhs.re.abs().to_f64() > tol {
        pass = false;
        note = Some("real part of the left-hand side is not negligible".into());
    }
    Ok(ReportRow {
        id: entry.id.clone(),
        route: Route::Series,
        lhs_value: lhs.to_string_digits(DIGITS),
        rhs_value: rhs.to_string_digits(DIGITS),
        abs_diff: diffs[i].1,
        tolerance: tol,
        pass,
        reading: if values.len() > 1 && pass { reading.map(String::from) } else { None },
        candidates: candidates(&diffs, tol),
        error_estimate: None,
        elapsed_ms: None,
        note,
        budget_exceeded: false,
    })
}

fn to_c64(z: &ComplexBF) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

fn fmt_c64(z: Complex64) -> String {
    format!("{:.15e}{:+.15e}i", z.re, z.im)
}

fn oracle_row(entry: &IdentityEntry, cfg: &VerifyConfig) -> Result<ReportRow> {
    let Lhs::Double { spec, weight, .. } = &entry.lhs else {
        return Err(domain("the lattice oracle applies to double series only"));
    };
    let res = eval_double_sum_auto(spec, weight, cfg.tol_oracle / 4.0, cfg.budget)?;
    let err = res.error_estimate;
    let tol = cfg.tol_oracle - err;
    let lhs = res.value;
    let rhs = to_c64(&rhs_value(&entry.rhs, entry.expected_pure_imaginary, 96));
    let main = (lhs - rhs).norm();
    let mut diffs = Vec::new();
    let mut shown_rhs = rhs;
    let mut main_pass = main <= tol;
    match entry.flag {
        None => diffs.push((None, main)),
        Some(Flag::RhsMisprint) => {
            let alt = entry.rhs_alternate.as_ref().expect("validated at load");
            let alt = to_c64(&rhs_value(alt, entry.expected_pure_imaginary, 96));
            diffs.push((Some("printed"), main));
            diffs.push((Some("alternate"), (lhs - alt).norm()));
            main_pass = true;
        }
        Some(_) => {
            for (name, reading) in [("printed", Reading::Printed), ("alternate", Reading::Alternate)] {
                let v = to_c64(&series_lhs(&entry.lhs, reading, 96)?);
                diffs.push((Some(name), (lhs - v).norm()));
            }
        }
    }
    let (i, picked, mut note) = decide(&diffs, tol);
    if entry.flag == Some(Flag::RhsMisprint) && i == 1 {
        shown_rhs = to_c64(&rhs_value(
            entry.rhs_alternate.as_ref().expect("validated at load"),
            entry.expected_pure_imaginary,
            96,
        ));
    }
    let mut pass = picked && main_pass;
    if !main_pass {
        note = Some("closed form does not match the lattice sum".into());
    }
    if entry.expected_pure_imaginary && lhs.re.abs() > tol {
        pass = false;
        note = Some("real part of the lattice sum is not negligible".into());
    }
    let abs_diff = if lhs_reading_flag(entry) { main } else { diffs[i].1 };
    Ok(ReportRow {
        id: entry.id.clone(),
        route: Route::Oracle,
        lhs_value: fmt_c64(lhs),
        rhs_value: fmt_c64(shown_rhs),
        abs_diff,
        tolerance: tol,
        pass,
        reading: if diffs.len() > 1 && picked { diffs[i].0.map(String::from) } else { None },
        candidates: candidates(&diffs, tol),
        error_estimate: Some(err),
        elapsed_ms: None,
        note,
        budget_exceeded: false,
    })
}

fn timed(cfg: &VerifyConfig, f: impl FnOnce() -> ReportRow) -> ReportRow {
    let start = Instant::now();
    let mut row = f();
    if cfg.timings {
        row.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    row
}

/// Rows for one entry: one per route in `mode`. Single sums have no oracle
/// route. Evaluation errors become failed rows.
pub fn verify_entry(entry: &IdentityEntry, cfg: &VerifyConfig, mode: Mode) -> Vec<ReportRow> {
    mode.routes()
        .iter()
        .filter(|r| **r == Route::Series || entry.lhs.is_double())
        .map(|&route| {
            timed(cfg, || {
                let (res, tol) = match route {
                    Route::Oracle => (oracle_row(entry, cfg), cfg.tol_oracle),
                    _ => (series_row(entry, cfg), cfg.tol_series),
                };
                res.unwrap_or_else(|e| ReportRow::failed(&entry.id, route, tol, &e))
            })
        })
        .collect()
}

pub fn verify_catalog(entries: &[IdentityEntry], cfg: &VerifyConfig, mode: Mode, seed: Option<u64>) -> VerificationReport {
    let rows: Vec<ReportRow> = entries.par_iter().flat_map_iter(|e| verify_entry(e, cfg, mode)).collect();
    VerificationReport::new(cfg.report_config(&mode.to_string(), seed), rows)
}

fn matrix_row(id: String, lhs: &ComplexBF, rhs: &ComplexBF, tol: f64) -> ReportRow {
    let d = (lhs - rhs).abs().to_f64();
    ReportRow {
        id,
        route: Route::Matrix,
        lhs_value: lhs.to_string_digits(DIGITS),
        rhs_value: rhs.to_string_digits(DIGITS),
        abs_diff: d,
        tolerance: tol,
        pass: d <= tol,
        reading: None,
        candidates: Vec::new(),
        error_estimate: None,
        elapsed_ms: None,
        note: None,
        budget_exceeded: false,
    }
}

/// The hyperbolic sums `Σ (w(m)+w(-m)) shape(mπ/a)^{2l}`, `l = 1..=k`.
fn bar_sums(weight: &WeightFn, shape: KernelShape, a: &ExactRational, k: u32, w: u32) -> Result<Vec<BigFloat>> {
    (1..=k)
        .map(|l| {
            let s = HyperbolicSumSpec::new(weight.clone(), Kernel::new(shape, 2 * l, a.recip()), ParityCombine::Even);
            sum_hyperbolic(&s, w)
        })
        .collect()
}

/// Checks, for each `a`:
/// the matrix forms `F = A F̄` and `G = B Ḡ` with `F`, `G` from the
/// partial-fraction route; the inverted relation between `F(g/cosh)` and
/// `G(g)` for every `k`; and the three explicit relations for exponents 2 and 4.
pub fn verify_matrix_relations(
    k_max: u32,
    a_values: &[ExactRational],
    test_weight: &WeightFn,
    prec: u32,
    tol: f64,
) -> Result<Vec<ReportRow>> {
    if !(1..=6).contains(&k_max) {
        return Err(domain(format!("matrix relations need 1 <= k_max <= 6, got {k_max}")));
    }
    let w = prec + 32;
    let ma = build_matrix_A(k_max)?;
    let mb = build_matrix_B(k_max)?;
    let rows_per_a: Vec<Result<Vec<ReportRow>>> = a_values
        .par_iter()
        .map(|a| {
            let mut rows = Vec::new();
            let g = test_weight;
            let f = g.mul(&WeightFn::factor(Hyp::Sech, a.recip(), ExactRational::zero(), 1));
            let pi_a = pi(w) / to_bigfloat(a, w);
            let series = |family: Family, k: u32, weight: &WeightFn| {
                eval_partial_fraction(&FamilySpec::new(family, 2 * k, a.clone()), weight, w)
            };
            let big_f: Vec<ComplexBF> = (1..=k_max).map(|k| series(Family::FAlt, k, g)).collect::<Result<_>>()?;
            let big_g: Vec<ComplexBF> = (1..=k_max).map(|k| series(Family::GPlain, k, g)).collect::<Result<_>>()?;
            let f_bar = bar_sums(g, KernelShape::CoshOverSinh, a, k_max, w)?;
            let g_bar = bar_sums(g, KernelShape::InvSinh, a, k_max, w)?;
            for k in 1..=k_max {
                let scale = pi_a.powi(2 * k as i64);
                let mut fa = BigFloat::zero(w);
                let mut gb = BigFloat::zero(w);
                for l in 1..=k as usize {
                    fa += to_bigfloat(ma.get(k as usize, l), w) * &f_bar[l - 1];
                    gb += to_bigfloat(mb.get(k as usize, l), w) * &g_bar[l - 1];
                }
                let fa = ComplexBF::from_real(fa * &scale);
                let gb = ComplexBF::from_real(gb * &scale);
                rows.push(matrix_row(format!("matrix_A k={k} a={a}"), &big_f[k as usize - 1], &fa, tol));
                rows.push(matrix_row(format!("matrix_B k={k} a={a}"), &big_g[k as usize - 1], &gb, tol));
            }
            let f_of_g: Vec<ComplexBF> =
                (1..=k_max).map(|k| series(Family::FAlt, k, &f)).collect::<Result<_>>()?;
            let a_pi = pi_a.recip();
            for k in 1..=k_max {
                let row = relation_row(k)?;
                let mut lhs = ComplexBF::zero(w);
                let mut rhs = ComplexBF::zero(w);
                for j in 1..=k as usize {
                    let s = a_pi.powi(2 * j as i64);
                    lhs = &lhs + &f_of_g[j - 1].scale(&(to_bigfloat(&row.f[j - 1], w) * &s));
                    rhs = &rhs + &big_g[j - 1].scale(&(to_bigfloat(&row.g[j - 1], w) * &s));
                }
                rows.push(matrix_row(format!("inverse_relation k={k} a={a}"), &lhs, &rhs, tol));
            }
            rows.push(matrix_row(format!("relation_exponent2 a={a}"), &f_of_g[0], &big_g[0], tol));
            if k_max >= 2 {
                let c = ComplexBF::from_real(pi_a.powi(2) / BigFloat::from_i64(2, w));
                let lhs2 = f_of_g[1].clone();
                let rhs2 = &big_g[1] - &(&c * &big_g[0]);
                rows.push(matrix_row(format!("relation_exponent4 a={a}"), &lhs2, &rhs2, tol));
                let lhs3 = &f_of_g[1] + &(&c * &f_of_g[0]);
                rows.push(matrix_row(format!("relation_exponent4_mixed a={a}"), &lhs3, &big_g[1], tol));
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for r in rows_per_a {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::default_catalog;
    use crate::rational::{int, rat};

    fn entry(id: &str) -> IdentityEntry {
        default_catalog().into_iter().find(|e| e.id == id).unwrap()
    }

    fn quick() -> VerifyConfig {
        VerifyConfig {
            precision_bits: 128,
            tol_series: 2f64.powi(-100),
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn plain_entry() {
        let rows = verify_entry(&entry("sinh2"), &quick(), Mode::Both);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].pass, "{rows:?}");
        assert!(rows[0].reading.is_none());
    }

    #[test]
    fn flagged_entries_pick_one_reading() {
        for id in ["sinh4", "sinh2half_Go_p2", "cosh_oddline_k3"] {
            let rows = verify_entry(&entry(id), &quick(), Mode::Series);
            assert!(rows[0].pass, "{rows:?}");
            assert_eq!(rows[0].reading.as_deref(), Some("alternate"));
            assert_eq!(rows[0].candidates.len(), 2);
        }
    }

    #[test]
    fn corrupted_entry_fails() {
        let mut e = entry("m4_sinh_k1");
        e.rhs = e.rhs.scale(&rat(641, 640));
        let rows = verify_entry(&e, &quick(), Mode::Series);
        assert!(!rows[0].pass);
    }

    #[test]
    fn zero_identity() {
        let mut e = entry("m4_sinh_k1");
        if let Lhs::Double { spec, weight, .. } = &mut e.lhs {
            spec.exponent = 2;
            *weight = "m*sech(1)".parse().unwrap();
        }
        e.rhs = ConstExpr::zero();
        let rows = verify_entry(&e, &quick(), Mode::Series);
        assert!(rows[0].pass && rows[0].abs_diff == 0.0, "{rows:?}");
    }

    #[test]
    fn matrix_relations_small() {
        let weight: WeightFn = "sech(1/3)^2 + m*sech(1/3)^2".parse().unwrap();
        let rows = verify_matrix_relations(3, &[int(1), rat(1, 2)], &weight, 96, 2f64.powi(-80)).unwrap();
        assert_eq!(rows.len(), 2 * (3 * 3 + 3));
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
        assert!(verify_matrix_relations(7, &[int(1)], &weight, 96, 1e-20).is_err());
    }
}
