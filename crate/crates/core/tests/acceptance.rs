//! Acceptance run: one PASS/FAIL line per criterion. Built with `harness = false`
//! so the lines always reach stdout under `cargo test`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use l2eis::catalog::{Lhs, ReportRow, Route};
use l2eis::rational::{int, rat};
use l2eis::table1::table1;
use l2eis::trig::{deriv_oracle_all, log2_rel_diff};
use l2eis::{
    build_matrix_A, build_matrix_B, coefficient_A, coefficient_A_recurrence, default_catalog, deriv_formula,
    eval_double_sum, verify_catalog, verify_matrix_relations, BigFloat, CoeffIndex, ComplexBF, ConstExpr,
    ConstMonomial, ExactRational, IdentityEntry, LatticeTruncation, Mode, TrigKind, VerifyConfig, WeightFn,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const P: u32 = 256;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    /// Set for a criterion recorded as unattainable: whether the failure is
    /// exactly the recorded deviation.
    known: Option<bool>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            known: None,
        }
    }
}

fn tol_series() -> f64 {
    2f64.powi(-200)
}

fn catalog() -> BTreeMap<String, IdentityEntry> {
    default_catalog().into_iter().map(|e| (e.id.clone(), e)).collect()
}

fn pick(ids: &[&str]) -> Vec<IdentityEntry> {
    let cat = catalog();
    ids.iter().map(|id| cat[*id].clone()).collect()
}

fn rows_ok(rows: &[ReportRow]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.pass)
}

fn worst(rows: &[ReportRow]) -> f64 {
    rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max)
}

fn expr(monomials: &[(i64, i64, i32, i32, u32)]) -> ConstExpr {
    ConstExpr::from_monomials(
        monomials
            .iter()
            .map(|&(n, d, s2, ph, g)| ConstMonomial::new(rat(n, d), s2, ph, g))
            .collect(),
    )
}

fn same_value(a: &ConstExpr, b: &ConstExpr) -> bool {
    let d = &a.eval(P) - &b.eval(P);
    d.is_zero() || d.log2_abs() < -240.0
}

fn c1_table() -> Outcome {
    let mut mismatches = Vec::new();
    let cells = table1();
    for c in &cells {
        let computed = if c.l > c.k {
            int(0)
        } else {
            coefficient_A(CoeffIndex::new(c.k, 1, c.l).unwrap())
        };
        if computed != ExactRational::from_integer(c.value.clone()) {
            mismatches.push(format!("A_{{{},1}}({}) printed {} computed {}", c.k, c.l, c.value, computed));
        }
    }
    let only_known = mismatches.len() == 1 && mismatches[0].starts_with("A_{5,1}(5) printed 362880 ");
    let detail = format!("{}/{} cells match; {}", cells.len() - mismatches.len(), cells.len(), mismatches.join("; "));
    Outcome {
        pass: mismatches.is_empty() && cells.len() == 48,
        detail,
        known: Some(only_known),
    }
}

fn c2_dual_route() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for m in 1..=3 {
        for k in 0..=8 {
            for l in 0..=k {
                let idx = CoeffIndex::new(k, m, l).unwrap();
                n += 1;
                if coefficient_A(idx) != coefficient_A_recurrence(idx) {
                    bad.push(format!("(k={k}, m={m}, l={l})"));
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{} of {n} coefficients differ {}", bad.len(), bad.join(" ")))
}

fn random_point(rng: &mut ChaCha8Rng) -> ComplexBF {
    loop {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-0.75..0.75);
        // stay clear of integers and half-integers on the real axis
        let near = (2.0 * re - (2.0 * re).round()).abs() / 2.0;
        if near.hypot(im) > 0.02 {
            return ComplexBF::new(BigFloat::from_f64(re, P), BigFloat::from_f64(im, P));
        }
    }
}

fn c3_derivatives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let points: Vec<ComplexBF> = (0..200).map(|_| random_point(&mut rng)).collect();
    let kinds = [
        TrigKind::CscOddPower(1),
        TrigKind::CscOddPower(2),
        TrigKind::CscOddPower(3),
        TrigKind::Cot,
        TrigKind::Sec,
        TrigKind::Tan,
    ];
    let worst = points
        .par_iter()
        .map(|s| {
            let mut w = f64::NEG_INFINITY;
            for kind in kinds {
                // the oracle runs 64 bits wider so the deviation is not hidden by
                // both sides rounding to the same 256-bit value
                let oracle = deriv_oracle_all(kind, 8, &s.with_prec(P + 64)).expect("oracle");
                for (n, o) in oracle.iter().enumerate() {
                    let f = deriv_formula(kind, n as u32, s).expect("formula");
                    w = w.max(log2_rel_diff(&f, o));
                }
            }
            w
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Outcome::new(
        worst <= -240.0,
        format!("10800 values, max relative deviation 2^{worst:.1} (limit 2^-240)"),
    )
}

/// Plain f64 partial sums, independent of the multiprecision machinery.
fn direct_f64(f: impl Fn(f64) -> f64) -> f64 {
    (1..40).map(|n| f(n as f64 * std::f64::consts::PI)).sum()
}

fn c4_power_sums() -> Outcome {
    let entries = pick(&["sinh2", "sinh4", "cosh2", "cosh4"]);
    let report = verify_catalog(&entries, &VerifyConfig::default(), Mode::Series, None);
    let direct = BTreeMap::from([
        ("sinh2", direct_f64(|x| x.sinh().powi(-2))),
        ("sinh4", direct_f64(|x| x.sinh().powi(-4))),
        ("cosh2", direct_f64(|x| x.cosh().powi(-2))),
        ("cosh4", direct_f64(|x| x.cosh().powi(-4))),
    ]);
    let mut crude_ok = true;
    for row in &report.rows {
        let d = direct[row.id.as_str()];
        let lhs: f64 = row.lhs_value.split(['+', 'i']).next().unwrap_or("nan").parse().unwrap_or(f64::NAN);
        crude_ok &= (lhs - d).abs() <= 1e-15 * d.abs().max(1e-3);
    }
    let readings: Vec<String> = report
        .rows
        .iter()
        .filter_map(|r| r.reading.as_ref().map(|x| format!("{} under {x}", r.id)))
        .collect();
    Outcome::new(
        rows_ok(&report.rows) && crude_ok && report.rows.len() == 4,
        format!(
            "max abs_diff {:.2e}, f64 cross-check {}, {}",
            worst(&report.rows),
            if crude_ok { "ok" } else { "off" },
            readings.join(", ")
        ),
    )
}

fn c5_catalog_series() -> Outcome {
    let entries = default_catalog();
    let report = verify_catalog(&entries, &VerifyConfig::default(), Mode::Series, None);
    let flagged = entries.iter().filter(|e| e.flag.is_some()).count();
    let resolved = report.rows.iter().filter(|r| r.reading.is_some()).count();
    let one_reading = report
        .rows
        .iter()
        .filter(|r| r.reading.is_some())
        .all(|r| r.candidates.iter().filter(|c| c.pass).count() == 1);
    let failed: Vec<&str> = report.rows.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    Outcome::new(
        report.all_passed() && entries.len() >= 26 && flagged == resolved && one_reading,
        format!(
            "{}/{} entries pass, {resolved}/{flagged} flagged entries resolved to one reading, max abs_diff {:.2e} {}",
            report.summary.passed,
            report.summary.total,
            worst(&report.rows),
            failed.join(" ")
        ),
    )
}

fn reference(entry: &IdentityEntry) -> (f64, f64) {
    let v = entry.rhs.eval(P).to_f64();
    if entry.expected_pure_imaginary {
        (0.0, v)
    } else {
        (v, 0.0)
    }
}

fn c6_oracle() -> Outcome {
    let entries: Vec<IdentityEntry> = default_catalog().into_iter().filter(|e| e.lhs.is_double()).collect();
    let report = verify_catalog(&entries, &VerifyConfig::default(), Mode::Oracle, None);
    let oracle_ok = rows_ok(&report.rows) && report.rows.len() == entries.len();

    let sampled = pick(&["m2_sinh_k1", "m4_sinh_k1", "sinh2_p2", "m4_cosh_oddline_k1", "shifted_cosh", "htilde4"]);
    let base = LatticeTruncation::new(8, 64).unwrap();
    let floor = 1e-14;
    let mut monotone = 0;
    let mut notes = Vec::new();
    for e in &sampled {
        let Lhs::Double { spec, weight, .. } = &e.lhs else { unreachable!() };
        let (re, im) = reference(e);
        let mut prev = f64::INFINITY;
        let mut ok = true;
        let mut trail = Vec::new();
        for factor in [1, 4, 16] {
            let r = eval_double_sum(spec, weight, &base.scaled(factor), l2eis::lattice::DEFAULT_BUDGET).unwrap();
            let d = (r.value.re - re).hypot(r.value.im - im);
            ok &= d <= prev.max(floor) && d <= r.error_estimate + floor;
            prev = d;
            trail.push(format!("{d:.1e}"));
        }
        if ok {
            monotone += 1;
        }
        notes.push(format!("{} [{}]", e.id, trail.join(" > ")));
    }
    Outcome::new(
        oracle_ok && monotone == sampled.len(),
        format!(
            "{}/{} double entries within 1e-5; refinement monotone on {monotone}/{}: {}",
            report.summary.passed,
            entries.len(),
            sampled.len(),
            notes.join(", ")
        ),
    )
}

fn leading_block_ok(k: u32) -> bool {
    let (a, b) = (build_matrix_A(k).unwrap(), build_matrix_B(k).unwrap());
    let unit = a.is_lower_triangular() && a.has_unit_diagonal() && b.is_lower_triangular() && b.has_unit_diagonal();
    let row_a = if k >= 2 { a.row(2)[..2] == [rat(1, 6), int(1)] } else { true };
    let row_b = if k >= 2 { b.row(2)[..2] == [rat(2, 3), int(1)] } else { true };
    unit && *a.get(1, 1) == int(1) && *b.get(1, 1) == int(1) && row_a && row_b
}

fn c7_matrix() -> Outcome {
    let exact = (1..=4).all(leading_block_ok);
    let a_values = [int(1), int(2), rat(1, 2)];
    let g: WeightFn = "sech(1/3)^2 + m*sech(1/3)^2".parse().unwrap();
    let rows = verify_matrix_relations(3, &a_values, &g, P, tol_series()).unwrap();
    let wide = verify_matrix_relations(4, &a_values, &g, P, tol_series()).unwrap();
    Outcome::new(
        exact && rows_ok(&rows) && rows_ok(&wide) && rows.len() == 36,
        format!(
            "corollary coefficients {}; {} relation checks for k <= 3 (max abs_diff {:.2e}), {} rows with k <= 4",
            if exact { "match" } else { "differ" },
            rows.len(),
            worst(&rows),
            wide.len()
        ),
    )
}

fn c8_shifted() -> Outcome {
    let entries = pick(&["shifted_cosh", "shifted_cosh3"]);
    // -π/4 + Γ⁴(1/4)/(32π) and -π/2 + Γ⁴(1/4)/(32π)
    let stated = [
        expr(&[(-1, 4, 0, 2, 0), (1, 32, 0, -2, 4)]),
        expr(&[(-1, 2, 0, 2, 0), (1, 32, 0, -2, 4)]),
    ];
    let forms = entries.iter().zip(&stated).all(|(e, s)| same_value(&e.rhs, s));
    let report = verify_catalog(&entries, &VerifyConfig::default(), Mode::Both, None);
    let routes: Vec<Route> = report.rows.iter().map(|r| r.route).collect();
    Outcome::new(
        forms && rows_ok(&report.rows) && routes == [Route::Series, Route::Oracle, Route::Series, Route::Oracle],
        format!(
            "{} rows pass in series and oracle mode, closed forms {}",
            report.summary.passed,
            if forms { "as stated" } else { "differ" }
        ),
    )
}

fn c9_htilde() -> Outcome {
    let entries = pick(&["htilde4", "ht_sum1", "ht_sum2"]);
    // -(83/360)π⁴ + Γ²(1/4)π^{5/2}/(6√2) - Γ⁸(1/4)/(640π²)
    let stated = expr(&[(-83, 360, 0, 8, 0), (1, 6, -1, 5, 2), (-1, 640, 0, -4, 8)]);
    let form = same_value(&entries[0].rhs, &stated);
    let report = verify_catalog(&entries, &VerifyConfig::default(), Mode::Series, None);
    Outcome::new(
        form && rows_ok(&report.rows) && report.rows.len() == 3,
        format!(
            "{}/3 pass, max abs_diff {:.2e}, H-tilde closed form {}",
            report.summary.passed,
            worst(&report.rows),
            if form { "as stated" } else { "differs" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table reproduction", Duration::from_secs(1), c1_table),
        ("coefficient dual route", Duration::from_secs(1), c2_dual_route),
        ("derivative formulas vs Taylor oracle", Duration::from_secs(30), c3_derivatives),
        ("hyperbolic power sums", Duration::from_secs(5), c4_power_sums),
        ("catalog, series mode", Duration::from_secs(120), c5_catalog_series),
        ("catalog, oracle mode", Duration::from_secs(600), c6_oracle),
        ("matrix relations", Duration::from_secs(60), c7_matrix),
        ("shifted identities", Duration::from_secs(60), c8_shifted),
        ("H-tilde example", Duration::from_secs(30), c9_htilde),
    ];
    let mut broken = Vec::new();
    for (n, (name, limit, run)) in criteria.into_iter().enumerate() {
        let n = n + 1;
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        println!(
            "criterion {n} [{}] {name}: {} ({:.2} s of {} s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        match out.known {
            _ if pass => {}
            Some(true) if in_time => println!("criterion {n}: deviation is the recorded one, not a regression"),
            _ => broken.push(n),
        }
    }
    if broken.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {broken:?}");
        ExitCode::FAILURE
    }
}
