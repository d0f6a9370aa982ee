use std::fmt::Write as _;

use l2eis::catalog::{spot_checks, verify_catalog, verify_matrix_relations, Mode, VerificationReport, VerifyConfig};
use l2eis::lattice::{eval_double_sum, eval_double_sum_auto, LatticeTruncation, OracleResult};
use l2eis::rational::{parse_rational, to_bigfloat};
use l2eis::series::{
    eval_corollary, eval_rhs_with_reading, sum_hyperbolic, FamilySpec, HyperbolicSumSpec, Kernel, ParityCombine,
    Reading,
};
use l2eis::table1::table1;
use l2eis::trig::{deriv_formula, deriv_oracle, log2_rel_diff, TrigKind};
use l2eis::{coefficient_A, BigFloat, CoeffIndex, ComplexBF, Error, WeightFn};
use serde_json::{json, Value};

use crate::args::{CoeffArgs, DerivArgs, EvalArgs, Format, GlobalOpts, ModeArg, OracleArgs, SeriesArgs, VerifyArgs};
use crate::exit::Failure;

pub struct Output {
    pub text: String,
    /// Set when a check ran and did not pass.
    pub failed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, failed: false }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn eval_err(e: Error) -> Failure {
    match e {
        Error::Budget(m) => Failure::Budget(m),
        other => Failure::Usage(other.to_string()),
    }
}

/// `2^-200`, `1e-5` or `0.001`.
pub fn parse_tol(s: &str) -> Result<f64, Failure> {
    let t = s.trim();
    let v = match t.split_once('^') {
        Some((base, exp)) => {
            let base: f64 = base.trim().parse().map_err(|_| usage(format!("bad tolerance `{s}`")))?;
            let exp: i32 = exp.trim().parse().map_err(|_| usage(format!("bad tolerance `{s}`")))?;
            base.powi(exp)
        }
        None => t.parse().map_err(|_| usage(format!("bad tolerance `{s}`")))?,
    };
    if !(v.is_finite() && v > 0.0) {
        return Err(usage(format!("tolerance must be positive and finite, got `{s}`")));
    }
    Ok(v)
}

pub fn check_globals(g: &GlobalOpts) -> Result<(), Failure> {
    if g.precision_bits < 64 {
        return Err(usage(format!("--precision-bits must be at least 64, got {}", g.precision_bits)));
    }
    if g.budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    parse_tol(&g.tol_series)?;
    parse_tol(&g.tol_oracle)?;
    Ok(())
}

fn digits(prec: u32) -> usize {
    ((prec as f64 * std::f64::consts::LOG10_2) as usize).saturating_sub(2).max(10)
}

fn parse_real(s: &str, prec: u32) -> Result<BigFloat, Failure> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(to_bigfloat(&parse_rational(s).map_err(usage)?, prec));
    }
    BigFloat::parse_decimal(s, prec).map_err(usage)
}

fn parse_point(s: &str, prec: u32) -> Result<ComplexBF, Failure> {
    match s.split_once(',') {
        Some((re, im)) => Ok(ComplexBF::new(parse_real(re, prec)?, parse_real(im, prec)?)),
        None => Ok(ComplexBF::from_real(parse_real(s, prec)?)),
    }
}

fn complex_json(z: &ComplexBF, d: usize) -> Value {
    json!({ "re": z.re.to_sci_string(d), "im": z.im.to_sci_string(d) })
}

pub fn coeff(args: &CoeffArgs, g: &GlobalOpts) -> Result<Output, Failure> {
    let cells: Vec<(u32, u32, String)> = match (args.k, args.l) {
        (Some(k), Some(l)) => {
            let idx = CoeffIndex::new(k, args.m, l).map_err(usage)?;
            vec![(k, l, coefficient_A(idx).to_string())]
        }
        _ => {
            let mut v = Vec::new();
            for k in 0..=args.k_max {
                for l in 0..=k {
                    let idx = CoeffIndex::new(k, args.m, l).map_err(usage)?;
                    v.push((k, l, coefficient_A(idx).to_string()));
                }
            }
            v
        }
    };
    let mut mismatches = Vec::new();
    if args.check_table {
        if args.m != 1 {
            return Err(usage("--check-table needs --m 1"));
        }
        for cell in table1() {
            let printed = cell.value.to_string();
            let computed = if cell.l <= cell.k {
                let idx = CoeffIndex::new(cell.k, 1, cell.l).map_err(usage)?;
                coefficient_A(idx).to_string()
            } else {
                "0".to_string()
            };
            if printed != computed {
                mismatches.push((cell.k, cell.l, printed, computed));
            }
        }
    }
    let text = match g.format {
        Format::Json => {
            let cells: Vec<Value> = cells.iter().map(|(k, l, v)| json!({"k": k, "l": l, "value": v})).collect();
            let mut obj = json!({ "m": args.m, "cells": cells });
            if args.check_table {
                obj["table_mismatches"] = mismatches
                    .iter()
                    .map(|(k, l, p, c)| json!({"k": k, "l": l, "table": p, "computed": c}))
                    .collect();
            }
            serde_json::to_string_pretty(&obj).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("k,l,value\n");
            for (k, l, v) in &cells {
                let _ = writeln!(s, "{k},{l},{v}");
            }
            s
        }
        Format::Markdown | Format::Plain => {
            let l_max = cells.iter().map(|c| c.1).max().unwrap_or(0);
            let md = g.format == Format::Markdown;
            let mut s = String::new();
            if md {
                s.push_str("| k |");
                for l in 0..=l_max {
                    let _ = write!(s, " l={l} |");
                }
                s.push('\n');
                s.push_str(&"|---".repeat(l_max as usize + 2));
                s.push_str("|\n");
            }
            let mut ks: Vec<u32> = cells.iter().map(|c| c.0).collect();
            ks.dedup();
            for k in ks {
                let row: Vec<String> = (0..=l_max)
                    .map(|l| {
                        cells
                            .iter()
                            .find(|c| c.0 == k && c.1 == l)
                            .map(|c| c.2.clone())
                            .unwrap_or_else(|| "0".into())
                    })
                    .collect();
                if md {
                    let _ = writeln!(s, "| {k} | {} |", row.join(" | "));
                } else {
                    let _ = writeln!(s, "k={k}: {}", row.join(" "));
                }
            }
            for (k, l, p, c) in &mismatches {
                let _ = writeln!(s, "mismatch at k={k}, l={l}: table {p}, computed {c}");
            }
            s
        }
    };
    Ok(Output {
        text,
        failed: !mismatches.is_empty(),
    })
}

pub fn deriv(args: &DerivArgs, g: &GlobalOpts) -> Result<Output, Failure> {
    let kind: TrigKind = args.kind.parse().map_err(usage)?;
    let prec = g.precision_bits;
    let s = parse_point(&args.s, prec)?;
    let v = deriv_formula(kind, args.order, &s).map_err(usage)?;
    let oracle = if args.check {
        let o = deriv_oracle(kind, args.order, &s).map_err(usage)?;
        let d = log2_rel_diff(&v, &o);
        Some((o, d))
    } else {
        None
    };
    let d = digits(prec);
    let text = match g.format {
        Format::Json => {
            let mut obj = json!({
                "kind": kind.to_string(),
                "order": args.order,
                "s": complex_json(&s, d),
                "value": complex_json(&v, d),
            });
            if let Some((o, rel)) = &oracle {
                obj["oracle"] = complex_json(o, d);
                obj["log2_rel_diff"] = if rel.is_finite() { json!(rel) } else { json!("-inf") };
            }
            serde_json::to_string_pretty(&obj).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = format!("kind,order,re,im\n{kind},{},{},{}\n", args.order, v.re.to_sci_string(d), v.im.to_sci_string(d));
            if let Some((o, _)) = &oracle {
                let _ = writeln!(s, "{kind}-oracle,{},{},{}", args.order, o.re.to_sci_string(d), o.im.to_sci_string(d));
            }
            s
        }
        _ => {
            let mut s = format!("{}\n", v.to_string_digits(d));
            if let Some((o, rel)) = &oracle {
                let _ = writeln!(s, "oracle {}\nlog2 relative deviation {rel:.1}", o.to_string_digits(d));
            }
            s
        }
    };
    Ok(Output::ok(text))
}

enum Target {
    Single(WeightFn),
    Double(FamilySpec, WeightFn),
}

fn target(args: &SeriesArgs) -> Result<Target, Failure> {
    let weight: WeightFn = args.weight.parse().map_err(usage)?;
    let Some(family) = &args.family else {
        if args.exponent.is_some() || args.b.is_some() {
            return Err(usage("--exponent and --b/--c need --family"));
        }
        return Ok(Target::Single(weight));
    };
    let family = family.parse().map_err(usage)?;
    let exponent = args.exponent.ok_or_else(|| usage("--family needs --exponent"))?;
    let a = parse_rational(&args.a).map_err(usage)?;
    let mut spec = FamilySpec::new(family, exponent, a);
    if let (Some(b), Some(c)) = (&args.b, &args.c) {
        spec = spec.shifted(parse_rational(b).map_err(usage)?, parse_rational(c).map_err(usage)?);
    }
    spec.validate().map_err(usage)?;
    Ok(Target::Double(spec, weight))
}

fn oracle_json(r: &OracleResult) -> Value {
    json!({
        "re": r.value.re,
        "im": r.value.im,
        "error_estimate": r.error_estimate,
        "terms": r.terms,
        "nm": r.truncation.nm,
        "nn": r.truncation.nn,
    })
}

pub fn eval(args: &EvalArgs, g: &GlobalOpts) -> Result<Output, Failure> {
    let prec = g.precision_bits;
    let reading: Reading = args.reading.parse().map_err(usage)?;
    let (value, label, oracle) = match target(&args.series)? {
        Target::Single(w) => {
            if args.oracle || args.corollary {
                return Err(usage("--oracle and --corollary need --family"));
            }
            let spec = HyperbolicSumSpec::new(w.clone(), Kernel::one(), ParityCombine::Single);
            let v = sum_hyperbolic(&spec, prec).map_err(eval_err)?;
            (ComplexBF::from_real(v), format!("sum_(m>=1) {w}"), None)
        }
        Target::Double(spec, w) => {
            let v = if args.corollary {
                eval_corollary(&spec, &w, prec, reading)
            } else {
                eval_rhs_with_reading(&spec, &w, prec, reading)
            }
            .map_err(eval_err)?;
            let oracle = if args.oracle {
                let tol = parse_tol(&g.tol_oracle)?;
                Some(eval_double_sum_auto(&spec, &w, tol / 4.0, g.budget).map_err(eval_err)?)
            } else {
                None
            };
            (v, format!("{spec}, weight {w}"), oracle)
        }
    };
    let tol = parse_tol(&g.tol_oracle)?;
    let check = oracle.map(|o| {
        let diff = (value.re.to_f64() - o.value.re).hypot(value.im.to_f64() - o.value.im);
        (o, diff, diff + o.error_estimate <= tol)
    });
    let d = digits(prec);
    let text = match g.format {
        Format::Json => {
            let mut obj = json!({ "lhs": label, "reading": reading.to_string(), "value": complex_json(&value, d) });
            if let Some((o, diff, ok)) = &check {
                obj["oracle"] = oracle_json(o);
                obj["abs_diff"] = json!(diff);
                obj["consistent"] = json!(ok);
            }
            serde_json::to_string_pretty(&obj).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = format!("route,re,im,error_estimate\nseries,{},{},\n", value.re.to_sci_string(d), value.im.to_sci_string(d));
            if let Some((o, _, _)) = &check {
                let _ = writeln!(s, "oracle,{:e},{:e},{:e}", o.value.re, o.value.im, o.error_estimate);
            }
            s
        }
        _ => {
            let mut s = format!("{label}\n{}\n", value.to_string_digits(d));
            if let Some((o, diff, ok)) = &check {
                let _ = writeln!(
                    s,
                    "oracle {:.15e}{:+.15e}i ± {:.1e} (Nm={}, Nn={})\n|series - oracle| = {diff:.3e}: {}",
                    o.value.re,
                    o.value.im,
                    o.error_estimate,
                    o.truncation.nm,
                    o.truncation.nn,
                    if *ok { "consistent" } else { "INCONSISTENT" }
                );
            }
            s
        }
    };
    Ok(Output {
        text,
        failed: check.is_some_and(|c| !c.2),
    })
}

pub fn oracle(args: &OracleArgs, g: &GlobalOpts) -> Result<Output, Failure> {
    let Target::Double(spec, w) = target(&args.series)? else {
        return Err(usage("the lattice oracle needs --family and --exponent"));
    };
    let mut trunc = LatticeTruncation::new(args.nm, args.nn).map_err(usage)?;
    if args.no_tail {
        trunc = trunc.without_tail_correction();
    }
    let r = eval_double_sum(&spec, &w, &trunc, g.budget).map_err(eval_err)?;
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&oracle_json(&r)).expect("json") + "\n",
        Format::Csv => format!(
            "re,im,error_estimate,terms\n{:e},{:e},{:e},{}\n",
            r.value.re, r.value.im, r.error_estimate, r.terms
        ),
        _ => format!(
            "{:.15e}{:+.15e}i ± {:.1e} ({} terms)\n",
            r.value.re, r.value.im, r.error_estimate, r.terms
        ),
    };
    Ok(Output::ok(text))
}

pub fn verify(args: &VerifyArgs, g: &GlobalOpts) -> Result<Output, Failure> {
    let cfg = VerifyConfig {
        precision_bits: g.precision_bits,
        tol_series: parse_tol(&g.tol_series)?,
        tol_oracle: parse_tol(&g.tol_oracle)?,
        budget: g.budget,
        timings: args.timings,
    };
    let catalog = match &g.catalog {
        Some(p) => l2eis::catalog::load_catalog(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => l2eis::catalog::default_catalog(),
    };
    let entries: Vec<_> = if !args.ids.is_empty() {
        let mut picked = Vec::new();
        for id in &args.ids {
            let e = catalog
                .iter()
                .find(|e| &e.id == id)
                .ok_or_else(|| usage(format!("no catalog entry `{id}`")))?;
            picked.push(e.clone());
        }
        picked
    } else if args.all || (args.matrix.is_none() && args.spot == 0) {
        catalog
    } else {
        Vec::new()
    };
    let mode = match g.mode {
        ModeArg::Series => Mode::Series,
        ModeArg::Oracle => Mode::Oracle,
        ModeArg::Both => Mode::Both,
    };
    let report = verify_catalog(&entries, &cfg, mode, Some(g.seed));
    let mut rows = report.rows;
    if let Some(k_max) = args.matrix {
        let a_values = args
            .a_values
            .iter()
            .map(|a| parse_rational(a).map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        let weight: WeightFn = args.test_weight.parse().map_err(usage)?;
        rows.extend(verify_matrix_relations(k_max, &a_values, &weight, cfg.precision_bits, cfg.tol_series).map_err(usage)?);
    }
    if args.spot > 0 {
        rows.extend(spot_checks(args.spot, g.seed, &cfg));
    }
    let report = VerificationReport::new(report.config, rows);
    let text = match g.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Markdown => report.to_markdown(),
        Format::Plain => report.to_plain(),
    };
    if report.budget_exceeded() {
        return Err(Failure::BudgetWithOutput(text));
    }
    Ok(Output {
        failed: !report.all_passed(),
        text,
    })
}
