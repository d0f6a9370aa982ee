//! Random consistency checks between the coefficient layers and the
//! partial-fraction route, reproducible from a seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

use super::report::{ReportRow, Route};
use super::verify::VerifyConfig;
use crate::rational::{int, rat, ExactRational};
use crate::series::{eval_partial_fraction, eval_rhs_with_reading, Family, FamilySpec, Reading};
use crate::weight::{Hyp, WeightFn};

fn random_weight(rng: &mut ChaCha8Rng) -> WeightFn {
    let args = [rat(1, 2), int(1), rat(1, 3), rat(3, 2)];
    let mut w = WeightFn::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let hyp = *[Hyp::Csch, Hyp::Sech].choose(rng).expect("non-empty");
        let c = args.choose(rng).expect("non-empty").clone();
        let mut t = WeightFn::factor(hyp, c, ExactRational::zero(), rng.gen_range(1..=3));
        let coeff = *[-2i64, -1, 1, 2, 3].choose(rng).expect("non-empty");
        let m_pow = rng.gen_range(0..=3);
        let poly = if m_pow == 0 { coeff.to_string() } else { format!("{coeff}*m^{m_pow}") };
        t = t.mul(&poly.parse().expect("valid"));
        if rng.gen_bool(0.5) {
            t = t.mul(&"alt".parse().expect("valid"));
        }
        w = w.add(&t);
    }
    w
}

/// `count` random (family, exponent, a, weight) cases, each a row with id
/// `spot-<i>` comparing the two series routes (corrected reading).
pub fn spot_checks(count: usize, seed: u64, cfg: &VerifyConfig) -> Vec<ReportRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_values = [int(1), rat(1, 2), int(2), rat(2, 3)];
    let cases: Vec<(FamilySpec, WeightFn)> = (0..count)
        .map(|_| {
            let family = *Family::ALL.choose(&mut rng).expect("non-empty");
            let p = rng.gen_range(family.min_exponent()..=6);
            let a = a_values.choose(&mut rng).expect("non-empty").clone();
            (FamilySpec::new(family, p, a), random_weight(&mut rng))
        })
        .collect();
    cases
        .iter()
        .enumerate()
        .map(|(i, (spec, weight))| {
            let id = format!("spot-{i:03}");
            let prec = cfg.precision_bits;
            let run = || -> crate::error::Result<ReportRow> {
                let th = eval_rhs_with_reading(spec, weight, prec, Reading::Alternate)?;
                let pf = eval_partial_fraction(spec, weight, prec)?;
                let d = (&th - &pf).abs().to_f64();
                let scale = th.abs().to_f64().max(1.0);
                let tol = cfg.tol_series * scale;
                Ok(ReportRow {
                    id: id.clone(),
                    route: Route::Matrix,
                    lhs_value: th.to_string_digits(20),
                    rhs_value: pf.to_string_digits(20),
                    abs_diff: d,
                    tolerance: tol,
                    pass: d <= tol,
                    reading: None,
                    candidates: Vec::new(),
                    error_estimate: None,
                    elapsed_ms: None,
                    note: Some(format!("{spec}, weight {weight}")),
                    budget_exceeded: false,
                })
            };
            run().unwrap_or_else(|e| ReportRow::failed(&id, Route::Matrix, cfg.tol_series, &e))
        })
        .collect()
}
