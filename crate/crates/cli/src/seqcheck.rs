use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use interkernel::kfunctional::{KProfile, ThetaQ};
use interkernel::sequence::{
    calderon_weighted_norm, doubling_schedule, power_weighted_norm, s_minus_i_invertibility_tol, t0_apply, t1_apply,
    truncated_norm_growth, young_constant, FiniteSeq, Growth, GrowthReport, Invertibility, SeqOperator,
};

use crate::{emit, to_json, Format, SeqArgs};

const CASES: usize = 1000;
const BOUND_CASES: usize = 200;

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    cases: usize,
    violations: usize,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    seed: u64,
    suites: Vec<Suite>,
    growth: GrowthReport,
}

/// Entries `m / 1024`, so every partial sum is exact.
fn dyadic_seq(rng: &mut ChaCha8Rng) -> FiniteSeq {
    let len = rng.gen_range(1..12);
    let start = rng.gen_range(-20i64..20);
    FiniteSeq::from_pairs((0..len).map(|j| (start + j, rng.gen_range(-1000i32..=1000) as f64 / 1024.0)))
}

fn identity_suites(rng: &mut ChaCha8Rng) -> [Suite; 2] {
    let (mut bad_inverse, mut bad_u0) = (0, 0);
    for _ in 0..CASES {
        let u = dyadic_seq(rng);
        let (lo, hi) = u.support().unwrap_or((0, 0));
        let x = t0_apply(&u);
        if ((lo - 3)..=(hi + 3)).any(|i| x.get(i - 1) - x.get(i) != u.get(i)) {
            bad_inverse += 1;
        }
        let mut v = u.clone();
        v.add_at(hi + 1, -u.sum());
        let (a, b) = (t0_apply(&v), t1_apply(&v));
        if !v.in_u0() || ((lo - 3)..=(hi + 4)).any(|k| a.get(k) != b.get(k)) {
            bad_u0 += 1;
        }
    }
    [
        Suite {
            name: "(S-I)T0 = id",
            cases: CASES,
            violations: bad_inverse,
            detail: "exact equality on the support and 3 steps beyond".into(),
        },
        Suite {
            name: "T0 = T1 on U0",
            cases: CASES,
            violations: bad_u0,
            detail: "exact equality".into(),
        },
    ]
}

fn calderon_suite(rng: &mut ChaCha8Rng) -> Suite {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..BOUND_CASES {
        let len = rng.gen_range(1..20);
        let start = rng.gen_range(-30i64..30);
        let c = FiniteSeq::from_pairs((0..len).map(|j| (start + j, rng.gen_range(-1.0..1.0))));
        for theta in (1..=9).map(|k| k as f64 / 10.0) {
            for q in [1.0, 2.0, f64::INFINITY] {
                let r = calderon_weighted_norm(&c, theta, q) / power_weighted_norm(&c, theta, q) / young_constant(theta);
                worst = worst.max(r);
                if r > 1.0 + 1e-12 {
                    bad += 1;
                }
            }
        }
    }
    Suite {
        name: "S_d Young bound",
        cases: BOUND_CASES * 27,
        violations: bad,
        detail: format!("max ratio to C(theta): {worst:.6}"),
    }
}

pub fn run(a: &SeqArgs) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let [inverse, u0] = identity_suites(&mut rng);
    let bound = calderon_suite(&mut rng);

    let tq = ThetaQ::new(a.theta, a.common.q()?)?;
    let prof = KProfile::two_power(a.common.grid()?, a.theta, a.theta)?;
    let verdict = s_minus_i_invertibility_tol(&prof, tq, a.common.tol);
    let growth = truncated_norm_growth(SeqOperator::T0, &prof, tq, &doubling_schedule(a.max_pow))?;
    let consistent = verdict.verdict == Invertibility::NotInvertible && growth.verdict == Growth::Diverging;
    let growth_suite = Suite {
        name: "T0 truncations at alpha = beta = theta",
        cases: growth.rows.len(),
        violations: usize::from(!consistent),
        detail: format!("criterion {:?}, truncations {:?}", verdict.verdict, growth.verdict),
    };

    let suites = vec![inverse, u0, bound, growth_suite];
    let failed = suites.iter().any(|s| s.violations > 0);
    let text = match a.common.format {
        Format::Json => to_json(&Report {
            seed: a.common.seed,
            suites,
            growth,
        })?,
        Format::Csv => {
            let mut out = String::from("suite,cases,violations\n");
            for s in &suites {
                out.push_str(&format!("{},{},{}\n", s.name, s.cases, s.violations));
            }
            out
        }
    };
    emit(&a.common, &text)?;
    Ok(if failed { 3 } else { 0 })
}
