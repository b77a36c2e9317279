use interkernel::couples::DyadicGrid;
use interkernel::kfunctional::{KProfile, ThetaQ};
use interkernel::sequence::{
    calderon_weighted_norm, doubling_schedule, power_weighted_norm, s_minus_i_invertibility, shift_minus_identity,
    t0_apply, t1_apply, truncated_norm_growth, young_constant, FiniteSeq, Growth, Invertibility, SeqOperator, TailSeq,
};
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = FiniteSeq> {
    (-20i64..20, prop::collection::vec(-1000i32..=1000, 1..12)).prop_map(|(start, v)| {
        FiniteSeq::from_pairs(v.into_iter().enumerate().map(|(j, m)| (start + j as i64, m as f64 / 1024.0)))
    })
}

fn left_inverse_holds(x: &TailSeq, u: &FiniteSeq) -> bool {
    let (lo, hi) = u.support().unwrap_or((0, 0));
    ((lo - 5)..=(hi + 5)).all(|i| x.get(i - 1) - x.get(i) == u.get(i))
}

proptest! {
    #[test]
    fn t0_and_t1_invert_s_minus_i(u in dyadic()) {
        prop_assert!(left_inverse_holds(&t0_apply(&u), &u));
        prop_assert!(left_inverse_holds(&t1_apply(&u), &u));
    }

    #[test]
    fn t0_after_s_minus_i_is_identity(u in dyadic()) {
        let x = t0_apply(&shift_minus_identity(&u));
        let (lo, hi) = u.support().unwrap_or((0, 0));
        for i in (lo - 5)..=(hi + 5) {
            // T₀(S−I)u(k) = Σ_{i>k} (u(i−1) − u(i)) = u(k)
            prop_assert_eq!(x.get(i), u.get(i));
        }
    }

    #[test]
    fn t0_equals_t1_on_zero_sum(u in dyadic()) {
        let mut v = u.clone();
        let (lo, hi) = u.support().unwrap_or((0, 0));
        v.add_at(hi + 1, -u.sum());
        prop_assert!(v.in_u0());
        let (a, b) = (t0_apply(&v), t1_apply(&v));
        for k in (lo - 5)..=(hi + 6) {
            prop_assert_eq!(a.get(k), b.get(k));
        }
    }

    #[test]
    fn calderon_norm_matches_brute_force(
        start in -10i64..10,
        v in prop::collection::vec(-1.0..1.0f64, 1..8),
        theta in 0.1..0.9f64,
    ) {
        let c = FiniteSeq::from_pairs(v.iter().enumerate().map(|(j, x)| (start + j as i64, *x)));
        // direct evaluation of S_d over a window wide enough for the tails to vanish
        let sd = |n: i64| -> f64 {
            c.iter().map(|(k, x)| if k <= n { x } else { x * 2f64.powi((n - k) as i32) }).sum()
        };
        let brute: f64 = (-400i64..400).map(|n| (sd(n) * 2f64.powf(-theta * n as f64)).powi(2)).sum::<f64>().sqrt();
        let got = calderon_weighted_norm(&c, theta, 2.0);
        prop_assert!((got - brute).abs() <= 1e-9 * brute.max(1e-12), "{got} vs {brute}");
        prop_assert!(got <= young_constant(theta) * power_weighted_norm(&c, theta, 2.0) * (1.0 + 1e-12));
    }
}

fn grid() -> DyadicGrid {
    DyadicGrid::new(-80, 80).unwrap()
}

#[test]
fn invertibility_regions() {
    let prof = KProfile::two_power(grid(), 0.3, 0.6).unwrap();
    let v = |theta| s_minus_i_invertibility(&prof, ThetaQ::new(theta, 2.0).unwrap()).verdict;
    assert_eq!(v(0.2), Invertibility::InvertibleViaT0);
    assert_eq!(v(0.45), Invertibility::NotInvertible);
    assert_eq!(v(0.7), Invertibility::InvertibleViaT1);
    assert_eq!(v(0.3), Invertibility::NotInvertible);
}

#[test]
fn truncation_growth_follows_invertibility() {
    let prof = KProfile::two_power(grid(), 0.5, 0.5).unwrap();
    let sizes = doubling_schedule(8);
    for q in [1.0, 2.0, f64::INFINITY] {
        let tq = |t| ThetaQ::new(t, q).unwrap();
        let g = |op, t| truncated_norm_growth(op, &prof, tq(t), &sizes).unwrap().verdict;
        assert_eq!(g(SeqOperator::T0, 0.3), Growth::Bounded, "q {q}");
        assert_eq!(g(SeqOperator::T1, 0.7), Growth::Bounded, "q {q}");
        assert_eq!(g(SeqOperator::T0, 0.5), Growth::Diverging, "q {q}");
        assert_eq!(g(SeqOperator::T0, 0.7), Growth::Diverging, "q {q}");
    }
}

#[test]
fn bounded_truncations_approach_geometric_sum() {
    // with weights 2^{k(α−θ)} the T₀ rows are geometric series of ratio 2^{θ−α}
    let prof = KProfile::two_power(grid(), 0.5, 0.5).unwrap();
    let tq = ThetaQ::new(0.25, f64::INFINITY).unwrap();
    let rep = truncated_norm_growth(SeqOperator::T0, &prof, tq, &doubling_schedule(6)).unwrap();
    let r = 2f64.powf(-0.25);
    let limit = r / (1.0 - r);
    let last = rep.rows.last().unwrap().norm;
    assert!(last <= limit * (1.0 + 1e-12));
    assert!(last >= limit * 0.99, "{last} vs {limit}");
}
