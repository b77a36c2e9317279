use interkernel::couples::{eval_lp_norm, PiecewisePower, PowerTerm, PowerWeight, Segment, WeightedCouple};
use interkernel::kfunctional::{equivalence_factor, k_p};
use proptest::prelude::*;

/// Composite Simpson in `u = ln s`, split at the given cut points.
fn simpson_log(g: impl Fn(f64) -> f64, lo: f64, hi: f64, cuts: &[f64]) -> f64 {
    let mut pts = vec![lo.ln()];
    pts.extend(cuts.iter().filter(|c| **c > lo && **c < hi).map(|c| c.ln()));
    pts.push(hi.ln());
    pts.sort_by(f64::total_cmp);
    let n = 2000;
    let mut total = 0.0;
    for w in pts.windows(2) {
        let h = (w[1] - w[0]) / n as f64;
        let mut s = g(w[0].exp()) + g(w[1].exp());
        for i in 1..n {
            let u = w[0] + i as f64 * h;
            s += g(u.exp()) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    total
}

/// `K_p^p = ∫ |f|^p (w0^{-p'} + (t w1)^{-p'})^{-p/p'} ds/s`, or the pointwise min when `p = 1`.
fn k_p_oracle(c: &WeightedCouple, f: &PiecewisePower, t: f64) -> f64 {
    let p = c.p;
    let kernel = |s: f64| {
        let (x, y) = (c.w0.eval(s), t * c.w1.eval(s));
        if p == 1.0 {
            x.min(y)
        } else {
            let pc = p / (p - 1.0);
            (x.powf(-pc) + y.powf(-pc)).powf(-1.0 / pc)
        }
    };
    let mut total = 0.0;
    for seg in f.segments() {
        let (a, b) = (c.w0.exponent_at(seg.hi()), c.w1.exponent_at(seg.hi()));
        let mut cuts = vec![1.0];
        if a != b {
            cuts.push(((t * c.w1.scale / c.w0.scale).ln() / (a - b)).exp());
        }
        total += simpson_log(|s| (seg.eval(s).abs() * kernel(s)).powf(p), seg.lo(), seg.hi(), &cuts);
    }
    total.powf(1.0 / p)
}

fn element(lo: f64, width: f64, terms: &[(f64, f64)]) -> PiecewisePower {
    let terms = terms.iter().map(|&(c, e)| PowerTerm::new(c, e)).collect();
    PiecewisePower::new(vec![Segment::new(lo, lo * width, terms).unwrap()]).unwrap()
}

fn couple_strategy() -> impl Strategy<Value = WeightedCouple> {
    (
        prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
    )
        .prop_map(|(p, a0, ai, b0, bi)| {
            WeightedCouple::new(p, PowerWeight::new(a0, ai, 1.0).unwrap(), PowerWeight::new(b0, bi, 1.0).unwrap())
                .unwrap()
        })
}

fn element_strategy() -> impl Strategy<Value = PiecewisePower> {
    (
        0.01..10.0f64,
        1.5..100.0f64,
        prop::collection::vec((-2.0..2.0f64, -1.5..1.5f64), 1..3),
    )
        .prop_map(|(lo, w, terms)| element(lo, w, &terms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_quadrature_oracle(c in couple_strategy(), f in element_strategy(), lt in -6.0..6.0f64) {
        let t = lt.exp();
        let (got, want) = (k_p(&c, &f, t), k_p_oracle(&c, &f, t));
        prop_assert!((got - want).abs() <= 1e-6 * want.max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn homogeneous(c in couple_strategy(), f in element_strategy(), lam in -5.0..5.0f64, lt in -4.0..4.0f64) {
        let t = lt.exp();
        let (a, b) = (k_p(&c, &f.scale(lam), t), lam.abs() * k_p(&c, &f, t));
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-300));
    }

    #[test]
    fn triangle(c in couple_strategy(), f in element_strategy(), g in element_strategy(), lt in -4.0..4.0f64) {
        let t = lt.exp();
        let lhs = k_p(&c, &f.add(&g), t);
        prop_assert!(lhs <= (k_p(&c, &f, t) + k_p(&c, &g, t)) * (1.0 + 1e-9));
    }

    #[test]
    fn increasing_and_concave(c in couple_strategy(), f in element_strategy(), lt in -4.0..4.0f64) {
        let t = lt.exp();
        let (k1, k2) = (k_p(&c, &f, t), k_p(&c, &f, 2.0 * t));
        prop_assert!(k1 <= k2 * (1.0 + 1e-12));
        prop_assert!(k2 <= 2.0 * k1 * (1.0 + 1e-12));
    }

    #[test]
    fn below_endpoint_norms(c in couple_strategy(), f in element_strategy(), lt in -4.0..4.0f64) {
        let t = lt.exp();
        let k = k_p(&c, &f, t);
        let bound = eval_lp_norm(&f, c.p, &c.w0).min(t * eval_lp_norm(&f, c.p, &c.w1));
        prop_assert!(k <= bound * (1.0 + 1e-9));
    }
}

#[test]
fn reference_element_profile() {
    let c = WeightedCouple::reference_l1();
    for theta in [0.1, 0.3, 0.5, 0.9] {
        let a = interkernel::couples::a_theta_element(theta).unwrap();
        for t in [1e-3, 0.5, 1.0, 7.0, 1e4] {
            let k = k_p(&c, &a, t);
            assert!((k / t.powf(theta) - 1.0).abs() < 1e-12, "theta {theta}, t {t}: {k}");
        }
    }
}

#[test]
fn equivalence_factor_values() {
    assert_eq!(equivalence_factor(1.0), 1.0);
    assert!((equivalence_factor(2.0) - 2f64.sqrt()).abs() < 1e-15);
}
