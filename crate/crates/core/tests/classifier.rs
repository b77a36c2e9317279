use interkernel::classifier::{classify, classify_sweep, factorize, Verdict};
use interkernel::kfunctional::ThetaQ;
use interkernel::worked::{hardy_model, HardyModel};

fn tq(theta: f64, q: f64) -> ThetaQ {
    ThetaQ::new(theta, q).unwrap()
}

/// Hardy kernel `t^{θz}` near 0 and `t^{θi}` near ∞: in `X_θ` near 0 iff `θ < θz`,
/// near ∞ iff `θ > θi`.
fn expected(tz: f64, ti: f64, theta: f64) -> &'static str {
    let (zero, inf) = (theta < tz, theta > ti);
    match (zero, inf) {
        (true, true) => "ClassF1",
        (false, false) => "ClassF2",
        _ => "other",
    }
}

#[test]
fn hardy_grid_of_breakpoints() {
    let bps = [0.2, 0.35, 0.5, 0.65, 0.8];
    for &tz in &bps {
        for &ti in &bps {
            let model = hardy_model(&HardyModel::with_breakpoints(2.0, tz, ti).unwrap()).unwrap();
            for theta in [0.1, 0.275, 0.425, 0.575, 0.725, 0.9] {
                let v = classify(&model, tq(theta, 2.0)).unwrap().verdict;
                match expected(tz, ti, theta) {
                    "ClassF1" => assert_eq!(v, Verdict::ClassF1 { dim_ker: 1 }, "{tz} {ti} {theta}"),
                    "ClassF2" => assert_eq!(v, Verdict::ClassF2 { codim: 1 }, "{tz} {ti} {theta}"),
                    _ => assert!(
                        matches!(v, Verdict::Invertible | Verdict::NotFredholm { .. }),
                        "{tz} {ti} {theta}: {v:?}"
                    ),
                }
            }
        }
    }
}

#[test]
fn sweep_agrees_with_pointwise() {
    let model = hardy_model(&HardyModel::with_breakpoints(2.0, 0.5, 0.25).unwrap()).unwrap();
    let thetas: Vec<f64> = (1..40).map(|k| k as f64 / 40.0).collect();
    for q in [1.0, 2.0, f64::INFINITY] {
        let sweep = classify_sweep(&model, q, &thetas).unwrap();
        for (c, &t) in sweep.iter().zip(&thetas) {
            assert_eq!(c.verdict, classify(&model, tq(t, q)).unwrap().verdict);
        }
    }
}

#[test]
fn breakpoints_at_infinite_q_are_boundary() {
    let model = hardy_model(&HardyModel::with_breakpoints(2.0, 0.5, 0.25).unwrap()).unwrap();
    for theta in [0.25, 0.5] {
        let c = classify(&model, tq(theta, f64::INFINITY)).unwrap();
        assert!(matches!(c.verdict, Verdict::Boundary { .. }), "{theta}: {:?}", c.verdict);
        let c = classify(&model, tq(theta, 2.0)).unwrap();
        assert!(matches!(c.verdict, Verdict::NotFredholm { .. }), "{theta}: {:?}", c.verdict);
    }
}

#[test]
fn factorization_certificates() {
    let model = hardy_model(&HardyModel::with_breakpoints(2.0, 0.5, 0.25).unwrap()).unwrap();
    let data = factorize(&model, tq(0.4, 2.0)).unwrap();
    assert!(data.verified());
    assert!(factorize(&model, tq(0.4, f64::INFINITY)).is_err());
}
