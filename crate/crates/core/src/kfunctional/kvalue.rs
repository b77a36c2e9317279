use rayon::prelude::*;

use super::asymptotics::tail_exponents;
use super::profile::KProfile;
use crate::couples::integrals::{log_add_exp, log_integral, power_integral};
use crate::couples::{
    eval_lp_norm, CoupleDescriptor, CoupleKind, DyadicGrid, PiecewisePower, Segment,
    WeightedCouple,
};
use crate::error::{invalid, Error, Result};

/// An element of `X0 + X1` for any supported couple.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Function(PiecewisePower),
    /// `λ` times the generating element of a sequence couple.
    Multiple(f64),
}

impl From<PiecewisePower> for Element {
    fn from(f: PiecewisePower) -> Self {
        Self::Function(f)
    }
}

/// `K(t, x)`; for weighted couples with `p > 1` this is the p-averaged
/// functional `K_p = inf (‖x₀‖₀ᵖ + tᵖ‖x₁‖₁ᵖ)^{1/p}`, which satisfies
/// `K_p <= K <= 2^{1-1/p} K_p`. Returns `+∞` when `x ∉ X0 + X1`.
pub fn k_functional(couple: &CoupleDescriptor, x: &Element, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive and finite, got {t}")));
    }
    match (&couple.kind, x) {
        (CoupleKind::SequenceCouple { profile }, Element::Multiple(lambda)) => {
            Ok(lambda.abs() * profile.value_at(t))
        }
        (CoupleKind::SequenceCouple { .. }, Element::Function(_)) => Err(Error::MalformedElement(
            "sequence couples take scalar multiples of their generating element".into(),
        )),
        (_, Element::Function(f)) => {
            let wc = couple.as_weighted().ok_or_else(|| {
                invalid("couple", "K of a function needs a weighted couple; use the factor couples of a product")
            })?;
            Ok(k_p(&wc, f, t))
        }
        (_, Element::Multiple(_)) => Err(Error::MalformedElement(
            "scalar elements only exist in sequence couples".into(),
        )),
    }
}

/// Distortion bound `2^{1-1/p}` between `K_p` and the true K-functional.
pub fn equivalence_factor(p: f64) -> f64 {
    2f64.powf(1.0 - 1.0 / p)
}

/// `ln` of the pointwise optimal weight `m(s)` with `K_p(t, f) = ‖f m‖_{Lᵖ(ds/s)}`:
/// `min(w0, t w1)` for `p = 1`, `(w0^{-p'} + (t w1)^{-p'})^{-1/p'}` otherwise.
pub(crate) fn ln_split_weight(p: f64, ln_w0: f64, ln_tw1: f64) -> f64 {
    if p == 1.0 {
        ln_w0.min(ln_tw1)
    } else {
        let pc = p / (p - 1.0);
        -log_add_exp(-pc * ln_w0, -pc * ln_tw1) / pc
    }
}

/// `K_p(t, f)` for a weighted couple.
pub fn k_p(couple: &WeightedCouple, f: &PiecewisePower, t: f64) -> f64 {
    let total: f64 = f
        .refined(&[1.0])
        .segments()
        .iter()
        .map(|seg| segment_k_integral(couple, seg, t))
        .sum();
    total.powf(1.0 / couple.p)
}

fn segment_k_integral(couple: &WeightedCouple, seg: &Segment, t: f64) -> f64 {
    let p = couple.p;
    let mid = seg.interior_point();
    let (a, b) = (couple.w0.exponent_at(mid), couple.w1.exponent_at(mid));
    let ln_a0 = couple.w0.scale.ln();
    let ln_a1 = t.ln() + couple.w1.scale.ln();
    // w0 = e^{ln_a0} s^a, t w1 = e^{ln_a1} s^b; they cross at u_c.
    let crossover = (a != b).then(|| (ln_a1 - ln_a0) / (a - b));

    if p == 1.0 && seg.is_single_signed() {
        let mut cuts = vec![seg.lo()];
        if let Some(uc) = crossover {
            let sc = uc.exp();
            if sc > seg.lo() && sc < seg.hi() {
                cuts.push(sc);
            }
        }
        cuts.push(seg.hi());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let probe = Segment::new(w[0], w[1], Vec::new())
                .expect("sub-interval of a valid segment")
                .interior_point()
                .ln();
            let (ln_c, e) = if ln_a0 + a * probe <= ln_a1 + b * probe {
                (ln_a0, a)
            } else {
                (ln_a1, b)
            };
            for term in seg.terms() {
                let coef = (term.coef.abs().ln() + ln_c).exp();
                total += power_integral(coef, term.exp + e, w[0], w[1]);
            }
        }
        return total;
    }

    let e_lo = seg.leading_low().map_or(0.0, |t| t.exp);
    let e_hi = seg.leading_high().map_or(0.0, |t| t.exp);
    let features: Vec<f64> = crossover.into_iter().collect();
    log_integral(
        |u| p * (seg.log_abs(u) + ln_split_weight(p, ln_a0 + a * u, ln_a1 + b * u)),
        seg.lo(),
        seg.hi(),
        p * (e_lo + a.max(b)),
        p * (e_hi + a.min(b)),
        &features,
    )
    .exp()
}

/// `J(t, x) = max(‖x‖₀, t‖x‖₁)` for `x ∈ X0 ∩ X1`.
pub fn j_functional(couple: &CoupleDescriptor, x: &PiecewisePower, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let wc = couple
        .as_weighted()
        .ok_or_else(|| invalid("couple", "J-functional needs a weighted couple"))?;
    let n0 = eval_lp_norm(x, wc.p, &wc.w0);
    let n1 = eval_lp_norm(x, wc.p, &wc.w1);
    if n0.is_infinite() || n1.is_infinite() {
        return Err(Error::NotInIntersection {
            norm0: n0,
            norm1: n1,
        });
    }
    Ok(n0.max(t * n1))
}

/// K-profile of `f` on the grid with analytic tails attached.
pub fn profile_of(couple: &WeightedCouple, f: &PiecewisePower, grid: DyadicGrid) -> Result<KProfile> {
    let (tail0, tail_inf) = tail_exponents(couple, f).ok_or_else(|| {
        Error::MalformedElement(format!("element is zero or not in X0 + X1: {f}"))
    })?;
    let values: Vec<f64> = grid
        .exponents()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| k_p(couple, f, 2f64.powi(k)))
        .collect();
    KProfile::new(
        grid,
        values,
        Some(tail0),
        Some(tail_inf),
        equivalence_factor(couple.p),
    )
}
