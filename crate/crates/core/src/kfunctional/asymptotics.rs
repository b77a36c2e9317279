//! Power-law behaviour of `K(t, f)` as `t → 0` and `t → ∞` for piecewise-power
//! elements of a weighted couple.
//!
//! In `u = ln s` every ingredient is piecewise linear, so `ln K(e^τ, f)` is
//! governed by `sup_u [ln|f| + min(ln w0, τ + ln w1)]` (Laplace principle). Only
//! the leading power at each unbounded end of `f` can produce a slope other
//! than 1 (as `t → 0`) or 0 (as `t → ∞`).

use crate::couples::{PiecewisePower, WeightedCouple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// `s → 0`
    Low,
    /// `s → ∞`
    High,
}

/// Slopes `(as t → 0, as t → ∞)` of `ln K` contributed by a term `c s^e` living
/// at the given end, where `w0 ~ s^a` and `w1 ~ s^b` there. `None` when the term
/// is not integrable against `min(w0, t w1)`, i.e. it is outside `X0 + X1`.
pub fn end_contribution(e: f64, a: f64, b: f64, end: End) -> Option<(f64, f64)> {
    let pp = e + a;
    let pq = e + b;
    match end {
        End::Low => {
            if pp.max(pq) <= 0.0 {
                return None;
            }
            let at_zero = if pp > 0.0 && pq < 0.0 { pp / (pp - pq) } else { 1.0 };
            let at_inf = if pp <= 0.0 && pq > 0.0 { pp / (pp - pq) } else { 0.0 };
            Some((at_zero, at_inf))
        }
        End::High => {
            if pp.min(pq) >= 0.0 {
                return None;
            }
            let at_zero = if pp < 0.0 && pq >= 0.0 { pp / (pp - pq) } else { 1.0 };
            let at_inf = if pq < 0.0 && pp > 0.0 { pp / (pp - pq) } else { 0.0 };
            Some((at_zero, at_inf))
        }
    }
}

/// Weight exponents `(a, b)` of `(w0, w1)` in force at an end.
pub fn end_weight_exponents(couple: &WeightedCouple, end: End) -> (f64, f64) {
    match end {
        End::Low => (couple.w0.a0, couple.w1.a0),
        End::High => (couple.w0.a_inf, couple.w1.a_inf),
    }
}

/// Tail exponents `(θ₀, θ∞)` of `K(·, f)`; `None` for `f = 0` or `f ∉ X0 + X1`.
pub fn tail_exponents(couple: &WeightedCouple, f: &PiecewisePower) -> Option<(f64, f64)> {
    if f.is_zero() {
        return None;
    }
    let mut tail0 = 1.0f64;
    let mut tail_inf = 0.0f64;
    let ends = [
        (End::Low, f.low_end().and_then(|s| s.leading_low())),
        (End::High, f.high_end().and_then(|s| s.leading_high())),
    ];
    for (end, term) in ends {
        if let Some(term) = term {
            let (a, b) = end_weight_exponents(couple, end);
            let (z, i) = end_contribution(term.exp, a, b, end)?;
            tail0 = tail0.min(z);
            tail_inf = tail_inf.max(i);
        }
    }
    Some((tail0, tail_inf))
}
