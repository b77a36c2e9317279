//! Dyadic sequence spaces `ℓ_{θ,q}(x)` and the operators `S − I`, `T₀`, `T₁`
//! and the discrete Calderón operator.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::couples::integrals::log_add_exp;
use crate::error::{invalid, Result};
use crate::indices::indices_of_profile;
use crate::kfunctional::{KProfile, ThetaQ};

/// Default absolute tolerance for comparing `θ` with an index.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Finitely supported sequence `Σ ηᵢ eᵢ`; zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteSeq {
    entries: BTreeMap<i64, f64>,
}

impl FiniteSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: i64) -> Self {
        Self::from_pairs([(i, 1.0)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut s = Self::zero();
        for (i, v) in pairs {
            s.add_at(i, v);
        }
        s
    }

    pub fn add_at(&mut self, i: i64, v: f64) {
        let e = self.entries.entry(i).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.entries.remove(&i);
        }
    }

    pub fn get(&self, i: i64) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, *v))
    }

    /// `(min, max)` of the support.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.entries.keys().next()?, *self.entries.keys().next_back()?))
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Membership in `U⁰`: finite sequences with zero sum.
    pub fn in_u0(&self) -> bool {
        self.sum() == 0.0
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (i, v) in other.iter() {
            s.add_at(i, -v);
        }
        s
    }
}

/// A finite body plus optional constant tails: `left.1` on every `k < left.0`
/// and `right.1` on every `k > right.0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TailSeq {
    pub body: FiniteSeq,
    pub left: Option<(i64, f64)>,
    pub right: Option<(i64, f64)>,
}

impl TailSeq {
    pub fn finite(body: FiniteSeq) -> Self {
        Self {
            body,
            left: None,
            right: None,
        }
    }

    pub fn get(&self, k: i64) -> f64 {
        match (self.left, self.right) {
            (Some((edge, v)), _) if k < edge => v,
            (_, Some((edge, v))) if k > edge => v,
            _ => self.body.get(k),
        }
    }

    /// The underlying finite sequence when both tails are absent.
    pub fn as_finite(&self) -> Option<&FiniteSeq> {
        (self.left.is_none() && self.right.is_none()).then_some(&self.body)
    }
}

/// `(S − I)(Σ ηᵢ eᵢ) = Σ (η_{i−1} − ηᵢ) eᵢ`.
pub fn shift_minus_identity(u: &FiniteSeq) -> FiniteSeq {
    let mut out = FiniteSeq::zero();
    for (i, v) in u.iter() {
        out.add_at(i + 1, v);
        out.add_at(i, -v);
    }
    out
}

/// `T₀(Σ ηᵢ eᵢ) = Σ_k (Σ_{i>k} ηᵢ) e_k`; the sum of `u` survives as a left tail.
pub fn t0_apply(u: &FiniteSeq) -> TailSeq {
    let Some((lo, hi)) = u.support() else {
        return TailSeq::default();
    };
    let mut body = FiniteSeq::zero();
    let mut acc = 0.0;
    for k in (lo..hi).rev() {
        acc += u.get(k + 1);
        body.add_at(k, acc);
    }
    let total = acc + u.get(lo);
    TailSeq {
        body,
        left: (total != 0.0).then_some((lo, total)),
        right: None,
    }
}

/// `T₁(Σ ηᵢ eᵢ) = −Σ_k (Σ_{i≤k} ηᵢ) e_k`; minus the sum survives as a right tail.
pub fn t1_apply(u: &FiniteSeq) -> TailSeq {
    let Some((lo, hi)) = u.support() else {
        return TailSeq::default();
    };
    let mut body = FiniteSeq::zero();
    let mut acc = 0.0;
    for k in lo..hi {
        acc += u.get(k);
        body.add_at(k, -acc);
    }
    let total = acc + u.get(hi);
    TailSeq {
        body,
        left: None,
        right: (total != 0.0).then_some((hi - 1, -total)),
    }
}

/// `S_d(c)(2^n) = Σ_{k≤n} c_k + 2^n Σ_{k>n} c_k 2^{-k}` for `n` in `lo..=hi`.
pub fn calderon_discrete(c: &FiniteSeq, lo: i64, hi: i64) -> Vec<(i64, f64)> {
    (lo..=hi).map(|n| (n, calderon_at(c, n))).collect()
}

fn calderon_at(c: &FiniteSeq, n: i64) -> f64 {
    c.iter()
        .map(|(k, v)| if k <= n { v } else { v * 2f64.powi((n - k) as i32) })
        .sum()
}

/// Norm constant of `S_d` on `ℓ^q(2^{-nθ})` from Young's inequality:
/// `1/(1 − 2^{−θ}) + 2^{θ−1}/(1 − 2^{θ−1})`.
pub fn young_constant(theta: f64) -> f64 {
    1.0 / (1.0 - 2f64.powf(-theta)) + 2f64.powf(theta - 1.0) / (1.0 - 2f64.powf(theta - 1.0))
}

/// `‖(2^{-nθ} aₙ)‖_q` of a finite sequence.
pub fn power_weighted_norm(c: &FiniteSeq, theta: f64, q: f64) -> f64 {
    lq_norm(c.iter().map(|(n, v)| v * 2f64.powf(-theta * n as f64)), q)
}

/// `‖(2^{-nθ} S_d(c)(2^n))‖_q` over all `n ∈ Z`, tails summed in closed form.
pub fn calderon_weighted_norm(c: &FiniteSeq, theta: f64, q: f64) -> f64 {
    let Some((lo, hi)) = c.support() else {
        return 0.0;
    };
    let body = calderon_discrete(c, lo, hi)
        .into_iter()
        .map(|(n, v)| v * 2f64.powf(-theta * n as f64));
    // n > hi: S_d = Σ c_k; n < lo: S_d = 2^n Σ c_k 2^{-k}
    let total = c.sum();
    let moment: f64 = c.iter().map(|(k, v)| v * 2f64.powi(-k as i32)).sum();
    let right_first = (total * 2f64.powf(-theta * (hi + 1) as f64)).abs();
    let left_first = (moment * 2f64.powf((1.0 - theta) * (lo - 1) as f64)).abs();
    if q.is_infinite() {
        return body.fold(right_first.max(left_first), |m, v| m.max(v.abs()));
    }
    let body_sum: f64 = body.map(|v| v.abs().powf(q)).sum();
    let right = right_first.powf(q) / (1.0 - 2f64.powf(-theta * q));
    let left = left_first.powf(q) / (1.0 - 2f64.powf(-(1.0 - theta) * q));
    (body_sum + right + left).powf(1.0 / q)
}

fn lq_norm(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values.map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Weights `K(2^i, x) / 2^{θi}` of `ℓ_{θ,q}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqSpaceWeight {
    pub profile: KProfile,
    pub tq: ThetaQ,
}

impl SeqSpaceWeight {
    pub fn new(profile: KProfile, tq: ThetaQ) -> Self {
        Self { profile, tq }
    }

    /// `ln` of the weight at `i`; `None` beyond the grid without a tail.
    pub fn ln_weight(&self, i: i64) -> Option<f64> {
        let ln_k = self.profile.ln_value_extended(i)?;
        Some(ln_k - self.tq.theta() * i as f64 * std::f64::consts::LN_2)
    }

    pub fn weight(&self, i: i64) -> Option<f64> {
        self.ln_weight(i).map(f64::exp)
    }
}

/// `‖Σ ηᵢ eᵢ‖_{ℓ_{θ,q}(x)}` including constant tails.
pub fn seq_norm(u: &TailSeq, w: &SeqSpaceWeight) -> Result<f64> {
    let q = w.tq.q();
    let q_inf = w.tq.q_is_infinite();
    let theta = w.tq.theta();
    let grid = w.profile.grid();
    let missing = |side: &str| invalid("profile", format!("tail exponent at {side} needed for an infinite tail"));
    let mut parts: Vec<f64> = Vec::new(); // q-th powers, or absolute values when q = ∞

    let mut push = |i: i64, v: f64| -> Result<()> {
        let lw = w.ln_weight(i).ok_or_else(|| missing("the grid edge"))?;
        let x = v.abs() * lw.exp();
        parts.push(if q_inf { x } else { x.powf(q) });
        Ok(())
    };
    let body_lo = u.left.map_or(i64::MIN, |(e, _)| e);
    let body_hi = u.right.map_or(i64::MAX, |(e, _)| e);
    for (i, v) in u.body.iter() {
        if i >= body_lo && i <= body_hi {
            push(i, v)?;
        }
    }

    let mut tail_total = 0.0f64;
    if let Some((edge, c)) = u.left {
        let theta0 = w.profile.tail0().ok_or_else(|| missing("0"))?;
        // explicit part down to the grid, geometric below
        let start = (grid.k_min() as i64).min(edge);
        for i in start..edge {
            push(i, c)?;
        }
        let first = w.ln_weight(start - 1).unwrap();
        let g = geometric_tail(c.abs() * first.exp(), theta0 - theta, q, q_inf);
        tail_total = if q_inf { tail_total.max(g) } else { tail_total + g };
    }
    if let Some((edge, c)) = u.right {
        let theta_inf = w.profile.tail_inf().ok_or_else(|| missing("infinity"))?;
        let stop = (grid.k_max() as i64).max(edge);
        for i in (edge + 1)..=stop {
            push(i, c)?;
        }
        let first = w.ln_weight(stop + 1).unwrap();
        let g = geometric_tail(c.abs() * first.exp(), theta - theta_inf, q, q_inf);
        tail_total = if q_inf { tail_total.max(g) } else { tail_total + g };
    }
    if q_inf {
        Ok(parts.into_iter().fold(tail_total, f64::max))
    } else {
        Ok((parts.into_iter().sum::<f64>() + tail_total).powf(1.0 / q))
    }
}

/// `Σ_{j≥0} (first · 2^{-decay j})^q`, or its sup for `q = ∞`.
fn geometric_tail(first: f64, decay: f64, q: f64, q_inf: bool) -> f64 {
    if first == 0.0 {
        return 0.0;
    }
    if q_inf {
        return if decay >= 0.0 { first } else { f64::INFINITY };
    }
    if decay <= 0.0 {
        return f64::INFINITY;
    }
    first.powf(q) / (1.0 - 2f64.powf(-decay * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invertibility {
    /// `θ < α(x)`; the inverse is `T₀`.
    InvertibleViaT0,
    /// `θ > β(x)`; the inverse is `T₁`.
    InvertibleViaT1,
    NotInvertible,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertibilityVerdict {
    pub verdict: Invertibility,
    pub boundary: bool,
}

/// Is `S − I` invertible on `ℓ_{θ,q}(x)`? Exactly when `θ ∉ [α(x), β(x)]`.
pub fn s_minus_i_invertibility(profile: &KProfile, tq: ThetaQ) -> InvertibilityVerdict {
    s_minus_i_invertibility_tol(profile, tq, BOUNDARY_TOL)
}

pub fn s_minus_i_invertibility_tol(profile: &KProfile, tq: ThetaQ, tol: f64) -> InvertibilityVerdict {
    let undetermined = InvertibilityVerdict {
        verdict: Invertibility::Undetermined,
        boundary: true,
    };
    let Ok(set) = indices_of_profile(profile) else {
        return undetermined;
    };
    if !(set.alpha.is_finite() && set.beta.is_finite()) {
        return undetermined;
    }
    let theta = tq.theta();
    let tol = tol + set.tolerance;
    let boundary = (theta - set.alpha).abs() <= tol || (theta - set.beta).abs() <= tol;
    let verdict = if boundary {
        Invertibility::NotInvertible
    } else if theta < set.alpha {
        Invertibility::InvertibleViaT0
    } else if theta > set.beta {
        Invertibility::InvertibleViaT1
    } else {
        Invertibility::NotInvertible
    };
    InvertibilityVerdict { verdict, boundary }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeqOperator {
    T0,
    T1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Growth {
    Bounded,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    /// Operator norm of the truncation (a lower bound when `overflow` is set).
    pub norm: f64,
    /// `ln norm`, finite even when `norm` overflows.
    pub ln_norm: f64,
    /// The norm exceeded floating-point range; only a lower bound is reported.
    pub overflow: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub op: SeqOperator,
    pub rows: Vec<GrowthRow>,
    pub verdict: Growth,
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,norm,ln_norm,overflow\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.16e},{:.16e},{}", r.n, r.norm, r.ln_norm, r.overflow);
        }
        out
    }

    /// `norm(N) / norm(N/2)` for consecutive rows (`∞` past the float range).
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| (w[1].ln_norm - w[0].ln_norm).exp()).collect()
    }
}

/// Window sizes `1, 2, 4, …, 2^max_pow`.
pub fn doubling_schedule(max_pow: u32) -> Vec<usize> {
    (0..=max_pow).map(|j| 1usize << j).collect()
}

/// A last doubling step growing by more than this factor means divergence.
const GROWTH_FACTOR: f64 = 1.05;
/// Beyond `e^300` the products `AᵀA y` formed by power iteration would
/// overflow; such matrices are handled in log form only.
const LN_OVERFLOW: f64 = 300.0;
const POWER_ITERATIONS: usize = 50;
const POWER_TOL: f64 = 1e-10;

/// Norms of `P_N T P_N` on `ℓ_{θ,q}(x)` (supports in `[−N, N]`) along `sizes`.
pub fn truncated_norm_growth(
    op: SeqOperator,
    profile: &KProfile,
    tq: ThetaQ,
    sizes: &[usize],
) -> Result<GrowthReport> {
    let w = SeqSpaceWeight::new(profile.clone(), tq);
    let rows: Vec<GrowthRow> = sizes
        .par_iter()
        .map(|&n| truncated_norm(op, &w, n))
        .collect::<Result<_>>()?;
    let diverging = rows.iter().any(|r| r.overflow)
        || rows
            .windows(2)
            .last()
            .is_some_and(|w| w[1].norm > GROWTH_FACTOR * w[0].norm);
    Ok(GrowthReport {
        op,
        rows,
        verdict: if diverging {
            Growth::Diverging
        } else {
            Growth::Bounded
        },
    })
}

fn truncated_norm(op: SeqOperator, w: &SeqSpaceWeight, n: usize) -> Result<GrowthRow> {
    let n = n as i64;
    let lw: Vec<f64> = (-n..=n)
        .map(|i| {
            w.ln_weight(i)
                .ok_or_else(|| invalid("profile", format!("no weight at index {i}; extend the grid or add tails")))
        })
        .collect::<Result<_>>()?;
    // T₁ is T₀ mirrored: reverse the index order (signs do not affect norms)
    let lw: Vec<f64> = match op {
        SeqOperator::T0 => lw,
        SeqOperator::T1 => lw.into_iter().rev().collect(),
    };
    // strictly upper triangular: entry (k, i) = w_k / w_i for i > k (T₀);
    // for T₁ the diagonal is included
    let diag = op == SeqOperator::T1;
    let ln_rows = ln_row_sums(&lw, diag);
    let ln_cols = ln_col_sums(&lw, diag);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (ln_inf, ln_one) = (max(&ln_rows), max(&ln_cols));
    let q = w.tq.q();
    let row = |ln: f64, converged: bool| GrowthRow {
        n: n as usize,
        norm: ln.exp(),
        ln_norm: ln,
        overflow: ln > LN_OVERFLOW,
        converged,
    };
    if w.tq.q_is_infinite() {
        return Ok(row(ln_inf, true));
    }
    if q == 1.0 {
        return Ok(row(ln_one, true));
    }
    let ln_upper = 0.5 * (ln_inf + ln_one);
    if ln_upper > LN_OVERFLOW {
        // report the largest entry, a lower bound for every ℓ^q norm
        let ln = ln_max_entry(&lw, diag);
        return Ok(GrowthRow {
            n: n as usize,
            norm: ln.exp(),
            ln_norm: ln,
            overflow: true,
            converged: false,
        });
    }
    let (norm, converged) = power_iteration(&lw, diag);
    Ok(GrowthRow {
        n: n as usize,
        norm,
        ln_norm: norm.ln(),
        overflow: false,
        converged,
    })
}

/// `ln Σ_{i>k} w_k/w_i` per row `k` (with `i = k` too when `diag`).
fn ln_row_sums(lw: &[f64], diag: bool) -> Vec<f64> {
    let m = lw.len();
    let mut out = vec![f64::NEG_INFINITY; m];
    // S_k = Σ_{i>k} e^{lw_k - lw_i} = e^{lw_k - lw_{k+1}} (1 + S_{k+1})
    let mut s = f64::NEG_INFINITY;
    for k in (0..m).rev() {
        if k + 1 < m {
            s = lw[k] - lw[k + 1] + log_add_exp(0.0, s);
        }
        out[k] = if diag { log_add_exp(0.0, s) } else { s };
    }
    out
}

/// `ln Σ_{k<i} w_k/w_i` per column `i` (with `k = i` too when `diag`).
fn ln_col_sums(lw: &[f64], diag: bool) -> Vec<f64> {
    let m = lw.len();
    let mut out = vec![f64::NEG_INFINITY; m];
    let mut s = f64::NEG_INFINITY;
    for i in 0..m {
        if i > 0 {
            s = lw[i - 1] - lw[i] + log_add_exp(0.0, s);
        }
        out[i] = if diag { log_add_exp(0.0, s) } else { s };
    }
    out
}

fn ln_max_entry(lw: &[f64], diag: bool) -> f64 {
    // max over k < i of lw_k - lw_i
    let mut best = if diag { 0.0 } else { f64::NEG_INFINITY };
    let mut running = f64::NEG_INFINITY;
    for &l in lw {
        best = best.max(running - l);
        running = running.max(l);
    }
    best
}

/// Largest singular value of the weighted matrix by power iteration on `AᵀA`.
fn power_iteration(lw: &[f64], diag: bool) -> (f64, bool) {
    let m = lw.len();
    let apply = |y: &[f64]| -> Vec<f64> {
        // z_k = Σ_{i>k} e^{lw_k - lw_i} y_i (+ y_k)
        let mut z = vec![0.0; m];
        let mut acc = 0.0;
        for k in (0..m).rev() {
            if k + 1 < m {
                acc = (lw[k] - lw[k + 1]).exp() * (acc + y[k + 1]);
            }
            z[k] = if diag { acc + y[k] } else { acc };
        }
        z
    };
    let apply_t = |z: &[f64]| -> Vec<f64> {
        // y_i = Σ_{k<i} e^{lw_k - lw_i} z_k (+ z_i)
        let mut y = vec![0.0; m];
        let mut acc = 0.0;
        for i in 0..m {
            if i > 0 {
                acc = (lw[i - 1] - lw[i]).exp() * (acc + z[i - 1]);
            }
            y[i] = if diag { acc + z[i] } else { acc };
        }
        y
    };
    // scaled so that squaring cannot overflow
    let norm = |v: &[f64]| {
        let big = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if big == 0.0 {
            return 0.0;
        }
        big * v.iter().map(|x| (x / big).powi(2)).sum::<f64>().sqrt()
    };
    if m == 1 {
        return (if diag { 1.0 } else { 0.0 }, true);
    }
    let mut y = vec![1.0 / (m as f64).sqrt(); m];
    let mut sigma = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let z = apply(&y);
        let next_sigma = norm(&z);
        let mut v = apply_t(&z);
        let nv = norm(&v);
        if nv == 0.0 {
            return (next_sigma, true);
        }
        v.iter_mut().for_each(|x| *x /= nv);
        y = v;
        if (next_sigma - sigma).abs() <= POWER_TOL * next_sigma {
            return (next_sigma, true);
        }
        sigma = next_sigma;
    }
    (sigma, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couples::DyadicGrid;

    fn seq(p: &[(i64, f64)]) -> FiniteSeq {
        FiniteSeq::from_pairs(p.iter().copied())
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_minus_identity(&FiniteSeq::basis(0)), seq(&[(1, 1.0), (0, -1.0)]));
        let window = seq(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)]);
        assert_eq!(shift_minus_identity(&window), seq(&[(4, 1.0), (0, -1.0)]));
        assert!(shift_minus_identity(&FiniteSeq::zero()).is_zero());
    }

    #[test]
    fn t0_examples() {
        let img = t0_apply(&FiniteSeq::basis(0));
        assert_eq!(img.left, Some((0, 1.0)));
        assert!(img.body.is_zero());
        for k in -5..5 {
            assert_eq!(img.get(k), if k < 0 { 1.0 } else { 0.0 });
        }
        let n = -3;
        let img = t0_apply(&seq(&[(n, 1.0), (0, -1.0)]));
        assert_eq!(img.left, None);
        assert_eq!(img.body, seq(&[(-3, -1.0), (-2, -1.0), (-1, -1.0)]));
    }

    #[test]
    fn t1_examples() {
        let img = t1_apply(&FiniteSeq::basis(0));
        for k in -5..5 {
            assert_eq!(img.get(k), if k >= 0 { -1.0 } else { 0.0 });
        }
        assert_eq!(t1_apply(&FiniteSeq::zero()), TailSeq::default());
        let u = seq(&[(-2, 3.0), (1, -5.0), (4, 2.0)]);
        assert_eq!(t0_apply(&u), t1_apply(&u));
        let back = shift_minus_identity(t0_apply(&u).as_finite().unwrap());
        assert_eq!(back, u);
    }

    #[test]
    fn calderon_examples() {
        let d = calderon_discrete(&FiniteSeq::basis(0), -3, 3);
        for (n, v) in d {
            assert_eq!(v, if n < 0 { 2f64.powi(n as i32) } else { 1.0 });
        }
        assert!(calderon_discrete(&FiniteSeq::zero(), -2, 2).iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn calderon_norm_tails_match_long_window() {
        let c = seq(&[(-1, 2.0), (0, -1.0), (2, 0.5)]);
        let (theta, q) = (0.4, 2.0);
        let exact = calderon_weighted_norm(&c, theta, q);
        let brute: f64 = calderon_discrete(&c, -400, 400)
            .into_iter()
            .map(|(n, v)| (v * 2f64.powf(-theta * n as f64)).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((exact - brute).abs() < 1e-12 * brute);
        assert!(exact <= young_constant(theta) * power_weighted_norm(&c, theta, q));
    }

    fn weight(theta: f64, q: f64) -> SeqSpaceWeight {
        let p = KProfile::two_power(DyadicGrid::new(-20, 20).unwrap(), 0.5, 0.5).unwrap();
        SeqSpaceWeight::new(p, ThetaQ::new(theta, q).unwrap())
    }

    #[test]
    fn seq_norm_examples() {
        let w = weight(0.3, 2.0);
        let single = seq_norm(&TailSeq::finite(FiniteSeq::basis(3)), &w).unwrap();
        assert!((single - 2f64.powf(0.5 * 3.0 - 0.3 * 3.0)).abs() < 1e-12);
        let ones_left = t0_apply(&FiniteSeq::basis(0));
        assert!(seq_norm(&ones_left, &weight(0.5, 2.0)).unwrap().is_infinite());
        // θ = 0.3 < 0.5: Σ_{k<0} 2^{0.4k}
        let got = seq_norm(&ones_left, &w).unwrap();
        let r = 2f64.powf(-0.4);
        assert!((got - (r / (1.0 - r)).sqrt()).abs() < 1e-12, "{got}");
        let sup = seq_norm(&ones_left, &weight(0.5, f64::INFINITY)).unwrap();
        assert!((sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn criterion_examples() {
        let p = KProfile::two_power(DyadicGrid::default(), 0.5, 0.5).unwrap();
        let at = |theta| s_minus_i_invertibility(&p, ThetaQ::new(theta, 2.0).unwrap());
        assert_eq!(at(0.3).verdict, Invertibility::InvertibleViaT0);
        let mid = at(0.5);
        assert_eq!(mid.verdict, Invertibility::NotInvertible);
        assert!(mid.boundary);
        assert_eq!(at(0.8).verdict, Invertibility::InvertibleViaT1);
    }

    #[test]
    fn growth_examples() {
        let p = KProfile::two_power(DyadicGrid::default(), 0.5, 0.5).unwrap();
        let sizes = doubling_schedule(10);
        let tq = ThetaQ::new(0.3, 2.0).unwrap();
        let r = truncated_norm_growth(SeqOperator::T0, &p, tq, &sizes).unwrap();
        assert_eq!(r.verdict, Growth::Bounded);
        let bound = 1.0 / (1.0 - 2f64.powf(-0.2));
        let sup = r.rows.iter().map(|r| r.norm).fold(0.0, f64::max);
        assert!(sup <= bound && sup >= bound / 2.0, "{sup} {bound}");
        let at = truncated_norm_growth(SeqOperator::T0, &p, tq.with_theta(0.5).unwrap(), &sizes).unwrap();
        assert_eq!(at.verdict, Growth::Diverging);
        let t1 = truncated_norm_growth(SeqOperator::T1, &p, tq.with_theta(0.3).unwrap(), &sizes).unwrap();
        assert_eq!(t1.verdict, Growth::Diverging);
        let t1 = truncated_norm_growth(SeqOperator::T1, &p, tq.with_theta(0.8).unwrap(), &sizes).unwrap();
        assert_eq!(t1.verdict, Growth::Bounded);
    }

    #[test]
    fn one_point_window() {
        // N = 1: a 3×3 matrix; q = ∞ gives the largest row sum
        let p = KProfile::two_power(DyadicGrid::default(), 0.5, 0.5).unwrap();
        let tq = ThetaQ::new(0.3, f64::INFINITY).unwrap();
        let r = truncated_norm_growth(SeqOperator::T0, &p, tq, &[1]).unwrap();
        let w = |i: f64| 2f64.powf(0.2 * i);
        let want = (w(-1.0) / w(0.0) + w(-1.0) / w(1.0)).max(w(0.0) / w(1.0));
        assert!((r.rows[0].norm - want).abs() < 1e-14);
    }
}
