//! The identity-minus-Hardy operator on power-weighted Lᵖ and the Laplace
//! operator on a strip, end to end.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classifier::{classify, classify_sweep, Classification, KernelBasis, OperatorModel};
use crate::couples::{eval_lp_norm, CoupleDescriptor, DyadicGrid, PiecewisePower, PowerTerm, PowerWeight, Segment, WeightedCouple};
use crate::error::{invalid, Error, Result};
use crate::kfunctional::{profile_of, KProfile, ThetaQ};

/// Breakpoints closer than this count as equal.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// `ω0 = t^{a0}, t^{a_inf}` and `ω1 = t^{b0}, t^{b_inf}` (below and above `t = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyModel {
    pub p: f64,
    pub a0: f64,
    pub a_inf: f64,
    pub b0: f64,
    pub b_inf: f64,
}

impl HardyModel {
    pub fn new(p: f64, a0: f64, a_inf: f64, b0: f64, b_inf: f64) -> Result<Self> {
        let m = Self { p, a0, a_inf, b0, b_inf };
        m.validate()?;
        Ok(m)
    }

    /// The model whose kernel profile has the given tail exponents, with `b = a - 1`.
    pub fn with_breakpoints(p: f64, theta_zero: f64, theta_inf: f64) -> Result<Self> {
        Self::new(p, theta_zero, theta_inf, theta_zero - 1.0, theta_inf - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(invalid("p", format!("must be finite and >= 1, got {}", self.p)));
        }
        for (name, a) in [("a0", self.a0), ("a_inf", self.a_inf)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {a}")));
            }
        }
        for (name, b) in [("b0", self.b0), ("b_inf", self.b_inf)] {
            if !(b < 0.0 && b.is_finite()) {
                return Err(invalid(name, format!("must be negative, got {b}")));
            }
        }
        Ok(())
    }

    pub fn theta_zero(&self) -> f64 {
        self.a0 / (self.a0 - self.b0)
    }

    pub fn theta_inf(&self) -> f64 {
        self.a_inf / (self.a_inf - self.b_inf)
    }

    pub fn w0(&self) -> PowerWeight {
        PowerWeight {
            a0: self.a0,
            a_inf: self.a_inf,
            scale: 1.0,
        }
    }

    pub fn w1(&self) -> PowerWeight {
        PowerWeight {
            a0: self.b0,
            a_inf: self.b_inf,
            scale: 1.0,
        }
    }

    pub fn couple(&self) -> WeightedCouple {
        WeightedCouple {
            p: self.p,
            w0: self.w0(),
            w1: self.w1(),
        }
    }
}

/// `f_*(t) = 1`, spanning the kernel of `I − H` in the sum.
pub fn f_star() -> PiecewisePower {
    PiecewisePower::power(1.0, 0.0)
}

/// `f` on a partition of `(0, ∞)` into consecutive intervals, with empty
/// term lists where `f` vanishes.
fn pieces(f: &PiecewisePower) -> Vec<(f64, f64, Vec<PowerTerm>)> {
    let pts = f.breakpoints();
    let g = f.refined(&pts);
    let mut edges = vec![0.0];
    edges.extend(pts);
    edges.push(f64::INFINITY);
    edges
        .windows(2)
        .map(|w| {
            let terms = g
                .segments()
                .iter()
                .find(|s| s.lo() == w[0] && s.hi() == w[1])
                .map_or_else(Vec::new, |s| s.terms().to_vec());
            (w[0], w[1], terms)
        })
        .collect()
}

fn assemble(parts: Vec<(f64, f64, Vec<PowerTerm>)>) -> Result<PiecewisePower> {
    let segs = parts
        .into_iter()
        .filter(|(_, _, t)| !t.is_empty())
        .map(|(lo, hi, t)| Segment::new(lo, hi, t))
        .collect::<Result<Vec<_>>>()?;
    PiecewisePower::new(segs)
}

fn pow_or_zero(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// `∫_0^t` of `Σ c s^e` plus an offset, as `Σ c/(e+1) t^{e+1} + const`, where
/// `shift` is added to every exponent of the integrand (`−1` for `ds/s`).
/// Returns the antiderivative terms and its value at `hi`.
fn integrate_up(
    lo: f64,
    hi: f64,
    terms: &[PowerTerm],
    shift: f64,
    below: f64,
) -> Result<(Vec<PowerTerm>, f64)> {
    let mut out = Vec::with_capacity(terms.len() + 1);
    let mut constant = below;
    let mut at_hi = below;
    for t in terms {
        let e = t.exp + shift + 1.0;
        if e.abs() <= BREAKPOINT_TOL {
            return Err(Error::LogarithmicTerm { lo, hi, exponent: t.exp });
        }
        if lo == 0.0 && e < 0.0 {
            return Err(Error::DivergentIntegral { lo, hi });
        }
        let c = t.coef / e;
        out.push(PowerTerm::new(c, e));
        constant -= c * pow_or_zero(lo, e);
        if hi.is_finite() {
            at_hi += c * (hi.powf(e) - pow_or_zero(lo, e));
        }
    }
    if constant != 0.0 {
        out.push(PowerTerm::new(constant, 0.0));
    }
    Ok((out, at_hi))
}

/// `Hf(t) = t⁻¹ ∫_0^t f(s) ds`, exactly.
pub fn hardy_apply(f: &PiecewisePower) -> Result<PiecewisePower> {
    let mut mass = 0.0;
    let mut parts = Vec::new();
    for (lo, hi, terms) in pieces(f) {
        let (anti, at_hi) = integrate_up(lo, hi, &terms, 0.0, mass)?;
        // divide the antiderivative by t
        let image: Vec<PowerTerm> = anti.iter().map(|t| PowerTerm::new(t.coef, t.exp - 1.0)).collect();
        parts.push((lo, hi, image));
        mass = at_hi;
    }
    assemble(parts)
}

/// `K0 f(t) = ∫_t^∞ f(s) ds/s`, exactly.
pub fn tail_integral(f: &PiecewisePower) -> Result<PiecewisePower> {
    let mut above = 0.0;
    let mut parts = Vec::new();
    for (lo, hi, terms) in pieces(f).into_iter().rev() {
        let mut out = Vec::with_capacity(terms.len() + 1);
        let mut constant = above;
        let mut at_lo = above;
        for t in &terms {
            let e = t.exp;
            if e.abs() <= BREAKPOINT_TOL {
                return Err(Error::LogarithmicTerm { lo, hi, exponent: e });
            }
            if hi.is_infinite() && e > 0.0 {
                return Err(Error::DivergentIntegral { lo, hi });
            }
            // ∫_t^hi c s^{e-1} ds = c/e (hi^e − t^e)
            let c = t.coef / e;
            out.push(PowerTerm::new(-c, e));
            if hi.is_finite() {
                constant += c * hi.powf(e);
            }
            if lo > 0.0 {
                at_lo += c * (if hi.is_finite() { hi.powf(e) } else { 0.0 } - lo.powf(e));
            } else if e < 0.0 {
                return Err(Error::DivergentIntegral { lo, hi });
            }
        }
        if constant != 0.0 {
            out.push(PowerTerm::new(constant, 0.0));
        }
        parts.push((lo, hi, out));
        above = at_lo;
    }
    parts.reverse();
    assemble(parts)
}

/// `∫_0^t f(s) ds/s`, exactly.
pub fn head_integral(f: &PiecewisePower) -> Result<PiecewisePower> {
    let mut below = 0.0;
    let mut parts = Vec::new();
    for (lo, hi, terms) in pieces(f) {
        let (anti, at_hi) = integrate_up(lo, hi, &terms, -1.0, below)?;
        parts.push((lo, hi, anti));
        below = at_hi;
    }
    assemble(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseSide {
    /// `L^p(ω0)`, inverse `I − K0`.
    Zero,
    /// `L^p(ω1)`, inverse `I + ∫_0^t · ds/s`.
    One,
}

/// `‖R(I − H)f − f‖ / ‖f‖` in `L^p(ω_side)`, with `R` the inverse on that side.
pub fn hardy_inverse_check(model: &HardyModel, f: &PiecewisePower, side: InverseSide) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let g = f.sub(&hardy_apply(f)?);
    let back = match side {
        InverseSide::Zero => g.sub(&tail_integral(&g)?),
        InverseSide::One => g.add(&head_integral(&g)?),
    };
    let w = match side {
        InverseSide::Zero => model.w0(),
        InverseSide::One => model.w1(),
    };
    let r = back.sub(f);
    Ok(eval_lp_norm(&r, model.p, &w) / eval_lp_norm(f, model.p, &w))
}

/// K-profile of `f_*` on `grid`, with tails `θ_zero`, `θ_inf`.
pub fn hardy_kernel_profile(model: &HardyModel, grid: DyadicGrid) -> Result<KProfile> {
    model.validate()?;
    profile_of(&model.couple(), &f_star(), grid)
}

/// `I − H` on `(Lᵖ(ω0), Lᵖ(ω1))`, invertible on both endpoints.
pub fn hardy_model(model: &HardyModel) -> Result<OperatorModel> {
    model.validate()?;
    let couple = model.couple();
    let d = CoupleDescriptor::weighted(couple);
    OperatorModel::new(
        "I - H",
        d.clone(),
        d,
        KernelBasis::Functions {
            couple,
            basis: vec![f_star()],
        },
    )
}

pub fn hardy_classify_sweep(model: &HardyModel, q: f64, thetas: &[f64]) -> Result<Vec<Classification>> {
    classify_sweep(&hardy_model(model)?, q, thetas)
}

/// `I − H` acting in each factor of a product of Hardy couples.
pub fn hardy_product_model(models: &[HardyModel], grid: DyadicGrid) -> Result<OperatorModel> {
    let first = models
        .first()
        .ok_or_else(|| invalid("models", "at least one factor is required"))?;
    if let Some(m) = models.iter().find(|m| m.p != first.p) {
        return Err(Error::MismatchedP(first.p, m.p));
    }
    let profiles = models
        .iter()
        .map(|m| hardy_kernel_profile(m, grid))
        .collect::<Result<Vec<_>>>()?;
    let d = CoupleDescriptor::product(
        models
            .iter()
            .map(|m| CoupleDescriptor::weighted(m.couple()))
            .collect(),
    );
    OperatorModel::new("product of I - H", d.clone(), d, KernelBasis::DirectSum { profiles })
}

pub fn hardy_product_classify(models: &[HardyModel], theta: f64, q: f64) -> Result<Classification> {
    classify(&hardy_product_model(models, DyadicGrid::default())?, ThetaQ::new(theta, q)?)
}

/// Laplace operator on `Π = {(x, y): 0 < y < α}` between weighted Sobolev
/// spaces `W^l_{β0}` and `W^l_{β1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripModel {
    pub alpha: f64,
    pub beta0: f64,
    pub beta1: f64,
    #[serde(default)]
    pub l: u32,
}

impl StripModel {
    pub fn new(alpha: f64, beta0: f64, beta1: f64, l: u32) -> Result<Self> {
        let m = Self { alpha, beta0, beta1, l };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < PI) {
            return Err(invalid("alpha", format!("must lie in (0, π), got {}", self.alpha)));
        }
        if !(self.beta0.is_finite() && self.beta1.is_finite() && self.beta0 < self.beta1) {
            return Err(invalid("beta0", "need finite beta0 < beta1"));
        }
        for (name, b) in [("beta0", self.beta0), ("beta1", self.beta1)] {
            let k = b * self.alpha / PI;
            let r = k.round();
            if r != 0.0 && (k - r).abs() <= BREAKPOINT_TOL * r.abs().max(1.0) {
                return Err(invalid(name, format!("{b} equals {r}π/α")));
            }
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        PI / self.alpha
    }
}

/// `(k, θ_k)` for every `k ≠ 0` with `β0 < kπ/α < β1`, where `(1−θ_k)β0 + θ_kβ1 = kπ/α`.
pub fn strip_thetas(model: &StripModel) -> Result<Vec<(i64, f64)>> {
    model.validate()?;
    let s = model.step();
    let lo = (model.beta0 / s).floor() as i64;
    let hi = (model.beta1 / s).ceil() as i64;
    Ok((lo..=hi)
        .filter(|&k| k != 0)
        .filter_map(|k| {
            let b = k as f64 * s;
            (b > model.beta0 && b < model.beta1).then(|| (k, (b - model.beta0) / (model.beta1 - model.beta0)))
        })
        .collect())
}

/// `f_k(x, y) = e^{−kπx/α} sin(kπy/α)`, for the record only.
pub fn strip_kernel_functions(model: &StripModel) -> Result<Vec<String>> {
    Ok(strip_thetas(model)?
        .into_iter()
        .map(|(k, _)| format!("exp(-{k}*pi*x/{a}) * sin({k}*pi*y/{a})", a = model.alpha))
        .collect())
}

/// The Laplace operator with kernel profiles taken to be exact powers
/// `K(t, f_k) = t^{θ_k}`.
pub fn strip_model(model: &StripModel, grid: DyadicGrid) -> Result<OperatorModel> {
    let thetas = strip_thetas(model)?;
    let profiles = thetas
        .iter()
        .map(|&(_, th)| KProfile::two_power(grid, th, th))
        .collect::<Result<Vec<_>>>()?;
    let d = CoupleDescriptor::asserted(format!(
        "(W^{l}_{b0}, W^{l}_{b1}) on the strip of width {a}; kernel {fs}",
        l = model.l,
        b0 = model.beta0,
        b1 = model.beta1,
        a = model.alpha,
        fs = strip_kernel_functions(model)?.join(", ")
    ));
    OperatorModel::new("Laplace on a strip", d.clone(), d, KernelBasis::DirectSum { profiles })
}

pub fn strip_classify(model: &StripModel, theta: f64, q: f64) -> Result<Classification> {
    classify(&strip_model(model, DyadicGrid::default())?, ThetaQ::new(theta, q)?)
}
