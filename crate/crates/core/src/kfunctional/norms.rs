use serde::{Deserialize, Serialize};

use super::profile::{KProfile, ThetaQ};

/// Tolerance for comparing `θ` against an analytic tail exponent.
pub const EXPONENT_TOL: f64 = 1e-12;

/// A half-line sum is declared divergent when the contribution of its outermost
/// decade has not shrunk by this relative amount against the decade before.
const GROWTH_RATIO: f64 = 1e-3;
const DECADE: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaQNorm {
    pub value: f64,
    /// Set when the profile lacks a tail, so the sum covers the grid only.
    pub lower_bound_only: bool,
}

/// `‖x‖_{θ,q}` from a K-profile: the dyadic sum `Σ (2^{-kθ} K(2^k))^q ln 2`
/// continued by the analytic tails as geometric series.
pub fn theta_q_norm(profile: &KProfile, tq: ThetaQ) -> ThetaQNorm {
    let theta = tq.theta();
    let ln2 = std::f64::consts::LN_2;
    let lower_bound_only = profile.tail0().is_none() || profile.tail_inf().is_none();
    let scaled: Vec<f64> = profile
        .samples()
        .map(|(k, _, v)| v.ln() - theta * k as f64 * ln2)
        .collect();
    let first = scaled[0];
    let last = *scaled.last().unwrap();

    if tq.q_is_infinite() {
        let mut sup = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some(e) = profile.tail0() {
            if e < theta {
                sup = f64::INFINITY;
            }
        }
        if let Some(e) = profile.tail_inf() {
            if e > theta {
                sup = f64::INFINITY;
            }
        }
        return ThetaQNorm {
            value: sup.exp(),
            lower_bound_only,
        };
    }

    let q = tq.q();
    let peak = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum: f64 = scaled.iter().map(|s| (q * (s - peak)).exp()).sum();
    if let Some(e) = profile.tail0() {
        if e <= theta {
            sum = f64::INFINITY;
        } else {
            let r = 2f64.powf(-(e - theta) * q);
            sum += (q * (first - peak)).exp() * r / (1.0 - r);
        }
    }
    if let Some(e) = profile.tail_inf() {
        if e >= theta {
            sum = f64::INFINITY;
        } else {
            let r = 2f64.powf((e - theta) * q);
            sum += (q * (last - peak)).exp() * r / (1.0 - r);
        }
    }
    ThetaQNorm {
        value: peak.exp() * (sum * ln2).powf(1.0 / q),
        lower_bound_only,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `∫₀¹`
    ZeroSide,
    /// `∫₁^∞`
    InfSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Member,
    NotMember,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub membership: Membership,
    /// `θ` sits on the tail exponent (within tolerance); the verdict then
    /// follows the literal integral/sup definition.
    pub boundary: bool,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.membership == Membership::Member
    }
}

/// Is `∫` of `(t^{-θ} K)^q dt/t` over the given half-line finite?
pub fn half_norm_membership(profile: &KProfile, tq: ThetaQ, side: Side) -> MembershipVerdict {
    let tail = match side {
        Side::ZeroSide => profile.tail0(),
        Side::InfSide => profile.tail_inf(),
    };
    match tail {
        Some(e) => tail_membership(e, tq, side, EXPONENT_TOL),
        None => truncation_membership(profile, tq, side),
    }
}

/// Membership decided by comparing `θ` with the tail exponent `e` on `side`.
pub fn tail_membership(e: f64, tq: ThetaQ, side: Side, tol: f64) -> MembershipVerdict {
    let theta = tq.theta();
    if (theta - e).abs() <= tol {
        let membership = if tq.q_is_infinite() {
            Membership::Member
        } else {
            Membership::NotMember
        };
        return MembershipVerdict {
            membership,
            boundary: true,
        };
    }
    let member = match side {
        Side::ZeroSide => theta < e,
        Side::InfSide => theta > e,
    };
    MembershipVerdict {
        membership: if member {
            Membership::Member
        } else {
            Membership::NotMember
        },
        boundary: false,
    }
}

fn truncation_membership(profile: &KProfile, tq: ThetaQ, side: Side) -> MembershipVerdict {
    let theta = tq.theta();
    let ln2 = std::f64::consts::LN_2;
    // terms ordered from t = 1 outwards
    let mut terms: Vec<f64> = profile
        .samples()
        .filter(|(k, _, _)| match side {
            Side::ZeroSide => *k <= 0,
            Side::InfSide => *k >= 0,
        })
        .map(|(k, _, v)| v.ln() - theta * k as f64 * ln2)
        .collect();
    if side == Side::ZeroSide {
        terms.reverse();
    }
    let n = terms.len() as i32;
    if n < 3 * DECADE {
        return MembershipVerdict {
            membership: Membership::Undetermined,
            boundary: true,
        };
    }
    let (mid, cut) = ((n - 2 * DECADE) as usize, (n - DECADE) as usize);
    let grew = if tq.q_is_infinite() {
        let before = terms[..cut].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let after = terms[cut..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        after > before + GROWTH_RATIO.ln_1p()
    } else {
        let q = tq.q();
        let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mass = |r: &[f64]| -> f64 { r.iter().map(|s| (q * (s - peak)).exp()).sum() };
        mass(&terms[cut..]) > mass(&terms[mid..cut]) * (1.0 - GROWTH_RATIO)
    };
    MembershipVerdict {
        membership: if grew {
            Membership::NotMember
        } else {
            Membership::Member
        },
        boundary: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct C0Verdict {
    pub member: bool,
    pub boundary: bool,
}

/// `K(t, x)/t^θ → 0` at both ends, i.e. `x` lies in the closure of `X0 ∩ X1`
/// in `(X0, X1)_{θ,∞}`.
pub fn theta_c0_membership(profile: &KProfile, theta: f64) -> C0Verdict {
    let ln2 = std::f64::consts::LN_2;
    let scaled: Vec<f64> = profile
        .samples()
        .map(|(k, _, v)| v.ln() - theta * k as f64 * ln2)
        .collect();
    let n = scaled.len();
    let decade = (DECADE as usize).min(n / 2);
    // without a tail, require a decay of the grid's edge decade
    let falls = |edge: f64, inner: f64| edge < inner - 1.0;
    let (low_ok, low_boundary) = match profile.tail0() {
        Some(e) => (e > theta + EXPONENT_TOL, (e - theta).abs() <= EXPONENT_TOL),
        None => (falls(scaled[0], scaled[decade]), false),
    };
    let (high_ok, high_boundary) = match profile.tail_inf() {
        Some(e) => (e < theta - EXPONENT_TOL, (e - theta).abs() <= EXPONENT_TOL),
        None => (falls(scaled[n - 1], scaled[n - 1 - decade]), false),
    };
    C0Verdict {
        member: low_ok && high_ok,
        boundary: low_boundary || high_boundary,
    }
}
