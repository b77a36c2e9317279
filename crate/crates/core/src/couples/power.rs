//! Piecewise sums of power functions on `(0, ∞)`.
//!
//! An element is a list of disjoint half-open segments `(lo, hi]`, each carrying
//! a short sum `Σ c_j t^{e_j}`. The function vanishes off the listed segments.
//! `lo = 0` and `hi = ∞` encode unbounded ends.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::integrals::{power_integral, log_integral};
use super::weight::PowerWeight;
use crate::error::{Error, Result};

/// Exponents closer than this are merged into one term.
const EXP_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub exp: f64,
}

impl PowerTerm {
    pub fn new(coef: f64, exp: f64) -> Self {
        Self { coef, exp }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coef * t.powf(self.exp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    lo: f64,
    hi: f64,
    terms: Vec<PowerTerm>,
}

fn normalize_terms(mut terms: Vec<PowerTerm>) -> Vec<PowerTerm> {
    terms.sort_by(|a, b| a.exp.total_cmp(&b.exp));
    let mut out: Vec<PowerTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if (last.exp - t.exp).abs() <= EXP_MERGE_TOL * (1.0 + t.exp.abs()) => {
                last.coef += t.coef;
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coef != 0.0);
    out
}

impl Segment {
    pub fn new(lo: f64, hi: f64, terms: Vec<PowerTerm>) -> Result<Self> {
        if !(lo >= 0.0 && lo.is_finite()) || hi.is_nan() || hi <= lo {
            return Err(Error::MalformedElement(format!(
                "segment ({lo}, {hi}] is not a nonempty subinterval of (0, ∞)"
            )));
        }
        if terms
            .iter()
            .any(|t| !t.coef.is_finite() || !t.exp.is_finite())
        {
            return Err(Error::MalformedElement(format!(
                "non-finite term on segment ({lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            terms: normalize_terms(terms),
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t <= self.hi
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    /// `ln |f(e^u)|` evaluated without overflow; `-∞` at zeros.
    pub fn log_abs(&self, u: f64) -> f64 {
        match self.terms.as_slice() {
            [] => f64::NEG_INFINITY,
            [t] => t.coef.abs().ln() + t.exp * u,
            terms => {
                let logs: Vec<f64> = terms
                    .iter()
                    .map(|t| t.coef.abs().ln() + t.exp * u)
                    .collect();
                let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = terms
                    .iter()
                    .zip(&logs)
                    .map(|(t, l)| t.coef.signum() * (l - m).exp())
                    .sum();
                if s == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    m + s.abs().ln()
                }
            }
        }
    }

    /// Smallest exponent present (dominant as `t → 0`).
    pub fn leading_low(&self) -> Option<PowerTerm> {
        self.terms.first().copied()
    }

    /// Largest exponent present (dominant as `t → ∞`).
    pub fn leading_high(&self) -> Option<PowerTerm> {
        self.terms.last().copied()
    }

    /// All coefficients share a sign, so `|f| = ±f` on the whole segment.
    pub fn is_single_signed(&self) -> bool {
        self.terms.iter().all(|t| t.coef > 0.0) || self.terms.iter().all(|t| t.coef < 0.0)
    }

    fn with_bounds(&self, lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            terms: self.terms.clone(),
        }
    }

    fn map_terms(&self, f: impl Fn(PowerTerm) -> PowerTerm) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            terms: normalize_terms(self.terms.iter().copied().map(f).collect()),
        }
    }

    /// A point strictly inside the segment.
    pub(crate) fn interior_point(&self) -> f64 {
        match (self.lo == 0.0, self.hi.is_infinite()) {
            (true, true) => 1.0,
            (true, false) => 0.5 * self.hi,
            (false, true) => 2.0 * self.lo,
            (false, false) => (self.lo * self.hi).sqrt(),
        }
    }
}

/// An element of a weighted-Lᵖ model couple.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewisePower {
    segments: Vec<Segment>,
}

impl PiecewisePower {
    pub fn new(mut segments: Vec<Segment>) -> Result<Self> {
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in segments.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::MalformedElement(format!(
                    "segments ({}, {}] and ({}, {}] overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        segments.retain(|s| !s.terms.is_empty());
        Ok(Self { segments })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c t^e` on `(lo, hi]`.
    pub fn power_on(lo: f64, hi: f64, coef: f64, exp: f64) -> Result<Self> {
        Self::new(vec![Segment::new(lo, hi, vec![PowerTerm::new(coef, exp)])?])
    }

    /// `c t^e` on all of `(0, ∞)`.
    pub fn power(coef: f64, exp: f64) -> Self {
        Self::power_on(0.0, f64::INFINITY, coef, exp).expect("valid unbounded segment")
    }

    /// The constant `c` on `(lo, hi]`.
    pub fn constant_on(lo: f64, hi: f64, c: f64) -> Result<Self> {
        Self::power_on(lo, hi, c, 0.0)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.contains(t))
            .map_or(0.0, |s| s.eval(t))
    }

    /// Finite positive segment endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.lo, s.hi])
            .filter(|b| b.is_finite() && *b > 0.0)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Splits segments at every given point that falls strictly inside one.
    pub fn refined(&self, points: &[f64]) -> Self {
        let mut out = Vec::with_capacity(self.segments.len() + points.len());
        for seg in &self.segments {
            let mut cuts: Vec<f64> = points
                .iter()
                .copied()
                .filter(|p| *p > seg.lo && *p < seg.hi)
                .collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut lo = seg.lo;
            for c in cuts {
                out.push(seg.with_bounds(lo, c));
                lo = c;
            }
            out.push(seg.with_bounds(lo, seg.hi));
        }
        Self { segments: out }
    }

    fn segment_at(&self, t: f64) -> Option<&Segment> {
        self.segments.iter().find(|s| s.contains(t))
    }

    /// Pointwise sum on the common refinement of both partitions.
    pub fn add(&self, other: &Self) -> Self {
        let mut ends: Vec<f64> = self
            .segments
            .iter()
            .chain(&other.segments)
            .flat_map(|s| [s.lo, s.hi])
            .collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        let mut merged: Vec<Segment> = Vec::new();
        for w in ends.windows(2) {
            let probe = Segment {
                lo: w[0],
                hi: w[1],
                terms: Vec::new(),
            }
            .interior_point();
            let mut terms = Vec::new();
            if let Some(s) = self.segment_at(probe) {
                terms.extend_from_slice(&s.terms);
            }
            if let Some(s) = other.segment_at(probe) {
                terms.extend_from_slice(&s.terms);
            }
            let terms = normalize_terms(terms);
            if terms.is_empty() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.hi == w[0] && last.terms == terms => last.hi = w[1],
                _ => merged.push(Segment {
                    lo: w[0],
                    hi: w[1],
                    terms,
                }),
            }
        }
        Self { segments: merged }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return Self::zero();
        }
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| s.map_terms(|t| PowerTerm::new(lambda * t.coef, t.exp)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Linear combination `Σ c_i f_i`.
    pub fn combination(coeffs: &[f64], basis: &[PiecewisePower]) -> Self {
        coeffs
            .iter()
            .zip(basis)
            .filter(|(c, _)| **c != 0.0)
            .fold(Self::zero(), |acc, (c, f)| acc.add(&f.scale(*c)))
    }

    /// Pointwise product with a power weight (splits at `t = 1`).
    pub fn mul_weight(&self, w: &PowerWeight) -> Self {
        let refined = self.refined(&[1.0]);
        Self {
            segments: refined
                .segments
                .iter()
                .map(|s| {
                    let e = w.exponent_at(s.interior_point());
                    s.map_terms(|t| PowerTerm::new(w.scale * t.coef, t.exp + e))
                })
                .collect(),
        }
    }

    /// Pointwise product with `c t^e`.
    pub fn mul_power(&self, coef: f64, exp: f64) -> Self {
        if coef == 0.0 {
            return Self::zero();
        }
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| s.map_terms(|t| PowerTerm::new(coef * t.coef, t.exp + exp)))
                .collect(),
        }
    }

    /// The segment reaching down to `0`, if any.
    pub fn low_end(&self) -> Option<&Segment> {
        self.segments.first().filter(|s| s.lo == 0.0)
    }

    /// The segment reaching out to `∞`, if any.
    pub fn high_end(&self) -> Option<&Segment> {
        self.segments.last().filter(|s| s.hi.is_infinite())
    }

    /// Largest absolute coefficient, used as a scale for tolerances.
    pub fn coef_scale(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.terms.iter().map(|t| t.coef.abs()))
            .fold(0.0, f64::max)
    }
}

/// `‖f‖_{Lᵖ(w)} = (∫₀^∞ |f(t) w(t)|ᵖ dt/t)^{1/p}`, with `+∞` for divergent integrals.
///
/// Single-term segments (and same-signed segments when `p = 1`) are integrated
/// in closed form; segments whose sum changes sign fall back to quadrature.
pub fn eval_lp_norm(f: &PiecewisePower, p: f64, w: &PowerWeight) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "p must lie in [1, ∞)");
    let g = f.mul_weight(w);
    let mut total = 0.0;
    for seg in g.segments() {
        let part = segment_abs_power_integral(seg, p);
        if part.is_infinite() {
            return f64::INFINITY;
        }
        total += part;
    }
    total.powf(1.0 / p)
}

/// `∫_seg |g|^p ds/s`.
pub(crate) fn segment_abs_power_integral(seg: &Segment, p: f64) -> f64 {
    match seg.terms() {
        [] => 0.0,
        [t] => power_integral(t.coef.abs().powf(p), p * t.exp, seg.lo, seg.hi),
        terms if p == 1.0 && seg.is_single_signed() => terms
            .iter()
            .map(|t| power_integral(t.coef.abs(), t.exp, seg.lo, seg.hi))
            .sum(),
        terms => {
            let lead_lo = terms.first().unwrap().exp;
            let lead_hi = terms.last().unwrap().exp;
            log_integral(
                |u| p * seg.log_abs(u),
                seg.lo,
                seg.hi,
                p * lead_lo,
                p * lead_hi,
                &[],
            )
            .exp()
        }
    }
}

impl fmt::Display for PiecewisePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return write!(f, "0");
        }
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "({}, {}]: ", s.lo, s.hi)?;
            for (j, t) in s.terms.iter().enumerate() {
                if j > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{}·t^{}", t.coef, t.exp)?;
            }
        }
        Ok(())
    }
}

/// Upper segment end as it appears in JSON: a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct UpperBound(f64);

impl Serialize for UpperBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for UpperBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Self(x)),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "Infinity" | "+inf") => {
                Ok(Self(f64::INFINITY))
            }
            Raw::Str(s) => Err(de::Error::custom(format!(
                "segment bound must be a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// One `{"lo", "hi", "c", "e"}` record; several records on the same interval add up.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermRecord {
    lo: f64,
    hi: UpperBound,
    c: f64,
    e: f64,
}

impl Serialize for PiecewisePower {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .segments
            .iter()
            .flat_map(|seg| {
                seg.terms.iter().map(move |t| TermRecord {
                    lo: seg.lo,
                    hi: UpperBound(seg.hi),
                    c: t.coef,
                    e: t.exp,
                })
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewisePower {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let mut acc = PiecewisePower::zero();
        for r in records {
            let piece = PiecewisePower::power_on(r.lo, r.hi.0, r.c, r.e).map_err(de::Error::custom)?;
            // Records on identical intervals sum; partially overlapping ones are rejected.
            let overlaps = acc.segments.iter().any(|s| {
                s.lo < r.hi.0 && r.lo < s.hi && !(s.lo == r.lo && s.hi == r.hi.0)
            });
            if overlaps {
                return Err(de::Error::custom(format!(
                    "segment ({}, {}] partially overlaps another segment",
                    r.lo, r.hi.0
                )));
            }
            acc = acc.add(&piece);
        }
        Ok(acc)
    }
}
