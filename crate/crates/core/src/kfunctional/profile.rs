use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::couples::DyadicGrid;
use crate::error::{invalid, Result};

/// Sampled values of `t ↦ K(t, x)` at `t = 2^k`, with optional analytic tail
/// exponents: `K(t, x) ≍ t^{tail0}` as `t → 0` and `≍ t^{tail_inf}` as `t → ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KProfile {
    grid: DyadicGrid,
    values: Vec<f64>,
    tail0: Option<f64>,
    tail_inf: Option<f64>,
    /// Bound on the distortion of `values` relative to the true K-functional.
    equivalence_factor: f64,
}

impl KProfile {
    pub fn new(
        grid: DyadicGrid,
        values: Vec<f64>,
        tail0: Option<f64>,
        tail_inf: Option<f64>,
        equivalence_factor: f64,
    ) -> Result<Self> {
        let p = Self {
            grid,
            values,
            tail0,
            tail_inf,
            equivalence_factor,
        };
        p.validate()?;
        Ok(p)
    }

    /// `t^{theta0}` for `t <= 1` and `t^{theta_inf}` for `t > 1`, with matching tails.
    pub fn two_power(grid: DyadicGrid, theta0: f64, theta_inf: f64) -> Result<Self> {
        for (name, v) in [("theta0", theta0), ("theta_inf", theta_inf)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(name, format!("tail exponent must lie in [0, 1], got {v}")));
            }
        }
        let values = grid
            .exponents()
            .map(|k| {
                let e = if k <= 0 { theta0 } else { theta_inf };
                (e * k as f64 * std::f64::consts::LN_2).exp()
            })
            .collect();
        Self::new(grid, values, Some(theta0), Some(theta_inf), 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.grid.len() {
            return Err(invalid(
                "profile",
                format!("{} values for a grid of {} points", self.values.len(), self.grid.len()),
            ));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("profile", "values must be positive and finite"));
        }
        for (name, tail) in [("tail0", self.tail0), ("tail_inf", self.tail_inf)] {
            if let Some(e) = tail {
                if !(0.0..=1.0).contains(&e) {
                    return Err(invalid(name, format!("must lie in [0, 1], got {e}")));
                }
            }
        }
        if !(self.equivalence_factor >= 1.0) {
            return Err(invalid("equivalence_factor", "must be >= 1"));
        }
        Ok(())
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail0(&self) -> Option<f64> {
        self.tail0
    }

    pub fn tail_inf(&self) -> Option<f64> {
        self.tail_inf
    }

    pub fn equivalence_factor(&self) -> f64 {
        self.equivalence_factor
    }

    pub fn with_tails(mut self, tail0: Option<f64>, tail_inf: Option<f64>) -> Self {
        self.tail0 = tail0;
        self.tail_inf = tail_inf;
        self
    }

    /// `(k, 2^k, K(2^k))` triples.
    pub fn samples(&self) -> impl Iterator<Item = (i32, f64, f64)> + '_ {
        self.grid
            .exponents()
            .zip(&self.values)
            .map(|(k, v)| (k, 2f64.powi(k), *v))
    }

    pub fn value_at_exponent(&self, k: i32) -> Option<f64> {
        self.grid.index_of(k).map(|i| self.values[i])
    }

    /// `ln K(2^k)` for any integer `k`, extending beyond the grid along the tails.
    pub fn ln_value_extended(&self, k: i64) -> Option<f64> {
        let (kmin, kmax) = (self.grid.k_min() as i64, self.grid.k_max() as i64);
        let ln2 = std::f64::consts::LN_2;
        if k < kmin {
            let e = self.tail0?;
            Some(self.values[0].ln() + e * (k - kmin) as f64 * ln2)
        } else if k > kmax {
            let e = self.tail_inf?;
            Some(self.values[self.values.len() - 1].ln() + e * (k - kmax) as f64 * ln2)
        } else {
            Some(self.values[(k - kmin) as usize].ln())
        }
    }

    /// K at arbitrary `t > 0`: geometric interpolation between grid points,
    /// tail extrapolation outside the grid (flat when a tail is unknown).
    pub fn value_at(&self, t: f64) -> f64 {
        let x = t.log2();
        let (kmin, kmax) = (self.grid.k_min() as f64, self.grid.k_max() as f64);
        let last = self.values.len() - 1;
        if x <= kmin {
            return self.values[0] * 2f64.powf(self.tail0.unwrap_or(0.0) * (x - kmin));
        }
        if x >= kmax {
            return self.values[last] * 2f64.powf(self.tail_inf.unwrap_or(0.0) * (x - kmax));
        }
        let i = (x - kmin).floor() as usize;
        let frac = x - kmin - i as f64;
        if i >= last {
            return self.values[last];
        }
        let (a, b) = (self.values[i].ln(), self.values[i + 1].ln());
        (a + frac * (b - a)).exp()
    }

    /// `|λ| K`, the profile of `λx`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * lambda.abs()).collect(),
            ..self.clone()
        }
    }

    /// Checks the two monotonicity laws of a K-functional on the grid:
    /// `K` nondecreasing and `K(t)/t` nonincreasing, within relative `tol`.
    pub fn check_monotonicity(&self, tol: f64) -> std::result::Result<(), String> {
        for (i, w) in self.values.windows(2).enumerate() {
            let k = self.grid.k_min() + i as i32;
            if w[1] < w[0] * (1.0 - tol) {
                return Err(format!("K decreases between 2^{k} and 2^{}", k + 1));
            }
            // K(2t)/(2t) <= K(t)/t  <=>  K(2t) <= 2 K(t)
            if w[1] > 2.0 * w[0] * (1.0 + tol) {
                return Err(format!("K(t)/t increases between 2^{k} and 2^{}", k + 1));
            }
        }
        Ok(())
    }

    /// CSV with columns `k,t,K`, floats printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t,K\n");
        for (k, t, v) in self.samples() {
            let _ = writeln!(out, "{k},{t:.16e},{v:.16e}");
        }
        out
    }
}

/// Real-interpolation parameters `θ ∈ (0, 1)`, `q ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaQ {
    theta: f64,
    q: f64,
}

impl ThetaQ {
    pub fn new(theta: f64, q: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
        }
        if !(q >= 1.0) {
            return Err(invalid("q", format!("must be >= 1 or inf, got {q}")));
        }
        Ok(Self { theta, q })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn q_is_infinite(&self) -> bool {
        self.q.is_infinite()
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.q)
    }
}

/// Parses `q` from text: a number >= 1 or `inf`.
pub fn parse_q(s: &str) -> Result<f64> {
    let s = s.trim();
    if matches!(s, "inf" | "Inf" | "infinity" | "∞") {
        return Ok(f64::INFINITY);
    }
    let q: f64 = s
        .parse()
        .map_err(|e| invalid("q", format!("`{s}`: {e}")))?;
    if !(q >= 1.0) {
        return Err(invalid("q", format!("must be >= 1 or inf, got {q}")));
    }
    Ok(q)
}

pub(crate) fn serialize_q<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*q)
    }
}

pub(crate) fn deserialize_q<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(q) => Ok(q),
        Raw::Str(s) => parse_q(&s).map_err(serde::de::Error::custom),
    }
}

#[derive(Serialize, Deserialize)]
struct ThetaQRepr {
    theta: f64,
    #[serde(serialize_with = "serialize_q", deserialize_with = "deserialize_q")]
    q: f64,
}

impl Serialize for ThetaQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ThetaQRepr {
            theta: self.theta,
            q: self.q,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ThetaQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ThetaQRepr::deserialize(d)?;
        ThetaQ::new(r.theta, r.q).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_power_profile_is_a_k_functional() {
        let p = KProfile::two_power(DyadicGrid::new(-20, 20).unwrap(), 0.5, 0.25).unwrap();
        p.check_monotonicity(1e-12).unwrap();
        assert!((p.value_at(4.0) - 2f64.powf(0.5)).abs() < 1e-12);
        assert!((p.value_at(0.25) - 0.5).abs() < 1e-12);
        // beyond the grid the tails take over
        assert!((p.value_at(2f64.powi(30)) - 2f64.powf(7.5)).abs() < 1e-6);
    }

    #[test]
    fn monotonicity_violations_are_reported() {
        let g = DyadicGrid::new(0, 2).unwrap();
        let bad = KProfile::new(g, vec![1.0, 0.5, 0.6], None, None, 1.0).unwrap();
        assert!(bad.check_monotonicity(1e-12).is_err());
        let steep = KProfile::new(g, vec![1.0, 3.0, 4.0], None, None, 1.0).unwrap();
        assert!(steep.check_monotonicity(1e-12).is_err());
    }

    #[test]
    fn theta_q_validation_and_json() {
        assert!(ThetaQ::new(0.0, 2.0).is_err());
        assert!(ThetaQ::new(0.5, 0.5).is_err());
        let tq: ThetaQ = serde_json::from_str(r#"{"theta":0.4,"q":"inf"}"#).unwrap();
        assert!(tq.q_is_infinite());
        assert_eq!(serde_json::to_string(&tq).unwrap(), r#"{"theta":0.4,"q":"inf"}"#);
        assert_eq!(parse_q("2").unwrap(), 2.0);
        assert!(parse_q("0.3").is_err());
    }

    #[test]
    fn csv_export() {
        let p = KProfile::two_power(DyadicGrid::new(-1, 1).unwrap(), 0.5, 0.5).unwrap();
        let csv = p.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,t,K");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,1.0000000000000000e0,1.0000000000000000e0"));
    }
}
