use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn one() -> f64 {
    1.0
}

/// `scale * t^a0` on `(0, 1]` and `scale * t^a_inf` on `(1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub a0: f64,
    pub a_inf: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

impl PowerWeight {
    pub fn new(a0: f64, a_inf: f64, scale: f64) -> Result<Self> {
        let w = Self { a0, a_inf, scale };
        w.validate()?;
        Ok(w)
    }

    pub fn power(exponent: f64) -> Self {
        Self {
            a0: exponent,
            a_inf: exponent,
            scale: 1.0,
        }
    }

    pub fn unit() -> Self {
        Self::power(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a0.is_finite() && self.a_inf.is_finite()) {
            return Err(invalid("weight", "exponents must be finite"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid("weight", "scale must be positive and finite"));
        }
        Ok(())
    }

    /// Exponent in force at `t` (the break sits at `t = 1`, which belongs to the lower piece).
    pub fn exponent_at(&self, t: f64) -> f64 {
        if t <= 1.0 {
            self.a0
        } else {
            self.a_inf
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * t.powf(self.exponent_at(t))
    }

    pub fn ln_at(&self, t: f64) -> f64 {
        self.scale.ln() + self.exponent_at(t) * t.ln()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_evaluation() {
        let w = PowerWeight::new(0.5, 0.25, 2.0).unwrap();
        assert_eq!(w.eval(1.0), 2.0);
        assert!((w.eval(0.25) - 1.0).abs() < 1e-15);
        assert!((w.eval(16.0) - 4.0).abs() < 1e-15);
        assert!((w.ln_at(16.0) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(PowerWeight::new(0.1, 0.1, 0.0).is_err());
        assert!(PowerWeight::new(f64::NAN, 0.1, 1.0).is_err());
    }

    #[test]
    fn scale_defaults_in_json() {
        let w: PowerWeight = serde_json::from_str(r#"{"a0":0.5,"a_inf":0.25}"#).unwrap();
        assert_eq!(w, PowerWeight::new(0.5, 0.25, 1.0).unwrap());
    }
}
