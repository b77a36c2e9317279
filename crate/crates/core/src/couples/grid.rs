use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Environment variable overriding the default grid, formatted `kmin:kmax`.
pub const GRID_ENV: &str = "INTERKERNEL_GRID";

/// Dyadic sampling points `t_k = 2^k`, `k_min <= k <= k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicGrid {
    k_min: i32,
    k_max: i32,
}

impl Default for DyadicGrid {
    fn default() -> Self {
        Self {
            k_min: Self::DEFAULT_K_MIN,
            k_max: Self::DEFAULT_K_MAX,
        }
    }
}

impl DyadicGrid {
    pub const DEFAULT_K_MIN: i32 = -80;
    pub const DEFAULT_K_MAX: i32 = 80;

    pub fn new(k_min: i32, k_max: i32) -> Result<Self> {
        if k_min >= k_max {
            return Err(invalid(
                "grid",
                format!("k_min ({k_min}) must be below k_max ({k_max})"),
            ));
        }
        // 2^±1000 is still representable; keep a margin for products with weights.
        if k_min < -900 || k_max > 900 {
            return Err(invalid("grid", "exponents must lie in [-900, 900]"));
        }
        Ok(Self { k_min, k_max })
    }

    /// Parses `kmin:kmax`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (lo, hi) = spec
            .split_once(':')
            .ok_or_else(|| invalid("grid", format!("expected kmin:kmax, got `{spec}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|e| invalid("grid", format!("`{s}`: {e}")))
        };
        Self::new(parse(lo)?, parse(hi)?)
    }

    /// The default grid, unless `INTERKERNEL_GRID` holds a valid override.
    pub fn from_env() -> Result<Self> {
        match std::env::var(GRID_ENV) {
            Ok(spec) => Self::parse(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + Clone {
        self.k_min..=self.k_max
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + Clone {
        self.exponents().map(|k| 2f64.powi(k))
    }

    pub fn index_of(&self, k: i32) -> Option<usize> {
        (self.k_min..=self.k_max)
            .contains(&k)
            .then(|| (k - self.k_min) as usize)
    }

    /// True when every finite breakpoint lies inside `[2^k_min, 2^k_max]`.
    pub fn covers(&self, breakpoints: &[f64]) -> bool {
        let lo = 2f64.powi(self.k_min);
        let hi = 2f64.powi(self.k_max);
        breakpoints
            .iter()
            .filter(|b| b.is_finite() && **b > 0.0)
            .all(|b| (lo..=hi).contains(b))
    }
}
