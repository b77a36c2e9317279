//! Model Banach couples and their elements.

mod descriptor;
mod grid;
pub(crate) mod integrals;
mod power;
mod weight;

pub use descriptor::{CoupleDescriptor, CoupleKind, EndpointStatus, WeightedCouple};
pub use grid::{DyadicGrid, GRID_ENV};
pub use power::{eval_lp_norm, PiecewisePower, PowerTerm, Segment};
pub use weight::PowerWeight;

use crate::error::{invalid, Result};

/// `a_θ(t) = θ(1−θ) t^θ` on `(0, ∞)`; its K-functional in the reference couple is `t^θ`.
pub fn a_theta_element(theta: f64) -> Result<PiecewisePower> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
    }
    Ok(PiecewisePower::power(theta * (1.0 - theta), theta))
}

/// Linear structure of `X0 + X1`.
pub fn add_elements(f: &PiecewisePower, g: &PiecewisePower) -> PiecewisePower {
    f.add(g)
}
