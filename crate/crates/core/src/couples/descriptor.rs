use serde::{Deserialize, Serialize};

use super::weight::PowerWeight;
use crate::error::{invalid, Result};
use crate::kfunctional::KProfile;

/// `(Lᵖ(w0), Lᵖ(w1))` on `((0, ∞), dt/t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedCouple {
    pub p: f64,
    pub w0: PowerWeight,
    pub w1: PowerWeight,
}

impl WeightedCouple {
    pub fn new(p: f64, w0: PowerWeight, w1: PowerWeight) -> Result<Self> {
        let c = Self { p, w0, w1 };
        c.validate()?;
        Ok(c)
    }

    /// `(L¹(dt/t), L¹(t⁻¹ dt/t))`.
    pub fn reference_l1() -> Self {
        Self {
            p: 1.0,
            w0: PowerWeight::unit(),
            w1: PowerWeight::power(-1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(invalid("p", format!("must be finite and >= 1, got {}", self.p)));
        }
        self.w0.validate()?;
        self.w1.validate()
    }

    /// Both weights multiplied by the same constant.
    pub fn with_common_scale(&self, factor: f64) -> Self {
        Self {
            p: self.p,
            w0: self.w0.scaled(factor),
            w1: self.w1.scaled(factor),
        }
    }
}

/// What is asserted about the operator on the endpoint spaces. Never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EndpointStatus {
    #[default]
    InvertibleOnEndpoints,
    SurjectiveFredholmOnEndpoints {
        /// Kernel dimensions on `X0`, `X1`.
        #[serde(default)]
        kernel_dims: (usize, usize),
    },
}

impl EndpointStatus {
    pub fn is_invertible(&self) -> bool {
        matches!(self, Self::InvertibleOnEndpoints)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoupleKind {
    WeightedLp {
        p: f64,
        w0: PowerWeight,
        w1: PowerWeight,
    },
    ReferenceL1,
    /// A couple known only through the K-profile of a generating element.
    SequenceCouple { profile: KProfile },
    /// Direct product `(⊕ X0⁽ⁱ⁾, ⊕ X1⁽ⁱ⁾)` with the ℓ¹ sum of factor norms.
    Product { factors: Vec<CoupleDescriptor> },
    /// A couple outside the model families, used through asserted K-profiles only.
    Asserted { description: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupleDescriptor {
    #[serde(flatten)]
    pub kind: CoupleKind,
    #[serde(default)]
    pub endpoint_status: EndpointStatus,
}

impl CoupleDescriptor {
    pub fn weighted(couple: WeightedCouple) -> Self {
        Self {
            kind: CoupleKind::WeightedLp {
                p: couple.p,
                w0: couple.w0,
                w1: couple.w1,
            },
            endpoint_status: EndpointStatus::default(),
        }
    }

    pub fn reference_l1() -> Self {
        Self {
            kind: CoupleKind::ReferenceL1,
            endpoint_status: EndpointStatus::default(),
        }
    }

    pub fn sequence(profile: KProfile) -> Self {
        Self {
            kind: CoupleKind::SequenceCouple { profile },
            endpoint_status: EndpointStatus::default(),
        }
    }

    pub fn product(factors: Vec<CoupleDescriptor>) -> Self {
        Self {
            kind: CoupleKind::Product { factors },
            endpoint_status: EndpointStatus::default(),
        }
    }

    pub fn asserted(description: impl Into<String>) -> Self {
        Self {
            kind: CoupleKind::Asserted {
                description: description.into(),
            },
            endpoint_status: EndpointStatus::default(),
        }
    }

    pub fn with_status(mut self, status: EndpointStatus) -> Self {
        self.endpoint_status = status;
        self
    }

    /// The weighted-Lᵖ form of this couple, if it has one.
    pub fn as_weighted(&self) -> Option<WeightedCouple> {
        match &self.kind {
            CoupleKind::WeightedLp { p, w0, w1 } => Some(WeightedCouple {
                p: *p,
                w0: *w0,
                w1: *w1,
            }),
            CoupleKind::ReferenceL1 => Some(WeightedCouple::reference_l1()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            CoupleKind::WeightedLp { p, w0, w1 } => WeightedCouple::new(*p, *w0, *w1).map(|_| ()),
            CoupleKind::ReferenceL1 => Ok(()),
            CoupleKind::SequenceCouple { profile } => profile.validate(),
            CoupleKind::Product { factors } => {
                if factors.is_empty() {
                    return Err(invalid("factors", "a product needs at least one factor"));
                }
                factors.iter().try_for_each(CoupleDescriptor::validate)
            }
            CoupleKind::Asserted { .. } => Ok(()),
        }
    }
}
