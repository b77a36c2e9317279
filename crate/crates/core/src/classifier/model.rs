use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::rank;
use crate::couples::{CoupleDescriptor, EndpointStatus, PiecewisePower, WeightedCouple};
use crate::error::{invalid, Error, Result};
use crate::kfunctional::KProfile;

/// A basis of `ker_{X0+X1} A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelBasis {
    /// Piecewise-power elements of one weighted couple.
    Functions {
        couple: WeightedCouple,
        basis: Vec<PiecewisePower>,
    },
    /// One element in each factor of a product couple, known by its K-profile;
    /// `K(t, Σ cᵢ xᵢ) = Σ |cᵢ| K(t, xᵢ)`.
    DirectSum { profiles: Vec<KProfile> },
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        match self {
            Self::Functions { basis, .. } => basis.len(),
            Self::DirectSum { profiles } => profiles.len(),
        }
    }

    /// Same kernel with every basis element multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            Self::Functions { couple, basis } => Self::Functions {
                couple: *couple,
                basis: basis.iter().map(|f| f.scale(lambda)).collect(),
            },
            Self::DirectSum { profiles } => Self::DirectSum {
                profiles: profiles.iter().map(|p| p.scaled(lambda)).collect(),
            },
        }
    }

    /// Same kernel seen in the couple whose weights are both multiplied by `c`.
    pub fn with_common_weight_scale(&self, c: f64) -> Self {
        match self {
            Self::Functions { couple, basis } => Self::Functions {
                couple: couple.with_common_scale(c),
                basis: basis.clone(),
            },
            Self::DirectSum { profiles } => Self::DirectSum {
                profiles: profiles.iter().map(|p| p.scaled(c)).collect(),
            },
        }
    }

    /// The element `Σ cᵢ xᵢ` when the basis consists of functions.
    pub fn combination(&self, c: &[f64]) -> Option<PiecewisePower> {
        match self {
            Self::Functions { basis, .. } => Some(PiecewisePower::combination(c, basis)),
            Self::DirectSum { .. } => None,
        }
    }

    /// Rejects dependent bases. Functions are compared through their values at
    /// enough points of every segment of the common refinement to separate
    /// sums of distinct powers.
    pub fn check_independent(&self) -> Result<()> {
        let Self::Functions { basis, .. } = self else {
            // one element per factor: independent as soon as none is zero
            return Ok(());
        };
        if basis.is_empty() {
            return Ok(());
        }
        if basis.iter().any(PiecewisePower::is_zero) {
            return Err(Error::DependentKernel {
                rank: 0,
                dim: basis.len(),
            });
        }
        let mut cuts: Vec<f64> = basis.iter().flat_map(|f| f.breakpoints()).collect();
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let terms = basis
            .iter()
            .flat_map(|f| f.segments().iter().map(|s| s.terms().len()))
            .sum::<usize>()
            .max(1);
        let mut points = Vec::new();
        let mut edges = vec![0.0];
        edges.extend(cuts.iter().copied());
        edges.push(f64::INFINITY);
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (ulo, uhi) = match (lo > 0.0, hi.is_finite()) {
                (true, true) => (lo.ln(), hi.ln()),
                (false, true) => (hi.ln() - 4.0, hi.ln()),
                (true, false) => (lo.ln(), lo.ln() + 4.0),
                (false, false) => (-2.0, 2.0),
            };
            for j in 1..=terms + 1 {
                let u = ulo + (uhi - ulo) * j as f64 / (terms + 2) as f64;
                points.push(u.exp());
            }
        }
        let m = DMatrix::from_fn(points.len(), basis.len(), |i, j| {
            let v = basis[j].eval(points[i]);
            // columns normalized so the rank test is scale free
            v / basis[j].coef_scale().max(f64::MIN_POSITIVE)
        });
        let r = rank(&m);
        if r < basis.len() {
            return Err(Error::DependentKernel {
                rank: r,
                dim: basis.len(),
            });
        }
        Ok(())
    }
}

/// Bookkeeping of the reduction to a surjective operator: the endpoint
/// couples gain blocks of the declared dimensions, the kernel is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub complement_dims: (usize, usize),
    /// Endpoint status of the operator before the reduction.
    pub original_status: EndpointStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorModel {
    pub label: String,
    pub couple_x: CoupleDescriptor,
    pub couple_y: CoupleDescriptor,
    pub kernel: KernelBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
}

impl OperatorModel {
    pub fn new(
        label: impl Into<String>,
        couple_x: CoupleDescriptor,
        couple_y: CoupleDescriptor,
        kernel: KernelBasis,
    ) -> Result<Self> {
        let m = Self {
            label: label.into(),
            couple_x,
            couple_y,
            kernel,
            reduction: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.couple_x.validate()?;
        self.couple_y.validate()?;
        if let KernelBasis::DirectSum { profiles } = &self.kernel {
            if let Some(first) = profiles.first() {
                if profiles.iter().any(|p| p.grid() != first.grid()) {
                    return Err(invalid("kernel", "direct-sum profiles must share one grid"));
                }
            }
        }
        self.kernel.check_independent()
    }

    pub fn endpoint_status(&self) -> EndpointStatus {
        self.couple_x.endpoint_status
    }

    /// Whether the operator is known to be invertible on the endpoint spaces,
    /// looking through a reduction to the original operator.
    pub fn invertible_on_endpoints(&self) -> bool {
        match self.reduction {
            Some(r) => r.original_status.is_invertible(),
            None => self.endpoint_status().is_invertible(),
        }
    }
}

/// The operator `Ã(x, m₀, m₁) = A x + j₀ m₀ + j₁ m₁` onto `Y`, with `Mᵢ`
/// complements of the endpoint ranges. Kernels embed as `(x, 0, 0)`, so the
/// kernel data are unchanged and `F(X̃0, X̃1) = F(X0, X1) × {0} × {0}`.
pub fn reduce_to_surjective(model: &OperatorModel, complement_dims: (usize, usize)) -> OperatorModel {
    if complement_dims == (0, 0) {
        return model.clone();
    }
    let original_status = model
        .reduction
        .map_or(model.endpoint_status(), |r| r.original_status);
    let (prev0, prev1) = model.reduction.map_or((0, 0), |r| r.complement_dims);
    let mut reduced = model.clone();
    reduced.couple_x.endpoint_status = EndpointStatus::SurjectiveFredholmOnEndpoints {
        kernel_dims: (prev0 + complement_dims.0, prev1 + complement_dims.1),
    };
    reduced.reduction = Some(Reduction {
        complement_dims: (prev0 + complement_dims.0, prev1 + complement_dims.1),
        original_status,
    });
    reduced.label = format!(
        "{} (reduced, complements {}+{})",
        model.label, complement_dims.0, complement_dims.1
    );
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couples::PowerWeight;

    fn couple() -> WeightedCouple {
        WeightedCouple::new(
            2.0,
            PowerWeight::new(0.5, 0.25, 1.0).unwrap(),
            PowerWeight::new(-0.5, -0.75, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn dependence_is_detected() {
        let f = PiecewisePower::power(1.0, 0.0);
        let g = PiecewisePower::constant_on(1.0, 2.0, 1.0).unwrap();
        let ok = KernelBasis::Functions {
            couple: couple(),
            basis: vec![f.clone(), g.clone()],
        };
        assert!(ok.check_independent().is_ok());
        let bad = KernelBasis::Functions {
            couple: couple(),
            basis: vec![f.clone(), g, f.scale(-2.0)],
        };
        assert!(matches!(
            bad.check_independent(),
            Err(Error::DependentKernel { rank: 2, dim: 3 })
        ));
        let powers = KernelBasis::Functions {
            couple: couple(),
            basis: vec![PiecewisePower::power(1.0, 0.1), PiecewisePower::power(1.0, 0.2)],
        };
        assert!(powers.check_independent().is_ok());
    }

    #[test]
    fn reduction_is_bookkeeping() {
        let c = CoupleDescriptor::weighted(couple());
        let m = OperatorModel::new(
            "hardy",
            c.clone(),
            c,
            KernelBasis::Functions {
                couple: couple(),
                basis: vec![PiecewisePower::power(1.0, 0.0)],
            },
        )
        .unwrap();
        assert_eq!(reduce_to_surjective(&m, (0, 0)), m);
        let r = reduce_to_surjective(&m, (2, 3));
        assert_eq!(r.kernel, m.kernel);
        assert!(!r.endpoint_status().is_invertible());
        assert!(r.invertible_on_endpoints());
        let rr = reduce_to_surjective(&r, (1, 0));
        assert_eq!(rr.reduction.unwrap().complement_dims, (3, 3));
    }
}
