use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{self, columns, greedy_complement, intersection, join, rank};
use super::model::{KernelBasis, OperatorModel};
use super::rows::RowModel;
use crate::error::Result;
use crate::indices::{indices_of_subspace, IndexSet, SubspaceSample};
use crate::kfunctional::{tail_membership, MembershipVerdict, Side, ThetaQ, EXPONENT_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Invertible,
    ClassF1 { dim_ker: usize },
    ClassF2 { codim: usize },
    Fredholm { n: usize, d: usize, index: i64 },
    NotFredholm { failed_condition: String },
    Boundary { which: String },
}

impl Verdict {
    /// Short label used in tables.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Invertible => "Invertible",
            Self::ClassF1 { .. } => "ClassF1",
            Self::ClassF2 { .. } => "ClassF2",
            Self::Fredholm { .. } => "Fredholm",
            Self::NotFredholm { .. } => "NotFredholm",
            Self::Boundary { .. } => "Boundary",
        }
    }

    /// `(dim ker, codim range)` on the interpolation space, when Fredholm.
    pub fn counts(&self) -> Option<(usize, usize)> {
        match *self {
            Self::Invertible => Some((0, 0)),
            Self::ClassF1 { dim_ker } => Some((dim_ker, 0)),
            Self::ClassF2 { codim } => Some((0, codim)),
            Self::Fredholm { n, d, .. } => Some((n, d)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementMembership {
    pub index: usize,
    pub zero_side: MembershipVerdict,
    pub inf_side: MembershipVerdict,
}

/// `V⁰`, `V¹`, `V⁰ ∩ V¹` and a complement `Ṽ` of `V⁰ + V¹`, as coefficient
/// vectors over the kernel basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSplit {
    pub v0_basis: Vec<Vec<f64>>,
    pub v1_basis: Vec<Vec<f64>>,
    pub v01_basis: Vec<Vec<f64>>,
    pub vtilde_basis: Vec<Vec<f64>>,
    pub memberships: Vec<ElementMembership>,
    /// `θ` equals a tail exponent of some kernel direction.
    pub boundary: bool,
    /// A numerically estimated exponent lies within its uncertainty of `θ`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ComplementOrder {
    /// Coordinate vectors tried first to last.
    #[default]
    Standard,
    /// Coordinate vectors tried last to first.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub complement_order: ComplementOrder,
}

/// `lower < θ < upper`, with its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub lower: f64,
    pub theta: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedIndexSet {
    pub name: String,
    pub indices: IndexSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
    pub tq: ThetaQ,
    pub verdict: Verdict,
    /// Endpoints invertible and `q < ∞`: failed conditions then prove non-Fredholmness.
    pub necessity_applicable: bool,
    pub certificates: Vec<ConditionCheck>,
    pub indices: Vec<NamedIndexSet>,
    pub split: KernelSplit,
}

struct Context {
    rows: RowModel,
    v0: DMatrix<f64>,
    v1: DMatrix<f64>,
    v01: DMatrix<f64>,
    vtilde: DMatrix<f64>,
    split: KernelSplit,
}

fn complement_order(n: usize, order: ComplementOrder) -> Vec<usize> {
    match order {
        ComplementOrder::Standard => (0..n).collect(),
        ComplementOrder::Reversed => (0..n).rev().collect(),
    }
}

fn build(model: &OperatorModel, tq: ThetaQ, opts: &ClassifyOptions) -> Result<Context> {
    let rows = RowModel::from_kernel(&model.kernel)?;
    let n = rows.dim;
    let (theta, qinf) = (tq.theta(), tq.q_is_infinite());
    let v0 = rows.v0(theta, qinf);
    let v1 = rows.v1(theta, qinf);
    let v01 = intersection(&v0, &v1);
    let vtilde = greedy_complement(&join(&v0, &v1), &complement_order(n, opts.complement_order));

    let memberships = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let (t0, ti) = rows.tails(&e);
            ElementMembership {
                index: j,
                zero_side: tail_membership(t0, tq, Side::ZeroSide, EXPONENT_TOL),
                inf_side: tail_membership(ti, tq, Side::InfSide, EXPONENT_TOL),
            }
        })
        .collect();
    let near = |s: f64, tol: f64| (s - theta).abs() <= tol;
    let boundary = rows
        .rows
        .iter()
        .any(|r| near(r.slope_zero, EXPONENT_TOL) || near(r.slope_inf, EXPONENT_TOL));
    let degenerate = rows
        .rows
        .iter()
        .any(|r| r.uncertainty > 0.0 && (near(r.slope_zero, r.uncertainty) || near(r.slope_inf, r.uncertainty)));
    let split = KernelSplit {
        v0_basis: columns(&v0),
        v1_basis: columns(&v1),
        v01_basis: columns(&v01),
        vtilde_basis: columns(&vtilde),
        memberships,
        boundary,
        degenerate,
    };
    Ok(Context {
        rows,
        v0,
        v1,
        v01,
        vtilde,
        split,
    })
}

/// Splits the kernel at `(θ, q)`. Memberships are decided for whole
/// subspaces, so combinations whose tails cancel are handled exactly.
pub fn split_kernel(model: &OperatorModel, tq: ThetaQ) -> Result<KernelSplit> {
    Ok(build(model, tq, &ClassifyOptions::default())?.split)
}

pub fn classify(model: &OperatorModel, tq: ThetaQ) -> Result<Classification> {
    classify_with(model, tq, &ClassifyOptions::default())
}

pub fn classify_with(model: &OperatorModel, tq: ThetaQ, opts: &ClassifyOptions) -> Result<Classification> {
    let ctx = build(model, tq, opts)?;
    let theta = tq.theta();
    let n = ctx.rows.dim;
    let necessity_applicable = model.invertible_on_endpoints() && !tq.q_is_infinite();
    let tol = ctx.rows.uncertainty();
    let mut certificates = Vec::new();
    let mut indices = Vec::new();
    let mut check = |name: &str, lower: f64, upper: f64| -> ConditionCheck {
        let c = ConditionCheck {
            name: name.to_string(),
            lower,
            theta,
            upper,
            holds: theta - lower > EXPONENT_TOL && upper - theta > EXPONENT_TOL,
        };
        certificates.push(c.clone());
        c
    };
    let near = |c: &ConditionCheck| tol > 0.0 && ((c.theta - c.lower).abs() <= tol || (c.upper - c.theta).abs() <= tol);
    let finish = |verdict: Verdict, certificates: Vec<ConditionCheck>, indices: Vec<NamedIndexSet>| Classification {
        label: model.label.clone(),
        tq,
        verdict,
        necessity_applicable,
        certificates,
        indices,
        split: ctx.split.clone(),
    };

    if ctx.split.degenerate {
        let which = "a numerically estimated tail exponent is within its uncertainty of theta".to_string();
        return Ok(finish(Verdict::Boundary { which }, certificates, indices));
    }
    if n == 0 {
        return Ok(finish(Verdict::Invertible, certificates, indices));
    }

    let ker = linalg::identity(n);
    let ik = ctx.rows.subspace_indices(&ker);
    indices.push(NamedIndexSet {
        name: "kernel".into(),
        indices: ik.clone(),
    });
    let k1 = check("K1", ik.beta_inf, ik.alpha0);
    let k2 = check("K2", ik.beta0, ik.alpha_inf);
    let i_v0 = ctx.rows.subspace_indices(&ctx.v0);
    let i_v1 = ctx.rows.subspace_indices(&ctx.v1);
    let k3 = check("K3", i_v1.beta, i_v0.alpha);
    let ker_is_sum = rank(&join(&ctx.v0, &ctx.v1)) == n;
    indices.push(NamedIndexSet {
        name: "V0".into(),
        indices: i_v0.clone(),
    });
    indices.push(NamedIndexSet {
        name: "V1".into(),
        indices: i_v1.clone(),
    });

    let i_v01 = ctx.rows.subspace_indices(&ctx.v01);
    let k1_v01 = check("K1 on V0∩V1", i_v01.beta_inf, i_v01.alpha0);
    let q_vt = ctx.rows.quotient_indices(&ctx.vtilde, &ctx.v01);
    let k2_vt = check("K2 on Vtilde mod V0∩V1", q_vt.beta0, q_vt.alpha_inf);
    let u2 = join(&ctx.v01, &ctx.vtilde);
    let q1 = ctx.rows.quotient_indices(&ctx.v1, &u2);
    let q0 = ctx.rows.quotient_indices(&ctx.v0, &u2);
    let third = check("quotient K3", q1.beta, q0.alpha);
    for (name, set) in [
        ("V0∩V1", i_v01),
        ("Vtilde mod V0∩V1", q_vt),
        ("V0 mod V0∩V1+Vtilde", q0),
        ("V1 mod V0∩V1+Vtilde", q1),
    ] {
        indices.push(NamedIndexSet {
            name: name.into(),
            indices: set,
        });
    }

    let sufficiency = [&k1, &k2, &k3, &k1_v01, &k2_vt, &third];
    if let Some(c) = sufficiency.iter().find(|c| near(c)) {
        let which = format!("{} is within numerical tolerance {tol:.1e} of theta", c.name);
        return Ok(finish(Verdict::Boundary { which }, certificates, indices));
    }
    let verdict = if k1.holds {
        Verdict::ClassF1 { dim_ker: n }
    } else if k2.holds {
        Verdict::ClassF2 { codim: n }
    } else if ker_is_sum && k3.holds {
        Verdict::Invertible
    } else if k1_v01.holds && k2_vt.holds && third.holds {
        let (nn, d) = (ctx.v01.ncols(), ctx.vtilde.ncols());
        Verdict::Fredholm {
            n: nn,
            d,
            index: nn as i64 - d as i64,
        }
    } else if necessity_applicable {
        let failed = [&k1_v01, &k2_vt, &third].into_iter().find(|c| !c.holds).unwrap();
        Verdict::NotFredholm {
            failed_condition: format!(
                "{}: {} < {} < {} fails",
                failed.name, failed.lower, failed.theta, failed.upper
            ),
        }
    } else {
        Verdict::Boundary {
            which: "sufficient conditions fail and necessity is not established (q = inf or endpoints not invertible)"
                .into(),
        }
    };
    Ok(finish(verdict, certificates, indices))
}

/// Classifications for each `θ` in `thetas` at fixed `q`, computed in parallel.
pub fn classify_sweep(model: &OperatorModel, q: f64, thetas: &[f64]) -> Result<Vec<Classification>> {
    thetas
        .par_iter()
        .map(|&t| classify(model, ThetaQ::new(t, q)?))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaSet {
    /// `[lo, hi]`, or `None` when the intersection is empty.
    pub interval: Option<(f64, f64)>,
    pub sampled: bool,
}

/// Sphere points beyond the structured ones used by `omega_set`.
pub const OMEGA_DENSITY: usize = 64;
const OMEGA_SEED: u64 = 17;

/// `Ω_A = ⋂ [α(x), β(x)]` over the unit sphere of the kernel (sampled).
pub fn omega_set(model: &OperatorModel) -> Result<OmegaSet> {
    let sample = match &model.kernel {
        KernelBasis::Functions { couple, basis } => {
            SubspaceSample::from_functions(couple, basis, OMEGA_DENSITY, OMEGA_SEED)?
        }
        KernelBasis::DirectSum { profiles } => SubspaceSample::from_profiles(profiles, OMEGA_DENSITY, OMEGA_SEED)?,
    };
    if sample.dim == 0 {
        return Ok(OmegaSet {
            interval: None,
            sampled: false,
        });
    }
    let lo = sample.point_indices.iter().map(|s| s.alpha).fold(f64::NEG_INFINITY, f64::max);
    let hi = sample.point_indices.iter().map(|s| s.beta).fold(f64::INFINITY, f64::min);
    Ok(OmegaSet {
        interval: (lo <= hi).then_some((lo, hi)),
        sampled: sample.dim > 1,
    })
}

/// Sampled indices of the whole kernel, as reported next to exact ones.
pub fn sampled_kernel_indices(model: &OperatorModel) -> Result<IndexSet> {
    let sample = match &model.kernel {
        KernelBasis::Functions { couple, basis } => {
            SubspaceSample::from_functions(couple, basis, OMEGA_DENSITY, OMEGA_SEED)?
        }
        KernelBasis::DirectSum { profiles } => SubspaceSample::from_profiles(profiles, OMEGA_DENSITY, OMEGA_SEED)?,
    };
    Ok(indices_of_subspace(&sample))
}
