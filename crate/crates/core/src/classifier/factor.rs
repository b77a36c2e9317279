use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::classify::{classify, Classification, ConditionCheck};
use super::linalg::{contained, join};
use super::model::{KernelBasis, OperatorModel};
use super::rows::RowModel;
use crate::error::{Error, Result};
use crate::kfunctional::{k_p, minimize_convex, ThetaQ, EXPONENT_TOL};

/// Dyadic exponents at which quotient K-functionals are evaluated near each end.
pub const LOW_WINDOW: (i32, i32) = (-80, -70);
pub const HIGH_WINDOW: (i32, i32) = (70, 80);
/// Allowed gap between a numerically re-derived tail slope and the exact one.
pub const SLOPE_AGREEMENT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorClass {
    F1,
    F2,
    F3,
}

/// Tail slopes of one quotient class, exact and re-derived numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub coefficients: Vec<f64>,
    pub exact: (f64, f64),
    pub numeric: (f64, f64),
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDescriptor {
    pub name: String,
    pub class: FactorClass,
    /// Dimension of the kernel of this factor.
    pub kernel_dim: usize,
    pub condition: ConditionCheck,
    pub slopes: Vec<SlopeCheck>,
}

impl FactorDescriptor {
    pub fn holds(&self) -> bool {
        self.condition.holds && self.slopes.iter().all(|s| s.agrees)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationData {
    pub classification: Classification,
    pub factors: Vec<FactorDescriptor>,
}

impl FactorizationData {
    /// Every factor satisfies its class condition and the numeric slopes agree.
    pub fn verified(&self) -> bool {
        self.factors.iter().all(FactorDescriptor::holds)
    }
}

fn matrix(cols: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, &DVector::from_column_slice(c));
    }
    m
}

/// `ln inf_{u ∈ span(U)} K(2^k, x + u)` for `x = Σ wᵢ eᵢ`.
fn ln_quotient_k(kernel: &KernelBasis, w: &[f64], u: &[Vec<f64>], k: i32) -> f64 {
    let t = (k as f64).exp2();
    let mix = |c: &[f64]| -> Vec<f64> {
        let mut y = w.to_vec();
        for (cj, uj) in c.iter().zip(u) {
            for (yi, ui) in y.iter_mut().zip(uj) {
                *yi += cj * ui;
            }
        }
        y
    };
    let q = match kernel {
        KernelBasis::Functions { couple, basis } => minimize_convex(u.len(), |c| {
            k_p(couple, &crate::couples::PiecewisePower::combination(&mix(c), basis), t)
        }),
        KernelBasis::DirectSum { profiles } => minimize_convex(u.len(), |c| {
            mix(c)
                .iter()
                .zip(profiles)
                .map(|(yi, p)| yi.abs() * p.value_at_exponent(k).unwrap_or_else(|| p.value_at(t)))
                .sum()
        }),
    };
    q.value.ln()
}

fn end_slope(kernel: &KernelBasis, w: &[f64], u: &[Vec<f64>], (lo, hi): (i32, i32)) -> f64 {
    let a = ln_quotient_k(kernel, w, u, lo);
    let b = ln_quotient_k(kernel, w, u, hi);
    (b - a) / ((hi - lo) as f64 * std::f64::consts::LN_2)
}

fn slope_checks(rows: &RowModel, kernel: &KernelBasis, w: &DMatrix<f64>, u: &DMatrix<f64>) -> Vec<SlopeCheck> {
    let ucols: Vec<Vec<f64>> = u.column_iter().map(|c| c.iter().copied().collect()).collect();
    w.column_iter()
        .filter_map(|col| {
            let single = DMatrix::from_column_slice(col.len(), 1, col.as_slice());
            if contained(&single, u) {
                return None;
            }
            let set = rows.quotient_indices(&single, u);
            let exact = (set.alpha0, set.alpha_inf);
            let coeffs: Vec<f64> = col.iter().copied().collect();
            let numeric = (
                end_slope(kernel, &coeffs, &ucols, LOW_WINDOW),
                end_slope(kernel, &coeffs, &ucols, HIGH_WINDOW),
            );
            let slack = SLOPE_AGREEMENT + rows.uncertainty();
            let agrees = (numeric.0 - exact.0).abs() <= slack && (numeric.1 - exact.1).abs() <= slack;
            Some(SlopeCheck {
                coefficients: coeffs,
                exact,
                numeric,
                agrees,
            })
        })
        .collect()
}

/// Splits a Fredholm operator into a class F1 factor with kernel `V⁰ ∩ V¹`,
/// a class F2 factor carrying `Ṽ`, and a class F3 factor, and re-checks each
/// factor's condition both exactly and from numerically minimized quotient
/// K-functionals.
pub fn factorize(model: &OperatorModel, tq: ThetaQ) -> Result<FactorizationData> {
    if tq.q_is_infinite() {
        return Err(Error::InfiniteQ);
    }
    let classification = classify(model, tq)?;
    let rows = RowModel::from_kernel(&model.kernel)?;
    let n = rows.dim;
    let split = &classification.split;
    let v0 = matrix(&split.v0_basis, n);
    let v1 = matrix(&split.v1_basis, n);
    let v01 = matrix(&split.v01_basis, n);
    let vt = matrix(&split.vtilde_basis, n);
    let theta = tq.theta();
    let cond = |name: &str, lower: f64, upper: f64| ConditionCheck {
        name: name.into(),
        lower,
        theta,
        upper,
        holds: theta - lower > EXPONENT_TOL && upper - theta > EXPONENT_TOL,
    };
    let none = DMatrix::zeros(n, 0);

    let i1 = rows.subspace_indices(&v01);
    let a1 = FactorDescriptor {
        name: "A1".into(),
        class: FactorClass::F1,
        kernel_dim: v01.ncols(),
        condition: cond("K1", i1.beta_inf, i1.alpha0),
        slopes: slope_checks(&rows, &model.kernel, &v01, &none),
    };
    let i2 = rows.quotient_indices(&vt, &v01);
    let a2 = FactorDescriptor {
        name: "A2".into(),
        class: FactorClass::F2,
        kernel_dim: vt.ncols(),
        condition: cond("K2", i2.beta0, i2.alpha_inf),
        slopes: slope_checks(&rows, &model.kernel, &vt, &v01),
    };
    let u = join(&v01, &vt);
    let q0 = rows.quotient_indices(&v0, &u);
    let q1 = rows.quotient_indices(&v1, &u);
    let a3 = FactorDescriptor {
        name: "A3".into(),
        class: FactorClass::F3,
        kernel_dim: 0,
        condition: cond("K3", q1.beta, q0.alpha),
        slopes: slope_checks(&rows, &model.kernel, &join(&v0, &v1), &u),
    };
    Ok(FactorizationData {
        classification,
        factors: vec![a1, a2, a3],
    })
}
