//! Asymptotic description of a finite-dimensional kernel.
//!
//! A combination `y ∈ Rⁿ` of the basis has `K(t, Σ yᵢ xᵢ) ≍ t^{tail0(y)}` as
//! `t → 0` and `≍ t^{tail_inf(y)}` as `t → ∞`. Both are read off a finite list
//! of rows `(r, z, i)`: `tail0(y)` is the least `z` over rows with `r·y ≠ 0`
//! (1 if there is none) and `tail_inf(y)` the largest `i` (0 if none). Every
//! index of every subspace, and every quotient of one by another, is then a
//! finite computation with null spaces.

use nalgebra::{DMatrix, DVector};

use super::linalg::{self, contained, intersection_dim, join, null_space};
use super::model::KernelBasis;
use crate::couples::PowerTerm;
use crate::error::{Error, Result};
use crate::indices::{indices_of_profile, BoundKind, Certification, IndexSet, IndexSource};
use crate::kfunctional::asymptotics::{end_contribution, end_weight_exponents, End};

const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: DVector<f64>,
    pub slope_zero: f64,
    pub slope_inf: f64,
    /// Half-width of the uncertainty of both slopes (0 for analytic rows).
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowModel {
    pub dim: usize,
    pub rows: Vec<Row>,
}

impl RowModel {
    pub fn from_kernel(kernel: &KernelBasis) -> Result<Self> {
        match kernel {
            KernelBasis::DirectSum { profiles } => {
                let n = profiles.len();
                let rows = profiles
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut e = DVector::zeros(n);
                        e[i] = 1.0;
                        let (z, inf, unc) = match (p.tail0(), p.tail_inf()) {
                            (Some(a), Some(b)) => (a, b, 0.0),
                            _ => {
                                let s = indices_of_profile(p)?;
                                if !s.undetermined.is_empty() {
                                    return Err(Error::InvalidParameter {
                                        name: "profile",
                                        reason: format!("kernel element {i}: indices undetermined on this grid"),
                                    });
                                }
                                let unc = ((s.beta0 - s.alpha0).max(s.beta_inf - s.alpha_inf) / 2.0)
                                    .max(s.tolerance)
                                    + 1e-9;
                                ((s.alpha0 + s.beta0) / 2.0, (s.alpha_inf + s.beta_inf) / 2.0, unc)
                            }
                        };
                        Ok(Row {
                            coeffs: e,
                            slope_zero: z,
                            slope_inf: inf,
                            uncertainty: unc,
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Self { dim: n, rows })
            }
            KernelBasis::Functions { couple, basis } => {
                let n = basis.len();
                let mut rows = Vec::new();
                for end in [End::Low, End::High] {
                    let (a, b) = end_weight_exponents(couple, end);
                    // exponent -> coefficient of each basis element at this end
                    let mut table: Vec<(f64, DVector<f64>)> = Vec::new();
                    for (j, f) in basis.iter().enumerate() {
                        let seg = match end {
                            End::Low => f.low_end(),
                            End::High => f.high_end(),
                        };
                        for &PowerTerm { coef, exp } in seg.map_or(&[][..], |s| s.terms()) {
                            match table.iter_mut().find(|(e, _)| (e - exp).abs() <= MERGE_TOL) {
                                Some((_, v)) => v[j] += coef,
                                None => {
                                    let mut v = DVector::zeros(n);
                                    v[j] = coef;
                                    table.push((exp, v));
                                }
                            }
                        }
                    }
                    for (exp, coeffs) in table {
                        let (z, i) = end_contribution(exp, a, b, end).ok_or_else(|| {
                            Error::MalformedElement(format!(
                                "kernel term with exponent {exp} at the {end:?} end is not in X0 + X1"
                            ))
                        })?;
                        // scale rows to unit length; only their null spaces matter
                        let norm = coeffs.norm();
                        rows.push(Row {
                            coeffs: coeffs / norm,
                            slope_zero: z,
                            slope_inf: i,
                            uncertainty: 0.0,
                        });
                    }
                }
                Ok(Self { dim: n, rows })
            }
        }
    }

    /// Largest slope uncertainty over all rows.
    pub fn uncertainty(&self) -> f64 {
        self.rows.iter().map(|r| r.uncertainty).fold(0.0, f64::max)
    }

    fn null_of(&self, keep: impl Fn(&Row) -> bool) -> DMatrix<f64> {
        let rows: Vec<&DVector<f64>> = self.rows.iter().filter(|r| keep(r)).map(|r| &r.coeffs).collect();
        null_space(self.dim, &rows)
    }

    /// Elements whose `tail0` is at least `gamma`.
    pub fn n_space(&self, gamma: f64) -> DMatrix<f64> {
        self.null_of(|r| r.slope_zero < gamma)
    }

    /// Elements whose `tail_inf` is at most `delta`.
    pub fn m_space(&self, delta: f64) -> DMatrix<f64> {
        self.null_of(|r| r.slope_inf > delta)
    }

    /// `V⁰_{θ,q}`: the half-norm on `(0, 1)` is finite.
    pub fn v0(&self, theta: f64, q_infinite: bool) -> DMatrix<f64> {
        if q_infinite {
            self.null_of(|r| r.slope_zero < theta)
        } else {
            self.null_of(|r| r.slope_zero <= theta)
        }
    }

    /// `V¹_{θ,q}`: the half-norm on `(1, ∞)` is finite.
    pub fn v1(&self, theta: f64, q_infinite: bool) -> DMatrix<f64> {
        if q_infinite {
            self.null_of(|r| r.slope_inf > theta)
        } else {
            self.null_of(|r| r.slope_inf >= theta)
        }
    }

    /// `(tail0, tail_inf)` of one combination.
    pub fn tails(&self, y: &[f64]) -> (f64, f64) {
        let y = DVector::from_column_slice(y);
        let scale = y.norm().max(f64::MIN_POSITIVE);
        let (mut t0, mut ti) = (1.0f64, 0.0f64);
        for r in &self.rows {
            if r.coeffs.dot(&y).abs() > linalg::RANK_TOL * scale {
                t0 = t0.min(r.slope_zero);
                ti = ti.max(r.slope_inf);
            }
        }
        (t0, ti)
    }

    fn zero_candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.rows.iter().map(|r| r.slope_zero).collect();
        c.extend([0.0, 1.0]);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    fn inf_candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.rows.iter().map(|r| r.slope_inf).collect();
        c.extend([0.0, 1.0]);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    /// Indices of the image of `span(w)` in the quotient by `span(u)`.
    pub fn quotient_indices(&self, w: &DMatrix<f64>, u: &DMatrix<f64>) -> IndexSet {
        if contained(w, u) {
            return IndexSet::vacuous();
        }
        let base = intersection_dim(w, u);
        let grows = |s: &DMatrix<f64>| intersection_dim(w, &join(u, s)) > base;
        let covers = |s: &DMatrix<f64>| contained(w, &join(u, s));
        let zc = self.zero_candidates();
        let ic = self.inf_candidates();
        // N(γ) shrinks and M(δ) grows with their argument
        let alpha0 = zc.iter().copied().filter(|&g| covers(&self.n_space(g))).fold(0.0, f64::max);
        let beta0 = zc.iter().copied().filter(|&g| grows(&self.n_space(g))).fold(0.0, f64::max);
        let alpha_inf = ic.iter().copied().filter(|&d| grows(&self.m_space(d))).fold(1.0, f64::min);
        let beta_inf = ic.iter().copied().filter(|&d| covers(&self.m_space(d))).fold(1.0, f64::min);
        let tol = self.uncertainty();
        let mut set = IndexSet::from_tails(0.0, 0.0);
        set.alpha0 = alpha0;
        set.beta0 = beta0;
        set.alpha_inf = alpha_inf;
        set.beta_inf = beta_inf;
        set.alpha = alpha0.min(alpha_inf);
        set.beta = beta0.max(beta_inf);
        set.tolerance = tol;
        // γ constants are not tracked by the exact computation
        set.gamma = crate::indices::GammaWitness {
            alpha: f64::NAN,
            beta: f64::NAN,
            alpha0: f64::NAN,
            beta0: f64::NAN,
            alpha_inf: f64::NAN,
            beta_inf: f64::NAN,
        };
        set.certification = Certification {
            source: if tol == 0.0 {
                IndexSource::Analytic
            } else {
                IndexSource::ChordSlopes
            },
            alpha_type: BoundKind::Exact,
            beta_type: BoundKind::Exact,
        };
        set
    }

    /// Indices of `span(w)` itself.
    pub fn subspace_indices(&self, w: &DMatrix<f64>) -> IndexSet {
        self.quotient_indices(w, &linalg::empty(self.dim))
    }
}
