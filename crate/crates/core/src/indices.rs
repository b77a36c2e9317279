//! Dilation indices of elements and finite-dimensional subspaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::couples::{PiecewisePower, WeightedCouple};
use crate::error::{invalid, Error, Result};
use crate::kfunctional::asymptotics::tail_exponents;
use crate::kfunctional::{k_p, KProfile};

/// Grid steps per "decade" of the numeric estimator: side indices are read off
/// the chords inside the outermost window of this many steps.
pub const CHORD_WINDOW: usize = 10;
const MIN_SIDE_STEPS: usize = 3 * CHORD_WINDOW;
/// Chord slopes may leave `[0, 1]` by rounding only; beyond this they are rejected.
const SLOPE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSource {
    /// From analytic tail exponents.
    Analytic,
    /// From extremal chord slopes of sampled values.
    ChordSlopes,
    /// Worst case over a finite sample of the unit sphere of a subspace.
    Sampled,
    /// The empty set (zero subspace).
    Vacuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// What the reported indices are known to be relative to the true ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub source: IndexSource,
    pub alpha_type: BoundKind,
    pub beta_type: BoundKind,
}

/// Best constant `γ` in the defining inequality of each index at its reported value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaWitness {
    pub alpha: f64,
    pub beta: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha_inf: f64,
    pub beta_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    pub alpha: f64,
    pub beta: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha_inf: f64,
    pub beta_inf: f64,
    pub gamma: GammaWitness,
    pub tolerance: f64,
    pub certification: Certification,
    /// Indices that could not be estimated (too few grid steps on their side).
    pub undetermined: Vec<String>,
}

impl IndexSet {
    /// Indices of the empty set: every strict inequality `β < θ < α` holds.
    pub fn vacuous() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            alpha0: 1.0,
            beta0: 0.0,
            alpha_inf: 1.0,
            beta_inf: 0.0,
            gamma: GammaWitness {
                alpha: 1.0,
                beta: 1.0,
                alpha0: 1.0,
                beta0: 1.0,
                alpha_inf: 1.0,
                beta_inf: 1.0,
            },
            tolerance: 0.0,
            certification: Certification {
                source: IndexSource::Vacuous,
                alpha_type: BoundKind::Exact,
                beta_type: BoundKind::Exact,
            },
            undetermined: Vec::new(),
        }
    }

    /// Indices of a profile with `K ≍ t^{θ₀}` at 0 and `≍ t^{θ∞}` at ∞.
    pub fn from_tails(theta0: f64, theta_inf: f64) -> Self {
        Self {
            alpha: theta0.min(theta_inf),
            beta: theta0.max(theta_inf),
            alpha0: theta0,
            beta0: theta0,
            alpha_inf: theta_inf,
            beta_inf: theta_inf,
            gamma: GammaWitness {
                alpha: 1.0,
                beta: 1.0,
                alpha0: 1.0,
                beta0: 1.0,
                alpha_inf: 1.0,
                beta_inf: 1.0,
            },
            tolerance: 0.0,
            certification: Certification {
                source: IndexSource::Analytic,
                alpha_type: BoundKind::Exact,
                beta_type: BoundKind::Exact,
            },
            undetermined: Vec::new(),
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.certification.source == IndexSource::Vacuous
    }

    /// `0 ≤ α ≤ α₀ ≤ β₀ ≤ β ≤ 1` and the same chain through `α∞, β∞`.
    pub fn check_ordering(&self) -> std::result::Result<(), String> {
        if self.is_vacuous() {
            return Ok(());
        }
        let tol = self.tolerance + 1e-12;
        let chains = [
            ("alpha0", [self.alpha, self.alpha0, self.beta0, self.beta]),
            ("alpha_inf", [self.alpha, self.alpha_inf, self.beta_inf, self.beta]),
        ];
        for (name, chain) in chains {
            if chain[0] < -tol || chain[3] > 1.0 + tol {
                return Err(format!("indices leave [0, 1] along the {name} chain"));
            }
            if chain.windows(2).any(|w| w[0] > w[1] + tol) {
                return Err(format!("ordering violated along the {name} chain: {chain:?}"));
            }
        }
        Ok(())
    }
}

/// `log₂` chord slope of the profile between grid exponents `i < j`.
pub fn chord_slope(profile: &KProfile, i: i32, j: i32) -> Option<f64> {
    let a = profile.value_at_exponent(i)?;
    let b = profile.value_at_exponent(j)?;
    Some((b / a).log2() / (j - i) as f64)
}

/// Smallest and largest chord slope over all pairs `lo <= i < j <= hi`.
pub fn chord_extremes(profile: &KProfile, lo: i32, hi: i32) -> Result<(f64, f64)> {
    let logs: Vec<f64> = (lo..=hi)
        .map(|k| {
            profile
                .value_at_exponent(k)
                .map(f64::log2)
                .ok_or_else(|| invalid("window", format!("2^{k} is off the grid")))
        })
        .collect::<Result<_>>()?;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..logs.len() {
        for j in (i + 1)..logs.len() {
            let s = (logs[j] - logs[i]) / (j - i) as f64;
            min = min.min(s);
            max = max.max(s);
        }
    }
    if min < -SLOPE_SLACK || max > 1.0 + SLOPE_SLACK {
        return Err(Error::InvalidParameter {
            name: "profile",
            reason: format!("chord slopes [{min}, {max}] leave [0, 1]; not a K-functional"),
        });
    }
    Ok((min.clamp(0.0, 1.0), max.clamp(0.0, 1.0)))
}

/// Indices of a single element from its K-profile: analytic when both tails
/// are known, extremal chord slopes of the outermost window otherwise.
pub fn indices_of_profile(profile: &KProfile) -> Result<IndexSet> {
    match (profile.tail0(), profile.tail_inf()) {
        (Some(a), Some(b)) => {
            let mut set = IndexSet::from_tails(a, b);
            set.gamma = gamma_witnesses(profile, &set);
            Ok(set)
        }
        _ => indices_from_chords(profile, CHORD_WINDOW),
    }
}

/// Numeric indices from chords within the outermost `window` grid steps on each
/// side of `t = 1`; the two-sided indices combine the sides.
pub fn indices_from_chords(profile: &KProfile, window: usize) -> Result<IndexSet> {
    let grid = profile.grid();
    let (w, min_side) = (window as i32, MIN_SIDE_STEPS as i32);
    let mut undetermined = Vec::new();
    let zero = if grid.k_min() <= -min_side {
        Some(chord_extremes(profile, grid.k_min(), grid.k_min() + w)?)
    } else {
        undetermined.extend(["alpha0", "beta0"]);
        None
    };
    let inf = if grid.k_max() >= min_side {
        Some(chord_extremes(profile, grid.k_max() - w, grid.k_max())?)
    } else {
        undetermined.extend(["alpha_inf", "beta_inf"]);
        None
    };
    let (alpha0, beta0) = zero.unwrap_or((f64::NAN, f64::NAN));
    let (alpha_inf, beta_inf) = inf.unwrap_or((f64::NAN, f64::NAN));
    if zero.is_none() || inf.is_none() {
        undetermined.extend(["alpha", "beta"]);
    }
    let tolerance = [beta0 - alpha0, beta_inf - alpha_inf]
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let mut set = IndexSet {
        alpha: alpha0.min(alpha_inf),
        beta: beta0.max(beta_inf),
        alpha0,
        beta0,
        alpha_inf,
        beta_inf,
        gamma: IndexSet::vacuous().gamma,
        tolerance,
        certification: Certification {
            source: IndexSource::ChordSlopes,
            alpha_type: BoundKind::Exact,
            beta_type: BoundKind::Exact,
        },
        undetermined: undetermined.into_iter().map(String::from).collect(),
    };
    if zero.is_none() || inf.is_none() {
        set.alpha = f64::NAN;
        set.beta = f64::NAN;
    }
    set.gamma = gamma_witnesses(profile, &set);
    Ok(set)
}

/// Best `γ` on the grid for each index: `inf_{s≤t} (s^{-β}K(s)) / (t^{-β}K(t))`
/// for β-type indices and `sup_{s≤t}` of the same ratio at `α` for α-type ones.
fn gamma_witnesses(profile: &KProfile, set: &IndexSet) -> GammaWitness {
    let g = profile.grid();
    let all = (g.k_min(), g.k_max());
    let zero = (g.k_min(), 0.min(g.k_max()));
    let inf = (0.max(g.k_min()), g.k_max());
    GammaWitness {
        alpha: range_gamma(profile, set.alpha, all, true),
        beta: range_gamma(profile, set.beta, all, false),
        alpha0: range_gamma(profile, set.alpha0, zero, true),
        beta0: range_gamma(profile, set.beta0, zero, false),
        alpha_inf: range_gamma(profile, set.alpha_inf, inf, true),
        beta_inf: range_gamma(profile, set.beta_inf, inf, false),
    }
}

fn range_gamma(profile: &KProfile, theta: f64, (lo, hi): (i32, i32), alpha_type: bool) -> f64 {
    if !theta.is_finite() || lo >= hi {
        return f64::NAN;
    }
    // h(k) = log₂(2^{-kθ} K(2^k)); track the extreme of h(s) - h(t) over s <= t
    let mut best = 0.0f64;
    let mut running = f64::NAN;
    for k in lo..=hi {
        let h = profile.value_at_exponent(k).unwrap().log2() - theta * k as f64;
        if running.is_nan() {
            running = h;
        }
        if alpha_type {
            running = running.max(h);
            best = best.max(running - h);
        } else {
            running = running.min(h);
            best = best.min(running - h);
        }
    }
    2f64.powf(best)
}

/// Unit-sphere sample of a finite-dimensional subspace, each point carrying
/// the indices of the corresponding combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSample {
    pub dim: usize,
    /// Coefficient vectors normalized so that `K(1, Σ cᵢ xᵢ) = 1`.
    pub sphere_points: Vec<Vec<f64>>,
    pub point_indices: Vec<IndexSet>,
    /// Number of random directions added to the structured ones.
    pub density: usize,
}

/// Angles swept on the circle when the subspace is two-dimensional.
pub const CIRCLE_ANGLES: usize = 721;

impl SubspaceSample {
    /// Sample of a direct sum of one-dimensional pieces, where the K-functional
    /// of a combination is `Σ |cᵢ| K(t, xᵢ)`.
    pub fn from_profiles(basis: &[KProfile], density: usize, seed: u64) -> Result<Self> {
        if let Some(first) = basis.first() {
            if basis.iter().any(|p| p.grid() != first.grid()) {
                return Err(invalid("basis", "profiles must share one grid"));
            }
        }
        let dirs = sphere_directions(basis.len(), density, seed);
        let results: Vec<Result<(Vec<f64>, IndexSet)>> = dirs
            .par_iter()
            .map(|c| {
                let prof = combine_profiles(basis, c)?;
                let norm = prof.value_at(1.0);
                let set = indices_of_profile(&prof)?;
                Ok((c.iter().map(|v| v / norm).collect(), set))
            })
            .collect();
        Self::assemble(basis.len(), density, results)
    }

    /// Sample of `span(basis)` inside one weighted couple, with analytic indices
    /// of every sampled combination.
    pub fn from_functions(
        couple: &WeightedCouple,
        basis: &[PiecewisePower],
        density: usize,
        seed: u64,
    ) -> Result<Self> {
        let dirs = sphere_directions(basis.len(), density, seed);
        let results: Vec<Result<(Vec<f64>, IndexSet)>> = dirs
            .par_iter()
            .map(|c| {
                let f = PiecewisePower::combination(c, basis);
                let (t0, ti) = tail_exponents(couple, &f).ok_or_else(|| {
                    Error::MalformedElement(format!("combination {c:?} is zero or outside X0 + X1"))
                })?;
                let norm = k_p(couple, &f, 1.0);
                Ok((c.iter().map(|v| v / norm).collect(), IndexSet::from_tails(t0, ti)))
            })
            .collect();
        Self::assemble(basis.len(), density, results)
    }

    fn assemble(
        dim: usize,
        density: usize,
        results: Vec<Result<(Vec<f64>, IndexSet)>>,
    ) -> Result<Self> {
        let mut sphere_points = Vec::with_capacity(results.len());
        let mut point_indices = Vec::with_capacity(results.len());
        for r in results {
            let (c, s) = r?;
            sphere_points.push(c);
            point_indices.push(s);
        }
        Ok(Self {
            dim,
            sphere_points,
            point_indices,
            density,
        })
    }
}

/// `Σ |cᵢ| K(·, xᵢ)` with the dominant tails.
pub fn combine_profiles(basis: &[KProfile], c: &[f64]) -> Result<KProfile> {
    let first = basis.first().ok_or_else(|| invalid("basis", "empty"))?;
    let mut values = vec![0.0; first.values().len()];
    let (mut tail0, mut tail_inf) = (Some(1.0f64), Some(0.0f64));
    for (p, &ci) in basis.iter().zip(c) {
        if ci == 0.0 {
            continue;
        }
        for (v, pv) in values.iter_mut().zip(p.values()) {
            *v += ci.abs() * pv;
        }
        tail0 = tail0.zip(p.tail0()).map(|(a, b)| a.min(b));
        tail_inf = tail_inf.zip(p.tail_inf()).map(|(a, b)| a.max(b));
    }
    KProfile::new(first.grid(), values, tail0, tail_inf, first.equivalence_factor())
}

/// Basis vectors, pairwise sums and differences, a dense half circle in two
/// dimensions, and `density` seeded random directions. `x` and `-x` share
/// indices, so half the sphere suffices.
fn sphere_directions(dim: usize, density: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    if dim == 0 {
        return dirs;
    }
    let unit = |i: usize| {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    };
    for i in 0..dim {
        dirs.push(unit(i));
    }
    if dim == 1 {
        return dirs;
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for sign in [1.0, -1.0] {
                let mut v = unit(i);
                v[j] = sign;
                dirs.push(v);
            }
        }
    }
    if dim == 2 {
        for m in 1..CIRCLE_ANGLES - 1 {
            let a = std::f64::consts::PI * m as f64 / (CIRCLE_ANGLES - 1) as f64;
            dirs.push(vec![a.cos(), a.sin()]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < dim * dim + dim + density {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-4 {
            dirs.push(v);
        }
    }
    dirs
}

/// Worst case of the sampled indices: β-type maximal, α-type minimal. The
/// result bounds the true subspace indices from the inside (β-type from
/// below, α-type from above); a one-dimensional subspace is reported exactly.
pub fn indices_of_subspace(sample: &SubspaceSample) -> IndexSet {
    if sample.dim == 0 || sample.point_indices.is_empty() {
        return IndexSet::vacuous();
    }
    if sample.dim == 1 {
        return sample.point_indices[0].clone();
    }
    let sets = &sample.point_indices;
    let min = |f: fn(&IndexSet) -> f64| sets.iter().map(f).fold(f64::INFINITY, f64::min);
    let max = |f: fn(&IndexSet) -> f64| sets.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let mut undetermined: Vec<String> = sets.iter().flat_map(|s| s.undetermined.clone()).collect();
    undetermined.sort();
    undetermined.dedup();
    IndexSet {
        alpha: min(|s| s.alpha),
        beta: max(|s| s.beta),
        alpha0: min(|s| s.alpha0),
        beta0: max(|s| s.beta0),
        alpha_inf: min(|s| s.alpha_inf),
        beta_inf: max(|s| s.beta_inf),
        gamma: GammaWitness {
            alpha: max(|s| s.gamma.alpha),
            beta: min(|s| s.gamma.beta),
            alpha0: max(|s| s.gamma.alpha0),
            beta0: min(|s| s.gamma.beta0),
            alpha_inf: max(|s| s.gamma.alpha_inf),
            beta_inf: min(|s| s.gamma.beta_inf),
        },
        tolerance: max(|s| s.tolerance),
        certification: Certification {
            source: IndexSource::Sampled,
            alpha_type: BoundKind::UpperBound,
            beta_type: BoundKind::LowerBound,
        },
        undetermined,
    }
}
