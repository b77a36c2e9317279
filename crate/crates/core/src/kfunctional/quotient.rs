use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kvalue::k_p;
use crate::couples::{PiecewisePower, WeightedCouple};
use crate::error::{invalid, Result};

const MULTI_STARTS: usize = 8;
const MAX_SWEEPS: usize = 200;
const LINE_TOL: f64 = 1e-12;
const SEED: u64 = 0x5eed_0f_4b;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientK {
    pub value: f64,
    /// Minimizing coefficients `c` of `x + Σ cᵢ vᵢ`.
    pub coefficients: Vec<f64>,
    pub converged: bool,
}

/// `inf_{v ∈ span(kernel)} K(t, x + v)`.
pub fn quotient_k(
    couple: &WeightedCouple,
    x: &PiecewisePower,
    kernel: &[PiecewisePower],
    t: f64,
) -> Result<QuotientK> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be positive and finite, got {t}")));
    }
    let objective = |c: &[f64]| k_p(couple, &x.add(&PiecewisePower::combination(c, kernel)), t);
    Ok(minimize_convex(kernel.len(), objective))
}

/// Minimizes a convex function on `R^n` by coordinate and pattern descent
/// with exact line searches, restarted from several seeded points.
pub fn minimize_convex<F: Fn(&[f64]) -> f64>(dim: usize, f: F) -> QuotientK {
    if dim == 0 {
        return QuotientK {
            value: f(&[]),
            coefficients: Vec::new(),
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // a line search in one coordinate is already exact
    let starts = if dim == 1 { 1 } else { MULTI_STARTS };
    let mut best: Option<QuotientK> = None;
    for s in 0..starts {
        let x0: Vec<f64> = if s == 0 {
            vec![0.0; dim]
        } else {
            (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()
        };
        let run = descend(&f, x0, &mut rng);
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    best.unwrap()
}

fn descend<F: Fn(&[f64]) -> f64>(f: &F, mut x: Vec<f64>, rng: &mut ChaCha8Rng) -> QuotientK {
    let dim = x.len();
    let mut value = f(&x);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let before = value;
        let mut dirs: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut d = vec![0.0; dim];
                d[i] = 1.0;
                d
            })
            .collect();
        // diagonal and random directions escape the kinks of nonsmooth objectives
        for i in 0..dim {
            for j in (i + 1)..dim {
                for sign in [1.0, -1.0] {
                    let mut d = vec![0.0; dim];
                    d[i] = 1.0;
                    d[j] = sign;
                    dirs.push(d);
                }
            }
        }
        if dim > 1 {
            for _ in 0..dim {
                dirs.push((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
        }
        for d in &dirs {
            let line = |s: f64| {
                let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + s * b).collect();
                f(&y)
            };
            let (s, v) = line_minimum(line, value);
            if v < value {
                value = v;
                for (a, b) in x.iter_mut().zip(d) {
                    *a += s * b;
                }
            }
        }
        if before - value <= 1e-14 * (1.0 + value.abs()) {
            converged = true;
            break;
        }
    }
    QuotientK {
        value,
        coefficients: x,
        converged,
    }
}

/// Minimum of a convex function of one variable with `g(0) = g0`.
fn line_minimum<G: Fn(f64) -> f64>(g: G, g0: f64) -> (f64, f64) {
    let mut h = 1e-3;
    let (mut dir, mut g1) = (1.0, g(h));
    if g1 >= g0 {
        let gm = g(-h);
        if gm >= g0 {
            // minimum inside [-h, h]
            return golden(&g, -h, h, g0, 0.0);
        }
        dir = -1.0;
        g1 = gm;
    }
    // expand until the function turns up
    let (mut a, mut b, mut gb) = (0.0f64, dir * h, g1);
    loop {
        h *= 2.0;
        let c = dir * h;
        let gc = g(c);
        if !(gc < gb) || h > 1e12 {
            return golden(&g, a.min(c), a.max(c), g0.min(gb), if gb < g0 { b } else { 0.0 });
        }
        a = b;
        b = c;
        gb = gc;
    }
}

fn golden<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, best_v: f64, best_s: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut bs, mut bv) = (best_s, best_v);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    while hi - lo > LINE_TOL * (1.0 + lo.abs().max(hi.abs())) {
        if gc <= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - r * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + r * (hi - lo);
            gd = g(d);
        }
    }
    for (s, v) in [(c, gc), (d, gd)] {
        if v < bv {
            bv = v;
            bs = s;
        }
    }
    (bs, bv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couples::PowerWeight;

    #[test]
    fn convex_quadratic() {
        let r = minimize_convex(3, |c| (c[0] - 1.0).powi(2) + (c[1] + 2.0).powi(2) + c[2].abs() + 0.5);
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-10);
        assert!((r.coefficients[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn nonsmooth_diagonal_valley() {
        // |c0 - c1| + |c0 + c1 - 2|: minimum 0 at (1, 1), coordinate moves alone stall
        let r = minimize_convex(2, |c| (c[0] - c[1]).abs() + (c[0] + c[1] - 2.0).abs());
        assert!(r.value < 1e-9, "{}", r.value);
    }

    #[test]
    fn kernel_element_quotients_to_zero() {
        let c = WeightedCouple::new(2.0, PowerWeight::new(0.5, 0.25, 1.0).unwrap(), PowerWeight::new(-0.5, -0.75, 1.0).unwrap()).unwrap();
        let v = PiecewisePower::power(1.0, 0.0);
        let x = v.scale(3.0);
        let q = quotient_k(&c, &x, &[v], 1.0).unwrap();
        assert!(q.value < 1e-9, "{}", q.value);
        let empty = quotient_k(&c, &x, &[], 1.0).unwrap();
        assert_eq!(empty.value, k_p(&c, &x, 1.0));
    }
}
