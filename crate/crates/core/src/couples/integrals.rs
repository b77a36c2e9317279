//! Integrals of the form `∫ φ(s) ds/s` over `(lo, hi]`, either in closed form
//! for single power integrands or by quadrature in `u = ln s`.

use crate::quad;

/// `∫_lo^hi coef · s^k ds/s` for `coef >= 0`; `+∞` when the integral diverges.
pub(crate) fn power_integral(coef: f64, k: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(coef >= 0.0 && lo < hi);
    if coef == 0.0 {
        return 0.0;
    }
    let lo_zero = lo == 0.0;
    let hi_inf = hi.is_infinite();
    match (lo_zero, hi_inf) {
        (true, true) => f64::INFINITY,
        (true, false) => {
            if k > 0.0 {
                coef * (k * hi.ln()).exp() / k
            } else {
                f64::INFINITY
            }
        }
        (false, true) => {
            if k < 0.0 {
                coef * (k * lo.ln()).exp() / -k
            } else {
                f64::INFINITY
            }
        }
        (false, false) => {
            let span = (hi / lo).ln();
            if k == 0.0 {
                coef * span
            } else {
                // lo^k (e^{k span} - 1)/k without cancellation for small k.
                coef * (k * lo.ln()).exp() * (k * span).exp_m1() / k
            }
        }
    }
}

/// `ln(e^a + e^b)`.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

const REL_TOL: f64 = 1e-14;
// Truncate an unbounded end once the integrand is this far below its peak.
const LOG_CUTOFF: f64 = -46.0; // ≈ ln(1e-20)

/// `ln ∫_lo^hi φ(s) ds/s` where `log_phi(u) = ln φ(e^u)`.
///
/// `slope_lo` / `slope_hi` are the asymptotic log-slopes `d ln φ / du` as
/// `u → -∞` / `u → +∞`; they are consulted only for unbounded ends, and beyond
/// the truncation point the integrand is treated as an exact power.
/// `features` are points (in `u`) where the integrand bends; the range is split there.
pub(crate) fn log_integral<F: Fn(f64) -> f64>(
    log_phi: F,
    lo: f64,
    hi: f64,
    slope_lo: f64,
    slope_hi: f64,
    features: &[f64],
) -> f64 {
    if lo == 0.0 && slope_lo <= 0.0 {
        return f64::INFINITY;
    }
    if hi.is_infinite() && slope_hi >= 0.0 {
        return f64::INFINITY;
    }
    let mut ua = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
    let mut ub = if hi.is_finite() { hi.ln() } else { f64::INFINITY };

    let mut marks: Vec<f64> = features
        .iter()
        .copied()
        .filter(|u| u.is_finite() && *u > ua && *u < ub)
        .collect();
    if ua.is_finite() {
        marks.push(ua);
    }
    if ub.is_finite() {
        marks.push(ub);
    }
    if marks.is_empty() {
        marks.push(0.0);
    }
    marks.sort_by(f64::total_cmp);
    let anchor_lo = marks[0];
    let anchor_hi = *marks.last().unwrap();
    let mut peak = marks
        .iter()
        .map(|&u| log_phi(u))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut tail = 0.0f64; // relative to exp(peak) later
    let mut tail_terms: Vec<f64> = Vec::new();

    if ua.is_infinite() {
        let (u, val) = walk_out(&log_phi, anchor_lo, -1.0, slope_lo, &mut peak);
        ua = u;
        tail_terms.push(val - slope_lo.abs().ln());
    }
    if ub.is_infinite() {
        let (u, val) = walk_out(&log_phi, anchor_hi, 1.0, slope_hi, &mut peak);
        ub = u;
        tail_terms.push(val - slope_hi.abs().ln());
    }
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    for t in tail_terms {
        tail += (t - peak).exp();
    }

    let mut cuts: Vec<f64> = marks
        .into_iter()
        .filter(|u| *u > ua && *u < ub)
        .collect();
    cuts.insert(0, ua);
    cuts.push(ub);
    cuts.dedup();

    let scaled = |u: f64| {
        let v = log_phi(u) - peak;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let mut body = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            body += quad::integrate(&scaled, w[0], w[1], REL_TOL, 1e-300).value;
        }
    }
    peak + (body + tail).ln()
}

/// Walks from `start` in direction `dir` until the integrand has fallen far
/// below the running peak and its local slope matches the asymptotic one.
fn walk_out<F: Fn(f64) -> f64>(
    log_phi: &F,
    start: f64,
    dir: f64,
    slope: f64,
    peak: &mut f64,
) -> (f64, f64) {
    let rate = slope.abs().max(1e-6);
    let mut step = (1.0 / rate).min(4.0);
    let mut u = start;
    let mut val = log_phi(u);
    *peak = peak.max(val);
    for _ in 0..400 {
        let next = u + dir * step;
        let next_val = log_phi(next);
        *peak = peak.max(next_val);
        let local = (next_val - val) / (next - u);
        u = next;
        val = next_val;
        if !val.is_finite() {
            break;
        }
        let settled = (local - slope).abs() <= 1e-3 * slope.abs().max(1e-3);
        if val - *peak < LOG_CUTOFF && settled {
            break;
        }
        step *= 1.5;
    }
    (u, val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_cases() {
        assert!((power_integral(1.0, 0.0, 1.0, 2.0) - 2f64.ln()).abs() < 1e-15);
        assert!((power_integral(0.25, 0.5, 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((power_integral(1.0, -1.0, 1.0, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert!(power_integral(1.0, 0.0, 0.0, 1.0).is_infinite());
        assert!(power_integral(1.0, 0.1, 1.0, f64::INFINITY).is_infinite());
        let tiny = power_integral(1.0, 1e-12, 1.0, 2.0);
        assert!((tiny - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn numeric_matches_closed_form_on_power() {
        // ∫_0^∞ min(s^0.5, s^-0.25) ds/s = 1/0.5 + 1/0.25 = 6
        let lp = |u: f64| (0.5 * u).min(-0.25 * u);
        let v = log_integral(lp, 0.0, f64::INFINITY, 0.5, -0.25, &[0.0]).exp();
        assert!((v - 6.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn divergent_ends() {
        let lp = |u: f64| 0.1 * u;
        assert!(log_integral(lp, 1.0, f64::INFINITY, 0.1, 0.1, &[]).is_infinite());
        assert!(log_integral(lp, 0.0, 1.0, -0.1, -0.1, &[]).is_infinite());
    }
}
