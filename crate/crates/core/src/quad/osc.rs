//! Semi-infinite integrals of oscillating, algebraically decaying integrands.

use super::accel::wynn_epsilon;
use super::rules::{tanh_sinh, GaussLegendre};
use super::{QuadratureResult, QuadratureSpec};

/// Gauss order used on every regular cell.
const CELL_ORDER: usize = 24;
/// The partial integrals are sampled at `a + 2^j·period` up to this `j`.
const MAX_DOUBLINGS: u32 = 22;
/// Doublings done before extrapolation is attempted.
const MIN_DOUBLINGS: u32 = 4;

/// `∫_0^∞ g(t) dt` for integrands whose oscillation has period `period_hint`.
///
/// The half-line is cut into cells of one period. The first cell goes through
/// tanh-sinh (it may contain an integrable singularity at 0), the others
/// through Gauss–Legendre. The partial integrals up to `2^j` periods form a
/// linearly convergent sequence for tails of the form `Σ c_i t^{-α_i}`
/// (oscillating or not), which Wynn's epsilon algorithm extrapolates.
pub fn integrate_osc_semiinfinite<G: Fn(f64) -> f64>(
    g: G,
    period_hint: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    integrate_osc_from(g, 0.0, period_hint, spec)
}

/// Same as [`integrate_osc_semiinfinite`] on `[a, ∞)`.
pub fn integrate_osc_from<G: Fn(f64) -> f64>(
    g: G,
    a: f64,
    period_hint: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    assert!(period_hint > 0.0, "period_hint must be positive");
    let tol = spec.tolerance;
    let head = tanh_sinh(a, a + period_hint, 0.01 * tol, 14, |x, _, _| g(x));
    let mut evaluations = head.evaluations;
    if !head.converged || !head.value.is_finite() {
        return QuadratureResult {
            value: head.value,
            error_estimate: head.error.max(head.value.abs()),
            evaluations,
            converged: false,
        };
    }
    let gl = GaussLegendre::new(CELL_ORDER);
    let mut partial = head.value;
    let mut magnitude = head.value.abs();
    let mut samples = vec![partial];
    let mut cells = 1usize;
    let mut best = head.value;
    let mut best_err = f64::INFINITY;
    let mut previous: Option<f64> = None;
    let mut stable = 0;

    for j in 1..=MAX_DOUBLINGS {
        let target = 1usize << j;
        if evaluations + (target - cells) * CELL_ORDER > spec.max_evaluations.max(64 * CELL_ORDER) {
            break;
        }
        while cells < target {
            let lo = a + cells as f64 * period_hint;
            let v = gl.integrate(lo, lo + period_hint, &g);
            partial += v;
            magnitude += v.abs();
            cells += 1;
        }
        evaluations = head.evaluations + (cells - 1) * CELL_ORDER;
        if !partial.is_finite() {
            break;
        }
        samples.push(partial);
        if j < MIN_DOUBLINGS {
            continue;
        }
        let table = wynn_epsilon(&samples);
        let est = table.last().copied().unwrap_or(partial);
        let roundoff = 1e-15 * magnitude + head.error;
        if let Some(prev) = previous {
            let err = (est - prev).abs() + roundoff;
            if err < best_err {
                best = est;
                best_err = err;
            }
            if err <= tol * est.abs() || err <= 2.0 * roundoff {
                stable += 1;
                if stable >= 2 {
                    return QuadratureResult {
                        value: est,
                        error_estimate: err,
                        evaluations,
                        converged: true,
                    };
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(est);
    }
    QuadratureResult {
        value: best,
        error_estimate: best_err,
        evaluations,
        converged: best_err <= tol * best.abs(),
    }
}
