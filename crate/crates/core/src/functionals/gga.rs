//! The exact constraint on GGA enhancement factors obtained from the surface
//! term of the Dirac functional in 3D:
//!
//! ```text
//! 1/(2k) ∫_0^∞ [1 − (1−h₃)^{4/3} F_x(2k|ḣ₃| / (1−h₃)^{4/3})] dτ = (1 + log 2)/(8 c_x),
//! k = (3π²)^{1/3}.
//! ```

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::EnhancementFactor;
use crate::coefficients::dirac_constant;
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_osc_semiinfinite, QuadratureResult, QuadratureSpec};
use crate::specfun::{hdot_unchecked, one_minus_h};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgaAudit {
    pub lhs: QuadratureResult,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub defect: f64,
}

fn k_f() -> f64 {
    (3.0 * PI * PI).cbrt()
}

/// `(1 + log 2)/(8 c_x)`.
pub fn gga_rhs() -> f64 {
    (1.0 + LN_2) / (8.0 * dirac_constant())
}

/// `(1−h₃(τ))^{4/3} F_x(2k|ḣ₃(τ)|/(1−h₃(τ))^{4/3})`.
fn inner(fx: &EnhancementFactor, tau: f64) -> f64 {
    let d = one_minus_h(3, tau);
    let d43 = d.powf(4.0 / 3.0);
    let s = 2.0 * k_f() * hdot_unchecked(3, tau).abs() / d43;
    d43 * fx.eval(s)
}

/// Sampled check that the inner term stays bounded as `τ → 0`, where the
/// argument of `F_x` grows like `τ^{-5/3}`. Returns the limit used at `τ = 0`.
fn inner_limit(fx: &EnhancementFactor) -> Result<f64> {
    let taus = [1e-2, 1e-3, 1e-4, 1e-5];
    let g: Vec<f64> = taus.iter().map(|&t| inner(fx, t)).collect();
    if let Some(v) = g.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonConvergence(format!("F_x term is {v} near τ = 0")));
    }
    let growing = g.windows(2).all(|w| w[1].abs() > w[0].abs() * (1.0 + 1e-3));
    if growing && g[3].abs() > 1.5 * g[0].abs().max(1e-300) {
        return Err(Error::NonConvergence(format!(
            "(1−h₃)^{{4/3}} F_x(·) diverges as τ → 0 (samples {g:?} at τ = {taus:?})"
        )));
    }
    Ok(g[3])
}

/// Evaluates both sides of the constraint for `fx`.
pub fn gga_constraint(fx: &EnhancementFactor, spec: &QuadratureSpec) -> Result<GgaAudit> {
    spec.validate()?;
    let at_zero = inner_limit(fx)?;
    let lhs = integrate_osc_semiinfinite(
        |tau| {
            if tau == 0.0 {
                1.0 - at_zero
            } else {
                1.0 - inner(fx, tau)
            }
        },
        2.0 * PI,
        spec,
    );
    if !lhs.converged || !lhs.value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "GGA constraint integral: value {} with error {}",
            lhs.value, lhs.error_estimate
        )));
    }
    let lhs = lhs.scale(1.0 / (2.0 * k_f()));
    let rhs = gga_rhs();
    Ok(GgaAudit {
        defect: lhs.value - rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgaRoot {
    pub parameter: f64,
    pub audit: GgaAudit,
    pub iterations: usize,
}

/// Bisection for `defect(family(a)) = 0` on `[lo, hi]`, stopping once
/// `|defect| ≤ tol` or the bracket is below machine resolution.
pub fn gga_bisect<F>(family: F, lo: f64, hi: f64, tol: f64, spec: &QuadratureSpec) -> Result<GgaRoot>
where
    F: Fn(f64) -> Result<EnhancementFactor>,
{
    if !(lo < hi) {
        return invalid(format!("empty bracket [{lo}, {hi}]"));
    }
    let defect = |a: f64| -> Result<GgaAudit> { gga_constraint(&family(a)?, spec) };
    let (mut a, mut b) = (lo, hi);
    let mut fa = defect(a)?;
    let fb = defect(b)?;
    if fa.defect.signum() == fb.defect.signum() {
        return invalid(format!(
            "defect has the same sign at both ends ({:e} at {lo}, {:e} at {hi})",
            fa.defect, fb.defect
        ));
    }
    let mut best = if fa.defect.abs() < fb.defect.abs() { (a, fa.clone()) } else { (b, fb) };
    for it in 1..=200 {
        let m = 0.5 * (a + b);
        let fm = defect(m)?;
        if fm.defect.abs() < best.1.defect.abs() {
            best = (m, fm.clone());
        }
        if fm.defect.abs() <= tol || (b - a) <= 4.0 * f64::EPSILON * m.abs().max(1.0) {
            return Ok(GgaRoot {
                parameter: best.0,
                audit: best.1,
                iterations: it,
            });
        }
        if fm.defect.signum() == fa.defect.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NonConvergence("GGA bisection did not reach the tolerance".into()))
}
