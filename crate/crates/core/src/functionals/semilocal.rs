//! Semi-local functionals `F(λ) = ∫_{Ω_λ} f(2S_{s,λ}(r), 2∇S_{s,λ}(r)) dr` of
//! the exact and of the continuum spectral function.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EnhancementFactor;
use crate::coefficients::dirac_constant;
use crate::error::{invalid, Error, Result};
use crate::geometry::Polytope;
use crate::quad::{pairwise_sum, QuadratureResult, QuadratureSpec};
use crate::spectral::{BoundaryCondition, ContinuumKernel, Domain, SpectrumEnumeration};

/// Density arguments below this are replaced by it before `f` is called.
pub const DENSITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Growth {
    Bounded,
    Power { p: f64 },
}

type Eval = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;

/// `f(a, b)` with `a ≥ 0` a density and `b ∈ ℝⁿ` its gradient.
#[derive(Clone)]
pub struct SemiLocalIntegrand {
    pub name: String,
    pub growth: Growth,
    /// `f(a, b)` depends on `b` only through `|b|`.
    pub isotropic: bool,
    f: Arc<Eval>,
}

impl fmt::Debug for SemiLocalIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiLocalIntegrand")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("isotropic", &self.isotropic)
            .finish()
    }
}

impl SemiLocalIntegrand {
    pub fn new<F>(name: impl Into<String>, growth: Growth, isotropic: bool, f: F) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            growth,
            isotropic,
            f: Arc::new(f),
        }
    }

    /// `f(max(a, DENSITY_FLOOR), b)`.
    pub fn eval(&self, a: f64, b: &[f64]) -> f64 {
        (self.f)(a.max(DENSITY_FLOOR), b)
    }

    /// `f(a, b) = a`.
    pub fn density() -> Self {
        Self::new("density", Growth::Power { p: 1.0 }, true, |a, _| a)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant {c}"), Growth::Bounded, true, move |_, _| c)
    }

    /// Dirac exchange `f(a, b) = −c_x a^{4/3}`.
    pub fn lda_exchange() -> Self {
        let cx = dirac_constant();
        Self::new("lda-exchange", Growth::Power { p: 4.0 / 3.0 }, true, move |a, _| -cx * a.powf(4.0 / 3.0))
    }

    /// `f(a, b) = −c_x a^{4/3} F_x(|b| / a^{4/3})`, with the reduced gradient
    /// `|∇ρ|/ρ^{4/3}` as the argument of `F_x`.
    pub fn gga_exchange(fx: EnhancementFactor) -> Self {
        let cx = dirac_constant();
        let name = format!("gga-exchange {}", fx.source);
        Self::new(name, Growth::Power { p: 4.0 / 3.0 }, true, move |a, b| {
            let a43 = a.powf(4.0 / 3.0);
            let g = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            -cx * a43 * fx.eval(g / a43)
        })
    }

    /// Samples `f` on `[0, a_max] × {|b| ≤ b_max}` (along each axis direction)
    /// and fails on the first non-finite value.
    pub fn check_local_bounds(&self, dim: usize, a_max: f64, b_max: f64) -> Result<f64> {
        let mut sup = 0.0f64;
        let mut b = vec![0.0; dim];
        for i in 0..=16 {
            let a = a_max * i as f64 / 16.0;
            for j in 0..=8 {
                for axis in 0..dim {
                    b.iter_mut().for_each(|x| *x = 0.0);
                    b[axis] = b_max * j as f64 / 8.0;
                    let v = self.eval(a, &b);
                    if !v.is_finite() {
                        return Err(Error::Validation(format!("{}: f({a}, {b:?}) = {v}", self.name)));
                    }
                    sup = sup.max(v.abs());
                }
            }
        }
        Ok(sup)
    }
}

/// Tensor rule on `Ω` fine enough for `S_λ` (whose squared modes oscillate
/// with frequency up to `2λ`).
fn rule(cell: &Polytope, lambda: f64, order: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let panels = (lambda * cell.diameter / 3.0).ceil() as usize + 4;
    cell.quadrature(order, panels)
}

const ORDER: usize = 8;
const CHUNK: usize = 512;

/// `λⁿ Σ_i w_i f(2ν(x_i), 2∇ν(x_i))` where `point(x)` returns `(ν, ∇ν)` of the
/// scaled density at `λx`. The error estimate compares against a rule of
/// lower order on the same panels.
fn integrate<P>(cell: &Polytope, lambda: f64, f: &SemiLocalIntegrand, point: P) -> Result<QuadratureResult>
where
    P: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    let n = cell.dim;
    let run = |order: usize| -> Result<(f64, usize)> {
        let (pts, wts) = rule(cell, lambda, order);
        let parts: Vec<f64> = pts
            .par_chunks(CHUNK)
            .zip(wts.par_chunks(CHUNK))
            .map(|(ps, ws)| {
                let vals: Vec<f64> = ps
                    .iter()
                    .zip(ws)
                    .map(|(x, w)| {
                        let (v, g) = point(x);
                        let b: Vec<f64> = g.iter().map(|c| 2.0 * c).collect();
                        w * f.eval(2.0 * v, &b)
                    })
                    .collect();
                pairwise_sum(&vals)
            })
            .collect();
        let total = pairwise_sum(&parts) * lambda.powi(n as i32);
        if !total.is_finite() {
            return Err(Error::NonConvergence(format!("{}: non-finite integrand", f.name)));
        }
        Ok((total, pts.len()))
    };
    let (fine, n1) = run(ORDER)?;
    let (coarse, n2) = run(ORDER - 2)?;
    let err = (fine - coarse).abs();
    Ok(QuadratureResult {
        value: fine,
        error_estimate: err,
        evaluations: n1 + n2,
        converged: err <= 1e-6 * fine.abs().max(1.0),
    })
}

/// `F(λ)` for the exact spectral function.
pub fn semilocal_value(
    e: &SpectrumEnumeration,
    lambda: f64,
    f: &SemiLocalIntegrand,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(lambda > 0.0) {
        return invalid("λ must be positive");
    }
    if lambda > e.lambda_max * (1.0 + crate::spectral::TIE_TOL) {
        return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", e.lambda_max));
    }
    let count = e.count(lambda);
    let n = e.dim() as i32;
    let sc = lambda.powi(-n);
    let cell = e.domain.cell();
    integrate(cell, lambda, f, |x| {
        let (v, g) = e.diag_count(count, x);
        (v * sc, g.iter().map(|c| c * sc / lambda).collect())
    })
}

/// `F^ctm(λ)` for the continuum spectral function.
pub fn semilocal_value_ctm(
    domain: &Domain,
    bc: BoundaryCondition,
    lambda: f64,
    f: &SemiLocalIntegrand,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if !(lambda > 0.0) {
        return invalid("λ must be positive");
    }
    let kernel = ContinuumKernel::new(domain, bc)?;
    let cell = domain.cell();
    integrate(cell, lambda, f, |x| {
        let r: Vec<f64> = x.iter().map(|c| c * lambda).collect();
        kernel.diag_scaled(lambda, &r)
    })
}
