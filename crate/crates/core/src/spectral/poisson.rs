//! Numerical check of the generalized Poisson summation formula
//! `Σ_j f(λ_j) e_j(r) e_j(r') = (2π)^{-n} Σ_σ w_σ f̂(r − σr')` for radial `f`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Domain, SpectrumEnumeration};
use crate::error::{invalid, Error, Result};
use crate::geometry::reflection_group;

/// Even test functions with closed-form radial Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `f(t) = e^{−(t/a)²}`, `f̂(x) = (a√π)ⁿ e^{−a²|x|²/4}`.
    Gaussian { a: f64 },
    Zero,
}

impl TestFunction {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { a } => (-(t / a).powi(2)).exp(),
            TestFunction::Zero => 0.0,
        }
    }

    /// `∫_{ℝⁿ} f(|ξ|) e^{iξ·x} dξ`.
    pub fn transform(&self, n: usize, x: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { a } => (a * PI.sqrt()).powi(n as i32) * (-(a * x).powi(2) / 4.0).exp(),
            TestFunction::Zero => 0.0,
        }
    }

    /// Radius beyond which `(2π)^{-n} f̂` is below `eps`.
    fn transform_radius(&self, n: usize, eps: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { a } => {
                let c = (a * PI.sqrt()).powi(n as i32) / (2.0 * PI).powi(n as i32);
                if c <= eps {
                    0.0
                } else {
                    2.0 / a * (c / eps).ln().sqrt()
                }
            }
            TestFunction::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// Number of group elements (or translations) in the right-hand side.
    pub terms: usize,
}

/// Both sides of the Poisson identity at `(r, r')`. The spectral sum is
/// refused if `f` is not below `1e-12` (relative to the mode density) at the
/// enumeration cutoff; the image sum is truncated where `f̂ < 1e-14`.
pub fn poisson_check(e: &SpectrumEnumeration, f: TestFunction, r: &[f64], rp: &[f64]) -> Result<PoissonCheck> {
    let n = e.dim();
    let cell = e.domain.cell();
    let lmax = e.lambda_max;
    let tail = f.value(lmax) * (1.0 + lmax.powi(n as i32)) * 2f64.powi(n as i32) / cell.volume;
    if tail > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "enumeration cutoff {lmax} too small: spectral tail bound {tail:.1e}"
        )));
    }
    if r.len() != n || rp.len() != n {
        return invalid("point dimension mismatch");
    }
    let mut a = vec![0.0; e.modes.len()];
    let mut b = vec![0.0; e.modes.len()];
    e.eval_modes(r, e.modes.len(), &mut a, None);
    e.eval_modes(rp, e.modes.len(), &mut b, None);
    let lhs: f64 = e.modes.iter().enumerate().map(|(j, m)| f.value(m.lambda) * a[j] * b[j]).sum();

    let radius = f.transform_radius(n, 1e-14 * 1e-2);
    let norm = (2.0 * PI).powi(-(n as i32));
    let mut terms = Vec::new();
    match &e.domain {
        Domain::Torus(l) => {
            for v in l.points_within(radius + 2.0 * cell.diameter) {
                let d: f64 = (0..n).map(|k| (r[k] - rp[k] - v[k]).powi(2)).sum::<f64>().sqrt();
                terms.push(f.transform(n, d));
            }
        }
        Domain::Polytope(p) => {
            let g = reflection_group(p, radius)?;
            let dir = e.bc == super::BoundaryCondition::Dirichlet;
            for iso in &g.elements {
                let img = iso.apply(rp);
                let d: f64 = (0..n).map(|k| (r[k] - img[k]).powi(2)).sum::<f64>().sqrt();
                let w = if dir { iso.sign as f64 } else { 1.0 };
                terms.push(w * f.transform(n, d));
            }
        }
    }
    let rhs = norm * crate::quad::pairwise_sum(&terms);
    Ok(PoissonCheck {
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
        terms: terms.len(),
    })
}
