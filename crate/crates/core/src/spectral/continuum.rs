//! The continuum model `S_λ^ctm`: a signed sum of ball kernels over the
//! neighboring reflections (or translations) of the domain.

use std::f64::consts::PI;

use super::{BoundaryCondition, Domain};
use crate::error::Result;
use crate::geometry::{reflection_group, Isometry};
use crate::specfun::{h_index, hdot_unchecked, omega};

#[derive(Debug, Clone)]
pub struct ContinuumTerm {
    pub isometry: Isometry,
    /// `det σ` for Dirichlet, `+1` otherwise.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuumKernel {
    pub dim: usize,
    pub bc: BoundaryCondition,
    /// Identity first.
    pub terms: Vec<ContinuumTerm>,
    /// `ω_n / (2π)ⁿ`.
    pub prefactor: f64,
}

impl ContinuumKernel {
    pub fn new(domain: &Domain, bc: BoundaryCondition) -> Result<Self> {
        domain.check_bc(bc)?;
        let n = domain.dim();
        let terms = match domain {
            Domain::Torus(l) => l
                .neighbors
                .iter()
                .map(|v| ContinuumTerm {
                    isometry: Isometry::translation(v),
                    weight: 1.0,
                })
                .collect::<Vec<_>>(),
            Domain::Polytope(p) => {
                let g = reflection_group(p, 0.0)?;
                g.neighbor_elements()
                    .into_iter()
                    .map(|iso| ContinuumTerm {
                        weight: if bc == BoundaryCondition::Dirichlet { iso.sign as f64 } else { 1.0 },
                        isometry: iso,
                    })
                    .collect()
            }
        };
        let mut terms = terms;
        // identity first, the rest in a fixed order
        let id = terms.iter().position(|t| t.isometry.is_identity(1e-12)).unwrap_or(0);
        terms.swap(0, id);
        Ok(Self {
            dim: n,
            bc,
            terms,
            prefactor: omega(n) / (2.0 * PI).powi(n as i32),
        })
    }

    /// Unweighted `h_n(λ|r − σ_i r'|)`.
    pub fn term(&self, i: usize, lambda: f64, r: &[f64], rp: &[f64]) -> f64 {
        let mut img = [0.0; 8];
        let img = &mut img[..self.dim];
        self.terms[i].isometry.apply_into(rp, img);
        let d = r.iter().zip(img.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        h_index(self.dim, lambda * d)
    }

    /// `S_λ^ctm(r, r')`.
    pub fn s(&self, lambda: f64, r: &[f64], rp: &[f64]) -> f64 {
        let sum: f64 = (0..self.terms.len())
            .map(|i| self.terms[i].weight * self.term(i, lambda, r, rp))
            .sum();
        self.prefactor * lambda.powi(self.dim as i32) * sum
    }

    /// Scaled diagonal `λ^{-n} S_λ^ctm(r/λ, r/λ)` in the dilated domain and
    /// its gradient, written directly in the scaled variable: the term of `σ`
    /// is `h_n(|r − σ_λ r|)` with `σ_λ` the conjugate of `σ` by the dilation.
    pub fn diag_scaled(&self, lambda: f64, r: &[f64]) -> (f64, Vec<f64>) {
        let n = self.dim;
        let mut val = 0.0;
        let mut grad = vec![0.0; n];
        let x: Vec<f64> = r.iter().map(|v| v / lambda).collect();
        let mut img = [0.0; 8];
        for t in &self.terms {
            let img = &mut img[..n];
            t.isometry.apply_into(&x, img);
            // u = r − σ_λ r = λ (x − σx)
            let u: Vec<f64> = x.iter().zip(img.iter()).map(|(a, b)| lambda * (a - b)).collect();
            let d = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            val += t.weight * h_index(n, d);
            if d > 0.0 {
                // ∇_r |u| = (I − Q)ᵀ u / |u|
                let hd = t.weight * hdot_unchecked(n, d) / d;
                let q = &t.isometry.q;
                for a in 0..n {
                    let mut s = u[a];
                    for b in 0..n {
                        s -= q[b * n + a] * u[b];
                    }
                    grad[a] += hd * s;
                }
            }
        }
        (self.prefactor * val, grad.iter().map(|g| self.prefactor * g).collect())
    }
}

/// One-shot `S_λ^ctm(r, r')`.
pub fn s_ctm(domain: &Domain, bc: BoundaryCondition, lambda: f64, r: &[f64], rp: &[f64]) -> Result<f64> {
    Ok(ContinuumKernel::new(domain, bc)?.s(lambda, r, rp))
}
