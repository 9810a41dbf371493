//! Projections along the intersection `I_σ = Ω̄ ∩ σ(Ω̄)` of a neighboring
//! reflection, and the reflected-distance inequality built on them.

use serde::{Deserialize, Serialize};

use super::isometry::Isometry;
use super::linalg::{dist, dot, norm};
use super::polytope::Polytope;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaProjection {
    /// Faces whose intersection is `I_σ`; empty for the identity.
    pub faces: Vec<usize>,
    /// A point of `I_σ`.
    pub origin: Vec<f64>,
    /// Orthonormal basis of the span of the face normals (rows).
    pub normal_basis: Vec<Vec<f64>>,
}

impl SigmaProjection {
    pub fn identity(dim: usize) -> Self {
        Self {
            faces: vec![],
            origin: vec![0.0; dim],
            normal_basis: vec![],
        }
    }

    /// Rank of `π_σ^⊥`.
    pub fn codim(&self) -> usize {
        self.normal_basis.len()
    }

    /// `π_σ^⊥ r`: displacement of `r` from the affine span of `I_σ`.
    pub fn perp(&self, r: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = r.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        let mut out = vec![0.0; r.len()];
        for u in &self.normal_basis {
            let c = dot(u, &d);
            for k in 0..out.len() {
                out[k] += c * u[k];
            }
        }
        out
    }

    /// `π_σ r`: the metric projection onto the affine span of `I_σ`.
    pub fn proj(&self, r: &[f64]) -> Vec<f64> {
        let p = self.perp(r);
        r.iter().zip(&p).map(|(a, b)| a - b).collect()
    }
}

/// Faces cutting out `Ω̄ ∩ σ(Ω̄)` and the projector pair along them.
pub fn sigma_projection(omega: &Polytope, sigma: &Isometry) -> Result<SigmaProjection> {
    let scale = omega.diameter;
    let tol = 1e-9 * scale.max(1.0);
    if sigma.is_identity(1e-9) {
        return Ok(SigmaProjection::identity(omega.dim));
    }
    let inv = sigma.inverse();
    let shared: Vec<usize> = (0..omega.vertices.len())
        .filter(|&i| omega.contains(&inv.apply(&omega.vertices[i]), tol))
        .collect();
    if shared.is_empty() {
        return Err(Error::InvalidArgument("isometry is not a neighbor of the polytope".into()));
    }
    let faces: Vec<usize> = (0..omega.faces.len())
        .filter(|&j| shared.iter().all(|i| omega.face_vertices[j].contains(i)))
        .collect();
    if faces.is_empty() {
        return invalid("intersection is not contained in a face; the polytope does not tessellate here");
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &j in &faces {
        let mut v = omega.faces[j].normal.clone();
        for u in &basis {
            let c = dot(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let l = norm(&v);
        if l > 1e-9 {
            basis.push(v.iter().map(|x| x / l).collect());
        }
    }
    Ok(SigmaProjection {
        faces,
        origin: omega.vertices[shared[0]].clone(),
        normal_basis: basis,
    })
}

/// Outcome of the two inequalities `|r−σr'| ≥ c(|π_σr−π_σr'| + |π_σ^⊥r+π_σ^⊥r'|)`
/// and `|r−σr'| ≥ c|r−r'|`, with the ratios that decide them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectedDistance {
    pub projected_ok: bool,
    pub plain_ok: bool,
    /// `|r−σr'| / (|π_σr−π_σr'| + |π_σ^⊥r+π_σ^⊥r'|)`.
    pub projected_ratio: f64,
    /// `|r−σr'| / |r−r'|`.
    pub plain_ratio: f64,
}

pub fn reflected_distance_check(
    omega: &Polytope,
    sigma: &Isometry,
    proj: &SigmaProjection,
    r: &[f64],
    rp: &[f64],
    c: f64,
) -> Result<ReflectedDistance> {
    let tol = 1e-12 * omega.diameter.max(1.0);
    if !omega.contains(r, tol) || !omega.contains(rp, tol) {
        return invalid("points must lie in the polytope");
    }
    let lhs = dist(r, &sigma.apply(rp));
    let along = dist(&proj.proj(r), &proj.proj(rp));
    let pr = proj.perp(r);
    let prp = proj.perp(rp);
    let across = norm(&pr.iter().zip(&prp).map(|(a, b)| a + b).collect::<Vec<_>>());
    let plain = dist(r, rp);
    let ratio = |den: f64| if den > 0.0 { lhs / den } else { f64::INFINITY };
    let slack = 1e-12 * omega.diameter;
    Ok(ReflectedDistance {
        projected_ok: lhs + slack >= c * (along + across),
        plain_ok: lhs + slack >= c * plain,
        projected_ratio: ratio(along + across),
        plain_ratio: ratio(plain),
    })
}
