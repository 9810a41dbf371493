use serde::{Deserialize, Serialize};

use super::linalg::det;
use super::polytope::{Face, Polytope};

/// Affine isometry `r ↦ Q r + t`; `q` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub dim: usize,
    pub q: Vec<f64>,
    pub t: Vec<f64>,
    /// `det Q`, ±1.
    pub sign: i8,
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        let mut q = vec![0.0; dim * dim];
        for i in 0..dim {
            q[i * dim + i] = 1.0;
        }
        Self {
            dim,
            q,
            t: vec![0.0; dim],
            sign: 1,
        }
    }

    pub fn translation(v: &[f64]) -> Self {
        let mut s = Self::identity(v.len());
        s.t = v.to_vec();
        s
    }

    /// Reflection across the hyperplane `n·r = α` (`n` unit).
    pub fn reflection(normal: &[f64], offset: f64) -> Self {
        let n = normal.len();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = if i == j { 1.0 } else { 0.0 } - 2.0 * normal[i] * normal[j];
            }
        }
        Self {
            dim: n,
            q,
            t: normal.iter().map(|x| 2.0 * offset * x).collect(),
            sign: -1,
        }
    }

    pub fn face_reflection(face: &Face) -> Self {
        Self::reflection(&face.normal, face.offset)
    }

    #[inline]
    pub fn apply_into(&self, r: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let mut s = self.t[i];
            let row = &self.q[i * n..(i + 1) * n];
            for j in 0..n {
                s += row[j] * r[j];
            }
            out[i] = s;
        }
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(r, &mut out);
        out
    }

    /// Linear part applied to a direction.
    pub fn apply_linear(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| self.q[i * n + j] * v[j]).sum()).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let n = self.dim;
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = (0..n).map(|k| self.q[i * n + k] * other.q[k * n + j]).sum();
            }
        }
        let t = self.apply(&other.t);
        Isometry {
            dim: n,
            q,
            t,
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let n = self.dim;
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = self.q[j * n + i];
            }
        }
        let mut t = vec![0.0; n];
        for i in 0..n {
            t[i] = -(0..n).map(|k| q[i * n + k] * self.t[k]).sum::<f64>();
        }
        Isometry { dim: n, q, t, sign: self.sign }
    }

    /// Max-norm distance between `(Q, t)` pairs.
    pub fn distance(&self, other: &Isometry) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .chain(self.t.iter().zip(&other.t))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Isometry::identity(self.dim)) <= tol
    }

    /// `‖QᵀQ − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.q[k * n + i] * self.q[k * n + j]).sum();
                worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// Determinant of `Q` computed from the matrix (should equal `sign`).
    pub fn linear_det(&self) -> f64 {
        let n = self.dim;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| self.q[i * n..(i + 1) * n].to_vec()).collect();
        det(&rows)
    }

    /// Face data of the image `self(Ω)`.
    pub fn image_faces(&self, omega: &Polytope) -> Vec<Face> {
        omega
            .faces
            .iter()
            .map(|f| {
                let normal = self.apply_linear(&f.normal);
                let offset = f.offset + normal.iter().zip(&self.t).map(|(a, b)| a * b).sum::<f64>();
                Face {
                    normal,
                    offset,
                    measure: f.measure,
                }
            })
            .collect()
    }

    pub fn image_vertices(&self, omega: &Polytope) -> Vec<Vec<f64>> {
        omega.vertices.iter().map(|v| self.apply(v)).collect()
    }
}
