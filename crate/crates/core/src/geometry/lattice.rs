//! Lattices `Γ = { Σ k_i v_i }`, their duals and parallelepiped fundamental cells.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::polytope::Polytope;
use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct Lattice {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
    /// `v_i · v_j* = 2π δ_ij`.
    pub dual: Vec<Vec<f64>>,
    /// The cell `{ Σ t_i v_i : t ∈ [0,1]ⁿ }`.
    pub cell: Polytope,
    /// Condition number of the Gram matrix.
    pub gram_condition: f64,
    /// Translations whose shifted cell touches the cell, zero included.
    pub neighbors: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Lattice> {
        let n = basis.len();
        if n < 2 || basis.iter().any(|v| v.len() != n) {
            return invalid("lattice basis must be n vectors of length n, n ≥ 2");
        }
        let b = DMatrix::from_fn(n, n, |i, j| basis[i][j]);
        let gram = &b * b.transpose();
        let sv = gram.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if smin <= 1e-14 * smax {
            return invalid("lattice basis is singular");
        }
        let inv = b.clone().try_inverse().unwrap();
        // rows of 2π B^{-T}
        let dual = (0..n).map(|i| (0..n).map(|j| 2.0 * PI * inv[(j, i)]).collect()).collect();
        let cell = Polytope::parallelepiped(&basis)?;
        let neighbors = coefficient_box(n, 1)
            .into_iter()
            .map(|k| combine(&basis, &k))
            .collect();
        Ok(Lattice {
            dim: n,
            basis,
            dual,
            cell,
            gram_condition: smax / smin,
            neighbors,
        })
    }

    /// The lattice `side·ℤⁿ`.
    pub fn cubic(n: usize, side: f64) -> Result<Lattice> {
        if side <= 0.0 {
            return invalid("lattice side must be positive");
        }
        Lattice::new((0..n).map(|i| (0..n).map(|j| if i == j { side } else { 0.0 }).collect()).collect())
    }

    /// The lattice scaled by `l`, with its cell `Ω_l`.
    pub fn scaled(&self, l: f64) -> Result<Lattice> {
        Lattice::new(self.basis.iter().map(|v| v.iter().map(|x| x * l).collect()).collect())
    }

    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        combine(&self.basis, k)
    }

    pub fn dual_point(&self, k: &[i64]) -> Vec<f64> {
        combine(&self.dual, k)
    }

    /// Bound on `|k_i|` for lattice points of norm at most `radius`
    /// in the basis `vs`, from `|k_i| ≤ |x|·|row_i(B^{-1})|`.
    pub fn index_bound(vs: &[Vec<f64>], radius: f64) -> Vec<i64> {
        let n = vs.len();
        let b = DMatrix::from_fn(n, n, |i, j| vs[i][j]);
        let inv = b.try_inverse().unwrap();
        (0..n)
            .map(|i| {
                let col: f64 = (0..n).map(|j| inv[(j, i)].powi(2)).sum::<f64>().sqrt();
                (radius * col).floor() as i64
            })
            .collect()
    }

    /// All lattice translations of norm at most `radius`.
    pub fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        points_within(&self.basis, radius)
    }

    /// All dual lattice vectors of norm at most `radius`.
    pub fn dual_points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        points_within(&self.dual, radius)
    }
}

fn combine(vs: &[Vec<f64>], k: &[i64]) -> Vec<f64> {
    let n = vs[0].len();
    let mut out = vec![0.0; n];
    for (v, &c) in vs.iter().zip(k) {
        for j in 0..n {
            out[j] += c as f64 * v[j];
        }
    }
    out
}

fn coefficient_box(n: usize, m: i64) -> Vec<Vec<i64>> {
    let bounds = vec![m; n];
    box_indices(&bounds)
}

/// All integer vectors `k` with `|k_i| ≤ bounds[i]`.
pub fn box_indices(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (2 * b as usize + 1));
        for k in &out {
            for c in -b..=b {
                let mut k2 = k.clone();
                k2.push(c);
                next.push(k2);
            }
        }
        out = next;
    }
    out
}

fn points_within(vs: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    box_indices(&Lattice::index_bound(vs, radius))
        .into_iter()
        .map(|k| combine(vs, &k))
        .filter(|p| p.iter().map(|x| x * x).sum::<f64>() <= radius * radius * (1.0 + 1e-12))
        .collect()
}
