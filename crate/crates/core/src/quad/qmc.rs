//! Randomly shifted rank-1 lattice style (Kronecker) quasi-Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::accel::pairwise_sum;
use super::{QuadratureResult, QuadratureSpec};
use crate::error::{Error, Result};

pub const MAX_QMC_DIM: usize = 8;
/// Points per reduction chunk; fixed so results do not depend on thread count.
const CHUNK: usize = 4096;

/// Additive recurrence `x_k = frac(1/2 + k α)` with the generalized golden
/// ratio generator (the R_d sequence).
#[derive(Debug, Clone)]
pub struct Kronecker {
    alpha: Vec<f64>,
}

impl Kronecker {
    pub fn new(dim: usize) -> Self {
        let mut phi: f64 = 2.0;
        for _ in 0..60 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect();
        Self { alpha }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Point `k` shifted by `shift` (componentwise mod 1), then folded by
    /// the tent map `x ↦ 1 − |2x − 1|`, which keeps the uniform measure and
    /// makes non-periodic integrands continuous on the torus.
    #[inline]
    pub fn point(&self, k: u64, shift: &[f64], out: &mut [f64]) {
        let kf = k as f64;
        for i in 0..self.alpha.len() {
            let v = 0.5 + (kf * self.alpha[i]).fract() + shift[i];
            let x = v - v.floor();
            out[i] = 1.0 - (2.0 * x - 1.0).abs();
        }
    }
}

/// Shift vectors drawn from a ChaCha stream seeded with `seed`.
pub fn random_shifts(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()
}

/// Mean and standard error of `f` over `shifts` shifted copies of `points`
/// Kronecker points. Deterministic for a fixed seed regardless of threads.
pub fn shifted_means<F>(dim: usize, points: usize, shifts: usize, seed: u64, f: &F) -> (f64, f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut out = shifted_means_vec(dim, points, shifts, seed, 1, &|u: &[f64], v: &mut [f64]| v[0] = f(u));
    let (mean, se, per_shift) = out.pop().unwrap();
    (mean, se, per_shift)
}

/// Vector-valued [`shifted_means`]: `f` writes `width` values per point and
/// every component gets its own mean, standard error and per-shift means.
pub fn shifted_means_vec<F>(
    dim: usize,
    points: usize,
    shifts: usize,
    seed: u64,
    width: usize,
    f: &F,
) -> Vec<(f64, f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let seq = Kronecker::new(dim);
    let shift_vecs = random_shifts(dim, shifts, seed);
    let chunks = points.div_ceil(CHUNK);
    // per_shift[shift][component]
    let per_shift: Vec<Vec<f64>> = shift_vecs
        .iter()
        .map(|shift| {
            let sums: Vec<Vec<f64>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut buf = [0.0f64; MAX_QMC_DIM];
                    let lo = c * CHUNK;
                    let hi = ((c + 1) * CHUNK).min(points);
                    let mut vals = vec![Vec::with_capacity(hi - lo); width];
                    let mut out = vec![0.0; width];
                    for k in lo..hi {
                        seq.point(k as u64, shift, &mut buf[..dim]);
                        out.iter_mut().for_each(|v| *v = 0.0);
                        f(&buf[..dim], &mut out);
                        for (col, v) in vals.iter_mut().zip(&out) {
                            col.push(*v);
                        }
                    }
                    vals.iter().map(|col| pairwise_sum(col)).collect()
                })
                .collect();
            (0..width)
                .map(|j| {
                    let col: Vec<f64> = sums.iter().map(|s| s[j]).collect();
                    pairwise_sum(&col) / points as f64
                })
                .collect()
        })
        .collect();
    let r = shifts as f64;
    (0..width)
        .map(|j| {
            let col: Vec<f64> = per_shift.iter().map(|s| s[j]).collect();
            let mean = pairwise_sum(&col) / r;
            let var = if shifts > 1 {
                col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)
            } else {
                f64::INFINITY
            };
            (mean, (var / r).sqrt(), col)
        })
        .collect()
}

/// `∫_{[0,1]^dim} g` by randomized QMC; error is the standard error across shifts.
pub fn qmc_integrate<F>(g: F, dim: usize, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dim == 0 || dim > MAX_QMC_DIM {
        return Err(Error::InvalidArgument(format!("QMC dimension {dim} outside 1..={MAX_QMC_DIM}")));
    }
    let shifts = spec.shifts.max(8);
    let points = spec.max_evaluations / shifts;
    if points < 16 {
        return Err(Error::Budget(format!(
            "max_evaluations {} too small for {shifts} shifts",
            spec.max_evaluations
        )));
    }
    let (mean, se, _) = shifted_means(dim, points, shifts, spec.seed, &g);
    Ok(QuadratureResult {
        value: mean,
        error_estimate: se,
        evaluations: points * shifts,
        converged: se <= spec.tolerance * mean.abs().max(1.0),
    })
}
