//! `∫_Ω∫_Ω K(r,r') |r−r'|^{-s} dr dr'` by importance-sampled quasi-Monte Carlo
//! in the variables `z = r − r'` and `r'`.

use std::f64::consts::PI;

use super::qmc::shifted_means_vec;
use super::{QuadratureResult, QuadratureSpec};
use crate::error::{invalid, Result};
use crate::geometry::Polytope;
use crate::specfun;

/// Radii of the `|z|^{-s}` ball components. The default is the single ball
/// of radius `diam Ω`; kernels concentrated at `|z| ≲ ℓ` profit from adding
/// radii down to a few `ℓ`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SingularOptions {
    pub radii: Vec<f64>,
}

impl SingularOptions {
    /// Geometric ladder `diam, diam/2, …` down to `smallest`.
    pub fn ladder(diameter: f64, smallest: f64) -> Self {
        let mut radii = vec![diameter];
        let mut r = diameter;
        while r / 2.0 >= smallest {
            r /= 2.0;
            radii.push(r);
        }
        Self { radii }
    }
}

pub fn pair_integral_singular<K>(omega: &Polytope, kernel: K, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    K: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    pair_integral_singular_with(omega, kernel, s, spec, &SingularOptions::default())
}

/// The sampling density of `z` is `½·uniform(box(Ω−Ω)) + ½·mean_k q_k`, where
/// `q_k ∝ |z|^{-s}` on the ball of radius `radii[k]`. Given `z`, `r'` is
/// uniform on the analytic overlap box for boxes and uniform on `Ω` with an
/// indicator otherwise.
pub fn pair_integral_singular_with<K>(
    omega: &Polytope,
    kernel: K,
    s: f64,
    spec: &QuadratureSpec,
    options: &SingularOptions,
) -> Result<QuadratureResult>
where
    K: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let mut out = pair_integral_singular_vec(omega, |r, rp, v| v[0] = kernel(r, rp), 1, s, spec, options)?;
    Ok(out.pop().unwrap())
}

/// Several kernels on the same sample points: `kernel(r, r', out)` fills
/// `width` values and each gets its own estimate and error bar.
pub fn pair_integral_singular_vec<K>(
    omega: &Polytope,
    kernel: K,
    width: usize,
    s: f64,
    spec: &QuadratureSpec,
    options: &SingularOptions,
) -> Result<Vec<QuadratureResult>>
where
    K: Fn(&[f64], &[f64], &mut [f64]) + Sync,
{
    let n = omega.dim;
    if !(s > 0.0 && s < n as f64) {
        return invalid(format!("s must lie in (0,{n})"));
    }
    if n > 3 {
        return invalid("pair integrals are implemented for n ≤ 3");
    }
    spec.validate()?;
    let radii = if options.radii.is_empty() {
        vec![omega.diameter]
    } else {
        options.radii.clone()
    };
    let ns = n as f64 - s;
    let sphere = n as f64 * specfun::omega(n);
    // q_k(z) = norms[k] |z|^{-s} on |z| < radii[k]
    let norms: Vec<f64> = radii.iter().map(|r| ns / (sphere * r.powf(ns))).collect();
    let (lo, hi) = omega.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| 2.0 * (b - a)).product();
    let as_box = omega.as_axis_box();
    let kk = radii.len() as f64;

    let integrand = |u: &[f64], out: &mut [f64]| {
        let mut z = [0.0; 3];
        let z = &mut z[..n];
        if u[0] < 0.5 {
            for k in 0..n {
                z[k] = (lo[k] - hi[k]) + 2.0 * (hi[k] - lo[k]) * u[1 + k];
            }
        } else {
            let comp = (((u[0] - 0.5) * 2.0 * kk) as usize).min(radii.len() - 1);
            let rho = radii[comp] * u[1].powf(1.0 / ns);
            direction(n, &u[2..], z);
            z.iter_mut().for_each(|x| *x *= rho);
        }
        let rz = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rz == 0.0 {
            return;
        }
        let weight_s = rz.powf(-s);
        let radial: f64 = radii
            .iter()
            .zip(&norms)
            .filter(|(r, _)| rz < **r)
            .map(|(_, c)| c * weight_s)
            .sum::<f64>()
            / kk;
        let q = 0.5 / box_vol + 0.5 * radial;
        let mut rp = [0.0; 3];
        let mut r = [0.0; 3];
        let (rp, r) = (&mut rp[..n], &mut r[..n]);
        let inner_vol = match &as_box {
            Some((blo, bhi)) => {
                let mut vol = 1.0;
                for k in 0..n {
                    let a = blo[k].max(blo[k] - z[k]);
                    let b = bhi[k].min(bhi[k] - z[k]);
                    if b <= a {
                        return;
                    }
                    vol *= b - a;
                    rp[k] = a + (b - a) * u[1 + n + k];
                }
                vol
            }
            None => {
                omega.map_unit_cube(&u[1 + n..], rp);
                for k in 0..n {
                    r[k] = rp[k] + z[k];
                }
                if !omega.contains(r, 0.0) {
                    return;
                }
                omega.volume
            }
        };
        for k in 0..n {
            r[k] = rp[k] + z[k];
        }
        kernel(r, rp, out);
        let w = weight_s * inner_vol / q;
        out.iter_mut().for_each(|v| *v *= w);
    };

    let shifts = spec.shifts.max(8);
    let points = spec.max_evaluations / shifts;
    let dim = 2 * n + 1;
    let est = shifted_means_vec(dim, points, shifts, spec.seed, width, &integrand);
    Ok(est
        .into_iter()
        .map(|(mean, se, _)| QuadratureResult {
            value: mean,
            error_estimate: se,
            evaluations: points * shifts,
            converged: se <= spec.tolerance * mean.abs().max(1.0),
        })
        .collect())
}

/// Uniform direction on `S^{n-1}` from `n−1` uniforms.
fn direction(n: usize, u: &[f64], out: &mut [f64]) {
    match n {
        1 => out[0] = if u[0] < 0.5 { -1.0 } else { 1.0 },
        2 => {
            let t = 2.0 * PI * u[0];
            out[0] = t.cos();
            out[1] = t.sin();
        }
        _ => {
            let c = 2.0 * u[0] - 1.0;
            let sn = (1.0 - c * c).max(0.0).sqrt();
            let p = 2.0 * PI * u[1];
            out[0] = sn * p.cos();
            out[1] = sn * p.sin();
            out[2] = c;
        }
    }
}
