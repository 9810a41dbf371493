//! Weyl residuals and sampled error norms of `S_λ − S_λ^ctm`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{weyl_volume_term, ContinuumKernel, SpectrumEnumeration};
use crate::error::{invalid, Result};
use crate::quad::qmc::{random_shifts, Kronecker};
use crate::quad::{pairwise_sum, DEFAULT_SEED};

/// `(N(λ) − ω_n λⁿ|Ω|/(2π)ⁿ) / λ^{n−1}`.
pub fn weyl_residual(e: &SpectrumEnumeration, lambda: f64) -> Result<f64> {
    if lambda > e.lambda_max * (1.0 + super::TIE_TOL) {
        return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", e.lambda_max));
    }
    let n = e.dim() as i32;
    Ok((e.count(lambda) as f64 - weyl_volume_term(&e.domain, lambda)) / lambda.powi(n - 1))
}

/// Mean of the Weyl residual over `samples` equispaced points of `[lo, hi]`.
pub fn weyl_window_average(e: &SpectrumEnumeration, lo: f64, hi: f64, samples: usize) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) || samples < 2 {
        return invalid("window needs 0 < lo < hi and at least two samples");
    }
    let mut acc = Vec::with_capacity(samples);
    for i in 0..samples {
        let l = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        acc.push(weyl_residual(e, l)?);
    }
    Ok(pairwise_sum(&acc) / samples as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub lambda: f64,
    pub n_modes: usize,
    /// Sampled sup of `|S − S^ctm|` on the diagonal `r = r'`.
    pub linf_diag: f64,
    /// Sampled sup over pairs `(r, r')`.
    pub linf_off: f64,
    /// `max(linf_diag, linf_off)`.
    pub linf: f64,
    pub l2: f64,
    /// Standard error of `l2` across shifts (propagated through the root).
    pub l2_error: f64,
    /// `(p, ‖S − S^ctm‖_{L^p(Ω×Ω)})` for each requested `p`.
    pub lp: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorScan {
    pub records: Vec<ErrorRecord>,
    pub samples: usize,
    pub slope_linf: f64,
    pub slope_l2: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

const SHIFTS: usize = 8;
const CHUNK: usize = 1024;

/// Sampled error norms of `S_λ − S_λ^ctm` over `Ω × Ω` on a grid of `λ`.
///
/// `samples` Kronecker pairs (split over 8 random shifts) are mapped into
/// `Ω × Ω`; the same points give the sampled sup norms (off-diagonal from
/// the pairs, diagonal from the first point of each pair) and the `L^p`
/// norms by quasi-Monte Carlo.
pub fn error_scan(
    e: &SpectrumEnumeration,
    kernel: &ContinuumKernel,
    lambdas: &[f64],
    samples: usize,
    ps: &[f64],
) -> Result<ErrorScan> {
    if lambdas.is_empty() {
        return invalid("empty λ grid");
    }
    if samples < SHIFTS * 16 {
        return invalid("too few samples");
    }
    if ps.iter().any(|&p| !(p >= 1.0)) {
        return invalid("L^p exponents must be at least 1");
    }
    let cell = e.domain.cell();
    let n = cell.dim;
    let vol2 = cell.volume * cell.volume;
    let seq = Kronecker::new(2 * n);
    let shifts = random_shifts(2 * n, SHIFTS, DEFAULT_SEED);
    let per_shift = samples / SHIFTS;
    let mut records = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda > e.lambda_max * (1.0 + super::TIE_TOL) {
            return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", e.lambda_max));
        }
        let count = e.count(lambda);
        let np = ps.len() + 1;
        // per shift: sums of |d|^2 and |d|^p; global maxima
        let chunks = per_shift.div_ceil(CHUNK);
        let mut sums = vec![vec![0.0; np]; SHIFTS];
        let (mut max_d, mut max_o) = (0.0f64, 0.0f64);
        for (si, shift) in shifts.iter().enumerate() {
            let parts: Vec<(Vec<f64>, f64, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut u = vec![0.0; 2 * n];
                    let mut r = vec![0.0; n];
                    let mut rp = vec![0.0; n];
                    let mut vals: Vec<Vec<f64>> = vec![Vec::with_capacity(CHUNK); np];
                    let (mut md, mut mo) = (0.0f64, 0.0f64);
                    for k in c * CHUNK..((c + 1) * CHUNK).min(per_shift) {
                        seq.point(k as u64, shift, &mut u);
                        cell.map_unit_cube(&u[..n], &mut r);
                        cell.map_unit_cube(&u[n..], &mut rp);
                        let d = (e.s_count(count, &r, &rp) - kernel.s(lambda, &r, &rp)).abs();
                        let dd = (e.s_count(count, &r, &r) - kernel.s(lambda, &r, &r)).abs();
                        md = md.max(dd);
                        mo = mo.max(d);
                        vals[0].push(d * d);
                        for (i, p) in ps.iter().enumerate() {
                            vals[i + 1].push(d.powf(*p));
                        }
                    }
                    (vals.iter().map(|v| pairwise_sum(v)).collect(), md, mo)
                })
                .collect();
            for (s, md, mo) in parts {
                for i in 0..np {
                    sums[si][i] += s[i];
                }
                max_d = max_d.max(md);
                max_o = max_o.max(mo);
            }
        }
        let mean_of = |i: usize| -> (f64, f64) {
            let v: Vec<f64> = sums.iter().map(|s| s[i] / per_shift as f64 * vol2).collect();
            let m = v.iter().sum::<f64>() / SHIFTS as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (SHIFTS as f64 - 1.0);
            (m, (var / SHIFTS as f64).sqrt())
        };
        let (i2, i2e) = mean_of(0);
        let l2 = i2.sqrt();
        let l2_error = if l2 > 0.0 { 0.5 * i2e / l2 } else { 0.0 };
        let lp = ps.iter().enumerate().map(|(i, &p)| (p, mean_of(i + 1).0.powf(1.0 / p))).collect();
        records.push(ErrorRecord {
            lambda,
            n_modes: count,
            linf_diag: max_d,
            linf_off: max_o,
            linf: max_d.max(max_o),
            l2,
            l2_error,
            lp,
        });
    }
    let xs: Vec<f64> = records.iter().map(|r| r.lambda).collect();
    let (slope_linf, slope_l2) = if records.len() >= 2 {
        (
            log_slope(&xs, &records.iter().map(|r| r.linf).collect::<Vec<_>>()),
            log_slope(&xs, &records.iter().map(|r| r.l2).collect::<Vec<_>>()),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ErrorScan {
        records,
        samples: per_shift * SHIFTS,
        slope_linf,
        slope_l2,
    })
}
