//! Two-term asymptotic fits `value ≈ A λ^p + B λ^q`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Condition number of the scaled normal matrix above which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub exponents: (f64, f64),
    pub window: (f64, f64),
    /// `[A, B]`.
    pub coefficients: [f64; 2],
    /// `σ² (XᵀWX)^{-1}` with `σ²` the weighted residual variance.
    pub covariance: [[f64; 2]; 2],
    /// `‖W^{1/2}(y − Xc)‖₂`.
    pub residual_norm: f64,
    pub records_used: usize,
    /// Largest relative change of `B` when the first quarter and the first
    /// half of the window are dropped; `None` when too few records remain.
    pub drift_b: Option<f64>,
}

impl AsymptoticFit {
    pub fn a(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn b(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn sigma_a(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }

    pub fn sigma_b(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }
}

struct Solve {
    coef: [f64; 2],
    cov: [[f64; 2]; 2],
    residual: f64,
}

/// Weighted least squares with weights `λ^{-2q}`, i.e. rows divided by `λ^q`.
fn solve(records: &[(f64, f64)], p: f64, q: f64) -> Result<Solve> {
    let m = records.len();
    let rows: Vec<([f64; 2], f64)> = records
        .iter()
        .map(|&(l, y)| {
            let w = l.powf(-q);
            ([l.powf(p) * w, l.powf(q) * w], y * w)
        })
        .collect();
    // column scaling keeps the normal matrix near unit diagonal
    let mut scale = [0.0f64; 2];
    for (x, _) in &rows {
        scale[0] += x[0] * x[0];
        scale[1] += x[1] * x[1];
    }
    let scale = [scale[0].sqrt(), scale[1].sqrt()];
    let mut a = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (x, y) in &rows {
        let v = Vector2::new(x[0] / scale[0], x[1] / scale[1]);
        a += v * v.transpose();
        rhs += v * *y;
    }
    let sv = a.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::NonConvergence(format!(
            "two-term design matrix is ill-conditioned (condition number {cond:.3e})"
        )));
    }
    let inv = a
        .try_inverse()
        .ok_or_else(|| Error::NonConvergence("two-term design matrix is singular".into()))?;
    let c = inv * rhs;
    let coef = [c[0] / scale[0], c[1] / scale[1]];
    let residual = rows
        .iter()
        .map(|(x, y)| (y - x[0] * coef[0] - x[1] * coef[1]).powi(2))
        .sum::<f64>()
        .sqrt();
    let sigma2 = if m > 2 { residual * residual / (m - 2) as f64 } else { 0.0 };
    let mut cov = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cov[i][j] = sigma2 * inv[(i, j)] / (scale[i] * scale[j]);
        }
    }
    Ok(Solve { coef, cov, residual })
}

/// Fits `A λ^p + B λ^q` to the records with `λ` inside `window`.
pub fn fit_two_term(records: &[(f64, f64)], exponents: (f64, f64), window: (f64, f64)) -> Result<AsymptoticFit> {
    let (p, q) = exponents;
    if !(p > q) {
        return invalid(format!("exponents must satisfy p > q, got ({p}, {q})"));
    }
    if !(window.0 <= window.1) {
        return invalid(format!("empty window [{}, {}]", window.0, window.1));
    }
    let mut used: Vec<(f64, f64)> = records
        .iter()
        .copied()
        .filter(|&(l, _)| l >= window.0 && l <= window.1)
        .collect();
    if let Some(&(l, y)) = used.iter().find(|(l, y)| !(l.is_finite() && *l > 0.0 && y.is_finite())) {
        return invalid(format!("record ({l}, {y}) is not a finite point with λ > 0"));
    }
    if used.len() < 4 {
        return invalid(format!("two-term fit needs at least 4 records in the window, got {}", used.len()));
    }
    used.sort_by(|a, b| a.0.total_cmp(&b.0));
    let full = solve(&used, p, q)?;
    let m = used.len();
    let mut drift: Option<f64> = None;
    for drop in [m / 4, m / 2] {
        if drop == 0 || m - drop < 3 {
            continue;
        }
        if let Ok(sub) = solve(&used[drop..], p, q) {
            let d = (sub.coef[1] - full.coef[1]).abs() / full.coef[1].abs().max(f64::MIN_POSITIVE);
            drift = Some(drift.map_or(d, |x| x.max(d)));
        }
    }
    Ok(AsymptoticFit {
        exponents,
        window,
        coefficients: full.coef,
        covariance: full.cov,
        residual_norm: full.residual,
        records_used: m,
        drift_b: drift,
    })
}
