//! Special functions: the normalized ball transform `h_n`, its derivative,
//! the Fourier transform of the sphere measure and the ball volume `ω_n`.

mod bessel;
mod hyper;

use std::f64::consts::PI;

pub use bessel::{bessel_j, bessel_j_half, jn_int, spherical_j, MAX_ORDER};
pub use hyper::hyp2f1;


use crate::error::{invalid, Result};

/// Below this argument `h_m` is summed from its Taylor series.
const H_SERIES_MAX: f64 = 4.0;

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Natural log of `|Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Digamma `ψ(x)`; NaN at the poles.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    acc + x.ln() - 0.5 / x - series
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn omega(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    PI.powf(half) / gamma(half + 1.0)
}

/// `h_m(t) = Γ(m/2+1) (2/t)^{m/2} J_{m/2}(t)` for any index `m ≥ 0`.
///
/// For `m = n` this is the Fourier transform of the unit ball divided by its
/// volume; `h_0 = J_0` and `h_1(t) = sin t / t`.
pub fn h_index(m: usize, t: f64) -> f64 {
    let t = t.abs();
    if t <= H_SERIES_MAX {
        return h_series(m, t);
    }
    if m % 2 == 1 {
        let l = (m - 1) / 2;
        let mut df = 1.0;
        for k in 0..=l {
            df *= (2 * k + 1) as f64;
        }
        df * spherical_j(l as u32, t) / t.powi(l as i32)
    } else {
        let k = m / 2;
        let mut fact = 1.0;
        for j in 1..=k {
            fact *= j as f64;
        }
        fact * (2.0 / t).powi(k as i32) * jn_int(k as u32, t)
    }
}

fn h_series(m: usize, t: f64) -> f64 {
    let nu1 = m as f64 / 2.0 + 1.0;
    let x = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        let kf = k as f64;
        term *= x / (kf * (nu1 + kf - 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `1 − h_m(t)` without cancellation for small `t` (leading term `t²/(2m+4)`).
pub fn one_minus_h(m: usize, t: f64) -> f64 {
    let t = t.abs();
    if t > 2.0 {
        return 1.0 - h_index(m, t);
    }
    let nu1 = m as f64 / 2.0 + 1.0;
    let x = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        term *= x / (kf * (nu1 + kf - 1.0));
        sum -= term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `h_n(t)`, checked.
pub fn h(n: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid(format!("h_n needs t >= 0, got {t}"));
    }
    Ok(h_index(n, t))
}

/// `ḣ_n(t) = -t/(n+2) h_{n+2}(t)`, checked.
pub fn hdot(n: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid(format!("hdot needs t >= 0, got {t}"));
    }
    Ok(hdot_unchecked(n, t))
}

pub fn hdot_unchecked(n: usize, t: f64) -> f64 {
    -t / (n as f64 + 2.0) * h_index(n + 2, t)
}

/// Fourier transform of the surface measure on `S^{n-1}`:
/// `(2π)^{n/2} J_{(n-2)/2}(t) / t^{(n-2)/2} = n ω_n h_{n-2}(t)`.
pub fn mu_hat(n: usize, t: f64) -> Result<f64> {
    if n < 2 {
        return invalid("mu_hat needs n >= 2");
    }
    if !(t >= 0.0) {
        return invalid(format!("mu_hat needs t >= 0, got {t}"));
    }
    Ok(n as f64 * omega(n) * h_index(n - 2, t))
}

/// `h_n` bound to a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallKernel {
    pub n: usize,
}

impl BallKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return invalid("dimension must be >= 1");
        }
        Ok(Self { n })
    }

    /// `h_n(t)` for `t ≥ 0` (the even extension for negative `t`).
    #[inline]
    pub fn h(&self, t: f64) -> f64 {
        h_index(self.n, t)
    }

    #[inline]
    pub fn hdot(&self, t: f64) -> f64 {
        hdot_unchecked(self.n, t.abs()) * t.signum()
    }

    pub fn mu_hat(&self, t: f64) -> f64 {
        self.n as f64 * omega(self.n) * h_index(self.n.saturating_sub(2), t.abs())
    }

    /// Argument where the Taylor series hands over to the Bessel route.
    pub fn series_switch(&self) -> f64 {
        H_SERIES_MAX
    }
}
