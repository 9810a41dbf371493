//! Gauss hypergeometric function on `0 ≤ z ≤ 1`.

use crate::error::{invalid, Error, Result};
use super::{digamma, gamma, ln_gamma};

/// Below this `z` the series is summed directly.
const DIRECT_MAX: f64 = 0.75;
const MAX_TERMS: usize = 20_000;
/// `c − a − b` closer than this to an integer takes the logarithmic branch.
const INTEGER_TOL: f64 = 1e-9;

/// `₂F₁(a, b; c; z)` for real parameters and `0 ≤ z ≤ 1`.
///
/// `z = 1` uses Gauss's summation and needs `c − a − b > 0`. Above `z = 0.75`
/// the series is re-expanded around `z = 1`, with the logarithmic form when
/// `c − a − b` is an integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return invalid(format!("hyp2f1 implemented for 0 <= z <= 1, got {z}"));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return invalid("hyp2f1: c must not be a non-positive integer");
    }
    let terminating = |x: f64| x <= 0.0 && x.fract() == 0.0;
    if terminating(a) || terminating(b) || z <= DIRECT_MAX {
        return direct(a, b, c, z);
    }
    if z == 1.0 {
        return gauss_sum(a, b, c);
    }
    reflected(a, b, c, z)
}

fn gauss_sum(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(c - a - b > 0.0) {
        return invalid("hyp2f1 at z = 1 diverges unless c − a − b > 0");
    }
    let sign = gamma_sign(c) * gamma_sign(c - a - b) * gamma_sign(c - a) * gamma_sign(c - b);
    Ok(sign * (ln_gamma(c) + ln_gamma(c - a - b) - ln_gamma(c - a) - ln_gamma(c - b)).exp())
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || x.fract() == 0.0 {
        1.0
    } else if (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn direct(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 || (term.abs() < 1e-17 * sum.abs() && k > 2) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("hyp2f1({a}, {b}; {c}; {z}) series")))
}

/// Connection to `1 − z` (used for `z > 0.75`, where `1 − z < 0.25`).
fn reflected(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let m = c - a - b;
    let w = 1.0 - z;
    let mr = m.round();
    if (m - mr).abs() > INTEGER_TOL {
        let t1 = gamma(c) * gamma(m) * rgamma(c - a) * rgamma(c - b) * direct(a, b, a + b - c + 1.0, w)?;
        let t2 = w.powf(m) * gamma(c) * gamma(-m) * rgamma(a) * rgamma(b) * direct(c - a, c - b, m + 1.0, w)?;
        return Ok(t1 + t2);
    }
    if mr < 0.0 {
        // F(a,b;c;z) = (1−z)^{c−a−b} F(c−a, c−b; c; z) turns m into −m
        return Ok(w.powf(m) * reflected(c - a, c - b, c, z)?);
    }
    // logarithmic case c = a + b + m with integer m ≥ 0
    let m = mr as usize;
    let (a, b) = (a, c - a - m as f64);
    let mf = m as f64;
    let mut finite = 0.0;
    if m > 0 {
        let mut t = 1.0;
        for k in 0..m {
            finite += t;
            let kf = k as f64;
            t *= (a + kf) * (b + kf) / ((kf + 1.0) * (1.0 - mf + kf)) * w;
        }
        finite *= gamma(mf) * gamma(a + b + mf) * rgamma(a + mf) * rgamma(b + mf);
    }
    let lw = w.ln();
    let mut fact_m = 1.0;
    for j in 1..=m {
        fact_m *= j as f64;
    }
    // coefficient (a+m)_k (b+m)_k / (k! (k+m)!) (1−z)^k
    let mut coef = 1.0 / fact_m;
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let bracket = lw - digamma(kf + 1.0) - digamma(kf + mf + 1.0) + digamma(a + kf + mf) + digamma(b + kf + mf);
        let term = coef * bracket;
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(finite - sign * w.powi(m as i32) * gamma(a + b + mf) * rgamma(a) * rgamma(b) * sum);
        }
        coef *= (a + mf + kf) * (b + mf + kf) / ((kf + 1.0) * (kf + mf + 1.0)) * w;
    }
    Err(Error::NonConvergence(format!("hyp2f1 logarithmic series at z = {z}")))
}

fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_cases() {
        // ₂F₁(1,1;2;z) = −ln(1−z)/z
        for &z in &[0.1, 0.5, 0.8, 0.95, 0.999] {
            let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
            let e = -(1.0 - z).ln() / z;
            assert!((v - e).abs() < 1e-9 * e, "z={z}: {v} vs {e}");
        }
        // terminating
        assert!((hyp2f1(-2.0, 1.0, 1.0, 0.9).unwrap() - 0.01).abs() < 1e-14);
        // logarithmic branch: ₂F₁(1/2,1/2;1;k²) = 2K(k)/π
        let k2: f64 = 0.99;
        let (mut x, mut y) = (1.0f64, (1.0 - k2).sqrt());
        for _ in 0..30 {
            (x, y) = (0.5 * (x + y), (x * y).sqrt());
        }
        let v = hyp2f1(0.5, 0.5, 1.0, k2).unwrap();
        assert!((v - 1.0 / x).abs() < 1e-13, "{v} vs {}", 1.0 / x);
        // m = 2 branch vs direct summation at the boundary of the direct range
        let (p, q) = (hyp2f1(1.0, -0.5, 2.5, 0.7500001).unwrap(), direct(1.0, -0.5, 2.5, 0.7500001).unwrap());
        assert!((p - q).abs() < 1e-13);
        let (p, q) = (hyp2f1(1.3, 0.4, 2.1, 0.7500001).unwrap(), direct(1.3, 0.4, 2.1, 0.7500001).unwrap());
        assert!((p - q).abs() < 1e-13);
        // Gauss
        let g = hyp2f1(0.5, 0.5, 2.0, 1.0).unwrap();
        assert!((g - 4.0 / std::f64::consts::PI).abs() < 1e-13);
    }
}
