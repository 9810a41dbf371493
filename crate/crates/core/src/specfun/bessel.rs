//! Bessel functions of the first kind for integer and half-integer order.
//!
//! Integer orders use the power series for small arguments, Miller's backward
//! recurrence in the transition region and the Hankel expansion for large
//! arguments. Half-integer orders go through spherical Bessel functions.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{invalid, Result};

/// Largest supported order (in units of the order itself, not twice it).
pub const MAX_ORDER: f64 = 40.0;

/// Below this argument the power series is used for integer orders.
const SERIES_MAX: f64 = 4.0;
/// Lower bound for switching to the Hankel expansion.
const HANKEL_MIN: f64 = 25.0;

/// `J_ν(t)` for `ν ∈ {0, 1/2, 1, 3/2, ...}` up to [`MAX_ORDER`] and `t ≥ 0`.
pub fn bessel_j(order: f64, t: f64) -> Result<f64> {
    let two_nu = 2.0 * order;
    if !(order >= 0.0) || (two_nu - two_nu.round()).abs() > 1e-12 || order > MAX_ORDER {
        return invalid(format!("unsupported Bessel order {order}"));
    }
    if !(t >= 0.0) {
        return invalid(format!("Bessel argument must be nonnegative, got {t}"));
    }
    Ok(bessel_j_half(two_nu.round() as u32, t))
}

/// `J_{k/2}(t)` with the order passed as twice its value. No argument checks.
pub fn bessel_j_half(two_nu: u32, t: f64) -> f64 {
    if two_nu % 2 == 0 {
        jn_int(two_nu / 2, t)
    } else {
        let l = (two_nu - 1) / 2;
        if t == 0.0 {
            return 0.0;
        }
        (2.0 * t / PI).sqrt() * spherical_j(l, t)
    }
}

/// Integer-order `J_m(t)`, `t ≥ 0`.
pub fn jn_int(m: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mf = m as f64;
    if t <= SERIES_MAX {
        jn_series(m, t)
    } else if t >= HANKEL_MIN.max(mf * mf) {
        jn_hankel(mf, t)
    } else {
        jn_miller(m, t)
    }
}

fn jn_series(m: u32, t: f64) -> f64 {
    let x = 0.25 * t * t;
    let mut lead = 1.0;
    for k in 1..=m {
        lead *= 0.5 * t / k as f64;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -x / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Hankel asymptotic expansion, summed until the terms stop decreasing.
fn jn_hankel(nu: f64, t: f64) -> f64 {
    let (p, q) = hankel_pq(nu, t);
    let chi = t - (0.5 * nu + 0.25) * PI;
    (FRAC_2_PI / t).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_pq(nu: f64, t: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * t);
        if term.abs() > prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        // a_k / t^k alternates between Q (odd k) and P (even k) with sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// Miller backward recurrence normalized by `J_0 + 2 Σ J_{2k} = 1`.
fn jn_miller(m: u32, t: f64) -> f64 {
    let top = (m as f64).max(t);
    let mut start = (top + 20.0 + 8.0 * top.sqrt()) as u32;
    if start % 2 == 1 {
        start += 1;
    }
    let mut jp1 = 0.0;
    let mut j = 1.0;
    let mut norm = 0.0;
    let mut result = 0.0;
    let two_over_t = 2.0 / t;
    let mut k = start;
    while k > 0 {
        let jm1 = k as f64 * two_over_t * j - jp1;
        jp1 = j;
        j = jm1;
        k -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
        if k == m {
            result = j;
        }
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    result / norm
}

/// Spherical Bessel `j_l(t)`.
pub fn spherical_j(l: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    let lf = l as f64;
    if t < lf + 1.0 || t < 0.5 {
        return spherical_j_series(l, t);
    }
    let (s, c) = t.sin_cos();
    let j0 = s / t;
    if l == 0 {
        return j0;
    }
    let mut jm = j0;
    let mut jc = s / (t * t) - c / t;
    for k in 1..l {
        let jn = (2 * k + 1) as f64 / t * jc - jm;
        jm = jc;
        jc = jn;
    }
    jc
}

fn spherical_j_series(l: u32, t: f64) -> f64 {
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= t / (2 * k + 1) as f64;
    }
    let x = 0.5 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= -x / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        let t = PI / 2.0;
        let v = bessel_j(0.5, t).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert!(bessel_j(0.3, 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
    }

    #[test]
    fn regimes_agree_at_switch_points() {
        for m in 0..4u32 {
            for &t in &[SERIES_MAX, HANKEL_MIN] {
                let a = jn_miller(m, t);
                let b = if t == SERIES_MAX { jn_series(m, t) } else { jn_hankel(m as f64, t) };
                assert!((a - b).abs() < 1e-14, "m={m} t={t} {a} {b}");
            }
        }
    }

    #[test]
    fn spherical_series_matches_recurrence() {
        for l in 0..5u32 {
            let t = l as f64 + 1.0;
            let mut jm = t.sin() / t;
            let mut jc = t.sin() / (t * t) - t.cos() / t;
            let rec = if l == 0 {
                jm
            } else {
                for k in 1..l {
                    let jn = (2 * k + 1) as f64 / t * jc - jm;
                    jm = jc;
                    jc = jn;
                }
                jc
            };
            let ser = spherical_j_series(l, t);
            assert!((rec - ser).abs() < 1e-13 * ser.abs().max(1e-3), "l={l}");
        }
    }
}
