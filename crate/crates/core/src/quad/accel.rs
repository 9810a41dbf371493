//! Summation helpers and sequence acceleration.

/// Pairwise summation with a fixed split, so the rounding pattern only
/// depends on the length of the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Levin u-transform of partial sums `s[0..]` with terms `a[0..]`.
///
/// Returns the highest-order estimate using all supplied entries. `offset` is
/// the index of `s[0]` within the full sequence (enters the `(n+β)` weights).
pub fn levin_u(s: &[f64], a: &[f64], offset: usize) -> Option<f64> {
    let k = s.len().checked_sub(1)?;
    if a.len() != s.len() {
        return None;
    }
    let beta = 1.0;
    let n = offset as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let omega = (n + j as f64 + beta) * a[j];
        if omega == 0.0 || !omega.is_finite() {
            return None;
        }
        let ratio = ((n + j as f64 + beta) / (n + k as f64 + beta)).powi(k as i32 - 1);
        let c = if j % 2 == 0 { binom } else { -binom } * ratio / omega;
        num += c * s[j];
        den += c;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let v = num / den;
    v.is_finite().then_some(v)
}

/// Euler transform of an alternating tail: repeated averaging of the last
/// partial sums (van Wijngaarden's formulation, `depth` rounds).
pub fn euler_average(s: &[f64], depth: usize) -> Option<f64> {
    if s.len() < depth + 1 || depth == 0 {
        return None;
    }
    let mut row: Vec<f64> = s[s.len() - depth - 1..].to_vec();
    for _ in 0..depth {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row.first().copied()
}

/// Wynn's epsilon algorithm. Returns the even-column estimates
/// `ε_{2k}` built from the last entries of `s`, lowest order first.
///
/// Stable for linearly convergent sequences, such as partial integrals taken
/// at geometrically growing endpoints.
pub fn wynn_epsilon(s: &[f64]) -> Vec<f64> {
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur = s.to_vec();
    let mut out = Vec::new();
    for col in 1..s.len() {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                // exact convergence: the rest of the table is undefined
                out.push(cur[i + 1]);
                return out;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        if col % 2 == 0 {
            match next.last() {
                Some(v) if v.is_finite() => out.push(*v),
                _ => return out,
            }
        }
        prev = cur;
        cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wynn_on_geometric_tails() {
        // S_j = 1 − 2^{-j} − 3^{-j}/2
        let s: Vec<f64> = (0..16).map(|j| 1.0 - 0.5f64.powi(j) - 0.5 * (1.0 / 3.0f64).powi(j)).collect();
        let e = wynn_epsilon(&s);
        assert!((e.last().unwrap() - 1.0).abs() < 1e-14, "{e:?}");
    }

    #[test]
    fn levin_accelerates_zeta2() {
        let mut s = Vec::new();
        let mut a = Vec::new();
        let mut acc = 0.0;
        for k in 1..=16 {
            let t = 1.0 / (k * k) as f64;
            acc += t;
            s.push(acc);
            a.push(t);
        }
        let v = levin_u(&s, &a, 0).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v - z2).abs() < 1e-8, "{v}");
    }

    #[test]
    fn euler_on_log2() {
        let mut s = Vec::new();
        let mut acc = 0.0;
        for k in 1..=30 {
            acc += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            s.push(acc);
        }
        let v = euler_average(&s, 12).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
    }
}
