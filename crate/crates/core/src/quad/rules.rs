//! Fixed and refining 1D rules: Gauss–Legendre, tanh-sinh.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "need at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..(m + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(m: usize) -> Self {
        let (nodes, weights) = gauss_legendre(m);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Composite rule with `panels` equal panels.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let step = (b - a) / panels as f64;
        (0..panels)
            .map(|p| self.integrate(a + p as f64 * step, a + (p + 1) as f64 * step, &mut f))
            .sum()
    }

    /// Nodes and weights of a composite rule on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let step = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.order());
        let mut ws = Vec::with_capacity(panels * self.order());
        for p in 0..panels {
            let lo = a + p as f64 * step;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(lo + 0.5 * step * (x + 1.0));
                ws.push(0.5 * step * w);
            }
        }
        (xs, ws)
    }

    /// Nodes and weights of the composite rule on consecutive `breaks`.
    pub fn on_breaks(&self, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(breaks.len() * self.order());
        let mut ws = Vec::with_capacity(breaks.len() * self.order());
        for w in breaks.windows(2) {
            let h = 0.5 * (w[1] - w[0]);
            for (x, g) in self.nodes.iter().zip(&self.weights) {
                xs.push(w[0] + h * (x + 1.0));
                ws.push(h * g);
            }
        }
        (xs, ws)
    }
}

/// Breakpoints on `[a, b]`: panels no wider than `width`, the first one split
/// geometrically `levels` times with `ratio`, and every point of `extra`
/// inside `(a, b)` inserted.
pub fn graded_breaks(a: f64, b: f64, width: f64, levels: usize, ratio: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = vec![a];
    for w in pts.windows(2) {
        let k = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for j in 1..=k {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / k as f64);
        }
    }
    let first = out[1] - a;
    let mut g: Vec<f64> = (1..=levels).map(|l| a + first * ratio.powi(l as i32)).collect();
    out.append(&mut g);
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}

/// Outcome of a tanh-sinh integration.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint singularities.
///
/// Nodes are generated from their distance to the nearer endpoint so points
/// very close to a singular endpoint keep full relative precision. `f` is
/// called as `f(x, d_a, d_b)` with `d_a = x - a`, `d_b = b - x`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(
    a: f64,
    b: f64,
    tol: f64,
    max_level: usize,
    mut f: F,
) -> TanhSinh {
    const T_MAX: f64 = 4.0;
    let len = b - a;
    let half = 0.5 * len;
    let mut evals = 0usize;
    let eval_pair = |t: f64, f: &mut F, evals: &mut usize| -> f64 {
        let q = (-PI * t.sinh()).exp();
        let w = half * 0.5 * PI * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
        let d = len * q / (1.0 + q);
        if d <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        // node near a
        let xa = a + d;
        s += w * f(xa, d, len - d);
        *evals += 1;
        if t > 0.0 {
            let xb = b - d;
            s += w * f(xb, len - d, d);
            *evals += 1;
        }
        s
    };
    // level 0, step 1
    let mut h = 1.0;
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        sum += eval_pair(t, &mut f, &mut evals);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    let mut converged = false;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            sum += eval_pair(t, &mut f, &mut evals);
            k += 2;
        }
        let new = sum * h;
        err = (new - estimate).abs();
        estimate = new;
        if !estimate.is_finite() {
            break;
        }
        if err <= tol * estimate.abs().max(1e-300) && _level >= 3 {
            converged = true;
            break;
        }
    }
    TanhSinh {
        value: estimate,
        error: err,
        evaluations: evals,
        converged,
    }
}
