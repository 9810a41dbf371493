//! Exact Laplace eigenpairs on boxes, the right-isosceles triangle and flat
//! tori, and fast evaluation of all modes at a point via per-axis tables.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{BoundaryCondition, Domain};
use crate::error::{invalid, Error, Result};
use crate::geometry::Lattice;
use crate::specfun::omega;

/// Default cap on the number of enumerated modes.
pub const MODE_BUDGET: usize = 4_000_000;
/// Modes with `λ_j ≤ λ + TIE_TOL·max(1, λ)` count as `λ_j ≤ λ`.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    /// Product of one trigonometric factor per axis.
    Product,
    /// `ψ_mk − ψ_km` on the triangle.
    Antisymmetric,
    /// `ψ_mk + ψ_km` on the triangle.
    Symmetric,
    Constant,
    Cosine,
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub index: Vec<i64>,
    /// `−Δe = λ² e`.
    pub lambda: f64,
    /// Normalization constant multiplying the unnormalized trigonometric form.
    pub norm: f64,
    pub kind: ModeKind,
}

#[derive(Debug, Clone)]
enum Basis {
    Box { lo: Vec<f64>, sides: Vec<f64> },
    Triangle { a: f64 },
    Torus { lattice: Lattice },
}

#[derive(Debug, Clone)]
pub struct SpectrumEnumeration {
    pub domain: Domain,
    pub bc: BoundaryCondition,
    pub lambda_max: f64,
    /// Sorted by eigenvalue, then index.
    pub modes: Vec<Mode>,
    basis: Basis,
    /// Largest index magnitude per axis.
    max_index: Vec<usize>,
}

pub fn enumerate_modes(domain: &Domain, bc: BoundaryCondition, lambda_max: f64) -> Result<SpectrumEnumeration> {
    enumerate_modes_with_budget(domain, bc, lambda_max, MODE_BUDGET)
}

pub fn enumerate_modes_with_budget(
    domain: &Domain,
    bc: BoundaryCondition,
    lambda_max: f64,
    budget: usize,
) -> Result<SpectrumEnumeration> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return invalid("lambda_max must be positive");
    }
    domain.check_bc(bc)?;
    let n = domain.dim();
    let weyl = omega(n) * lambda_max.powi(n as i32) * domain.volume() / (2.0 * PI).powi(n as i32)
        + omega(n - 1) * lambda_max.powi(n as i32 - 1) * domain.boundary_measure() / (4.0 * (2.0 * PI).powi(n as i32 - 1));
    if 1.2 * weyl + 64.0 > budget as f64 {
        return Err(Error::Budget(format!(
            "about {weyl:.0} modes below λ = {lambda_max}, budget is {budget}"
        )));
    }
    let cut = lambda_max * (1.0 + TIE_TOL) + TIE_TOL;
    let (basis, mut modes) = match domain {
        Domain::Torus(lattice) => (Basis::Torus { lattice: lattice.clone() }, torus_modes(lattice, cut)),
        Domain::Polytope(p) => {
            if let Some((lo, hi)) = p.as_axis_box() {
                let sides: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
                let modes = box_modes(&sides, bc, cut);
                (Basis::Box { lo, sides }, modes)
            } else if p.descriptor.kind == "right-isosceles-triangle" {
                let a = p.descriptor.parameters.first().copied().unwrap_or(1.0);
                (Basis::Triangle { a }, triangle_modes(a, bc, cut))
            } else {
                return Err(Error::Unsupported(format!(
                    "no exact eigenbasis for '{}'; only boxes, the right-isosceles triangle and tori",
                    p.descriptor.kind
                )));
            }
        }
    };
    modes.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap().then_with(|| a.index.cmp(&b.index)));
    let mut max_index = vec![0usize; n];
    for m in &modes {
        for (k, &i) in m.index.iter().enumerate().take(n) {
            max_index[k] = max_index[k].max(i.unsigned_abs() as usize);
        }
    }
    if let Basis::Triangle { .. } = basis {
        let top = max_index.iter().copied().max().unwrap_or(0);
        max_index = vec![top; 2];
    }
    Ok(SpectrumEnumeration {
        domain: domain.clone(),
        bc,
        lambda_max,
        modes,
        basis,
        max_index,
    })
}

fn box_modes(sides: &[f64], bc: BoundaryCondition, cut: f64) -> Vec<Mode> {
    let n = sides.len();
    let start = if bc == BoundaryCondition::Dirichlet { 1 } else { 0 };
    let mut out = Vec::new();
    let mut idx = vec![0i64; n];
    fn rec(k: usize, rem: f64, start: i64, sides: &[f64], bc: BoundaryCondition, idx: &mut Vec<i64>, out: &mut Vec<Mode>) {
        if k == sides.len() {
            let lam2: f64 = idx.iter().zip(sides).map(|(&m, l)| (m as f64 * PI / l).powi(2)).sum();
            let norm = idx
                .iter()
                .zip(sides)
                .map(|(&m, l)| if bc == BoundaryCondition::Neumann && m == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() })
                .product();
            out.push(Mode {
                index: idx.clone(),
                lambda: lam2.sqrt(),
                norm,
                kind: ModeKind::Product,
            });
            return;
        }
        let mut m = start;
        loop {
            let c = (m as f64 * PI / sides[k]).powi(2);
            if c > rem {
                break;
            }
            idx[k] = m;
            rec(k + 1, rem - c, start, sides, bc, idx, out);
            m += 1;
        }
    }
    // the remaining budget must leave room for the minimal indices of later axes
    let min_rest: f64 = sides.iter().map(|l| (start as f64 * PI / l).powi(2)).sum();
    if min_rest <= cut * cut {
        rec(0, cut * cut, start, sides, bc, &mut idx, &mut out);
    }
    out
}

fn triangle_modes(a: f64, bc: BoundaryCondition, cut: f64) -> Vec<Mode> {
    let mut out = Vec::new();
    let mmax = (cut * a / PI).floor() as i64;
    let c = |m: i64| if m == 0 { (1.0 / a).sqrt() } else { (2.0 / a).sqrt() };
    for m in 0..=mmax {
        for k in 0..=m {
            let lam = PI * ((m * m + k * k) as f64).sqrt() / a;
            if lam > cut {
                continue;
            }
            match bc {
                BoundaryCondition::Dirichlet => {
                    if k >= 1 && m > k {
                        out.push(Mode {
                            index: vec![m, k],
                            lambda: lam,
                            norm: 2.0 / a,
                            kind: ModeKind::Antisymmetric,
                        });
                    }
                }
                _ => {
                    let d = if m == k { 2f64.sqrt() } else { 1.0 };
                    out.push(Mode {
                        index: vec![m, k],
                        lambda: lam,
                        norm: c(m) * c(k) / d,
                        kind: ModeKind::Symmetric,
                    });
                }
            }
        }
    }
    out
}

fn torus_modes(lattice: &Lattice, cut: f64) -> Vec<Mode> {
    let vol = lattice.cell.volume;
    let bounds = Lattice::index_bound(&lattice.dual, cut);
    let mut out = vec![Mode {
        index: vec![0; lattice.dim],
        lambda: 0.0,
        norm: 1.0 / vol.sqrt(),
        kind: ModeKind::Constant,
    }];
    let c = (2.0 / vol).sqrt();
    for k in crate::geometry::lattice::box_indices(&bounds) {
        // one representative of each ±k pair
        match k.iter().find(|&&x| x != 0) {
            Some(&first) if first > 0 => {}
            _ => continue,
        }
        let lam = lattice.dual_point(&k).iter().map(|x| x * x).sum::<f64>().sqrt();
        if lam > cut {
            continue;
        }
        for kind in [ModeKind::Cosine, ModeKind::Sine] {
            out.push(Mode {
                index: k.clone(),
                lambda: lam,
                norm: c,
                kind,
            });
        }
    }
    out
}

impl SpectrumEnumeration {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `N(λ) = #{ j : λ_j ≤ λ }` (closed cutoff with tie tolerance).
    pub fn count(&self, lambda: f64) -> usize {
        let cut = lambda + TIE_TOL * lambda.max(1.0);
        self.modes.partition_point(|m| m.lambda <= cut)
    }

    fn checked_count(&self, lambda: f64) -> Result<usize> {
        if lambda > self.lambda_max * (1.0 + TIE_TOL) {
            return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", self.lambda_max));
        }
        Ok(self.count(lambda))
    }

    /// Values of the first `count` modes at `r`, and optionally their
    /// gradients (row-major, `n` per mode).
    pub fn eval_modes(&self, r: &[f64], count: usize, vals: &mut [f64], mut grads: Option<&mut [f64]>) {
        let n = self.dim();
        match &self.basis {
            Basis::Box { lo, sides } => {
                let tabs = AxisTables::new(&self.max_index, |k| PI / sides[k], |k| r[k] - lo[k]);
                let dir = self.bc == BoundaryCondition::Dirichlet;
                for (j, m) in self.modes[..count].iter().enumerate() {
                    let mut v = m.norm;
                    for k in 0..n {
                        let i = m.index[k] as usize;
                        v *= if dir { tabs.sin[k][i] } else { tabs.cos[k][i] };
                    }
                    vals[j] = v;
                    if let Some(g) = grads.as_deref_mut() {
                        for d in 0..n {
                            let mut gv = m.norm;
                            for k in 0..n {
                                let i = m.index[k] as usize;
                                let w = i as f64 * tabs.freq[k];
                                gv *= match (dir, k == d) {
                                    (true, false) => tabs.sin[k][i],
                                    (true, true) => w * tabs.cos[k][i],
                                    (false, false) => tabs.cos[k][i],
                                    (false, true) => -w * tabs.sin[k][i],
                                };
                            }
                            g[j * n + d] = gv;
                        }
                    }
                }
            }
            Basis::Triangle { a } => {
                let tabs = AxisTables::new(&self.max_index, |_| PI / a, |k| r[k]);
                let w = PI / a;
                for (j, m) in self.modes[..count].iter().enumerate() {
                    let (p, q) = (m.index[0] as usize, m.index[1] as usize);
                    let (f, df): (&Vec<Vec<f64>>, Box<dyn Fn(usize, usize) -> f64>) = match m.kind {
                        ModeKind::Antisymmetric => (&tabs.sin, Box::new(|k, i| i as f64 * w * tabs.cos[k][i])),
                        _ => (&tabs.cos, Box::new(|k, i| -(i as f64) * w * tabs.sin[k][i])),
                    };
                    let sgn = if m.kind == ModeKind::Antisymmetric { -1.0 } else { 1.0 };
                    vals[j] = m.norm * (f[0][p] * f[1][q] + sgn * f[0][q] * f[1][p]);
                    if let Some(g) = grads.as_deref_mut() {
                        g[j * 2] = m.norm * (df(0, p) * f[1][q] + sgn * df(0, q) * f[1][p]);
                        g[j * 2 + 1] = m.norm * (f[0][p] * df(1, q) + sgn * f[0][q] * df(1, p));
                    }
                }
            }
            Basis::Torus { lattice } => {
                let theta: Vec<f64> = lattice.dual.iter().map(|v| v.iter().zip(r).map(|(a, b)| a * b).sum()).collect();
                let tabs = AxisTables::new(&self.max_index, |_| 1.0, |k| theta[k]);
                for (j, m) in self.modes[..count].iter().enumerate() {
                    if m.kind == ModeKind::Constant {
                        vals[j] = m.norm;
                        if let Some(g) = grads.as_deref_mut() {
                            g[j * n..(j + 1) * n].iter_mut().for_each(|x| *x = 0.0);
                        }
                        continue;
                    }
                    // e^{i k·r} = Π_k e^{i m_k θ_k}
                    let (mut re, mut im) = (1.0, 0.0);
                    for k in 0..n {
                        let i = m.index[k];
                        let c = tabs.cos[k][i.unsigned_abs() as usize];
                        let s = tabs.sin[k][i.unsigned_abs() as usize] * i.signum() as f64;
                        (re, im) = (re * c - im * s, re * s + im * c);
                    }
                    let (v, dv) = if m.kind == ModeKind::Cosine { (re, -im) } else { (im, re) };
                    vals[j] = m.norm * v;
                    if let Some(g) = grads.as_deref_mut() {
                        let kvec = lattice.dual_point(&m.index);
                        for d in 0..n {
                            g[j * n + d] = m.norm * dv * kvec[d];
                        }
                    }
                }
            }
        }
    }

    /// Value of mode `j` at `r`.
    pub fn mode_value(&self, j: usize, r: &[f64]) -> f64 {
        let mut v = vec![0.0; j + 1];
        self.eval_modes(r, j + 1, &mut v, None);
        v[j]
    }

    /// `S_λ(r, r') = Σ_{λ_j ≤ λ} e_j(r) e_j(r')`.
    pub fn s(&self, lambda: f64, r: &[f64], rp: &[f64]) -> Result<f64> {
        let c = self.checked_count(lambda)?;
        Ok(self.s_count(c, r, rp))
    }

    /// Kernel with the first `count` modes, without the cutoff check.
    pub fn s_count(&self, count: usize, r: &[f64], rp: &[f64]) -> f64 {
        if count == 0 {
            return 0.0;
        }
        let mut a = vec![0.0; count];
        let mut b = vec![0.0; count];
        self.eval_modes(r, count, &mut a, None);
        self.eval_modes(rp, count, &mut b, None);
        a.iter().zip(&b).map(|(x, y)| x * y).sum()
    }

    /// `(∇_r S_λ(r,r'), ∇_{r'} S_λ(r,r'))`.
    pub fn grad_s(&self, lambda: f64, r: &[f64], rp: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = self.checked_count(lambda)?;
        let n = self.dim();
        let (mut a, mut b) = (vec![0.0; c], vec![0.0; c]);
        let (mut ga, mut gb) = (vec![0.0; c * n], vec![0.0; c * n]);
        self.eval_modes(r, c, &mut a, Some(&mut ga));
        self.eval_modes(rp, c, &mut b, Some(&mut gb));
        let mut gr = vec![0.0; n];
        let mut grp = vec![0.0; n];
        for j in 0..c {
            for d in 0..n {
                gr[d] += ga[j * n + d] * b[j];
                grp[d] += a[j] * gb[j * n + d];
            }
        }
        Ok((gr, grp))
    }

    /// `S_λ(r,r)` and the gradient of `r ↦ S_λ(r,r)` using the first `count` modes.
    pub fn diag_count(&self, count: usize, r: &[f64]) -> (f64, Vec<f64>) {
        let n = self.dim();
        let mut v = vec![0.0; count];
        let mut g = vec![0.0; count * n];
        self.eval_modes(r, count, &mut v, Some(&mut g));
        let mut grad = vec![0.0; n];
        let mut val = 0.0;
        for j in 0..count {
            val += v[j] * v[j];
            for d in 0..n {
                grad[d] += 2.0 * v[j] * g[j * n + d];
            }
        }
        (val, grad)
    }

    /// `S_{s,λ}(r) = λ^{-n} S_λ(r/λ, r/λ)` for `r ∈ Ω_λ`.
    pub fn s_scaled(&self, lambda: f64, r: &[f64]) -> Result<f64> {
        Ok(self.diag_scaled(lambda, r)?.0)
    }

    /// `S_{s,λ}(r)` and its gradient in `r`.
    pub fn diag_scaled(&self, lambda: f64, r: &[f64]) -> Result<(f64, Vec<f64>)> {
        let c = self.checked_count(lambda)?;
        let x: Vec<f64> = r.iter().map(|v| v / lambda).collect();
        let (v, g) = self.diag_count(c, &x);
        let n = self.dim() as i32;
        let s = lambda.powi(-n);
        Ok((v * s, g.iter().map(|x| x * s / lambda).collect()))
    }
}

/// `sin(m ω_k x_k)`, `cos(m ω_k x_k)` for `m = 0..=M_k` on every axis.
struct AxisTables {
    sin: Vec<Vec<f64>>,
    cos: Vec<Vec<f64>>,
    freq: Vec<f64>,
}

impl AxisTables {
    fn new(max_index: &[usize], freq: impl Fn(usize) -> f64, x: impl Fn(usize) -> f64) -> Self {
        let n = max_index.len();
        let mut sin = Vec::with_capacity(n);
        let mut cos = Vec::with_capacity(n);
        let mut fr = Vec::with_capacity(n);
        for (k, &top) in max_index.iter().enumerate() {
            let w = freq(k);
            let t = w * x(k);
            let (s1, c1) = t.sin_cos();
            let mut s = vec![0.0; top + 1];
            let mut c = vec![1.0; top + 1];
            for m in 1..=top {
                // re-anchor every 16 steps to bound rounding growth
                if m % 16 == 0 {
                    let (sm, cm) = (m as f64 * t).sin_cos();
                    s[m] = sm;
                    c[m] = cm;
                } else {
                    s[m] = s[m - 1] * c1 + c[m - 1] * s1;
                    c[m] = c[m - 1] * c1 - s[m - 1] * s1;
                }
            }
            sin.push(s);
            cos.push(c);
            fr.push(w);
        }
        Self { sin, cos, freq: fr }
    }
}
