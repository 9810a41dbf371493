//! The exchange energy `E_x(λ) = ∫_{Ω×Ω} S_λ(r,r')² |r−r'|^{-s} dr dr'` and
//! its continuum counterpart split into `(σ, τ)` terms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Polytope;
use crate::quad::{
    graded_breaks, pair_integral_singular_vec, pair_integral_singular_with, pairwise_sum, GaussLegendre, Method,
    QuadratureResult, QuadratureSpec, SingularOptions,
};
use crate::spectral::{BoundaryCondition, ContinuumKernel, Domain, SpectrumEnumeration, TIE_TOL};
use crate::specfun::{gamma, h_index, hyp2f1, omega};

fn check_s(n: usize, s: f64) -> Result<()> {
    if !(s > 0.0 && s < n as f64) {
        return invalid(format!("s must lie in (0,n), got s = {s} with n = {n}"));
    }
    Ok(())
}

/// `E_x(λ)`.
///
/// `Method::GaussTensor` selects the deterministic route for rectangles
/// (Dirichlet or Neumann); every other method samples the pair integral with
/// the singular quasi-Monte Carlo rule, at `O(N(λ))` per kernel evaluation.
pub fn exchange_energy(e: &SpectrumEnumeration, lambda: f64, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let n = e.dim();
    check_s(n, s)?;
    spec.validate()?;
    if lambda > e.lambda_max * (1.0 + TIE_TOL) {
        return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", e.lambda_max));
    }
    let count = e.count(lambda);
    if count == 0 {
        return Ok(QuadratureResult::exact(0.0));
    }
    let cell = e.domain.cell();
    if spec.method == Method::GaussTensor {
        let Domain::Polytope(p) = &e.domain else {
            return Err(Error::Unsupported("the tensor route needs a box with Dirichlet or Neumann conditions".into()));
        };
        let Some(sides) = box_sides(p) else {
            return Err(Error::Unsupported(format!("the tensor route needs a box, got '{}'", p.descriptor.kind)));
        };
        if n != 2 {
            return Err(Error::Unsupported("the tensor route is implemented for rectangles".into()));
        }
        return exchange_box_2d(e, count, &sides, lambda, s);
    }
    let options = SingularOptions::ladder(cell.diameter, 1.0 / lambda);
    pair_integral_singular_with(
        cell,
        |r, rp| {
            let v = e.s_count(count, r, rp);
            v * v
        },
        s,
        spec,
        &options,
    )
}

fn box_sides(p: &Polytope) -> Option<Vec<f64>> {
    p.as_axis_box().map(|(lo, hi)| hi.iter().zip(&lo).map(|(b, a)| b - a).collect())
}

/// `E_x(λ) − E_x^ctm(λ)` from one sampling pass with the kernel
/// `S_λ² − (S_λ^ctm)²`, so the shared fluctuations cancel.
pub fn exchange_energy_difference(e: &SpectrumEnumeration, lambda: f64, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    let n = e.dim();
    check_s(n, s)?;
    spec.validate()?;
    if lambda > e.lambda_max * (1.0 + TIE_TOL) {
        return invalid(format!("λ = {lambda} exceeds the enumeration cutoff {}", e.lambda_max));
    }
    let kernel = ContinuumKernel::new(&e.domain, e.bc)?;
    let count = e.count(lambda);
    let cell = e.domain.cell();
    let options = SingularOptions::ladder(cell.diameter, 1.0 / lambda);
    pair_integral_singular_with(
        cell,
        |r, rp| {
            let a = e.s_count(count, r, rp);
            let b = kernel.s(lambda, r, rp);
            (a - b) * (a + b)
        },
        s,
        spec,
        &options,
    )
}

/// `∫_0^{L−u} φ_m(x+u)φ_m(x)φ_{m'}(x+u)φ_{m'}(x) dx` for all `m, m' ≤ mmax`,
/// row-major into `out`, where `φ_m` are the normalized sine (Dirichlet) or
/// cosine (Neumann) modes of `[0, L]`.
fn axis_overlap(len: f64, dirichlet: bool, mmax: usize, u: f64, out: &mut [f64]) {
    let w = PI / len;
    let top = 2 * mmax;
    let mut sn = vec![0.0; top + 1];
    let mut cs = vec![0.0; top + 1];
    for j in 0..=top {
        let (a, b) = (j as f64 * w * u).sin_cos();
        sn[j] = a;
        cs[j] = b;
    }
    let rest = len - u;
    let g = |j: usize| if j == 0 { rest } else { -sn[j] / (j as f64 * w) };
    let eps = if dirichlet { -1.0 } else { 1.0 };
    let norm = |m: usize| if m == 0 { 1.0 / len } else { 2.0 / len };
    let start = usize::from(dirichlet);
    let m1 = mmax + 1;
    for m in 0..m1 {
        for mp in 0..m1 {
            out[m * m1 + mp] = if m < start || mp < start {
                0.0
            } else {
                let inner = rest * cs[m] * cs[mp]
                    + eps * (cs[m] * g(mp) + cs[mp] * g(m))
                    + 0.5 * (g(m.abs_diff(mp)) + g(m + mp));
                0.25 * norm(m) * norm(mp) * inner
            };
        }
    }
}

/// Rectangle `[0,L₁]×[0,L₂]`: `E = 4∫∫_{[0,L₁]×[0,L₂]} |z|^{-s} C(z) dz` with
/// `C(u,v) = Σ_{j,j'} I₁[m₁,m₁'](u) I₂[m₂,m₂'](v)` summed over pairs of
/// modes below `λ`. The mode set is closed downwards in `m₂`, so the inner
/// double sum is a lookup in a 2D prefix table. The quadrant is split into
/// two Duffy triangles.
fn exchange_box_2d(e: &SpectrumEnumeration, count: usize, sides: &[f64], lambda: f64, s: f64) -> Result<QuadratureResult> {
    let dirichlet = match e.bc {
        BoundaryCondition::Dirichlet => true,
        BoundaryCondition::Neumann => false,
        BoundaryCondition::Periodic => return Err(Error::Unsupported("the tensor route needs a box, not a torus".into())),
    };
    let start = usize::from(dirichlet);
    let modes = &e.modes[..count];
    let m1max = modes.iter().map(|m| m.index[0] as usize).max().unwrap_or(0);
    let m2max = modes.iter().map(|m| m.index[1] as usize).max().unwrap_or(0);
    let mut top: Vec<Option<usize>> = vec![None; m1max + 1];
    for m in modes {
        let (a, b) = (m.index[0] as usize, m.index[1] as usize);
        top[a] = Some(top[a].map_or(b, |t: usize| t.max(b)));
    }
    let closed: usize = top.iter().flatten().map(|k| k + 1 - start).sum();
    if closed != count {
        return Err(Error::Unsupported("mode set below λ is not closed downwards (tie at the cutoff)".into()));
    }
    let (l1, l2) = (sides[0], sides[1]);
    let diam = l1.hypot(l2);
    let active: Vec<(usize, usize)> = top.iter().enumerate().filter_map(|(m, k)| k.map(|k| (m, k))).collect();

    let c_of = |u: f64, v: f64| -> f64 {
        let (a1, a2) = (m1max + 1, m2max + 1);
        let mut i1 = vec![0.0; a1 * a1];
        let mut i2 = vec![0.0; a2 * a2];
        axis_overlap(l1, dirichlet, m1max, u, &mut i1);
        axis_overlap(l2, dirichlet, m2max, v, &mut i2);
        // prefix[a][b] = Σ_{m ≤ a, m' ≤ b} I₂[m][m']
        for a in 0..a2 {
            for b in 0..a2 {
                let mut x = i2[a * a2 + b];
                if a > 0 {
                    x += i2[(a - 1) * a2 + b];
                }
                if b > 0 {
                    x += i2[a * a2 + b - 1];
                }
                if a > 0 && b > 0 {
                    x -= i2[(a - 1) * a2 + b - 1];
                }
                i2[a * a2 + b] = x;
            }
        }
        let mut acc = 0.0;
        for &(m, km) in &active {
            for &(mp, kmp) in &active {
                acc += i1[m * a1 + mp] * i2[km * a2 + kmp];
            }
        }
        acc
    };

    let singular = (s - 1.0).abs() > 1e-12;
    let run = |order: usize| -> (f64, usize) {
        let gl = GaussLegendre::new(order);
        let width = PI / (lambda * diam).max(PI);
        let levels = if singular { 12 } else { 0 };
        let (rho, wr) = gl.on_breaks(&graded_breaks(0.0, 1.0, width, levels, 0.2, &[]));
        let (t, wt) = gl.on_breaks(&graded_breaks(0.0, 1.0, width, 0, 1.0, &[]));
        let parts: Vec<f64> = rho
            .par_iter()
            .zip(&wr)
            .map(|(&p, &w)| {
                let mut vals = Vec::with_capacity(2 * t.len());
                for (&tt, &wtt) in t.iter().zip(&wt) {
                    // triangle below the diagonal: u = L₁ρ, v = L₂ρt; above: swapped roles
                    let (u, v) = (l1 * p, l2 * p * tt);
                    let r = (u * u + v * v).sqrt();
                    vals.push(wtt * l1 * l2 * p * r.powf(-s) * c_of(u, v));
                    let (u, v) = (l1 * p * tt, l2 * p);
                    let r = (u * u + v * v).sqrt();
                    vals.push(wtt * l1 * l2 * p * r.powf(-s) * c_of(u, v));
                }
                w * pairwise_sum(&vals)
            })
            .collect();
        (4.0 * pairwise_sum(&parts), 2 * rho.len() * t.len())
    };
    let (fine, n1) = run(10);
    let (coarse, n2) = run(7);
    let err = (fine - coarse).abs();
    Ok(QuadratureResult {
        value: fine,
        error_estimate: err,
        evaluations: n1 + n2,
        converged: err <= 1e-4 * fine.abs(),
    })
}

/// One `(σ, τ)` term of the continuum exchange energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtmTerm {
    pub sigma: usize,
    pub tau: usize,
    /// Codimension of the fixed sets of `σ` and `τ` (0 for the identity and
    /// for translations).
    pub codim: (usize, usize),
    /// `w_σ w_τ` (`det(στ)` for Dirichlet).
    pub weight: f64,
    /// `E_{σ,τ}(λ) = ∫∫_{Ω_λ²} h_n(|r−σ_λr'|) h_n(|r−τ_λr'|) |r−r'|^{-s}`.
    pub value: QuadratureResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtmExchange {
    pub total: QuadratureResult,
    /// `ω_n² λ^s / (2π)^{2n}`: `total = prefactor · Σ weight · value` with
    /// off-diagonal terms counted twice.
    pub prefactor: f64,
    /// Pairs with `sigma ≤ tau`.
    pub terms: Vec<CtmTerm>,
}

impl CtmExchange {
    pub fn term(&self, sigma: usize, tau: usize) -> Option<&CtmTerm> {
        let (a, b) = (sigma.min(tau), sigma.max(tau));
        self.terms.iter().find(|t| t.sigma == a && t.tau == b)
    }
}

fn fixed_codim(q: &[f64], n: usize) -> usize {
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= q[i * n + j];
        }
    }
    m.rank(1e-9)
}

/// `E_x^ctm(λ)` together with every `(σ, τ)` term.
///
/// All terms come from one singular quasi-Monte Carlo pass. With
/// `Method::GaussTensor` on a rectangle the diagonal terms `σ = τ` are
/// replaced by deterministic values from [`ctm_diagonal_term_box`].
pub fn exchange_energy_ctm(
    domain: &Domain,
    bc: BoundaryCondition,
    lambda: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<CtmExchange> {
    let n = domain.dim();
    check_s(n, s)?;
    spec.validate()?;
    if !(lambda > 0.0) {
        return invalid("λ must be positive");
    }
    let kernel = ContinuumKernel::new(domain, bc)?;
    let m = kernel.terms.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let cell = domain.cell();
    let options = SingularOptions::ladder(cell.diameter, 1.0 / lambda);
    let width = pairs.len() + 1;
    let weights: Vec<f64> = kernel.terms.iter().map(|t| t.weight).collect();
    let est = pair_integral_singular_vec(
        cell,
        |r, rp, out| {
            let hv: Vec<f64> = (0..m).map(|i| kernel.term(i, lambda, r, rp)).collect();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                out[k] = hv[i] * hv[j];
            }
            let tot: f64 = hv.iter().zip(&weights).map(|(h, w)| h * w).sum();
            out[pairs.len()] = tot * tot;
        },
        width,
        s,
        spec,
        &options,
    )?;
    let scale_terms = lambda.powf(2.0 * n as f64 - s);
    let prefactor = omega(n).powi(2) * lambda.powf(s) / (2.0 * PI).powi(2 * n as i32);
    let mut terms: Vec<CtmTerm> = pairs
        .iter()
        .zip(&est)
        .map(|(&(i, j), r)| CtmTerm {
            sigma: i,
            tau: j,
            codim: (
                fixed_codim(&kernel.terms[i].isometry.q, n),
                fixed_codim(&kernel.terms[j].isometry.q, n),
            ),
            weight: weights[i] * weights[j],
            value: r.scale(scale_terms),
        })
        .collect();
    let mut total = est[pairs.len()].scale(prefactor * scale_terms);

    let sides = match domain {
        Domain::Polytope(p) => box_sides(p),
        Domain::Torus(_) => None,
    };
    if let (Method::GaussTensor, Some(sides), 2) = (spec.method, sides, n) {
        for t in terms.iter_mut().filter(|t| t.sigma == t.tau) {
            let q = &kernel.terms[t.sigma].isometry.q;
            let reflected: Vec<bool> = (0..n).map(|d| q[d * n + d] < 0.0).collect();
            t.value = ctm_diagonal_term_box(&sides, &reflected, lambda, s)?;
        }
        let mut value = 0.0;
        let mut var = 0.0;
        let mut evals = 0;
        for t in &terms {
            let mult = if t.sigma == t.tau { 1.0 } else { 2.0 };
            value += mult * t.weight * t.value.value;
            var += (mult * t.value.error_estimate).powi(2);
            evals += t.value.evaluations;
        }
        total = QuadratureResult {
            value: prefactor * value,
            error_estimate: prefactor * var.sqrt(),
            evaluations: evals,
            converged: terms.iter().all(|t| t.value.converged),
        };
    }
    Ok(CtmExchange { total, prefactor, terms })
}

/// `∫_0^m (q² + w²)^{-s/2} dw`.
fn riesz_segment(q: f64, m: f64, s: f64) -> Result<f64> {
    if m <= 0.0 {
        return Ok(0.0);
    }
    if q <= 0.0 {
        return Ok(m.powf(1.0 - s) / (1.0 - s));
    }
    let x = m / q;
    if (s - 1.0).abs() < 1e-14 {
        return Ok(x.asinh());
    }
    if x > 1e6 {
        // ∫_0^∞ − ∫_m^∞ with the first correction dropped (relative O(x^{-2}))
        let c = PI.sqrt() * gamma(0.5 * (s - 1.0)) / (2.0 * gamma(0.5 * s));
        return Ok(m.powf(1.0 - s) / (1.0 - s) + q.powf(1.0 - s) * c);
    }
    let z = x * x / (1.0 + x * x);
    Ok(m * q.powf(-s) / (1.0 + x * x).sqrt() * hyp2f1(0.5, 0.5 * (3.0 - s), 1.5, z)?)
}

/// `∫∫_{[0,m₁]×[0,m₂]} |w|^{-s} dw` for `s < 2`.
fn riesz_rectangle(m1: f64, m2: f64, s: f64) -> Result<f64> {
    if m1 <= 0.0 || m2 <= 0.0 {
        return Ok(0.0);
    }
    // polar coordinates on the two triangles, then ξ = tan θ
    let a = m1.powf(2.0 - s) * riesz_segment(1.0, m2 / m1, s)?;
    let b = m2.powf(2.0 - s) * riesz_segment(1.0, m1 / m2, s)?;
    Ok((a + b) / (2.0 - s))
}

/// Deterministic diagonal term `E_{σ,σ}(λ)` on a rectangle with sides
/// `sides`, where `reflected[d]` says whether `σ` reflects axis `d`. Only
/// the set of reflected axes matters.
///
/// With `u = x − x'` on plain axes and `y = x + x' − 2·(face)` on reflected
/// ones, the term is
/// `∫ h(λ|(u_A, y_C)|)² Π_A 2(L−u) Φ(|u_A|; m(y_C)) du_A dy_C`, where the
/// `u` of reflected axes has been integrated out exactly:
/// `Φ = ∫_{Π[0, m_d]} (|u_A|² + |w|²)^{-s/2} dw`, `m(y) = min(y, 2L − y)`.
/// The result is scaled to the dilated domain `Ω_λ`.
pub fn ctm_diagonal_term_box(sides: &[f64], reflected: &[bool], lambda: f64, s: f64) -> Result<QuadratureResult> {
    if sides.len() != 2 || reflected.len() != 2 {
        return Err(Error::Unsupported("deterministic continuum terms are implemented for rectangles".into()));
    }
    check_s(2, s)?;
    let width = 1.5 / lambda;
    let run = |order: usize| -> Result<(f64, usize)> {
        let gl = GaussLegendre::new(order);
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..2)
            .map(|d| {
                let l = sides[d];
                if reflected[d] {
                    gl.on_breaks(&graded_breaks(0.0, 2.0 * l, width, 10, 0.2, &[l]))
                } else {
                    gl.on_breaks(&graded_breaks(0.0, l, width, 14, 0.2, &[]))
                }
            })
            .collect();
        let (x0, w0) = &rules[0];
        let (x1, w1) = &rules[1];
        let rows: Vec<Result<f64>> = x0
            .par_iter()
            .zip(w0)
            .map(|(&a, &wa)| {
                let mut vals = Vec::with_capacity(x1.len());
                for (&b, &wb) in x1.iter().zip(w1) {
                    let comp = [a, b];
                    let mut weight = wa * wb;
                    let mut q2 = 0.0;
                    let mut ms = Vec::with_capacity(2);
                    for d in 0..2 {
                        if reflected[d] {
                            ms.push(comp[d].min(2.0 * sides[d] - comp[d]));
                        } else {
                            weight *= 2.0 * (sides[d] - comp[d]);
                            q2 += comp[d] * comp[d];
                        }
                    }
                    let q = q2.sqrt();
                    let phi = match ms.len() {
                        0 => q.powf(-s),
                        1 => riesz_segment(q, ms[0], s)?,
                        _ => riesz_rectangle(ms[0], ms[1], s)?,
                    };
                    let h = h_index(2, lambda * a.hypot(b));
                    vals.push(weight * h * h * phi);
                }
                Ok(pairwise_sum(&vals))
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<f64>>>()?;
        Ok((pairwise_sum(&rows), x0.len() * x1.len()))
    };
    let (fine, n1) = run(8)?;
    let (coarse, n2) = run(6)?;
    let scale = lambda.powf(4.0 - s);
    let err = (fine - coarse).abs();
    Ok(QuadratureResult {
        value: fine * scale,
        error_estimate: err * scale,
        evaluations: n1 + n2,
        converged: err <= 1e-6 * fine.abs(),
    })
}
