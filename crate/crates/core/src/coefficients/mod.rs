//! Constants of the two-term expansions: the bulk exchange constant `c_x1`,
//! the finite-size and boundary-layer constants `c_fs`, `c_bl`, the
//! semi-local boundary profile `(ν₀, ν₁)` and the surface coefficient
//! `c(f, Ω)`.
//!
//! All constants are reduced analytically to one-dimensional integrals.
//! With `P = ω_n²/(2π)^{2n}` and `J(a) = ∫₀^∞ R^{n−s} h_n(R) h_n(aR) dR`:
//!
//! * `c_x1 = P · nω_n ∫₀^∞ h_n(t)² t^{n−1−s} dt`,
//! * `c_fs = −P · ω_{n−1} J(1)` (polar coordinates, `∫_{S^{n−1}} |θ_n| = 2ω_{n−1}`),
//! * `c_bl = P (n−1)ω_{n−1} ∫₀¹ a^{1−s} w(a) [J(1) ∓ 2J(a)] da` (− Dirichlet,
//!   + Neumann), where `w(a) = ∫₀^{π/2} (a cos ψ)^{n−2} / √(1 − a² cos² ψ) dψ`.
//!
//! The last form comes from writing the cylindrical variables
//! `(|π_n z|, z_n, w_n)` as `(aR cos ψ, aR sin ψ, R √(1 − a² cos² ψ))`, so
//! that `|(π_n z, w_n)| = R` and `|z| = aR`. `J(a)` has a closed form
//! (Weber–Schafheitlin) through `₂F₁`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::SemiLocalIntegrand;
use crate::geometry::Polytope;
use crate::quad::{integrate_osc_semiinfinite, tanh_sinh, QuadratureResult, QuadratureSpec};
use crate::spectral::BoundaryCondition;
use crate::specfun::{gamma, h_index, hdot_unchecked, hyp2f1, omega};

/// `ω_n² / (2π)^{2n}`.
fn pair_prefactor(n: usize) -> f64 {
    omega(n).powi(2) / (2.0 * PI).powi(2 * n as i32)
}

fn check_ns(n: usize, s: f64, min_n: usize) -> Result<()> {
    if n < min_n {
        return invalid(format!("dimension must be at least {min_n}, got {n}"));
    }
    if !(s > 0.0 && s < n as f64) {
        return invalid(format!("s must lie in (0,n), got s = {s} with n = {n}"));
    }
    Ok(())
}

/// `c_x1(n, s)`, by oscillatory quadrature of the radial integral.
///
/// Close to `s = n` the integrand behaves like `t^{−1}` at the origin; the
/// result then comes back with `converged = false`.
pub fn c_x1(n: usize, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_ns(n, s, 1)?;
    spec.validate()?;
    let nw = n as f64 * omega(n);
    let e = n as f64 - 1.0 - s;
    let r = integrate_osc_semiinfinite(|t| if t > 0.0 { h_index(n, t).powi(2) * t.powf(e) } else { 0.0 }, PI, spec);
    Ok(r.scale(pair_prefactor(n) * nw))
}

/// `c_fs(n, s) = −P ω_{n−1} ∫₀^∞ R^{n−s} h_n(R)² dR`.
pub fn c_fs(n: usize, s: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_ns(n, s, 2)?;
    spec.validate()?;
    let e = n as f64 - s;
    let r = integrate_osc_semiinfinite(|t| h_index(n, t).powi(2) * t.powf(e), PI, spec);
    Ok(r.scale(-pair_prefactor(n) * omega(n - 1)))
}

/// `J(a) = ∫₀^∞ R^{n−s} h_n(R) h_n(aR) dR` for `0 ≤ a ≤ 1`, in closed form:
/// `K_s · ₂F₁(ν + (1−s)/2, (1−s)/2; ν+1; a²)`, `ν = n/2`.
pub fn radial_overlap(n: usize, s: f64, a: f64) -> Result<f64> {
    check_ns(n, s, 1)?;
    if !(0.0..=1.0).contains(&a) {
        return invalid(format!("radial_overlap needs 0 <= a <= 1, got {a}"));
    }
    let nu = n as f64 / 2.0;
    let c2 = (2f64.powf(nu) * gamma(nu + 1.0)).powi(2);
    let k = c2 * gamma(nu + 0.5 * (1.0 - s)) / (2f64.powf(s) * gamma(0.5 * (1.0 + s)) * gamma(nu + 1.0));
    Ok(k * hyp2f1(nu + 0.5 * (1.0 - s), 0.5 * (1.0 - s), nu + 1.0, a * a)?)
}

/// `w(a)`; `one_minus_a` is passed separately to keep precision near `a = 1`.
fn tilt_weight(n: usize, a: f64, one_minus_a: f64) -> f64 {
    match n {
        2 => {
            // complete elliptic K(a) by the arithmetic-geometric mean
            let (mut x, mut y) = (1.0f64, (one_minus_a * (1.0 + a)).sqrt());
            for _ in 0..60 {
                if (x - y).abs() <= 1e-16 * x {
                    break;
                }
                (x, y) = (0.5 * (x + y), (x * y).sqrt());
            }
            0.5 * PI / x
        }
        3 => 0.5 * ((1.0 + a) / one_minus_a).ln(),
        _ => {
            let p = n as i32 - 2;
            tanh_sinh(0.0, 0.5 * PI, 1e-13, 12, |psi, _, d| {
                // cos ψ = sin(π/2 − ψ); 1 − a² cos² ψ written without cancellation
                let c = d.sin();
                let q = one_minus_a * (1.0 + a) + a * a * psi.sin().powi(2);
                (a * c).powi(p) / q.sqrt()
            })
            .value
        }
    }
}

/// `c_bl(n, s, bc)`. Periodic is exactly zero.
pub fn c_bl(n: usize, s: f64, bc: BoundaryCondition, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_ns(n, s, 2)?;
    spec.validate()?;
    let sign = match bc {
        BoundaryCondition::Periodic => return Ok(QuadratureResult::exact(0.0)),
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
    };
    let j1 = radial_overlap(n, s, 1.0)?;
    let mut failure: Option<Error> = None;
    let tol = spec.tolerance.max(1e-13);
    let ts = tanh_sinh(0.0, 1.0, tol, 12, |a, da, db| {
        let ja = match radial_overlap(n, s, a) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        da.powf(1.0 - s) * tilt_weight(n, a, db) * (j1 + sign * 2.0 * ja)
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let c = pair_prefactor(n) * (n as f64 - 1.0) * omega(n - 1);
    Ok(QuadratureResult {
        value: ts.value,
        error_estimate: ts.error,
        evaluations: ts.evaluations,
        converged: ts.converged,
    }
    .scale(c))
}

/// All exchange constants for one `(n, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeConstants {
    pub n: usize,
    pub s: f64,
    pub c_x1: QuadratureResult,
    pub c_fs: QuadratureResult,
    pub c_bl_dir: QuadratureResult,
    pub c_bl_neu: QuadratureResult,
    pub c_bl_per: QuadratureResult,
}

impl ExchangeConstants {
    pub fn compute(n: usize, s: f64, spec: &QuadratureSpec) -> Result<Self> {
        Ok(Self {
            n,
            s,
            c_x1: c_x1(n, s, spec)?,
            c_fs: c_fs(n, s, spec)?,
            c_bl_dir: c_bl(n, s, BoundaryCondition::Dirichlet, spec)?,
            c_bl_neu: c_bl(n, s, BoundaryCondition::Neumann, spec)?,
            c_bl_per: c_bl(n, s, BoundaryCondition::Periodic, spec)?,
        })
    }

    pub fn c_bl(&self, bc: BoundaryCondition) -> QuadratureResult {
        match bc {
            BoundaryCondition::Dirichlet => self.c_bl_dir,
            BoundaryCondition::Neumann => self.c_bl_neu,
            BoundaryCondition::Periodic => self.c_bl_per,
        }
    }

    /// `c_fs + c_bl(bc)`, the coefficient of `λ^{n−1+s}|∂Ω|`.
    pub fn surface(&self, bc: BoundaryCondition) -> f64 {
        self.c_fs.value + self.c_bl(bc).value
    }

    pub fn converged(&self) -> bool {
        [self.c_x1, self.c_fs, self.c_bl_dir, self.c_bl_neu].iter().all(|r| r.converged)
    }
}

/// Closed forms for `(n, s) = (3, 1)`: `(c_x1, c_fs, c_bl^Dir)`.
pub fn coulomb_3d_reference() -> (f64, f64, f64) {
    let pi2 = PI * PI;
    (1.0 / (4.0 * PI * pi2), -1.0 / (24.0 * pi2), -(2f64.ln()) / (12.0 * pi2))
}

/// Dirac constant `c_x = (3/4)(3/π)^{1/3}`.
pub fn dirac_constant() -> f64 {
    0.75 * (3.0 / PI).cbrt()
}

/// The densities entering the semi-local expansion near a flat boundary:
/// `ν₀ = c(1, 0)` in the bulk and `ν₁(τ) = c(h_n(2τ), 2ḣ_n(2τ) n)` at depth
/// `τ` below a face with inward normal `n`, where `c = 2ω_n/(2π)ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub n: usize,
    pub scale: f64,
}

impl BoundaryProfile {
    /// `ν₀ ∈ ℝ^{1+n}`.
    pub fn nu0(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1 + self.n];
        v[0] = self.scale;
        v
    }

    /// Scalar part and normal component of `ν₁(τ)`.
    pub fn nu1(&self, tau: f64) -> (f64, f64) {
        let t = 2.0 * tau.abs();
        (self.scale * h_index(self.n, t), self.scale * 2.0 * hdot_unchecked(self.n, t))
    }

    /// `ν₁(τ)` as a vector of `ℝ^{1+n}` for the given inward normal.
    pub fn nu1_vector(&self, tau: f64, normal: &[f64]) -> Vec<f64> {
        let (a, g) = self.nu1(tau);
        let mut v = Vec::with_capacity(1 + self.n);
        v.push(a);
        v.extend(normal.iter().map(|c| g * c));
        v
    }
}

pub fn nu_profile(n: usize) -> Result<BoundaryProfile> {
    if n < 2 {
        return invalid("boundary profile needs n >= 2");
    }
    Ok(BoundaryProfile {
        n,
        scale: 2.0 * omega(n) / (2.0 * PI).powi(n as i32),
    })
}

/// `c(f, Ω) = Σ_faces |F| ∫₀^∞ f(ν₀ ∓ ν₁(τ, n_F)) − f(ν₀) dτ` (− Dirichlet,
/// + Neumann).
///
/// For isotropic `f` the inner integral is the same on every face and is
/// computed once.
pub fn semilocal_surface_coefficient(
    f: &SemiLocalIntegrand,
    omega: &Polytope,
    bc: BoundaryCondition,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let sign = match bc {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
        BoundaryCondition::Periodic => return invalid("periodic boundary conditions need a torus, not a polytope"),
    };
    let n = omega.dim;
    let profile = nu_profile(n)?;
    let nu0 = profile.nu0();
    let f0 = f.eval(nu0[0], &nu0[1..]);
    if !f0.is_finite() {
        return Err(Error::NonConvergence(format!("{}: f(ν₀) is not finite", f.name)));
    }
    let inner = |normal: &[f64]| -> Result<QuadratureResult> {
        let r = integrate_osc_semiinfinite(
            |tau| {
                let (a, g) = profile.nu1(tau);
                let b: Vec<f64> = normal.iter().map(|c| sign * g * c).collect();
                f.eval(nu0[0] + sign * a, &b) - f0
            },
            PI,
            spec,
        );
        if !r.value.is_finite() || !r.converged {
            return Err(Error::NonConvergence(format!(
                "{}: boundary-layer integral did not converge (value {:.3e} ± {:.1e})",
                f.name, r.value, r.error_estimate
            )));
        }
        Ok(r)
    };
    if f.isotropic {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        return Ok(inner(&e)?.scale(omega.boundary_measure));
    }
    let mut total = QuadratureResult::exact(0.0);
    for face in &omega.faces {
        let r = inner(&face.normal)?.scale(face.measure);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}
