//! Exact eigenbases, the spectral function `S_λ`, its continuum model,
//! eigenvalue counting and error scans.

pub mod basis;
pub mod continuum;
pub mod poisson;
pub mod scan;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{make_polytope, Lattice, Polytope};
use crate::specfun::omega;

pub use basis::{enumerate_modes, enumerate_modes_with_budget, Mode, ModeKind, SpectrumEnumeration, TIE_TOL};
pub use continuum::{s_ctm, ContinuumKernel, ContinuumTerm};
pub use poisson::{poisson_check, PoissonCheck, TestFunction};
pub use scan::{error_scan, log_slope, weyl_residual, weyl_window_average, ErrorRecord, ErrorScan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "dir" => Ok(Self::Dirichlet),
            "neumann" | "neu" => Ok(Self::Neumann),
            "periodic" | "per" => Ok(Self::Periodic),
            _ => invalid(format!("unknown boundary condition '{s}'")),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Periodic => "periodic",
        })
    }
}

/// A polytope with Dirichlet/Neumann conditions or a lattice cell with
/// periodic ones.
#[derive(Debug, Clone)]
pub enum Domain {
    Polytope(Polytope),
    Torus(Lattice),
}

impl Domain {
    /// Polytope fixtures by tag, plus `torus` (side lengths, default unit
    /// square) and `lattice` (row-major basis).
    pub fn from_fixture(kind: &str, parameters: &[f64]) -> Result<Domain> {
        match kind {
            "torus" => {
                let sides = if parameters.is_empty() { vec![1.0, 1.0] } else { parameters.to_vec() };
                if sides.len() < 2 || sides.iter().any(|&s| !(s > 0.0)) {
                    return invalid("torus needs at least two positive side lengths");
                }
                let n = sides.len();
                let basis = (0..n).map(|i| (0..n).map(|j| if i == j { sides[i] } else { 0.0 }).collect()).collect();
                Ok(Domain::Torus(Lattice::new(basis)?))
            }
            "lattice" => {
                let n = (parameters.len() as f64).sqrt().round() as usize;
                if n * n != parameters.len() {
                    return invalid("lattice takes n² basis entries");
                }
                Ok(Domain::Torus(Lattice::new(parameters.chunks(n).map(|c| c.to_vec()).collect())?))
            }
            _ => Ok(Domain::Polytope(make_polytope(kind, parameters)?)),
        }
    }

    pub fn dim(&self) -> usize {
        self.cell().dim
    }

    /// The polytope itself, or the lattice's fundamental cell.
    pub fn cell(&self) -> &Polytope {
        match self {
            Domain::Polytope(p) => p,
            Domain::Torus(l) => &l.cell,
        }
    }

    pub fn volume(&self) -> f64 {
        self.cell().volume
    }

    /// `|∂Ω|`; zero for a torus, which has no boundary.
    pub fn boundary_measure(&self) -> f64 {
        match self {
            Domain::Polytope(p) => p.boundary_measure,
            Domain::Torus(_) => 0.0,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Torus(_))
    }

    pub fn check_bc(&self, bc: BoundaryCondition) -> Result<()> {
        match (self, bc) {
            (Domain::Torus(_), BoundaryCondition::Periodic) => Ok(()),
            (Domain::Polytope(_), BoundaryCondition::Dirichlet | BoundaryCondition::Neumann) => Ok(()),
            (Domain::Torus(_), _) => invalid("a lattice cell only supports periodic conditions"),
            (Domain::Polytope(_), _) => invalid("periodic conditions need a lattice domain"),
        }
    }
}

/// Weyl volume term `ω_n λⁿ |Ω| / (2π)ⁿ`.
pub fn weyl_volume_term(domain: &Domain, lambda: f64) -> f64 {
    let n = domain.dim() as i32;
    omega(domain.dim()) * lambda.powi(n) * domain.volume() / (2.0 * PI).powi(n)
}

/// Predicted limit of `(N(λ) − volume term)/λ^{n−1}`:
/// `∓ ω_{n−1}|∂Ω| / (4(2π)^{n−1})`, zero for periodic conditions.
pub fn weyl_surface_prediction(domain: &Domain, bc: BoundaryCondition) -> f64 {
    let n = domain.dim();
    let c = omega(n - 1) * domain.boundary_measure() / (4.0 * (2.0 * PI).powi(n as i32 - 1));
    match bc {
        BoundaryCondition::Dirichlet => -c,
        BoundaryCondition::Neumann => c,
        BoundaryCondition::Periodic => 0.0,
    }
}
