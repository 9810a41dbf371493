//! Numerical integration: 1D rules, oscillatory half-line integrals,
//! randomized quasi-Monte Carlo and singular pair integrals.

pub mod accel;
pub mod osc;
pub mod qmc;
pub mod rules;
pub mod singular;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use accel::{euler_average, levin_u, pairwise_sum, wynn_epsilon};
pub use osc::{integrate_osc_from, integrate_osc_semiinfinite};
pub use qmc::{qmc_integrate, shifted_means, shifted_means_vec, Kronecker, MAX_QMC_DIM};
pub use rules::{gauss_legendre, graded_breaks, tanh_sinh, GaussLegendre, TanhSinh};
pub use singular::{pair_integral_singular, pair_integral_singular_vec, pair_integral_singular_with, SingularOptions};

pub const DEFAULT_SEED: u64 = 0xFE121;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GaussTensor,
    Qmc,
    OscPartition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub method: Method,
    /// Target relative tolerance.
    pub tolerance: f64,
    pub max_evaluations: usize,
    pub seed: u64,
    /// Number of random QMC shifts (at least 8 are always used).
    pub shifts: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: Method::OscPartition,
            tolerance: 1e-10,
            max_evaluations: 1_000_000,
            seed: DEFAULT_SEED,
            shifts: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn qmc(max_evaluations: usize) -> Self {
        Self {
            method: Method::Qmc,
            tolerance: 1e-3,
            max_evaluations,
            ..Self::default()
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return invalid("tolerance must be positive");
        }
        if self.max_evaluations < 1000 {
            return invalid("max_evaluations must be at least 1000");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// `self · c` with the error scaled alike.
    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            ..self
        }
    }
}
