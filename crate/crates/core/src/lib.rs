//! Spectral functions of the Laplacian on tessellating polytopes and lattice
//! cells, the two-term asymptotics of exchange and semi-local functionals
//! built from them, and the numerical machinery needed to evaluate both.
//!
//! Module map:
//!
//! * [`specfun`]: ball kernel `h_n`, sphere transform, Bessel `J_ν`.
//! * [`quad`]: oscillatory, tensor, quasi-Monte Carlo and singular pair quadrature.
//! * [`geometry`]: polytopes, isometries, reflection groups, lattices.
//! * [`spectral`]: exact eigenbases, `S_λ`, its continuum model, error scans.
//! * [`coefficients`]: the asymptotic constants `c_x1`, `c_fs`, `c_bl`, boundary profiles.
//! * [`functionals`]: exchange energy, semi-local functionals, fits, GGA audit, parser.

pub mod coefficients;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod quad;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};

/// Number of worker threads requested through `POLYSPEC_THREADS`, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("POLYSPEC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}
