//! Exchange energies, semi-local functionals, asymptotic fits and the GGA
//! constraint auditor.

mod exchange;
mod fit;
mod gga;
mod parser;
mod semilocal;

pub use exchange::{
    ctm_diagonal_term_box, exchange_energy, exchange_energy_ctm, exchange_energy_difference, CtmExchange, CtmTerm,
};
pub use fit::{fit_two_term, AsymptoticFit, MAX_CONDITION};
pub use gga::{gga_bisect, gga_constraint, gga_rhs, GgaAudit, GgaRoot};
pub use parser::{parse_enhancement, parse_expr, BinOp, EnhancementFactor, Expr, Func, S_MAX};
pub use semilocal::{semilocal_value, semilocal_value_ctm, Growth, SemiLocalIntegrand, DENSITY_FLOOR};
