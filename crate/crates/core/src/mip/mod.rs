//! MILP model representation, indicator rewriting, LP-format I/O and a
//! small branch-and-bound solver.

mod bigm;
mod lp_format;
mod model;
mod solver;

pub use bigm::{complement_name, to_bigm, BigMError, BigMVariant};
pub use lp_format::{export_lp_format, import_lp_format, is_legal_name, LpFormatError};
pub use model::{Constraint, Indicator, Model, ModelError, Terms, VarKind, Variable};
pub use solver::{
    relaxation_bound, solve_mip, Cut, MipConfig, MipError, MipSolution, MipStatus, NoCallbacks, SolveCallbacks,
};
