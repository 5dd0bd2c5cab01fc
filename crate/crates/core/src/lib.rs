//! Maintenance scheduling with a quantile risk objective.
//!
//! The objective at each timestep is the τ-quantile of the scenario risks,
//! which is neither convex nor concave in the schedule. The crate provides
//! two families of valid inequalities for it ([`polyhedral_cuts`] on the
//! continuous risks, [`subset_cuts`] on the binary schedule), a small MILP
//! engine to use them in ([`lp`], [`mip`]), and six solution methods built on
//! top ([`methods`]).
//!
//! ```
//! use quantcut::instance::{generate_synthetic, GeneratorParams};
//! use quantcut::methods::{solve_method, Method, MethodConfig};
//!
//! let inst = generate_synthetic(&GeneratorParams::default(), 3).instance;
//! let result = solve_method(&inst, &MethodConfig::new(Method::CGenS)).unwrap();
//! assert_eq!(result.gap_percent, Some(0.0));
//! ```

pub mod cli;
pub mod cut;
pub mod instance;
pub mod lp;
pub mod methods;
pub mod mip;
pub mod polyhedral_cuts;
pub mod quantile;
pub mod subset_cuts;
