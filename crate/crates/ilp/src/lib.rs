//! Exact linear and integer programming for small models.
//!
//! Everything is computed over arbitrary-precision rationals, so answers are
//! exact and every returned point is checked by substitution before it leaves
//! the crate. Intended for models with tens of variables, not thousands.
//!
//! ```
//! use exact_ilp::{ilp_feasible, rat, LinearModel, Relation, Solution};
//!
//! let mut m = LinearModel::new("demo");
//! let x = m.add_var("x", true);
//! let y = m.add_var("y", true);
//! m.add_int_constraint("c", &[(x, 2), (y, 2)], Relation::Eq, 6);
//! m.add_int_constraint("d", &[(x, 1)], Relation::Ge, 2);
//! let out = ilp_feasible(&m, 100).unwrap();
//! assert!(matches!(out.solution, Solution::Feasible { .. }));
//! assert!(out.point().unwrap()[0] >= rat(2));
//! ```

mod lp_format;
mod model;
mod simplex;
mod solve;

pub use lp_format::export_lp;
pub use model::{rat, Constraint, LinearModel, Objective, Relation, Sense, VarId, Variable};
pub use num_rational::BigRational;
pub use solve::{ilp_feasible, lp_solve, IlpError, Solution, SolveOutcome};
