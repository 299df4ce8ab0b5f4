//! # pb_core
//!
//! Kernel for 0–1 linear (pseudo-Boolean) constraints: literals, normalized
//! constraints, objectives, the cutting-planes rules, substitutions, and
//! slack-based unit propagation with reverse-unit-propagation checks.
//!
//! ```
//! use pb_core::{text::parse_constraint, rup_check};
//!
//! let a = parse_constraint("1 x1 1 x2 >= 1 ;").unwrap();
//! let b = parse_constraint("1 ~x2 >= 1 ;").unwrap();
//! assert_eq!(a.add(&b).to_string(), "1 x1 >= 1 ;");
//! assert!(rup_check([&a, &b], &parse_constraint("1 x1 >= 1 ;").unwrap()));
//! ```

mod assign;
mod constraint;
mod error;
mod lit;
mod objective;
mod propagate;
pub mod text;

pub use assign::{Assignment, SubstValue, Substitution};
pub use constraint::{LinearConstraint, Term};
pub use error::PbError;
pub use lit::{Lit, Namespace, Var};
pub use objective::Objective;
pub use propagate::{rup_check, unit_propagate, Propagation, Propagator};

pub use num_bigint::BigInt;
