//! Tight worst-case bounds on `E_Q[rho] + Var_Q[phi]` over f-divergence
//! balls `{Q : D_f(Q, P) <= eta}` around an empirical baseline `P`.
//!
//! The supremum over measures is computed through a three-variable convex
//! dual (see [`dual`]), minimized by [`solver`]. [`oracle`] evaluates the
//! primal problem by exhaustive search on two- and three-atom spaces and is
//! kept independent of the dual code. [`robust`] wraps the bound in an outer
//! minimization over a low-dimensional decision vector.
//!
//! ```
//! use drovar_core::{solver, EmpiricalMeasure, FDivergenceFamily, ProblemData, SolverConfig};
//!
//! let p = EmpiricalMeasure::new(vec![0.8, 0.2]).unwrap();
//! let data = ProblemData::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
//! let family = FDivergenceFamily::alpha(2.0).unwrap();
//! let bound = solver::variance_bound(&data, &p, &family, 0.08, &SolverConfig::default()).unwrap();
//! assert!((bound.value - 0.2304).abs() < 1e-4);
//! ```
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]
// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod divergences;
pub mod dual;
pub mod error;
pub mod ext;
pub mod math;
pub mod measures;
pub mod oracle;
pub mod robust;
pub mod solver;

pub use divergences::{FDivergenceFamily, FamilyKind};
pub use dual::{ConjugatePair, Diagnostics, DualPoint, DualProblem, Gradient, SquarePair, TiltResult};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use measures::{EmpiricalMeasure, ProblemData};
pub use oracle::OracleConfig;
pub use robust::{DecisionConstraint, ScenarioMatrix};
pub use solver::{BoundResult, SolverConfig, Status};
