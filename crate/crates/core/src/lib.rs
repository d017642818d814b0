//! Least-squares regression under quasiconvexity and monotonicity constraints.
//!
//! The fitted values of the estimator are the projection of the responses onto
//! the (non-convex) set of vectors that some quasiconvex, optionally monotone,
//! function can take at the design points. That projection is computed as a
//! big-M mixed-integer quadratic program solved by branch-and-bound, with
//! every candidate certified by `n` convex-hull membership linear programs.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `std` feature adds wall-clock timing and parallel evaluation
//! of sibling nodes in the search tree.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod estimator;
pub mod feasibility;
pub(crate) mod float;
pub mod geometry;
pub mod isotonic;
pub mod numeric;
pub mod oracle;
pub mod shape;
pub mod solver;
pub mod synth;

pub use data::DataSet;
pub use error::{Error, Result};
pub use estimator::{fit, fit_isotonic, predict, EstimatorKind, FittedModel};
pub use feasibility::{check, violating_constraints, FeasibilityReport, Witness};
pub use geometry::{in_hull, in_lower_hull, in_upper_hull, HullKind, PointSet};
pub use shape::{Curvature, Monotonicity, ShapeSpec};
pub use solver::{build_model, solve, MiqpModel, SolveStatus, SolverParams, ThetaSolution};
