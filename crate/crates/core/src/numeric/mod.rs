//! Dense linear- and quadratic-programming kernels.
//!
//! Both solvers are deterministic: identical inputs give bit-identical
//! outputs. Problems here are small (at most a few hundred variables), so
//! everything is stored densely.

mod lp;
mod matrix;
mod order;
mod qp;

pub use lp::{solve_lp, LpProblem, LpResult};
pub use matrix::DenseMatrix;
pub use order::project_order;
pub use qp::{solve_qp, solve_qp_warm, QpProblem, QpResult};

/// Feasibility tolerance reported for LP solutions.
pub const LP_TOL: f64 = 1e-9;
/// Phase-one objective above which an LP is declared infeasible.
pub const PHASE_ONE_TOL: f64 = 1e-7;
/// KKT tolerance of the QP solver.
pub const QP_TOL: f64 = 1e-8;

/// Termination status shared by the LP and QP kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

