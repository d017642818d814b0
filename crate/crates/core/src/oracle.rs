//! Exhaustive reference solver for tiny instances.
//!
//! For each point `j` it enumerates the sets `T` of other points that some
//! sign-constrained `ξ` separates from `X_j` (`ξᵀ(X_i − X_j) ≥ δ` on `T`).
//! Choosing such a `T_j` for every `j` leaves the convex problem
//! `min SSE s.t. z_j ≤ z_i for i ∉ T_j`. Separable sets are closed under
//! subsets, and shrinking `T_j` only adds constraints, so only maximal sets
//! need to be tried.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::feasibility::{max_separation, separator_box};
use crate::numeric::{solve_qp, QpProblem, Status};
use crate::shape::{Curvature, ShapeSpec};

/// Largest instance accepted by [`brute_force`].
pub const MAX_N: usize = 6;
/// Separation margin standing in for strict inequality.
pub const DELTA: f64 = 1e-9;
/// Objectives within this distance of the best count as optimal.
pub const OPT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    /// Distinct optimal fitted vectors.
    pub thetas: Vec<Vec<f64>>,
    /// Indicator matrices reaching the optimum: `u[i][j]` means `i ∈ T_j`.
    pub assignments: Vec<Vec<Vec<bool>>>,
}

fn maximal_separable_sets(data: &DataSet, j: usize, bounds: (f64, f64)) -> Result<Vec<Vec<usize>>> {
    let n = data.len();
    let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let m = others.len();
    let mut ok = vec![false; 1 << m];
    for mask in 0..1usize << m {
        let t: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
        ok[mask] = t.is_empty() || max_separation(&data.x, j, &t, bounds)?.1 >= DELTA;
    }
    Ok((0..1usize << m)
        .filter(|&mask| ok[mask] && (0..m).all(|b| mask >> b & 1 == 1 || !ok[mask | 1 << b]))
        .map(|mask| (0..m).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect())
        .collect())
}

/// Global least-squares fit by enumeration. Fails with [`Error::TooLarge`]
/// above [`MAX_N`] points.
pub fn brute_force(data: &DataSet, shape: ShapeSpec) -> Result<OracleResult> {
    data.validate()?;
    let n = data.len();
    if n > MAX_N {
        return Err(Error::TooLarge { n, cap: MAX_N });
    }
    let (sign, mono) = match shape.curvature {
        Curvature::Quasiconvex => (1.0, shape.monotonicity),
        Curvature::Quasiconcave => (-1.0, shape.monotonicity.flipped()),
    };
    let bounds = separator_box(ShapeSpec::new(Curvature::Quasiconvex, mono).hull_kind(), 1.0);
    let y: Vec<f64> = data.y.iter().map(|v| sign * v).collect();
    let gamma = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let choices: Vec<Vec<Vec<usize>>> =
        (0..n).map(|j| maximal_separable_sets(data, j, bounds)).collect::<Result<_>>()?;

    let mut best = f64::INFINITY;
    let mut found: Vec<(f64, Vec<f64>, Vec<Vec<bool>>)> = Vec::new();
    let mut pick = vec![0usize; n];
    loop {
        let mut qp = QpProblem::least_squares(&y, &data.weights);
        for k in 0..n {
            qp.bounds(k, -gamma, gamma);
        }
        let mut u = vec![vec![false; n]; n];
        let mut row = vec![0.0; n];
        for j in 0..n {
            let t = &choices[j][pick[j]];
            for i in 0..n {
                if i == j {
                    continue;
                }
                if t.contains(&i) {
                    u[i][j] = true;
                } else {
                    // z_j ≤ z_i
                    row[j] = 1.0;
                    row[i] = -1.0;
                    qp.leq(&row, 0.0);
                    row[j] = 0.0;
                    row[i] = 0.0;
                }
            }
        }
        let res = solve_qp(&qp)?;
        if res.status != Status::Optimal {
            return Err(Error::NumericalFailure("oracle QP failed".into()));
        }
        let sse: f64 = y
            .iter()
            .zip(&res.x)
            .zip(&data.weights)
            .map(|((a, b), w)| w * (a - b) * (a - b))
            .sum();
        if sse < best + OPT_TOL {
            best = best.min(sse);
            found.push((sse, res.x, u));
        }

        // Next combination, mixed radix.
        let mut k = 0;
        while k < n {
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    let mut thetas: Vec<Vec<f64>> = Vec::new();
    let mut assignments = Vec::new();
    for (sse, z, u) in found {
        if sse > best + OPT_TOL {
            continue;
        }
        let theta: Vec<f64> = z.iter().map(|v| sign * v).collect();
        let known = thetas
            .iter()
            .any(|t| t.iter().zip(&theta).all(|(a, b)| (a - b).abs() < 1e-6));
        if !known {
            thetas.push(theta);
        }
        assignments.push(u);
    }
    Ok(OracleResult { objective: best, thetas, assignments })
}
