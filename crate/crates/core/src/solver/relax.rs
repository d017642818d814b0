use alloc::vec;

use super::{BbNode, MiqpModel};
use crate::error::{Error, Result};
use crate::numeric::{solve_qp, solve_qp_warm, QpProblem, QpResult, Status};

fn constant_term(model: &MiqpModel) -> f64 {
    model.y.iter().zip(&model.weights).map(|(y, w)| w * y * y).sum()
}

/// Least-squares problem over `z` with the `Γ` box and no order constraints.
pub(crate) fn base_problem(model: &MiqpModel) -> QpProblem {
    let mut qp = QpProblem::least_squares(&model.y, &model.weights);
    let (lo, hi) = model.z_bounds();
    for k in 0..model.n() {
        qp.bounds(k, lo, hi);
    }
    qp
}

pub(crate) fn push_arc(qp: &mut QpProblem, a: usize, b: usize) {
    let mut row = vec![0.0; qp.num_vars()];
    row[a] = 1.0;
    row[b] = -1.0;
    qp.leq(&row, 0.0);
}

pub(crate) fn finish(model: &MiqpModel, mut res: QpResult) -> Result<QpResult> {
    if res.status != Status::Optimal {
        return Err(Error::NumericalFailure(alloc::format!(
            "node relaxation ended with {:?}",
            res.status
        )));
    }
    res.objective = (res.objective + constant_term(model)).max(0.0);
    Ok(res)
}

/// Projection of the centered responses onto `{z : z_a ≤ z_b for (a, b) in arcs}`
/// intersected with the `Γ` box. Its objective (reported as a weighted sum of
/// squares) bounds every completion of a node whose fixed-zero indicators
/// imply these arcs.
pub fn order_relaxation(model: &MiqpModel, arcs: &[(usize, usize)], hint: &[usize]) -> Result<QpResult> {
    let mut qp = base_problem(model);
    for &(a, b) in arcs {
        push_arc(&mut qp, a, b);
    }
    finish(model, solve_qp_warm(&qp, hint)?)
}

/// Index of `u_ij` among the `n (n − 1)` indicators.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * (n - 1) + if j < i { j } else { j - 1 }
}

/// Continuous relaxation of the big-M model at `node`: indicators range over
/// `[0, 1]` unless fixed. Variables are ordered `z`, then `ξ_1..ξ_n`, then
/// `u` row by row. The objective is reported as `Σ w_k (Y_k − z_k)²` on the
/// centered responses.
pub fn qp_relaxation(node: &BbNode, model: &MiqpModel) -> Result<QpResult> {
    let n = model.n();
    let d = model.dim();
    let nz = n;
    let nxi = n * d;
    let nu = model.num_binaries();
    let nv = nz + nxi + nu;

    let mut diag = vec![0.0; nv];
    let mut linear = vec![0.0; nv];
    for k in 0..n {
        diag[k] = 2.0 * model.weights[k];
        linear[k] = -2.0 * model.weights[k] * model.y[k];
    }
    let mut qp = QpProblem::new(diag, linear);
    let (zlo, zhi) = model.z_bounds();
    for k in 0..n {
        qp.bounds(k, zlo, zhi);
    }
    let (glo, ghi) = model.xi_bounds();
    for k in nz..nz + nxi {
        qp.bounds(k, glo, ghi);
    }
    for k in nz + nxi..nv {
        qp.bounds(k, 0.0, 1.0);
    }
    let check = |i: usize, j: usize| -> Result<usize> {
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParams(alloc::format!("no indicator u[{i}][{j}]")));
        }
        Ok(nz + nxi + pair_index(n, i, j))
    };
    for &(i, j) in &node.fixed_zero {
        let k = check(i, j)?;
        qp.bounds(k, 0.0, 0.0);
    }
    for &(i, j) in &node.fixed_one {
        let k = check(i, j)?;
        if qp.upper[k] == 0.0 {
            return Err(Error::InvalidParams(alloc::format!("u[{i}][{j}] fixed to both values")));
        }
        qp.bounds(k, 1.0, 1.0);
    }

    let mut row = vec![0.0; nv];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let u = nz + nxi + pair_index(n, i, j);
            // z_j − z_i − M_z u_ij ≤ 0
            row.iter_mut().for_each(|r| *r = 0.0);
            row[j] = 1.0;
            row[i] = -1.0;
            row[u] = -model.m_z;
            qp.leq(&row, 0.0);
            // −ξ_jᵀ(X_i − X_j) + M_ξ u_ij ≤ M_ξ − ε
            row.iter_mut().for_each(|r| *r = 0.0);
            let (xi, xj) = (model.points.point(i), model.points.point(j));
            for k in 0..d {
                row[nz + j * d + k] = -(xi[k] - xj[k]);
            }
            row[u] = model.m_xi;
            qp.leq(&row, model.m_xi - model.eps);
        }
    }
    finish(model, solve_qp(&qp)?)
}
