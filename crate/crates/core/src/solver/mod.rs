//! Big-M mixed-integer quadratic program for the projection onto the
//! constraint set, solved by branch-and-bound.
//!
//! For canonical shapes (quasiconvex, decreasing or unconstrained) the model is
//!
//! ```text
//! min  Σ_k w_k (Y_k − z_k)²
//! s.t. z_j − z_i ≤ M_z u_ij                         i ≠ j
//!      ξ_jᵀ(X_i − X_j) ≥ M_ξ (u_ij − 1) + ε          i ≠ j
//!      u_ij ∈ {0, 1},  |z_k| ≤ Γ,  ξ_j ∈ [0, Ξ]^d  (or [−Ξ, Ξ]^d)
//! ```
//!
//! `u_ij = 0` forces `z_j ≤ z_i`; `u_ij = 1` lets `z_i < z_j` and instead asks
//! `ξ_j` to separate `X_j` from `X_i`.

mod relax;
mod search;

use alloc::format;
use alloc::vec::Vec;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::feasibility::separator_box;
use crate::geometry::{HullKind, PointSet};
use crate::shape::ShapeSpec;

pub use relax::{order_relaxation, qp_relaxation};
pub use search::solve;

/// Tuning knobs for [`build_model`]. `None` picks a data-driven default.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverParams {
    /// Big-M on the order constraints; default `2 (max Y − min Y) + 1`.
    pub big_m_z: Option<f64>,
    /// Big-M on the separation constraints; default `2 d (max coordinate range) + 1`
    /// in rescaled coordinates.
    pub big_m_xi: Option<f64>,
    /// Margin replacing the strict separation inequality; default `1e-6` times
    /// the largest pairwise sup-norm distance between rescaled design points.
    pub eps_strict: Option<f64>,
    /// Coordinate bound `Ξ` on each separating vector.
    pub xi_bound: f64,
    /// Bound on `|z_k|`; default `max_k |Y_k|`.
    pub gamma: Option<f64>,
    /// Absolute optimality gap; default `1e-7 n Var(Y)`, at least `1e-9`.
    pub gap: Option<f64>,
    pub max_nodes: usize,
    /// Evaluate sibling nodes concurrently (needs the `std` feature).
    pub parallel: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            big_m_z: None,
            big_m_xi: None,
            eps_strict: None,
            xi_bound: 1.0,
            gamma: None,
            gap: None,
            max_nodes: 200_000,
            parallel: true,
        }
    }
}

/// An instantiated MIQP over rescaled design points and centered responses.
#[derive(Debug, Clone, PartialEq)]
pub struct MiqpModel {
    /// Design points mapped coordinatewise onto `[0, 1]`.
    pub points: PointSet,
    /// Responses minus `y_center`.
    pub y: Vec<f64>,
    pub weights: Vec<f64>,
    pub shape: ShapeSpec,
    pub x_offset: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub y_center: f64,
    pub m_z: f64,
    pub m_xi: f64,
    pub eps: f64,
    pub xi_bound: f64,
    /// `Γ` in the units of the input responses.
    pub gamma: f64,
    pub gap: f64,
    pub max_nodes: usize,
    pub parallel: bool,
}

impl MiqpModel {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// One indicator per ordered pair `i ≠ j`.
    pub fn num_binaries(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1)
    }

    /// `z` plus one separating vector per point.
    pub fn num_continuous(&self) -> usize {
        self.n() + self.n() * self.dim()
    }

    pub fn hull_kind(&self) -> HullKind {
        self.shape.hull_kind()
    }

    /// Coordinate bounds of every `ξ_j`.
    pub fn xi_bounds(&self) -> (f64, f64) {
        separator_box(self.hull_kind(), self.xi_bound)
    }

    /// `|z + y_center| ≤ Γ` expressed on the centered scale.
    pub fn z_bounds(&self) -> (f64, f64) {
        (-self.gamma - self.y_center, self.gamma - self.y_center)
    }

    /// Maps a point onto the model's rescaled coordinates.
    pub fn rescale(&self, p: &[f64]) -> Vec<f64> {
        rescale_point(p, &self.x_offset, &self.x_scale)
    }
}

pub(crate) fn rescale_point(p: &[f64], offset: &[f64], scale: &[f64]) -> Vec<f64> {
    p.iter().zip(offset).zip(scale).map(|((v, o), s)| (v - o) / s).collect()
}

/// Affine map of each coordinate onto `[0, 1]` (constant coordinates map to 0).
pub(crate) fn unit_box_map(x: &PointSet) -> (Vec<f64>, Vec<f64>) {
    let d = x.dim();
    let mut lo = alloc::vec![f64::INFINITY; d];
    let mut hi = alloc::vec![f64::NEG_INFINITY; d];
    for p in x.iter() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let scale = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| if h > l { h - l } else { 1.0 })
        .collect();
    (lo, scale)
}

/// Builds the MIQP for data already in canonical orientation.
///
/// Duplicated design points should be merged beforehand (see
/// [`DataSet::aggregate_duplicates`]).
pub fn build_model(data: &DataSet, shape: ShapeSpec, params: &SolverParams) -> Result<MiqpModel> {
    data.validate()?;
    if !shape.is_canonical() {
        return Err(Error::InvalidParams(format!(
            "{shape} is not canonical; flip signs first"
        )));
    }
    let positive = |name: &str, v: Option<f64>| -> Result<()> {
        match v {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                Err(Error::InvalidParams(format!("{name} must be positive, got {v}")))
            }
            _ => Ok(()),
        }
    };
    positive("big_m_z", params.big_m_z)?;
    positive("big_m_xi", params.big_m_xi)?;
    positive("eps_strict", params.eps_strict)?;
    positive("xi_bound", Some(params.xi_bound))?;
    positive("gap", params.gap)?;
    if let Some(g) = params.gamma {
        if !(g >= 0.0) {
            return Err(Error::InvalidParams(format!("gamma must be nonnegative, got {g}")));
        }
    }

    let n = data.len();
    let d = data.dim();
    let (x_offset, x_scale) = unit_box_map(&data.x);
    let mut flat = Vec::with_capacity(n * d);
    for p in data.x.iter() {
        flat.extend(rescale_point(p, &x_offset, &x_scale));
    }
    let points = PointSet::from_flat(d, flat)?;

    let y_center = data.weighted_mean();
    let y: Vec<f64> = data.y.iter().map(|v| v - y_center).collect();
    let (ymin, ymax) = data
        .y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));

    let mut max_range: f64 = 0.0;
    for k in 0..d {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[k]), b.max(p[k])));
        max_range = max_range.max(hi - lo);
    }
    let mut spread: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dist = points
                .point(i)
                .iter()
                .zip(points.point(j))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            spread = spread.max(dist);
        }
    }
    let default_eps = if spread > 0.0 { 1e-6 * spread } else { 1e-6 };

    let mean_y = data.y.iter().sum::<f64>() / n as f64;
    let var_y = data.y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum::<f64>() / n as f64;

    Ok(MiqpModel {
        points,
        y,
        weights: data.weights.clone(),
        shape,
        x_offset,
        x_scale,
        y_center,
        m_z: params.big_m_z.unwrap_or(2.0 * (ymax - ymin) + 1.0),
        m_xi: params.big_m_xi.unwrap_or(2.0 * d as f64 * max_range + 1.0),
        eps: params.eps_strict.unwrap_or(default_eps),
        xi_bound: params.xi_bound,
        gamma: params
            .gamma
            .unwrap_or_else(|| data.y.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
        gap: params.gap.unwrap_or((1e-7 * n as f64 * var_y).max(1e-9)),
        max_nodes: params.max_nodes,
        parallel: params.parallel,
    })
}

/// Partial assignment of the indicators at a search-tree node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BbNode {
    /// Pairs `(i, j)` with `u_ij = 0`, i.e. `z_j ≤ z_i` enforced.
    pub fixed_zero: Vec<(usize, usize)>,
    /// Pairs `(i, j)` with `u_ij = 1`, i.e. `ξ_j` must separate `X_j` from `X_i`.
    pub fixed_one: Vec<(usize, usize)>,
    pub lower_bound: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SolveStatus {
    /// Proven optimal within the requested gap.
    Optimal,
    /// Search stopped at the node limit; the incumbent is feasible.
    NodeLimit,
}

/// Output of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSolution {
    /// Fitted values, in the units of the model's input responses.
    pub theta: Vec<f64>,
    /// Separating vectors `ξ_j`, in rescaled coordinates.
    pub xi: Vec<Vec<f64>>,
    /// `u[i][j]` is true iff `θ_i < θ_j`.
    pub u: Vec<Vec<bool>>,
    /// `Σ w_k (Y_k − θ_k)²`.
    pub objective: f64,
    pub lower_bound: f64,
    /// `objective − lower_bound`, never negative.
    pub gap: f64,
    pub nodes: usize,
    pub wall_ms: f64,
    pub status: SolveStatus,
    /// Smallest `ξ_jᵀ(X_i − X_j)` over pairs with `u_ij` set (`+∞` if none).
    pub min_margin: f64,
}

impl ThetaSolution {
    /// Fails with [`Error::NodeLimitExceeded`] unless the search proved optimality.
    pub fn require_optimal(self) -> Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::NodeLimit => Err(Error::NodeLimitExceeded { nodes: self.nodes, gap: self.gap }),
        }
    }

    /// Whether `(θ, ξ, u)` satisfies the big-M constraints of `model` to `tol`.
    pub fn satisfies_model(&self, model: &MiqpModel, tol: f64) -> bool {
        let n = model.n();
        let (lo, hi) = model.z_bounds();
        let c = model.y_center;
        for i in 0..n {
            let zi = self.theta[i] - c;
            if zi < lo - tol || zi > hi + tol {
                return false;
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let u = if self.u[i][j] { 1.0 } else { 0.0 };
                if self.theta[j] - self.theta[i] > model.m_z * u + tol {
                    return false;
                }
                let proj: f64 = self.xi[j]
                    .iter()
                    .zip(model.points.point(i).iter().zip(model.points.point(j)))
                    .map(|(g, (a, b))| g * (a - b))
                    .sum();
                if proj < model.m_xi * (u - 1.0) + model.eps - tol {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn example() -> DataSet {
        DataSet::from_rows(
            &[vec![1.0, 0.0], vec![0.75, 0.75], vec![0.0, 1.0]],
            vec![0.0, 1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn variable_counts() {
        let m = build_model(&example(), ShapeSpec::QUASICONVEX_DECREASING, &SolverParams::default()).unwrap();
        assert_eq!(m.num_binaries(), 6);
        assert_eq!(m.num_continuous(), 9);
        assert_eq!(m.xi_bounds(), (0.0, 1.0));
        let m = build_model(&example(), ShapeSpec::QUASICONVEX, &SolverParams::default()).unwrap();
        assert_eq!(m.xi_bounds(), (-1.0, 1.0));
    }

    #[test]
    fn default_constants() {
        let m = build_model(&example(), ShapeSpec::QUASICONVEX_DECREASING, &SolverParams::default()).unwrap();
        assert_eq!(m.m_z, 3.0);
        assert_eq!(m.m_xi, 5.0);
        assert!((m.eps - 1e-6).abs() < 1e-18);
        assert_eq!(m.gamma, 1.0);
        assert!((m.y_center - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        let bad = SolverParams { big_m_z: Some(0.0), ..Default::default() };
        assert!(matches!(
            build_model(&example(), ShapeSpec::QUASICONVEX_DECREASING, &bad),
            Err(Error::InvalidParams(_))
        ));
        let bad = SolverParams { eps_strict: Some(-1.0), ..Default::default() };
        assert!(build_model(&example(), ShapeSpec::QUASICONVEX_DECREASING, &bad).is_err());
        let bad = SolverParams { xi_bound: 0.0, ..Default::default() };
        assert!(build_model(&example(), ShapeSpec::QUASICONVEX_DECREASING, &bad).is_err());
        assert!(build_model(&example(), ShapeSpec::QUASICONVEX_INCREASING, &SolverParams::default()).is_err());
    }

    #[test]
    fn single_point_clamps() {
        let d = DataSet::from_rows(&[vec![0.3]], vec![5.0]).unwrap();
        let p = SolverParams { gamma: Some(2.0), ..Default::default() };
        let m = build_model(&d, ShapeSpec::QUASICONVEX_DECREASING, &p).unwrap();
        assert_eq!(m.num_binaries(), 0);
        let s = solve(&m).unwrap();
        assert!((s.theta[0] - 2.0).abs() < 1e-12);
    }
}
