//! Fitting pipeline and piecewise-constant prediction.
//!
//! A fit reduces the requested shape to a canonical one by sign flips,
//! pools repeated design points, solves the projection and stores the
//! distinct canonical points sorted by fitted value. The prediction at `x` is
//! the fitted value `θ_(m)` for the smallest `m` with `x` in the upper orthant
//! of the hull of the first `m` sorted points (the plain hull when there is
//! no monotonicity), and the largest fitted value when there is no such `m`.

use alloc::vec::Vec;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::geometry::{check_dim, hull_support, PointSet};
use crate::isotonic::{envelope, isotonic_values};
use crate::shape::{Curvature, Monotonicity, ShapeSpec};
use crate::solver::{build_model, rescale_point, solve, SolveStatus, SolverParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EstimatorKind {
    /// Shape-constrained least squares.
    Lse,
    /// Monotone-only least squares.
    Isotonic,
}

/// Solver statistics kept with a fitted model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitStats {
    /// Weighted residual sum of squares.
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub wall_ms: f64,
    pub status: SolveStatus,
    pub m_z: f64,
    pub m_xi: f64,
    pub eps: f64,
    pub gamma: f64,
    /// Smallest separation margin of the returned separators; `None` when
    /// no pair of values is strictly ordered.
    pub min_margin: Option<f64>,
}

/// An immutable fitted model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittedModel {
    pub kind: EstimatorKind,
    pub shape: ShapeSpec,
    /// Design points in the original scale and order.
    pub points: PointSet,
    /// Fitted values at `points`.
    pub fitted: Vec<f64>,
    /// For each sorted level, the index in `points` of its first occurrence.
    pub order: Vec<usize>,
    /// Distinct design points after sign flips and rescaling, sorted by level
    /// (ties by index).
    pub sorted_points: PointSet,
    /// Canonical fitted values of `sorted_points`, nondecreasing.
    pub levels: Vec<f64>,
    pub x_sign: f64,
    pub y_sign: f64,
    pub x_offset: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub stats: FitStats,
}

impl FittedModel {
    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        predict(self, x)
    }

    fn canonical_point(&self, x: &[f64]) -> Vec<f64> {
        let flipped: Vec<f64> = x.iter().map(|v| self.x_sign * v).collect();
        rescale_point(&flipped, &self.x_offset, &self.x_scale)
    }
}

fn hull_kind(shape: ShapeSpec) -> crate::geometry::HullKind {
    shape.canonical().shape.hull_kind()
}

/// Least-squares fit of a function of the given shape.
///
/// A search that stops at the node limit still yields a model built from the
/// best feasible values found; `stats.status` records this.
pub fn fit(data: &DataSet, shape: ShapeSpec, params: &SolverParams) -> Result<FittedModel> {
    data.validate()?;
    let canon = shape.canonical();
    let flipped = DataSet {
        x: if canon.x_sign < 0.0 { data.x.negated() } else { data.x.clone() },
        y: data.y.iter().map(|v| canon.y_sign * v).collect(),
        weights: data.weights.clone(),
    };
    let (pooled, group) = flipped.aggregate_duplicates();
    let mut params = params.clone();
    if params.gamma.is_none() {
        params.gamma = Some(data.y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let model = build_model(&pooled, canon.shape, &params)?;
    let sol = solve(&model)?;

    let fitted: Vec<f64> = group.iter().map(|&g| canon.y_sign * sol.theta[g]).collect();
    let mut first = alloc::vec![usize::MAX; pooled.len()];
    for (i, &g) in group.iter().enumerate() {
        if first[g] == usize::MAX {
            first[g] = i;
        }
    }
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&a, &b| sol.theta[a].total_cmp(&sol.theta[b]).then(first[a].cmp(&first[b])));

    Ok(FittedModel {
        kind: EstimatorKind::Lse,
        shape,
        points: data.x.clone(),
        fitted,
        order: idx.iter().map(|&g| first[g]).collect(),
        sorted_points: model.points.select(&idx),
        levels: idx.iter().map(|&g| sol.theta[g]).collect(),
        x_sign: canon.x_sign,
        y_sign: canon.y_sign,
        x_offset: model.x_offset.clone(),
        x_scale: model.x_scale.clone(),
        stats: FitStats {
            objective: sol.objective,
            lower_bound: sol.lower_bound,
            gap: sol.gap,
            nodes: sol.nodes,
            wall_ms: sol.wall_ms,
            status: sol.status,
            m_z: model.m_z,
            m_xi: model.m_xi,
            eps: model.eps,
            gamma: model.gamma,
            min_margin: sol.min_margin.is_finite().then_some(sol.min_margin),
        },
    })
}

/// Monotone least-squares baseline under the coordinatewise partial order.
pub fn fit_isotonic(data: &DataSet, monotonicity: Monotonicity) -> Result<FittedModel> {
    let fitted = isotonic_values(data, monotonicity)?;
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| fitted[a].total_cmp(&fitted[b]).then(a.cmp(&b)));
    let d = data.dim();
    Ok(FittedModel {
        kind: EstimatorKind::Isotonic,
        shape: ShapeSpec::new(Curvature::Quasiconvex, monotonicity),
        points: data.x.clone(),
        levels: order.iter().map(|&i| fitted[i]).collect(),
        sorted_points: data.x.select(&order),
        order,
        stats: FitStats {
            objective: data.sse(&fitted),
            lower_bound: data.sse(&fitted),
            gap: 0.0,
            nodes: 0,
            wall_ms: 0.0,
            status: SolveStatus::Optimal,
            m_z: 0.0,
            m_xi: 0.0,
            eps: 0.0,
            gamma: 0.0,
            min_margin: None,
        },
        fitted,
        x_sign: 1.0,
        y_sign: 1.0,
        x_offset: alloc::vec![0.0; d],
        x_scale: alloc::vec![1.0; d],
    })
}

/// Value of the fitted function at `x`.
pub fn predict(model: &FittedModel, x: &[f64]) -> Result<f64> {
    check_dim(model.dim(), x)?;
    if model.kind == EstimatorKind::Isotonic {
        return Ok(envelope(&model.points, &model.fitted, model.shape.monotonicity, x));
    }
    let p = model.canonical_point(x);
    let pts = &model.sorted_points;
    let n = model.levels.len();
    // A design point takes its own level.
    if let Some(k) = pts.iter().position(|q| q == p.as_slice()) {
        return Ok(model.y_sign * model.levels[k]);
    }
    let kind = hull_kind(model.shape);
    let all: Vec<usize> = (0..n).collect();
    let inside = |m: usize| -> Result<bool> { Ok(hull_support(&p, pts, &all[..m], kind)?.is_some()) };
    // Membership is monotone in the prefix length.
    if !inside(n)? {
        return Ok(model.y_sign * model.levels[n - 1]);
    }
    let (mut lo, mut hi) = (0, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(model.y_sign * model.levels[hi - 1])
}

/// `Σ_k (Y_k − f̂(X_k))²`, unweighted.
pub fn in_sample_loss(model: &FittedModel, data: &DataSet) -> Result<f64> {
    let mut s = 0.0;
    for (x, y) in data.x.iter().zip(&data.y) {
        let r = y - predict(model, x)?;
        s += r * r;
    }
    Ok(s)
}

/// Mean of `(f̂(x) − φ(x))²` over the evaluation points.
pub fn risk_vs_truth<F: Fn(&[f64]) -> f64>(model: &FittedModel, truth: F, eval: &PointSet) -> Result<f64> {
    if eval.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut s = 0.0;
    for x in eval.iter() {
        let r = predict(model, x)? - truth(x);
        s += r * r;
    }
    Ok(s / eval.len() as f64)
}

/// `Σ_k (f̂(X_k) − φ(X_k))²` from fitted values and true values at the design points.
pub fn loss_vs_truth(fitted: &[f64], truth: &[f64]) -> f64 {
    fitted.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum()
}
