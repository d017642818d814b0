//! Certificates of membership in the constraint sets of fitted-value vectors.
//!
//! A vector `z` is realizable by a quasiconvex decreasing function at the
//! design points iff, for every `i`, the point `X_i` lies outside
//! `Cv†({X_j : z_j < z_i})`. Only these `n` level sets need checking.
//! The increasing variant uses lower orthants and the unconstrained variant
//! the plain convex hull.
//!
//! The module also exposes the separating-vector form of the same condition,
//! decided by one small LP per design point.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{dominated_by, hull_support, HullKind, PointSet};
use crate::numeric::{solve_lp, LpProblem, Status};
use crate::shape::{Curvature, Monotonicity, ShapeSpec};

/// Values within this distance are treated as tied when forming level sets.
pub const TIE_TOL: f64 = 1e-12;

/// A level-set constraint `z_i ≤ max_{j∈S} z_j` that `z` violates.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    /// The offending design point `i` (0-based).
    pub index: usize,
    /// `S = {j : z_j < z_i}` (0-based, ascending).
    pub level_set: Vec<usize>,
    /// Points of `S` whose convex combination certifies hull membership.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub witness: Option<Witness>,
}

/// Orientation-adjusted values and the hull to test against.
fn oriented(z: &[f64], shape: ShapeSpec) -> (Vec<f64>, HullKind) {
    match shape.curvature {
        Curvature::Quasiconvex => (z.to_vec(), shape.hull_kind()),
        Curvature::Quasiconcave => {
            let flipped = ShapeSpec::new(Curvature::Quasiconvex, shape.monotonicity.flipped());
            (z.iter().map(|v| -v).collect(), flipped.hull_kind())
        }
    }
}

fn check_lengths(z: &[f64], x: &PointSet) -> Result<()> {
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: z.len() });
    }
    Ok(())
}

/// Tests the level-set constraint anchored at design point `i`.
pub fn level_set_violation(
    z: &[f64],
    x: &PointSet,
    i: usize,
    kind: HullKind,
    tie_tol: f64,
) -> Result<Option<Witness>> {
    let level_set: Vec<usize> = (0..z.len()).filter(|&j| z[j] < z[i] - tie_tol).collect();
    Ok(hull_support(x.point(i), x, &level_set, kind)?.map(|support| Witness {
        index: i,
        level_set,
        support,
    }))
}

/// Level-set membership test with an explicit tie tolerance and hull kind.
pub fn check_kind(z: &[f64], x: &PointSet, kind: HullKind, tie_tol: f64) -> Result<FeasibilityReport> {
    check_lengths(z, x)?;
    for i in 0..z.len() {
        if let Some(w) = level_set_violation(z, x, i, kind, tie_tol)? {
            return Ok(FeasibilityReport { feasible: false, witness: Some(w) });
        }
    }
    Ok(FeasibilityReport { feasible: true, witness: None })
}

/// Decides whether `z` is the vector of values at `x` of some function of the
/// given shape. On failure reports the first violating index.
pub fn check(z: &[f64], x: &PointSet, shape: ShapeSpec) -> Result<FeasibilityReport> {
    check_with_tolerance(z, x, shape, TIE_TOL)
}

pub fn check_with_tolerance(
    z: &[f64],
    x: &PointSet,
    shape: ShapeSpec,
    tie_tol: f64,
) -> Result<FeasibilityReport> {
    check_lengths(z, x)?;
    let (z, kind) = oriented(z, shape);
    check_kind(&z, x, kind, tie_tol)
}

/// All violating level-set constraints among the `n` canonical ones, in index order.
pub fn violating_constraints(z: &[f64], x: &PointSet, shape: ShapeSpec) -> Result<Vec<Witness>> {
    check_lengths(z, x)?;
    let (z, kind) = oriented(z, shape);
    let mut out = Vec::new();
    for i in 0..z.len() {
        if let Some(w) = level_set_violation(&z, x, i, kind, TIE_TOL)? {
            out.push(w);
        }
    }
    Ok(out)
}

/// Checks only the partial-order part: `z_i ≥ z_j` whenever `X_i ≤ X_j`
/// (decreasing), or the reverse (increasing). `None` always passes.
pub fn monotone_consistent(z: &[f64], x: &PointSet, monotonicity: Monotonicity) -> Result<bool> {
    check_lengths(z, x)?;
    let n = z.len();
    for i in 0..n {
        for j in 0..n {
            if i == j || !dominated_by(x.point(i), x.point(j)) {
                continue;
            }
            let ok = match monotonicity {
                Monotonicity::Decreasing => z[i] >= z[j],
                Monotonicity::Increasing => z[i] <= z[j],
                Monotonicity::None => true,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Coordinate box for separating vectors: `[0, b]^d` for decreasing shapes,
/// `[−b, 0]^d` for increasing ones and `[−b, b]^d` otherwise.
pub fn separator_box(kind: HullKind, bound: f64) -> (f64, f64) {
    match kind {
        HullKind::Upper => (0.0, bound),
        HullKind::Lower => (-bound, 0.0),
        HullKind::Plain => (-bound, bound),
    }
}

/// Maximizes `t` subject to `ξᵀ(X_i − X_j) ≥ t` for all `i ∈ targets`, with `ξ`
/// in the box. Returns the maximizing `ξ` and margin `t`; with no targets the
/// margin is `+∞` and `ξ = 0`.
pub fn max_separation(
    x: &PointSet,
    j: usize,
    targets: &[usize],
    bounds: (f64, f64),
) -> Result<(Vec<f64>, f64)> {
    let d = x.dim();
    if targets.is_empty() {
        return Ok((vec![0.0; d], f64::INFINITY));
    }
    // Variables ξ_1..ξ_d, t. Minimize −t.
    let mut c = vec![0.0; d + 1];
    c[d] = -1.0;
    let mut lp = LpProblem::new(d + 1).minimize(c);
    for k in 0..d {
        lp.bounds(k, bounds.0, bounds.1);
    }
    lp.bounds(d, f64::NEG_INFINITY, f64::INFINITY);
    let xj = x.point(j);
    let mut row = vec![0.0; d + 1];
    for &i in targets {
        let xi = x.point(i);
        // t − ξᵀ(X_i − X_j) ≤ 0
        for k in 0..d {
            row[k] = -(xi[k] - xj[k]);
        }
        row[d] = 1.0;
        lp.leq(&row, 0.0);
    }
    let res = solve_lp(&lp)?;
    match res.status {
        Status::Optimal => {
            let t = res.x[d];
            let mut xi = res.x;
            xi.truncate(d);
            Ok((xi, t))
        }
        s => Err(Error::NumericalFailure(alloc::format!("separation LP ended with {s:?}"))),
    }
}

/// Separating-vector form of the membership test: returns vectors
/// `ξ_1..ξ_n` (in the sign box of the shape, coordinates bounded by one) with
/// `ξ_jᵀ(X_i − X_j) ≥ δ` whenever `z_i < z_j`, or `None` if none exist.
pub fn separation_certificate(
    z: &[f64],
    x: &PointSet,
    shape: ShapeSpec,
    delta: f64,
) -> Result<Option<Vec<Vec<f64>>>> {
    check_lengths(z, x)?;
    let (z, kind) = oriented(z, shape);
    let bounds = separator_box(kind, 1.0);
    let mut out = Vec::with_capacity(z.len());
    for j in 0..z.len() {
        let below: Vec<usize> = (0..z.len()).filter(|&i| z[i] < z[j] - TIE_TOL).collect();
        let (xi, margin) = max_separation(x, j, &below, bounds)?;
        if margin < delta {
            return Ok(None);
        }
        out.push(xi);
    }
    Ok(Some(out))
}
