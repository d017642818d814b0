//! Orthant and convex-hull membership predicates.
//!
//! `Cv†(S)` is the upper orthant of the convex hull of `S`: every point that
//! dominates, coordinate by coordinate, some convex combination of `S`.
//! `Cv_†(S)` is the lower orthant. Membership is decided by a feasibility LP
//! over the convex weights `λ` and an orthant slack `v`; boundary points are
//! members.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{solve_lp, LpProblem, Status};

/// A finite set of points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Empty set of `dim`-dimensional points.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("points must have dimension at least 1".into()));
        }
        Ok(Self { dim, coords: Vec::new() })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).ok_or(Error::EmptyData)?;
        let mut set = Self::new(dim)?;
        for r in rows {
            set.push(r)?;
        }
        Ok(set)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidData("flat coordinates do not split into points".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        check_dim(self.dim, p)?;
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Subset in the given index order.
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            coords.extend_from_slice(self.point(i));
        }
        Self { dim: self.dim, coords }
    }

    /// Every coordinate negated.
    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|v| -v).collect(),
        }
    }
}

pub(crate) fn check_dim(dim: usize, p: &[f64]) -> Result<()> {
    if p.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    Ok(())
}

/// Which hull-like set a membership query targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum HullKind {
    /// `Cv†(S)`: the hull plus everything above it.
    Upper,
    /// `Cv_†(S)`: the hull plus everything below it.
    Lower,
    /// `Cv(S)`.
    Plain,
}

/// `a ≤ b` coordinatewise.
pub fn dominated_by(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Decides whether `p` lies in the hull-like set of `kind` spanned by the
/// points of `set` listed in `subset`.
///
/// On membership returns the support of a basic convex combination certifying
/// it (indices into `set`, at most `d + 1` of them); otherwise `None`.
pub fn hull_support(
    p: &[f64],
    set: &PointSet,
    subset: &[usize],
    kind: HullKind,
) -> Result<Option<Vec<usize>>> {
    let d = set.dim();
    check_dim(d, p)?;
    if subset.is_empty() {
        return Ok(None);
    }
    // Cheap exits: a single point that already certifies membership, or a
    // bounding box that rules it out.
    for &j in subset {
        let q = set.point(j);
        let hit = match kind {
            HullKind::Upper => dominated_by(q, p),
            HullKind::Lower => dominated_by(p, q),
            HullKind::Plain => q == p,
        };
        if hit {
            return Ok(Some(vec![j]));
        }
    }
    for k in 0..d {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &j in subset {
            let v = set.point(j)[k];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let out = match kind {
            HullKind::Upper => p[k] < lo,
            HullKind::Lower => p[k] > hi,
            HullKind::Plain => p[k] < lo || p[k] > hi,
        };
        if out {
            return Ok(None);
        }
    }

    // Variables: λ_1..λ_m ≥ 0, then v ∈ R^d with sign set by `kind`.
    // Σ λ = 1,  Σ λ_j q_j + v = p.
    let m = subset.len();
    let nv = if kind == HullKind::Plain { 0 } else { d };
    let mut lp = LpProblem::new(m + nv);
    for k in 0..nv {
        match kind {
            HullKind::Upper => lp.bounds(m + k, 0.0, f64::INFINITY),
            _ => lp.bounds(m + k, f64::NEG_INFINITY, 0.0),
        };
    }
    let mut row = vec![0.0; m + nv];
    for r in row.iter_mut().take(m) {
        *r = 1.0;
    }
    lp.equals(&row, 1.0);
    for k in 0..d {
        row.iter_mut().for_each(|r| *r = 0.0);
        for (pos, &j) in subset.iter().enumerate() {
            row[pos] = set.point(j)[k];
        }
        if nv > 0 {
            row[m + k] = 1.0;
        }
        lp.equals(&row, p[k]);
    }
    let res = solve_lp(&lp)?;
    Ok(match res.status {
        Status::Optimal => Some(
            subset
                .iter()
                .zip(&res.x)
                .filter(|(_, &l)| l > 1e-12)
                .map(|(&j, _)| j)
                .collect(),
        ),
        _ => None,
    })
}

fn membership(p: &[f64], set: &PointSet, kind: HullKind) -> Result<bool> {
    let all: Vec<usize> = (0..set.len()).collect();
    Ok(hull_support(p, set, &all, kind)?.is_some())
}

/// `p ∈ Cv†(S)`. The empty set contains nothing.
pub fn in_upper_hull(p: &[f64], set: &PointSet) -> Result<bool> {
    membership(p, set, HullKind::Upper)
}

/// `p ∈ Cv_†(S)`.
pub fn in_lower_hull(p: &[f64], set: &PointSet) -> Result<bool> {
    membership(p, set, HullKind::Lower)
}

/// `p ∈ Cv(S)`.
pub fn in_hull(p: &[f64], set: &PointSet) -> Result<bool> {
    membership(p, set, HullKind::Plain)
}
