use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Design points with responses and positive weights.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DataSet {
    pub x: PointSet,
    pub y: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DataSet {
    /// Unit-weight data set.
    pub fn new(x: PointSet, y: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; y.len()];
        Self::weighted(x, y, weights)
    }

    pub fn weighted(x: PointSet, y: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let d = Self { x, y, weights };
        d.validate()?;
        Ok(d)
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        Self::new(PointSet::from_rows(rows)?, y)
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.is_empty() {
            return Err(Error::EmptyData);
        }
        if self.x.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.x.len(), found: self.y.len() });
        }
        if self.weights.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.y.len(), found: self.weights.len() });
        }
        if !self.x.as_flat().iter().chain(&self.y).all(|v| v.is_finite()) {
            return Err(Error::InvalidData("non-finite entry".into()));
        }
        if !self.weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::InvalidData("weights must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Weighted residual sum of squares of `fitted` against the responses.
    pub fn sse(&self, fitted: &[f64]) -> f64 {
        self.y
            .iter()
            .zip(fitted)
            .zip(&self.weights)
            .map(|((y, f), w)| w * (y - f) * (y - f))
            .sum()
    }

    pub fn weighted_mean(&self) -> f64 {
        let wsum: f64 = self.weights.iter().sum();
        self.y.iter().zip(&self.weights).map(|(y, w)| y * w).sum::<f64>() / wsum
    }

    /// Merges rows with identical design points into one row carrying the
    /// weighted mean response and the summed weight.
    ///
    /// Returns the reduced data and, for each original row, its group index.
    /// Groups appear in order of first occurrence.
    pub fn aggregate_duplicates(&self) -> (DataSet, Vec<usize>) {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.x.point(a), self.x.point(b));
            pa.iter()
                .zip(pb)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        // First occurrence of each distinct point.
        let mut leader = vec![0usize; n];
        for (k, &i) in order.iter().enumerate() {
            leader[i] = if k > 0 && self.x.point(order[k - 1]) == self.x.point(i) {
                leader[order[k - 1]]
            } else {
                i
            };
        }
        let mut group_of_leader = vec![usize::MAX; n];
        let mut groups = Vec::new();
        let mut assignment = vec![0usize; n];
        for i in 0..n {
            let l = leader[i];
            if group_of_leader[l] == usize::MAX {
                group_of_leader[l] = groups.len();
                groups.push(l);
            }
            assignment[i] = group_of_leader[l];
        }
        let g = groups.len();
        let mut wsum = vec![0.0; g];
        let mut ysum = vec![0.0; g];
        for i in 0..n {
            let k = assignment[i];
            wsum[k] += self.weights[i];
            ysum[k] += self.weights[i] * self.y[i];
        }
        let x = self.x.select(&groups);
        let y = ysum.iter().zip(&wsum).map(|(s, w)| s / w).collect();
        (DataSet { x, y, weights: wsum }, assignment)
    }
}
