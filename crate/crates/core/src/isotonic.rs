//! Multivariate isotonic regression under the coordinatewise partial order.

use alloc::vec::Vec;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::geometry::{dominated_by, PointSet};
use crate::numeric::project_order;
use crate::shape::Monotonicity;

/// Pairs `(a, b)` with `z_a ≤ z_b` required, reduced transitively.
pub fn order_arcs(x: &PointSet, monotonicity: Monotonicity) -> Result<Vec<(usize, usize)>> {
    let below = |i: usize, j: usize| -> bool {
        // true when the order forces z_i ≤ z_j
        match monotonicity {
            Monotonicity::Decreasing => dominated_by(x.point(j), x.point(i)),
            Monotonicity::Increasing => dominated_by(x.point(i), x.point(j)),
            Monotonicity::None => false,
        }
    };
    if monotonicity == Monotonicity::None {
        return Err(Error::InvalidParams("isotonic regression needs a monotone direction".into()));
    }
    let n = x.len();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !below(i, j) {
                continue;
            }
            let same = |a: usize, b: usize| x.point(a) == x.point(b);
            let redundant = !same(i, j)
                && (0..n).any(|k| !same(k, i) && !same(k, j) && below(i, k) && below(k, j));
            if !redundant {
                arcs.push((i, j));
            }
        }
    }
    Ok(arcs)
}

/// Weighted least-squares fit subject to the partial order.
pub fn isotonic_values(data: &DataSet, monotonicity: Monotonicity) -> Result<Vec<f64>> {
    data.validate()?;
    let arcs = order_arcs(&data.x, monotonicity)?;
    Ok(project_order(&data.y, &data.weights, &arcs, f64::NEG_INFINITY, f64::INFINITY))
}

/// Envelope extension of isotonic values to a new point: the smallest value
/// among dominated design points (decreasing) or the largest (increasing),
/// with the opposite extreme where no design point is dominated.
pub fn envelope(x: &PointSet, values: &[f64], monotonicity: Monotonicity, p: &[f64]) -> f64 {
    let dominated = x.iter().zip(values).filter(|(q, _)| dominated_by(q, p)).map(|(_, v)| *v);
    match monotonicity {
        Monotonicity::Increasing => dominated
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .unwrap_or_else(|| values.iter().copied().fold(f64::INFINITY, f64::min)),
        _ => dominated
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
            .unwrap_or_else(|| values.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_chain_pools() {
        let d = DataSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]], vec![0.0, 1.0]).unwrap();
        let z = isotonic_values(&d, Monotonicity::Decreasing).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-12 && (z[1] - 0.5).abs() < 1e-12);
        let z = isotonic_values(&d, Monotonicity::Increasing).unwrap();
        assert!((z[0]).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antichain_is_unconstrained() {
        let d = DataSet::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![3.0, -2.0]).unwrap();
        assert_eq!(order_arcs(&d.x, Monotonicity::Decreasing).unwrap(), vec![]);
        let z = isotonic_values(&d, Monotonicity::Decreasing).unwrap();
        assert!((z[0] - 3.0).abs() < 1e-12 && (z[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_extends_monotonically() {
        let x = PointSet::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let v = [2.0, 1.0];
        assert_eq!(envelope(&x, &v, Monotonicity::Decreasing, &[5.0]), 1.0);
        assert_eq!(envelope(&x, &v, Monotonicity::Decreasing, &[0.5]), 2.0);
        assert_eq!(envelope(&x, &v, Monotonicity::Decreasing, &[-1.0]), 2.0);
        let v = [1.0, 2.0];
        assert_eq!(envelope(&x, &v, Monotonicity::Increasing, &[-1.0]), 1.0);
        assert_eq!(envelope(&x, &v, Monotonicity::Increasing, &[3.0]), 2.0);
    }
}
