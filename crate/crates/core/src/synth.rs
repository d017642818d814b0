//! Synthetic regression functions and data sets.
//!
//! `ψ_ξ(x) = ⌊‖x‖²⌋ + s_ξ(‖x‖² − ⌊‖x‖²⌋)` is quasiconvex and increasing on the
//! nonnegative orthant for every `ξ ∈ [0, 1]`, interpolating between a
//! staircase (`ξ = 0`) and `‖x‖²` (`ξ = 1`). `ψ†_ξ` adds a bump near the
//! diagonal that keeps monotonicity but breaks quasiconvexity.
//!
//! Design points are uniform on `[0, 1]^d` and noise is Gaussian, drawn from
//! a ChaCha8 stream seeded with `seed_from_u64(seed)`: first the `n d`
//! coordinates row by row, then `n` standard normals.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::float::{ceil, floor, sqrt};
use crate::geometry::PointSet;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub n: usize,
    pub d: usize,
    /// Smoothness `ξ ∈ [0, 1]`.
    pub xi: f64,
    /// Noise variance `σ²`.
    pub sigma2: f64,
    /// Use `ψ†_ξ` instead of `ψ_ξ`.
    pub misspecified: bool,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::DomainError { value: self.xi, domain: "[0, 1]" });
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::DomainError { value: self.sigma2, domain: "[0, ∞)" });
        }
        Ok(())
    }

    /// The regression function selected by this configuration.
    pub fn truth(&self, x: &[f64]) -> f64 {
        if self.misspecified {
            psi_dagger(x, self.xi)
        } else {
            psi(x, self.xi)
        }
    }
}

/// Generated data with the noiseless truth at each design point.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub data: DataSet,
    pub truth: Vec<f64>,
}

/// `s_ξ(t) = (t − (1 − ξ)) / ξ` for `t ≥ 1 − ξ`, else 0. For `ξ = 0` this is the
/// indicator of `t = 1`.
pub fn smoothing(t: f64, xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError { value: t, domain: "[0, 1]" });
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::DomainError { value: xi, domain: "[0, 1]" });
    }
    Ok(smooth(t, xi))
}

fn smooth(t: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    if t >= 1.0 - xi {
        ((t - (1.0 - xi)) / xi).min(1.0)
    } else {
        0.0
    }
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `ψ_ξ(x)`.
pub fn psi(x: &[f64], xi: f64) -> f64 {
    let s = sq_norm(x);
    let f = floor(s);
    f + smooth(s - f, xi.clamp(0.0, 1.0))
}

/// Threshold `r(x)` of the misspecified function.
pub fn r_threshold(x: &[f64]) -> f64 {
    let s = sq_norm(x);
    if s >= 1.0 {
        sqrt(floor(s) / 2.0)
    } else {
        (sqrt(ceil(s)) + sqrt(floor(s))) / (2.0 * core::f64::consts::SQRT_2)
    }
}

/// `ψ†_ξ(x) = ⌊‖x‖²⌋ + 1` when every coordinate is at least `r(x)`, else `ψ_ξ(x)`.
pub fn psi_dagger(x: &[f64], xi: f64) -> f64 {
    let r = r_threshold(x);
    if x.iter().all(|&v| v >= r) {
        floor(sq_norm(x)) + 1.0
    } else {
        psi(x, xi)
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coords: Vec<f64> = (0..cfg.n * cfg.d).map(|_| rng.random::<f64>()).collect();
    let x = PointSet::from_flat(cfg.d, coords)?;
    let sigma = sqrt(cfg.sigma2);
    let truth: Vec<f64> = x.iter().map(|p| cfg.truth(p)).collect();
    let y = truth
        .iter()
        .map(|t| {
            let e: f64 = rng.sample(StandardNormal);
            t + sigma * e
        })
        .collect();
    Ok(SynthData { data: DataSet::new(x, y)?, truth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothing_values() {
        assert!((smoothing(0.75, 0.5).unwrap() - 0.5).abs() < 1e-15);
        for t in [0.0, 0.3, 0.99, 1.0] {
            assert!((smoothing(t, 1.0).unwrap() - t).abs() < 1e-15);
        }
        assert_eq!(smoothing(0.2, 0.5).unwrap(), 0.0);
        assert_eq!(smoothing(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(smoothing(0.99, 0.0).unwrap(), 0.0);
        assert_eq!(smoothing(1.0, 0.0).unwrap(), 1.0);
        assert!(matches!(smoothing(1.5, 0.5), Err(Error::DomainError { .. })));
        assert!(smoothing(0.5, -0.1).is_err());
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(&[0.8, 0.8], 0.0), 1.0);
        assert!((psi(&[0.8, 0.8], 1.0) - 1.28).abs() < 1e-12);
        assert_eq!(psi(&[0.8, 0.8], 0.34), 1.0);
    }

    #[test]
    fn psi_dagger_values() {
        assert_eq!(psi_dagger(&[1.0, 1.0], 0.5), 3.0);
        let x = [1.4, 0.1];
        assert!((r_threshold(&x) - sqrt(0.5)).abs() < 1e-15);
        assert_eq!(psi_dagger(&x, 0.5), psi(&x, 0.5));
        let x = [0.3, 0.1];
        assert!(x[1] < r_threshold(&x));
        assert_eq!(psi_dagger(&x, 0.5), psi(&x, 0.5));
    }

    #[test]
    fn noiseless_and_reproducible() {
        let cfg = SynthConfig { n: 25, d: 2, xi: 0.5, sigma2: 0.0, misspecified: false, seed: 7 };
        let a = generate(&cfg).unwrap();
        assert_eq!(a.data.y, a.truth);
        assert!(a.data.x.as_flat().iter().all(|v| (0.0..1.0).contains(v)));
        let noisy = SynthConfig { sigma2: 0.1, ..cfg.clone() };
        assert_eq!(generate(&noisy).unwrap(), generate(&noisy).unwrap());
        assert_ne!(generate(&noisy).unwrap().data.y, a.data.y);
    }

    #[test]
    fn noise_is_centered() {
        let n = 100_000;
        let cfg = SynthConfig { n, d: 1, xi: 1.0, sigma2: 0.25, misspecified: false, seed: 11 };
        let s = generate(&cfg).unwrap();
        let mean = s.data.y.iter().zip(&s.truth).map(|(y, t)| y - t).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 * 0.5 / sqrt(n as f64), "{mean}");
    }

    #[test]
    fn config_is_validated() {
        let cfg = SynthConfig { n: 5, d: 2, xi: 1.5, sigma2: 0.0, misspecified: false, seed: 0 };
        assert!(generate(&cfg).is_err());
        assert!(generate(&SynthConfig { xi: 0.5, n: 0, ..cfg.clone() }).is_err());
        assert!(generate(&SynthConfig { xi: 0.5, sigma2: -1.0, ..cfg }).is_err());
    }
}
