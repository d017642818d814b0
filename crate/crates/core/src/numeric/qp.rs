use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{dot, DenseMatrix, Status};
use crate::error::{Error, Result};
use crate::float::sqrt;

/// Proximal weight placed on variables with zero curvature.
const PROX_WEIGHT: f64 = 1.0;
const PROX_MAX_ROUNDS: usize = 20_000;

/// `min ½ xᵀ diag(q) x + c·x  s.t.  A_ub x ≤ b_ub,  A_eq x = b_eq,  lower ≤ x ≤ upper`.
///
/// The quadratic term is diagonal and nonnegative. Zero entries are allowed
/// and handled by an outer proximal-point loop.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub diag: Vec<f64>,
    pub linear: Vec<f64>,
    pub a_ub: DenseMatrix,
    pub b_ub: Vec<f64>,
    pub a_eq: DenseMatrix,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl QpProblem {
    /// Unconstrained problem with the given diagonal and linear terms.
    pub fn new(diag: Vec<f64>, linear: Vec<f64>) -> Self {
        let n = diag.len();
        Self {
            diag,
            linear,
            a_ub: DenseMatrix::new(n),
            b_ub: Vec::new(),
            a_eq: DenseMatrix::new(n),
            b_eq: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Weighted least squares `Σ w_k (x_k − t_k)²`, written as `½ xᵀ(2W)x − 2(Wt)·x + const`.
    pub fn least_squares(target: &[f64], weights: &[f64]) -> Self {
        let diag = weights.iter().map(|w| 2.0 * w).collect();
        let linear = target.iter().zip(weights).map(|(t, w)| -2.0 * w * t).collect();
        Self::new(diag, linear)
    }

    pub fn num_vars(&self) -> usize {
        self.diag.len()
    }

    pub fn leq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.a_ub.push_row(row);
        self.b_ub.push(rhs);
        self
    }

    pub fn equals(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.a_eq.push_row(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn bounds(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.lower[var] = lo;
        self.upper[var] = hi;
        self
    }

    /// `½ xᵀ diag(q) x + c·x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.diag)
            .zip(&self.linear)
            .map(|((xi, q), c)| 0.5 * q * xi * xi + c * xi)
            .sum()
    }

    /// Largest violation of any constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for (row, b) in self.a_ub.rows().zip(&self.b_ub) {
            v = v.max(dot(row, x) - b);
        }
        for (row, b) in self.a_eq.rows().zip(&self.b_eq) {
            v = v.max((dot(row, x) - b).abs());
        }
        for (j, xj) in x.iter().enumerate() {
            v = v.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        v
    }

    /// Index of the first inequality row in the constraint numbering used by
    /// [`QpResult::active`]: equalities, then lower bounds, then upper bounds,
    /// then the `A_ub` rows. Appending rows to `A_ub` keeps earlier indices valid.
    pub fn first_ub_index(&self) -> usize {
        self.b_eq.len() + 2 * self.num_vars()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let ok = self.linear.len() == n
            && self.a_ub.ncols() == n
            && self.a_eq.ncols() == n
            && self.a_ub.nrows() == self.b_ub.len()
            && self.a_eq.nrows() == self.b_eq.len()
            && self.lower.len() == n
            && self.upper.len() == n;
        if !ok {
            return Err(Error::InvalidParams(format!(
                "inconsistent QP dimensions for {n} variables"
            )));
        }
        if self.diag.iter().any(|q| !(*q >= 0.0)) {
            return Err(Error::InvalidParams("quadratic term must be nonnegative".into()));
        }
        if let Some(j) = (0..n).find(|&j| !(self.lower[j] <= self.upper[j])) {
            return Err(Error::InvalidParams(format!("variable {j} has crossed bounds")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpResult {
    pub status: Status,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Active constraints at the solution (see [`QpProblem::first_ub_index`]).
    pub active: Vec<usize>,
    /// Multipliers of the active constraints, nonnegative for inequalities.
    pub multipliers: Vec<f64>,
}

impl QpResult {
    fn infeasible(n: usize, iterations: usize) -> Self {
        Self {
            status: Status::Infeasible,
            x: vec![f64::NAN; n],
            objective: f64::NAN,
            iterations,
            active: Vec::new(),
            multipliers: Vec::new(),
        }
    }
}

/// Solves a convex QP with a diagonal quadratic term by the dual active-set
/// method of Goldfarb and Idnani.
pub fn solve_qp(p: &QpProblem) -> Result<QpResult> {
    solve_qp_warm(p, &[])
}

/// Like [`solve_qp`], starting from a guess of the active set.
///
/// The hint must come from an optimal solution of a problem with the same
/// objective and a subset of the constraints (for instance, the same problem
/// before extra `A_ub` rows were appended). Invalid hints fall back to a cold start.
pub fn solve_qp_warm(p: &QpProblem, hint: &[usize]) -> Result<QpResult> {
    p.validate()?;
    let cons = Constraints::new(p);
    if p.diag.iter().all(|&q| q > 0.0) {
        return GoldfarbIdnani::new(&p.diag, &p.linear, &cons).run(hint);
    }

    // Proximal point iterations on the zero-curvature block.
    let n = p.num_vars();
    let flat: Vec<bool> = p.diag.iter().map(|&q| q == 0.0).collect();
    let diag: Vec<f64> = p
        .diag
        .iter()
        .zip(&flat)
        .map(|(&q, &f)| if f { PROX_WEIGHT } else { q })
        .collect();
    let mut center = vec![0.0; n];
    for j in 0..n {
        if flat[j] {
            center[j] = clamp_to(0.0, p.lower[j], p.upper[j]);
        }
    }
    let mut active: Vec<usize> = hint.to_vec();
    let mut iterations = 0;
    for _ in 0..PROX_MAX_ROUNDS {
        let linear: Vec<f64> = (0..n)
            .map(|j| if flat[j] { p.linear[j] - PROX_WEIGHT * center[j] } else { p.linear[j] })
            .collect();
        let mut res = GoldfarbIdnani::new(&diag, &linear, &cons).run(&active)?;
        iterations += res.iterations;
        if res.status != Status::Optimal {
            res.iterations = iterations;
            return Ok(res);
        }
        let scale = 1.0 + res.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let step = (0..n)
            .filter(|&j| flat[j])
            .fold(0.0f64, |m, j| m.max((res.x[j] - center[j]).abs()));
        for j in 0..n {
            if flat[j] {
                center[j] = res.x[j];
            }
        }
        active = res.active.clone();
        if step <= 1e-12 * scale {
            res.objective = p.objective(&res.x);
            res.iterations = iterations;
            return Ok(res);
        }
    }
    Err(Error::NumericalFailure(format!(
        "proximal QP loop did not settle in {PROX_MAX_ROUNDS} rounds"
    )))
}

fn clamp_to(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

/// All constraints in the form `nᵀx ≥ b`.
struct Constraints {
    normals: DenseMatrix,
    rhs: Vec<f64>,
    n_eq: usize,
}

impl Constraints {
    fn new(p: &QpProblem) -> Self {
        let n = p.num_vars();
        let mut normals = DenseMatrix::new(n);
        let mut rhs = Vec::new();
        for (row, b) in p.a_eq.rows().zip(&p.b_eq) {
            normals.push_row(row);
            rhs.push(*b);
        }
        for j in 0..n {
            normals.push_zero_row()[j] = 1.0;
            rhs.push(p.lower[j]);
        }
        for j in 0..n {
            normals.push_zero_row()[j] = -1.0;
            rhs.push(-p.upper[j]);
        }
        for (row, b) in p.a_ub.rows().zip(&p.b_ub) {
            let r = normals.push_zero_row();
            for (d, s) in r.iter_mut().zip(row) {
                *d = -s;
            }
            rhs.push(-b);
        }
        Self { normals, rhs, n_eq: p.b_eq.len() }
    }

    fn len(&self) -> usize {
        self.rhs.len()
    }

    fn is_eq(&self, k: usize) -> bool {
        k < self.n_eq
    }
}

struct GoldfarbIdnani<'a> {
    d: &'a [f64],
    c: &'a [f64],
    cons: &'a Constraints,
    x: Vec<f64>,
    active: Vec<usize>,
    /// Orientation of each active constraint (−1 for flipped equalities).
    sign: Vec<f64>,
    lambda: Vec<f64>,
    /// Lower-triangular Cholesky factor of `Nᵀ D⁻¹ N`, row-major `k × k`.
    chol: Vec<f64>,
    iterations: usize,
}

impl<'a> GoldfarbIdnani<'a> {
    fn new(d: &'a [f64], c: &'a [f64], cons: &'a Constraints) -> Self {
        let x = c.iter().zip(d).map(|(ci, di)| -ci / di).collect();
        Self {
            d,
            c,
            cons,
            x,
            active: Vec::new(),
            sign: Vec::new(),
            lambda: Vec::new(),
            chol: Vec::new(),
            iterations: 0,
        }
    }

    fn normal(&self, k: usize) -> &[f64] {
        self.cons.normals.row(k)
    }

    fn k(&self) -> usize {
        self.active.len()
    }

    /// `⟨a, D⁻¹ b⟩`.
    fn dinv_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(self.d).map(|((x, y), d)| x * y / d).sum()
    }

    fn active_normal_dot(&self, pos: usize, v: &[f64]) -> f64 {
        self.sign[pos] * self.dinv_dot(self.normal(self.active[pos]), v)
    }

    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut y = vec![0.0; k];
        for i in 0..k {
            let mut s = b[i];
            for j in 0..i {
                s -= self.chol[i * k + j] * y[j];
            }
            y[i] = s / self.chol[i * k + i];
        }
        y
    }

    fn backward(&self, y: &[f64]) -> Vec<f64> {
        let k = self.k();
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s -= self.chol[j * k + i] * x[j];
            }
            x[i] = s / self.chol[i * k + i];
        }
        x
    }

    /// Rebuilds the Cholesky factor for the current active set.
    /// Returns false when the active normals are numerically dependent.
    fn refactor(&mut self) -> bool {
        let k = self.k();
        let mut l = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..=i {
                let ni = self.normal(self.active[i]);
                let nj = self.normal(self.active[j]);
                let mut s = self.sign[i] * self.sign[j] * self.dinv_dot(ni, nj);
                for t in 0..j {
                    s -= l[i * k + t] * l[j * k + t];
                }
                if i == j {
                    let scale = self.dinv_dot(ni, ni);
                    if s <= 1e-13 * scale {
                        return false;
                    }
                    l[i * k + i] = sqrt(s);
                } else {
                    l[i * k + j] = s / l[j * k + j];
                }
            }
        }
        self.chol = l;
        true
    }

    /// Appends constraint `p` (already oriented by `sign`) to the factor.
    fn append(&mut self, p: usize, sign: f64, g: &[f64], lam: f64) -> bool {
        let np = self.normal(p);
        let diag = self.dinv_dot(np, np);
        let w = self.forward(g);
        let rest = diag - dot(&w, &w);
        if rest <= 1e-13 * diag {
            return false;
        }
        let k = self.k();
        let mut l = vec![0.0; (k + 1) * (k + 1)];
        for i in 0..k {
            for j in 0..=i {
                l[i * (k + 1) + j] = self.chol[i * k + j];
            }
        }
        for (j, wj) in w.iter().enumerate() {
            l[k * (k + 1) + j] = *wj;
        }
        l[k * (k + 1) + k] = sqrt(rest);
        self.chol = l;
        self.active.push(p);
        self.sign.push(sign);
        self.lambda.push(lam);
        true
    }

    fn drop_at(&mut self, pos: usize) {
        self.active.remove(pos);
        self.sign.remove(pos);
        self.lambda.remove(pos);
        if !self.refactor() {
            // Removing a row from an independent set keeps it independent;
            // only round-off can land here.
            self.chol.clear();
        }
    }

    /// Installs a hinted active set; returns false if it is unusable.
    fn warm_start(&mut self, hint: &[usize]) -> bool {
        let m = self.cons.len();
        for &h in hint {
            if h >= m || self.active.contains(&h) {
                return false;
            }
            self.active.push(h);
            self.sign.push(1.0);
        }
        if !self.refactor() {
            return false;
        }
        // B λ = b_A + Nᵀ D⁻¹ c
        let rhs: Vec<f64> = (0..self.k())
            .map(|pos| {
                self.sign[pos] * self.cons.rhs[self.active[pos]] + self.active_normal_dot(pos, self.c)
            })
            .collect();
        let lambda = self.backward(&self.forward(&rhs));
        for (pos, &l) in lambda.iter().enumerate() {
            if l < -1e-10 && !self.cons.is_eq(self.active[pos]) {
                return false;
            }
        }
        self.lambda = lambda.iter().map(|&l| l.max(0.0)).collect();
        let n = self.x.len();
        for j in 0..n {
            let mut s = -self.c[j];
            for pos in 0..self.k() {
                s += self.lambda[pos] * self.sign[pos] * self.normal(self.active[pos])[j];
            }
            self.x[j] = s / self.d[j];
        }
        true
    }

    fn reset(&mut self) {
        self.x = self.c.iter().zip(self.d).map(|(ci, di)| -ci / di).collect();
        self.active.clear();
        self.sign.clear();
        self.lambda.clear();
        self.chol.clear();
    }

    fn slack(&self, k: usize) -> f64 {
        dot(self.normal(k), &self.x) - self.cons.rhs[k]
    }

    fn tolerance(&self, k: usize) -> f64 {
        1e-10 * (1.0 + self.cons.rhs[k].abs())
    }

    /// Picks the next constraint to enforce: unmet equalities first, then the
    /// most violated inequality (lowest index on ties).
    fn select(&self) -> Option<(usize, f64)> {
        for k in 0..self.cons.n_eq {
            if !self.active.contains(&k) {
                let s = self.slack(k);
                return Some((k, if s > 0.0 { -1.0 } else { 1.0 }));
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for k in self.cons.n_eq..self.cons.len() {
            if !self.cons.rhs[k].is_finite() {
                continue;
            }
            let s = self.slack(k);
            if s < -self.tolerance(k) && best.map_or(true, |(_, bs)| s < bs) && !self.active.contains(&k) {
                best = Some((k, s));
            }
        }
        best.map(|(k, _)| (k, 1.0))
    }

    fn run(mut self, hint: &[usize]) -> Result<QpResult> {
        if !hint.is_empty() && !self.warm_start(hint) {
            self.reset();
        }
        let n = self.x.len();
        let cap = 50 * (self.cons.len() + n) + 1000;
        while let Some((p, sign)) = self.select() {
            let np: Vec<f64> = self.normal(p).iter().map(|v| sign * v).collect();
            let bp = sign * self.cons.rhs[p];
            let mut lam_p = 0.0;
            loop {
                self.iterations += 1;
                if self.iterations > cap {
                    return Err(Error::NumericalFailure(format!(
                        "dual active-set method exceeded {cap} steps"
                    )));
                }
                let k = self.k();
                let g: Vec<f64> = (0..k).map(|pos| self.active_normal_dot(pos, &np)).collect();
                let r = if k > 0 { self.backward(&self.forward(&g)) } else { Vec::new() };
                let mut z: Vec<f64> = np.clone();
                for pos in 0..k {
                    let nk = self.normal(self.active[pos]);
                    let coef = r[pos] * self.sign[pos];
                    for (zj, nj) in z.iter_mut().zip(nk) {
                        *zj -= coef * nj;
                    }
                }
                for (zj, dj) in z.iter_mut().zip(self.d) {
                    *zj /= dj;
                }
                let zn = dot(&z, &np);
                let s = dot(&np, &self.x) - bp;
                let full = if zn > 1e-13 * self.dinv_dot(&np, &np) { -s / zn } else { f64::INFINITY };
                let mut partial = f64::INFINITY;
                let mut leave = None;
                for pos in 0..k {
                    if self.cons.is_eq(self.active[pos]) || r[pos] <= 1e-14 {
                        continue;
                    }
                    let t = self.lambda[pos] / r[pos];
                    if t < partial {
                        partial = t;
                        leave = Some(pos);
                    }
                }
                let t = full.min(partial);
                if !t.is_finite() {
                    return Ok(QpResult::infeasible(n, self.iterations));
                }
                if full.is_finite() {
                    for (xj, zj) in self.x.iter_mut().zip(&z) {
                        *xj += t * zj;
                    }
                }
                for pos in 0..k {
                    self.lambda[pos] -= t * r[pos];
                }
                lam_p += t;
                if full <= partial {
                    if !self.append(p, sign, &g, lam_p) {
                        return Err(Error::NumericalFailure(
                            "dependent constraint reached the active set".into(),
                        ));
                    }
                    break;
                }
                let pos = leave.expect("partial step has a leaving constraint");
                self.drop_at(pos);
                if self.chol.is_empty() && self.k() > 0 {
                    return Err(Error::NumericalFailure("active-set factor lost rank".into()));
                }
            }
        }
        let objective = self
            .x
            .iter()
            .zip(self.d)
            .zip(self.c)
            .map(|((x, d), c)| 0.5 * d * x * x + c * x)
            .sum();
        let multipliers = self
            .lambda
            .iter()
            .zip(&self.sign)
            .map(|(l, s)| l * s)
            .collect();
        Ok(QpResult {
            status: Status::Optimal,
            x: self.x,
            objective,
            iterations: self.iterations,
            active: self.active,
            multipliers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sse(p: &QpProblem, x: &[f64], target: &[f64]) -> f64 {
        let _ = p;
        x.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    #[test]
    fn clamped_scalar() {
        // min (z − 1)² s.t. z ≤ 0
        let mut p = QpProblem::least_squares(&[1.0], &[1.0]);
        p.leq(&[1.0], 0.0);
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(r.x[0].abs() < 1e-12);
        assert!((sse(&p, &r.x, &[1.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halfspace_projections() {
        let y = [0.0, 1.0, 0.0];
        let mut p = QpProblem::least_squares(&y, &[1.0; 3]);
        p.leq(&[-1.0, 1.0, 0.0], 0.0); // z₂ ≤ z₁
        let r = solve_qp(&p).unwrap();
        for (a, b) in r.x.iter().zip([0.5, 0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((sse(&p, &r.x, &y) - 0.5).abs() < 1e-12);

        let mut p = QpProblem::least_squares(&y, &[1.0; 3]);
        p.leq(&[0.0, 1.0, -1.0], 0.0); // z₂ ≤ z₃
        let r = solve_qp(&p).unwrap();
        for (a, b) in r.x.iter().zip([0.0, 0.5, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn contradictory_constraints_are_infeasible() {
        let mut p = QpProblem::least_squares(&[0.0, 0.0], &[1.0, 1.0]);
        p.leq(&[1.0, 0.0], -1.0).leq(&[-1.0, 0.0], -1.0);
        assert_eq!(solve_qp(&p).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn equality_and_bounds() {
        // min (x−2)² + (y−2)² s.t. x + y = 1, y ≥ 0.75
        let mut p = QpProblem::least_squares(&[2.0, 2.0], &[1.0, 1.0]);
        p.equals(&[1.0, 1.0], 1.0).bounds(1, 0.75, f64::INFINITY);
        let r = solve_qp(&p).unwrap();
        assert!((r.x[0] - 0.25).abs() < 1e-10);
        assert!((r.x[1] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn zero_curvature_block_uses_proximal_loop() {
        // min (z − 3)² over z with z ≤ t, t ∈ [0, 1] free of cost.
        let mut p = QpProblem::new(vec![2.0, 0.0], vec![-6.0, 0.0]);
        p.leq(&[1.0, -1.0], 0.0).bounds(1, 0.0, 1.0);
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.x[0] - 1.0).abs() < 1e-9);
        assert!((r.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let y = [3.0, 1.0, 2.0, 0.5];
        let mut p = QpProblem::least_squares(&y, &[1.0; 4]);
        p.leq(&[-1.0, 1.0, 0.0, 0.0], 0.0);
        let parent = solve_qp(&p).unwrap();
        p.leq(&[0.0, -1.0, 1.0, 0.0], 0.0).leq(&[0.0, 0.0, -1.0, 1.0], 0.0);
        let cold = solve_qp(&p).unwrap();
        let warm = solve_qp_warm(&p, &parent.active).unwrap();
        for (a, b) in cold.x.iter().zip(&warm.x) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
