use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{dot, DenseMatrix, Status, PHASE_ONE_TOL};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

/// `min c·x  s.t.  A_ub x ≤ b_ub,  A_eq x = b_eq,  lower ≤ x ≤ upper`.
///
/// Bounds may be infinite. An all-zero objective turns the problem into a
/// pure feasibility test.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_ub: DenseMatrix,
    pub b_ub: Vec<f64>,
    pub a_eq: DenseMatrix,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Feasibility problem over `n` variables that are nonnegative and unbounded above.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            a_ub: DenseMatrix::new(n),
            b_ub: Vec::new(),
            a_eq: DenseMatrix::new(n),
            b_eq: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn leq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        self.a_ub.push_row(row);
        self.b_ub.push(rhs);
        self
    }

    pub fn geq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        self.leq(&neg, -rhs)
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

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let shapes_ok = self.a_ub.ncols() == n
            && self.a_eq.ncols() == n
            && self.a_ub.nrows() == self.b_ub.len()
            && self.a_eq.nrows() == self.b_eq.len()
            && self.lower.len() == n
            && self.upper.len() == n;
        if !shapes_ok {
            return Err(Error::InvalidParams(format!(
                "inconsistent LP dimensions for {n} variables"
            )));
        }
        if let Some(j) = (0..n).find(|&j| !(self.lower[j] <= self.upper[j])) {
            return Err(Error::InvalidParams(format!(
                "variable {j} has lower bound {} above upper bound {}",
                self.lower[j], self.upper[j]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: Status,
    /// Optimal point; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// How an original variable is expressed in nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + y
    Shift { col: usize, offset: f64 },
    /// x = offset − y
    Mirror { col: usize, offset: f64 },
    /// x = y⁺ − y⁻
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// `rows × (ncols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    rows: usize,
    ncols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.ncols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.ncols)
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let w = self.ncols + 1;
        let p = self.t[r * w + c];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for (v, pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, pr) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (with the negated objective value in the last slot).
    fn objective_row(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = cost.to_vec();
        obj.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.ncols {
                    obj[j] -= cb * self.at(i, j);
                }
            }
        }
        obj
    }

    /// Primal simplex with Bland's rule over columns `j < allowed`.
    fn run(&mut self, obj: &mut [f64], allowed: usize, cap: usize, iters: &mut usize) -> Result<bool> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j] < -COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, enter);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, enter, obj);
            *iters += 1;
            if *iters > cap {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {cap} pivots"
                )));
            }
        }
    }
}

/// Two-phase dense simplex with Bland's anti-cycling rule.
pub fn solve_lp(p: &LpProblem) -> Result<LpResult> {
    p.validate()?;
    let n = p.num_vars();

    // Map variables onto nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut nstd = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo.is_finite() {
            maps.push(VarMap::Shift { col: nstd, offset: lo });
            if hi.is_finite() {
                upper_rows.push((nstd, hi - lo));
            }
            nstd += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Mirror { col: nstd, offset: hi });
            nstd += 1;
        } else {
            maps.push(VarMap::Split { pos: nstd, neg: nstd + 1 });
            nstd += 2;
        }
    }

    let substitute = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; nstd];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    out[col] += a;
                    b -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    out[col] -= a;
                    b -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, b)
    };

    // Standard-form rows: (coefficients over std columns, rhs, has_slack).
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (row, &b) in p.a_ub.rows().zip(&p.b_ub) {
        let (r, b) = substitute(row, b);
        rows.push((r, b, true));
    }
    for &(col, ub) in &upper_rows {
        let mut r = vec![0.0; nstd];
        r[col] = 1.0;
        rows.push((r, ub, true));
    }
    for (row, &b) in p.a_eq.rows().zip(&p.b_eq) {
        let (r, b) = substitute(row, b);
        rows.push((r, b, false));
    }

    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.2).count();
    // Rows whose slack can start in the basis need no artificial.
    let needs_art: Vec<bool> = rows.iter().map(|(_, b, s)| !(*s && *b >= 0.0)).collect();
    let nart = needs_art.iter().filter(|&&a| a).count();
    let ncols = nstd + nslack + nart;
    let w = ncols + 1;

    let mut tab = Tableau {
        t: vec![0.0; m * w],
        rows: m,
        ncols,
        basis: vec![0; m],
    };
    let mut slack = nstd;
    let mut art = nstd + nslack;
    for (i, (r, b, has_slack)) in rows.iter().enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for (k, v) in r.iter().enumerate() {
            tab.t[i * w + k] = sign * v;
        }
        tab.t[i * w + ncols] = sign * b;
        if *has_slack {
            tab.t[i * w + slack] = sign;
            if !needs_art[i] {
                tab.basis[i] = slack;
            }
            slack += 1;
        }
        if needs_art[i] {
            tab.t[i * w + art] = 1.0;
            tab.basis[i] = art;
            art += 1;
        }
    }

    let cap = 50 * (m + ncols) + 1000;
    let mut iters = 0usize;
    let first_art = nstd + nslack;

    if nart > 0 {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        let mut obj = tab.objective_row(&cost);
        tab.run(&mut obj, ncols, cap, &mut iters)?;
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= first_art)
            .map(|i| tab.rhs(i))
            .sum();
        if infeas > PHASE_ONE_TOL {
            return Ok(LpResult {
                status: Status::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
                iterations: iters,
            });
        }
        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= first_art {
                if let Some(j) = (0..first_art).find(|&j| tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, j, &mut obj);
                }
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    for (j, &c) in p.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let mut obj = tab.objective_row(&cost);
    let bounded = tab.run(&mut obj, first_art, cap, &mut iters)?;
    if !bounded {
        return Ok(LpResult {
            status: Status::Unbounded,
            x: Vec::new(),
            objective: f64::NEG_INFINITY,
            iterations: iters,
        });
    }

    let mut y = vec![0.0; ncols];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs(i).max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|mp| match *mp {
            VarMap::Shift { col, offset } => offset + y[col],
            VarMap::Mirror { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = dot(&p.objective, &x);
    Ok(LpResult {
        status: Status::Optimal,
        x,
        objective,
        iterations: iters,
    })
}
