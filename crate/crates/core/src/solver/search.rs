//! Best-first branch-and-bound over order relations.
//!
//! A node is a set of arcs `z_a ≤ z_b`, each of which fixes one indicator
//! `u_ba` to zero. Its bound is the projection onto the arcs and the `Γ` box.
//! If the projection is feasible the node is a leaf. Otherwise some point
//! `X_i` lies in the hull of a support set `T` of points with smaller values,
//! so every feasible vector has `z_i ≤ z_t` for some `t ∈ T`; the children
//! split on the first such `t` in a fixed order. A few of the largest
//! violations are tried and the one whose weakest child is strongest wins.
//! Children are classified only when they leave the queue.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{MiqpModel, SolveStatus, ThetaSolution};
use crate::error::{Error, Result};
use crate::feasibility::{check_kind, max_separation, separator_box, TIE_TOL};
use crate::geometry::{dominated_by, hull_support, HullKind};
use crate::numeric::project_order;

/// Reflexive-transitive closure of the arcs, one bitset row per point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Closure {
    words: usize,
    bits: Vec<u64>,
}

impl Closure {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut c = Self { words, bits: vec![0; n * words] };
        for p in 0..n {
            c.set(p, p);
        }
        c
    }

    fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    /// Adds `a ≤ b`; false if it was already implied.
    fn add(&mut self, a: usize, b: usize) -> bool {
        if self.get(a, b) {
            return false;
        }
        let w = self.words;
        let row_b: Vec<u64> = self.bits[b * w..(b + 1) * w].to_vec();
        let n = self.bits.len() / w;
        for p in 0..n {
            if self.get(p, a) {
                for (dst, src) in self.bits[p * w..(p + 1) * w].iter_mut().zip(&row_b) {
                    *dst |= src;
                }
            }
        }
        true
    }
}

/// A violated level-set constraint: `X_i` lies in the hull of `support`,
/// every member of which has a smaller value.
struct Violation {
    i: usize,
    support: Vec<usize>,
    amount: f64,
}

struct Relaxed {
    arcs: Vec<(usize, usize)>,
    closure: Closure,
    z: Vec<f64>,
    bound: f64,
}

struct Node {
    arcs: Vec<(usize, usize)>,
    closure: Closure,
    z: Vec<f64>,
    bound: f64,
    /// Largest violation first; empty for a feasible leaf.
    violations: Vec<Violation>,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.violations.is_empty()
    }
}

type Split = (Vec<(usize, usize)>, Closure);

struct Queued {
    bound: f64,
    seq: u64,
    node: Relaxed,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // Max-heap order: smallest bound first, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

/// Violations scored by trial child relaxations before branching.
const STRONG_CANDIDATES: usize = 3;

struct Search<'a> {
    model: &'a MiqpModel,
    kind: HullKind,
    tie_tol: f64,
    #[cfg_attr(not(feature = "std"), allow(dead_code))]
    parallel: bool,
}

impl Search<'_> {
    fn relax(&self, (arcs, closure): Split) -> Relaxed {
        let (lo, hi) = self.model.z_bounds();
        let z = project_order(&self.model.y, &self.model.weights, &arcs, lo, hi);
        let bound = sse(self.model, &z);
        Relaxed { arcs, closure, z, bound }
    }

    fn classify(&self, r: Relaxed) -> Result<Node> {
        let violations = self.violations(&r.z)?;
        Ok(Node {
            arcs: r.arcs,
            closure: r.closure,
            z: r.z,
            bound: r.bound,
            violations,
        })
    }

    /// Every violated level-set constraint at `z`.
    fn violations(&self, z: &[f64]) -> Result<Vec<Violation>> {
        let pts = &self.model.points;
        let mut out = Vec::new();
        let mut below = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            below.clear();
            below.extend((0..z.len()).filter(|&j| z[j] < z[i] - self.tie_tol));
            if below.is_empty() {
                continue;
            }
            if let Some(support) = hull_support(pts.point(i), pts, &below, self.kind)? {
                let top = support.iter().map(|&j| z[j]).fold(f64::NEG_INFINITY, f64::max);
                out.push(Violation { i, support, amount: z[i] - top });
            }
        }
        out.sort_by(|a, b| b.amount.total_cmp(&a.amount).then(a.i.cmp(&b.i)));
        Ok(out)
    }

    /// Children enforcing `z_i ≤ z_t` for the first support point `t` (in
    /// order of decreasing value) that satisfies it.
    fn split(&self, node: &Node, v: &Violation) -> Vec<Split> {
        let mut order = v.support.clone();
        order.sort_by(|&a, &b| node.z[b].total_cmp(&node.z[a]).then(a.cmp(&b)));
        let mut out = Vec::with_capacity(order.len());
        for k in 0..order.len() {
            let mut arcs = node.arcs.clone();
            let mut closure = node.closure.clone();
            if closure.add(v.i, order[k]) {
                arcs.push((v.i, order[k]));
            }
            for &t in &order[..k] {
                if closure.add(t, v.i) {
                    arcs.push((t, v.i));
                }
            }
            out.push((arcs, closure));
        }
        out
    }

    fn relax_all(&self, splits: Vec<Split>) -> Vec<Relaxed> {
        #[cfg(feature = "std")]
        if self.parallel && splits.len() > 1 {
            use rayon::prelude::*;
            return splits.into_par_iter().map(|s| self.relax(s)).collect();
        }
        splits.into_iter().map(|s| self.relax(s)).collect()
    }

    /// Branches on the candidate violation whose children have the largest
    /// smallest bound, and returns the new children that survive pruning
    /// against `cutoff` and have not been seen before.
    fn expand(&self, node: &Node, cutoff: f64, seen: &mut BTreeSet<Closure>) -> Vec<Relaxed> {
        let pool = &node.violations[..node.violations.len().min(STRONG_CANDIDATES)];
        let mut splits = Vec::new();
        let mut owner = Vec::new();
        for (c, v) in pool.iter().enumerate() {
            for s in self.split(node, v) {
                splits.push(s);
                owner.push(c);
            }
        }
        let relaxed = self.relax_all(splits);
        let chosen = if pool.len() == 1 {
            0
        } else {
            let mut score = vec![(f64::INFINITY, 0.0f64); pool.len()];
            for (r, &c) in relaxed.iter().zip(&owner) {
                let b = r.bound.min(cutoff);
                score[c] = (score[c].0.min(b), score[c].1 + b);
            }
            (0..pool.len())
                .max_by(|&a, &b| {
                    score[a]
                        .0
                        .total_cmp(&score[b].0)
                        .then(score[a].1.total_cmp(&score[b].1))
                        .then(b.cmp(&a))
                })
                .unwrap_or(0)
        };
        relaxed
            .into_iter()
            .zip(owner)
            .filter(|(r, c)| *c == chosen && r.bound < cutoff)
            .map(|(r, _)| r)
            .filter(|r| seen.insert(r.closure.clone()))
            .collect()
    }
}

/// Arcs implied by coordinatewise dominance (and by repeated points), after
/// transitive reduction.
fn forced_arcs(model: &MiqpModel, kind: HullKind) -> Vec<(usize, usize)> {
    let pts = &model.points;
    let n = model.n();
    // implies(i, j): X_i ∈ Cv†({X_j}) (or the analogue), so z_i ≤ z_j.
    let implies = |i: usize, j: usize| match kind {
        HullKind::Upper => dominated_by(pts.point(j), pts.point(i)),
        HullKind::Lower => dominated_by(pts.point(i), pts.point(j)),
        HullKind::Plain => pts.point(i) == pts.point(j),
    };
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !implies(i, j) {
                continue;
            }
            if pts.point(i) == pts.point(j) {
                arcs.push((i, j));
                continue;
            }
            let redundant = (0..n).any(|k| {
                k != i
                    && k != j
                    && pts.point(k) != pts.point(i)
                    && pts.point(k) != pts.point(j)
                    && implies(i, k)
                    && implies(k, j)
            });
            if !redundant {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// Replaces runs of values whose consecutive gaps are at most `tol` by their
/// weighted mean, so near-ties become exact.
fn snap_ties(z: &[f64], w: &[f64], tol: f64) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    let mut out = z.to_vec();
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && z[idx[end]] - z[idx[end - 1]] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let (mut sw, mut swz) = (0.0, 0.0);
            for &k in &idx[start..end] {
                sw += w[k];
                swz += w[k] * z[k];
            }
            let lo = z[idx[start]];
            let hi = z[idx[end - 1]];
            let m = (swz / sw).clamp(lo, hi);
            for &k in &idx[start..end] {
                out[k] = m;
            }
        }
        start = end;
    }
    out
}

#[cfg(feature = "std")]
struct Clock(std::time::Instant);
#[cfg(feature = "std")]
impl Clock {
    fn start() -> Self {
        Self(std::time::Instant::now())
    }
    fn ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}
#[cfg(not(feature = "std"))]
struct Clock;
#[cfg(not(feature = "std"))]
impl Clock {
    fn start() -> Self {
        Clock
    }
    fn ms(&self) -> f64 {
        0.0
    }
}

/// Solves the model by branch-and-bound.
///
/// Returns the best vector found. When the node limit is hit the status is
/// [`SolveStatus::NodeLimit`] and `gap` holds the remaining optimality gap.
pub fn solve(model: &MiqpModel) -> Result<ThetaSolution> {
    let clock = Clock::start();
    let n = model.n();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let kind = model.hull_kind();
    let scale = model.y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let search = Search { model, kind, tie_tol: 1e-9 * scale, parallel: model.parallel };

    let mut closure = Closure::new(n);
    let mut arcs = Vec::new();
    for (a, b) in forced_arcs(model, kind) {
        if closure.add(a, b) {
            arcs.push((a, b));
        }
    }
    let mut seen = BTreeSet::new();
    seen.insert(closure.clone());
    let root = search.classify(search.relax((arcs, closure)))?;
    let mut nodes = 1usize;

    // Constant fit: always feasible.
    let (lo, hi) = model.z_bounds();
    let mean = {
        let sw: f64 = model.weights.iter().sum();
        let swy: f64 = model.weights.iter().zip(&model.y).map(|(w, y)| w * y).sum();
        (swy / sw).clamp(lo, hi)
    };
    let mut best_z = vec![mean; n];
    let mut best = sse(model, &best_z);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Queued>, node: Relaxed| {
        seq += 1;
        heap.push(Queued { bound: node.bound, seq, node });
    };
    let offer = |node: &Node, best: &mut f64, best_z: &mut Vec<f64>| {
        if node.is_leaf() && node.bound < *best {
            *best = node.bound;
            *best_z = node.z.clone();
        }
    };

    // Greedy dive for an early incumbent. Children are classified only when
    // they are taken, so siblings go to the queue unclassified.
    let mut cur = root;
    loop {
        offer(&cur, &mut best, &mut best_z);
        if cur.is_leaf() {
            break;
        }
        if nodes >= model.max_nodes {
            // Left for the main loop, which reports the limit.
            let Node { arcs, closure, z, bound, .. } = cur;
            push(&mut heap, Relaxed { arcs, closure, z, bound });
            break;
        }
        let mut kids = search.expand(&cur, best - model.gap, &mut seen);
        nodes += kids.len();
        if kids.is_empty() {
            break;
        }
        let pos = (0..kids.len())
            .min_by(|&a, &b| kids[a].bound.total_cmp(&kids[b].bound))
            .unwrap();
        let next = kids.swap_remove(pos);
        for k in kids {
            push(&mut heap, k);
        }
        cur = search.classify(next)?;
    }

    let mut status = SolveStatus::Optimal;
    let mut frontier = f64::INFINITY;
    while let Some(q) = heap.pop() {
        if q.bound >= best - model.gap {
            frontier = q.bound;
            break;
        }
        let node = search.classify(q.node)?;
        if node.is_leaf() {
            offer(&node, &mut best, &mut best_z);
            continue;
        }
        if nodes >= model.max_nodes {
            status = SolveStatus::NodeLimit;
            frontier = q.bound;
            break;
        }
        let kids = search.expand(&node, best - model.gap, &mut seen);
        nodes += kids.len();
        for k in kids {
            push(&mut heap, k);
        }
    }
    let lower_bound = frontier.min(best);

    let z = snap_ties(&best_z, &model.weights, search.tie_tol);
    let theta: Vec<f64> = z.iter().map(|v| v + model.y_center).collect();
    if !check_kind(&theta, &model.points, kind, TIE_TOL)?.feasible {
        return Err(Error::NumericalFailure("incumbent failed the exact membership check".into()));
    }
    let objective = sse(model, &z);

    let boxed = separator_box(kind, model.xi_bound);
    let mut u = vec![vec![false; n]; n];
    let mut xi = Vec::with_capacity(n);
    let mut min_margin = f64::INFINITY;
    for j in 0..n {
        let targets: Vec<usize> = (0..n).filter(|&i| theta[i] < theta[j]).collect();
        for &i in &targets {
            u[i][j] = true;
        }
        let (g, margin) = max_separation(&model.points, j, &targets, boxed)?;
        min_margin = min_margin.min(margin);
        xi.push(g);
    }

    Ok(ThetaSolution {
        theta,
        xi,
        u,
        objective,
        lower_bound,
        gap: (objective - lower_bound).max(0.0),
        nodes,
        wall_ms: clock.ms(),
        status,
        min_margin,
    })
}

fn sse(model: &MiqpModel, z: &[f64]) -> f64 {
    model
        .y
        .iter()
        .zip(z)
        .zip(&model.weights)
        .map(|((y, z), w)| w * (y - z) * (y - z))
        .sum()
}
