//! Weighted least-squares projection onto a partial order.
//!
//! Minimizes `Σ w_i (z_i − y_i)²` subject to `z_a ≤ z_b` for every arc and a
//! common box `lo ≤ z ≤ hi`. Blocks are split recursively at their weighted
//! mean: the points whose optimal value lies above the mean form the smallest
//! maximum-weight upper set, found with a minimum cut. The unboxed solution
//! is then clipped, which is exact for a box shared by all coordinates.

use alloc::vec;
use alloc::vec::Vec;

/// Projection of `y` onto `{z : z_a ≤ z_b for (a, b) in arcs, lo ≤ z ≤ hi}`.
pub fn project_order(y: &[f64], w: &[f64], arcs: &[(usize, usize)], lo: f64, hi: f64) -> Vec<f64> {
    let n = y.len();
    let mut z = vec![0.0; n];
    if n == 0 {
        return z;
    }
    let mut succ_start = vec![0usize; n + 1];
    for &(a, b) in arcs {
        if a != b {
            succ_start[a + 1] += 1;
        }
    }
    for k in 0..n {
        succ_start[k + 1] += succ_start[k];
    }
    let mut succ = vec![0usize; succ_start[n]];
    let mut fill = succ_start.clone();
    for &(a, b) in arcs {
        if a != b {
            succ[fill[a]] = b;
            fill[a] += 1;
        }
    }
    let mut flow = Flow::new(n);
    // Blocks are contiguous ranges of `order`, split in place.
    let mut order: Vec<usize> = (0..n).collect();
    let mut stack = vec![(0, n)];
    while let Some((from, to)) = stack.pop() {
        let block = &mut order[from..to];
        let sw: f64 = block.iter().map(|&i| w[i]).sum();
        let mean = block.iter().map(|&i| w[i] * y[i]).sum::<f64>() / sw;
        if block.len() > 1 {
            let upper = flow.upper_set(block, &succ_start, &succ, |i| w[i] * (y[i] - mean));
            if upper > 0 && upper < block.len() {
                stack.push((from + upper, to));
                stack.push((from, from + upper));
                continue;
            }
        }
        for &i in block.iter() {
            z[i] = mean.max(lo).min(hi);
        }
    }
    z
}

/// Minimum-cut workspace, reused across blocks.
struct Flow {
    /// Position of each point in the current block, or `usize::MAX`.
    local: Vec<usize>,
    edges: Vec<(usize, usize, f64)>,
    start: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<f64>,
    rev: Vec<usize>,
    level: Vec<usize>,
    next: Vec<usize>,
    queue: Vec<usize>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Self {
            local: vec![usize::MAX; n],
            edges: Vec::new(),
            start: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
            rev: Vec::new(),
            level: Vec::new(),
            next: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn build(&mut self, nodes: usize) {
        self.start.clear();
        self.start.resize(nodes + 1, 0);
        for &(a, b, _) in &self.edges {
            self.start[a + 1] += 1;
            self.start[b + 1] += 1;
        }
        for k in 0..nodes {
            self.start[k + 1] += self.start[k];
        }
        let total = self.start[nodes];
        self.to.clear();
        self.to.resize(total, 0);
        self.cap.clear();
        self.cap.resize(total, 0.0);
        self.rev.clear();
        self.rev.resize(total, 0);
        self.next.clear();
        self.next.extend_from_slice(&self.start[..nodes]);
        for &(a, b, c) in &self.edges {
            let (ea, eb) = (self.next[a], self.next[b]);
            self.next[a] += 1;
            self.next[b] += 1;
            self.to[ea] = b;
            self.cap[ea] = c;
            self.rev[ea] = eb;
            self.to[eb] = a;
            self.rev[eb] = ea;
        }
    }

    /// Reorders `block` so that its smallest maximum-gain upper set comes
    /// first, and returns the size of that set.
    fn upper_set(
        &mut self,
        block: &mut [usize],
        succ_start: &[usize],
        succ: &[usize],
        gain: impl Fn(usize) -> f64,
    ) -> usize {
        let m = block.len();
        let (s, t) = (m, m + 1);
        for (k, &i) in block.iter().enumerate() {
            self.local[i] = k;
        }
        self.edges.clear();
        let mut total = 0.0;
        for (k, &i) in block.iter().enumerate() {
            let g = gain(i);
            total += g.abs();
            if g > 0.0 {
                self.edges.push((s, k, g));
            } else if g < 0.0 {
                self.edges.push((k, t, -g));
            }
            for &j in &succ[succ_start[i]..succ_start[i + 1]] {
                let l = self.local[j];
                if l != usize::MAX {
                    self.edges.push((k, l, f64::INFINITY));
                }
            }
        }
        self.build(m + 2);
        let tol = 1e-13 * total;
        while self.bfs(s, t, tol) {
            self.next.clear();
            self.next.extend_from_slice(&self.start[..m + 2]);
            while self.push(s, t, f64::INFINITY, tol) > tol {}
        }
        // Residual reachability from the source gives the smallest cut.
        self.reach(s, tol);
        for &i in block.iter() {
            self.local[i] = usize::MAX;
        }
        let mut upper = 0;
        for k in 0..m {
            if self.level[k] != usize::MAX {
                block.swap(upper, k);
                upper += 1;
            }
        }
        upper
    }

    fn bfs(&mut self, s: usize, t: usize, tol: f64) -> bool {
        let nodes = self.start.len() - 1;
        self.level.clear();
        self.level.resize(nodes, usize::MAX);
        self.level[s] = 0;
        self.queue.clear();
        self.queue.push(s);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for e in self.start[v]..self.start[v + 1] {
                let u = self.to[e];
                if self.cap[e] > tol && self.level[u] == usize::MAX {
                    self.level[u] = self.level[v] + 1;
                    self.queue.push(u);
                }
            }
        }
        self.level[t] != usize::MAX
    }

    fn push(&mut self, v: usize, t: usize, limit: f64, tol: f64) -> f64 {
        if v == t {
            return limit;
        }
        while self.next[v] < self.start[v + 1] {
            let e = self.next[v];
            let u = self.to[e];
            if self.cap[e] > tol && self.level[u] == self.level[v] + 1 {
                let got = self.push(u, t, limit.min(self.cap[e]), tol);
                if got > 0.0 {
                    self.cap[e] -= got;
                    let r = self.rev[e];
                    self.cap[r] += got;
                    return got;
                }
            }
            self.next[v] += 1;
        }
        0.0
    }

    /// Marks in `level` (anything but `usize::MAX`) the nodes reachable
    /// from `s` in the residual graph.
    fn reach(&mut self, s: usize, tol: f64) {
        self.bfs(s, s, tol);
    }
}
