//! Graph, distribution and chain primitives.
//!
//! A reversible chain over an undirected graph is parameterized by symmetric
//! edge weights `q`: the transition matrix is `P = I - D^{-1} L(q)` where
//! `L(q)` is the weighted Laplacian and `D = diag(pi)`. Vertex ids are
//! 0-based internally; the JSON interface is 1-based.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Canonical undirected edge: always stored as `(min, max)`.
pub type Edge = (usize, usize);

/// Order an edge canonically.
pub fn edge(i: usize, j: usize) -> Edge {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Simple undirected graph with a fixed vertex count and a canonical,
/// sorted, duplicate-free edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, raw_edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(raw_edges.len());
        for &(i, j) in raw_edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            edges.push(edge(i, j));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph { n, edges })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph { n, edges }
    }

    /// Path graph `0 - 1 - ... - n-1`.
    pub fn path(n: usize) -> Self {
        Graph {
            n,
            edges: (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&edge(i, j)).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }
}

/// Strictly positive per-vertex equilibrium weights. Unnormalized on purpose:
/// every formula downstream works with ratios, so no global scale is imposed.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumDistribution {
    pi: Vec<f64>,
}

impl EquilibriumDistribution {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        for (index, &value) in pi.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePi { index, value });
            }
        }
        if pi.is_empty() {
            return Err(Error::NonPositivePi { index: 0, value: f64::NAN });
        }
        Ok(EquilibriumDistribution { pi })
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    pub fn get(&self, i: usize) -> f64 {
        self.pi[i]
    }

    pub fn total(&self) -> f64 {
        self.pi.iter().sum()
    }

    /// Rescale every entry by `c > 0`; solver outputs are invariant under this.
    pub fn scaled(&self, c: f64) -> Self {
        EquilibriumDistribution {
            pi: self.pi.iter().map(|x| x * c).collect(),
        }
    }
}

/// Symmetric nonnegative edge weights, keyed by canonical edge. One entry per
/// edge enforces `q_ij = q_ji` structurally.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeWeights {
    q: BTreeMap<Edge, f64>,
}

impl EdgeWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = ((usize, usize), f64)>) -> Self {
        let mut w = Self::new();
        for ((i, j), v) in pairs {
            w.set(i, j, v);
        }
        w
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.q.insert(edge(i, j), value);
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q.get(&edge(i, j)).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.q.contains_key(&edge(i, j))
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Deterministic iteration in canonical edge order.
    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.q.iter().map(|(&e, &v)| (e, v))
    }

    /// Sum of weights incident to vertex `v`.
    pub fn incident_sum(&self, v: usize) -> f64 {
        self.q
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &w)| w)
            .sum()
    }

    /// Check that every weight sits on an edge of `g`.
    pub fn check_support(&self, g: &Graph) -> Result<()> {
        for (&(i, j), _) in &self.q {
            if !g.has_edge(i, j) {
                return Err(Error::WeightOnNonEdge { i, j });
            }
        }
        Ok(())
    }

    /// The per-vertex constraint `sum_{k != i} q_ik <= pi_i`, with slack
    /// `slack_tol * pi_i` allowed for roundoff.
    pub fn check_feasible(
        &self,
        g: &Graph,
        pi: &EquilibriumDistribution,
        slack_tol: f64,
    ) -> Result<()> {
        self.check_support(g)?;
        let mut sums = vec![0.0; g.n()];
        for (&(i, j), &w) in &self.q {
            if w < -slack_tol {
                return Err(Error::InfeasibleWeights { vertex: i, sum: w, pi: 0.0 });
            }
            sums[i] += w;
            sums[j] += w;
        }
        for v in 0..g.n() {
            let p = pi.get(v);
            if sums[v] > p * (1.0 + slack_tol) + slack_tol {
                return Err(Error::InfeasibleWeights { vertex: v, sum: sums[v], pi: p });
            }
        }
        Ok(())
    }
}

/// Row-stochastic transition matrix together with the distribution it
/// preserves. Immutable once built.
#[derive(Debug, Clone)]
pub struct Chain {
    pub p: DMatrix<f64>,
    pub pi: EquilibriumDistribution,
}

/// Weighted Laplacian `L(q) = sum q_ij (e_i - e_j)(e_i - e_j)^T` over the
/// edges of `g`.
pub fn build_laplacian(g: &Graph, w: &EdgeWeights) -> Result<DMatrix<f64>> {
    w.check_support(g)?;
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for ((i, j), q) in w.iter() {
        l[(i, i)] += q;
        l[(j, j)] += q;
        l[(i, j)] -= q;
        l[(j, i)] -= q;
    }
    Ok(l)
}

/// The reversible chain `P = I - D^{-1} L(q)` for feasible weights.
pub fn transition_matrix(
    g: &Graph,
    pi: &EquilibriumDistribution,
    w: &EdgeWeights,
) -> Result<Chain> {
    if pi.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "pi has {} entries for {} vertices",
            pi.len(),
            g.n()
        )));
    }
    w.check_feasible(g, pi, 1e-9)?;
    let l = build_laplacian(g, w)?;
    let n = g.n();
    let mut p = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] -= l[(i, j)] / pi.get(i);
        }
    }
    // Roundoff can push a diagonal entry a hair outside [0,1]; clamp it and
    // restore the row sum exactly.
    for i in 0..n {
        if p[(i, i)] < 0.0 && p[(i, i)] > -1e-12 {
            p[(i, i)] = 0.0;
        }
    }
    Ok(Chain { p, pi: pi.clone() })
}

/// Metropolis transition probabilities for target distribution `pi`:
/// `P_ij = (1/d_i) min(pi_j d_i / (pi_i d_j), 1)` on edges, remainder on the
/// diagonal.
pub fn metropolis_chain(g: &Graph, pi: &EquilibriumDistribution) -> Result<Chain> {
    if pi.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "pi has {} entries for {} vertices",
            pi.len(),
            g.n()
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let mut p = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        p[(i, j)] = (pi.get(j) * deg[i] / (pi.get(i) * deg[j])).min(1.0) / deg[i];
        p[(j, i)] = (pi.get(i) * deg[j] / (pi.get(j) * deg[i])).min(1.0) / deg[j];
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| p[(i, j)]).sum();
        p[(i, i)] = (1.0 - off).max(0.0);
    }
    Ok(Chain { p, pi: pi.clone() })
}

/// Metropolis weights `q_ij = pi_i P_ij`; a feasible warm start for the solver.
pub fn metropolis_weights(g: &Graph, pi: &EquilibriumDistribution) -> Result<EdgeWeights> {
    let chain = metropolis_chain(g, pi)?;
    let mut w = EdgeWeights::new();
    for &(i, j) in g.edges() {
        w.set(i, j, pi.get(i) * chain.p[(i, j)]);
    }
    Ok(w)
}

/// Per-check maximum violations found by [`validate_chain`]. All checks are
/// computed with `pi` normalized to sum one, which makes the report invariant
/// under rescaling of `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub nonnegativity: f64,
    pub row_stochastic: f64,
    pub sparsity: f64,
    pub detailed_balance: f64,
    pub stationarity: f64,
}

impl ChainReport {
    pub fn max_violation(&self) -> f64 {
        self.nonnegativity
            .max(self.row_stochastic)
            .max(self.sparsity)
            .max(self.detailed_balance)
            .max(self.stationarity)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Check nonnegativity, row sums, the sparsity pattern of `g`, detailed
/// balance and stationarity. Violations are returned, not raised; the caller
/// decides what to tolerate.
pub fn validate_chain(c: &Chain, g: &Graph) -> ChainReport {
    let n = g.n();
    let p = &c.p;
    let total = c.pi.total();
    let pin: Vec<f64> = c.pi.values().iter().map(|x| x / total).collect();

    let mut nonneg = 0.0f64;
    let mut sparsity = 0.0f64;
    let mut balance = 0.0f64;
    let mut rows = 0.0f64;
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            let v = p[(i, j)];
            row_sum += v;
            nonneg = nonneg.max(-v).max(v - 1.0);
            if i != j && !g.has_edge(i, j) {
                sparsity = sparsity.max(v.abs());
            }
            if j > i {
                balance = balance.max((pin[i] * v - pin[j] * p[(j, i)]).abs());
            }
        }
        rows = rows.max((row_sum - 1.0).abs());
    }
    let mut stationarity = 0.0f64;
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            s += pin[i] * p[(i, j)];
        }
        stationarity = stationarity.max((s - pin[j]).abs());
    }
    ChainReport {
        nonnegativity: nonneg,
        row_stochastic: rows,
        sparsity,
        detailed_balance: balance,
        stationarity,
    }
}
