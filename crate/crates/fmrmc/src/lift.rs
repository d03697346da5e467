//! Clique-lifted graphs: construction, weight and distribution transfer in
//! both directions, and the interlacing check between a lift and its base.
//!
//! Replacing base vertex `i` with a clique of `m_i` vertices (its fiber) and
//! every base edge with a complete bipartite block preserves the optimal
//! SLEM; the transferred weights below realize it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Chain, EdgeWeights, EquilibriumDistribution, Graph};

/// A base graph plus one fiber size per base vertex. Lifted vertices are
/// `(i, alpha)` with `alpha` in `0..m_i`, flattened base-vertex-major.
#[derive(Debug, Clone)]
pub struct CliqueLiftSpec {
    pub base: Graph,
    pub fibers: Vec<usize>,
}

impl CliqueLiftSpec {
    pub fn new(base: Graph, fibers: Vec<usize>) -> Result<Self> {
        if fibers.len() != base.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} fibers for {} base vertices",
                fibers.len(),
                base.n()
            )));
        }
        if fibers.iter().any(|&m| m == 0) {
            return Err(Error::BadDescriptor("fiber sizes must be >= 1".into()));
        }
        Ok(CliqueLiftSpec { base, fibers })
    }

    pub fn lifted_n(&self) -> usize {
        self.fibers.iter().sum()
    }

    /// Start index of fiber `i` in the flattened vertex order.
    pub fn offset(&self, i: usize) -> usize {
        self.fibers[..i].iter().sum()
    }

    /// Flattened index of lifted vertex `(i, alpha)`.
    pub fn index(&self, i: usize, alpha: usize) -> usize {
        self.offset(i) + alpha
    }
}

/// Positive weights on the lifted vertex set, flattened base-vertex-major.
#[derive(Debug, Clone)]
pub struct LiftedDistribution(pub EquilibriumDistribution);

/// Build the lifted graph: each fiber is a clique, each base edge becomes a
/// complete bipartite block between the two fibers.
pub fn build_lift(spec: &CliqueLiftSpec) -> Result<Graph> {
    let mut edges = Vec::new();
    for i in 0..spec.base.n() {
        let off = spec.offset(i);
        for a in 0..spec.fibers[i] {
            for b in (a + 1)..spec.fibers[i] {
                edges.push((off + a, off + b));
            }
        }
    }
    for &(i, j) in spec.base.edges() {
        let (oi, oj) = (spec.offset(i), spec.offset(j));
        for a in 0..spec.fibers[i] {
            for b in 0..spec.fibers[j] {
                edges.push((oi + a, oj + b));
            }
        }
    }
    Graph::new(spec.lifted_n(), &edges)
}

/// Base distribution obtained by summing each fiber: `pi_i = sum_alpha
/// pi~_{i,alpha}`.
pub fn aggregate_distribution(
    spec: &CliqueLiftSpec,
    lp: &LiftedDistribution,
) -> Result<EquilibriumDistribution> {
    if lp.0.len() != spec.lifted_n() {
        return Err(Error::DimensionMismatch(format!(
            "lifted distribution has {} entries for {} lifted vertices",
            lp.0.len(),
            spec.lifted_n()
        )));
    }
    let mut pi = Vec::with_capacity(spec.base.n());
    for i in 0..spec.base.n() {
        let off = spec.offset(i);
        pi.push((0..spec.fibers[i]).map(|a| lp.0.get(off + a)).sum());
    }
    EquilibriumDistribution::new(pi)
}

/// Transfer base weights to the lift:
/// cross-fiber `q~(i,j)_{a,b} = q_ij pi~_{i,a} pi~_{j,b} / (pi_i pi_j)`,
/// intra-fiber `q~(i)_{a,b} = (pi_i - sum_j q_ij) pi~_{i,a} pi~_{i,b} / pi_i^2`.
/// The lifted chain has the same SLEM as the base chain.
pub fn lift_weights(
    spec: &CliqueLiftSpec,
    base_w: &EdgeWeights,
    base_pi: &EquilibriumDistribution,
    lp: &LiftedDistribution,
) -> Result<EdgeWeights> {
    let aggregated = aggregate_distribution(spec, lp)?;
    for i in 0..spec.base.n() {
        let diff = (aggregated.get(i) - base_pi.get(i)).abs();
        if diff > 1e-9 * base_pi.get(i).max(1.0) {
            return Err(Error::DimensionMismatch(format!(
                "fiber sums disagree with base pi at vertex {i} (diff {diff:.3e})"
            )));
        }
    }
    base_w.check_feasible(&spec.base, base_pi, 1e-9)?;

    let mut out = EdgeWeights::new();
    for &(i, j) in spec.base.edges() {
        let coeff = base_w.get(i, j) / (base_pi.get(i) * base_pi.get(j));
        let (oi, oj) = (spec.offset(i), spec.offset(j));
        for a in 0..spec.fibers[i] {
            for b in 0..spec.fibers[j] {
                out.set(oi + a, oj + b, coeff * lp.0.get(oi + a) * lp.0.get(oj + b));
            }
        }
    }
    for i in 0..spec.base.n() {
        let slack = base_pi.get(i) - base_w.incident_sum(i);
        // zero weights are kept: the lifted edge set is structural
        let coeff = slack.max(0.0) / (base_pi.get(i) * base_pi.get(i));
        let off = spec.offset(i);
        for a in 0..spec.fibers[i] {
            for b in (a + 1)..spec.fibers[i] {
                out.set(off + a, off + b, coeff * lp.0.get(off + a) * lp.0.get(off + b));
            }
        }
    }
    Ok(out)
}

/// Fiber-averaging compression of a lifted chain back to base size:
/// `P = S (Lambda P~ Lambda^T) S^{-1}` with `Lambda` the row-normalized fiber
/// indicator and `S = diag(1/sqrt(m_i))`. For weights produced by
/// [`lift_weights`] this recovers the base transition matrix exactly.
pub fn compress_chain(spec: &CliqueLiftSpec, lifted: &Chain) -> Result<DMatrix<f64>> {
    let n = spec.lifted_n();
    if lifted.p.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "lifted chain has {} rows, spec expects {}",
            lifted.p.nrows(),
            n
        )));
    }
    let nb = spec.base.n();
    let mut compressed = DMatrix::zeros(nb, nb);
    for i in 0..nb {
        for j in 0..nb {
            let (oi, oj) = (spec.offset(i), spec.offset(j));
            let mut s = 0.0;
            for a in 0..spec.fibers[i] {
                for b in 0..spec.fibers[j] {
                    s += lifted.p[(oi + a, oj + b)];
                }
            }
            compressed[(i, j)] =
                s / ((spec.fibers[i] as f64).sqrt() * (spec.fibers[j] as f64).sqrt());
        }
    }
    // similarity back to row-stochastic scaling
    let mut out = DMatrix::zeros(nb, nb);
    for i in 0..nb {
        for j in 0..nb {
            out[(i, j)] =
                compressed[(i, j)] * (spec.fibers[j] as f64 / spec.fibers[i] as f64).sqrt();
        }
    }
    Ok(out)
}

/// Fiber-averaging compression of the symmetrized chain,
/// `Lambda (D^{1/2} P~ D^{-1/2}) Lambda^T`. This is a compression of a
/// symmetric matrix with orthonormal `Lambda`, so its eigenvalues interlace
/// the lifted spectrum for any feasible weights.
pub fn compress_spectral(spec: &CliqueLiftSpec, lifted: &Chain) -> Result<DMatrix<f64>> {
    let n = spec.lifted_n();
    if lifted.p.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "lifted chain has {} rows, spec expects {}",
            lifted.p.nrows(),
            n
        )));
    }
    let s = crate::spectral::symmetrized(lifted);
    let nb = spec.base.n();
    let mut out = DMatrix::zeros(nb, nb);
    for i in 0..nb {
        for j in 0..nb {
            let (oi, oj) = (spec.offset(i), spec.offset(j));
            let mut acc = 0.0;
            for a in 0..spec.fibers[i] {
                for b in 0..spec.fibers[j] {
                    acc += s[(oi + a, oj + b)];
                }
            }
            out[(i, j)] =
                acc / ((spec.fibers[i] as f64).sqrt() * (spec.fibers[j] as f64).sqrt());
        }
    }
    Ok(out)
}

/// Result of the Cauchy interlacing check between a spectrum and the spectrum
/// of one of its compressions.
#[derive(Debug, Clone)]
pub struct InterlacingReport {
    pub holds: bool,
    /// Worst violation of the interlacing inequalities (0 when `holds`).
    pub max_violation: f64,
    /// Number of base eigenvalues that also appear in the lifted spectrum
    /// (multiset match within `1e-8`).
    pub tight_count: usize,
}

/// Check `lambda_{n-m+j}(lift) <= lambda_j(base) <= lambda_j(lift)` for
/// sorted-nonincreasing inputs, and count shared eigenvalues.
pub fn verify_interlacing(lifted: &[f64], base: &[f64]) -> Result<InterlacingReport> {
    let (n, m) = (lifted.len(), base.len());
    if m > n {
        return Err(Error::DimensionMismatch(
            "base spectrum longer than lifted spectrum".into(),
        ));
    }
    for w in lifted.windows(2) {
        if w[0] < w[1] - 1e-12 {
            return Err(Error::BadDescriptor("lifted spectrum not sorted".into()));
        }
    }
    for w in base.windows(2) {
        if w[0] < w[1] - 1e-12 {
            return Err(Error::BadDescriptor("base spectrum not sorted".into()));
        }
    }
    let mut max_violation = 0.0f64;
    for j in 0..m {
        // 0-based: lambda_j(base) between lifted[j + (n - m)] and lifted[j]
        max_violation = max_violation
            .max(lifted[j + n - m] - base[j])
            .max(base[j] - lifted[j]);
    }
    let tol = 1e-8;
    let mut used = vec![false; n];
    let mut tight_count = 0;
    for &b in base {
        if let Some(k) = (0..n).find(|&k| !used[k] && (lifted[k] - b).abs() <= tol) {
            used[k] = true;
            tight_count += 1;
        }
    }
    Ok(InterlacingReport {
        holds: max_violation <= 1e-9,
        max_violation: max_violation.max(0.0),
        tight_count,
    })
}
