//! Complete-cored symmetric star: `m` paths of length `n` whose inner
//! endpoints form a clique (the core), with depth-symmetric equilibrium
//! weights. The spectrum reduces to an `(n+1)`-vertex path with a self loop
//! of weight `m q_0` on the core end ([`crate::spectral::ccs_reduced_chain`]).
//!
//! `params: {"m", "n"}`; pi depth-indexed (length `n + 1`). Vertices are
//! depth-major: the `m` core vertices first, then depth 1 across branches,
//! and so on (branch `b` at depth `j` has index `j m + b`).

use crate::error::Error;
use crate::graph::{EdgeWeights, Graph};
use crate::spectral::{ccs_reduced_chain, ccs_reduced_slem};

use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct CcsStarSolver;

fn ccs_graph(m: usize, n: usize) -> Graph {
    let idx = |depth: usize, branch: usize| depth * m + branch;
    let mut edges = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            edges.push((idx(0, a), idx(0, b)));
        }
    }
    for j in 1..=n {
        for b in 0..m {
            edges.push((idx(j - 1, b), idx(j, b)));
        }
    }
    Graph::new(m * (n + 1), &edges).expect("core-star layout is valid")
}

impl FamilySolver for CcsStarSolver {
    fn family(&self) -> &'static str {
        "ccs_star"
    }

    fn describe(&self) -> &'static str {
        "params: {m, n}; pi depth-indexed [core, depth 1, ..., depth n]; vertices depth-major"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, crate::graph::EquilibriumDistribution)> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if m < 2 || n < 1 || desc.pi.len() != n + 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "core-star parameters do not match pi length".into(),
            )));
        }
        let mut pi_full = Vec::with_capacity(m * (n + 1));
        for j in 0..=n {
            pi_full.extend(std::iter::repeat(desc.pi[j]).take(m));
        }
        Ok((
            ccs_graph(m, n),
            crate::graph::EquilibriumDistribution::new(pi_full)?,
        ))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if m < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "complete-cored star needs m >= 2 branches (the core is empty otherwise)".into(),
            )));
        }
        if n < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "branch length n must be >= 1".into(),
            )));
        }
        if desc.pi.len() != n + 1 {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "depth-indexed pi must have {} entries, got {}",
                n + 1,
                desc.pi.len()
            ))));
        }
        let pid = &desc.pi;
        let mf = m as f64;

        let mut conds = Conditions::new();
        let mut ok = conds.require_ge("pi_0 >= (m-1) pi_1", pid[0], (mf - 1.0) * pid[1]);
        for j in 1..n {
            ok &= conds.require_ge(
                format!("pi_{j}^2 >= pi_{} pi_{}", j - 1, j + 1),
                pid[j] * pid[j],
                pid[j - 1] * pid[j + 1],
            );
        }
        if !ok {
            // the printed alternate regime for (m-1) pi_1 > pi_0 does not
            // reproduce the optimum (its value lies below the attainable
            // minimum on verified instances), so everything outside the core
            // regime is refused and handled numerically
            return Err(refuse("ccs_star", "core regime conditions fail", &conds));
        }

        let mut q = vec![pid[0] / mf];
        for j in 1..=n {
            q.push(pid[j] * pid[j - 1] / (pid[j] + pid[j - 1]));
        }
        let reduced = ccs_reduced_chain(m, pid, &q)?;
        let slem = ccs_reduced_slem(&reduced)?;

        let graph = ccs_graph(m, n);
        let mut pi_full = Vec::with_capacity(m * (n + 1));
        for j in 0..=n {
            pi_full.extend(std::iter::repeat(pid[j]).take(m));
        }
        let mut weights = EdgeWeights::new();
        let idx = |depth: usize, branch: usize| depth * m + branch;
        for a in 0..m {
            for b in (a + 1)..m {
                weights.set(idx(0, a), idx(0, b), q[0]);
            }
        }
        for j in 1..=n {
            for b in 0..m {
                weights.set(idx(j - 1, b), idx(j, b), q[j]);
            }
        }
        Ok(ClosedFormResult {
            pi: crate::graph::EquilibriumDistribution::new(pi_full)?,
            graph,
            weights,
            slem,
            regime: "core".into(),
            conditions: conds.checks,
            warnings: conds.warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::spectral_slem;

    fn solve(m: usize, n: usize, pid: &[f64]) -> FamilyResult<ClosedFormResult> {
        CcsStarSolver.solve(&TopologyDescriptor::new(
            "ccs_star",
            serde_json::json!({"m": m, "n": n}),
            pid.to_vec(),
        ))
    }

    #[test]
    fn golden_example() {
        let r = solve(3, 2, &[12.8, 4.7, 1.1]).unwrap();
        assert!((r.slem - 0.638193).abs() < 1e-5, "slem {}", r.slem);
        // depth-2 closed form with the pi_0 pi_2 numerator
        let (p0, p1, p2) = (12.8f64, 4.7, 1.1);
        let formula =
            (p1 / (p0 + p1) + p0 * p2 / ((p0 + p1) * (p1 + p2))).sqrt();
        assert!((r.slem - formula).abs() < 1e-12);
        // reduction agrees with the full graph
        let direct = spectral_slem(&r.graph, &r.pi, &r.weights).unwrap();
        assert!((direct - r.slem).abs() < 1e-10);
    }

    #[test]
    fn depth_one_closed_form() {
        let r = solve(3, 1, &[2.0, 0.9]).unwrap();
        assert!((r.slem - (0.9f64 / 2.9).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_two_branches() {
        // m=2, n=1: 4-vertex graph; reduction matches the direct spectrum
        let r = solve(2, 1, &[3.0, 1.2]).unwrap();
        assert_eq!(r.graph.n(), 4);
        let direct = spectral_slem(&r.graph, &r.pi, &r.weights).unwrap();
        assert!((direct - r.slem).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_branch() {
        let err = solve(1, 1, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, FamilyError::Invalid(_)));
    }

    #[test]
    fn refuses_heavy_depth_one() {
        // (m-1) pi_1 > pi_0: outside the core regime
        let err = solve(3, 2, &[1.0, 2.0, 0.5]).unwrap_err();
        assert!(matches!(err, FamilyError::Refused(_)));
    }
}
