//! Star of `m >= 3` branches of length `n` whose per-branch weights share
//! common depth ratios: `pi_{i,a} / pi_{i-1,a} = chi_i` for every branch `a`.
//! `params: {"m", "n"}`; pi order: center, then depth 1 across branches,
//! depth 2 across branches, and so on (vertex of branch `a` at depth `i` has
//! index `1 + (i-1) m + a`).

use crate::error::Error;
use crate::graph::{EdgeWeights, Graph};
use crate::spectral::slem_of_chain;

use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct SemiSymmetricStarSolver;

fn star_graph(m: usize, n: usize) -> Graph {
    let idx = |depth: usize, branch: usize| 1 + (depth - 1) * m + branch;
    let mut edges: Vec<(usize, usize)> = (0..m).map(|a| (0, idx(1, a))).collect();
    for i in 2..=n {
        for a in 0..m {
            edges.push((idx(i - 1, a), idx(i, a)));
        }
    }
    Graph::new(1 + n * m, &edges).expect("star layout is valid")
}

impl FamilySolver for SemiSymmetricStarSolver {
    fn family(&self) -> &'static str {
        "semi_symmetric_star"
    }

    fn describe(&self) -> &'static str {
        "params: {m, n}; pi = [center, depth-1 across branches, depth-2 across branches, ...]"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, crate::graph::EquilibriumDistribution)> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if m < 1 || n < 1 || desc.pi.len() != 1 + n * m {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "star parameters do not match pi length".into(),
            )));
        }
        Ok((star_graph(m, n), desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if m < 3 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "semi-symmetric star needs m >= 3 branches (m <= 2 is a path)".into(),
            )));
        }
        if n < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "branch length n must be >= 1".into(),
            )));
        }
        if desc.pi.len() != 1 + n * m {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "star({m}, {n}) has {} vertices, pi has {}",
                1 + n * m,
                desc.pi.len()
            ))));
        }
        let center = desc.pi[0];
        let at = |depth: usize, branch: usize| desc.pi[1 + (depth - 1) * m + branch];

        let mut conds = Conditions::new();
        // constant depth ratios across branches
        let mut chi = vec![f64::NAN; n + 1];
        for i in 2..=n {
            let c0 = at(i, 0) / at(i - 1, 0);
            for a in 1..m {
                let ca = at(i, a) / at(i - 1, a);
                if (ca - c0).abs() > 1e-9 * c0.abs().max(1.0) {
                    return Err(refuse(
                        "semi_symmetric_star",
                        format!("depth ratio chi_{i} differs across branches ({c0} vs {ca})"),
                        &conds,
                    ));
                }
            }
            chi[i] = c0;
        }
        let depth1_sum: f64 = (0..m).map(|a| at(1, a)).sum();
        let mut ok = conds.require_ge("2 pi_0 >= sum(depth-1)", 2.0 * center, depth1_sum);
        if n >= 2 {
            ok &= conds.require_ge("sum(depth-1) >= 2 pi_0 chi_2", depth1_sum, 2.0 * center * chi[2]);
            for i in 2..n {
                ok &= conds.require_ge(format!("chi_{} >= chi_{i}", i + 1), chi[i + 1], chi[i]);
            }
        }
        if !ok {
            return Err(refuse("semi_symmetric_star", "ratio regime conditions fail", &conds));
        }

        let graph = star_graph(m, n);
        let idx = |depth: usize, branch: usize| 1 + (depth - 1) * m + branch;
        let mut weights = EdgeWeights::new();
        for a in 0..m {
            weights.set(0, idx(1, a), 2.0 * center * at(1, a) / (2.0 * center + depth1_sum));
        }
        for i in 2..=n {
            for a in 0..m {
                let (lo, hi) = (at(i - 1, a), at(i, a));
                weights.set(idx(i - 1, a), idx(i, a), lo * hi / (lo + hi));
            }
        }

        let dist = desc.distribution()?;
        if !crate::solver::stationarity_probe(&graph, &dist, &weights)? {
            conds.checks.push(super::ConditionCheck {
                text: "ratio-symmetric weights pass the stationarity probe".into(),
                satisfied: false,
                margin: -1.0,
            });
            return Err(refuse(
                "semi_symmetric_star",
                "ratio-symmetric weights are not optimal for this distribution",
                &conds,
            ));
        }
        let chain = crate::graph::transition_matrix(&graph, &dist, &weights)?;
        let slem = slem_of_chain(&chain)?.slem;
        if n == 2 {
            // closed depth-2 formula (with the center weight included under
            // the radical); the spectral value is authoritative
            let beta = depth1_sum / (2.0 * center + depth1_sum);
            let formula = 0.5
                * (beta
                    + (beta * beta
                        + 8.0 * center * chi[2] / ((1.0 + chi[2]) * (2.0 * center + depth1_sum)))
                        .sqrt());
            debug_assert!((slem - formula).abs() < 1e-9, "spectral {slem} formula {formula}");
        }
        Ok(ClosedFormResult {
            graph,
            pi: dist,
            weights,
            slem,
            regime: "ratio-symmetric".into(),
            conditions: conds.checks,
            warnings: conds.warnings,
        })
    }
}
