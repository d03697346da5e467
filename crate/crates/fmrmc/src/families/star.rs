//! Star topology: one central vertex with `m` pendant leaves. Vertex order:
//! center first, then leaves. No parameters (`m = pi.len() - 1`). Covers all
//! positive distributions; the two regimes partition on `sum(leaves)` vs
//! `2 pi_0`. For `m <= 2` the star is a path and delegates.

use crate::error::Error;
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};

use super::path::solve_path_weights;
use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct StarSolver;

impl FamilySolver for StarSolver {
    fn family(&self) -> &'static str {
        "star"
    }

    fn describe(&self) -> &'static str {
        "params: none; pi = [center, leaf_1, ..., leaf_m]"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        if desc.pi.len() < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "star needs a center and at least one leaf".into(),
            )));
        }
        let m = desc.pi.len() - 1;
        let graph = Graph::new(desc.pi.len(), &(1..=m).map(|i| (0, i)).collect::<Vec<_>>())?;
        Ok((graph, desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let pi = &desc.pi;
        if pi.len() < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "star needs a center and at least one leaf".into(),
            )));
        }
        let m = pi.len() - 1;
        let dist = desc.distribution()?;
        let center = pi[0];
        let leaves = &pi[1..];
        let graph = Graph::new(pi.len(), &(1..=m).map(|i| (0, i)).collect::<Vec<_>>())?;

        if m <= 2 {
            // star vertex k maps to path position: leaf1, center(, leaf2)
            let path_pi: Vec<f64> = if m == 1 {
                vec![pi[1], pi[0]]
            } else {
                vec![pi[1], pi[0], pi[2]]
            };
            let (q, slem, regime, conds) = solve_path_weights(&path_pi)?;
            let mut weights = EdgeWeights::new();
            weights.set(0, 1, q[0]);
            if m == 2 {
                weights.set(0, 2, q[1]);
            }
            return Ok(ClosedFormResult {
                graph,
                pi: dist,
                weights,
                slem,
                regime: format!("path-delegate/{regime}"),
                conditions: conds.checks,
                warnings: conds.warnings,
            });
        }

        let total: f64 = leaves.iter().sum();
        let mut conds = Conditions::new();
        let mut weights = EdgeWeights::new();
        let (slem, regime) = if total <= 2.0 * center + Conditions::slack_for(total, 2.0 * center)
        {
            conds.require_ge("2 pi_0 >= sum(leaves)", 2.0 * center, total);
            for (i, &l) in leaves.iter().enumerate() {
                weights.set(0, i + 1, 2.0 * center * l / (2.0 * center + total));
            }
            (total / (2.0 * center + total), "light-leaves")
        } else {
            conds.require_ge("sum(leaves) >= 2 pi_0", total, 2.0 * center);
            // hub constraint active: sum of weights equals pi_0
            for (i, &l) in leaves.iter().enumerate() {
                weights.set(0, i + 1, l * center / total);
            }
            ((total - center) / total, "hub-constrained")
        };
        // the proportional-weight solution is not optimal for every
        // distribution (strongly heterogeneous leaves admit better points
        // with non-constant leaf probabilities); verify stationarity and
        // refuse rather than return a suboptimal answer
        if !crate::solver::stationarity_probe(&graph, &dist, &weights)? {
            conds.checks.push(super::ConditionCheck {
                text: "proportional weights pass the stationarity probe".into(),
                satisfied: false,
                margin: -1.0,
            });
            return Err(refuse(
                "star",
                format!("{regime} weights are not optimal for this distribution"),
                &conds,
            ));
        }
        Ok(ClosedFormResult {
            graph,
            pi: dist,
            weights,
            slem,
            regime: regime.into(),
            conditions: conds.checks,
            warnings: conds.warnings,
        })
    }
}
