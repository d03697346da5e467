//! Complete graph. SLEM 0: the optimal chain is the rank-one kernel
//! `P = J D / sum(pi)`, recovered from weights `q_ij = pi_i pi_j / sum(pi)`.

use crate::error::Error;
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};

use super::{ClosedFormResult, FamilyError, FamilyResult, FamilySolver, TopologyDescriptor};

pub struct CompleteSolver;

impl FamilySolver for CompleteSolver {
    fn family(&self) -> &'static str {
        "complete"
    }

    fn describe(&self) -> &'static str {
        "params: none; pi in vertex order"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        if desc.pi.len() < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "complete graph needs at least 2 vertices".into(),
            )));
        }
        Ok((Graph::complete(desc.pi.len()), desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let n = desc.pi.len();
        if n < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "complete graph needs at least 2 vertices".into(),
            )));
        }
        let dist = desc.distribution()?;
        let total = dist.total();
        let mut weights = EdgeWeights::new();
        for i in 0..n {
            for j in (i + 1)..n {
                weights.set(i, j, desc.pi[i] * desc.pi[j] / total);
            }
        }
        Ok(ClosedFormResult {
            graph: Graph::complete(n),
            pi: dist,
            weights,
            slem: 0.0,
            regime: "rank-one".into(),
            conditions: Vec::new(),
            warnings: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::spectral_slem;
    use crate::graph::transition_matrix;

    #[test]
    fn two_vertices_rows_are_stationary() {
        let r = CompleteSolver
            .solve(&TopologyDescriptor::new("complete", serde_json::json!({}), vec![1.0, 3.0]))
            .unwrap();
        let c = transition_matrix(&r.graph, &r.pi, &r.weights).unwrap();
        for i in 0..2 {
            assert!((c.p[(i, 0)] - 0.25).abs() < 1e-15);
            assert!((c.p[(i, 1)] - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_four_is_quarter_matrix() {
        let r = CompleteSolver
            .solve(&TopologyDescriptor::new(
                "complete",
                serde_json::json!({}),
                vec![1.0; 4],
            ))
            .unwrap();
        let c = transition_matrix(&r.graph, &r.pi, &r.weights).unwrap();
        assert!(c.p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn spectral_slem_is_zero() {
        let r = CompleteSolver
            .solve(&TopologyDescriptor::new(
                "complete",
                serde_json::json!({}),
                vec![1.0, 2.0, 3.0],
            ))
            .unwrap();
        let s = spectral_slem(&r.graph, &r.pi, &r.weights).unwrap();
        assert!(s < 1e-12);
    }
}
