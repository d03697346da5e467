//! Palm topology: a path with a bundle of pendant leaves at one end.
//! `params: {"leaves": n, "path": m}` with `m` path edges; pi order: the `n`
//! leaves first, then path vertices from the leafy end (`0`) to the free end
//! (`m`). Total vertices `n + m + 1`.

use crate::error::Error;
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};
use crate::spectral::slem_of_chain;

use super::path::solve_path_weights;
use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct PalmSolver;

fn palm_graph(n_leaves: usize, path_edges: usize) -> Graph {
    let hub = n_leaves; // path vertex 0
    let mut edges: Vec<(usize, usize)> = (0..n_leaves).map(|l| (l, hub)).collect();
    for k in 0..path_edges {
        edges.push((hub + k, hub + k + 1));
    }
    Graph::new(n_leaves + path_edges + 1, &edges).expect("palm layout is a valid graph")
}

impl FamilySolver for PalmSolver {
    fn family(&self) -> &'static str {
        "palm"
    }

    fn describe(&self) -> &'static str {
        "params: {leaves: n, path: m edges}; pi = [leaf_1..leaf_n, path vertex 0.., path vertex m]"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        let n_leaves = desc.usize_param("leaves")?;
        let path_edges = desc.usize_param("path")?;
        if desc.pi.len() != n_leaves + path_edges + 1 {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "palm({n_leaves}, {path_edges}) has {} vertices, pi has {}",
                n_leaves + path_edges + 1,
                desc.pi.len()
            ))));
        }
        Ok((palm_graph(n_leaves, path_edges), desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let n_leaves = desc.usize_param("leaves")?;
        let path_edges = desc.usize_param("path")?;
        if n_leaves < 1 || path_edges < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "palm needs at least one leaf and one path edge".into(),
            )));
        }
        if desc.pi.len() != n_leaves + path_edges + 1 {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "palm({n_leaves}, {path_edges}) has {} vertices, pi has {}",
                n_leaves + path_edges + 1,
                desc.pi.len()
            ))));
        }
        let graph = palm_graph(n_leaves, path_edges);
        let dist = desc.distribution()?;
        let leaves = &desc.pi[..n_leaves];
        let path_pi = &desc.pi[n_leaves..];

        if n_leaves == 1 {
            // a single leaf extends the path by one vertex
            let mut full: Vec<f64> = vec![leaves[0]];
            full.extend_from_slice(path_pi);
            let (q, slem, regime, conds) = solve_path_weights(&full)?;
            let mut weights = EdgeWeights::new();
            weights.set(0, 1, q[0]);
            for k in 1..q.len() {
                weights.set(k, k + 1, q[k]);
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

        let leaf_sum: f64 = leaves.iter().sum();
        let p0 = path_pi[0];
        let p1 = path_pi[1];
        let mut conds = Conditions::new();
        let mut ok = conds.require_ge("pi_0^2 >= pi_1 sum(leaves)", p0 * p0, p1 * leaf_sum);
        ok &= conds.require_ge("pi_1 >= sum(leaves)", p1, leaf_sum);
        for k in 1..path_edges {
            ok &= conds.require_ge(
                format!("path pi_{k}^2 >= pi_{} pi_{}", k - 1, k + 1),
                path_pi[k] * path_pi[k],
                path_pi[k - 1] * path_pi[k + 1],
            );
        }
        if !ok {
            return Err(refuse("palm", "palm regime conditions fail", &conds));
        }

        let hub = n_leaves;
        let mut weights = EdgeWeights::new();
        for (l, &pl) in leaves.iter().enumerate() {
            weights.set(l, hub, p0 * pl / (p0 + leaf_sum));
        }
        weights.set(hub, hub + 1, p0 * p1 / (p0 + p1));
        for k in 1..path_edges {
            weights.set(
                hub + k,
                hub + k + 1,
                path_pi[k] * path_pi[k + 1] / (path_pi[k] + path_pi[k + 1]),
            );
        }
        if !crate::solver::stationarity_probe(&graph, &dist, &weights)? {
            conds.checks.push(super::ConditionCheck {
                text: "palm weights pass the stationarity probe".into(),
                satisfied: false,
                margin: -1.0,
            });
            return Err(refuse("palm", "weights are not optimal for this distribution", &conds));
        }
        let chain = crate::graph::transition_matrix(&graph, &dist, &weights)?;
        let slem = slem_of_chain(&chain)?.slem;
        Ok(ClosedFormResult {
            graph,
            pi: dist,
            weights,
            slem,
            regime: "interior".into(),
            conditions: conds.checks,
            warnings: conds.warnings,
        })
    }
}

/// Leaf and first-path-edge weights of a palm; shared with the subgraph
/// engine, which assigns them without building the standalone graph.
pub fn palm_local_weights(leaves: &[f64], p0: f64, p1: f64) -> (Vec<f64>, f64) {
    let leaf_sum: f64 = leaves.iter().sum();
    let leaf_w = leaves.iter().map(|&pl| p0 * pl / (p0 + leaf_sum)).collect();
    (leaf_w, p0 * p1 / (p0 + p1))
}

/// The palm regime inequalities on `(leaves, path pi)`, exposed for the
/// subgraph engine (path conditions over the interior path vertices it owns).
pub fn palm_conditions(leaves: &[f64], path_pi: &[f64], interior_up_to: usize) -> Conditions {
    let leaf_sum: f64 = leaves.iter().sum();
    let mut conds = Conditions::new();
    conds.require_ge(
        "pi_0^2 >= pi_1 sum(leaves)",
        path_pi[0] * path_pi[0],
        path_pi[1] * leaf_sum,
    );
    conds.require_ge("pi_1 >= sum(leaves)", path_pi[1], leaf_sum);
    for k in 1..interior_up_to {
        conds.require_ge(
            format!("path pi_{k}^2 >= pi_{} pi_{}", k - 1, k + 1),
            path_pi[k] * path_pi[k],
            path_pi[k - 1] * path_pi[k + 1],
        );
    }
    conds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::spectral_slem;

    fn desc(params: serde_json::Value, pi: &[f64]) -> TopologyDescriptor {
        TopologyDescriptor::new("palm", params, pi.to_vec())
    }

    #[test]
    fn fig8_style_leaf_weights() {
        // leaves (0.8, 0.9, 1.0, 1.1) on a hub with pi 7, path (7, 6)
        let r = PalmSolver
            .solve(&desc(
                serde_json::json!({"leaves": 4, "path": 1}),
                &[0.8, 0.9, 1.0, 1.1, 7.0, 6.0],
            ))
            .unwrap();
        assert!((r.weights.get(0, 4) - 5.6 / 10.8).abs() < 1e-12);
        assert!((r.weights.get(1, 4) - 6.3 / 10.8).abs() < 1e-12);
        assert!((r.weights.get(4, 5) - 42.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn single_leaf_reduces_to_path() {
        let r = PalmSolver
            .solve(&desc(serde_json::json!({"leaves": 1, "path": 2}), &[0.5, 1.0, 0.9, 0.8]))
            .unwrap();
        let (q, s, _, _) = solve_path_weights(&[0.5, 1.0, 0.9, 0.8]).unwrap();
        assert!((r.slem - s).abs() < 1e-12);
        assert!((r.weights.get(0, 1) - q[0]).abs() < 1e-15);
        assert!((r.weights.get(2, 3) - q[2]).abs() < 1e-15);
    }

    #[test]
    fn refuses_heavy_leaves() {
        let err = PalmSolver
            .solve(&desc(
                serde_json::json!({"leaves": 3, "path": 2}),
                &[2.0, 2.0, 2.0, 3.0, 1.0, 0.5],
            ))
            .unwrap_err();
        assert!(matches!(err, FamilyError::Refused(_)));
    }

    #[test]
    fn slem_matches_spectral_evaluation() {
        let r = PalmSolver
            .solve(&desc(
                serde_json::json!({"leaves": 3, "path": 2}),
                &[0.4, 0.5, 0.6, 4.0, 2.0, 0.9],
            ))
            .unwrap();
        let direct = spectral_slem(&r.graph, &r.pi, &r.weights).unwrap();
        assert!((direct - r.slem).abs() < 1e-12);
    }
}
