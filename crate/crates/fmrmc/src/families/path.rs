//! Path topology. Vertices are ordered along the path; `pi[k]` belongs to the
//! `k`-th path vertex. No parameters.

use crate::error::Error;
use crate::graph::{EquilibriumDistribution, Graph};
use crate::spectral::path_slem;

use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct PathSolver;

/// Interior-regime path weights `q_k = pi_k pi_{k+1} / (pi_k + pi_{k+1})`.
pub fn optimal_path_weights(pi: &[f64]) -> Vec<f64> {
    pi.windows(2).map(|w| w[0] * w[1] / (w[0] + w[1])).collect()
}

/// Weights, SLEM and regime for a path with the given vertex weights.
/// Kept separate from the trait so the clique-lift families can reuse it on
/// their base path.
pub fn solve_path_weights(pi: &[f64]) -> FamilyResult<(Vec<f64>, f64, String, Conditions)> {
    let n = pi.len();
    if n < 2 {
        return Err(FamilyError::Invalid(Error::BadDescriptor(
            "path needs at least 2 vertices".into(),
        )));
    }
    let dist = EquilibriumDistribution::new(pi.to_vec())?;
    let mut conds = Conditions::new();

    if n == 2 {
        let q = optimal_path_weights(pi);
        return Ok((q, 0.0, "two-vertex".into(), conds));
    }

    if n == 3 {
        let interior = conds.require_ge("pi_2^2 >= pi_1 pi_3", pi[1] * pi[1], pi[0] * pi[2]);
        if interior {
            let q = optimal_path_weights(pi);
            let s = path_slem(&dist, &q)?;
            return Ok((q, s, "interior".into(), conds));
        }
        // center too light for the interior optimum; its vertex constraint
        // binds and the weights shift toward the heavier end
        let den = pi[1] * (pi[0] + pi[2]) + 4.0 * pi[0] * pi[2];
        let q = vec![
            pi[0] * pi[1] * (pi[1] + 2.0 * pi[2]) / den,
            pi[2] * pi[1] * (pi[1] + 2.0 * pi[0]) / den,
        ];
        let s = (4.0 * pi[0] * pi[2] - pi[1] * pi[1]) / den;
        let spectral = path_slem(&dist, &q)?;
        debug_assert!((s - spectral).abs() < 1e-10);
        return Ok((q, spectral, "center-constrained".into(), conds));
    }

    let mut ok = true;
    for k in 1..n - 1 {
        ok &= conds.require_ge(
            format!("pi_{}^2 >= pi_{} pi_{}", k + 1, k, k + 2),
            pi[k] * pi[k],
            pi[k - 1] * pi[k + 1],
        );
    }
    if !ok {
        return Err(refuse("path", "interior regime conditions fail", &conds));
    }
    let q = optimal_path_weights(pi);
    let s = path_slem(&dist, &q)?;
    Ok((q, s, "interior".into(), conds))
}

impl FamilySolver for PathSolver {
    fn family(&self) -> &'static str {
        "path"
    }

    fn describe(&self) -> &'static str {
        "params: none; pi ordered along the path"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        if desc.pi.len() < 2 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "path needs at least 2 vertices".into(),
            )));
        }
        Ok((Graph::path(desc.pi.len()), desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let (q, slem, regime, conds) = solve_path_weights(&desc.pi)?;
        let graph = Graph::path(desc.pi.len());
        let mut weights = crate::graph::EdgeWeights::new();
        for (k, &v) in q.iter().enumerate() {
            weights.set(k, k + 1, v);
        }
        Ok(ClosedFormResult {
            pi: desc.distribution()?,
            graph,
            weights,
            slem,
            regime,
            conditions: conds.checks,
            warnings: conds.warnings,
        })
    }
}

/// Closed-form SLEM of the optimal 4-vertex path; used by the bistar and
/// barbell families whose reductions are 4-paths.
pub fn path4_slem(pi: &[f64; 4]) -> f64 {
    ((pi[0] * pi[2] / (pi[0] + pi[1]) + pi[1] * pi[3] / (pi[2] + pi[3])) / (pi[1] + pi[2])).sqrt()
}

/// Closed-form SLEM of the optimal 3-vertex interior path.
pub fn path3_slem(pi: &[f64; 3]) -> f64 {
    (pi[0] * pi[2] / ((pi[0] + pi[1]) * (pi[1] + pi[2]))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::spectral_slem;
    use crate::graph::EdgeWeights;

    #[test]
    fn two_vertices_mix_instantly() {
        let (q, s, _, _) = solve_path_weights(&[3.0, 5.0]).unwrap();
        assert!((q[0] - 15.0 / 8.0).abs() < 1e-15);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn golden_five_path() {
        let (_, s, regime, _) = solve_path_weights(&[1.9, 2.9, 3.1, 2.8, 1.7]).unwrap();
        assert_eq!(regime, "interior");
        assert!((s - 0.748251).abs() < 1e-5, "slem {s}");
    }

    #[test]
    fn three_path_center_constrained() {
        // pi = (1, 1, 4): center lighter than sqrt(pi_1 pi_3)
        let (q, s, regime, _) = solve_path_weights(&[1.0, 1.0, 4.0]).unwrap();
        assert_eq!(regime, "center-constrained");
        assert!((q[0] - 3.0 / 7.0).abs() < 1e-12);
        assert!((q[1] - 4.0 / 7.0).abs() < 1e-12);
        assert!((s - 5.0 / 7.0).abs() < 1e-12);
        // vertex constraint active at the center
        assert!((q[0] + q[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_path_interior_formula() {
        let (_, s, _, _) = solve_path_weights(&[1.0, 2.0, 4.0]).unwrap();
        assert!((s - path3_slem(&[1.0, 2.0, 4.0])).abs() < 1e-12);
        assert!((s - (4.0f64 / 18.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refuses_outside_interior_regime() {
        // pi_3^2 < pi_2 pi_4 makes the closed form infeasible at vertex 3
        let err = solve_path_weights(&[1.0, 1.0, 1.0, 4.0]).unwrap_err();
        match err {
            FamilyError::Refused(r) => assert_eq!(r.failed.len(), 1),
            other => panic!("expected refusal, got {other}"),
        }
    }

    #[test]
    fn solver_builds_consistent_result() {
        let desc = TopologyDescriptor::new(
            "path",
            serde_json::json!({}),
            vec![1.9, 2.9, 3.1, 2.8, 1.7],
        );
        let r = PathSolver.solve(&desc).unwrap();
        let direct = spectral_slem(&r.graph, &r.pi, &r.weights).unwrap();
        assert!((direct - r.slem).abs() < 1e-12);
        assert!(r
            .weights
            .check_feasible(&r.graph, &r.pi, 1e-12)
            .is_ok());
        let _ = EdgeWeights::new();
    }
}
