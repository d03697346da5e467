//! Bistar: two stars whose centers are joined by an edge.
//! `params: {"m1", "m2"}`; pi order: left leaves, left center, right center,
//! right leaves. Solved like a 4-vertex path whose end weights are the leaf
//! sums; the two product conditions are hard, the two cubic inequalities only
//! affect strictness of the certificate and are recorded as warnings.

use crate::error::Error;
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};

use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor,
};

pub struct BistarSolver;

impl FamilySolver for BistarSolver {
    fn family(&self) -> &'static str {
        "bistar"
    }

    fn describe(&self) -> &'static str {
        "params: {m1, m2}; pi = [left leaves, left center, right center, right leaves]"
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        let m1 = desc.usize_param("m1")?;
        let m2 = desc.usize_param("m2")?;
        if desc.pi.len() != m1 + m2 + 2 {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "bistar({m1}, {m2}) has {} vertices, pi has {}",
                m1 + m2 + 2,
                desc.pi.len()
            ))));
        }
        let edges: Vec<(usize, usize)> = (0..m1)
            .map(|l| (l, m1))
            .chain(std::iter::once((m1, m1 + 1)))
            .chain((0..m2).map(|r| (m1 + 1, m1 + 2 + r)))
            .collect();
        Ok((Graph::new(m1 + m2 + 2, &edges)?, desc.distribution()?))
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let m1 = desc.usize_param("m1")?;
        let m2 = desc.usize_param("m2")?;
        if m1 < 1 || m2 < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "bistar needs at least one leaf on each side".into(),
            )));
        }
        if desc.pi.len() != m1 + m2 + 2 {
            return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
                "bistar({m1}, {m2}) has {} vertices, pi has {}",
                m1 + m2 + 2,
                desc.pi.len()
            ))));
        }
        let left = &desc.pi[..m1];
        let cl = desc.pi[m1];
        let cr = desc.pi[m1 + 1];
        let right = &desc.pi[m1 + 2..];
        let sl: f64 = left.iter().sum();
        let sr: f64 = right.iter().sum();

        let mut conds = Conditions::new();
        let mut ok = conds.require_ge("pi_L^2 >= pi_R sum(left leaves)", cl * cl, cr * sl);
        ok &= conds.require_ge("pi_R^2 >= pi_L sum(right leaves)", cr * cr, cl * sr);
        if !ok {
            return Err(refuse("bistar", "center/leaf-sum conditions fail", &conds));
        }
        conds.warn_gt(
            "strict: S-(pi_R - S-)(pi_R + S+) + S+(S- + pi_L)^2 > 0",
            sl * (cr - sl) * (cr + sr) + sr * (sl + cl) * (sl + cl),
            0.0,
        );
        conds.warn_gt(
            "strict: S+(pi_L - S+)(pi_L + S-) + S-(S+ + pi_R)^2 > 0",
            sr * (cl - sr) * (cl + sl) + sl * (sr + cr) * (sr + cr),
            0.0,
        );

        let g_edges: Vec<(usize, usize)> = (0..m1)
            .map(|l| (l, m1))
            .chain(std::iter::once((m1, m1 + 1)))
            .chain((0..m2).map(|r| (m1 + 1, m1 + 2 + r)))
            .collect();
        let graph = Graph::new(m1 + m2 + 2, &g_edges)?;
        let mut weights = EdgeWeights::new();
        for (l, &pl) in left.iter().enumerate() {
            weights.set(l, m1, cl * pl / (cl + sl));
        }
        weights.set(m1, m1 + 1, cl * cr / (cl + cr));
        for (r, &pr) in right.iter().enumerate() {
            weights.set(m1 + 1, m1 + 2 + r, cr * pr / (cr + sr));
        }

        let dist = desc.distribution()?;
        if !crate::solver::stationarity_probe(&graph, &dist, &weights)? {
            conds.checks.push(super::ConditionCheck {
                text: "bistar weights pass the stationarity probe".into(),
                satisfied: false,
                margin: -1.0,
            });
            return Err(refuse(
                "bistar",
                "weights are not optimal for this distribution",
                &conds,
            ));
        }
        let chain = crate::graph::transition_matrix(&graph, &dist, &weights)?;
        let slem = crate::spectral::slem_of_chain(&chain)?.slem;
        let formula = super::path::path4_slem(&[sl, cl, cr, sr]);
        debug_assert!((slem - formula).abs() < 1e-9, "spectral {slem} formula {formula}");
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::slem_of_chain;

    fn solve(m1: usize, m2: usize, pi: &[f64]) -> FamilyResult<ClosedFormResult> {
        BistarSolver.solve(&TopologyDescriptor::new(
            "bistar",
            serde_json::json!({"m1": m1, "m2": m2}),
            pi.to_vec(),
        ))
    }

    #[test]
    fn golden_bistar() {
        let r = solve(3, 4, &[1.8, 2.3, 1.9, 7.8, 8.3, 2.1, 1.8, 1.7, 2.6]).unwrap();
        assert!((r.slem - 0.681843).abs() < 1e-5, "slem {}", r.slem);
    }

    #[test]
    fn symmetric_instance_closed_form() {
        // pi_L = pi_R and equal leaf sums: slem = sqrt(S / (pi + S))
        let r = solve(2, 2, &[1.0, 2.0, 5.0, 5.0, 1.5, 1.5]).unwrap();
        assert!((r.slem - (3.0f64 / 8.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_contains_plus_minus_slem() {
        let r = solve(3, 4, &[1.8, 2.3, 1.9, 7.8, 8.3, 2.1, 1.8, 1.7, 2.6]).unwrap();
        let chain = crate::graph::transition_matrix(&r.graph, &r.pi, &r.weights).unwrap();
        let rep = slem_of_chain(&chain).unwrap();
        let has = |x: f64| rep.eigenvalues.iter().any(|&e| (e - x).abs() < 1e-9);
        assert!(has(r.slem) && has(-r.slem));
    }

    #[test]
    fn refuses_unbalanced_centers() {
        // tiny left center against heavy right center violates pi_L^2 >= pi_R S-
        let err = solve(2, 2, &[1.0, 1.0, 0.5, 9.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, FamilyError::Refused(_)));
    }
}
