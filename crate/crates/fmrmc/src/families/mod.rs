//! Closed-form topology solvers behind a common trait.
//!
//! Each recognized topology family (path, star, clique-lift families,
//! symmetric trees, ...) implements [`FamilySolver`] and is registered by
//! name in a [`FamilyRegistry`]; the CLI and the subgraph engine select
//! solvers at runtime from the `family` field of a [`TopologyDescriptor`].
//!
//! Every solver checks the inequalities under which its formulas are the
//! optimum. When a condition fails the solver returns a typed
//! [`Refusal`] carrying the failed inequality instead of a guess, so callers
//! can fall back to the numeric solver.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{transition_matrix, EdgeWeights, EquilibriumDistribution, Graph};
use crate::spectral::slem_of_chain;

mod bistar;
mod ccs_star;
mod complete;
mod ecl;
pub(crate) mod palm;
pub(crate) mod path;
mod semi_symmetric_star;
mod star;
pub(crate) mod symmetric_tree;

pub use path::{optimal_path_weights, path3_slem, path4_slem};

/// A topology family instance: family name, family-specific parameters and
/// the equilibrium distribution in the family's documented vertex order.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TopologyDescriptor {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Value,
    pub pi: Vec<f64>,
}

impl TopologyDescriptor {
    pub fn new(family: &str, params: serde_json::Value, pi: Vec<f64>) -> Self {
        TopologyDescriptor { family: family.to_string(), params, pi }
    }

    pub fn usize_param(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| Error::BadDescriptor(format!("missing integer parameter '{key}'")))
    }

    pub fn usize_param_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| Error::BadDescriptor(format!("parameter '{key}' must be an integer"))),
        }
    }

    pub fn usize_vec_param(&self, key: &str) -> Result<Vec<usize>> {
        let arr = self
            .params
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::BadDescriptor(format!("missing array parameter '{key}'")))?;
        arr.iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::BadDescriptor(format!("'{key}' must hold integers")))
            })
            .collect()
    }

    pub fn distribution(&self) -> Result<EquilibriumDistribution> {
        EquilibriumDistribution::new(self.pi.clone())
    }
}

/// One regime inequality together with its outcome. `margin` is `lhs - rhs`
/// of the inequality written as `lhs >= rhs` (negative means violated).
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionCheck {
    pub text: String,
    pub satisfied: bool,
    pub margin: f64,
}

/// Relative slack applied to regime inequalities; boundary instances are
/// valid limits of both regimes.
pub const CONDITION_SLACK: f64 = 1e-12;

/// Accumulates regime checks. Hard failures flip `all_ok`; warn-level checks
/// are recorded but do not.
#[derive(Debug, Default, Clone)]
pub struct Conditions {
    pub checks: Vec<ConditionCheck>,
    pub warnings: Vec<String>,
}

impl Conditions {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn slack_for(lhs: f64, rhs: f64) -> f64 {
        CONDITION_SLACK * lhs.abs().max(rhs.abs()).max(1.0)
    }

    /// Require `lhs >= rhs` (with slack).
    pub fn require_ge(&mut self, text: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        let ok = lhs >= rhs - Self::slack_for(lhs, rhs);
        self.checks.push(ConditionCheck { text: text.into(), satisfied: ok, margin: lhs - rhs });
        ok
    }

    /// Record `lhs > rhs` as a warning-only check.
    pub fn warn_gt(&mut self, text: impl Into<String>, lhs: f64, rhs: f64) {
        let ok = lhs > rhs - Self::slack_for(lhs, rhs);
        if !ok {
            self.warnings.push(format!("{} (margin {:.3e})", text.into(), lhs - rhs));
        } else {
            self.checks.push(ConditionCheck { text: text.into(), satisfied: true, margin: lhs - rhs });
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn failed(&self) -> Vec<ConditionCheck> {
        self.checks.iter().filter(|c| !c.satisfied).cloned().collect()
    }
}

/// Typed refusal: the instance falls outside every regime the family's
/// closed form covers.
#[derive(Debug, Clone)]
pub struct Refusal {
    pub family: String,
    pub reason: String,
    pub failed: Vec<ConditionCheck>,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.family, self.reason)?;
        for c in &self.failed {
            write!(f, "; failed: {} (margin {:.3e})", c.text, c.margin)?;
        }
        Ok(())
    }
}

/// Error surface of a family solver: either a typed refusal (fall back to
/// the numeric solver) or an input error.
#[derive(Debug)]
pub enum FamilyError {
    Refused(Refusal),
    Invalid(Error),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::Refused(r) => write!(f, "closed form refused: {r}"),
            FamilyError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FamilyError {}

impl From<Error> for FamilyError {
    fn from(e: Error) -> Self {
        FamilyError::Invalid(e)
    }
}

pub type FamilyResult<T> = std::result::Result<T, FamilyError>;

pub(crate) fn refuse(family: &str, reason: impl Into<String>, conds: &Conditions) -> FamilyError {
    FamilyError::Refused(Refusal {
        family: family.to_string(),
        reason: reason.into(),
        failed: conds.failed(),
    })
}

/// Closed-form solution: the generated graph, the per-vertex distribution,
/// optimal weights, the SLEM, and which regime produced it.
#[derive(Debug, Clone)]
pub struct ClosedFormResult {
    pub graph: Graph,
    pub pi: EquilibriumDistribution,
    pub weights: EdgeWeights,
    pub slem: f64,
    pub regime: String,
    pub conditions: Vec<ConditionCheck>,
    pub warnings: Vec<String>,
}

/// Evaluate the SLEM of the chain built from `(g, pi, w)`.
pub fn spectral_slem(
    g: &Graph,
    pi: &EquilibriumDistribution,
    w: &EdgeWeights,
) -> Result<f64> {
    let chain = transition_matrix(g, pi, w)?;
    Ok(slem_of_chain(&chain)?.slem)
}

/// A closed-form solver for one topology family.
pub trait FamilySolver: Send + Sync {
    /// Registry key, e.g. `"path"`.
    fn family(&self) -> &'static str;

    /// One-line parameter and vertex-order documentation.
    fn describe(&self) -> &'static str;

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult>;

    /// Build the concrete graph and per-vertex distribution the descriptor
    /// denotes, without solving. Used for numeric fallback after a refusal.
    fn instantiate(&self, desc: &TopologyDescriptor)
        -> FamilyResult<(Graph, EquilibriumDistribution)>;
}

/// Name-indexed registry of family solvers.
pub struct FamilyRegistry {
    solvers: BTreeMap<&'static str, Box<dyn FamilySolver>>,
}

impl FamilyRegistry {
    /// Dispatch [`FamilySolver::instantiate`] on the descriptor's family.
    pub fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, EquilibriumDistribution)> {
        match self.get(&desc.family) {
            Some(s) => s.instantiate(desc),
            None => Err(FamilyError::Invalid(Error::UnknownFamily(desc.family.clone()))),
        }
    }

    /// Registry with every built-in family.
    pub fn standard() -> Self {
        let mut r = FamilyRegistry { solvers: BTreeMap::new() };
        r.register(Box::new(path::PathSolver));
        r.register(Box::new(star::StarSolver));
        r.register(Box::new(complete::CompleteSolver));
        r.register(Box::new(palm::PalmSolver));
        r.register(Box::new(ecl::EclSolver));
        r.register(Box::new(ecl::LollipopSolver));
        r.register(Box::new(ecl::BarbellSolver));
        r.register(Box::new(ecl::SemiCompleteSolver));
        r.register(Box::new(bistar::BistarSolver));
        r.register(Box::new(symmetric_tree::SymmetricTreeSolver));
        r.register(Box::new(symmetric_tree::SymmetricStarSolver));
        r.register(Box::new(semi_symmetric_star::SemiSymmetricStarSolver));
        r.register(Box::new(ccs_star::CcsStarSolver));
        r
    }

    pub fn register(&mut self, solver: Box<dyn FamilySolver>) {
        self.solvers.insert(solver.family(), solver);
    }

    pub fn get(&self, family: &str) -> Option<&dyn FamilySolver> {
        self.solvers.get(family).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    /// Dispatch on the descriptor's family name.
    pub fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        match self.get(&desc.family) {
            Some(s) => s.solve(desc),
            None => Err(FamilyError::Invalid(Error::UnknownFamily(desc.family.clone()))),
        }
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
