//! Symmetric tree: every vertex at depth `i` has `m_i` children, and the
//! equilibrium weight depends only on depth. The automorphism group forces
//! optimal weights to be constant per depth, so the problem reduces to the
//! small matrices of [`crate::spectral::reduced_tree_chain`].
//!
//! `params: {"branching": [m_0..m_{n-1}]}`; pi is depth-indexed (length
//! `n + 1`). Vertices are generated breadth-first, root first. The symmetric
//! star is the `m_i = 1 (i >= 1)` specialization and is registered as its own
//! family (`params: {"m", "n"}`).

use crate::error::Error;
use crate::graph::{EdgeWeights, Graph};
use crate::spectral::{reduced_tree_chain, reduced_tree_slem};

use super::{
    refuse, ClosedFormResult, Conditions, FamilyError, FamilyResult, FamilySolver,
    TopologyDescriptor, CONDITION_SLACK,
};

pub struct SymmetricTreeSolver;
pub struct SymmetricStarSolver;

/// Breadth-first tree; returns the graph plus each edge's depth (the depth of
/// its parent endpoint).
pub fn tree_graph(branching: &[usize]) -> (Graph, Vec<(usize, usize, usize)>) {
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    let mut edges = Vec::new();
    for (depth, &m) in branching.iter().enumerate() {
        let mut next = Vec::new();
        for &p in &frontier {
            for _ in 0..m {
                edges.push((p, next_id, depth));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    let plain: Vec<(usize, usize)> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
    (Graph::new(next_id, &plain).expect("tree layout is valid"), edges)
}

/// Expand depth-indexed values to per-vertex values in BFS order.
pub fn expand_by_depth(branching: &[usize], by_depth: &[f64]) -> Vec<f64> {
    let mut out = vec![by_depth[0]];
    let mut layer = 1usize;
    for (d, &m) in branching.iter().enumerate() {
        layer *= m;
        out.extend(std::iter::repeat(by_depth[d + 1]).take(layer));
    }
    out
}

fn sides(branching: &[usize], pid: &[f64], q: &[f64]) -> (f64, f64) {
    let r = reduced_tree_chain(branching, pid, q).expect("valid reduced dims");
    let e0 = crate::eig::eigvals_symmetric(&r.p0).expect("symmetric");
    let e1 = crate::eig::eigvals_symmetric(&r.p1).expect("symmetric");
    (e1[0], -e0[e0.len() - 1])
}

/// Find a zero of `f` (difference of the two SLEM sides) on `[lo, hi]` by a
/// scan for a sign change followed by bisection. The sides cross at most a
/// few times on the segments used here; a missing crossing is reported as
/// `None` (the endpoints are separate candidates).
fn crossing(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    if !(hi > lo) {
        return None;
    }
    const SCAN: usize = 64;
    let mut prev_t = lo;
    let mut prev_v = f(lo);
    for k in 1..=SCAN {
        let t = lo + (hi - lo) * k as f64 / SCAN as f64;
        let v = f(t);
        if prev_v == 0.0 {
            return Some(prev_t);
        }
        if prev_v * v <= 0.0 {
            let (mut a, mut b) = (prev_t, t);
            let mut fa = prev_v;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev_t = t;
        prev_v = v;
    }
    None
}

/// Depth-2 optimum by exact structure search. Candidates cover every KKT
/// structure: the interior point, both-sided crossings along each active
/// constraint, the one-sided stationary point on the depth-1 constraint, and
/// the constraint corners. The best feasible candidate is the optimum.
fn depth2_candidates(m0: usize, m1: usize, pid: &[f64]) -> Vec<(String, f64, f64)> {
    let (p0, p1, p2) = (pid[0], pid[1], pid[2]);
    let (m0f, m1f) = (m0 as f64, m1 as f64);
    let mut cands: Vec<(String, f64, f64)> = Vec::new();

    cands.push((
        "interior".into(),
        2.0 * p0 * p1 / (2.0 * p0 + m0f * p1),
        p1 * p2 / (p1 + m1f * p2),
    ));

    let q0r = p0 / m0f;
    let branch = [m0, m1];
    if p1 > q0r {
        let hi = p2.min((p1 - q0r) / m1f);
        let f = |t: f64| {
            let (a, b) = sides(&branch, pid, &[q0r, t]);
            a - b
        };
        if let Some(t) = crossing(f, 0.0, hi) {
            cands.push(("root-crossing".into(), q0r, t));
        }
    }

    let lo1 = ((p1 - p0 / m0f) / m1f).max(0.0);
    let hi1 = p2.min(p1 / m1f);
    if hi1 > lo1 {
        let f = |t: f64| {
            let (a, b) = sides(&branch, pid, &[p1 - m1f * t, t]);
            a - b
        };
        if let Some(t) = crossing(f, lo1, hi1) {
            cands.push(("d1-crossing".into(), p1 - m1f * t, t));
        }
    }

    let q1s = 2.0 * p1 * p2 / (4.0 * m1f * p2 + p1);
    cands.push(("d1-stationary".into(), p1 - m1f * q1s, q1s));

    if p1 >= m1f * p2 {
        let hi0 = (p0 / m0f).min(p1 - m1f * p2);
        let f = |t: f64| {
            let (a, b) = sides(&branch, pid, &[t, p2]);
            a - b
        };
        if let Some(t) = crossing(f, 0.0, hi0) {
            cands.push(("leaf-crossing".into(), t, p2));
        }
    }

    cands.push(("root-d1".into(), p0 / m0f, (m0f * p1 - p0) / (m0f * m1f)));
    cands.push(("root-leaf".into(), p0 / m0f, p2));
    cands.push(("d1-leaf".into(), p1 - m1f * p2, p2));
    // printed case-2/case-3 points; kept as candidates so the search agrees
    // with the case formulas wherever those are optimal
    cands.push((
        "case2-point".into(),
        p0 / m0f,
        (3.0 * m0f * p1 - 2.0 * p0) * p2 / (2.0 * m0f * (m1f * p2 + p1)),
    ));
    let den = 2.0 * p0 - m0f * m1f * p2;
    if den.abs() > 1e-12 * (p0 + p2) {
        let q1 = p2 * (2.0 * p0 - m0f * p1) / den;
        cands.push(("case3-point".into(), p1 - m1f * q1, q1));
    }
    cands
}

/// Optimal depth-indexed weights and SLEM for the symmetric tree.
pub fn solve_depth_weights(
    branching: &[usize],
    pid: &[f64],
) -> FamilyResult<(Vec<f64>, f64, String, Conditions)> {
    let n = branching.len();
    if n == 0 {
        return Err(FamilyError::Invalid(Error::BadDescriptor("tree depth must be >= 1".into())));
    }
    if branching[0] < 2 {
        return Err(FamilyError::Invalid(Error::BadDescriptor("root must have m_0 >= 2 children".into())));
    }
    if branching[1..].iter().any(|&m| m == 0) {
        return Err(FamilyError::Invalid(Error::BadDescriptor("branching factors must be >= 1".into())));
    }
    if pid.len() != n + 1 {
        return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
            "depth-{n} tree expects {} depth weights, got {}",
            n + 1,
            pid.len()
        ))));
    }
    let m0 = branching[0] as f64;

    if n == 1 {
        let mut conds = Conditions::new();
        if 2.0 * pid[0] >= m0 * pid[1] - Conditions::slack_for(2.0 * pid[0], m0 * pid[1]) {
            conds.require_ge("2 pi_0 >= m_0 pi_1", 2.0 * pid[0], m0 * pid[1]);
            let q0 = 2.0 * pid[0] * pid[1] / (2.0 * pid[0] + m0 * pid[1]);
            let s = m0 * pid[1] / (m0 * pid[1] + 2.0 * pid[0]);
            return Ok((vec![q0], s, "light-leaves".into(), conds));
        }
        conds.require_ge("m_0 pi_1 >= 2 pi_0", m0 * pid[1], 2.0 * pid[0]);
        let q0 = pid[0] / m0;
        let s = (m0 * pid[1] - pid[0]) / (m0 * pid[1]);
        return Ok((vec![q0], s, "root-constrained".into(), conds));
    }

    if n == 2 {
        let m1 = branching[1] as f64;
        let a = 2.0 * pid[0] >= m0 * pid[1] - Conditions::slack_for(2.0 * pid[0], m0 * pid[1]);
        let b = m0 * pid[1] * pid[1]
            >= 2.0 * m1 * pid[0] * pid[2]
                - Conditions::slack_for(m0 * pid[1] * pid[1], 2.0 * m1 * pid[0] * pid[2]);
        let case = match (a, b) {
            (true, true) => "case1",
            (false, true) => "case2",
            (true, false) => "case3",
            (false, false) => "case4",
        };
        let mut conds = Conditions::new();
        conds.require_ge(
            if a { "2 pi_0 >= m_0 pi_1" } else { "m_0 pi_1 >= 2 pi_0" },
            if a { 2.0 * pid[0] } else { m0 * pid[1] },
            if a { m0 * pid[1] } else { 2.0 * pid[0] },
        );
        conds.require_ge(
            if b { "m_0 pi_1^2 >= 2 m_1 pi_0 pi_2" } else { "2 m_1 pi_0 pi_2 >= m_0 pi_1^2" },
            if b { m0 * pid[1] * pid[1] } else { 2.0 * m1 * pid[0] * pid[2] },
            if b { 2.0 * m1 * pid[0] * pid[2] } else { m0 * pid[1] * pid[1] },
        );

        let slack = CONDITION_SLACK * (1.0 + pid[0] + pid[1] + pid[2]);
        let feasible = |q0: f64, q1: f64| {
            q0 >= -slack
                && q1 >= -slack
                && m0 * q0 <= pid[0] + slack
                && q0 + m1 * q1 <= pid[1] + slack
                && q1 <= pid[2] + slack
        };
        let mut best: Option<(f64, String, f64, f64)> = None;
        for (name, q0, q1) in depth2_candidates(branching[0], branching[1], pid) {
            if !q0.is_finite() || !q1.is_finite() || !feasible(q0, q1) {
                continue;
            }
            let q = [q0.max(0.0), q1.max(0.0)];
            let r = reduced_tree_chain(branching, pid, &q).expect("dims");
            let s = reduced_tree_slem(&r).expect("symmetric");
            if best.as_ref().map_or(true, |(bs, ..)| s < *bs - 1e-14) {
                best = Some((s, name, q[0], q[1]));
            }
        }
        let (s, structure, q0, q1) =
            best.expect("interior candidate is always finite and feasible in one regime");
        return Ok((vec![q0, q1], s, format!("{case}/{structure}"), conds));
    }

    // depth >= 3: interior (all vertex constraints slack) ...
    let mut conds = Conditions::new();
    let mut main_ok = 2.0 * pid[0] >= m0 * pid[1] - Conditions::slack_for(2.0 * pid[0], m0 * pid[1]);
    let m1 = branching[1] as f64;
    main_ok &= m0 * pid[1] * pid[1]
        >= 2.0 * m1 * pid[0] * pid[2]
            - Conditions::slack_for(m0 * pid[1] * pid[1], 2.0 * m1 * pid[0] * pid[2]);
    for k in 1..=n - 2 {
        let (mk, mk1) = (branching[k] as f64, branching[k + 1] as f64);
        main_ok &= mk * pid[k + 1] * pid[k + 1]
            >= mk1 * pid[k] * pid[k + 2]
                - Conditions::slack_for(mk * pid[k + 1] * pid[k + 1], mk1 * pid[k] * pid[k + 2]);
    }
    if main_ok {
        conds.require_ge("2 pi_0 >= m_0 pi_1", 2.0 * pid[0], m0 * pid[1]);
        conds.require_ge(
            "m_0 pi_1^2 >= 2 m_1 pi_0 pi_2",
            m0 * pid[1] * pid[1],
            2.0 * m1 * pid[0] * pid[2],
        );
        for k in 1..=n - 2 {
            let (mk, mk1) = (branching[k] as f64, branching[k + 1] as f64);
            conds.require_ge(
                format!("m_{k} pi_{}^2 >= m_{} pi_{k} pi_{}", k + 1, k + 1, k + 2),
                mk * pid[k + 1] * pid[k + 1],
                mk1 * pid[k] * pid[k + 2],
            );
        }
        let mut q = vec![2.0 * pid[0] * pid[1] / (2.0 * pid[0] + m0 * pid[1])];
        for k in 1..n {
            let mk = branching[k] as f64;
            q.push(pid[k] * pid[k + 1] / (pid[k] + mk * pid[k + 1]));
        }
        let r = reduced_tree_chain(branching, pid, &q)?;
        let s = reduced_tree_slem(&r)?;
        return Ok((q, s, "interior".into(), conds));
    }

    // ... or the fully-active chain where every non-leaf vertex constraint
    // binds: q_0 = pi_0 / m_0, q_i = (pi_i - q_{i-1}) / m_i
    let mut conds = Conditions::new();
    let mut active_ok =
        conds.require_ge("m_0 pi_1 >= 2 pi_0", m0 * pid[1], 2.0 * pid[0]);
    for i in 1..n {
        let (mi, mi_1) = (branching[i] as f64, branching[i - 1] as f64);
        active_ok &= conds.require_ge(
            format!("2 m_{i} pi_{} pi_{} >= m_{} pi_{i}^2", i - 1, i + 1, i - 1),
            2.0 * mi * pid[i - 1] * pid[i + 1],
            mi_1 * pid[i] * pid[i],
        );
    }
    if active_ok {
        let mut q = vec![pid[0] / m0];
        let mut feasible = true;
        for i in 1..n {
            let qi = (pid[i] - q[i - 1]) / branching[i] as f64;
            feasible &= qi >= 0.0;
            q.push(qi);
        }
        feasible &= q[n - 1] <= pid[n] * (1.0 + CONDITION_SLACK);
        if feasible {
            let r = reduced_tree_chain(branching, pid, &q)?;
            let s = reduced_tree_slem(&r)?;
            return Ok((q, s, "all-active".into(), conds));
        }
        conds.require_ge("recursion weights nonnegative and leaf-feasible", -1.0, 0.0);
    }
    Err(refuse(
        "symmetric_tree",
        format!("depth {n} outside the interior and fully-active regimes"),
        &conds,
    ))
}

fn build_result(
    branching: &[usize],
    desc: &TopologyDescriptor,
    regime_prefix: &str,
) -> FamilyResult<ClosedFormResult> {
    let (q, slem, regime, conds) = solve_depth_weights(branching, &desc.pi)?;
    let (graph, edges) = tree_graph(branching);
    let pi_full = expand_by_depth(branching, &desc.pi);
    let mut weights = EdgeWeights::new();
    for &(a, b, d) in &edges {
        weights.set(a, b, q[d]);
    }
    Ok(ClosedFormResult {
        pi: crate::graph::EquilibriumDistribution::new(pi_full)?,
        graph,
        weights,
        slem,
        regime: format!("{regime_prefix}{regime}"),
        conditions: conds.checks,
        warnings: conds.warnings,
    })
}

impl FamilySolver for SymmetricTreeSolver {
    fn family(&self) -> &'static str {
        "symmetric_tree"
    }

    fn describe(&self) -> &'static str {
        "params: {branching: [m_0..m_{n-1}]}; pi depth-indexed, root first"
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let branching = desc.usize_vec_param("branching")?;
        build_result(&branching, desc, "")
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, crate::graph::EquilibriumDistribution)> {
        let branching = desc.usize_vec_param("branching")?;
        instantiate_tree(&branching, desc)
    }
}

fn instantiate_tree(
    branching: &[usize],
    desc: &TopologyDescriptor,
) -> FamilyResult<(Graph, crate::graph::EquilibriumDistribution)> {
    if branching.is_empty() || branching[0] < 2 || branching[1..].iter().any(|&m| m == 0) {
        return Err(FamilyError::Invalid(Error::BadDescriptor(
            "tree needs m_0 >= 2 and positive branching".into(),
        )));
    }
    if desc.pi.len() != branching.len() + 1 {
        return Err(FamilyError::Invalid(Error::DimensionMismatch(format!(
            "depth-{} tree expects {} depth weights, got {}",
            branching.len(),
            branching.len() + 1,
            desc.pi.len()
        ))));
    }
    let (graph, _) = tree_graph(branching);
    let pi = crate::graph::EquilibriumDistribution::new(expand_by_depth(branching, &desc.pi))?;
    Ok((graph, pi))
}

impl FamilySolver for SymmetricStarSolver {
    fn family(&self) -> &'static str {
        "symmetric_star"
    }

    fn describe(&self) -> &'static str {
        "params: {m, n}; pi depth-indexed [center, depth 1, ..., depth n]"
    }

    fn solve(&self, desc: &TopologyDescriptor) -> FamilyResult<ClosedFormResult> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if n < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "symmetric star needs branches of length n >= 1".into(),
            )));
        }
        let mut branching = vec![m];
        branching.extend(std::iter::repeat(1).take(n - 1));
        build_result(&branching, desc, "tree/")
    }

    fn instantiate(
        &self,
        desc: &TopologyDescriptor,
    ) -> FamilyResult<(Graph, crate::graph::EquilibriumDistribution)> {
        let m = desc.usize_param("m")?;
        let n = desc.usize_param("n")?;
        if n < 1 {
            return Err(FamilyError::Invalid(Error::BadDescriptor(
                "symmetric star needs branches of length n >= 1".into(),
            )));
        }
        let mut branching = vec![m];
        branching.extend(std::iter::repeat(1).take(n - 1));
        instantiate_tree(&branching, desc)
    }
}
