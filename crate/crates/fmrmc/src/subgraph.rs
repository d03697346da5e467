//! Locally-optimal weights on recognized subgraphs that hang off a single
//! cut vertex of a larger graph. The optimal weights on such a subgraph's
//! interior edges do not depend on the rest of the topology, so they can be
//! assigned from the closed forms and held fixed while the numeric solver
//! completes the remaining edges.
//!
//! A declared subgraph lists its member vertices in the family's canonical
//! order (see [`SubgraphFamily`]) plus the attachment vertex. Edges incident
//! to the attachment vertex are never assigned locally.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::families::{ConditionCheck, Conditions};
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};
use crate::solver::{solve_with_fixed, SolveOutcome, SolverOptions};

/// Family of an attached subgraph.
///
/// Canonical vertex orders:
/// - `Path`: along the path, the attachment-adjacent end last.
/// - `Palm`: the `n` leaves, then the path from the leafy hub outward; the
///   last path vertex borders the attachment (`params: {"leaves": n}`).
/// - `Lollipop`: the clique first, then the path toward the attachment
///   (`params: {"m": clique size}`).
/// - `Ecl`: fiber-major with the attached layer last
///   (`params: {"fibers": [...]}`).
/// - `SemiComplete`: left path from its outer end, the core clique, then the
///   right path; the last right-path vertex borders the attachment
///   (`params: {"n1", "n2", "m"}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgraphFamily {
    Path,
    Palm,
    Lollipop,
    Ecl,
    SemiComplete,
}

impl SubgraphFamily {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "path" => SubgraphFamily::Path,
            "palm" => SubgraphFamily::Palm,
            "lollipop" => SubgraphFamily::Lollipop,
            "ecl" => SubgraphFamily::Ecl,
            "semi_complete" => SubgraphFamily::SemiComplete,
            other => return Err(Error::BadSubgraph(format!("unknown subgraph family '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SubgraphFamily::Path => "path",
            SubgraphFamily::Palm => "palm",
            SubgraphFamily::Lollipop => "lollipop",
            SubgraphFamily::Ecl => "ecl",
            SubgraphFamily::SemiComplete => "semi_complete",
        }
    }
}

/// A recognized subgraph attached to the host at one cut vertex.
#[derive(Debug, Clone)]
pub struct AttachedSubgraph {
    pub family: SubgraphFamily,
    /// Host vertex ids, in the family's canonical order.
    pub vertices: Vec<usize>,
    /// Host vertex the subgraph connects to (not a member).
    pub attach: usize,
    /// Family parameters (same keys as the topology descriptors).
    pub params: Value,
}

/// Per-subgraph outcome of [`assign_local`].
#[derive(Debug, Clone)]
pub struct SubgraphReport {
    pub index: usize,
    pub family: &'static str,
    /// Weights were assigned (structure valid and regime conditions hold).
    pub assigned: bool,
    pub conditions: Vec<ConditionCheck>,
    pub message: String,
}

fn uint(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .map(|x| x as usize)
        .ok_or_else(|| Error::BadSubgraph(format!("missing integer parameter '{key}'")))
}

/// Fiber layout of a declared subgraph: the clique-lift-of-a-path view that
/// every supported family reduces to (the palm handled separately).
fn fiber_layout(sub: &AttachedSubgraph) -> Result<Vec<usize>> {
    let n = sub.vertices.len();
    Ok(match sub.family {
        SubgraphFamily::Path => vec![1; n],
        SubgraphFamily::Ecl => {
            let fibers = sub
                .params
                .get("fibers")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::BadSubgraph("ecl subgraph needs params.fibers".into()))?
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::BadSubgraph("fibers must be integers".into()))?;
            if fibers.iter().sum::<usize>() != n || fibers.iter().any(|&f| f == 0) {
                return Err(Error::BadSubgraph("fiber sizes do not match vertex count".into()));
            }
            fibers
        }
        SubgraphFamily::Lollipop => {
            let m = uint(&sub.params, "m")?;
            if m < 2 || n <= m {
                return Err(Error::BadSubgraph(
                    "lollipop subgraph needs a clique of m >= 2 plus a path".into(),
                ));
            }
            let mut fibers = vec![m];
            fibers.extend(std::iter::repeat(1).take(n - m));
            fibers
        }
        SubgraphFamily::SemiComplete => {
            let n1 = uint(&sub.params, "n1")?;
            let n2 = uint(&sub.params, "n2")?;
            let m = uint(&sub.params, "m")?;
            if n1 + m + n2 != n || n1 < 1 || n2 < 1 || m < 1 {
                return Err(Error::BadSubgraph(
                    "semi-complete parameters do not match vertex count".into(),
                ));
            }
            let mut fibers = vec![1; n1];
            fibers.push(m);
            fibers.extend(std::iter::repeat(1).take(n2));
            fibers
        }
        SubgraphFamily::Palm => {
            return Err(Error::BadSubgraph("palm has no fiber layout".into()));
        }
    })
}

/// Check that the host's induced edges on `vertices` are exactly the fiber
/// layout's edges, that only the last layer touches the attachment vertex,
/// and that nothing else leaves the subgraph.
fn validate_fiber_structure(
    host: &Graph,
    sub: &AttachedSubgraph,
    fibers: &[usize],
) -> Result<()> {
    let verts = &sub.vertices;
    let member = {
        let mut f = vec![false; host.n()];
        for &v in verts {
            if v >= host.n() {
                return Err(Error::BadSubgraph(format!("vertex {v} out of range")));
            }
            if f[v] {
                return Err(Error::BadSubgraph(format!("vertex {v} listed twice")));
            }
            f[v] = true;
        }
        f
    };
    if sub.attach >= host.n() || member[sub.attach] {
        return Err(Error::BadSubgraph("attachment vertex must be outside the subgraph".into()));
    }
    let mut offsets = vec![0usize];
    for &f in fibers {
        offsets.push(offsets.last().unwrap() + f);
    }
    let layer_of = |local: usize| offsets.iter().rposition(|&o| o <= local).unwrap();
    // expected internal edges
    for a in 0..verts.len() {
        for b in (a + 1)..verts.len() {
            let (la, lb) = (layer_of(a), layer_of(b));
            let expected = la == lb || la + 1 == lb || lb + 1 == la;
            if host.has_edge(verts[a], verts[b]) != expected {
                return Err(Error::BadSubgraph(format!(
                    "induced edges do not match {} shape between {} and {}",
                    sub.family.name(),
                    verts[a],
                    verts[b]
                )));
            }
        }
    }
    let last_layer = fibers.len() - 1;
    for (local, &v) in verts.iter().enumerate() {
        for w in host.neighbors(v) {
            if member[w] {
                continue;
            }
            if w != sub.attach {
                return Err(Error::BadSubgraph(format!(
                    "vertex {v} reaches {w} outside the subgraph (not a single cut)"
                )));
            }
            if layer_of(local) != last_layer {
                return Err(Error::BadSubgraph(format!(
                    "vertex {v} touches the attachment but is not in the boundary layer"
                )));
            }
        }
    }
    // every boundary vertex must connect to the attachment
    for local in offsets[last_layer]..verts.len() {
        if !host.has_edge(verts[local], sub.attach) {
            return Err(Error::BadSubgraph(format!(
                "boundary vertex {} is not adjacent to the attachment",
                verts[local]
            )));
        }
    }
    Ok(())
}

fn validate_palm_structure(host: &Graph, sub: &AttachedSubgraph, n_leaves: usize) -> Result<()> {
    let verts = &sub.vertices;
    if n_leaves < 1 || verts.len() < n_leaves + 2 {
        return Err(Error::BadSubgraph(
            "palm subgraph needs leaves plus at least two path vertices".into(),
        ));
    }
    let member = {
        let mut f = vec![false; host.n()];
        for &v in verts {
            if v >= host.n() || f[v] {
                return Err(Error::BadSubgraph("bad palm vertex list".into()));
            }
            f[v] = true;
        }
        f
    };
    if sub.attach >= host.n() || member[sub.attach] {
        return Err(Error::BadSubgraph("attachment vertex must be outside the subgraph".into()));
    }
    let hub = verts[n_leaves];
    let path = &verts[n_leaves..];
    let mut expected: Vec<(usize, usize)> = verts[..n_leaves].iter().map(|&l| (l, hub)).collect();
    expected.extend(path.windows(2).map(|w| (w[0], w[1])));
    for a in 0..verts.len() {
        for b in (a + 1)..verts.len() {
            let (x, y) = (verts[a], verts[b]);
            let expect = expected
                .iter()
                .any(|&(p, q)| (p == x && q == y) || (p == y && q == x));
            if host.has_edge(x, y) != expect {
                return Err(Error::BadSubgraph(format!(
                    "induced edges do not match palm shape between {x} and {y}"
                )));
            }
        }
    }
    let boundary = *path.last().unwrap();
    for &v in verts {
        for w in host.neighbors(v) {
            if member[w] {
                continue;
            }
            if w != sub.attach || v != boundary {
                return Err(Error::BadSubgraph(format!(
                    "palm vertex {v} has an external edge that is not the attachment"
                )));
            }
        }
    }
    if !host.has_edge(boundary, sub.attach) {
        return Err(Error::BadSubgraph("palm boundary vertex not adjacent to attachment".into()));
    }
    Ok(())
}

/// Assign interior weights on the declared subgraph if its regime conditions
/// hold; weights for edges incident to the attachment vertex and for the
/// boundary layer's internal clique are left to the numeric solver (their
/// optimal values depend on the rest of the graph).
fn assign_one(
    host: &Graph,
    pi: &EquilibriumDistribution,
    sub: &AttachedSubgraph,
    out: &mut EdgeWeights,
) -> Result<(bool, Conditions, String)> {
    if sub.family == SubgraphFamily::Palm {
        let n_leaves = uint(&sub.params, "leaves")?;
        validate_palm_structure(host, sub, n_leaves)?;
        let leaves: Vec<f64> = sub.vertices[..n_leaves].iter().map(|&v| pi.get(v)).collect();
        let path: Vec<f64> = sub.vertices[n_leaves..].iter().map(|&v| pi.get(v)).collect();
        // interior path vertices: all but the boundary vertex
        let conds = crate::families::palm::palm_conditions(&leaves, &path, path.len() - 1);
        if !conds.all_satisfied() {
            return Ok((false, conds, "palm conditions fail; left free".into()));
        }
        let (leaf_w, q0) = crate::families::palm::palm_local_weights(&leaves, path[0], path[1]);
        let hub = sub.vertices[n_leaves];
        for (l, w) in leaf_w.iter().enumerate() {
            out.set(sub.vertices[l], hub, *w);
        }
        out.set(hub, sub.vertices[n_leaves + 1], q0);
        for k in 1..path.len() - 1 {
            out.set(
                sub.vertices[n_leaves + k],
                sub.vertices[n_leaves + k + 1],
                path[k] * path[k + 1] / (path[k] + path[k + 1]),
            );
        }
        return Ok((true, conds, "assigned".into()));
    }

    let fibers = fiber_layout(sub)?;
    validate_fiber_structure(host, sub, &fibers)?;
    let nf = fibers.len();
    let mut offsets = vec![0usize];
    for &f in &fibers {
        offsets.push(offsets.last().unwrap() + f);
    }
    let sums: Vec<f64> = (0..nf)
        .map(|k| sub.vertices[offsets[k]..offsets[k + 1]].iter().map(|&v| pi.get(v)).sum())
        .collect();

    let mut conds = Conditions::new();
    let mut ok = true;
    // feasibility of the assigned weights at every layer that carries them
    for k in 1..nf - 1 {
        ok &= conds.require_ge(
            format!("S_{}^2 >= S_{} S_{}", k + 1, k, k + 2),
            sums[k] * sums[k],
            sums[k - 1] * sums[k + 1],
        );
    }
    if !ok {
        return Ok((false, conds, "fiber-sum conditions fail; left free".into()));
    }

    let pv = |k: usize, a: usize| pi.get(sub.vertices[offsets[k] + a]);
    let vid = |k: usize, a: usize| sub.vertices[offsets[k] + a];
    // cross-fiber blocks
    for k in 0..nf - 1 {
        for a in 0..fibers[k] {
            for b in 0..fibers[k + 1] {
                out.set(vid(k, a), vid(k + 1, b), pv(k, a) * pv(k + 1, b) / (sums[k] + sums[k + 1]));
            }
        }
    }
    // far-end fiber clique
    if nf >= 2 && fibers[0] > 1 {
        for a in 0..fibers[0] {
            for b in (a + 1)..fibers[0] {
                out.set(vid(0, a), vid(0, b), pv(0, a) * pv(0, b) / (sums[0] + sums[1]));
            }
        }
    }
    // interior fiber cliques; the boundary layer's clique is left free
    for k in 1..nf - 1 {
        if fibers[k] < 2 {
            continue;
        }
        let coeff = (sums[k] * sums[k] - sums[k - 1] * sums[k + 1])
            / (sums[k] * (sums[k] + sums[k - 1]) * (sums[k] + sums[k + 1]));
        for a in 0..fibers[k] {
            for b in (a + 1)..fibers[k] {
                out.set(vid(k, a), vid(k, b), coeff * pv(k, a) * pv(k, b));
            }
        }
    }
    Ok((true, conds, "assigned".into()))
}

/// Fill locally-determined weights for every declared subgraph. Subgraphs
/// whose conditions fail are reported and left free. Structural errors abort.
pub fn assign_local(
    host: &Graph,
    pi: &EquilibriumDistribution,
    subs: &[AttachedSubgraph],
) -> Result<(EdgeWeights, Vec<SubgraphReport>)> {
    if pi.len() != host.n() {
        return Err(Error::DimensionMismatch(format!(
            "pi has {} entries for {} vertices",
            pi.len(),
            host.n()
        )));
    }
    let mut out = EdgeWeights::new();
    let mut reports = Vec::new();
    for (index, sub) in subs.iter().enumerate() {
        let before = out.len();
        let (assigned, conds, message) = assign_one(host, pi, sub, &mut out)?;
        debug_assert!(assigned || out.len() == before);
        reports.push(SubgraphReport {
            index,
            family: sub.family.name(),
            assigned,
            conditions: conds.checks,
            message,
        });
    }
    for sub in subs {
        for ((i, j), _) in out.iter() {
            debug_assert!(i != sub.attach && j != sub.attach);
        }
    }
    Ok((out, reports))
}

/// Assign local weights, then run the numeric solver over the remaining free
/// edges with the local ones held fixed.
pub fn solve_composite(
    host: &Graph,
    pi: &EquilibriumDistribution,
    subs: &[AttachedSubgraph],
    opts: &SolverOptions,
) -> Result<(SolveOutcome, Vec<SubgraphReport>)> {
    let (fixed, reports) = assign_local(host, pi, subs)?;
    let outcome = solve_with_fixed(host, pi, &fixed, opts, None)?;
    Ok((outcome, reports))
}
