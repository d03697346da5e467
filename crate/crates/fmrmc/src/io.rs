//! JSON input/output. Vertex ids are 1-based on the wire; everything internal
//! is 0-based. Run results serialize deterministically: keys sorted, floats
//! printed with 9 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::families::TopologyDescriptor;
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};
use crate::solver::OptimalityCertificate;
use crate::subgraph::{AttachedSubgraph, SubgraphFamily};

/// Raw graph instance: `{"n": .., "edges": [[i,j],..], "pi": [..]}` with
/// optional `"subgraphs"` declarations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphInstanceFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub pi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subgraphs: Vec<SubgraphDeclFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgraphDeclFile {
    pub family: String,
    pub vertices: Vec<usize>,
    pub attach: usize,
    #[serde(default)]
    pub params: Value,
}

/// Clique lift specification: `{"base": {"n", "edges"}, "fibers": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftSpecFile {
    pub base: BareGraphFile,
    pub fibers: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BareGraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Either a topology descriptor (has a `family` key) or a raw graph instance.
#[derive(Debug, Clone)]
pub enum SolveInput {
    Descriptor(TopologyDescriptor),
    Instance(GraphInstanceFile),
}

fn to_zero_based(n: usize, pairs: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            if i == 0 || j == 0 || i > n || j > n {
                Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for 1-based ids 1..={n}"
                )))
            } else {
                Ok((i - 1, j - 1))
            }
        })
        .collect()
}

impl BareGraphFile {
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::new(self.n, &to_zero_based(self.n, &self.edges)?)
    }

    pub fn from_graph(g: &Graph) -> Self {
        BareGraphFile {
            n: g.n(),
            edges: g.edges().iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
        }
    }
}

impl GraphInstanceFile {
    pub fn to_parts(&self) -> Result<(Graph, EquilibriumDistribution, Vec<AttachedSubgraph>)> {
        let g = Graph::new(self.n, &to_zero_based(self.n, &self.edges)?)?;
        let pi = EquilibriumDistribution::new(self.pi.clone())?;
        if pi.len() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "pi has {} entries for {} vertices",
                pi.len(),
                g.n()
            )));
        }
        let mut subs = Vec::new();
        for d in &self.subgraphs {
            let family = SubgraphFamily::parse(&d.family)?;
            let vertices = d
                .vertices
                .iter()
                .map(|&v| {
                    if v == 0 || v > self.n {
                        Err(Error::BadSubgraph(format!("vertex id {v} out of range")))
                    } else {
                        Ok(v - 1)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if d.attach == 0 || d.attach > self.n {
                return Err(Error::BadSubgraph(format!("attach id {} out of range", d.attach)));
            }
            subs.push(AttachedSubgraph {
                family,
                vertices,
                attach: d.attach - 1,
                params: d.params.clone(),
            });
        }
        Ok((g, pi, subs))
    }
}

impl SolveInput {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::BadDescriptor(format!("invalid JSON: {e}")))?;
        if value.get("family").is_some() {
            let d: TopologyDescriptor = serde_json::from_value(value)
                .map_err(|e| Error::BadDescriptor(format!("bad descriptor: {e}")))?;
            Ok(SolveInput::Descriptor(d))
        } else {
            let f: GraphInstanceFile = serde_json::from_value(value)
                .map_err(|e| Error::BadDescriptor(format!("bad graph instance: {e}")))?;
            Ok(SolveInput::Instance(f))
        }
    }
}

/// Certificate summary embedded in run results (1-based vertex ids).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub s: f64,
    pub lambda2: f64,
    pub lambda_n: f64,
    pub eigenvalue_sum_gap: f64,
    pub active_vertices: Vec<usize>,
    pub dual_consistent: bool,
}

impl CertificateSummary {
    pub fn from(cert: &OptimalityCertificate) -> Self {
        CertificateSummary {
            s: cert.s,
            lambda2: cert.lambda2,
            lambda_n: cert.lambda_n,
            eigenvalue_sum_gap: cert.eigenvalue_sum_gap,
            active_vertices: cert.active_vertices.iter().map(|&v| v + 1).collect(),
            dual_consistent: cert.dual_consistent,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub text: String,
    pub satisfied: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftCheckSummary {
    pub base_slem: f64,
    pub lifted_slem: f64,
    pub interlacing_holds: bool,
    pub tight_count: usize,
}

/// Result of one solve/compare/lift run. Serializes deterministically via
/// [`to_deterministic_json`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub instance: String,
    pub method: String,
    pub slem: f64,
    /// `None` encodes an infinite mixing time.
    pub mixing_time: Option<f64>,
    pub graph: BareGraphFile,
    pub pi: Vec<f64>,
    /// `[i, j, q]` triples, 1-based, sorted by edge.
    pub weights: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_check: Option<LiftCheckSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunResult {
    pub fn weights_from(w: &EdgeWeights) -> Vec<(usize, usize, f64)> {
        w.iter().map(|((i, j), q)| (i + 1, j + 1, q)).collect()
    }

    pub fn to_edge_weights(&self) -> EdgeWeights {
        let mut w = EdgeWeights::new();
        for &(i, j, q) in &self.weights {
            w.set(i - 1, j - 1, q);
        }
        w
    }

    pub fn mixing_from_slem(slem: f64) -> Option<f64> {
        let t = crate::spectral::mixing_time(slem);
        if t.is_finite() {
            Some(t)
        } else {
            None
        }
    }
}

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        // 9 significant digits, fixed scientific form
        write!(writer, "{value:.8e}")
    }
}

/// Serialize any value with sorted keys and 9-significant-digit floats.
/// Identical inputs produce byte-identical output.
pub fn to_deterministic_json<T: Serialize>(value: &T) -> Result<String> {
    // round-trip through Value: serde_json maps are sorted by key
    let v = serde_json::to_value(value)
        .map_err(|e| Error::BadDescriptor(format!("serialization failed: {e}")))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    v.serialize(&mut ser)
        .map_err(|e| Error::BadDescriptor(format!("serialization failed: {e}")))?;
    let mut s = String::from_utf8(out).expect("json is utf-8");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_graph_instance() {
        let text = r#"{"n": 3, "edges": [[1,2],[2,3]], "pi": [1.0, 2.0, 1.0]}"#;
        match SolveInput::from_json(text).unwrap() {
            SolveInput::Instance(f) => {
                let (g, pi, subs) = f.to_parts().unwrap();
                assert_eq!(g.n(), 3);
                assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
                assert_eq!(pi.values(), &[1.0, 2.0, 1.0]);
                assert!(subs.is_empty());
            }
            _ => panic!("expected instance"),
        }
    }

    #[test]
    fn parse_descriptor() {
        let text = r#"{"family": "star", "params": {}, "pi": [4.9, 2.2, 2.5, 2.1, 1.9]}"#;
        match SolveInput::from_json(text).unwrap() {
            SolveInput::Descriptor(d) => assert_eq!(d.family, "star"),
            _ => panic!("expected descriptor"),
        }
    }

    #[test]
    fn rejects_zero_based_ids() {
        let text = r#"{"n": 2, "edges": [[0,1]], "pi": [1.0, 1.0]}"#;
        match SolveInput::from_json(text).unwrap() {
            SolveInput::Instance(f) => assert!(f.to_parts().is_err()),
            _ => panic!(),
        }
    }

    #[test]
    fn deterministic_serialization() {
        let r = RunResult {
            instance: "t".into(),
            method: "closed_form".into(),
            slem: 0.5,
            mixing_time: Some(crate::spectral::mixing_time(0.5)),
            graph: BareGraphFile { n: 2, edges: vec![(1, 2)] },
            pi: vec![1.0, 2.0],
            weights: vec![(1, 2, 2.0 / 3.0)],
            regime: Some("interior".into()),
            conditions: vec![],
            warnings: vec![],
            certificate: None,
            lift_check: None,
            notes: vec![],
        };
        let a = to_deterministic_json(&r).unwrap();
        let b = to_deterministic_json(&r).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("5.00000000e-1"), "{a}");
        // keys sorted
        let gi = a.find("\"graph\"").unwrap();
        let ii = a.find("\"instance\"").unwrap();
        let mi = a.find("\"method\"").unwrap();
        assert!(gi < ii && ii < mi);
        // round-trips
        let back: RunResult = serde_json::from_str(&a).unwrap();
        assert_eq!(back.method, "closed_form");
    }
}
