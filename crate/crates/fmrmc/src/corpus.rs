//! Built-in example corpus: one entry per published optimum the crate
//! reproduces, used by `reproduce` runs and the acceptance suite. Each case
//! records the target SLEM, the Metropolis SLEM on the same instance, and
//! the route that produces it (closed form, numeric solve, or the composite
//! subgraph solve).

use serde_json::json;

use crate::families::TopologyDescriptor;
use crate::graph::{EquilibriumDistribution, Graph};
use crate::subgraph::{AttachedSubgraph, SubgraphFamily};

/// How a golden case is solved.
#[derive(Debug, Clone)]
pub enum GoldenRoute {
    /// Closed form through the family registry.
    ClosedForm(TopologyDescriptor),
    /// Numeric solve on a raw graph.
    Numeric { graph: Graph, pi: Vec<f64> },
    /// Composite solve with declared subgraphs held to their local optima.
    Composite,
}

#[derive(Debug, Clone)]
pub struct GoldenCase {
    pub id: &'static str,
    /// Family tag for `--family` filtering.
    pub family: &'static str,
    pub route: GoldenRoute,
    pub expected_slem: f64,
    pub slem_tolerance: f64,
    /// Metropolis SLEM on the same instance, when published.
    pub expected_metropolis: Option<f64>,
    pub metropolis_tolerance: f64,
}

/// All golden cases, in a fixed order.
pub fn golden_cases() -> Vec<GoldenCase> {
    let d = |family: &str, params: serde_json::Value, pi: &[f64]| {
        GoldenRoute::ClosedForm(TopologyDescriptor::new(family, params, pi.to_vec()))
    };
    let mut cases = vec![
        GoldenCase {
            id: "path-n5",
            family: "path",
            route: d("path", json!({}), &[1.9, 2.9, 3.1, 2.8, 1.7]),
            expected_slem: 0.748251,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.861111),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "paw",
            family: "ecl",
            route: d("ecl", json!({"fibers": [1, 2, 1]}), &[1.9, 3.1, 2.8, 1.7]),
            expected_slem: 0.233425,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.608497),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "barbell-3-4",
            family: "barbell",
            route: d(
                "barbell",
                json!({"m1": 3, "m2": 4, "n": 1}),
                &[1.9, 1.8, 6.4, 8.1, 2.9, 3.2, 2.1],
            ),
            expected_slem: 0.653212,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.780862),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "lollipop-3-2",
            family: "lollipop",
            route: GoldenRoute::Numeric {
                graph: lollipop_graph(),
                pi: vec![0.9, 3.2, 6.5, 3.1, 2.9],
            },
            expected_slem: 0.552672,
            slem_tolerance: 2e-3,
            expected_metropolis: Some(0.610267),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "star-m4",
            family: "star",
            route: d("star", json!({}), &[4.9, 2.2, 2.5, 2.1, 1.9]),
            expected_slem: 0.47027,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.571792),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "semi-symmetric-star-3-2",
            family: "semi_symmetric_star",
            route: d(
                "semi_symmetric_star",
                json!({"m": 3, "n": 2}),
                &[4.9, 3.3, 3.6, 2.7, 2.2, 2.4, 1.8],
            ),
            expected_slem: 0.76053,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.836403),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "bistar-3-4",
            family: "bistar",
            route: d(
                "bistar",
                json!({"m1": 3, "m2": 4}),
                &[1.8, 2.3, 1.9, 7.8, 8.3, 2.1, 1.8, 1.7, 2.6],
            ),
            expected_slem: 0.681843,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.877593),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "symmetric-tree-2-1-3",
            family: "symmetric_tree",
            route: d("symmetric_tree", json!({"branching": [2, 1, 3]}), &[6.1, 5.5, 3.4, 0.3]),
            expected_slem: 0.793041,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.865453),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "symmetric-star-3-2",
            family: "symmetric_star",
            route: d("symmetric_star", json!({"m": 3, "n": 2}), &[5.3, 3.1, 1.9]),
            expected_slem: 0.740632,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.84752),
            metropolis_tolerance: 1e-5,
        },
        GoldenCase {
            id: "ccs-star-3-2",
            family: "ccs_star",
            route: d("ccs_star", json!({"m": 3, "n": 2}), &[12.8, 4.7, 1.1]),
            expected_slem: 0.638193,
            slem_tolerance: 1e-5,
            expected_metropolis: Some(0.702632),
            metropolis_tolerance: 1e-5,
        },
    ];
    cases.push(GoldenCase {
        id: "composite-32",
        family: "composite",
        route: GoldenRoute::Composite,
        expected_slem: 0.99748869,
        slem_tolerance: 5e-4,
        expected_metropolis: None,
        metropolis_tolerance: 1e-5,
    });
    cases
}

/// Lollipop K3 + P2 joined by an edge: path 1-2, bridge 2-3, clique {3,4,5}
/// (0-based here).
fn lollipop_graph() -> Graph {
    Graph::new(5, &[(0, 1), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
}

/// One expected weight entry from the composite example's published table.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    /// 1-based endpoints.
    pub edge: (usize, usize),
    pub value: f64,
}

/// The 32-vertex composite instance: five recognized subgraphs hanging off a
/// hub vertex, plus the published expectations.
pub struct CompositeExample {
    pub graph: Graph,
    pub pi: EquilibriumDistribution,
    pub subgraphs: Vec<AttachedSubgraph>,
    pub expected_slem: f64,
    pub slem_tolerance: f64,
    /// Entries whose locally-assigned values must match within `table_tolerance`.
    pub pinned_table: Vec<TableEntry>,
    pub table_tolerance: f64,
    /// Edges whose optimal values are not unique; they are validated through
    /// the SLEM-equality check instead of the table.
    pub slem_equality_only: Vec<(usize, usize)>,
}

/// Build the composite example.
pub fn composite_example() -> CompositeExample {
    let edges_1b: [(usize, usize); 52] = [
        (1, 2), (2, 3), (3, 4), (4, 5),
        (1, 6), (6, 7), (7, 8), (7, 9), (7, 10), (7, 11),
        (1, 12), (12, 13), (13, 14), (13, 15), (13, 16), (13, 17),
        (14, 15), (14, 16), (14, 17), (15, 16), (15, 17), (16, 17),
        (1, 18), (1, 19), (18, 19), (18, 20), (18, 21), (18, 22),
        (19, 20), (19, 21), (19, 22), (20, 21), (20, 22), (21, 22),
        (20, 23), (21, 23), (22, 23), (23, 24), (23, 25), (24, 25),
        (1, 26), (26, 27), (27, 28), (27, 29), (27, 30), (28, 29),
        (28, 30), (29, 30), (28, 31), (29, 31), (30, 31), (31, 32),
    ];
    let edges: Vec<(usize, usize)> = edges_1b.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let graph = Graph::new(32, &edges).unwrap();

    let mut pi = vec![0.0f64; 32];
    for i in (1..=7).chain([12, 13]).chain(18..=23).chain([27, 31]) {
        pi[i - 1] = i as f64;
    }
    for (v, x) in [
        (8, 0.8), (9, 0.9), (10, 1.0), (11, 1.1),
        (14, 1.4), (15, 1.5), (16, 1.6), (17, 1.7),
        (24, 2.4), (25, 2.5), (26, 2.6),
        (28, 11.2), (29, 11.6), (30, 12.0), (32, 3.2),
    ] {
        pi[v - 1] = x;
    }

    let v = |ids: &[usize]| ids.iter().map(|&i| i - 1).collect::<Vec<_>>();
    let subgraphs = vec![
        AttachedSubgraph {
            family: SubgraphFamily::Path,
            vertices: v(&[5, 4, 3, 2]),
            attach: 0,
            params: json!({}),
        },
        AttachedSubgraph {
            family: SubgraphFamily::Palm,
            vertices: v(&[8, 9, 10, 11, 7, 6]),
            attach: 0,
            params: json!({"leaves": 4}),
        },
        AttachedSubgraph {
            family: SubgraphFamily::Lollipop,
            vertices: v(&[14, 15, 16, 17, 13, 12]),
            attach: 0,
            params: json!({"m": 4}),
        },
        AttachedSubgraph {
            family: SubgraphFamily::Ecl,
            vertices: v(&[24, 25, 23, 20, 21, 22, 18, 19]),
            attach: 0,
            params: json!({"fibers": [2, 1, 3, 2]}),
        },
        AttachedSubgraph {
            family: SubgraphFamily::SemiComplete,
            vertices: v(&[32, 31, 28, 29, 30, 27, 26]),
            attach: 0,
            params: json!({"n1": 2, "n2": 2, "m": 3}),
        },
    ];

    let t = |edge: (usize, usize), value: f64| TableEntry { edge, value };
    let pinned_table = vec![
        // path
        t((2, 3), 1.2),
        t((3, 4), 1.714286),
        t((4, 5), 2.222),
        // palm (unique entries)
        t((6, 7), 3.230788),
        t((7, 8), 0.518532),
        t((7, 9), 0.583355),
        // lollipop
        t((12, 13), 6.240006),
        t((13, 14), 0.947944),
        t((13, 15), 1.015646),
        t((13, 16), 1.083346),
        t((13, 17), 1.151045),
        t((14, 15), 0.109411),
        t((14, 16), 0.116697),
        t((14, 17), 0.123986),
        t((15, 16), 0.125025),
        t((15, 17), 0.132831),
        t((16, 17), 0.141676),
        // extended complete ladder (cross and interior-fiber entries)
        t((18, 20), 3.599990),
        t((18, 21), 3.779993),
        t((18, 22), 3.959996),
        t((19, 20), 3.799989),
        t((19, 21), 3.989992),
        t((19, 22), 4.179995),
        t((20, 21), 2.417034),
        t((20, 22), 2.532134),
        t((21, 22), 2.658744),
        t((20, 23), 5.348812),
        t((21, 23), 5.616256),
        t((22, 23), 5.883701),
        t((23, 24), 1.978508),
        t((23, 25), 2.060948),
        // semi-complete
        t((26, 27), 2.371536),
        t((27, 28), 4.893188),
        t((27, 29), 5.067973),
        t((27, 30), 5.242719),
        t((28, 29), 0.343425),
        t((28, 30), 0.355233),
        t((29, 30), 0.367962),
        t((28, 31), 5.276578),
        t((30, 31), 5.653494),
        t((31, 32), 2.900599),
    ];
    // palm pendant weights toward the heavier leaves and the end-fiber clique
    // entries sit on a flat optimal face; only the SLEM pins them. (29,31) is
    // a defect in the published table: its siblings (28,31)/(30,31) satisfy
    // the equal cross-fiber transition-probability property at 1e-6 while it
    // is 5e-3 off, and the closed-form value reproduces the published SLEM.
    let slem_equality_only = vec![(7, 10), (7, 11), (24, 25), (18, 19), (29, 31)];

    CompositeExample {
        graph,
        pi: EquilibriumDistribution::new(pi).unwrap(),
        subgraphs,
        expected_slem: 0.99748869,
        slem_tolerance: 5e-4,
        pinned_table,
        table_tolerance: 1e-3,
        slem_equality_only,
    }
}
