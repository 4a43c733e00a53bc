//! In-memory simulation of the two-round MapReduce node-iterator.
//!
//! Round one keys every edge by both endpoints and emits, per node, every
//! unordered pair of its neighbours as a 2-path. Round two keys 2-paths by
//! their end pair and edges by their node pair; a cluster holding an edge
//! closes all of its 2-paths. Each triangle is closed once from each corner.
//!
//! Nothing is partitioned across workers: the point is the volume of
//! intermediate 2-paths, which does not depend on partitioning.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::engine::{run_two_rounds, EngineError, RunConfig};
use crate::graph_io::{dedup_edges, vertex_count, Edge, EdgeSource, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoPath {
    pub middle: NodeId,
    /// End nodes, smaller id first.
    pub ends: (NodeId, NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MrStats {
    pub two_paths_emitted: u64,
    /// Distinct keys seen by the round-two reducers.
    pub clustered_keys: u64,
    /// Sum over closed clusters of (cluster size - 1), before normalization.
    pub closed_wedges: u64,
    pub triangles: u64,
}

/// All 2-paths of the simple graph underlying `edges`, grouped by middle node.
pub fn mr_round1(edges: &[Edge]) -> Vec<TwoPath> {
    // map: edge -> (u, v), (v, u); reduce by first component
    let mut by_node: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in dedup_edges(edges) {
        by_node.entry(e.u).or_default().push(e.v);
        by_node.entry(e.v).or_default().push(e.u);
    }
    let mut out = Vec::new();
    for (middle, nbrs) in by_node {
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                out.push(TwoPath { middle, ends: Edge::new(a, b).key() });
            }
        }
    }
    out
}

/// Clusters 2-paths with edges by node pair and counts closed 2-paths.
pub fn mr_round2(two_paths: &[TwoPath], edges: &[Edge]) -> MrStats {
    #[derive(Default)]
    struct Cluster {
        paths: u64,
        has_edge: bool,
    }
    let mut clusters: BTreeMap<(NodeId, NodeId), Cluster> = BTreeMap::new();
    for p in two_paths {
        clusters.entry(p.ends).or_default().paths += 1;
    }
    for e in dedup_edges(edges) {
        clusters.entry(e.key()).or_default().has_edge = true;
    }
    let closed_wedges: u64 = clusters
        .values()
        .filter(|c| c.has_edge)
        // cluster size minus the one edge record
        .map(|c| (c.paths + 1) - 1)
        .sum();
    MrStats {
        two_paths_emitted: two_paths.len() as u64,
        clustered_keys: clusters.len() as u64,
        closed_wedges,
        triangles: closed_wedges / 3,
    }
}

pub fn mr_count(edges: &[Edge]) -> MrStats {
    mr_round2(&mr_round1(edges), edges)
}

/// Intermediate-storage comparison between the MapReduce baseline and the
/// pipeline on one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeReport {
    pub graph: String,
    pub vertices: usize,
    /// Distinct edges.
    pub edges: usize,
    pub mr_two_paths: u64,
    /// Adjacency entries held across all stages after the first pass.
    pub pipeline_storage: usize,
    pub mr_triangles: u64,
    pub pipeline_triangles: u64,
}

impl VolumeReport {
    pub const CSV_HEADER: &'static str = "graph,vertices,edges,mr_two_paths,pipeline_storage,triangles";

    pub fn triangles_agree(&self) -> bool {
        self.mr_triangles == self.pipeline_triangles
    }

    pub fn csv_row(&self) -> String {
        let mut row = String::new();
        write!(
            row,
            "{},{},{},{},{},{}",
            self.graph, self.vertices, self.edges, self.mr_two_paths, self.pipeline_storage, self.pipeline_triangles
        )
        .unwrap();
        row
    }
}

/// Runs both the MapReduce simulation and the pipeline (set mode) on `edges`.
pub fn compare_volumes(graph: &str, edges: &[Edge]) -> Result<VolumeReport, EngineError> {
    let simple = dedup_edges(edges);
    let mr = mr_count(&simple);
    let mut source = EdgeSource::edges(simple.clone());
    let report = run_two_rounds(&mut source, &RunConfig::default())?;
    Ok(VolumeReport {
        graph: graph.replace(',', ";"),
        vertices: vertex_count(&simple),
        edges: simple.len(),
        mr_two_paths: mr.two_paths_emitted,
        pipeline_storage: report.adjacency_storage(),
        mr_triangles: mr.triangles,
        pipeline_triangles: report.result.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_io::{generate, GeneratorSpec};
    use crate::oracle::{naive_count, DenseGraph};

    fn gen(spec: GeneratorSpec) -> Vec<Edge> {
        generate(&spec).unwrap()
    }

    fn choose2(k: u64) -> u64 {
        k * k.saturating_sub(1) / 2
    }

    #[test]
    fn round1_volumes() {
        assert_eq!(mr_round1(&gen(GeneratorSpec::complete(3))).len(), 3);
        assert_eq!(mr_round1(&gen(GeneratorSpec::star(1 + 7))).len() as u64, choose2(7));
        assert_eq!(mr_round1(&gen(GeneratorSpec::path(4))).len(), 2);
    }

    #[test]
    fn round1_matches_degree_formula() {
        let edges = gen(GeneratorSpec::gnp(80, 0.1, 9));
        let mut deg = std::collections::HashMap::new();
        for e in &edges {
            *deg.entry(e.u).or_insert(0u64) += 1;
            *deg.entry(e.v).or_insert(0u64) += 1;
        }
        let expected: u64 = deg.values().map(|&d| choose2(d)).sum();
        assert_eq!(mr_round1(&edges).len() as u64, expected);
    }

    #[test]
    fn k3_closes_from_every_corner() {
        let stats = mr_count(&gen(GeneratorSpec::complete(3)));
        assert_eq!(stats.closed_wedges, 3);
        assert_eq!(stats.triangles, 1);
        assert!(stats.triangles <= stats.two_paths_emitted);
    }

    #[test]
    fn path_closes_nothing() {
        assert_eq!(mr_count(&gen(GeneratorSpec::path(30))).triangles, 0);
    }

    #[test]
    fn gnp_matches_oracle() {
        let edges = gen(GeneratorSpec::gnp(100, 0.1, 3));
        let oracle = naive_count(&DenseGraph::simple(100, &edges).unwrap());
        assert_eq!(mr_count(&edges).triangles, oracle);
    }

    #[test]
    fn volume_closed_forms() {
        let star = compare_volumes("star51", &gen(GeneratorSpec::star(51))).unwrap();
        assert_eq!((star.mr_two_paths, star.pipeline_storage), (1225, 50));
        let k10 = compare_volumes("k10", &gen(GeneratorSpec::complete(10))).unwrap();
        assert_eq!((k10.mr_two_paths, k10.pipeline_storage), (360, 45));
        assert_eq!(k10.pipeline_triangles, 120);
        assert!(k10.triangles_agree());
        let path = compare_volumes("path100", &gen(GeneratorSpec::path(100))).unwrap();
        assert_eq!((path.mr_two_paths, path.pipeline_storage), (98, 99));
    }

    #[test]
    fn duplicates_do_not_inflate_volumes() {
        let mut edges = gen(GeneratorSpec::complete(4));
        edges.extend(gen(GeneratorSpec::complete(4)).iter().map(|e| e.reversed()));
        let r = compare_volumes("k4x2", &edges).unwrap();
        assert_eq!((r.edges, r.pipeline_storage, r.mr_two_paths, r.pipeline_triangles), (6, 6, 12, 4));
    }

    #[test]
    fn csv_row_layout() {
        let r = compare_volumes("k4,x", &gen(GeneratorSpec::complete(4))).unwrap();
        assert_eq!(r.csv_row(), "k4;x,4,6,12,6,4");
        assert_eq!(VolumeReport::CSV_HEADER.split(',').count(), r.csv_row().split(',').count());
    }
}
