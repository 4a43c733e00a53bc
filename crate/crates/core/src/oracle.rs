//! Brute-force triangle counters used as ground truth.
//!
//! These are written for obviousness, not speed: an adjacency matrix, nested
//! loops and full enumeration. Inputs are capped accordingly.

use crate::graph_io::{Edge, NodeId};

pub const MAX_NODES: usize = 2000;
pub const MAX_EDGES: usize = 50_000;
/// Edge-occurrence cap for [`multigraph_count`], which enumerates triples.
pub const MAX_MULTIGRAPH_EDGES: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("graph too large for a brute-force oracle: {what} = {got} exceeds {cap}")]
    TooLarge { what: &'static str, got: usize, cap: usize },
}

fn check_cap(what: &'static str, got: usize, cap: usize) -> Result<(), OracleError> {
    if got > cap {
        Err(OracleError::TooLarge { what, got, cap })
    } else {
        Ok(())
    }
}

/// Symmetric adjacency matrix with a zero diagonal. Entries are edge
/// multiplicities; a simple graph has only 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGraph {
    n: usize,
    cells: Vec<u32>,
}

impl DenseGraph {
    pub fn empty(n: usize) -> Result<Self, OracleError> {
        check_cap("nodes", n, MAX_NODES)?;
        Ok(DenseGraph { n, cells: vec![0; n * n] })
    }

    /// Simple graph on nodes `0..n`; repeated edges collapse to one.
    pub fn simple(n: usize, edges: &[Edge]) -> Result<Self, OracleError> {
        check_cap("edges", edges.len(), MAX_EDGES)?;
        let mut g = Self::empty(n)?;
        for e in edges {
            g.set(e.u, e.v, 1);
        }
        Ok(g)
    }

    /// Multigraph on nodes `0..n`: entries count edge occurrences.
    pub fn multi(n: usize, edges: &[Edge]) -> Result<Self, OracleError> {
        check_cap("edges", edges.len(), MAX_EDGES)?;
        let mut g = Self::empty(n)?;
        for e in edges {
            let m = g.get(e.u.index(), e.v.index());
            g.set(e.u, e.v, m + 1);
        }
        Ok(g)
    }

    /// Simple graph over `0..=max id` of `edges`.
    pub fn from_edges(edges: &[Edge]) -> Result<Self, OracleError> {
        let n = edges.iter().map(|e| e.u.index().max(e.v.index()) + 1).max().unwrap_or(0);
        Self::simple(n, edges)
    }

    fn set(&mut self, u: NodeId, v: NodeId, m: u32) {
        let (u, v) = (u.index(), v.index());
        assert!(u != v, "self-loop in oracle graph");
        self.cells[u * self.n + v] = m;
        self.cells[v * self.n + u] = m;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.cells[u * self.n + v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.get(u, v) > 0
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.adjacent(v, u)).collect()
    }

    /// Distinct edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Result of the half-count triple loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaiveCount {
    pub triangles: u64,
    /// Twice the fractional accumulator: one unit per ordered neighbour pair
    /// `(u, w)` of some `v` with `u` and `w` adjacent.
    pub doubled_accumulator: u64,
}

/// For every `v` and every ordered pair of its neighbours that are adjacent,
/// add one half; the sum counts every triangle six times in halves.
pub fn naive_count_detailed(g: &DenseGraph) -> NaiveCount {
    let mut doubled = 0u64;
    for v in 0..g.n() {
        let gamma = g.neighbours(v);
        for &u in &gamma {
            for &w in &gamma {
                if g.adjacent(u, w) {
                    doubled += 1;
                }
            }
        }
    }
    assert_eq!(doubled % 6, 0, "triangle half-counts must come in sixes");
    NaiveCount { triangles: doubled / 6, doubled_accumulator: doubled }
}

pub fn naive_count(g: &DenseGraph) -> u64 {
    naive_count_detailed(g).triangles
}

/// Sum over nodes of the number of edges among their neighbours, over three.
pub fn node_iterator_count(g: &DenseGraph) -> u64 {
    let edges = g.edges();
    let mut sum = 0u64;
    for v in 0..g.n() {
        let in_nbhd: Vec<bool> = (0..g.n()).map(|u| g.adjacent(v, u)).collect();
        let t_v = edges.iter().filter(|&&(u, w)| in_nbhd[u] && in_nbhd[w]).count() as u64;
        sum += t_v;
    }
    assert_eq!(sum % 3, 0, "every triangle is seen from each of its corners");
    sum / 3
}

/// Number of unordered triples of distinct edge occurrences that form a
/// triangle on three distinct nodes.
pub fn multigraph_count(edges: &[Edge]) -> Result<u64, OracleError> {
    check_cap("edge occurrences", edges.len(), MAX_MULTIGRAPH_EDGES)?;
    let mut count = 0u64;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = (edges[i], edges[j]);
            if a.key() == b.key() {
                continue;
            }
            let Some(shared) = [a.u, a.v].into_iter().find(|&x| b.touches(x)) else {
                continue;
            };
            let x = a.other(shared).unwrap();
            let y = b.other(shared).unwrap();
            let closing = Edge::new(x, y).key();
            count += edges[j + 1..].iter().filter(|c| c.key() == closing).count() as u64;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_io::{generate, GeneratorSpec};
    use proptest::prelude::*;

    fn g(spec: GeneratorSpec) -> DenseGraph {
        DenseGraph::simple(spec.n as usize, &generate(&spec).unwrap()).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(naive_count(&g(GeneratorSpec::complete(3))), 1);
        assert_eq!(naive_count(&g(GeneratorSpec::complete(5))), 10);
        assert_eq!(naive_count(&g(GeneratorSpec::path(10))), 0);
        assert_eq!(node_iterator_count(&g(GeneratorSpec::complete(4))), 4);
        assert_eq!(node_iterator_count(&g(GeneratorSpec::cycle(3))), 1);
        assert_eq!(node_iterator_count(&g(GeneratorSpec::cycle(7))), 0);
    }

    #[test]
    fn accumulator_counts_each_triangle_six_times() {
        let c = naive_count_detailed(&g(GeneratorSpec::complete(6)));
        assert_eq!(c.triangles, 20);
        assert_eq!(c.doubled_accumulator, 120);
    }

    #[test]
    fn disjoint_triangles_add_up() {
        let edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)].map(|(a, b)| Edge::of(a, b));
        let dense = DenseGraph::from_edges(&edges).unwrap();
        assert_eq!(node_iterator_count(&dense), 2);
        assert_eq!(naive_count(&dense), 2);
    }

    #[test]
    fn formulations_agree_on_gnp_50() {
        let dense = g(GeneratorSpec::gnp(50, 0.2, 11));
        assert_eq!(node_iterator_count(&dense), naive_count(&dense));
    }

    #[test]
    fn multigraph_enumeration() {
        let k3 = [Edge::of(0, 1), Edge::of(1, 2), Edge::of(2, 0)];
        assert_eq!(multigraph_count(&k3).unwrap(), 1);
        let doubled: Vec<_> = k3.iter().chain(k3.iter()).copied().collect();
        assert_eq!(multigraph_count(&doubled).unwrap(), 8);
        let one_doubled = [Edge::of(0, 1), Edge::of(1, 0), Edge::of(1, 2), Edge::of(2, 0)];
        assert_eq!(multigraph_count(&one_doubled).unwrap(), 2);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(DenseGraph::empty(MAX_NODES + 1), Err(OracleError::TooLarge { .. })));
        let many = vec![Edge::of(0, 1); MAX_MULTIGRAPH_EDGES + 1];
        assert!(multigraph_count(&many).is_err());
    }

    proptest! {
        #[test]
        fn naive_matches_node_iterator(n in 1u32..40, p in 0.0f64..0.8, seed in any::<u64>()) {
            let dense = g(GeneratorSpec::gnp(n, p, seed));
            prop_assert_eq!(naive_count(&dense), node_iterator_count(&dense));
        }

        #[test]
        fn multigraph_on_simple_equals_naive(n in 1u32..25, p in 0.0f64..0.7, seed in any::<u64>()) {
            let edges = generate(&GeneratorSpec::gnp(n, p, seed)).unwrap();
            let dense = DenseGraph::simple(n as usize, &edges).unwrap();
            prop_assert_eq!(multigraph_count(&edges).unwrap(), naive_count(&dense));
        }
    }
}
