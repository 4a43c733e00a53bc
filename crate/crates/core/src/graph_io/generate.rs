use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, GraphError, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Complete,
    Path,
    Cycle,
    /// Node 0 joined to every other node.
    Star,
    /// Erdős–Rényi G(n, p).
    Gnp,
}

/// Descriptor of a synthetic graph. Nodes are `0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: u32,
    /// Edge probability, read only by [`Model::Gnp`].
    pub p: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn complete(n: u32) -> Self {
        Self { model: Model::Complete, n, p: 1.0, seed: 0 }
    }

    pub fn path(n: u32) -> Self {
        Self { model: Model::Path, n, p: 1.0, seed: 0 }
    }

    pub fn cycle(n: u32) -> Self {
        Self { model: Model::Cycle, n, p: 1.0, seed: 0 }
    }

    pub fn star(n: u32) -> Self {
        Self { model: Model::Star, n, p: 1.0, seed: 0 }
    }

    pub fn gnp(n: u32, p: f64, seed: u64) -> Self {
        Self { model: Model::Gnp, n, p, seed }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n < 1 {
            return Err(GraphError::InvalidSpec("n must be at least 1".into()));
        }
        if self.model == Model::Cycle && self.n < 3 {
            return Err(GraphError::InvalidSpec(format!("cycle needs n >= 3, got {}", self.n)));
        }
        if self.model == Model::Gnp && !(0.0..=1.0).contains(&self.p) {
            return Err(GraphError::InvalidSpec(format!("p must lie in [0, 1], got {}", self.p)));
        }
        Ok(())
    }

    /// Lazy edge sequence for this spec.
    pub fn edges(&self) -> Result<GeneratedEdges, GraphError> {
        self.validate()?;
        Ok(GeneratedEdges::new(*self))
    }
}

/// Materialized edge sequence of `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Edge>, GraphError> {
    Ok(spec.edges()?.collect())
}

/// Position `(i, j)`, `i < j`, in the row-major enumeration of node pairs.
#[derive(Debug, Clone)]
struct PairCursor {
    n: u32,
    i: u32,
    j: u32,
    done: bool,
}

impl PairCursor {
    fn new(n: u32) -> Self {
        PairCursor { n, i: 0, j: 1, done: n < 2 }
    }

    fn current(&self) -> Option<Edge> {
        (!self.done).then(|| Edge::of(self.i, self.j))
    }

    fn advance(&mut self, mut k: u64) {
        while k > 0 && !self.done {
            let left_in_row = u64::from(self.n - self.j);
            if k < left_in_row {
                self.j += k as u32;
                return;
            }
            k -= left_in_row;
            self.i += 1;
            self.j = self.i + 1;
            if self.j >= self.n {
                self.done = true;
            }
        }
    }
}

/// Iterator over the edges of a [`GeneratorSpec`].
#[derive(Debug, Clone)]
pub struct GeneratedEdges {
    spec: GeneratorSpec,
    k: u32,
    pairs: PairCursor,
    rng: ChaCha8Rng,
}

impl GeneratedEdges {
    fn new(spec: GeneratorSpec) -> Self {
        GeneratedEdges {
            spec,
            k: 0,
            pairs: PairCursor::new(spec.n),
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        }
    }

    fn next_gnp(&mut self) -> Option<Edge> {
        let p = self.spec.p;
        if p <= 0.0 {
            return None;
        }
        if p < 1.0 {
            // Geometric gap to the next kept pair; same law as one coin per pair.
            let u: f64 = self.rng.gen();
            let gap = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
            self.pairs.advance(if gap.is_finite() && gap < u64::MAX as f64 { gap as u64 } else { u64::MAX });
        }
        let e = self.pairs.current();
        self.pairs.advance(1);
        e
    }
}

impl Iterator for GeneratedEdges {
    type Item = Edge;

    fn next(&mut self) -> Option<Edge> {
        let n = self.spec.n;
        match self.spec.model {
            Model::Complete => {
                let e = self.pairs.current();
                self.pairs.advance(1);
                e
            }
            Model::Path => {
                let k = self.k;
                (k + 1 < n).then(|| {
                    self.k += 1;
                    Edge::of(k, k + 1)
                })
            }
            Model::Cycle => {
                let k = self.k;
                (k < n).then(|| {
                    self.k += 1;
                    if k + 1 < n {
                        Edge::of(k, k + 1)
                    } else {
                        Edge::of(k, 0)
                    }
                })
            }
            Model::Star => {
                let k = self.k + 1;
                (k < n).then(|| {
                    self.k += 1;
                    Edge::new(NodeId(0), NodeId(k))
                })
            }
            Model::Gnp => self.next_gnp(),
        }
    }
}

/// Multigraph variant of `edges`: each edge independently gets extra copies
/// with probability `prob`, for a total multiplicity uniform in `2..=max_mult`.
/// Copies are randomly re-oriented and the whole list is shuffled.
pub fn with_duplicates(edges: &[Edge], prob: f64, max_mult: u32, seed: u64) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(edges.len() * 2);
    for &e in edges {
        out.push(e);
        if max_mult >= 2 && rng.gen_bool(prob) {
            let mult = rng.gen_range(2..=max_mult);
            for _ in 1..mult {
                out.push(if rng.gen_bool(0.5) { e.reversed() } else { e });
            }
        }
    }
    out.shuffle(&mut rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn closed_form_sizes() {
        assert_eq!(generate(&GeneratorSpec::complete(4)).unwrap().len(), 6);
        assert_eq!(generate(&GeneratorSpec::complete(1)).unwrap().len(), 0);
        assert_eq!(generate(&GeneratorSpec::path(5)).unwrap().len(), 4);
        assert_eq!(generate(&GeneratorSpec::path(1)).unwrap().len(), 0);
        assert_eq!(generate(&GeneratorSpec::cycle(6)).unwrap().len(), 6);
        assert_eq!(generate(&GeneratorSpec::star(11)).unwrap().len(), 10);
        for n in 1..15 {
            let edges = generate(&GeneratorSpec::complete(n)).unwrap();
            assert_eq!(edges.len() as u32, n * (n - 1) / 2);
            let keys: HashSet<_> = edges.iter().map(|e| e.key()).collect();
            assert_eq!(keys.len(), edges.len());
        }
    }

    #[test]
    fn cycle_closes_back_to_zero() {
        let edges = generate(&GeneratorSpec::cycle(4)).unwrap();
        assert_eq!(edges, vec![Edge::of(0, 1), Edge::of(1, 2), Edge::of(2, 3), Edge::of(3, 0)]);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(GeneratorSpec::complete(0).validate(), Err(GraphError::InvalidSpec(_))));
        assert!(GeneratorSpec::gnp(10, 1.5, 0).validate().is_err());
        assert!(GeneratorSpec::gnp(10, -0.1, 0).validate().is_err());
        assert!(GeneratorSpec::gnp(10, f64::NAN, 0).validate().is_err());
        assert!(GeneratorSpec::cycle(2).validate().is_err());
    }

    #[test]
    fn gnp_is_seed_deterministic() {
        let a = generate(&GeneratorSpec::gnp(100, 0.1, 7)).unwrap();
        let b = generate(&GeneratorSpec::gnp(100, 0.1, 7)).unwrap();
        let c = generate(&GeneratorSpec::gnp(100, 0.1, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_extremes() {
        assert!(generate(&GeneratorSpec::gnp(50, 0.0, 1)).unwrap().is_empty());
        assert_eq!(generate(&GeneratorSpec::gnp(50, 1.0, 1)).unwrap(), generate(&GeneratorSpec::complete(50)).unwrap());
    }

    #[test]
    fn gnp_edges_are_simple_and_in_range() {
        let edges = generate(&GeneratorSpec::gnp(300, 0.05, 99)).unwrap();
        let keys: HashSet<_> = edges.iter().map(|e| e.key()).collect();
        assert_eq!(keys.len(), edges.len());
        assert!(edges.iter().all(|e| e.u < e.v && e.v.0 < 300));
    }

    #[test]
    fn gnp_edge_density_matches_p() {
        // 200 nodes, 19900 pairs; mean 1990 and sd ~42 at p = 0.1.
        let m = generate(&GeneratorSpec::gnp(200, 0.1, 3)).unwrap().len() as f64;
        assert!((m - 1990.0).abs() < 6.0 * 42.3, "edge count {m}");
    }

    #[test]
    fn duplicates_respect_multiplicity_cap() {
        let base = generate(&GeneratorSpec::complete(10)).unwrap();
        let multi = with_duplicates(&base, 0.3, 3, 5);
        let mut mult = std::collections::HashMap::new();
        for e in &multi {
            *mult.entry(e.key()).or_insert(0) += 1;
        }
        assert_eq!(mult.len(), base.len());
        assert!(mult.values().all(|&m| (1..=3).contains(&m)));
        assert!(mult.values().any(|&m| m > 1));
        assert_eq!(multi, with_duplicates(&base, 0.3, 3, 5));
    }
}
