//! Network topology: buses, candidate lines, incidence matrices and random
//! (Erdős–Rényi) topologies.
//!
//! Lines are stored in a fixed order so that line `l` always maps to row `l`
//! of the incidence matrix and to entry `l` of any per-line weight vector.
//! Parallel lines between the same pair of buses are allowed.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected multigraph with a stable edge order and an optional
/// reference (slack) bus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyJson", into = "TopologyJson")]
pub struct Topology {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    reference_node: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct TopologyJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    reference: Option<usize>,
}

impl TryFrom<TopologyJson> for Topology {
    type Error = Error;

    fn try_from(raw: TopologyJson) -> Result<Self> {
        let edges = raw.edges.into_iter().map(|[i, j]| (i, j)).collect();
        let t = Topology::new(raw.n, edges)?;
        match raw.reference {
            Some(r) => t.with_reference(r),
            None => Ok(t),
        }
    }
}

impl From<Topology> for TopologyJson {
    fn from(t: Topology) -> Self {
        TopologyJson {
            n: t.n_nodes,
            edges: t.edges.iter().map(|&(i, j)| [i, j]).collect(),
            reference: t.reference_node,
        }
    }
}

impl Topology {
    /// Validates and builds a topology. Edge `l` keeps index `l`.
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::EmptyNetwork);
        }
        for (l, &(i, j)) in edges.iter().enumerate() {
            for node in [i, j] {
                if node >= n_nodes {
                    return Err(Error::EndpointOutOfRange {
                        edge: l,
                        node,
                        n_nodes,
                    });
                }
            }
            if i == j {
                return Err(Error::SelfLoop { edge: l, node: i });
            }
        }
        Ok(Topology {
            n_nodes,
            edges,
            reference_node: None,
        })
    }

    pub fn with_reference(mut self, node: usize) -> Result<Self> {
        if node >= self.n_nodes {
            return Err(Error::ReferenceOutOfRange {
                node,
                n_nodes: self.n_nodes,
            });
        }
        self.reference_node = Some(node);
        Ok(self)
    }

    pub fn path(n_nodes: usize) -> Result<Self> {
        Topology::new(n_nodes, (1..n_nodes).map(|i| (i - 1, i)).collect())
    }

    pub fn complete(n_nodes: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n_nodes * n_nodes.saturating_sub(1) / 2);
        for i in 0..n_nodes {
            for j in i + 1..n_nodes {
                edges.push((i, j));
            }
        }
        Topology::new(n_nodes, edges)
    }

    /// Star with node 0 at the hub.
    pub fn star(leaves: usize) -> Result<Self> {
        Topology::new(leaves + 1, (1..=leaves).map(|j| (0, j)).collect())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn reference_node(&self) -> Option<usize> {
        self.reference_node
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_nodes];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.n_nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    visited += 1;
                    queue.push_back(w);
                }
            }
        }
        visited == self.n_nodes
    }

    /// Connected with exactly `n - 1` lines.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n_nodes && self.is_connected()
    }

    /// Incidence matrix with row `l = (i, j)` equal to `e_i - e_j`. The
    /// reduced form drops the reference bus column.
    pub fn incidence_matrix(&self, reduced: bool) -> Result<IncidenceMatrix> {
        let reference = if reduced {
            Some(self.reference_node.ok_or(Error::MissingReference)?)
        } else {
            None
        };
        let cols = self.n_nodes - usize::from(reduced);
        let column = |node: usize| -> Option<usize> {
            match reference {
                Some(r) if node == r => None,
                Some(r) if node > r => Some(node - 1),
                _ => Some(node),
            }
        };
        let mut matrix = DMatrix::zeros(self.edges.len(), cols);
        for (l, &(i, j)) in self.edges.iter().enumerate() {
            if let Some(c) = column(i) {
                matrix[(l, c)] = 1.0;
            }
            if let Some(c) = column(j) {
                matrix[(l, c)] = -1.0;
            }
        }
        Ok(IncidenceMatrix { matrix, reference })
    }

    /// Combinatorial Laplacian `AᵀA` built directly from the edge list.
    pub fn laplacian(&self) -> DMatrix<f64> {
        self.weighted_laplacian(&vec![1.0; self.edges.len()])
    }

    /// `Aᵀ diag(w) A`. Panics if `weights.len() != m`.
    pub fn weighted_laplacian(&self, weights: &[f64]) -> DMatrix<f64> {
        assert_eq!(weights.len(), self.edges.len(), "one weight per line");
        let mut lap = DMatrix::zeros(self.n_nodes, self.n_nodes);
        for (&(i, j), &w) in self.edges.iter().zip(weights) {
            lap[(i, i)] += w;
            lap[(j, j)] += w;
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
        }
        lap
    }
}

/// Branch-to-bus incidence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    matrix: DMatrix<f64>,
    reference: Option<usize>,
}

impl IncidenceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn is_reduced(&self) -> bool {
        self.reference.is_some()
    }

    pub fn reference(&self) -> Option<usize> {
        self.reference
    }

    pub fn row(&self, l: usize) -> Vec<f64> {
        self.matrix.row(l).iter().copied().collect()
    }

    /// `Aᵀ diag(w) A` for real line weights.
    pub fn gram(&self, weights: &[f64]) -> Result<DMatrix<f64>> {
        if weights.len() != self.matrix.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.matrix.nrows(),
                actual: weights.len(),
            });
        }
        let mut scaled = self.matrix.clone();
        for (mut row, &w) in scaled.row_iter_mut().zip(weights) {
            row *= w;
        }
        Ok(self.matrix.transpose() * scaled)
    }
}

/// Homogeneous Erdős–Rényi topology: every candidate pair `i < j` is visited in
/// lexicographic order, one uniform draw each, and kept when the draw is
/// below `p`.
pub fn sample_er_topology<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Topology> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u < p {
                edges.push((i, j));
            }
        }
    }
    Topology::new(n, edges)
}

/// Uniform random labelled tree on `n` nodes from a random Prüfer sequence.
pub fn sample_random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Topology> {
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    if n == 1 {
        return Topology::new(1, Vec::new());
    }
    if n == 2 {
        return Topology::new(2, vec![(0, 1)]);
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let leaf = (0..n)
            .find(|&u| degree[u] == 1)
            .expect("a leaf always exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    Topology::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn build_errors() {
        assert!(matches!(Topology::new(0, vec![]), Err(Error::EmptyNetwork)));
        assert!(matches!(
            Topology::new(3, vec![(0, 3)]),
            Err(Error::EndpointOutOfRange { node: 3, .. })
        ));
        assert!(matches!(
            Topology::new(3, vec![(1, 1)]),
            Err(Error::SelfLoop { .. })
        ));
        assert_eq!(Topology::new(2, vec![(0, 1)]).unwrap().n_edges(), 1);
    }

    #[test]
    fn path_incidence() {
        let p3 = Topology::path(3).unwrap();
        let a = p3.incidence_matrix(false).unwrap();
        assert_eq!(a.row(0), vec![1.0, -1.0, 0.0]);
        assert_eq!(a.row(1), vec![0.0, 1.0, -1.0]);
        let lap = a.matrix().transpose() * a.matrix();
        let expected =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(lap, expected);
        assert_eq!(p3.laplacian(), expected);
    }

    #[test]
    fn reduced_incidence_needs_reference() {
        let p3 = Topology::path(3).unwrap();
        assert!(matches!(
            p3.incidence_matrix(true),
            Err(Error::MissingReference)
        ));
        let a = p3
            .with_reference(0)
            .unwrap()
            .incidence_matrix(true)
            .unwrap();
        assert_eq!(a.matrix().shape(), (2, 2));
        assert_eq!(a.row(0), vec![-1.0, 0.0]);
        assert_eq!(a.row(1), vec![1.0, -1.0]);
    }

    #[test]
    fn degrees_and_trees() {
        let p3 = Topology::path(3).unwrap();
        assert_eq!(p3.degrees(), vec![1, 2, 1]);
        assert_eq!(p3.max_degree(), 2);
        let k3 = Topology::complete(3).unwrap();
        assert_eq!(k3.degrees(), vec![2, 2, 2]);
        assert_eq!(Topology::star(4).unwrap().max_degree(), 4);

        assert!(p3.is_tree());
        assert!(!k3.is_tree());
        let split = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(!split.is_tree());
    }

    #[test]
    fn parallel_lines_count_twice() {
        let t = Topology::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(t.degrees(), vec![2, 2]);
        assert_eq!(t.laplacian()[(0, 1)], -2.0);
    }

    #[test]
    fn er_degenerate_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_er_topology(5, 0.0, &mut rng).unwrap().n_edges(), 0);
        assert_eq!(sample_er_topology(5, 1.0, &mut rng).unwrap().n_edges(), 10);
        assert!(matches!(
            sample_er_topology(5, 1.5, &mut rng),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..40 {
            assert!(
                sample_random_tree(n, &mut rng).unwrap().is_tree(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn json_shape() {
        let t = Topology::path(3).unwrap().with_reference(0).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1],[1,2]],"reference":0}"#);
        let back: Topology = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        let bad = serde_json::from_str::<Topology>(r#"{"n":3,"edges":[[0,3]]}"#);
        assert!(bad.is_err());
    }
}
