//! Host graphs: simple undirected graphs on dense vertex indices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("common neighbourhood needs two distinct vertices, got {0} twice")]
    SameVertex(usize),
}

/// Undirected simple graph with adjacency bitrows.
///
/// `m()` is the edge count of the spanning trees this graph hosts, i.e. `n - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct HostGraph {
    adj: Vec<VertexSet>,
}

impl HostGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        Ok(Self {
            adj: (0..n).map(|_| VertexSet::new(n)).collect(),
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for v in 0..n {
            g.adj[v] = VertexSet::full(n);
            g.adj[v].remove(v);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.n() - 1
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n() {
            Err(GraphError::InvalidVertex { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n() && v < self.n() {
            self.adj[u].remove(v);
            self.adj[v].remove(u);
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degree_into(&self, v: usize, set: &VertexSet) -> usize {
        self.adj[v].intersection_len(set)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            out.extend(self.adj[u].iter().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Number of edges with one end in `a` and the other in `b`; `a` and `b` disjoint.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        a.iter().map(|v| self.adj[v].intersection_len(b)).sum()
    }

    pub fn common_neighbours(&self, u: usize, v: usize) -> Result<VertexSet, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SameVertex(u));
        }
        Ok(self.adj[u].intersection(&self.adj[v]))
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn universal_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.degree(v) == self.m()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = VertexSet::new(self.n());
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(u) = stack.pop() {
            for v in self.adj[u].iter() {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == self.n()
    }
}

impl std::fmt::Debug for HostGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HostGraph")
            .field("n", &self.n())
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Outcome of checking the degree hypothesis on a host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub is_m_good: bool,
    pub min_degree: usize,
    pub required_degree: usize,
    pub universal_vertices: Vec<usize>,
}

/// `⌊2m/3⌋`.
#[inline]
pub fn required_degree(m: usize) -> usize {
    2 * m / 3
}

pub fn validate_m_good(g: &HostGraph) -> GoodnessReport {
    let min_degree = g.min_degree();
    let required = required_degree(g.m());
    let universal_vertices = g.universal_vertices();
    GoodnessReport {
        is_m_good: min_degree >= required && !universal_vertices.is_empty(),
        min_degree,
        required_degree: required,
        universal_vertices,
    }
}
