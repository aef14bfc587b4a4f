//! Rooted trees and forest utilities over subsets of tree vertices.

use std::collections::VecDeque;

use thiserror::Error;

use crate::bitset::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree needs at least one vertex")]
    Empty,
    #[error("expected {expected} edges for {n} vertices, got {got}")]
    EdgeCount { n: usize, expected: usize, got: usize },
    #[error("vertex {vertex} out of range for tree on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("edge set is not a tree (cycle or disconnected)")]
    NotATree,
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex subset does not induce a connected subtree")]
    Disconnected,
}

/// A tree with a designated root, stored with parent pointers and BFS order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    neighbours: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
    leaf_count_at: Vec<usize>,
}

impl RootedTree {
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::EdgeCount { n, expected: n - 1, got: edges.len() });
        }
        if root >= n {
            return Err(TreeError::InvalidVertex { vertex: root, n });
        }
        let mut neighbours = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(TreeError::InvalidVertex { vertex: x, n });
                }
            }
            if u == v {
                return Err(TreeError::NotATree);
            }
            neighbours[u].push(v);
            neighbours[v].push(u);
        }
        for nb in neighbours.iter_mut() {
            nb.sort_unstable();
        }
        Self::from_neighbours(neighbours, root)
    }

    /// Builds from a parent array; exactly one entry must be `None`.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self, TreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let roots: Vec<_> = (0..n).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::NotATree);
        }
        let edges: Vec<_> = (0..n).filter_map(|v| parents[v].map(|p| (v, p))).collect();
        Self::from_edges(n, &edges, roots[0])
    }

    fn from_neighbours(neighbours: Vec<Vec<usize>>, root: usize) -> Result<Self, TreeError> {
        let n = neighbours.len();
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        depth[root] = 0;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &neighbours[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some(u);
                    children[u].push(v);
                    queue.push_back(v);
                } else if parent[u] != Some(v) {
                    return Err(TreeError::NotATree);
                }
            }
        }
        if order.len() != n {
            return Err(TreeError::NotATree);
        }
        let leaf_count_at = (0..n)
            .map(|v| neighbours[v].iter().filter(|&&u| neighbours[u].len() == 1).count())
            .collect();
        Ok(Self { root, parent, neighbours, children, depth, order, leaf_count_at })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges, 0).expect("path is a tree")
    }

    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges, 0).expect("star is a tree")
    }

    pub fn rerooted(&self, root: usize) -> Self {
        Self::from_neighbours(self.neighbours.clone(), root).expect("rerooting preserves treeness")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Number of edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.n() - 1
    }

    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.neighbours[v]
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    #[inline]
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbours[v].len()
    }

    #[inline]
    pub fn is_leaf(&self, v: usize) -> bool {
        self.degree(v) == 1
    }

    #[inline]
    pub fn leaf_count_at(&self, v: usize) -> usize {
        self.leaf_count_at[v]
    }

    pub fn max_leaf_count(&self) -> usize {
        self.leaf_count_at.iter().copied().max().unwrap_or(0)
    }

    /// Vertices in BFS order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&v| self.is_leaf(v))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).filter_map(|v| self.parent[v].map(|p| (v, p))).collect()
    }

    /// Subtree sizes (each vertex counts itself) for the current rooting.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.n()];
        for &v in self.order.iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Connected components of the forest induced on `keep`.
    pub fn components(&self, keep: &VertexSet) -> Vec<Vec<usize>> {
        let mut seen = VertexSet::new(self.n());
        let mut out = Vec::new();
        for s in keep.iter() {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.neighbours[u] {
                    if keep.contains(v) && seen.insert(v) {
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected_subset(&self, sub: &VertexSet) -> bool {
        !sub.is_empty() && self.components(sub).len() == 1
    }

    pub fn vertex_set(&self, verts: &[usize]) -> VertexSet {
        VertexSet::from_iter_with_capacity(self.n(), verts.iter().copied())
    }
}

/// Splits a connected subtree into its two depth-parity classes, relative to
/// the subtree's shallowest vertex. The first class contains that vertex.
pub fn bipartition_classes(
    tree: &RootedTree,
    sub: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), TreeError> {
    if sub.is_empty() {
        return Err(TreeError::EmptySubset);
    }
    if let Some(&v) = sub.iter().find(|&&v| v >= tree.n()) {
        return Err(TreeError::InvalidVertex { vertex: v, n: tree.n() });
    }
    let set = tree.vertex_set(sub);
    if !tree.is_connected_subset(&set) {
        return Err(TreeError::Disconnected);
    }
    let top = set.iter().min_by_key(|&v| tree.depth(v)).expect("nonempty");
    let base = tree.depth(top) % 2;
    let (even, odd): (Vec<usize>, Vec<usize>) =
        set.iter().partition(|&v| tree.depth(v) % 2 == base);
    Ok((even, odd))
}
