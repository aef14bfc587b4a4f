//! Partial injective maps from tree vertices to host vertices.

use crate::bitset::VertexSet;
use crate::graph::HostGraph;
use crate::tree::RootedTree;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Embedding {
    image: Vec<Option<usize>>,
    used: VertexSet,
}

impl Embedding {
    pub fn new(tree_n: usize, graph_n: usize) -> Self {
        Self { image: vec![None; tree_n], used: VertexSet::new(graph_n) }
    }

    /// Builds from a raw image vector without checking injectivity.
    pub fn from_images(image: Vec<Option<usize>>, graph_n: usize) -> Self {
        let mut used = VertexSet::new(graph_n);
        for x in image.iter().flatten() {
            if *x < graph_n {
                used.insert(*x);
            }
        }
        Self { image, used }
    }

    #[inline]
    pub fn get(&self, tv: usize) -> Option<usize> {
        self.image[tv]
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.image
    }

    pub fn used(&self) -> &VertexSet {
        &self.used
    }

    #[inline]
    pub fn is_used(&self, gv: usize) -> bool {
        self.used.contains(gv)
    }

    /// Maps `tv` to `gv`. Panics if either side is already taken.
    pub fn place(&mut self, tv: usize, gv: usize) {
        assert!(self.image[tv].is_none(), "tree vertex {tv} already placed");
        assert!(self.used.insert(gv), "host vertex {gv} already used");
        self.image[tv] = Some(gv);
    }

    pub fn unplace(&mut self, tv: usize) -> Option<usize> {
        let gv = self.image[tv].take()?;
        self.used.remove(gv);
        Some(gv)
    }

    pub fn domain_len(&self) -> usize {
        self.image.iter().filter(|x| x.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.image.iter().all(Option::is_some)
    }

    /// Dense map for a complete embedding.
    pub fn to_map(&self) -> Option<Vec<usize>> {
        self.image.iter().copied().collect()
    }
}

/// Checks injectivity on the domain and that every tree edge with both ends
/// mapped lands on a host edge.
pub fn verify_embedding(g: &HostGraph, t: &RootedTree, phi: &Embedding) -> bool {
    if phi.image.len() != t.n() {
        return false;
    }
    let mut seen = VertexSet::new(g.n());
    for x in phi.image.iter().flatten() {
        if *x >= g.n() || !seen.insert(*x) {
            return false;
        }
    }
    t.edges().into_iter().all(|(u, v)| match (phi.image[u], phi.image[v]) {
        (Some(a), Some(b)) => g.has_edge(a, b),
        _ => true,
    })
}

/// True when `phi` is a valid embedding covering every tree vertex.
pub fn is_full_embedding(g: &HostGraph, t: &RootedTree, phi: &Embedding) -> bool {
    phi.is_complete() && verify_embedding(g, t, phi)
}
