use std::collections::BTreeSet;

use thiserror::Error;

use crate::tree::RootedTree;

pub const DEFAULT_EDGE_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("{requested} edges exceeds the enumeration cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
}

/// The centroid vertices of a tree (one or two).
fn centroids(tree: &RootedTree) -> Vec<usize> {
    let n = tree.n();
    let sizes = tree.subtree_sizes();
    let worst = |v: usize| {
        let below = tree.children(v).iter().map(|&c| sizes[c]).max().unwrap_or(0);
        below.max(n - sizes[v])
    };
    let best = (0..n).map(worst).min().expect("non-empty");
    (0..n).filter(|&v| worst(v) == best).collect()
}

fn ahu(tree: &RootedTree) -> String {
    let mut code = vec![String::new(); tree.n()];
    for &v in tree.bfs_order().iter().rev() {
        let mut parts: Vec<&str> = tree.children(v).iter().map(|&c| code[c].as_str()).collect();
        parts.sort_unstable();
        let s = format!("({})", parts.concat());
        code[v] = s;
    }
    std::mem::take(&mut code[tree.root()])
}

/// Isomorphism-invariant string: the least AHU code over the centroids.
pub fn canonical_form(tree: &RootedTree) -> String {
    centroids(tree).into_iter().map(|c| ahu(&tree.rerooted(c))).min().expect("non-empty")
}

/// Rebuilds the tree an AHU code describes, vertices numbered in preorder.
fn decode(code: &str) -> RootedTree {
    let mut parents = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for b in code.bytes() {
        if b == b'(' {
            parents.push(stack.last().copied());
            stack.push(parents.len() - 1);
        } else {
            stack.pop();
        }
    }
    RootedTree::from_parents(&parents).expect("well-formed code")
}

/// One tree per isomorphism class with `m_edges` edges, rooted at a centroid
/// and sorted by canonical form. Classes are grown by leaf addition.
pub fn enumerate_free_trees(m_edges: usize) -> Result<Vec<RootedTree>, EnumerateError> {
    enumerate_with_cap(m_edges, DEFAULT_EDGE_CAP)
}

pub fn enumerate_with_cap(m_edges: usize, cap: usize) -> Result<Vec<RootedTree>, EnumerateError> {
    if m_edges > cap {
        return Err(EnumerateError::CapExceeded { requested: m_edges, cap });
    }
    let mut level: BTreeSet<String> = BTreeSet::from(["()".to_string()]);
    for _ in 0..m_edges {
        let mut next = BTreeSet::new();
        for code in &level {
            let t = decode(code);
            let n = t.n();
            let mut edges = t.edges();
            for v in 0..n {
                edges.push((v, n));
                let grown = RootedTree::from_edges(n + 1, &edges, 0).expect("leaf addition keeps a tree");
                next.insert(canonical_form(&grown));
                edges.pop();
            }
        }
        level = next;
    }
    Ok(level.iter().map(|c| decode(c)).collect())
}
